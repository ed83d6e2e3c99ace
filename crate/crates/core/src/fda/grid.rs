//! Uniform-grid numerics shared by every representation on `[0, 1]`.
//!
//! All functions here assume `n >= 3` samples at `t_i = i / (n - 1)`.

/// Spacing of an `n`-point uniform grid on `[0, 1]`.
pub fn step(n: usize) -> f64 {
    1.0 / (n - 1) as f64
}

/// The grid nodes `t_i = i / (n - 1)`; the last node is exactly `1.0`.
pub fn nodes(n: usize) -> Vec<f64> {
    let denom = (n - 1) as f64;
    (0..n).map(|i| i as f64 / denom).collect()
}

/// Central differences in the interior, one-sided second-order at both ends.
pub fn derivative(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    debug_assert!(n >= 3);
    let inv_2h = 0.5 * (n - 1) as f64;
    let mut out = Vec::with_capacity(n);
    out.push((4.0 * (values[1] - values[0]) - (values[2] - values[0])) * inv_2h);
    for i in 1..n - 1 {
        out.push((values[i + 1] - values[i - 1]) * inv_2h);
    }
    out.push((4.0 * (values[n - 1] - values[n - 2]) - (values[n - 1] - values[n - 3])) * inv_2h);
    out
}

/// Trapezoidal inner product `∫ a b dt`.
pub fn inner(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let n = a.len();
    let interior: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let ends = 0.5 * (a[0] * b[0] + a[n - 1] * b[n - 1]);
    (interior - ends) * step(n)
}

/// Trapezoidal L² norm.
pub fn norm(a: &[f64]) -> f64 {
    inner(a, a).max(0.0).sqrt()
}

/// Trapezoidal L² distance `‖a − b‖`.
pub fn distance(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let n = a.len();
    let mut acc = 0.0;
    for (i, (x, y)) in a.iter().zip(b).enumerate() {
        let d = x - y;
        let w = if i == 0 || i == n - 1 { 0.5 } else { 1.0 };
        acc += w * d * d;
    }
    (acc * step(n)).max(0.0).sqrt()
}

/// Trapezoidal mean `∫₀¹ f dt`.
pub fn mean(values: &[f64]) -> f64 {
    let n = values.len();
    let s: f64 = values.iter().sum::<f64>() - 0.5 * (values[0] + values[n - 1]);
    s * step(n)
}

/// Cumulative trapezoidal integral starting at `start`.
pub fn cumulative(values: &[f64], start: f64) -> Vec<f64> {
    let h = step(values.len());
    let mut out = Vec::with_capacity(values.len());
    let mut acc = start;
    out.push(acc);
    for w in values.windows(2) {
        acc += 0.5 * h * (w[0] + w[1]);
        out.push(acc);
    }
    out
}

/// Piecewise-linear interpolation of grid samples at `x ∈ [0, 1]`.
///
/// Positions within `1e-9` of a node snap to it, so evaluating at a node
/// returns the stored sample exactly.
pub fn interpolate(values: &[f64], x: f64) -> f64 {
    let n = values.len();
    let pos = x.clamp(0.0, 1.0) * (n - 1) as f64;
    let nearest = pos.round();
    if (pos - nearest).abs() < 1e-9 {
        return values[nearest as usize];
    }
    let k = (pos.floor() as usize).min(n - 2);
    let frac = pos - k as f64;
    values[k] + frac * (values[k + 1] - values[k])
}

/// Interpolate `(xs, ys)` (strictly increasing `xs`) at `x`, clamping outside.
pub fn interpolate_xy(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    let n = xs.len();
    if x <= xs[0] {
        return ys[0];
    }
    if x >= xs[n - 1] {
        return ys[n - 1];
    }
    let k = xs.partition_point(|&v| v <= x) - 1;
    let span = xs[k + 1] - xs[k];
    if span <= 0.0 {
        return ys[k];
    }
    ys[k] + (x - xs[k]) / span * (ys[k + 1] - ys[k])
}

/// Resample grid values onto a uniform grid of a different size.
pub fn resample(values: &[f64], n: usize) -> Vec<f64> {
    if values.len() == n {
        return values.to_vec();
    }
    nodes(n).into_iter().map(|t| interpolate(values, t)).collect()
}
