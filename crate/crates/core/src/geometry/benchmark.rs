//! The analytic benchmark part: an eight-sided non-convex profile whose
//! cross-section shrinks toward the base as `√z`.

use super::ContourLayer;
use crate::error::{Error, Result};
use crate::fda::grid;

/// Segment boundaries in `t`. Segment `k` covers `[BREAKPOINTS[k], BREAKPOINTS[k + 1]]`.
pub const BREAKPOINTS: [f64; 9] = [0.0, 0.25, 0.5, 0.75, 0.775, 0.8, 0.95, 0.975, 1.0];

const BUMP_HEIGHT: f64 = 0.1125;
const BUMP_CURVATURE: f64 = 20.0;

fn corners(z: f64) -> ([f64; 8], [f64; 8]) {
    let r = 0.25 * z.sqrt();
    (
        [r, 1.0, 1.0, r, r, 0.25, 0.25, r],
        [0.0, 0.0, 1.0, 1.0, 0.8, 0.8, 0.2, 0.2],
    )
}

fn check_z(z: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&z) {
        return Err(Error::Domain(format!("layer height z = {z} is outside [0, 1]")));
    }
    Ok(())
}

/// `(x_z(t), y_z(t))` for `t ∈ [0, 1]`.
pub fn benchmark_point(z: f64, t: f64) -> Result<(f64, f64)> {
    check_z(z)?;
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::Domain(format!("parameter t = {t} is outside [0, 1]")));
    }
    let (xt, yt) = corners(z);
    let b = &BREAKPOINTS;
    let seg = (0..8).find(|&k| t <= b[k + 1]).unwrap_or(7);
    let (lo, hi) = (b[seg], b[seg + 1]);
    let s = (t - lo) / (hi - lo);
    let lerp = |a: f64, c: f64| a + (c - a) * s;
    let point = match seg {
        0 => (lerp(xt[0], xt[1]), yt[0]),
        1 => (xt[1], lerp(yt[1], yt[2])),
        2 => (lerp(xt[2], xt[3]), yt[2]),
        3 => (xt[3], lerp(yt[3], yt[4])),
        4 => (lerp(xt[4], xt[5]), yt[4]),
        5 => {
            let mid = 0.5 * (lo + hi);
            (
                xt[5] + BUMP_HEIGHT - BUMP_CURVATURE * (t - mid) * (t - mid),
                lerp(yt[5], yt[6]),
            )
        }
        6 => (lerp(xt[6], xt[7]), yt[6]),
        _ => (xt[7], lerp(yt[7], yt[0])),
    };
    Ok(point)
}

/// The benchmark contour at height `z` sampled on an `n`-point grid.
pub fn benchmark_contour(z: f64, n: usize) -> Result<ContourLayer> {
    check_z(z)?;
    let t = grid::nodes(n);
    let mut x = Vec::with_capacity(n);
    let mut y = Vec::with_capacity(n);
    for &ti in &t {
        let (a, b) = benchmark_point(z, ti)?;
        x.push(a);
        y.push(b);
    }
    ContourLayer::from_xy(z, x, y, true)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corner_values() {
        assert_eq!(benchmark_point(1.0, 0.0).unwrap(), (0.25, 0.0));
        assert_eq!(benchmark_point(1.0, 0.25).unwrap(), (1.0, 0.0));
        let (x, y) = benchmark_point(1.0, 0.875).unwrap();
        assert!((x - 0.3625).abs() < 1e-15);
        assert!((y - 0.5).abs() < 1e-15);
    }

    #[test]
    fn bump_meets_neighbours() {
        for z in [0.0, 0.3, 1.0] {
            for &b in &BREAKPOINTS[1..8] {
                let left = benchmark_point(z, b - 1e-12).unwrap();
                let right = benchmark_point(z, b + 1e-12).unwrap();
                let at = benchmark_point(z, b).unwrap();
                for p in [left, right] {
                    assert!((p.0 - at.0).abs() < 1e-9 && (p.1 - at.1).abs() < 1e-9, "z={z} t={b}");
                }
            }
            assert!((benchmark_point(z, 0.8).unwrap().0 - 0.25).abs() < 1e-15);
            assert!((benchmark_point(z, 0.95).unwrap().0 - 0.25).abs() < 1e-15);
        }
    }

    #[test]
    fn base_layer_collapses_to_axis() {
        let c = benchmark_contour(0.0, 101).unwrap();
        assert_eq!(c.x.values()[0], 0.0);
        assert_eq!(benchmark_point(0.0, 0.76).unwrap().0, 0.0);
    }

    #[test]
    fn out_of_range_height() {
        assert!(matches!(benchmark_contour(1.5, 10), Err(Error::Domain(_))));
    }
}
