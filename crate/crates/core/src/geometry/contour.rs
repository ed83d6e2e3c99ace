//! Loop clean-up, external-contour selection and arc-length
//! parameterisation.

use super::{ContourLayer, Point, Polyline};
use crate::error::{Error, Result};
use crate::fda::grid;

/// Points closer than this (mm) are the same point.
pub const DUPLICATE_TOL: f64 = 1e-9;

/// Shoelace area; positive for counterclockwise loops.
pub fn signed_area(poly: &[Point]) -> f64 {
    let n = poly.len();
    let mut acc = 0.0;
    for i in 0..n {
        let [x0, y0] = poly[i];
        let [x1, y1] = poly[(i + 1) % n];
        acc += x0 * y1 - x1 * y0;
    }
    0.5 * acc
}

fn dist(a: Point, b: Point) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

fn cross(o: Point, a: Point, b: Point) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

fn segments_cross(p1: Point, p2: Point, p3: Point, p4: Point) -> bool {
    let d1 = cross(p3, p4, p1);
    let d2 = cross(p3, p4, p2);
    let d3 = cross(p1, p2, p3);
    let d4 = cross(p1, p2, p4);
    ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
}

/// True when two non-adjacent edges of the closed loop properly cross.
pub fn self_intersects(poly: &[Point]) -> bool {
    let n = poly.len();
    if n < 4 {
        return false;
    }
    for i in 0..n {
        let (a, b) = (poly[i], poly[(i + 1) % n]);
        for j in i + 2..n {
            if i == 0 && j == n - 1 {
                continue;
            }
            if segments_cross(a, b, poly[j], poly[(j + 1) % n]) {
                return true;
            }
        }
    }
    false
}

/// Largest distance between two points.
pub fn diameter(points: &[Point]) -> f64 {
    let mut best = 0.0f64;
    for (i, &a) in points.iter().enumerate() {
        for &b in &points[i + 1..] {
            best = best.max(dist(a, b));
        }
    }
    best
}

/// Removes tied vertices and restores a single traversal of the loop.
///
/// Consecutive points within [`DUPLICATE_TOL`] collapse to one, as do exact
/// repeats anywhere in the loop. If the cleaned loop crosses itself, its
/// vertices are re-sorted by angle about the centroid.
pub fn preprocess_polyline(points: &[Point]) -> Result<Polyline> {
    let mut out: Polyline = Vec::with_capacity(points.len());
    let mut seen = std::collections::HashSet::new();
    for &p in points {
        if out.last().is_some_and(|&q| dist(p, q) < DUPLICATE_TOL) {
            continue;
        }
        if !seen.insert([p[0].to_bits(), p[1].to_bits()]) {
            continue;
        }
        out.push(p);
    }
    while out.len() > 1 && dist(out[0], out[out.len() - 1]) < DUPLICATE_TOL {
        out.pop();
    }
    if out.len() < 3 {
        return Err(Error::DegenerateContour(format!(
            "{} distinct points remain after removing duplicates",
            out.len()
        )));
    }
    if self_intersects(&out) {
        let k = out.len() as f64;
        let cx = out.iter().map(|p| p[0]).sum::<f64>() / k;
        let cy = out.iter().map(|p| p[1]).sum::<f64>() / k;
        out.sort_by(|a, b| {
            let ta = (a[1] - cy).atan2(a[0] - cx);
            let tb = (b[1] - cy).atan2(b[0] - cx);
            ta.total_cmp(&tb)
        });
    }
    Ok(out)
}

/// Orients the loop counterclockwise and rotates it to start at the vertex
/// with the lexicographically smallest `(y, x)`.
pub fn canonical_loop(poly: &[Point]) -> Polyline {
    let mut p = poly.to_vec();
    if signed_area(&p) < 0.0 {
        p.reverse();
    }
    let start = (0..p.len())
        .min_by(|&i, &j| {
            p[i][1]
                .total_cmp(&p[j][1])
                .then(p[i][0].total_cmp(&p[j][0]))
        })
        .unwrap_or(0);
    p.rotate_left(start);
    p
}

/// Samples the closed loop at `n` points equally spaced in arc length,
/// starting and ending at `poly[0]`.
pub fn arc_length_resample(poly: &[Point], n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let m = poly.len();
    if m < 2 {
        return Err(Error::DegenerateContour("loop has fewer than 2 points".into()));
    }
    if n < 2 {
        return Err(Error::InvalidInput(format!("grid size {n} is too small")));
    }
    let mut cum = Vec::with_capacity(m + 1);
    cum.push(0.0);
    for i in 0..m {
        let next = cum[i] + dist(poly[i], poly[(i + 1) % m]);
        cum.push(next);
    }
    let total = cum[m];
    if total <= 0.0 {
        return Err(Error::DegenerateContour("loop has zero length".into()));
    }
    let mut xs = Vec::with_capacity(n);
    let mut ys = Vec::with_capacity(n);
    let mut seg = 0;
    for t in grid::nodes(n) {
        let s = t * total;
        while seg + 1 < m && cum[seg + 1] <= s {
            seg += 1;
        }
        let a = poly[seg];
        let b = poly[(seg + 1) % m];
        let len = cum[seg + 1] - cum[seg];
        let f = if len > 0.0 { ((s - cum[seg]) / len).clamp(0.0, 1.0) } else { 0.0 };
        xs.push(a[0] + f * (b[0] - a[0]));
        ys.push(a[1] + f * (b[1] - a[1]));
    }
    xs[n - 1] = xs[0];
    ys[n - 1] = ys[0];
    Ok((xs, ys))
}

/// The loop with the largest enclosed area, cleaned, put in canonical
/// position and resampled by arc length onto an `n`-point grid.
pub fn extract_external_contour(loops: &[Polyline], z: f64, n: usize) -> Result<ContourLayer> {
    let outer = loops
        .iter()
        .max_by(|a, b| signed_area(a).abs().total_cmp(&signed_area(b).abs()))
        .ok_or_else(|| Error::DegenerateContour("no loops to choose from".into()))?;
    let clean = canonical_loop(&preprocess_polyline(outer)?);
    let (x, y) = arc_length_resample(&clean, n)?;
    ContourLayer::from_xy(z, x, y, true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square(s: f64, c: Point) -> Polyline {
        vec![[c[0], c[1]], [c[0] + s, c[1]], [c[0] + s, c[1] + s], [c[0], c[1] + s]]
    }

    #[test]
    fn square_starts_at_lower_left() {
        let mut sq = square(1.0, [0.0, 0.0]);
        sq.reverse();
        sq.rotate_left(1);
        let c = extract_external_contour(&[sq], 0.5, 9).unwrap();
        assert_eq!(c.x.values(), &[0.0, 0.5, 1.0, 1.0, 1.0, 0.5, 0.0, 0.0, 0.0]);
        assert_eq!(c.y.values(), &[0.0, 0.0, 0.0, 0.5, 1.0, 1.0, 1.0, 0.5, 0.0]);
    }

    #[test]
    fn outer_loop_wins() {
        let loops = vec![square(1.0, [1.0, 1.0]), square(3.0, [0.0, 0.0])];
        let c = extract_external_contour(&loops, 0.0, 13).unwrap();
        let xmax = c.x.values().iter().cloned().fold(f64::MIN, f64::max);
        assert_eq!(xmax, 3.0);
    }

    #[test]
    fn duplicates_are_removed() {
        let mut sq = square(1.0, [0.0, 0.0]);
        sq.insert(2, sq[1]);
        sq.push(sq[0]);
        assert_eq!(preprocess_polyline(&sq).unwrap(), square(1.0, [0.0, 0.0]));
    }

    #[test]
    fn clean_loop_unchanged() {
        let sq = square(2.0, [1.0, -1.0]);
        assert_eq!(preprocess_polyline(&sq).unwrap(), sq);
    }

    #[test]
    fn too_few_points() {
        let p = vec![[0.0, 0.0], [1.0, 0.0], [1.0, 0.0], [0.0, 0.0]];
        assert!(matches!(preprocess_polyline(&p), Err(Error::DegenerateContour(_))));
    }

    #[test]
    fn circle_chords_are_uniform() {
        let poly: Polyline = (0..20_000)
            .map(|i| {
                let a = i as f64 * std::f64::consts::TAU / 20_000.0;
                [a.cos(), a.sin()]
            })
            .collect();
        let (x, y) = arc_length_resample(&poly, 64).unwrap();
        let chords: Vec<f64> = (0..63).map(|i| (x[i + 1] - x[i]).hypot(y[i + 1] - y[i])).collect();
        let first = chords[0];
        assert!(chords.iter().all(|c| ((c - first) / first).abs() < 1e-6));
    }
}
