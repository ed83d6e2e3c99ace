//! Contour text files: a `# z=<value>` line, a `t,x,y` header and one row
//! per grid node.

use std::fmt::Write;
use std::path::Path;

use super::{ContourLayer, CLOSURE_TOL};
use crate::error::{Error, Result};
use crate::fda::grid;

/// Renders the layer. Floats use the shortest representation that reads
/// back to the same value.
pub fn write_contour_csv(layer: &ContourLayer) -> String {
    let n = layer.grid_size();
    let mut out = String::with_capacity(48 * n);
    writeln!(out, "# z={}", layer.z).unwrap();
    out.push_str("t,x,y\n");
    for (i, t) in grid::nodes(n).iter().enumerate() {
        writeln!(out, "{},{},{}", t, layer.x.values()[i], layer.y.values()[i]).unwrap();
    }
    out
}

/// Parses contour text; `path` only labels errors. A contour whose first
/// and last rows agree within the closure tolerance is marked closed.
pub fn parse_contour_csv(text: &str, path: &Path) -> Result<ContourLayer> {
    let bad = |line: usize, message: String| Error::Format {
        path: path.to_path_buf(),
        message: format!("line {line}: {message}"),
    };
    let mut lines = text.lines().enumerate();
    let (_, first) = lines.next().ok_or_else(|| bad(1, "empty file".into()))?;
    let z: f64 = first
        .trim()
        .strip_prefix("# z=")
        .ok_or_else(|| bad(1, format!("expected `# z=<value>`, found `{first}`")))?
        .trim()
        .parse()
        .map_err(|e| bad(1, format!("bad z value: {e}")))?;
    match lines.next() {
        Some((_, h)) if h.trim() == "t,x,y" => {}
        _ => return Err(bad(2, "expected header `t,x,y`".into())),
    }
    let mut ts = Vec::new();
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (i, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split(',').map(str::trim).collect();
        if cols.len() != 3 {
            return Err(bad(i + 1, format!("expected 3 columns, found {}", cols.len())));
        }
        let mut v = [0.0; 3];
        for (slot, c) in v.iter_mut().zip(&cols) {
            *slot = c.parse().map_err(|e| bad(i + 1, format!("bad number `{c}`: {e}")))?;
        }
        ts.push(v[0]);
        xs.push(v[1]);
        ys.push(v[2]);
    }
    let n = ts.len();
    if n < 3 {
        return Err(bad(3, format!("need at least 3 rows, found {n}")));
    }
    for (i, (t, g)) in ts.iter().zip(grid::nodes(n)).enumerate() {
        if (t - g).abs() > 1e-12 {
            return Err(bad(i + 3, format!("t = {t} is off the uniform grid (expected {g})")));
        }
    }
    let closed = (xs[n - 1] - xs[0]).abs() <= CLOSURE_TOL && (ys[n - 1] - ys[0]).abs() <= CLOSURE_TOL;
    ContourLayer::from_xy(z, xs, ys, closed)
}

/// Reads a contour file.
pub fn read_contour_csv(path: &Path) -> Result<ContourLayer> {
    let text = std::fs::read_to_string(path)?;
    parse_contour_csv(&text, path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::benchmark_contour;

    #[test]
    fn roundtrip_is_bitwise() {
        let c = benchmark_contour(0.37, 257).unwrap();
        let text = write_contour_csv(&c);
        assert!(text.starts_with("# z=0.37\nt,x,y\n0,"));
        let back = parse_contour_csv(&text, Path::new("mem")).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn rejects_bad_header() {
        let err = parse_contour_csv("# z=1\nx,y\n", Path::new("f.csv")).unwrap_err();
        assert!(err.to_string().contains("f.csv"));
    }
}
