//! Planar slicing of triangle meshes.

use std::collections::HashMap;

use super::contour::signed_area;
use super::mesh::TriangleMesh;
use super::{Point, Polyline};
use crate::error::{Error, Result};

/// Relative size of the shift applied to `z` when the plane hits a vertex.
pub const NUDGE: f64 = 1e-9;

/// Relative cross-product tolerance under which a loop vertex counts as
/// lying on the segment joining its neighbours.
const COLLINEAR_TOL: f64 = 1e-12;

type Edge = (usize, usize);

fn edge(a: usize, b: usize) -> Edge {
    (a.min(b), a.max(b))
}

/// Cuts `mesh` with the plane at height `z` and returns every closed loop,
/// oriented counterclockwise.
///
/// Segments are chained through the mesh edges they cross, so loops close
/// exactly on watertight meshes. A plane through a vertex is moved up by
/// [`NUDGE`] times the mesh height first. Vertices lying on a straight run
/// of the loop are dropped.
pub fn slice_mesh(mesh: &TriangleMesh, z: f64) -> Result<Vec<Polyline>> {
    let (lo, hi) = mesh.z_extent();
    if !(lo < z && z < hi) {
        return Err(Error::Domain(format!(
            "slice height {z} is not strictly inside the mesh extent [{lo}, {hi}]"
        )));
    }
    let mut plane = z;
    let mut tries = 0;
    while mesh.vertices.iter().any(|v| v[2] == plane) {
        plane += NUDGE * (hi - lo);
        tries += 1;
        if tries > 16 || plane >= hi {
            return Err(Error::Domain(format!("cannot move the plane at {z} off the mesh vertices")));
        }
    }

    let mut crossing: HashMap<Edge, Point> = HashMap::new();
    let mut segments: Vec<[Edge; 2]> = Vec::new();
    for t in &mesh.triangles {
        let mut hits = Vec::with_capacity(2);
        for k in 0..3 {
            let e = edge(t[k], t[(k + 1) % 3]);
            let (a, b) = (mesh.vertices[e.0], mesh.vertices[e.1]);
            if (a[2] < plane) != (b[2] < plane) {
                crossing.entry(e).or_insert_with(|| {
                    let s = (plane - a[2]) / (b[2] - a[2]);
                    [a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])]
                });
                hits.push(e);
            }
        }
        if hits.len() == 2 {
            segments.push([hits[0], hits[1]]);
        }
    }

    let mut by_edge: HashMap<Edge, Vec<usize>> = HashMap::new();
    for (i, s) in segments.iter().enumerate() {
        for e in s {
            by_edge.entry(*e).or_default().push(i);
        }
    }
    let mut gaps: Vec<Point> = by_edge
        .iter()
        .filter(|(_, segs)| segs.len() != 2)
        .map(|(e, _)| crossing[e])
        .collect();
    if !gaps.is_empty() {
        gaps.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
        return Err(Error::NonWatertight { gaps });
    }

    let mut used = vec![false; segments.len()];
    let mut loops = Vec::new();
    for start in 0..segments.len() {
        if used[start] {
            continue;
        }
        used[start] = true;
        let first = segments[start][0];
        let mut at = segments[start][1];
        let mut chain = vec![crossing[&first]];
        while at != first {
            chain.push(crossing[&at]);
            let next = by_edge[&at]
                .iter()
                .copied()
                .find(|&s| !used[s])
                .expect("every crossed edge of a closed mesh has two segments");
            used[next] = true;
            let [a, b] = segments[next];
            at = if a == at { b } else { a };
        }
        let mut poly = drop_collinear(chain);
        if poly.len() < 3 {
            continue;
        }
        if signed_area(&poly) < 0.0 {
            poly.reverse();
        }
        loops.push(poly);
    }
    loops.sort_by(|a, b| signed_area(b).total_cmp(&signed_area(a)));
    Ok(loops)
}

fn drop_collinear(mut poly: Polyline) -> Polyline {
    let mut changed = true;
    while changed && poly.len() > 3 {
        changed = false;
        let n = poly.len();
        let keep: Vec<bool> = (0..n)
            .map(|i| {
                let (a, b, c) = (poly[(i + n - 1) % n], poly[i], poly[(i + 1) % n]);
                let u = [b[0] - a[0], b[1] - a[1]];
                let v = [c[0] - b[0], c[1] - b[1]];
                let cr = u[0] * v[1] - u[1] * v[0];
                let dot = u[0] * v[0] + u[1] * v[1];
                let scale = u[0].hypot(u[1]) * v[0].hypot(v[1]);
                !(cr.abs() <= COLLINEAR_TOL * scale && dot >= 0.0)
            })
            .collect();
        // Drop at most every other vertex per pass so a run never vanishes
        // all at once.
        let mut out = Vec::with_capacity(n);
        let mut dropped_prev = false;
        for i in 0..n {
            if !keep[i] && !dropped_prev {
                dropped_prev = true;
                changed = true;
            } else {
                out.push(poly[i]);
                dropped_prev = false;
            }
        }
        poly = out;
    }
    poly
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cube_mid_slice_is_unit_square() {
        let sq = vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];
        let cube = TriangleMesh::extrude(&sq, 0.0, 1.0).unwrap();
        let loops = slice_mesh(&cube, 0.5).unwrap();
        assert_eq!(loops.len(), 1);
        assert_eq!(loops[0].len(), 4);
        assert!((signed_area(&loops[0]) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn prism_slice_matches_generator() {
        let mesh = TriangleMesh::cylinder(5.0, 64, 0.0, 10.0).unwrap();
        let loops = slice_mesh(&mesh, 5.0).unwrap();
        assert_eq!(loops.len(), 1);
        assert_eq!(loops[0].len(), 64);
        let gen = super::super::mesh::regular_polygon(5.0, 64);
        assert!((signed_area(&loops[0]) - signed_area(&gen)).abs() < 1e-12);
    }

    #[test]
    fn tube_gives_two_loops() {
        let mesh = TriangleMesh::tube(1.0, 2.0, 40, 0.0, 3.0).unwrap();
        let loops = slice_mesh(&mesh, 1.5).unwrap();
        assert_eq!(loops.len(), 2);
        assert!(signed_area(&loops[0]) > signed_area(&loops[1]));
    }

    #[test]
    fn vertex_plane_is_nudged() {
        let v = vec![
            [0.0, 0.0, 0.0],
            [1.0, 0.0, 1.0],
            [0.0, 1.0, 1.0],
            [-1.0, 0.0, 1.0],
            [0.0, -1.0, 1.0],
            [0.0, 0.0, 2.0],
        ];
        let mut t = Vec::new();
        for k in 0..4 {
            let (a, b) = (1 + k, 1 + (k + 1) % 4);
            t.push([0, b, a]);
            t.push([5, a, b]);
        }
        let octa = TriangleMesh::new(v, t).unwrap();
        let loops = slice_mesh(&octa, 1.0).unwrap();
        assert_eq!(loops.len(), 1);
        assert_eq!(loops[0].len(), 4);
        assert!((signed_area(&loops[0]) - 2.0).abs() < 1e-7);
    }

    #[test]
    fn open_mesh_reports_gaps() {
        let mut mesh = TriangleMesh::cylinder(1.0, 8, 0.0, 2.0).unwrap();
        mesh.triangles.remove(0);
        match slice_mesh(&mesh, 0.7) {
            Err(Error::NonWatertight { gaps }) => assert_eq!(gaps.len(), 2),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn outside_extent() {
        let mesh = TriangleMesh::cylinder(1.0, 8, 0.0, 2.0).unwrap();
        assert!(matches!(slice_mesh(&mesh, 2.0), Err(Error::Domain(_))));
    }
}
