//! Triangle meshes, STL input/output and a few solid generators.

use std::collections::HashMap;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::contour::signed_area;
use super::Point;
use crate::error::{Error, Result};

/// Indexed triangle mesh in mm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TriangleMesh {
    pub vertices: Vec<[f64; 3]>,
    pub triangles: Vec<[usize; 3]>,
}

fn area2(a: [f64; 3], b: [f64; 3], c: [f64; 3]) -> f64 {
    let u = [b[0] - a[0], b[1] - a[1], b[2] - a[2]];
    let v = [c[0] - a[0], c[1] - a[1], c[2] - a[2]];
    let n = [
        u[1] * v[2] - u[2] * v[1],
        u[2] * v[0] - u[0] * v[2],
        u[0] * v[1] - u[1] * v[0],
    ];
    (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt()
}

impl TriangleMesh {
    /// Checks indices and drops zero-area triangles.
    pub fn new(vertices: Vec<[f64; 3]>, triangles: Vec<[usize; 3]>) -> Result<Self> {
        if let Some(t) = triangles.iter().find(|t| t.iter().any(|&i| i >= vertices.len())) {
            return Err(Error::InvalidInput(format!(
                "triangle {t:?} indexes past {} vertices",
                vertices.len()
            )));
        }
        if let Some(v) = vertices.iter().find(|v| v.iter().any(|c| !c.is_finite())) {
            return Err(Error::InvalidInput(format!("non-finite vertex {v:?}")));
        }
        let triangles = triangles
            .into_iter()
            .filter(|t| area2(vertices[t[0]], vertices[t[1]], vertices[t[2]]) > 0.0)
            .collect();
        Ok(Self { vertices, triangles })
    }

    /// Welds bitwise-identical corners of free triangles into shared vertices.
    pub fn from_triangle_soup(soup: &[[[f64; 3]; 3]]) -> Result<Self> {
        let mut index: HashMap<[u64; 3], usize> = HashMap::new();
        let mut vertices = Vec::new();
        let mut triangles = Vec::with_capacity(soup.len());
        for tri in soup {
            let mut t = [0; 3];
            for (k, v) in tri.iter().enumerate() {
                let key = [v[0].to_bits(), v[1].to_bits(), v[2].to_bits()];
                t[k] = *index.entry(key).or_insert_with(|| {
                    vertices.push(*v);
                    vertices.len() - 1
                });
            }
            triangles.push(t);
        }
        Self::new(vertices, triangles)
    }

    /// Smallest and largest vertex `z`.
    pub fn z_extent(&self) -> (f64, f64) {
        self.vertices
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v[2]), hi.max(v[2])))
    }

    fn corners(&self, t: &[usize; 3]) -> [[f64; 3]; 3] {
        [self.vertices[t[0]], self.vertices[t[1]], self.vertices[t[2]]]
    }

    /// Straight prism over a simple polygon between heights `z0 < z1`.
    pub fn extrude(polygon: &[Point], z0: f64, z1: f64) -> Result<Self> {
        let mut poly = polygon.to_vec();
        if signed_area(&poly) < 0.0 {
            poly.reverse();
        }
        let m = poly.len();
        if m < 3 || z1 <= z0 {
            return Err(Error::InvalidInput("extrusion needs 3 points and z0 < z1".into()));
        }
        let mut vertices: Vec<[f64; 3]> = poly.iter().map(|p| [p[0], p[1], z0]).collect();
        vertices.extend(poly.iter().map(|p| [p[0], p[1], z1]));
        let mut triangles = Vec::with_capacity(4 * m);
        for i in 0..m {
            let j = (i + 1) % m;
            triangles.push([i, j, m + j]);
            triangles.push([i, m + j, m + i]);
        }
        for [a, b, c] in ear_clip(&poly)? {
            triangles.push([a, c, b]);
            triangles.push([m + a, m + b, m + c]);
        }
        Self::new(vertices, triangles)
    }

    /// Regular `segments`-gon prism of circumradius `r` between `z0` and `z1`.
    pub fn cylinder(r: f64, segments: usize, z0: f64, z1: f64) -> Result<Self> {
        Self::extrude(&regular_polygon(r, segments), z0, z1)
    }

    /// Prism over the ring between two concentric regular polygons.
    pub fn tube(r_in: f64, r_out: f64, segments: usize, z0: f64, z1: f64) -> Result<Self> {
        if !(0.0 < r_in && r_in < r_out) || segments < 3 || z1 <= z0 {
            return Err(Error::InvalidInput("tube needs 0 < r_in < r_out, 3 segments and z0 < z1".into()));
        }
        let outer = regular_polygon(r_out, segments);
        let inner = regular_polygon(r_in, segments);
        let m = segments;
        let mut vertices = Vec::with_capacity(4 * m);
        for (ring, z) in [(&outer, z0), (&outer, z1), (&inner, z0), (&inner, z1)] {
            vertices.extend(ring.iter().map(|p| [p[0], p[1], z]));
        }
        let (ob, ot, ib, it) = (0, m, 2 * m, 3 * m);
        let mut triangles = Vec::with_capacity(8 * m);
        for i in 0..m {
            let j = (i + 1) % m;
            triangles.push([ob + i, ob + j, ot + j]);
            triangles.push([ob + i, ot + j, ot + i]);
            triangles.push([ib + i, it + j, ib + j]);
            triangles.push([ib + i, it + i, it + j]);
            triangles.push([ot + i, ot + j, it + j]);
            triangles.push([ot + i, it + j, it + i]);
            triangles.push([ob + i, ib + j, ob + j]);
            triangles.push([ob + i, ib + i, ib + j]);
        }
        Self::new(vertices, triangles)
    }
}

/// Counterclockwise regular polygon with a vertex on the positive x axis.
pub fn regular_polygon(r: f64, segments: usize) -> Vec<Point> {
    (0..segments)
        .map(|i| {
            let a = std::f64::consts::TAU * i as f64 / segments as f64;
            [r * a.cos(), r * a.sin()]
        })
        .collect()
}

fn point_in_triangle(p: Point, a: Point, b: Point, c: Point) -> bool {
    let s = |o: Point, u: Point, v: Point| (u[0] - o[0]) * (v[1] - o[1]) - (u[1] - o[1]) * (v[0] - o[0]);
    s(a, b, p) >= 0.0 && s(b, c, p) >= 0.0 && s(c, a, p) >= 0.0
}

/// Ear-clipping triangulation of a simple counterclockwise polygon.
fn ear_clip(poly: &[Point]) -> Result<Vec<[usize; 3]>> {
    let mut idx: Vec<usize> = (0..poly.len()).collect();
    let mut out = Vec::with_capacity(poly.len() - 2);
    while idx.len() > 3 {
        let k = idx.len();
        let ear = (0..k).find(|&i| {
            let (a, b, c) = (idx[(i + k - 1) % k], idx[i], idx[(i + 1) % k]);
            let (pa, pb, pc) = (poly[a], poly[b], poly[c]);
            let convex = (pb[0] - pa[0]) * (pc[1] - pa[1]) - (pb[1] - pa[1]) * (pc[0] - pa[0]) > 0.0;
            convex
                && idx
                    .iter()
                    .filter(|&&v| v != a && v != b && v != c)
                    .all(|&v| !point_in_triangle(poly[v], pa, pb, pc))
        });
        let Some(i) = ear.or_else(|| {
            // Collinear remainder: clip any vertex.
            (0..k).find(|&i| {
                let (a, b, c) = (idx[(i + k - 1) % k], idx[i], idx[(i + 1) % k]);
                let (pa, pb, pc) = (poly[a], poly[b], poly[c]);
                (pb[0] - pa[0]) * (pc[1] - pa[1]) - (pb[1] - pa[1]) * (pc[0] - pa[0]) == 0.0
            })
        }) else {
            return Err(Error::DegenerateContour("polygon cannot be triangulated".into()));
        };
        out.push([idx[(i + k - 1) % k], idx[i], idx[(i + 1) % k]]);
        idx.remove(i);
    }
    out.push([idx[0], idx[1], idx[2]]);
    Ok(out)
}

fn stl_err(msg: impl Into<String>) -> Error {
    Error::Stl(msg.into())
}

/// Reads a binary or text STL file.
pub fn read_stl(path: &Path) -> Result<TriangleMesh> {
    let bytes = std::fs::read(path)?;
    parse_stl(&bytes)
}

/// Parses STL bytes. A file is binary when its length matches the triangle
/// count in its header; otherwise it is read as text.
pub fn parse_stl(bytes: &[u8]) -> Result<TriangleMesh> {
    if bytes.len() >= 84 {
        let count = u32::from_le_bytes(bytes[80..84].try_into().expect("4 bytes")) as usize;
        if bytes.len() == 84 + 50 * count {
            return parse_binary(&bytes[84..], count);
        }
    }
    let text = std::str::from_utf8(bytes).map_err(|_| stl_err("neither binary nor UTF-8 text"))?;
    parse_text(text)
}

fn parse_binary(body: &[u8], count: usize) -> Result<TriangleMesh> {
    let mut soup = Vec::with_capacity(count);
    for rec in body.chunks_exact(50) {
        let f = |k: usize| {
            f32::from_le_bytes(rec[4 * k..4 * k + 4].try_into().expect("4 bytes")) as f64
        };
        let mut tri = [[0.0; 3]; 3];
        for (v, corner) in tri.iter_mut().enumerate() {
            for (c, coord) in corner.iter_mut().enumerate() {
                *coord = f(3 + 3 * v + c);
            }
        }
        soup.push(tri);
    }
    TriangleMesh::from_triangle_soup(&soup)
}

fn parse_text(text: &str) -> Result<TriangleMesh> {
    let mut tokens = text.split_whitespace();
    if tokens.next().map(str::to_ascii_lowercase).as_deref() != Some("solid") {
        return Err(stl_err("text STL must start with `solid`"));
    }
    let mut soup = Vec::new();
    let mut corner = Vec::with_capacity(3);
    while let Some(tok) = tokens.next() {
        match tok.to_ascii_lowercase().as_str() {
            "vertex" => {
                let mut v = [0.0; 3];
                for c in &mut v {
                    let s = tokens.next().ok_or_else(|| stl_err("truncated vertex"))?;
                    *c = s.parse().map_err(|_| stl_err(format!("bad coordinate `{s}`")))?;
                }
                corner.push(v);
            }
            "endloop" => {
                let tri: [[f64; 3]; 3] = corner
                    .as_slice()
                    .try_into()
                    .map_err(|_| stl_err(format!("facet with {} vertices", corner.len())))?;
                soup.push(tri);
                corner.clear();
            }
            _ => {}
        }
    }
    if !corner.is_empty() {
        return Err(stl_err("unterminated facet"));
    }
    TriangleMesh::from_triangle_soup(&soup)
}

fn normal(t: &[[f64; 3]; 3]) -> [f64; 3] {
    let u = [t[1][0] - t[0][0], t[1][1] - t[0][1], t[1][2] - t[0][2]];
    let v = [t[2][0] - t[0][0], t[2][1] - t[0][1], t[2][2] - t[0][2]];
    let n = [
        u[1] * v[2] - u[2] * v[1],
        u[2] * v[0] - u[0] * v[2],
        u[0] * v[1] - u[1] * v[0],
    ];
    let len = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
    if len > 0.0 {
        [n[0] / len, n[1] / len, n[2] / len]
    } else {
        [0.0; 3]
    }
}

/// Binary STL bytes. Coordinates are stored as `f32`.
pub fn write_stl_binary(mesh: &TriangleMesh) -> Vec<u8> {
    let mut out = Vec::with_capacity(84 + 50 * mesh.triangles.len());
    let mut header = [0u8; 80];
    header[..10].copy_from_slice(b"binary stl");
    out.extend_from_slice(&header);
    out.extend_from_slice(&(mesh.triangles.len() as u32).to_le_bytes());
    for t in &mesh.triangles {
        let c = mesh.corners(t);
        for v in std::iter::once(normal(&c)).chain(c) {
            for x in v {
                out.extend_from_slice(&(x as f32).to_le_bytes());
            }
        }
        out.extend_from_slice(&[0, 0]);
    }
    out
}

/// Text STL.
pub fn write_stl_ascii(mesh: &TriangleMesh, name: &str) -> String {
    let mut out = Vec::new();
    writeln!(out, "solid {name}").unwrap();
    for t in &mesh.triangles {
        let c = mesh.corners(t);
        let n = normal(&c);
        writeln!(out, "  facet normal {} {} {}", n[0], n[1], n[2]).unwrap();
        writeln!(out, "    outer loop").unwrap();
        for v in c {
            writeln!(out, "      vertex {} {} {}", v[0], v[1], v[2]).unwrap();
        }
        writeln!(out, "    endloop\n  endfacet").unwrap();
    }
    writeln!(out, "endsolid {name}").unwrap();
    String::from_utf8(out).expect("ascii")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn edge_counts(mesh: &TriangleMesh) -> HashMap<(usize, usize), usize> {
        let mut m = HashMap::new();
        for t in &mesh.triangles {
            for k in 0..3 {
                let (a, b) = (t[k], t[(k + 1) % 3]);
                *m.entry((a.min(b), a.max(b))).or_insert(0) += 1;
            }
        }
        m
    }

    #[test]
    fn generated_solids_are_closed() {
        let l = vec![[0.0, 0.0], [2.0, 0.0], [2.0, 2.0], [1.0, 0.5], [0.0, 2.0]];
        for mesh in [
            TriangleMesh::extrude(&l, 0.0, 1.0).unwrap(),
            TriangleMesh::cylinder(1.0, 64, 0.0, 2.0).unwrap(),
            TriangleMesh::tube(1.0, 2.0, 32, 0.0, 1.0).unwrap(),
        ] {
            assert!(edge_counts(&mesh).values().all(|&c| c == 2));
        }
    }

    fn soup(mesh: &TriangleMesh) -> Vec<[[f64; 3]; 3]> {
        mesh.triangles.iter().map(|t| mesh.corners(t)).collect()
    }

    #[test]
    fn text_roundtrip() {
        let mesh = TriangleMesh::cylinder(3.0, 12, 0.0, 1.0).unwrap();
        let text = write_stl_ascii(&mesh, "c");
        let back = parse_stl(text.as_bytes()).unwrap();
        assert_eq!(soup(&back), soup(&mesh));
    }

    #[test]
    fn binary_roundtrip_in_single_precision() {
        let sq = vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];
        let mesh = TriangleMesh::extrude(&sq, 0.0, 1.0).unwrap();
        let back = parse_stl(&write_stl_binary(&mesh)).unwrap();
        assert_eq!(soup(&back), soup(&mesh));
    }

    #[test]
    fn degenerate_triangles_dropped() {
        let v = vec![[0.0; 3], [1.0, 0.0, 0.0], [2.0, 0.0, 0.0], [0.0, 1.0, 0.0]];
        let m = TriangleMesh::new(v, vec![[0, 1, 2], [0, 1, 3]]).unwrap();
        assert_eq!(m.triangles, vec![[0, 1, 3]]);
    }

    #[test]
    fn garbage_is_rejected() {
        assert!(matches!(parse_stl(b"hello"), Err(Error::Stl(_))));
    }
}
