//! Extrude the benchmark outline into a prism, write it as STL, read it back,
//! slice it and compare the recovered contour with the original.
//!
//! cargo run --example slice_benchmark

use ecm::geometry::{
    benchmark_contour, canonical_loop, extract_external_contour, parse_stl, preprocess_polyline,
    slice_mesh, write_contour_csv, write_stl_binary, TriangleMesh,
};

fn main() -> ecm::Result<()> {
    let z = 0.6;
    let outline = preprocess_polyline(&benchmark_contour(z, 2049)?.points())?;
    let mesh = TriangleMesh::extrude(&outline, 0.0, 3.0)?;
    let bytes = write_stl_binary(&mesh);
    println!("binary STL: {} bytes, {} triangles", bytes.len(), mesh.triangles.len());

    let mesh = parse_stl(&bytes)?;
    let loops = slice_mesh(&mesh, 1.5)?;
    println!("slice at z = 1.5 gave {} loop(s)", loops.len());
    let layer = extract_external_contour(&loops, 1.5, 256)?;

    let reference = canonical_loop(&outline);
    let worst = layer
        .points()
        .iter()
        .map(|p| {
            (0..reference.len())
                .map(|i| segment_distance(*p, reference[i], reference[(i + 1) % reference.len()]))
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max);
    println!("largest distance from a resampled point to the outline: {worst:.2e} (STL stores f32)");
    print!("{}", write_contour_csv(&layer).lines().take(6).collect::<Vec<_>>().join("\n"));
    println!("\n...");
    Ok(())
}

fn segment_distance(p: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    let d = [b[0] - a[0], b[1] - a[1]];
    let len2 = d[0] * d[0] + d[1] * d[1];
    let s = if len2 > 0.0 { (((p[0] - a[0]) * d[0] + (p[1] - a[1]) * d[1]) / len2).clamp(0.0, 1.0) } else { 0.0 };
    (p[0] - a[0] - s * d[0]).hypot(p[1] - a[1] - s * d[1])
}
