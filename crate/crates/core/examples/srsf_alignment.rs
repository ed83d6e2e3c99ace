//! Align a shifted bump to a reference and compare distances before and
//! after warping.
//!
//! cargo run --example srsf_alignment

use std::f64::consts::PI;

use ecm::fda::{amplitude_distance, apply_warp, phase_distance, to_srsf, SampledFunction, Warping};

fn bump(centre: f64) -> impl Fn(f64) -> f64 {
    move |t| (-((t - centre) / 0.08).powi(2)).exp() + 0.2 * (2.0 * PI * t).sin()
}

fn main() -> ecm::Result<()> {
    let n = 201;
    let f1 = SampledFunction::from_fn(n, bump(0.4))?;
    let f2 = SampledFunction::from_fn(n, bump(0.6))?;
    let (q1, q2) = (to_srsf(&f1)?, to_srsf(&f2)?);

    let alignment = amplitude_distance(&q1, &q2)?;
    println!("unaligned L2 distance of SRSFs: {:.4}", q1.l2_distance(&q2));
    println!("amplitude distance:             {:.4}", alignment.distance);
    println!("phase distance to identity:     {:.4}", phase_distance(&alignment.warp, &Warping::identity(n))?);

    let aligned = apply_warp(&f2, &alignment.warp)?;
    let peak = |f: &SampledFunction| {
        let v = f.values();
        let i = (0..v.len()).max_by(|&a, &b| v[a].total_cmp(&v[b])).unwrap();
        i as f64 / (v.len() - 1) as f64
    };
    println!("peak of f1 {:.3}, f2 {:.3}, f2 aligned {:.3}", peak(&f1), peak(&f2), peak(&aligned));
    Ok(())
}
