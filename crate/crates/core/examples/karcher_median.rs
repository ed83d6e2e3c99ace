//! Karcher medians of a small family of warped sine curves, in amplitude
//! space and on the phase sphere.
//!
//! cargo run --example karcher_median

use std::f64::consts::PI;

use ecm::fda::{
    karcher_median_amplitude, karcher_median_phase, phase_distance, to_srsf, to_srt, from_srt,
    MedianOptions, SampledFunction, Warping,
};

fn main() -> ecm::Result<()> {
    let n = 101;
    let mut warps = Vec::new();
    let mut srsfs = Vec::new();
    for i in 0..12 {
        let a = -0.6 + 1.2 * i as f64 / 11.0;
        // γ(t) = t + a t (1 − t)/2 stays increasing for |a| < 2.
        let gamma = Warping::from_fn(n, |t| t + 0.5 * a * t * (1.0 - t))?;
        let f = SampledFunction::from_fn(n, |t| {
            let s = t + 0.5 * a * t * (1.0 - t);
            (2.0 * PI * s).sin() * (1.0 + 0.05 * i as f64)
        })?;
        srsfs.push(to_srsf(&f)?);
        warps.push(gamma);
    }

    let amp = karcher_median_amplitude(&srsfs, &MedianOptions::default())?;
    println!("amplitude median: objective {:.4}, converged {}", amp.objective(), amp.converged);
    for (k, v) in amp.objective_history.iter().enumerate() {
        println!("  iterate {k}: {v:.5}");
    }

    let points = warps.iter().map(to_srt).collect::<ecm::Result<Vec<_>>>()?;
    let phase = karcher_median_phase(&points)?;
    let centre = from_srt(&phase.median)?;
    println!(
        "phase median: distance to identity {:.4}, to the middle warp {:.4}",
        phase_distance(&centre, &Warping::identity(n))?,
        phase_distance(&centre, &warps[6])?,
    );
    Ok(())
}
