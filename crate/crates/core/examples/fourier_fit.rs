//! Fit Fourier models of growing order to the benchmark contour and to the
//! gear stand-in, and report the residuals.
//!
//! cargo run --example fourier_fit

use ecm::geometry::{benchmark_contour, diameter, eval_fourier, fit_fourier, rms_residual, FourierPreset};

fn main() -> ecm::Result<()> {
    let contour = benchmark_contour(1.0, 1024)?;
    let diam = diameter(&contour.points());
    println!("benchmark contour, diameter {diam:.4}");
    for k in [5, 11, 21, 51, 101] {
        let model = fit_fourier(&contour, k)?;
        let rms = rms_residual(&model, &contour);
        println!("  K = {k:>3}: rms {rms:.2e} ({:.3}% of diameter)", 100.0 * rms / diam);
    }

    let gear = FourierPreset::Gear;
    let outline = gear.stand_in_contour(1024)?;
    let model = fit_fourier(&outline, gear.harmonics())?;
    let refit = eval_fourier(&model, 1024)?;
    println!(
        "{} stand-in: K = {}, rms {:.2e} ({:.3}% of diameter), {} coefficients per coordinate",
        gear.name(),
        gear.harmonics(),
        rms_residual(&model, &outline),
        100.0 * rms_residual(&model, &outline) / diameter(&outline.points()),
        gear.basis_count(),
    );
    println!("first refitted point: ({:.4}, {:.4})", refit.x.values()[0], refit.y.values()[0]);
    Ok(())
}
