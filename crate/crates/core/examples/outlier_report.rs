//! Full translation / amplitude / phase analysis of one coordinate of a
//! simulated sample, printed as the CSV report.
//!
//! cargo run --release --example outlier_report

use ecm::boxplot::{full_report, AnalysisConfig};
use ecm::simulate::{simulate, ScenarioConfig};

fn main() -> ecm::Result<()> {
    let mut cfg = ScenarioConfig::preset("benchmark-sim3")?;
    cfg.n_samples = 60;
    cfg.seed = 11;
    let sample = simulate(&cfg)?;
    let ys: Vec<_> = sample.contours.iter().map(|c| c.y.clone()).collect();

    let report = full_report(&ys, &AnalysisConfig::default())?;
    println!(
        "cutoffs: translation [{:.4}, {:.4}], amplitude {:.4}, phase {:.4}",
        report.translation.lower_threshold.unwrap_or(f64::NAN),
        report.translation.threshold,
        report.amplitude.threshold,
        report.phase.threshold,
    );
    let truth: Vec<usize> = (0..ys.len()).filter(|&i| sample.ground_truth[i]).collect();
    println!("true outliers:    {truth:?}");
    println!("flagged outliers: {:?}", report.outliers());
    for w in &report.warnings {
        println!("warning: {w}");
    }
    print!("{}", report.to_csv());
    Ok(())
}
