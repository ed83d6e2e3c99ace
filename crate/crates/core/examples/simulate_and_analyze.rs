//! The command-line pipeline driven from code: simulate a scenario into a
//! directory, analyze it and render the panels.
//!
//! cargo run --release --example simulate_and_analyze [preset] [seed]

use ecm::cli::{analyze, render, simulate, AnalyzeArgs, RenderArgs, SimulateArgs};

fn main() -> ecm::Result<()> {
    let mut args = std::env::args().skip(1);
    let preset = args.next().unwrap_or_else(|| "benchmark-sim2".into());
    let seed = args.next().map(|s| s.parse().expect("seed must be an integer")).unwrap_or(3);
    let root = std::env::temp_dir().join(format!("ecm-{preset}-{seed}"));
    let (data, out) = (root.join("data"), root.join("analysis"));

    let sample = simulate(&SimulateArgs { preset: Some(preset.clone()), config: None, seed: Some(seed), out: data.clone() })?;
    println!("{preset}: {} contours, {} drawn from the outlying law", sample.contours.len(), sample.outlier_count());

    let analysis = analyze(&AnalyzeArgs {
        inputs: vec![data],
        config: None,
        lambda: None,
        whisker_factor: None,
        conservative: false,
        out: out.clone(),
    })?;
    let truth: Vec<usize> = (0..sample.ground_truth.len()).filter(|&i| sample.ground_truth[i]).collect();
    let flagged: Vec<usize> = analysis.merged.iter().filter(|v| v.outlier).map(|v| v.index).collect();
    let hits = truth.iter().filter(|i| flagged.contains(i)).count();
    println!("true outliers {truth:?}");
    println!("flagged {} samples, {hits} of {} true outliers among them", flagged.len(), truth.len());

    let panels = render(&RenderArgs { report_dir: out.clone(), out: None })?;
    println!("wrote {} panels and the reports under {}", panels.len(), out.display());
    Ok(())
}
