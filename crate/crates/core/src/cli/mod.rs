//! Command implementations behind the `ecm` binary, their file formats and
//! exit codes.
//!
//! Every command is a plain function taking its argument struct, so the
//! pipeline can be driven from code as well as from the command line.

mod commands;
pub mod files;
pub mod svg;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use commands::{
    analyze, fit, generate, render, simulate, slice, Analysis, FitSummary, MergedVerdict,
    GROUND_TRUTH, MERGED_REPORT,
};
pub use files::{sha256_hex, write_atomic, RunManifest, MANIFEST};

use crate::error::Error;

#[derive(Debug, Parser)]
#[command(name = "ecm", version, about = "Elastic outlier detection for layer contours")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write the benchmark contour or a Fourier model as a contour file.
    Generate(GenerateArgs),
    /// Slice an STL mesh and write its external contour.
    Slice(SliceArgs),
    /// Fit a Fourier contour model.
    Fit(FitArgs),
    /// Draw a seeded sample of deformed contours.
    Simulate(SimulateArgs),
    /// Build the boxplots of a contour sample and report outliers.
    Analyze(AnalyzeArgs),
    /// Redraw the SVG panels of a stored analysis.
    Render(RenderArgs),
}

#[derive(Debug, Clone, Args)]
pub struct GenerateArgs {
    /// `benchmark`, or a preset name (gear, wheel, logo, tube) for its
    /// synthetic outline.
    #[arg(long, default_value = "benchmark")]
    pub shape: String,
    /// Fourier model file; overrides `--shape`.
    #[arg(long)]
    pub model: Option<PathBuf>,
    #[arg(long, default_value_t = 1.0)]
    pub z: f64,
    #[arg(long, default_value_t = 1024)]
    pub grid: usize,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct SliceArgs {
    pub mesh: PathBuf,
    #[arg(long)]
    pub z: f64,
    #[arg(long, default_value_t = 1024)]
    pub grid: usize,
    #[arg(long)]
    pub out: PathBuf,
    /// Also write every loop to `<out stem>_loop<k>.csv`, largest first.
    #[arg(long)]
    pub all_loops: bool,
}

#[derive(Debug, Clone, Args)]
pub struct FitArgs {
    pub contour: PathBuf,
    /// Number of harmonics.
    #[arg(long, short = 'k', conflicts_with = "preset")]
    pub k: Option<usize>,
    /// Harmonic count of a named shape: gear, wheel, logo or tube.
    #[arg(long)]
    pub preset: Option<String>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    /// Named scenario, e.g. `benchmark-sim1`.
    #[arg(long, conflicts_with = "config")]
    pub preset: Option<String>,
    /// Scenario file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Overrides the scenario seed.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct AnalyzeArgs {
    /// Contour files, or directories whose `.csv` files (other than the
    /// ground truth) are read in name order.
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
    /// Analysis settings file; the flags below override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub whisker_factor: Option<f64>,
    #[arg(long)]
    pub conservative: bool,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct RenderArgs {
    /// Directory holding `report_x.json` and `report_y.json`.
    pub report_dir: PathBuf,
    /// Where to write the panels; defaults to the report directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Process exit status for an error.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::MissingInput(_) => 2,
        Error::Io(e) if e.kind() == std::io::ErrorKind::NotFound => 2,
        Error::Stl(_) | Error::NonWatertight { .. } | Error::DegenerateContour(_) => 3,
        Error::Fit(_) => 4,
        Error::GridMismatch { .. } | Error::SampleGrid { .. } => 5,
        _ => 1,
    }
}

/// Caps the worker pool at `ECM_THREADS` when set.
pub fn configure_threads() -> Result<(), Error> {
    if let Ok(v) = std::env::var("ECM_THREADS") {
        let n: usize = v
            .trim()
            .parse()
            .map_err(|_| Error::config("ECM_THREADS", format!("`{v}` is not a thread count")))?;
        // Fails only if a pool already exists, which is harmless.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(())
}

/// Runs one parsed command, printing its summary to stdout.
pub fn run(cli: Cli) -> Result<(), Error> {
    configure_threads()?;
    match cli.command {
        Command::Generate(a) => {
            let c = generate(&a)?;
            println!("wrote {} ({} points)", a.out.display(), c.grid_size());
        }
        Command::Slice(a) => {
            for p in slice(&a)? {
                println!("wrote {}", p.display());
            }
        }
        Command::Fit(a) => {
            let s = fit(&a)?;
            println!("K = {}", s.model.k);
            println!("rms residual = {}", s.rms);
            println!("wrote {}", a.out.display());
        }
        Command::Simulate(a) => {
            let s = simulate(&a)?;
            for w in &s.warnings {
                eprintln!("warning: {w}");
            }
            println!(
                "wrote {} contours to {} ({} injected outliers)",
                s.contours.len(),
                a.out.display(),
                s.outlier_count()
            );
        }
        Command::Analyze(a) => {
            let r = analyze(&a)?;
            for w in r.x.warnings.iter().chain(&r.y.warnings) {
                eprintln!("warning: {w}");
            }
            let flagged: Vec<String> = r
                .merged
                .iter()
                .filter(|v| v.outlier)
                .map(|v| v.index.to_string())
                .collect();
            println!("{} samples, outliers: [{}]", r.merged.len(), flagged.join(", "));
        }
        Command::Render(a) => {
            for p in render(&a)? {
                println!("wrote {}", p.display());
            }
        }
    }
    Ok(())
}

/// Parses `args`, runs the command and returns the exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
