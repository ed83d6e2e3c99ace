use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::files::{read_input, RunManifest};
use super::svg::render_panel;
use super::{AnalyzeArgs, FitArgs, GenerateArgs, RenderArgs, SimulateArgs, SliceArgs};
use crate::boxplot::{full_report, AnalysisConfig, Component, OutlierReport};
use crate::error::{Error, Result};
use crate::geometry::{
    benchmark_contour, eval_fourier, extract_external_contour, fit_fourier, parse_contour_csv,
    parse_stl, rms_residual, slice_mesh, write_contour_csv, ContourLayer, FourierContourModel,
    FourierPreset,
};
use crate::simulate::{self as sim, ScenarioConfig, SimulatedSample};

/// Ground-truth file written by [`simulate`].
pub const GROUND_TRUTH: &str = "ground_truth.csv";

/// Per-sample verdicts merged over both coordinates, written by [`analyze`].
pub const MERGED_REPORT: &str = "report.csv";

const COORDS: [&str; 2] = ["x", "y"];

fn text(path: &Path) -> Result<String> {
    String::from_utf8(read_input(path)?).map_err(|_| Error::Format {
        path: path.to_path_buf(),
        message: "not UTF-8 text".into(),
    })
}

pub fn generate(args: &GenerateArgs) -> Result<ContourLayer> {
    let contour = if let Some(path) = &args.model {
        let model: FourierContourModel = serde_json::from_str(&text(path)?).map_err(|e| Error::Format {
            path: path.clone(),
            message: e.to_string(),
        })?;
        model.validate()?;
        eval_fourier(&model, args.grid)?
    } else if args.shape == "benchmark" {
        benchmark_contour(args.z, args.grid)?
    } else {
        let preset = FourierPreset::from_name(&args.shape).ok_or_else(|| {
            Error::config("shape", format!("unknown shape `{}`; use benchmark, gear, wheel, logo or tube", args.shape))
        })?;
        let c = preset.stand_in_contour(args.grid)?;
        ContourLayer::new(args.z, c.x, c.y, c.closed)?
    };
    super::write_atomic(&args.out, write_contour_csv(&contour).as_bytes())?;
    Ok(contour)
}

fn loop_path(out: &Path, k: usize) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    out.with_file_name(format!("{stem}_loop{k}.csv"))
}

/// Returns the paths written: the external contour, then any loop files.
pub fn slice(args: &SliceArgs) -> Result<Vec<PathBuf>> {
    let mesh = parse_stl(&read_input(&args.mesh)?)?;
    let loops = slice_mesh(&mesh, args.z)?;
    let outer = extract_external_contour(&loops, args.z, args.grid)?;
    super::write_atomic(&args.out, write_contour_csv(&outer).as_bytes())?;
    let mut written = vec![args.out.clone()];
    if args.all_loops {
        for (k, l) in loops.iter().enumerate() {
            let c = extract_external_contour(std::slice::from_ref(l), args.z, args.grid)?;
            let p = loop_path(&args.out, k);
            super::write_atomic(&p, write_contour_csv(&c).as_bytes())?;
            written.push(p);
        }
    }
    Ok(written)
}

#[derive(Debug, Clone)]
pub struct FitSummary {
    pub model: FourierContourModel,
    pub rms: f64,
}

pub fn fit(args: &FitArgs) -> Result<FitSummary> {
    let contour = parse_contour_csv(&text(&args.contour)?, &args.contour)?;
    let k = match (args.k, &args.preset) {
        (Some(k), _) => k,
        (None, Some(name)) => FourierPreset::from_name(name)
            .ok_or_else(|| Error::config("preset", format!("unknown preset `{name}`")))?
            .harmonics(),
        (None, None) => return Err(Error::config("k", "give --k or --preset")),
    };
    let mut model = fit_fourier(&contour, k)?;
    model.z = contour.z;
    let rms = rms_residual(&model, &contour);
    super::write_atomic(&args.out, serde_json::to_string_pretty(&model)?.as_bytes())?;
    Ok(FitSummary { model, rms })
}

fn sample_name(i: usize, count: usize) -> String {
    let width = (count.saturating_sub(1)).to_string().len().max(3);
    format!("sample_{i:0width$}.csv")
}

pub fn simulate(args: &SimulateArgs) -> Result<SimulatedSample> {
    let mut manifest_inputs = Vec::new();
    let mut config = match (&args.preset, &args.config) {
        (Some(name), _) => ScenarioConfig::preset(name)?,
        (None, Some(path)) => {
            let t = text(path)?;
            manifest_inputs.push((path.clone(), t.clone()));
            ScenarioConfig::from_json(&t)?
        }
        (None, None) => return Err(Error::config("preset", "give --preset or --config")),
    };
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    let sample = sim::simulate(&config)?;
    let mut m = RunManifest::start("simulate", &config, Some(config.seed))?;
    for (p, t) in &manifest_inputs {
        m.input(p, t.as_bytes());
    }
    let count = sample.contours.len();
    let mut truth = String::from("index,file,outlier\n");
    for (i, c) in sample.contours.iter().enumerate() {
        let name = sample_name(i, count);
        m.output(&args.out, &name, write_contour_csv(c).as_bytes())?;
        truth.push_str(&format!("{i},{name},{}\n", sample.ground_truth[i] as u8));
    }
    m.output(&args.out, GROUND_TRUTH, truth.as_bytes())?;
    m.output(&args.out, "scenario.json", serde_json::to_string_pretty(&config)?.as_bytes())?;
    m.notes = sample.warnings.clone();
    m.finish(&args.out)?;
    Ok(sample)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MergedVerdict {
    pub index: usize,
    pub file: String,
    pub x_outlier: bool,
    pub y_outlier: bool,
    pub outlier: bool,
}

#[derive(Debug, Clone)]
pub struct Analysis {
    pub files: Vec<PathBuf>,
    pub x: OutlierReport,
    pub y: OutlierReport,
    pub merged: Vec<MergedVerdict>,
}

fn looks_like_contour(bytes: &[u8]) -> bool {
    bytes.starts_with(b"# z=")
}

/// Contour files named by `inputs`, with their contents.
fn collect_inputs(inputs: &[PathBuf]) -> Result<Vec<(PathBuf, Vec<u8>)>> {
    let mut out = Vec::new();
    for p in inputs {
        if p.is_dir() {
            let mut entries: Vec<PathBuf> = std::fs::read_dir(p)?
                .map(|e| e.map(|e| e.path()))
                .collect::<std::io::Result<_>>()?;
            entries.sort();
            for e in entries {
                if e.extension().is_some_and(|x| x == "csv") && e.file_name().is_some_and(|n| n != GROUND_TRUTH) {
                    let bytes = read_input(&e)?;
                    if looks_like_contour(&bytes) {
                        out.push((e, bytes));
                    }
                }
            }
        } else {
            let bytes = read_input(p)?;
            out.push((p.clone(), bytes));
        }
    }
    if out.is_empty() {
        return Err(Error::MissingInput(inputs[0].clone()));
    }
    Ok(out)
}

fn analysis_config(args: &AnalyzeArgs) -> Result<(AnalysisConfig, Option<(PathBuf, String)>)> {
    let (mut cfg, src) = match &args.config {
        Some(p) => {
            let t = text(p)?;
            let cfg: AnalysisConfig = serde_json::from_str(&t)
                .map_err(|e| Error::config("config", format!("line {}, column {}: {e}", e.line(), e.column())))?;
            (cfg, Some((p.clone(), t)))
        }
        None => (AnalysisConfig::default(), None),
    };
    if let Some(l) = args.lambda {
        cfg.boxplot.lambda = l;
    }
    if let Some(w) = args.whisker_factor {
        cfg.boxplot.whisker_factor = w;
    }
    if args.conservative {
        cfg.boxplot.conservative = true;
    }
    cfg.boxplot.validate()?;
    Ok((cfg, src))
}

/// Panel file name for a coordinate and component.
pub fn panel_name(coord: &str, component: Component) -> String {
    format!("{coord}_{}.svg", component.name())
}

fn merged_csv(merged: &[MergedVerdict]) -> String {
    let mut s = String::from("index,file,x_outlier,y_outlier,outlier\n");
    for v in merged {
        s.push_str(&format!(
            "{},{},{},{},{}\n",
            v.index, v.file, v.x_outlier as u8, v.y_outlier as u8, v.outlier as u8
        ));
    }
    s
}

pub fn analyze(args: &AnalyzeArgs) -> Result<Analysis> {
    let (cfg, cfg_src) = analysis_config(args)?;
    let inputs = collect_inputs(&args.inputs)?;
    let contours = inputs
        .iter()
        .map(|(p, b)| {
            let t = std::str::from_utf8(b).map_err(|_| Error::Format { path: p.clone(), message: "not UTF-8 text".into() })?;
            parse_contour_csv(t, p)
        })
        .collect::<Result<Vec<_>>>()?;
    let expected = contours[0].grid_size();
    let offenders: Vec<(PathBuf, usize)> = inputs
        .iter()
        .zip(&contours)
        .filter(|(_, c)| c.grid_size() != expected)
        .map(|((p, _), c)| (p.clone(), c.grid_size()))
        .collect();
    if !offenders.is_empty() {
        return Err(Error::SampleGrid { reference: inputs[0].0.clone(), expected, offenders });
    }

    let xs: Vec<_> = contours.iter().map(|c| c.x.clone()).collect();
    let ys: Vec<_> = contours.iter().map(|c| c.y.clone()).collect();
    let x = full_report(&xs, &cfg)?;
    let y = full_report(&ys, &cfg)?;

    let mut m = RunManifest::start("analyze", &cfg, None)?;
    if let Some((p, t)) = &cfg_src {
        m.input(p, t.as_bytes());
    }
    for (p, b) in &inputs {
        m.input(p, b);
    }
    let merged: Vec<MergedVerdict> = inputs
        .iter()
        .enumerate()
        .map(|(i, (p, _))| {
            let (xo, yo) = (x.verdicts[i].outlier, y.verdicts[i].outlier);
            MergedVerdict {
                index: i,
                file: p.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default(),
                x_outlier: xo,
                y_outlier: yo,
                outlier: xo || yo,
            }
        })
        .collect();
    for (coord, r) in COORDS.iter().zip([&x, &y]) {
        m.output(&args.out, &format!("report_{coord}.json"), r.to_json()?.as_bytes())?;
        m.output(&args.out, &format!("report_{coord}.csv"), r.to_csv().as_bytes())?;
    }
    m.output(&args.out, MERGED_REPORT, merged_csv(&merged).as_bytes())?;
    for (coord, r) in COORDS.iter().zip([&x, &y]) {
        for comp in Component::ALL {
            m.output(&args.out, &panel_name(coord, comp), render_panel(r, comp, coord).as_bytes())?;
        }
    }
    m.notes = x.warnings.iter().map(|w| format!("x: {w}")).chain(y.warnings.iter().map(|w| format!("y: {w}"))).collect();
    m.finish(&args.out)?;
    Ok(Analysis { files: inputs.into_iter().map(|(p, _)| p).collect(), x, y, merged })
}

/// Redraws the six panels from `report_x.json` and `report_y.json`.
pub fn render(args: &RenderArgs) -> Result<Vec<PathBuf>> {
    let out = args.out.clone().unwrap_or_else(|| args.report_dir.clone());
    let mut written = Vec::new();
    let mut reports = Vec::new();
    for coord in COORDS {
        let path = args.report_dir.join(format!("report_{coord}.json"));
        let r = OutlierReport::from_json(&text(&path)?).map_err(|e| Error::Format {
            path: path.clone(),
            message: e.to_string(),
        })?;
        reports.push(r);
    }
    for (coord, r) in COORDS.iter().zip(&reports) {
        for comp in Component::ALL {
            let p = out.join(panel_name(coord, comp));
            super::write_atomic(&p, render_panel(r, comp, coord).as_bytes())?;
            written.push(p);
        }
    }
    Ok(written)
}
