//! Per-sample verdicts from the three boxplots, and their CSV and JSON
//! forms.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{
    amplitude_boxplot, classify, phase_boxplot, translation_boxplot, BoxplotOptions,
    ComponentBoxplot,
};
use crate::error::{Error, Result};
use crate::fda::{align_sample, grid, MedianOptions, SampledFunction};

/// Scalar removed from each function before elastic analysis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TranslationStatistic {
    /// `∫₀¹ f`.
    #[default]
    Mean,
    /// `f(0)`.
    Start,
}

impl TranslationStatistic {
    pub fn of(self, f: &SampledFunction) -> f64 {
        match self {
            TranslationStatistic::Mean => grid::mean(f.values()),
            TranslationStatistic::Start => f.values()[0],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalysisConfig {
    pub boxplot: BoxplotOptions,
    pub translation: TranslationStatistic,
    pub median: MedianOptions,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleVerdict {
    pub index: usize,
    pub translation: f64,
    /// Distance to the amplitude median after alignment.
    pub amplitude_distance: f64,
    /// Tangent-space distance of the warp to the phase median.
    pub phase_distance: f64,
    pub translation_outlier: bool,
    pub amplitude_outlier: bool,
    pub phase_outlier: bool,
    pub outlier: bool,
}

/// Curves kept alongside the report so plots can be redrawn from it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportCurves {
    pub functions: Vec<Vec<f64>>,
    /// Centred functions composed with their optimal warps.
    pub aligned: Vec<Vec<f64>>,
    pub warps: Vec<Vec<f64>>,
    /// Centred amplitude median in function space.
    pub median_function: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutlierReport {
    pub n_samples: usize,
    pub grid_size: usize,
    pub config: AnalysisConfig,
    pub translation: ComponentBoxplot,
    pub amplitude: ComponentBoxplot,
    pub phase: ComponentBoxplot,
    pub verdicts: Vec<SampleVerdict>,
    pub warnings: Vec<String>,
    pub curves: ReportCurves,
}

/// Column names of [`OutlierReport::to_csv`].
pub const CSV_HEADER: &str =
    "index,translation,amplitude_distance,phase_distance,translation_outlier,amplitude_outlier,phase_outlier,outlier";

impl OutlierReport {
    pub fn outliers(&self) -> Vec<usize> {
        self.verdicts.iter().filter(|v| v.outlier).map(|v| v.index).collect()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for v in &self.verdicts {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                v.index,
                v.translation,
                v.amplitude_distance,
                v.phase_distance,
                v.translation_outlier as u8,
                v.amplitude_outlier as u8,
                v.phase_outlier as u8,
                v.outlier as u8
            );
        }
        out
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// Decomposes the sample into translation, amplitude and phase, builds a
/// boxplot of each and flags the samples outside any of them.
pub fn full_report(sample: &[SampledFunction], config: &AnalysisConfig) -> Result<OutlierReport> {
    config.boxplot.validate()?;
    if sample.len() < super::MIN_SAMPLES {
        return Err(Error::InsufficientSample {
            needed: super::MIN_SAMPLES,
            got: sample.len(),
        });
    }
    let translations: Vec<f64> = sample.iter().map(|f| config.translation.of(f)).collect();
    let centred = sample
        .iter()
        .zip(&translations)
        .map(|(f, c)| f.shifted(-c))
        .collect::<Result<Vec<_>>>()?;
    let aligned = align_sample(&centred, &config.median)?;

    let opts = &config.boxplot;
    let translation = translation_boxplot(&translations, opts.whisker_factor)?;
    let amplitude = amplitude_boxplot(&aligned, opts)?;
    let phase = phase_boxplot(&aligned, opts)?;
    let (ft, fa, fp) = (classify(&translation), classify(&amplitude), classify(&phase));

    let verdicts = (0..sample.len())
        .map(|i| SampleVerdict {
            index: i,
            translation: translations[i],
            amplitude_distance: amplitude.values[i],
            phase_distance: phase.values[i],
            translation_outlier: ft[i],
            amplitude_outlier: fa[i],
            phase_outlier: fp[i],
            outlier: ft[i] || fa[i] || fp[i],
        })
        .collect();
    let mut warnings: Vec<String> = aligned.warning.iter().cloned().collect();
    for (k, inside) in phase.whiskers_in_orthant.iter().enumerate() {
        if !inside {
            warnings.push(format!(
                "phase whisker {} leaves the positive orthant and is not a warping",
                if k == 0 { 1 } else { 3 }
            ));
        }
    }
    let curves = ReportCurves {
        functions: sample.iter().map(|f| f.values().to_vec()).collect(),
        aligned: aligned.aligned_functions.iter().map(|f| f.values().to_vec()).collect(),
        warps: aligned.warpings.iter().map(|g| g.values().to_vec()).collect(),
        median_function: aligned.median_function.values().to_vec(),
    };
    Ok(OutlierReport {
        n_samples: sample.len(),
        grid_size: aligned.grid_size(),
        config: *config,
        translation,
        amplitude,
        phase,
        verdicts,
        warnings,
        curves,
    })
}
