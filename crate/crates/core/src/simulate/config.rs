//! Scenario configuration and the named presets.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fda::MIN_GRID;
use crate::geometry::FourierPreset;

/// A closed interval `[lo, hi]` for uniform draws.
pub type Range = (f64, f64);

/// Base outline the scenario deforms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ShapeSpec {
    /// The analytic benchmark part at layer height `z`.
    Benchmark { z: f64 },
    /// A built-in stand-in outline of the named part type.
    Preset(FourierPreset),
    /// A fitted Fourier model stored as JSON.
    Model(PathBuf),
}

/// Roughness: pointwise Gaussian noise on both coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RoughnessParams {
    /// Safe noise variances of `x` and `y`.
    pub safe_var: [f64; 2],
    /// Safe covariance is `cross · x(t) · y(t)`.
    pub cross: f64,
    /// Variance of the outlying coordinate of the two outlying samples.
    pub outlier_var: f64,
}

/// Amplitude: coefficient perturbations drawn from a safe or outlying law.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AmplitudeParams {
    pub safe: Range,
    pub outlying: Range,
    /// Range of `α` in the nuisance warp `t + α t (t − 0.25)` on the first
    /// side of the benchmark part; ignored for Fourier shapes.
    #[serde(default)]
    pub nuisance_alpha: Option<Range>,
}

/// Phase: quadratic warps drawn from a safe or outlying law.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhaseParams {
    /// Range of the shared sinusoidal deformation of the benchmark's first
    /// side; ignored for Fourier shapes.
    #[serde(default)]
    pub u: Option<Range>,
    /// Warp coefficient range of safe samples.
    pub safe: Range,
    /// Warp coefficient range of outlying samples.
    pub outlying: Range,
    /// Redraws allowed per sample before giving up.
    #[serde(default = "default_redraws")]
    pub max_redraws: usize,
}

fn default_redraws() -> usize {
    1000
}

/// Which deformation to simulate, with its parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Scenario {
    Roughness(RoughnessParams),
    Amplitude(AmplitudeParams),
    Phase(PhaseParams),
}

impl Scenario {
    pub fn name(&self) -> &'static str {
        match self {
            Scenario::Roughness(_) => "roughness",
            Scenario::Amplitude(_) => "amplitude",
            Scenario::Phase(_) => "phase",
        }
    }
}

/// Everything needed to reproduce one simulated sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub scenario: Scenario,
    #[serde(default = "default_n")]
    pub n_samples: usize,
    #[serde(default)]
    pub seed: u64,
    pub shape: ShapeSpec,
    /// Points per contour.
    #[serde(default = "default_grid")]
    pub grid_size: usize,
    /// Probability that a sample is drawn from the safe law.
    #[serde(default = "default_p")]
    pub bernoulli_p: f64,
}

fn default_n() -> usize {
    150
}

fn default_grid() -> usize {
    101
}

fn default_p() -> f64 {
    0.97
}

fn check_range(field: &str, r: Range) -> Result<()> {
    if !(r.0.is_finite() && r.1.is_finite() && r.0 <= r.1) {
        return Err(Error::config(field, format!("[{}, {}] is not a finite interval", r.0, r.1)));
    }
    Ok(())
}

impl ScenarioConfig {
    fn with(scenario: Scenario, shape: ShapeSpec) -> Self {
        Self {
            scenario,
            n_samples: default_n(),
            seed: 0,
            shape,
            grid_size: default_grid(),
            bernoulli_p: default_p(),
        }
    }

    /// Checks field ranges. Feasibility of warp ranges is checked when
    /// sampling, where the warp domain is known.
    pub fn validate(&self) -> Result<()> {
        if self.n_samples < 4 {
            return Err(Error::config("n_samples", format!("must be at least 4, got {}", self.n_samples)));
        }
        if !(self.bernoulli_p > 0.0 && self.bernoulli_p <= 1.0) {
            return Err(Error::config("bernoulli_p", format!("must lie in (0, 1], got {}", self.bernoulli_p)));
        }
        if self.grid_size < MIN_GRID {
            return Err(Error::config("grid_size", format!("must be at least {MIN_GRID}, got {}", self.grid_size)));
        }
        if let ShapeSpec::Benchmark { z } = self.shape {
            if !(0.0..=1.0).contains(&z) {
                return Err(Error::config("shape.benchmark.z", format!("must lie in [0, 1], got {z}")));
            }
        }
        match &self.scenario {
            Scenario::Roughness(p) => {
                let vals = [p.safe_var[0], p.safe_var[1], p.outlier_var];
                if vals.iter().any(|v| !(v.is_finite() && *v >= 0.0)) || !p.cross.is_finite() {
                    return Err(Error::config("scenario", "variances must be finite and non-negative"));
                }
            }
            Scenario::Amplitude(p) => {
                check_range("scenario.safe", p.safe)?;
                check_range("scenario.outlying", p.outlying)?;
                if let Some(r) = p.nuisance_alpha {
                    check_range("scenario.nuisance_alpha", r)?;
                }
            }
            Scenario::Phase(p) => {
                check_range("scenario.safe", p.safe)?;
                check_range("scenario.outlying", p.outlying)?;
                if let Some(r) = p.u {
                    check_range("scenario.u", r)?;
                }
            }
        }
        Ok(())
    }

    /// Parses and validates JSON; syntax errors carry line and column.
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| {
            Error::config("<document>", format!("{e} (line {}, column {})", e.line(), e.column()))
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// A named preset: `benchmark-sim1` … `tube-sim3`.
    pub fn preset(name: &str) -> Result<Self> {
        let unknown = || {
            Error::config(
                "preset",
                format!("unknown preset `{name}`; expected one of {}", preset_names().join(", ")),
            )
        };
        let (shape, sim) = name.rsplit_once("-sim").ok_or_else(unknown)?;
        let cfg = if shape == "benchmark" {
            let s = ShapeSpec::Benchmark { z: 1.0 };
            match sim {
                "1" => Self::with(
                    Scenario::Roughness(RoughnessParams {
                        safe_var: [5e-6, 9e-5],
                        cross: 5e-6,
                        outlier_var: 5e-4,
                    }),
                    s,
                ),
                "2" => Self::with(
                    Scenario::Amplitude(AmplitudeParams {
                        safe: (0.0, 0.05),
                        outlying: (0.1, 0.25),
                        nuisance_alpha: Some((-1.0, 1.0)),
                    }),
                    s,
                ),
                "3" => Self::with(
                    Scenario::Phase(PhaseParams {
                        u: Some((0.05, 0.12)),
                        safe: (-0.2, 0.2),
                        outlying: BENCHMARK_PHASE_OUTLYING,
                        max_redraws: default_redraws(),
                    }),
                    s,
                ),
                _ => return Err(unknown()),
            }
        } else {
            let p = FourierPreset::from_name(shape).ok_or_else(unknown)?;
            let s = ShapeSpec::Preset(p);
            use FourierPreset::*;
            match sim {
                "1" => {
                    let (safe, cross, outlier_var) = match p {
                        Gear | Wheel => (5e-2, 5e-5, 2.0),
                        Logo => (5e-2, 5e-5, 1.0),
                        Tube => (5e-3, 5e-6, 0.25),
                    };
                    Self::with(
                        Scenario::Roughness(RoughnessParams {
                            safe_var: [safe, safe],
                            cross,
                            outlier_var,
                        }),
                        s,
                    )
                }
                "2" => {
                    let (safe, outlying) = match p {
                        Gear => ((0.0, 0.05), (0.0, 0.2)),
                        Wheel => ((0.0, 0.005), (0.0, 0.2)),
                        Logo => ((0.0, 0.5), (0.0, 2.0)),
                        Tube => ((0.0, 0.01), (0.0, 0.2)),
                    };
                    Self::with(
                        Scenario::Amplitude(AmplitudeParams {
                            safe,
                            outlying,
                            nuisance_alpha: None,
                        }),
                        s,
                    )
                }
                "3" => {
                    let beta = match p {
                        Gear | Logo => 0.3,
                        Wheel | Tube => 0.5,
                    };
                    Self::with(
                        Scenario::Phase(PhaseParams {
                            u: None,
                            safe: (-0.05, 0.05),
                            outlying: (-beta, beta),
                            max_redraws: default_redraws(),
                        }),
                        s,
                    )
                }
                _ => return Err(unknown()),
            }
        };
        Ok(cfg)
    }
}

/// Outlying warp coefficient range of the benchmark phase preset. Warps on
/// the first side stay monotone for coefficients below 4 in magnitude.
pub const BENCHMARK_PHASE_OUTLYING: Range = (3.575, 3.625);

/// All preset names.
pub fn preset_names() -> Vec<String> {
    let mut out = Vec::new();
    for shape in ["benchmark", "gear", "wheel", "logo", "tube"] {
        for k in 1..=3 {
            out.push(format!("{shape}-sim{k}"));
        }
    }
    out
}
