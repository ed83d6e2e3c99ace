//! Seeded Monte Carlo samples of deformed contours.
//!
//! Every sample index `i` draws from its own ChaCha8 stream: the generator is
//! seeded from the configured seed and switched to stream `i`. Samples are
//! therefore independent of generation order and can be produced in
//! parallel.

mod config;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use config::{
    preset_names, AmplitudeParams, PhaseParams, Range, RoughnessParams, Scenario, ScenarioConfig,
    ShapeSpec, BENCHMARK_PHASE_OUTLYING,
};

use crate::error::{Error, Result};
use crate::fda::{grid, Warping};
use crate::geometry::{benchmark_point, eval_fourier, ContourLayer, FourierContourModel, BREAKPOINTS};

/// Right end of the benchmark side that the amplitude and phase scenarios
/// deform.
pub const SIDE: f64 = BREAKPOINTS[1];

/// Cross covariances are shrunk to this fraction of `√(var_x var_y)`.
pub const CORRELATION_CAP: f64 = 0.99;

/// Simulated contours with their ground truth.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulatedSample {
    pub contours: Vec<ContourLayer>,
    /// True where the sample was drawn from the outlying law.
    pub ground_truth: Vec<bool>,
    /// The warp applied to `y` of each sample (identity when none).
    pub warps: Vec<Warping>,
    pub seed: u64,
    /// Warp draws rejected for breaking monotonicity.
    pub rejections: usize,
    pub warnings: Vec<String>,
}

impl SimulatedSample {
    pub fn outlier_count(&self) -> usize {
        self.ground_truth.iter().filter(|&&b| b).count()
    }
}

/// The random stream of sample `index`.
pub fn sample_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

fn unif(rng: &mut ChaCha8Rng, r: Range) -> f64 {
    r.0 + (r.1 - r.0) * rng.random::<f64>()
}

fn normal(rng: &mut ChaCha8Rng, var: f64) -> f64 {
    let z: f64 = rng.sample(StandardNormal);
    var.sqrt() * z
}

/// The undeformed outline as an analytic function of `t`.
enum Base {
    Benchmark { z: f64 },
    Fourier(FourierContourModel),
}

impl Base {
    fn load(spec: &ShapeSpec) -> Result<Self> {
        Ok(match spec {
            ShapeSpec::Benchmark { z } => Base::Benchmark { z: *z },
            ShapeSpec::Preset(p) => Base::Fourier(p.stand_in_model()?),
            ShapeSpec::Model(path) => {
                let text = std::fs::read_to_string(path)?;
                let model: FourierContourModel = serde_json::from_str(&text).map_err(|e| Error::Format {
                    path: path.clone(),
                    message: e.to_string(),
                })?;
                model.validate()?;
                Base::Fourier(model)
            }
        })
    }

    fn z(&self) -> f64 {
        match self {
            Base::Benchmark { z } => *z,
            Base::Fourier(m) => m.z,
        }
    }

    fn contour(&self, n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
        let c = match self {
            Base::Benchmark { z } => crate::geometry::benchmark_contour(*z, n)?,
            Base::Fourier(m) => eval_fourier(m, n)?,
        };
        Ok((c.x.into_values(), c.y.into_values()))
    }
}

/// Draws a sample for `config`.
pub fn simulate(config: &ScenarioConfig) -> Result<SimulatedSample> {
    config.validate()?;
    let base = Base::load(&config.shape)?;
    match &config.scenario {
        Scenario::Roughness(p) => sim_roughness(config, p, &base),
        Scenario::Amplitude(p) => sim_amplitude(config, p, &base),
        Scenario::Phase(p) => sim_phase(config, p, &base),
    }
}

fn closed(z: f64, mut x: Vec<f64>, mut y: Vec<f64>) -> Result<ContourLayer> {
    let n = x.len();
    x[n - 1] = x[0];
    y[n - 1] = y[0];
    ContourLayer::from_xy(z, x, y, true)
}

fn sim_roughness(config: &ScenarioConfig, p: &RoughnessParams, base: &Base) -> Result<SimulatedSample> {
    let n = config.grid_size;
    let big_n = config.n_samples;
    let (bx, by) = base.contour(n)?;
    let [vx, vy] = p.safe_var;
    let cap = CORRELATION_CAP * (vx * vy).sqrt();
    let clamped = bx
        .iter()
        .zip(&by)
        .filter(|(x, y)| (p.cross * *x * *y).abs() > cap)
        .count();
    let per_sample: Vec<Result<ContourLayer>> = (0..big_n)
        .into_par_iter()
        .map(|i| {
            let mut rng = sample_rng(config.seed, i);
            let (mut x, mut y) = (bx.clone(), by.clone());
            // Last node repeats the first, so it takes the first node's noise.
            for t in 0..n - 1 {
                let (ex, ey) = if i == big_n - 2 {
                    (normal(&mut rng, p.outlier_var), normal(&mut rng, vy))
                } else if i == big_n - 1 {
                    (normal(&mut rng, vx), normal(&mut rng, p.outlier_var))
                } else {
                    let cov = (p.cross * bx[t] * by[t]).clamp(-cap, cap);
                    let rho = if vx > 0.0 && vy > 0.0 { cov / (vx * vy).sqrt() } else { 0.0 };
                    let z1: f64 = rng.sample(StandardNormal);
                    let z2: f64 = rng.sample(StandardNormal);
                    (vx.sqrt() * z1, vy.sqrt() * (rho * z1 + (1.0 - rho * rho).sqrt() * z2))
                };
                x[t] += ex;
                y[t] += ey;
            }
            closed(base.z(), x, y)
        })
        .collect();
    let contours = per_sample.into_iter().collect::<Result<Vec<_>>>()?;
    let ground_truth = (0..big_n).map(|i| i >= big_n - 2).collect();
    let mut warnings = Vec::new();
    if clamped > 0 {
        warnings.push(format!(
            "cross covariance clamped to {CORRELATION_CAP}·√(var_x·var_y) at {clamped} of {n} grid nodes"
        ));
    }
    Ok(SimulatedSample {
        contours,
        ground_truth,
        warps: vec![Warping::identity(n); big_n],
        seed: config.seed,
        rejections: 0,
        warnings,
    })
}

/// `ỹ₁ + u₁ sin(2πt/w) + u₂ cos(2πt/w) − u₂` on the first side of width `w`.
fn side_wave(y0: f64, u1: f64, u2: f64, t: f64) -> f64 {
    let arg = std::f64::consts::TAU * t / SIDE;
    y0 + u1 * arg.sin() + u2 * arg.cos() - u2
}

/// `t + c t (t − end)` on `[0, end]`, identity beyond.
fn quadratic_warp(c: f64, end: f64, t: f64) -> f64 {
    if t < end {
        t + c * t * (t - end)
    } else {
        t
    }
}

/// Benchmark `y` with the first side deformed by `(u1, u2)`, then warped
/// by `t + c t (t − w)` on that side.
fn benchmark_y(z: f64, u1: f64, u2: f64, c: f64, t: f64) -> Result<f64> {
    let s = quadratic_warp(c, SIDE, t);
    if s <= SIDE {
        let (_, y0) = benchmark_point(z, 0.0)?;
        Ok(side_wave(y0, u1, u2, s))
    } else {
        Ok(benchmark_point(z, s)?.1)
    }
}

fn warp_on_grid(n: usize, f: impl Fn(f64) -> f64) -> Result<Warping> {
    Warping::new(grid::nodes(n).into_iter().map(f).collect())
}

struct Draw {
    contour: ContourLayer,
    outlier: bool,
    warp: Warping,
    rejections: usize,
}

fn collect(config: &ScenarioConfig, draws: Vec<Result<Draw>>, warnings: Vec<String>) -> Result<SimulatedSample> {
    let draws = draws.into_iter().collect::<Result<Vec<_>>>()?;
    let mut out = SimulatedSample {
        contours: Vec::with_capacity(draws.len()),
        ground_truth: Vec::with_capacity(draws.len()),
        warps: Vec::with_capacity(draws.len()),
        seed: config.seed,
        rejections: 0,
        warnings,
    };
    for d in draws {
        out.contours.push(d.contour);
        out.ground_truth.push(d.outlier);
        out.warps.push(d.warp);
        out.rejections += d.rejections;
    }
    Ok(out)
}

fn sim_amplitude(config: &ScenarioConfig, p: &AmplitudeParams, base: &Base) -> Result<SimulatedSample> {
    let n = config.grid_size;
    let t = grid::nodes(n);
    let draws = (0..config.n_samples)
        .into_par_iter()
        .map(|i| -> Result<Draw> {
            let mut rng = sample_rng(config.seed, i);
            let safe = rng.random::<f64>() < config.bernoulli_p;
            let law = if safe { p.safe } else { p.outlying };
            let (u1, u2) = (unif(&mut rng, law), unif(&mut rng, law));
            match base {
                Base::Benchmark { z } => {
                    let alpha = p.nuisance_alpha.map_or(0.0, |r| unif(&mut rng, r));
                    let (x, _) = base.contour(n)?;
                    let y = t
                        .iter()
                        .map(|&s| benchmark_y(*z, u1, u2, alpha, s))
                        .collect::<Result<Vec<_>>>()?;
                    Ok(Draw {
                        contour: closed(*z, x, y)?,
                        outlier: !safe,
                        warp: warp_on_grid(n, |s| quadratic_warp(alpha, SIDE, s))?,
                        rejections: 0,
                    })
                }
                Base::Fourier(m) => {
                    let mut pert = m.clone();
                    pert.c.iter_mut().for_each(|c| *c += u1);
                    pert.d.iter_mut().for_each(|d| *d += u2);
                    let (x, _) = base.contour(n)?;
                    let y = t.iter().map(|&s| pert.y_at(s)).collect();
                    Ok(Draw {
                        contour: closed(m.z, x, y)?,
                        outlier: !safe,
                        warp: Warping::identity(n),
                        rejections: 0,
                    })
                }
            }
        })
        .collect();
    collect(config, draws, Vec::new())
}

/// Largest `|c|` for which `t + c t (t − end)` is strictly increasing on
/// `[0, end]`.
fn warp_limit(end: f64) -> f64 {
    1.0 / end
}

fn sim_phase(config: &ScenarioConfig, p: &PhaseParams, base: &Base) -> Result<SimulatedSample> {
    let n = config.grid_size;
    let t = grid::nodes(n);
    let end = match base {
        Base::Benchmark { .. } => SIDE,
        Base::Fourier(_) => 1.0,
    };
    let limit = warp_limit(end);
    for (field, r) in [("scenario.safe", p.safe), ("scenario.outlying", p.outlying)] {
        let nearest = if r.0 <= 0.0 && r.1 >= 0.0 { 0.0 } else { r.0.abs().min(r.1.abs()) };
        if nearest >= limit {
            return Err(Error::config(
                field,
                format!(
                    "every warp coefficient in [{}, {}] gives a non-monotone warp; \
                     t + c·t·(t − {end}) is monotone only for |c| < {limit}",
                    r.0, r.1
                ),
            ));
        }
    }
    let draws = (0..config.n_samples)
        .into_par_iter()
        .map(|i| -> Result<Draw> {
            let mut rng = sample_rng(config.seed, i);
            let safe = rng.random::<f64>() < config.bernoulli_p;
            let (u1, u2) = match (base, p.u) {
                (Base::Benchmark { .. }, Some(r)) => (unif(&mut rng, r), unif(&mut rng, r)),
                _ => (0.0, 0.0),
            };
            let law = if safe { p.safe } else { p.outlying };
            let mut rejections = 0;
            let c = loop {
                let c = unif(&mut rng, law);
                if c.abs() < limit {
                    break c;
                }
                rejections += 1;
                if rejections > p.max_redraws {
                    return Err(Error::config(
                        if safe { "scenario.safe" } else { "scenario.outlying" },
                        format!("no monotone warp after {} draws for sample {i}", p.max_redraws),
                    ));
                }
            };
            let (x, y) = match base {
                Base::Benchmark { z } => {
                    let (x, _) = base.contour(n)?;
                    let y = t
                        .iter()
                        .map(|&s| benchmark_y(*z, u1, u2, c, s))
                        .collect::<Result<Vec<_>>>()?;
                    (x, y)
                }
                Base::Fourier(m) => {
                    let (x, _) = base.contour(n)?;
                    (x, t.iter().map(|&s| m.y_at(quadratic_warp(c, 1.0, s))).collect())
                }
            };
            Ok(Draw {
                contour: closed(base.z(), x, y)?,
                outlier: !safe,
                warp: warp_on_grid(n, |s| quadratic_warp(c, end, s))?,
                rejections,
            })
        })
        .collect();
    collect(config, draws, Vec::new())
}
