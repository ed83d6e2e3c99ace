//! Karcher medians: in the amplitude space (quotient of SRSFs by warping) and
//! on the SRT sphere for phase.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::dp::{amplitude_distance, lattice_alignment, Alignment};
use super::grid;
use super::sphere::{arc, exp_raw, log_raw};
use super::types::{check_same_grid, Srsf, SrtPoint};
use crate::error::{Error, Result};

/// How the amplitude iteration picks its starting point among the sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MedianInit {
    /// Member with the smallest summed pairwise `D_a` (`N²` alignments).
    PairwiseAmplitude,
    /// Member with the smallest summed unaligned L² distance.
    PairwiseL2,
}

/// Iteration controls for [`karcher_median_amplitude`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MedianOptions {
    /// Fraction of the way moved toward the pointwise median of the aligned
    /// SRSFs at each iteration.
    pub step: f64,
    /// Stop once the relative objective decrease falls below this.
    pub rel_tol: f64,
    pub max_iter: usize,
    pub init: MedianInit,
}

impl Default for MedianOptions {
    fn default() -> Self {
        Self {
            step: 0.3,
            rel_tol: 1e-5,
            max_iter: 30,
            init: MedianInit::PairwiseL2,
        }
    }
}

/// Amplitude median and its diagnostics.
#[derive(Debug, Clone)]
pub struct AmplitudeMedian {
    pub median: Srsf,
    /// `Σ D_a(q̄, q_i)` after initialisation and after every accepted update.
    pub objective_history: Vec<f64>,
    /// Alignment of every sample member to the returned median.
    pub alignments: Vec<Alignment>,
    pub converged: bool,
    pub warning: Option<String>,
}

impl AmplitudeMedian {
    pub fn objective(&self) -> f64 {
        *self.objective_history.last().expect("history is never empty")
    }
}

pub(crate) fn align_all(target: &Srsf, sample: &[Srsf]) -> Result<Vec<Alignment>> {
    sample
        .par_iter()
        .map(|q| amplitude_distance(target, q))
        .collect()
}

fn align_all_lattice(target: &Srsf, sample: &[Srsf]) -> Result<Vec<Alignment>> {
    sample
        .par_iter()
        .map(|q| lattice_alignment(target, q))
        .collect()
}

fn total(alignments: &[Alignment]) -> f64 {
    alignments.iter().map(|a| a.distance).sum()
}

fn check_sample(sample: &[Srsf], needed: usize) -> Result<usize> {
    if sample.len() < needed {
        return Err(Error::InsufficientSample {
            needed,
            got: sample.len(),
        });
    }
    let n = sample[0].grid_size();
    for q in sample {
        check_same_grid(n, q.grid_size())?;
    }
    Ok(n)
}

fn pointwise_median(columns: &[Vec<f64>], n: usize) -> Vec<f64> {
    let mut scratch = Vec::with_capacity(columns.len());
    (0..n)
        .map(|t| {
            scratch.clear();
            scratch.extend(columns.iter().map(|c| c[t]));
            median_of(&mut scratch)
        })
        .collect()
}

/// Median of a slice (mean of the middle pair for even lengths).
pub(crate) fn median_of(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let m = values.len();
    if m % 2 == 1 {
        values[m / 2]
    } else {
        0.5 * (values[m / 2 - 1] + values[m / 2])
    }
}

fn initial_index(sample: &[Srsf], init: MedianInit) -> Result<usize> {
    let sums: Vec<f64> = match init {
        MedianInit::PairwiseAmplitude => sample
            .par_iter()
            .map(|c| -> Result<f64> {
                let mut s = 0.0;
                for q in sample {
                    s += amplitude_distance(c, q)?.distance;
                }
                Ok(s)
            })
            .collect::<Result<_>>()?,
        MedianInit::PairwiseL2 => sample
            .iter()
            .map(|c| sample.iter().map(|q| c.l2_distance(q)).sum())
            .collect(),
    };
    let mut best = 0;
    for (i, s) in sums.iter().enumerate() {
        if *s < sums[best] {
            best = i;
        }
    }
    Ok(best)
}

/// Karcher median of `[q_i]` under `D_a`.
///
/// Starts at a sample member and repeatedly moves a fraction `step` toward the
/// pointwise median of the SRSFs aligned to the current estimate. An update is
/// accepted only if it lowers `Σ D_a`; a rejected update, or a relative
/// decrease below `rel_tol`, ends the iteration. Running out of iterations is
/// reported through `warning`, not as an error.
///
/// The iteration aligns on the lattice only. The returned alignments are
/// refined ones, and their total is appended to the history when it is lower.
pub fn karcher_median_amplitude(sample: &[Srsf], opts: &MedianOptions) -> Result<AmplitudeMedian> {
    let n = check_sample(sample, 2)?;
    let start = initial_index(sample, opts.init)?;
    let mut median = sample[start].clone();
    let mut alignments = align_all_lattice(&median, sample)?;
    let mut objective = total(&alignments);
    let mut history = vec![objective];
    let mut converged = objective == 0.0;
    let mut iter = 0;
    while !converged && iter < opts.max_iter {
        iter += 1;
        let aligned: Vec<Vec<f64>> = sample
            .iter()
            .zip(&alignments)
            .map(|(q, a)| super::srsf::act(q.values(), a.warp.values()))
            .collect();
        let target = pointwise_median(&aligned, n);
        let candidate = Srsf::new(
            median
                .values()
                .iter()
                .zip(&target)
                .map(|(m, t)| m + opts.step * (t - m))
                .collect(),
        )?;
        let cand_align = align_all_lattice(&candidate, sample)?;
        let cand_obj = total(&cand_align);
        if cand_obj >= objective {
            converged = true;
            break;
        }
        let rel = (objective - cand_obj) / objective;
        median = candidate;
        alignments = cand_align;
        objective = cand_obj;
        history.push(objective);
        if rel < opts.rel_tol || objective == 0.0 {
            converged = true;
        }
    }
    if objective > 0.0 {
        alignments = align_all(&median, sample)?;
        let refined = total(&alignments);
        if refined < objective {
            history.push(refined);
        }
    }
    let warning = (!converged).then(|| {
        format!(
            "amplitude median did not reach relative tolerance {} within {} iterations",
            opts.rel_tol, opts.max_iter
        )
    });
    Ok(AmplitudeMedian {
        median,
        objective_history: history,
        alignments,
        converged,
        warning,
    })
}

/// Phase median and its diagnostics.
#[derive(Debug, Clone)]
pub struct PhaseMedian {
    pub median: SrtPoint,
    /// `Σ D_p(ψ̄, ψ_i)` after initialisation and after every accepted step.
    pub objective_history: Vec<f64>,
    pub converged: bool,
    pub warning: Option<String>,
}

const PHASE_MAX_ITER: usize = 200;
const PHASE_REL_TOL: f64 = 1e-9;

fn phase_objective(center: &[f64], points: &[SrtPoint]) -> f64 {
    points.iter().map(|p| arc(center, p.values())).sum()
}

/// Karcher median of SRT points under the arc-length distance.
///
/// The iteration starts from the Karcher mean (the geodesic midpoint for two
/// points) and then takes Weiszfeld steps in the tangent space, moving along
/// geodesics with the exponential map. Steps that do not lower the objective
/// or that leave the positive orthant are halved, up to ten times.
pub fn karcher_median_phase(points: &[SrtPoint]) -> Result<PhaseMedian> {
    if points.is_empty() {
        return Err(Error::InsufficientSample { needed: 1, got: 0 });
    }
    let n = points[0].grid_size();
    for p in points {
        check_same_grid(n, p.grid_size())?;
    }
    if points.len() == 1 {
        return Ok(PhaseMedian {
            median: points[0].clone(),
            objective_history: vec![0.0],
            converged: true,
            warning: None,
        });
    }
    let mut center = karcher_mean(points)?;
    let mut objective = phase_objective(&center, points);
    let mut history = vec![objective];
    let mut converged = false;
    for _ in 0..PHASE_MAX_ITER {
        let mut num = vec![0.0; n];
        let mut den = 0.0;
        for p in points {
            let v = log_raw(&center, p.values())?;
            let len = grid::norm(&v);
            if len < 1e-12 {
                continue;
            }
            let w = 1.0 / len;
            num.iter_mut().zip(&v).for_each(|(a, b)| *a += w * b);
            den += w;
        }
        if den == 0.0 {
            converged = true;
            break;
        }
        let dir: Vec<f64> = num.iter().map(|v| v / den).collect();
        let mut scale = 1.0;
        let mut accepted = None;
        for _ in 0..10 {
            let step: Vec<f64> = dir.iter().map(|v| v * scale).collect();
            let cand = exp_raw(&center, &step);
            if cand.iter().all(|&x| x > 0.0) {
                let obj = phase_objective(&cand, points);
                if obj < objective {
                    accepted = Some((cand, obj));
                    break;
                }
            }
            scale *= 0.5;
        }
        match accepted {
            Some((cand, obj)) => {
                let rel = (objective - obj) / objective.max(f64::MIN_POSITIVE);
                center = cand;
                objective = obj;
                history.push(obj);
                if rel < PHASE_REL_TOL {
                    converged = true;
                    break;
                }
            }
            None => {
                converged = true;
                break;
            }
        }
    }
    let warning = (!converged).then(|| "phase median hit the iteration limit".to_string());
    Ok(PhaseMedian {
        median: SrtPoint::from_unit_unchecked(center),
        objective_history: history,
        converged,
        warning,
    })
}

/// Intrinsic (Karcher) mean by gradient iteration from the normalised
/// extrinsic mean.
pub fn karcher_mean(points: &[SrtPoint]) -> Result<Vec<f64>> {
    let n = points[0].grid_size();
    let mut center = vec![0.0; n];
    for p in points {
        center.iter_mut().zip(p.values()).for_each(|(a, b)| *a += b);
    }
    let norm = grid::norm(&center);
    if norm <= 0.0 {
        return Err(Error::Domain("points have no well-defined mean".into()));
    }
    center.iter_mut().for_each(|v| *v /= norm);
    for _ in 0..100 {
        let mut mean = vec![0.0; n];
        for p in points {
            let v = log_raw(&center, p.values())?;
            mean.iter_mut().zip(&v).for_each(|(a, b)| *a += b);
        }
        let k = points.len() as f64;
        mean.iter_mut().for_each(|v| *v /= k);
        if grid::norm(&mean) < 1e-12 {
            break;
        }
        center = exp_raw(&center, &mean);
    }
    Ok(center)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fda::{group_action, to_srt, Warping};

    fn bump(n: usize, c: f64) -> Srsf {
        Srsf::from_fn(n, |t| (-(t - c).powi(2) / 0.05).exp() * 2.0).unwrap()
    }

    #[test]
    fn identical_sample_returns_member() {
        let q = bump(65, 0.5);
        let m = karcher_median_amplitude(&[q.clone(), q.clone(), q.clone()], &Default::default()).unwrap();
        assert_eq!(m.median, q);
        assert_eq!(m.objective(), 0.0);
    }

    #[test]
    fn single_orbit_collapses() {
        let n = 129;
        let q = bump(n, 0.5);
        let g1 = Warping::from_fn(n, |t| t + 0.3 * t * (1.0 - t)).unwrap();
        let g2 = Warping::from_fn(n, |t| t - 0.25 * t * (1.0 - t)).unwrap();
        let sample = vec![q.clone(), group_action(&q, &g1).unwrap(), group_action(&q, &g2).unwrap()];
        let m = karcher_median_amplitude(&sample, &Default::default()).unwrap();
        assert!(m.objective() <= 1e-2 * q.norm() * 3.0, "obj={}", m.objective());
    }

    #[test]
    fn objective_never_increases() {
        let n = 65;
        let sample: Vec<Srsf> = (0..6).map(|i| bump(n, 0.3 + 0.07 * i as f64)).collect();
        let m = karcher_median_amplitude(&sample, &Default::default()).unwrap();
        assert!(m.objective_history.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn phase_median_of_identical_points() {
        let p = to_srt(&Warping::from_fn(33, |t| t.powf(1.4)).unwrap()).unwrap();
        let m = karcher_median_phase(&[p.clone(), p.clone(), p.clone()]).unwrap();
        for (a, b) in m.median.values().iter().zip(p.values()) {
            assert!((a - b).abs() < 1e-12);
        }
        let single = karcher_median_phase(std::slice::from_ref(&p)).unwrap();
        assert_eq!(single.median, p);
    }
}
