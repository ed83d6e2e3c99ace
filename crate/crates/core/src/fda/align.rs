//! Alignment of a whole sample to its amplitude median, with orbit centering.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::dp::{polish, Alignment};
use super::grid;
use super::median::{karcher_median_amplitude, median_of, MedianOptions};
use super::sphere::{exp_raw, from_srt, log_raw, to_srt};
use super::srsf::{apply_warp, from_srsf, group_action, to_srsf};
use super::types::{check_same_grid, SampledFunction, Srsf, SrtPoint, Warping};
use crate::error::{Error, Result};

/// A sample aligned to its amplitude median.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AlignedSample {
    /// `f̃_i = f_i ∘ γ_i`.
    pub aligned_functions: Vec<SampledFunction>,
    /// `q̃_i = (q_i, γ_i) √γ̇_i`.
    pub aligned_srsfs: Vec<Srsf>,
    /// `D_a^i = ‖q̃_i − q̄‖`.
    pub distances: Vec<f64>,
    /// Optimal warps `γ_i`.
    pub warpings: Vec<Warping>,
    /// Orbit-centred median SRSF `q̄`.
    pub median_srsf: Srsf,
    /// `f̄`, integrated from `q̄` starting at the median of `f_i(0)`.
    pub median_function: SampledFunction,
    /// `Σ D_a` along the median iteration.
    pub objective_history: Vec<f64>,
    pub warning: Option<String>,
}

impl AlignedSample {
    pub fn len(&self) -> usize {
        self.distances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.distances.is_empty()
    }

    pub fn grid_size(&self) -> usize {
        self.median_srsf.grid_size()
    }
}

/// Mean warp: the exponential at the identity of the averaged log-mapped SRTs.
pub fn mean_warping(warps: &[Warping]) -> Result<Warping> {
    let n = warps[0].grid_size();
    let id = vec![1.0; n];
    let mut mean = vec![0.0; n];
    for g in warps {
        let v = log_raw(&id, to_srt(g)?.values())?;
        mean.iter_mut().zip(&v).for_each(|(a, b)| *a += b);
    }
    let k = warps.len() as f64;
    mean.iter_mut().for_each(|v| *v /= k);
    let psi = exp_raw(&id, &mean);
    from_srt(&SrtPoint::new(psi)?)
}

/// Moves every optimal warp to the centred median by composing it with `inv`,
/// then refines it there.
fn recentre(centred: &Srsf, sample: &[Srsf], alignments: &[Alignment], inv: &Warping) -> Result<Vec<Alignment>> {
    sample
        .par_iter()
        .zip(alignments)
        .map(|(q, a)| {
            let start = a.warp.compose(inv)?;
            let here = grid::distance(centred.values(), group_action(q, &start)?.values());
            let (d, w) = polish(centred.values(), q.values(), start.values());
            let (distance, warp) = if d < here { (d, Warping::new(w)?) } else { (here, start) };
            Ok(Alignment { distance, warp, ..a.clone() })
        })
        .collect()
}

/// Computes the amplitude median, centres its orbit so the mean optimal warp
/// is the identity, and aligns every function to it.
pub fn align_sample(sample: &[SampledFunction], opts: &MedianOptions) -> Result<AlignedSample> {
    if sample.len() < 2 {
        return Err(Error::InsufficientSample {
            needed: 2,
            got: sample.len(),
        });
    }
    let n = sample[0].grid_size();
    for f in sample {
        check_same_grid(n, f.grid_size())?;
    }
    let srsfs = sample.iter().map(to_srsf).collect::<Result<Vec<_>>>()?;
    let km = karcher_median_amplitude(&srsfs, opts)?;
    let mut median = km.median;
    let mut alignments = km.alignments;

    let warps: Vec<Warping> = alignments.iter().map(|a| a.warp.clone()).collect();
    let mean = mean_warping(&warps)?;
    if mean != Warping::identity(n) {
        let inv = mean.inverse();
        let centred = group_action(&median, &inv)?;
        alignments = recentre(&centred, &srsfs, &alignments, &inv)?;
        median = centred;
    }

    let mut aligned_functions = Vec::with_capacity(sample.len());
    let mut aligned_srsfs = Vec::with_capacity(sample.len());
    for ((f, q), a) in sample.iter().zip(&srsfs).zip(&alignments) {
        aligned_functions.push(apply_warp(f, &a.warp)?);
        aligned_srsfs.push(group_action(q, &a.warp)?);
    }
    let mut starts: Vec<f64> = sample.iter().map(|f| f.values()[0]).collect();
    let median_function = from_srsf(&median, median_of(&mut starts))?;
    Ok(AlignedSample {
        aligned_functions,
        aligned_srsfs,
        distances: alignments.iter().map(|a| a.distance).collect(),
        warpings: alignments.into_iter().map(|a| a.warp).collect(),
        median_srsf: median,
        median_function,
        objective_history: km.objective_history,
        warning: km.warning,
    })
}
