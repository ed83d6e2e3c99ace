//! Phase geometry: warpings as points on the positive orthant of the unit
//! Hilbert sphere through `ψ = √γ̇`, with the sphere's exponential map, its
//! inverse and the arc-length distance.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::grid;
use super::types::{check_same_grid, SrtPoint, TangentVector, Warping};
use crate::error::{Error, Result};

/// Below this angle `inv_exp_map` uses the projected difference.
pub const SMALL_ANGLE: f64 = 1e-8;

/// Angles this close to `π` are treated as antipodal.
pub const ANTIPODAL_MARGIN: f64 = 1e-6;

/// `ψ = √γ̇`, normalised to unit L² norm.
///
/// Interior slopes come from central differences, which are positive for any
/// valid warping. An endpoint slope whose second-order estimate is not
/// positive falls back to the first-order difference.
pub fn to_srt(gamma: &Warping) -> Result<SrtPoint> {
    let g = gamma.values();
    let n = g.len();
    let mut slope = grid::derivative(g);
    let inv_h = (n - 1) as f64;
    if slope[0] <= 0.0 {
        slope[0] = (g[1] - g[0]) * inv_h;
    }
    if slope[n - 1] <= 0.0 {
        slope[n - 1] = (g[n - 1] - g[n - 2]) * inv_h;
    }
    SrtPoint::normalized(slope.into_iter().map(f64::sqrt).collect())
}

/// `γ(t) = ∫₀ᵗ ψ²` rescaled so that `γ(1) = 1` exactly.
pub fn from_srt(psi: &SrtPoint) -> Result<Warping> {
    Warping::new(integrate_square(psi.values()))
}

/// `∫₀ᵗ ψ²` normalised to end at 1. Monotone for any real `ψ`, so it also
/// gives a plottable curve for sphere points outside the positive orthant.
pub fn integrate_square(psi: &[f64]) -> Vec<f64> {
    let sq: Vec<f64> = psi.iter().map(|v| v * v).collect();
    let mut g = grid::cumulative(&sq, 0.0);
    let total = g[g.len() - 1];
    if total > 0.0 {
        g.iter_mut().for_each(|v| *v /= total);
    }
    g
}

/// Geodesic distance `arccos ⟨ψ₁, ψ₂⟩`.
///
/// Evaluated as `2 atan2(‖ψ₁ − ψ₂‖, ‖ψ₁ + ψ₂‖)`, which agrees with the clamped
/// arccos for unit vectors and stays accurate near 0 and `π`.
pub fn srt_distance(a: &SrtPoint, b: &SrtPoint) -> f64 {
    arc(a.values(), b.values())
}

pub(crate) fn arc(a: &[f64], b: &[f64]) -> f64 {
    let diff = grid::distance(a, b);
    let sum: Vec<f64> = a.iter().zip(b).map(|(x, y)| x + y).collect();
    2.0 * diff.atan2(grid::norm(&sum))
}

/// Phase distance `D_p(γ₁, γ₂)` between two warpings.
pub fn phase_distance(g1: &Warping, g2: &Warping) -> Result<f64> {
    check_same_grid(g1.grid_size(), g2.grid_size())?;
    Ok(srt_distance(&to_srt(g1)?, &to_srt(g2)?))
}

/// Inverse exponential (log) map at `base`.
pub fn inv_exp_map(base: &SrtPoint, psi: &SrtPoint) -> Result<TangentVector> {
    check_same_grid(base.grid_size(), psi.grid_size())?;
    let v = log_raw(base.values(), psi.values())?;
    TangentVector::projected(v, base.clone())
}

pub(crate) fn log_raw(base: &[f64], psi: &[f64]) -> Result<Vec<f64>> {
    let theta = arc(base, psi);
    if theta >= PI - ANTIPODAL_MARGIN {
        return Err(Error::Domain(format!(
            "points are antipodal (θ = {theta}); the log map is undefined"
        )));
    }
    let v = if theta < SMALL_ANGLE {
        psi.iter().zip(base).map(|(p, b)| p - b).collect()
    } else {
        // ψ − cos θ ψ̄ written as (ψ − ψ̄) + (1 − cos θ) ψ̄ to avoid cancellation.
        let scale = theta / theta.sin();
        let one_minus_cos = 2.0 * (0.5 * theta).sin().powi(2);
        psi.iter()
            .zip(base)
            .map(|(p, b)| scale * ((p - b) + one_minus_cos * b))
            .collect::<Vec<_>>()
    };
    Ok(project(base, v))
}

fn project(base: &[f64], mut v: Vec<f64>) -> Vec<f64> {
    let ip = grid::inner(&v, base);
    v.iter_mut().zip(base).for_each(|(x, b)| *x -= ip * b);
    v
}

/// A point reached by the exponential map. It lies on the unit sphere but may
/// leave the positive orthant, in which case it is not the SRT of any warping.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SphereImage {
    pub values: Vec<f64>,
    pub in_orthant: bool,
}

impl SphereImage {
    pub fn into_srt(self) -> Result<SrtPoint> {
        if !self.in_orthant {
            return Err(Error::Domain(
                "exponential map left the positive orthant".into(),
            ));
        }
        SrtPoint::new(self.values)
    }

    /// The warping-like curve `∫ψ²`, defined even outside the orthant.
    pub fn warp_curve(&self) -> Vec<f64> {
        integrate_square(&self.values)
    }
}

/// Exponential map at `base`: `cos‖ν‖ ψ̄ + sin‖ν‖ ν/‖ν‖`, renormalised.
pub fn exp_map(base: &SrtPoint, v: &TangentVector) -> Result<SphereImage> {
    check_same_grid(base.grid_size(), v.values().len())?;
    let values = exp_raw(base.values(), v.values());
    let in_orthant = values.iter().all(|&x| x > 0.0);
    Ok(SphereImage { values, in_orthant })
}

pub(crate) fn exp_raw(base: &[f64], v: &[f64]) -> Vec<f64> {
    let len = grid::norm(v);
    if len < SMALL_ANGLE {
        return base.to_vec();
    }
    let (s, c) = len.sin_cos();
    let mut out: Vec<f64> = base
        .iter()
        .zip(v)
        .map(|(b, x)| c * b + s * x / len)
        .collect();
    let norm = grid::norm(&out);
    out.iter_mut().for_each(|x| *x /= norm);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_has_constant_srt() {
        let psi = to_srt(&Warping::identity(33)).unwrap();
        assert!(psi.values().iter().all(|v| (v - 1.0).abs() < 1e-12));
    }

    #[test]
    fn square_warp_srt_closed_form() {
        let n = 1025;
        let g = Warping::from_fn(n, |t| t * t).unwrap();
        let psi = to_srt(&g).unwrap();
        for (t, v) in grid::nodes(n).iter().zip(psi.values()) {
            if *t > 0.02 {
                assert!((v - (2.0 * t).sqrt()).abs() < 1e-2, "t={t} v={v}");
            }
        }
    }

    #[test]
    fn srt_roundtrip() {
        let n = 1025;
        let g = Warping::from_fn(n, |t| t + 0.6 * t * (1.0 - t)).unwrap();
        let back = from_srt(&to_srt(&g).unwrap()).unwrap();
        assert!(back.sup_distance(&g) <= 1e-3);
        assert_eq!(back.values()[n - 1], 1.0);
    }

    #[test]
    fn phase_distance_basic_properties() {
        let a = Warping::from_fn(129, |t| t.powf(1.3)).unwrap();
        let b = Warping::from_fn(129, |t| t + 0.2 * t * (1.0 - t)).unwrap();
        assert_eq!(phase_distance(&a, &a).unwrap(), 0.0);
        assert_eq!(phase_distance(&a, &b).unwrap(), phase_distance(&b, &a).unwrap());
        assert!(phase_distance(&a, &b).unwrap() <= PI);
    }

    #[test]
    fn log_of_base_is_zero() {
        let base = to_srt(&Warping::from_fn(65, |t| t.powf(1.2)).unwrap()).unwrap();
        let v = inv_exp_map(&base, &base).unwrap();
        assert!(v.norm() < 1e-12);
        let back = exp_map(&base, &TangentVector::zero(base.clone())).unwrap();
        assert_eq!(back.values, base.values());
    }

    #[test]
    fn antipodal_is_rejected() {
        let a = vec![1.0; 9];
        let b = vec![-1.0; 9];
        assert!((arc(&a, &b) - PI).abs() < 1e-15);
        assert!(log_raw(&a, &b).is_err());
    }

    #[test]
    fn exp_of_large_step_can_leave_orthant() {
        let base = SrtPoint::identity(33);
        let raw: Vec<f64> = grid::nodes(33).iter().map(|t| 3.0 * (t - 0.5)).collect();
        let v = TangentVector::projected(raw, base.clone()).unwrap();
        let img = exp_map(&base, &v).unwrap();
        assert!(!img.in_orthant);
        assert!((grid::norm(&img.values) - 1.0).abs() < 1e-12);
        assert!(img.clone().into_srt().is_err());
        let curve = img.warp_curve();
        assert!(curve.windows(2).all(|w| w[1] >= w[0]));
    }
}
