//! The SRSF map, its inverse, and the action of warpings on functions and
//! on SRSFs.

use super::grid;
use super::types::{check_same_grid, SampledFunction, Srsf, Warping};
use crate::error::{Error, Result};

/// `q = sign(ḟ) √|ḟ|` with `ḟ` from [`grid::derivative`].
pub fn to_srsf(f: &SampledFunction) -> Result<Srsf> {
    let d = grid::derivative(f.values());
    if let Some(i) = d.iter().position(|v| !v.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "derivative estimate is not finite at index {i}"
        )));
    }
    Srsf::new(d.into_iter().map(signed_sqrt).collect())
}

fn signed_sqrt(v: f64) -> f64 {
    if v == 0.0 {
        0.0
    } else {
        v.signum() * v.abs().sqrt()
    }
}

/// `f(t) = f0 + ∫₀ᵗ q |q| ds` by cumulative trapezoid.
pub fn from_srsf(q: &Srsf, f0: f64) -> Result<SampledFunction> {
    let slope: Vec<f64> = q.values().iter().map(|v| v * v.abs()).collect();
    SampledFunction::new(grid::cumulative(&slope, f0))
}

/// `f ∘ γ` by linear interpolation of `f` at the warped nodes.
pub fn apply_warp(f: &SampledFunction, gamma: &Warping) -> Result<SampledFunction> {
    check_same_grid(f.grid_size(), gamma.grid_size())?;
    SampledFunction::new(warp_values(f.values(), gamma.values()))
}

/// `(q ∘ γ) √γ̇`, the isometric action of a warping on an SRSF.
pub fn group_action(q: &Srsf, gamma: &Warping) -> Result<Srsf> {
    check_same_grid(q.grid_size(), gamma.grid_size())?;
    Srsf::new(act(q.values(), gamma.values()))
}

fn is_identity(gamma: &[f64]) -> bool {
    let denom = (gamma.len() - 1) as f64;
    gamma.iter().enumerate().all(|(i, &g)| g == i as f64 / denom)
}

pub(crate) fn warp_values(f: &[f64], gamma: &[f64]) -> Vec<f64> {
    gamma.iter().map(|&g| grid::interpolate(f, g)).collect()
}

pub(crate) fn act(q: &[f64], gamma: &[f64]) -> Vec<f64> {
    if is_identity(gamma) {
        return q.to_vec();
    }
    let dg = grid::derivative(gamma);
    gamma
        .iter()
        .zip(dg)
        .map(|(&g, d)| grid::interpolate(q, g) * d.max(0.0).sqrt())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn linear_and_constant() {
        let f = SampledFunction::from_fn(33, |t| t).unwrap();
        let q = to_srsf(&f).unwrap();
        assert!(q.values().iter().all(|v| (v - 1.0).abs() < 1e-12));
        let c = SampledFunction::from_fn(33, |_| 4.2).unwrap();
        assert!(to_srsf(&c).unwrap().values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn square_has_closed_form_srsf() {
        let f = SampledFunction::from_fn(1025, |t| t * t).unwrap();
        let q = to_srsf(&f).unwrap();
        for (t, v) in grid::nodes(1025).iter().zip(q.values()) {
            if *t > 0.01 {
                assert!((v - (2.0 * t).sqrt()).abs() < 1e-2, "t={t}");
            }
        }
    }

    #[test]
    fn inverse_map() {
        let zero = Srsf::new(vec![0.0; 17]).unwrap();
        let f = from_srsf(&zero, 5.0).unwrap();
        assert!(f.values().iter().all(|&v| v == 5.0));
        let one = Srsf::new(vec![1.0; 17]).unwrap();
        let f = from_srsf(&one, 0.0).unwrap();
        for (t, v) in grid::nodes(17).iter().zip(f.values()) {
            assert!((t - v).abs() < 1e-10);
        }
    }

    #[test]
    fn roundtrip_sine() {
        let f = SampledFunction::from_fn(1025, |t| (2.0 * PI * t).sin()).unwrap();
        let back = from_srsf(&to_srsf(&f).unwrap(), f.values()[0]).unwrap();
        let err = f
            .values()
            .iter()
            .zip(back.values())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(err <= 1e-3, "err={err}");
    }

    #[test]
    fn identity_warp_is_exact() {
        let f = SampledFunction::from_fn(101, |t| (5.0 * t).cos()).unwrap();
        let id = Warping::identity(101);
        assert_eq!(apply_warp(&f, &id).unwrap(), f);
        let q = to_srsf(&f).unwrap();
        let acted = group_action(&q, &id).unwrap();
        for (a, b) in acted.values().iter().zip(q.values()) {
            assert!((a - b).abs() <= 1e-10);
        }
    }

    #[test]
    fn warp_and_unwarp() {
        let n = 513;
        let f = SampledFunction::from_fn(n, |t| (3.0 * t).sin() + t).unwrap();
        let g = Warping::from_fn(n, |t| t + 0.4 * t * (1.0 - t)).unwrap();
        let back = apply_warp(&apply_warp(&f, &g).unwrap(), &g.inverse()).unwrap();
        for (a, b) in back.values().iter().zip(f.values()) {
            assert!((a - b).abs() < 1e-4);
        }
    }

    #[test]
    fn composition_with_square_warp() {
        let n = 257;
        let f = SampledFunction::from_fn(n, |t| t).unwrap();
        let g = Warping::from_fn(n, |t| t * t).unwrap();
        let out = apply_warp(&f, &g).unwrap();
        for (t, v) in grid::nodes(n).iter().zip(out.values()) {
            assert!((v - t * t).abs() < 1e-4);
        }
    }

    #[test]
    fn group_action_preserves_norm() {
        let n = 1025;
        let q = Srsf::from_fn(n, |t| (4.0 * t).sin() + 0.5).unwrap();
        let g = Warping::from_fn(n, |t| t + 0.5 * t * (1.0 - t)).unwrap();
        let acted = group_action(&q, &g).unwrap();
        assert!((acted.norm() - q.norm()).abs() < 1e-3);
    }

    #[test]
    fn group_action_matches_srsf_of_warped_function() {
        let n = 1025;
        let f = SampledFunction::from_fn(n, |t| (3.0 * t).sin() + 2.0 * t).unwrap();
        let g = Warping::from_fn(n, |t| t + 0.3 * t * (1.0 - t)).unwrap();
        let a = group_action(&to_srsf(&f).unwrap(), &g).unwrap();
        let b = to_srsf(&apply_warp(&f, &g).unwrap()).unwrap();
        assert!(a.l2_distance(&b) < 1e-3);
    }

    #[test]
    fn translation_invariance_exact_for_representable_shift() {
        let f = SampledFunction::new((0..64).map(|i| (i * i) as f64 / 64.0).collect()).unwrap();
        let q1 = to_srsf(&f).unwrap();
        let q2 = to_srsf(&f.shifted(8.0).unwrap()).unwrap();
        assert_eq!(q1, q2);
    }
}
