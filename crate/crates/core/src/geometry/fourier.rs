//! Real Fourier series models of closed contours,
//! `x(t) = a₀ + Σₖ aₖ cos(2πkt) + bₖ sin(2πkt)` and likewise `y` with
//! `c₀, cₖ, dₖ`.

use std::f64::consts::TAU;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::contour::{arc_length_resample, canonical_loop};
use super::{ContourLayer, Point};
use crate::error::{Error, Result};
use crate::fda::grid;

/// Ridge added to the diagonal of the normal equations.
pub const RIDGE: f64 = 1e-12;

/// Fitted coefficients of both coordinate series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FourierContourModel {
    /// Number of harmonics.
    #[serde(rename = "K")]
    pub k: usize,
    pub a0: f64,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub c0: f64,
    pub c: Vec<f64>,
    pub d: Vec<f64>,
    /// Height of the layer the model was fitted to.
    #[serde(default)]
    pub z: f64,
}

fn series(c0: f64, cos: &[f64], sin: &[f64], t: f64) -> f64 {
    let s = t.rem_euclid(1.0);
    let mut acc = c0;
    for (k, (ck, sk)) in cos.iter().zip(sin).enumerate() {
        let (sn, cs) = (TAU * (k + 1) as f64 * s).sin_cos();
        acc += ck * cs + sk * sn;
    }
    acc
}

impl FourierContourModel {
    /// Checks that every coefficient vector has length `K`.
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("a", &self.a), ("b", &self.b), ("c", &self.c), ("d", &self.d)] {
            if v.len() != self.k {
                return Err(Error::Fit(format!(
                    "coefficient vector `{name}` has {} entries, expected K = {}",
                    v.len(),
                    self.k
                )));
            }
        }
        Ok(())
    }

    /// The point at parameter `t`; the period is 1.
    pub fn point(&self, t: f64) -> Point {
        [series(self.a0, &self.a, &self.b, t), series(self.c0, &self.c, &self.d, t)]
    }

    /// `y(t)` alone.
    pub fn y_at(&self, t: f64) -> f64 {
        series(self.c0, &self.c, &self.d, t)
    }
}

fn fit_series(t: &[f64], v: &[f64], k: usize) -> Result<(f64, Vec<f64>, Vec<f64>)> {
    let m = t.len();
    let p = 2 * k + 1;
    let design = DMatrix::from_fn(m, p, |i, j| {
        if j == 0 {
            1.0
        } else {
            let h = (j + 1) / 2;
            let arg = TAU * h as f64 * t[i];
            if j % 2 == 1 {
                arg.cos()
            } else {
                arg.sin()
            }
        }
    });
    let gram = design.transpose() * &design + DMatrix::identity(p, p) * RIDGE;
    let rhs = design.transpose() * DVector::from_column_slice(v);
    let chol = gram
        .cholesky()
        .ok_or_else(|| Error::Fit(format!("normal equations for K = {k} are not positive definite")))?;
    let coef = chol.solve(&rhs);
    let cos = (0..k).map(|i| coef[2 * i + 1]).collect();
    let sin = (0..k).map(|i| coef[2 * i + 2]).collect();
    Ok((coef[0], cos, sin))
}

fn distinct_samples(contour: &ContourLayer) -> usize {
    let n = contour.grid_size();
    if contour.closed {
        n - 1
    } else {
        n
    }
}

/// Least-squares fit of `K` harmonics to each coordinate of a closed
/// contour. The repeated end point of the closed grid is left out.
pub fn fit_fourier(contour: &ContourLayer, k: usize) -> Result<FourierContourModel> {
    if !contour.closed {
        return Err(Error::Fit("Fourier fitting needs a closed contour".into()));
    }
    let m = distinct_samples(contour);
    if m <= 2 * k + 1 {
        return Err(Error::Fit(format!(
            "{} grid points cannot determine {} coefficients (K = {k})",
            contour.grid_size(),
            2 * k + 1
        )));
    }
    let t = &grid::nodes(contour.grid_size())[..m];
    let (a0, a, b) = fit_series(t, &contour.x.values()[..m], k)?;
    let (c0, c, d) = fit_series(t, &contour.y.values()[..m], k)?;
    Ok(FourierContourModel { k, a0, a, b, c0, c, d, z: contour.z })
}

/// Evaluates the model on an `n`-point grid.
pub fn eval_fourier(model: &FourierContourModel, n: usize) -> Result<ContourLayer> {
    model.validate()?;
    let (x, y): (Vec<f64>, Vec<f64>) = grid::nodes(n).into_iter().map(|t| {
        let [x, y] = model.point(t);
        (x, y)
    }).unzip();
    ContourLayer::from_xy(model.z, x, y, true)
}

/// Root mean square of the pointwise Euclidean residual on the contour's
/// distinct grid points.
pub fn rms_residual(model: &FourierContourModel, contour: &ContourLayer) -> f64 {
    let m = distinct_samples(contour);
    let t = grid::nodes(contour.grid_size());
    let (xs, ys) = (contour.x.values(), contour.y.values());
    let ss: f64 = (0..m)
        .map(|i| {
            let [x, y] = model.point(t[i]);
            (x - xs[i]).powi(2) + (y - ys[i]).powi(2)
        })
        .sum();
    (ss / m as f64).sqrt()
}

/// Named part types with their basis sizes, and synthetic stand-in outlines
/// of the same kind for runs without a fitted model file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FourierPreset {
    Gear,
    Wheel,
    Logo,
    Tube,
}

impl FourierPreset {
    pub const ALL: [FourierPreset; 4] = [Self::Gear, Self::Wheel, Self::Logo, Self::Tube];

    pub fn name(self) -> &'static str {
        match self {
            Self::Gear => "gear",
            Self::Wheel => "wheel",
            Self::Logo => "logo",
            Self::Tube => "tube",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|p| p.name() == name)
    }

    /// Number of basis functions, `2K + 1`.
    pub fn basis_count(self) -> usize {
        match self {
            Self::Gear => 81,
            Self::Wheel => 149,
            Self::Logo => 21,
            Self::Tube => 51,
        }
    }

    /// Harmonic count `K`.
    pub fn harmonics(self) -> usize {
        (self.basis_count() - 1) / 2
    }

    fn radius(self, a: f64) -> f64 {
        match self {
            Self::Gear => 30.0 + 2.5 * (3.0 * (20.0 * a).sin()).tanh() / 3f64.tanh(),
            Self::Wheel => 40.0 + 1.2 * (12.0 * a).cos(),
            Self::Logo => 25.0 * (1.0 + 0.3 * (3.0 * a).cos() + 0.1 * (5.0 * a).sin()),
            Self::Tube => 10.0 + 0.3 * (2.0 * a).cos(),
        }
    }

    /// Synthetic outline in mm, in canonical position, resampled by arc
    /// length on an `n`-point grid.
    pub fn stand_in_contour(self, n: usize) -> Result<ContourLayer> {
        let poly: Vec<Point> = (0..4096)
            .map(|i| {
                let a = TAU * i as f64 / 4096.0;
                let r = self.radius(a);
                [r * a.cos(), r * a.sin()]
            })
            .collect();
        let (x, y) = arc_length_resample(&canonical_loop(&poly), n)?;
        ContourLayer::from_xy(0.0, x, y, true)
    }

    /// The stand-in outline fitted with this preset's harmonic count.
    pub fn stand_in_model(self) -> Result<FourierContourModel> {
        fit_fourier(&self.stand_in_contour(1024)?, self.harmonics())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn circle(n: usize, r: f64) -> ContourLayer {
        let t = grid::nodes(n);
        let x: Vec<f64> = t.iter().map(|t| 1.0 + r * (TAU * t).cos()).collect();
        let mut y: Vec<f64> = t.iter().map(|t| r * (TAU * t).sin()).collect();
        y[n - 1] = y[0];
        let mut x = x;
        x[n - 1] = x[0];
        ContourLayer::from_xy(0.0, x, y, true).unwrap()
    }

    #[test]
    fn circle_is_one_harmonic() {
        let c = circle(200, 2.0);
        let m = fit_fourier(&c, 1).unwrap();
        let back = eval_fourier(&m, 200).unwrap();
        for (a, b) in back.points().iter().zip(c.points()) {
            assert!((a[0] - b[0]).abs() <= 1e-9 && (a[1] - b[1]).abs() <= 1e-9);
        }
    }

    #[test]
    fn periodic_endpoints_agree() {
        let m = FourierPreset::Logo.stand_in_model().unwrap();
        assert_eq!(m.point(0.0), m.point(1.0));
    }

    #[test]
    fn ellipse_coefficients() {
        let m = FourierContourModel {
            k: 1,
            a0: 0.5,
            a: vec![3.0],
            b: vec![0.0],
            c0: -1.0,
            c: vec![0.0],
            d: vec![2.0],
            z: 0.0,
        };
        let e = eval_fourier(&m, 101).unwrap();
        for (i, t) in grid::nodes(101).iter().enumerate() {
            assert!((e.x.values()[i] - (0.5 + 3.0 * (TAU * t).cos())).abs() < 1e-10);
            assert!((e.y.values()[i] - (-1.0 + 2.0 * (TAU * t).sin())).abs() < 1e-10);
        }
    }

    #[test]
    fn too_many_harmonics() {
        let c = circle(20, 1.0);
        assert!(fit_fourier(&c, 9).is_err());
        assert!(fit_fourier(&c, 8).is_ok());
    }

    #[test]
    fn preset_sizes() {
        let k: Vec<usize> = FourierPreset::ALL.iter().map(|p| p.harmonics()).collect();
        assert_eq!(k, vec![40, 74, 10, 25]);
    }
}
