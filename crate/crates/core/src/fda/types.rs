//! Domain types. Every type owns its samples on a uniform grid over `[0, 1]`
//! and checks its invariants on construction.

use serde::{Deserialize, Serialize};

use super::grid;
use crate::error::{Error, Result};

/// Smallest grid any representation accepts.
pub const MIN_GRID: usize = 3;

/// Tolerance on the unit norm of SRT points.
pub const SPHERE_TOL: f64 = 1e-8;

fn check_grid(values: &[f64], what: &str) -> Result<()> {
    if values.len() < MIN_GRID {
        return Err(Error::InvalidInput(format!(
            "{what} needs at least {MIN_GRID} samples, got {}",
            values.len()
        )));
    }
    if let Some(i) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "{what} has a non-finite sample at index {i}"
        )));
    }
    Ok(())
}

pub(crate) fn check_same_grid(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::GridMismatch { expected: a, got: b });
    }
    Ok(())
}

/// A real function on `[0, 1]` sampled on a uniform grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledFunction {
    values: Vec<f64>,
}

impl SampledFunction {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        check_grid(&values, "sampled function")?;
        Ok(Self { values })
    }

    /// Samples `f` at the nodes of an `n`-point grid.
    pub fn from_fn(n: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(grid::nodes(n).into_iter().map(f).collect())
    }

    pub fn grid_size(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Adds a constant to every sample.
    pub fn shifted(&self, c: f64) -> Result<Self> {
        Self::new(self.values.iter().map(|v| v + c).collect())
    }

    /// Linear resampling onto an `n`-point grid.
    pub fn resampled(&self, n: usize) -> Result<Self> {
        Self::new(grid::resample(&self.values, n))
    }
}

/// Square-root slope function `q = sign(ḟ) √|ḟ|`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Srsf {
    values: Vec<f64>,
}

impl Srsf {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        check_grid(&values, "SRSF")?;
        Ok(Self { values })
    }

    pub fn from_fn(n: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(grid::nodes(n).into_iter().map(f).collect())
    }

    pub fn grid_size(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn norm(&self) -> f64 {
        grid::norm(&self.values)
    }

    /// L² distance without any alignment.
    pub fn l2_distance(&self, other: &Srsf) -> f64 {
        grid::distance(&self.values, &other.values)
    }
}

/// A warping function: `γ(0) = 0`, `γ(1) = 1`, strictly increasing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Warping {
    values: Vec<f64>,
}

impl Warping {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        check_grid(&values, "warping")?;
        let n = values.len();
        if values[0] != 0.0 || values[n - 1] != 1.0 {
            return Err(Error::InvalidInput(format!(
                "warping must satisfy γ(0)=0 and γ(1)=1, got {} and {}",
                values[0],
                values[n - 1]
            )));
        }
        if let Some(i) = values.windows(2).position(|w| w[1] <= w[0]) {
            return Err(Error::InvalidInput(format!(
                "warping is not strictly increasing at index {i}"
            )));
        }
        Ok(Self { values })
    }

    /// Samples `g` on the grid and pins the endpoints to exactly 0 and 1.
    pub fn from_fn(n: usize, g: impl Fn(f64) -> f64) -> Result<Self> {
        let mut values: Vec<f64> = grid::nodes(n).into_iter().map(g).collect();
        values[0] = 0.0;
        values[n - 1] = 1.0;
        Self::new(values)
    }

    pub fn identity(n: usize) -> Self {
        Self {
            values: grid::nodes(n),
        }
    }

    pub fn grid_size(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// `self ∘ inner`, evaluated by linear interpolation of `self`.
    pub fn compose(&self, inner: &Warping) -> Result<Warping> {
        check_same_grid(self.grid_size(), inner.grid_size())?;
        let values = inner
            .values
            .iter()
            .map(|&t| grid::interpolate(&self.values, t))
            .collect();
        Warping::new(values)
    }

    /// The piecewise-linear inverse sampled back on the grid.
    pub fn inverse(&self) -> Warping {
        let t = grid::nodes(self.grid_size());
        let mut values: Vec<f64> = t
            .iter()
            .map(|&s| grid::interpolate_xy(&self.values, &t, s))
            .collect();
        let n = values.len();
        values[0] = 0.0;
        values[n - 1] = 1.0;
        Warping { values }
    }

    /// Sup-norm distance to another warping.
    pub fn sup_distance(&self, other: &Warping) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Square-root transform `ψ = √γ̇` of a warping: a point on the positive
/// orthant of the unit sphere in L².
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SrtPoint {
    values: Vec<f64>,
}

impl SrtPoint {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        check_grid(&values, "SRT point")?;
        if let Some(i) = values.iter().position(|&v| v <= 0.0) {
            return Err(Error::InvalidInput(format!(
                "SRT point leaves the positive orthant at index {i}"
            )));
        }
        let norm = grid::norm(&values);
        if (norm - 1.0).abs() > SPHERE_TOL {
            return Err(Error::InvalidInput(format!(
                "SRT point must have unit norm, got {norm}"
            )));
        }
        Ok(Self { values })
    }

    /// Scales positive samples onto the unit sphere.
    pub fn normalized(mut values: Vec<f64>) -> Result<Self> {
        check_grid(&values, "SRT point")?;
        let norm = grid::norm(&values);
        if norm <= 0.0 {
            return Err(Error::InvalidInput("SRT point has zero norm".into()));
        }
        values.iter_mut().for_each(|v| *v /= norm);
        Self::new(values)
    }

    /// The SRT of the identity warping: `ψ ≡ 1`.
    pub fn identity(n: usize) -> Self {
        Self {
            values: vec![1.0; n],
        }
    }

    pub fn grid_size(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub(crate) fn from_unit_unchecked(values: Vec<f64>) -> Self {
        Self { values }
    }
}

/// A vector in the tangent space of the sphere at `base`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TangentVector {
    values: Vec<f64>,
    base: SrtPoint,
}

impl TangentVector {
    /// Tolerance on `⟨ν, base⟩`.
    pub const TOL: f64 = 1e-8;

    pub fn new(values: Vec<f64>, base: SrtPoint) -> Result<Self> {
        check_grid(&values, "tangent vector")?;
        check_same_grid(base.grid_size(), values.len())?;
        let ip = grid::inner(&values, base.values());
        if ip.abs() > Self::TOL {
            return Err(Error::InvalidInput(format!(
                "vector is not tangent at the base point: ⟨ν, ψ⟩ = {ip}"
            )));
        }
        Ok(Self { values, base })
    }

    /// Projects arbitrary samples onto the tangent space at `base`.
    pub fn projected(mut values: Vec<f64>, base: SrtPoint) -> Result<Self> {
        check_grid(&values, "tangent vector")?;
        check_same_grid(base.grid_size(), values.len())?;
        let ip = grid::inner(&values, base.values());
        for (v, b) in values.iter_mut().zip(base.values()) {
            *v -= ip * b;
        }
        Self::new(values, base)
    }

    pub fn zero(base: SrtPoint) -> Self {
        Self {
            values: vec![0.0; base.grid_size()],
            base,
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn base(&self) -> &SrtPoint {
        &self.base
    }

    pub fn norm(&self) -> f64 {
        grid::norm(&self.values)
    }
}
