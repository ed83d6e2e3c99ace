//! Contour functions: the analytic benchmark part, triangle-mesh slicing,
//! external-contour extraction and Fourier contour models.

mod benchmark;
mod contour;
mod csv;
mod fourier;
mod mesh;
mod slice;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fda::SampledFunction;

pub use benchmark::{benchmark_contour, benchmark_point, BREAKPOINTS};
pub use contour::{
    arc_length_resample, canonical_loop, diameter, extract_external_contour,
    preprocess_polyline, self_intersects, signed_area,
};
pub use csv::{parse_contour_csv, read_contour_csv, write_contour_csv};
pub use fourier::{eval_fourier, fit_fourier, rms_residual, FourierContourModel, FourierPreset};
pub use mesh::{parse_stl, read_stl, regular_polygon, write_stl_ascii, write_stl_binary, TriangleMesh};
pub use slice::slice_mesh;

/// A planar point `[x, y]` in mm.
pub type Point = [f64; 2];

/// A closed loop of points; the first point is not repeated at the end.
pub type Polyline = Vec<Point>;

/// Closure tolerance on `|x(1) − x(0)|` and `|y(1) − y(0)|`, in mm.
pub const CLOSURE_TOL: f64 = 1e-9;

/// One layer's contour as two functions of `t ∈ [0, 1]` on a shared grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContourLayer {
    pub z: f64,
    pub x: SampledFunction,
    pub y: SampledFunction,
    pub closed: bool,
}

impl ContourLayer {
    pub fn new(z: f64, x: SampledFunction, y: SampledFunction, closed: bool) -> Result<Self> {
        if x.grid_size() != y.grid_size() {
            return Err(Error::GridMismatch {
                expected: x.grid_size(),
                got: y.grid_size(),
            });
        }
        if closed {
            let (xs, ys) = (x.values(), y.values());
            let n = xs.len();
            if (xs[n - 1] - xs[0]).abs() > CLOSURE_TOL || (ys[n - 1] - ys[0]).abs() > CLOSURE_TOL {
                return Err(Error::DegenerateContour(format!(
                    "closed contour ends at ({}, {}) but starts at ({}, {})",
                    xs[n - 1], ys[n - 1], xs[0], ys[0]
                )));
            }
        }
        Ok(Self { z, x, y, closed })
    }

    /// Builds a layer from raw coordinate vectors.
    pub fn from_xy(z: f64, x: Vec<f64>, y: Vec<f64>, closed: bool) -> Result<Self> {
        Self::new(z, SampledFunction::new(x)?, SampledFunction::new(y)?, closed)
    }

    pub fn grid_size(&self) -> usize {
        self.x.grid_size()
    }

    pub fn points(&self) -> Vec<Point> {
        self.x
            .values()
            .iter()
            .zip(self.y.values())
            .map(|(&x, &y)| [x, y])
            .collect()
    }
}
