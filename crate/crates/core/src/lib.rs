//! Outlier detection for layer contours of additively manufactured parts.
//!
//! Each layer contour is a pair of functions `x(t)`, `y(t)` on `[0, 1]`. Every
//! coordinate stream is decomposed into a translation scalar, an amplitude
//! component (square-root slope functions aligned by dynamic programming) and
//! a phase component (the optimal warping functions, analysed on the unit
//! Hilbert sphere through their square-root transforms). A boxplot is built in
//! each component space and samples beyond the cutoffs are reported.
//!
//! Modules:
//!
//! - [`fda`]: function representations, SRSF/SRT transforms, distances,
//!   dynamic-programming alignment and Karcher medians.
//! - [`boxplot`]: translation, amplitude and phase boxplots and the combined
//!   outlier report.
//! - [`geometry`]: the analytic benchmark contour, STL slicing, contour
//!   extraction and Fourier contour models.
//! - [`simulate`]: seeded Monte Carlo deformation scenarios.
//! - [`cli`]: file formats, SVG rendering and the command implementations
//!   behind the `ecm` binary.

pub mod boxplot;
pub mod cli;
pub mod error;
pub mod fda;
pub mod geometry;
pub mod simulate;

pub use error::{Error, Result};
