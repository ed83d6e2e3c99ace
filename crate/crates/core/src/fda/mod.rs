//! Elastic functional data analysis on `[0, 1]`.

mod align;
pub mod dp;
pub mod grid;
mod median;
mod sphere;
mod srsf;
mod types;

pub use align::{align_sample, mean_warping, AlignedSample};
pub use dp::{amplitude_distance, lattice_alignment, Alignment};
pub use median::{
    karcher_mean, karcher_median_amplitude, karcher_median_phase, AmplitudeMedian, MedianInit,
    MedianOptions, PhaseMedian,
};
pub use sphere::{
    exp_map, from_srt, integrate_square, inv_exp_map, phase_distance, srt_distance, to_srt,
    SphereImage,
};
pub use srsf::{apply_warp, from_srsf, group_action, to_srsf};
pub use types::{SampledFunction, Srsf, SrtPoint, TangentVector, Warping, MIN_GRID};
