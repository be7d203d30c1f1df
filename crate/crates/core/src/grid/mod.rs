//! Image and mask representation, intensity transforms, resampling and ROI
//! discretization.

mod bspline;
mod discretize;
mod image;
mod intensity;
mod resample;
pub mod scin;

pub use bspline::{resample_bspline, BSplineImage};
pub use discretize::{discretize_roi, DiscretizedRoi, RoiEntry};
pub use image::{BinaryMask, Geometry, ImageGrid, Spacing};
pub use intensity::{clip_intensities, mean_and_sd, minmax_normalize, zscore_normalize};
pub use resample::{resample, resample_mask, sample, target_geometry, Interpolation, ResampleTarget};
