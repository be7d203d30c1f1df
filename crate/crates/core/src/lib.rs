//! Thyroid scintigraphy radiomics: image preprocessing, segmentation
//! evaluation, 93-feature extraction, boosted-tree classification and
//! leave-one-center-out evaluation on a synthetic multi-center phantom.

pub mod augment;
pub mod features;
pub mod error;
pub mod fsutil;
pub mod gbdt;
pub mod grid;
pub mod label;
pub mod lococv;
pub mod metrics;
pub mod phantom;
pub mod radiomics;
pub mod rng;
pub mod scalar;
pub mod seg_eval;

pub use error::{Error, Result};
pub use label::Label;
pub use scalar::Scalar;

/// Double-precision image, the default for every pipeline stage.
pub type Image = grid::ImageGrid<f64>;
/// Single-precision image.
pub type ImageF32 = grid::ImageGrid<f32>;
pub type FeatureVec = radiomics::FeatureVector<f64>;
pub type ProbMap = seg_eval::ProbabilityMap<f64>;
