//! The 93-feature radiomics set over a fixed-bin-width discretized ROI.

mod first_order;
mod glcm;
mod gldm;
mod glrlm;
mod glszm;
mod matrix;
pub mod names;
mod ngtdm;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{
    discretize_roi, resample, resample_bspline, resample_mask, zscore_normalize, BinaryMask, ImageGrid,
    Interpolation, ResampleTarget, Spacing,
};
use crate::scalar::Scalar;

pub use first_order::first_order_features;
pub use glcm::{compute_glcm, glcm_features};
pub use gldm::{compute_gldm, gldm_features};
pub use glrlm::{compute_glrlm, glrlm_features};
pub use glszm::{compute_glszm, glszm_features};
pub use matrix::{MatrixKind, TextureMatrix};
pub use names::{canonical_names, Family, FEATURE_COUNT};
pub use ngtdm::{compute_ngtdm, ngtdm_features};

/// Family-local feature names paired with values, in canonical order.
pub type Named<T> = Vec<(&'static str, T)>;

/// Side length every input image is brought to before anything else.
pub const WORKING_SIZE: usize = 128;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExtractionConfig {
    pub bin_width: f64,
    pub glcm_distance: usize,
    pub directions: Vec<(i32, i32)>,
    pub coarseness_cap: f64,
}

impl Default for ExtractionConfig {
    fn default() -> Self {
        Self {
            bin_width: 0.3,
            glcm_distance: 1,
            directions: vec![(1, 0), (0, 1), (1, 1), (1, -1)],
            coarseness_cap: 1e6,
        }
    }
}

impl ExtractionConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.bin_width > 0.0 && self.bin_width.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "bin_width must be positive, got {}",
                self.bin_width
            )));
        }
        if self.glcm_distance < 1 {
            return Err(Error::InvalidArgument("glcm_distance must be at least 1".into()));
        }
        if self.directions.is_empty() || self.directions.contains(&(0, 0)) {
            return Err(Error::InvalidArgument(
                "directions must be a nonempty list of nonzero offsets".into(),
            ));
        }
        if !(self.coarseness_cap > 0.0) {
            return Err(Error::InvalidArgument("coarseness_cap must be positive".into()));
        }
        Ok(())
    }
}

/// 93 feature values for one case, in `canonical_names()` order.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector<T> {
    pub case_id: String,
    pub values: Vec<T>,
}

impl<T: Scalar> FeatureVector<T> {
    pub fn names(&self) -> &'static [String] {
        canonical_names()
    }

    pub fn get(&self, name: &str) -> Option<T> {
        canonical_names()
            .iter()
            .position(|n| n == name)
            .map(|i| self.values[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = (&'static str, T)> + '_ {
        canonical_names()
            .iter()
            .map(String::as_str)
            .zip(self.values.iter().copied())
    }
}

fn tag<T>(family: Family, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        e @ Error::DegenerateMatrix { .. } => e,
        other => Error::DegenerateMatrix {
            family: family.prefix(),
            reason: other.to_string(),
        },
    })
}

/// Every family over one preprocessed image/mask pair.
pub fn extract_all<T: Scalar>(
    case_id: &str,
    img: &ImageGrid<T>,
    mask: &BinaryMask,
    cfg: &ExtractionConfig,
) -> Result<FeatureVector<T>> {
    let wrap = |e: Error| Error::Extraction {
        case_id: case_id.to_string(),
        reason: e.to_string(),
    };
    cfg.validate().map_err(wrap)?;
    let droi = discretize_roi(img, mask, cfg.bin_width).map_err(wrap)?;
    let np = droi.len();

    let mut values = Vec::with_capacity(FEATURE_COUNT);
    let mut push = |named: Named<T>| values.extend(named.into_iter().map(|(_, v)| v));
    push(tag(Family::FirstOrder, first_order_features(img, mask, cfg)).map_err(wrap)?);
    push(
        compute_glcm(&droi, cfg)
            .and_then(|m| glcm_features(&m))
            .map_err(wrap)?,
    );
    push(
        tag(Family::Gldm, compute_gldm(&droi).and_then(|m| gldm_features(&m, np))).map_err(wrap)?,
    );
    push(
        tag(Family::Glrlm, compute_glrlm(&droi, cfg).and_then(|m| glrlm_features(&m, np)))
            .map_err(wrap)?,
    );
    push(
        tag(Family::Glszm, compute_glszm(&droi).and_then(|m| glszm_features(&m, np)))
            .map_err(wrap)?,
    );
    push(
        compute_ngtdm(&droi)
            .and_then(|m| ngtdm_features(&m, cfg))
            .map_err(wrap)?,
    );
    debug_assert_eq!(values.len(), FEATURE_COUNT);
    if let Some(i) = values.iter().position(|v| !v.is_finite()) {
        return Err(wrap(Error::Undefined(format!(
            "{} is not finite",
            canonical_names()[i]
        ))));
    }
    Ok(FeatureVector {
        case_id: case_id.to_string(),
        values,
    })
}

/// Brings a raw acquisition into the space features are computed in:
/// nearest-neighbour resize to 128x128 when needed, whole-image z-score,
/// then cubic B-spline resampling of the image (nearest for the mask) to 1 mm
/// pixels.
pub fn preprocess_case<T: Scalar>(
    img: &ImageGrid<T>,
    mask: &BinaryMask,
) -> Result<(ImageGrid<T>, BinaryMask)> {
    img.geometry().ensure_same(&mask.geometry(), "image/mask")?;
    let (img, mask) = if img.width() != WORKING_SIZE || img.height() != WORKING_SIZE {
        let target = ResampleTarget::Size {
            width: WORKING_SIZE,
            height: WORKING_SIZE,
        };
        (
            resample(img, target, Interpolation::Nearest)?,
            resample_mask(mask, target)?,
        )
    } else {
        (img.clone(), mask.clone())
    };
    let z = zscore_normalize(&img)?;
    let target = ResampleTarget::Spacing(Spacing::isotropic(1.0));
    Ok((
        resample_bspline(&z, target)?,
        resample_mask(&mask, target)?,
    ))
}
