//! Pixel-wise intensity transforms.

use crate::error::{Error, Result};
use crate::grid::ImageGrid;
use crate::scalar::Scalar;

/// Clamps every pixel into `[lo, hi]`.
pub fn clip_intensities<T: Scalar>(img: &ImageGrid<T>, lo: T, hi: T) -> Result<ImageGrid<T>> {
    if !(lo < hi) {
        return Err(Error::InvalidRange(format!(
            "clip bounds require lo < hi, got ({lo}, {hi})"
        )));
    }
    Ok(img.with_pixels(img.pixels().iter().map(|&v| v.max(lo).min(hi)).collect()))
}

/// Affine map of the pixel range onto `[0, 1]`.
pub fn minmax_normalize<T: Scalar>(img: &ImageGrid<T>) -> Result<ImageGrid<T>> {
    let (lo, hi) = img.min_max();
    let range = hi - lo;
    if !(range > T::zero()) {
        return Err(Error::DegenerateRange(
            "min-max normalization of a constant image".into(),
        ));
    }
    Ok(img.with_pixels(
        img.pixels()
            .iter()
            .map(|&v| ((v - lo) / range).max(T::zero()).min(T::one()))
            .collect(),
    ))
}

/// Population mean and standard deviation (divisor N), two-pass.
pub fn mean_and_sd<T: Scalar>(values: &[T]) -> (T, T) {
    let n = T::from_count(values.len());
    let mean = values.iter().copied().sum::<T>() / n;
    let var = values
        .iter()
        .map(|&v| {
            let d = v - mean;
            d * d
        })
        .sum::<T>()
        / n;
    (mean, var.sqrt())
}

/// Standardizes the whole image to zero mean and unit population standard deviation.
pub fn zscore_normalize<T: Scalar>(img: &ImageGrid<T>) -> Result<ImageGrid<T>> {
    let (mean, sd) = mean_and_sd(img.pixels());
    if !(sd > T::zero()) {
        return Err(Error::DegenerateRange(
            "z-score normalization of a zero-variance image".into(),
        ));
    }
    Ok(img.with_pixels(img.pixels().iter().map(|&v| (v - mean) / sd).collect()))
}
