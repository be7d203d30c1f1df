//! Spatial resampling on pixel-center-aligned grids.
//!
//! Pixel `(i, j)` of a grid with spacing `(sx, sy)` sits at the physical
//! coordinate `((i + 0.5) sx, (j + 0.5) sy)`. The output grid spans the same
//! physical extent as the input; lookups outside the source clamp to the edge.

use crate::error::{Error, Result};
use crate::grid::{BinaryMask, Geometry, ImageGrid, Spacing};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Interpolation {
    Nearest,
    Bilinear,
    /// Keys cubic convolution with `a = -0.5`.
    Cubic,
}

/// Either a physical pixel size or an explicit pixel count for the output grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ResampleTarget {
    Spacing(Spacing),
    Size { width: usize, height: usize },
}

/// Output geometry for a target. A spacing target keeps the requested spacing
/// and rounds the pixel count; a size target keeps the extent exactly.
pub fn target_geometry(src: Geometry, target: ResampleTarget) -> Result<Geometry> {
    match target {
        ResampleTarget::Spacing(s) => {
            if !(s.x > 0.0 && s.y > 0.0) {
                return Err(Error::InvalidRange(format!(
                    "target spacing must be positive, got ({}, {})",
                    s.x, s.y
                )));
            }
            let w = ((src.width as f64 * src.spacing.x) / s.x).round().max(1.0) as usize;
            let h = ((src.height as f64 * src.spacing.y) / s.y).round().max(1.0) as usize;
            Ok(Geometry {
                width: w,
                height: h,
                spacing: s,
            })
        }
        ResampleTarget::Size { width, height } => {
            if width == 0 || height == 0 {
                return Err(Error::InvalidRange(format!(
                    "target size must be positive, got {width}x{height}"
                )));
            }
            Ok(Geometry {
                width,
                height,
                spacing: Spacing {
                    x: src.width as f64 * src.spacing.x / width as f64,
                    y: src.height as f64 * src.spacing.y / height as f64,
                },
            })
        }
    }
}

/// Continuous source index for output pixel `i` along one axis.
#[inline]
pub(crate) fn source_coord(i: usize, out_spacing: f64, src_spacing: f64) -> f64 {
    if out_spacing == src_spacing {
        return i as f64;
    }
    (i as f64 + 0.5) * out_spacing / src_spacing - 0.5
}

#[inline]
fn keys_weight(t: f64) -> f64 {
    const A: f64 = -0.5;
    let t = t.abs();
    if t <= 1.0 {
        ((A + 2.0) * t - (A + 3.0)) * t * t + 1.0
    } else if t < 2.0 {
        ((A * t - 5.0 * A) * t + 8.0 * A) * t - 4.0 * A
    } else {
        0.0
    }
}

/// Samples `img` at the continuous index `(u, v)` (0 = first pixel center).
pub fn sample<T: Scalar>(img: &ImageGrid<T>, u: f64, v: f64, method: Interpolation) -> T {
    match method {
        Interpolation::Nearest => {
            img.get_clamped((u + 0.5).floor() as isize, (v + 0.5).floor() as isize)
        }
        Interpolation::Bilinear => {
            let x0 = u.floor();
            let y0 = v.floor();
            let fx = T::lit(u - x0);
            let fy = T::lit(v - y0);
            let (x0, y0) = (x0 as isize, y0 as isize);
            let p00 = img.get_clamped(x0, y0);
            let p10 = img.get_clamped(x0 + 1, y0);
            let p01 = img.get_clamped(x0, y0 + 1);
            let p11 = img.get_clamped(x0 + 1, y0 + 1);
            let one = T::one();
            let top = if fx == T::zero() { p00 } else { p00 * (one - fx) + p10 * fx };
            let bottom = if fx == T::zero() { p01 } else { p01 * (one - fx) + p11 * fx };
            if fy == T::zero() {
                top
            } else {
                top * (one - fy) + bottom * fy
            }
        }
        Interpolation::Cubic => {
            let x0 = u.floor();
            let y0 = v.floor();
            let (fx, fy) = (u - x0, v - y0);
            let (x0, y0) = (x0 as isize, y0 as isize);
            if fx == 0.0 && fy == 0.0 {
                return img.get_clamped(x0, y0);
            }
            let wx: [T; 4] = std::array::from_fn(|k| T::lit(keys_weight(fx - (k as f64 - 1.0))));
            let wy: [T; 4] = std::array::from_fn(|k| T::lit(keys_weight(fy - (k as f64 - 1.0))));
            let mut acc = T::zero();
            for (ky, &wyk) in wy.iter().enumerate() {
                let mut rowacc = T::zero();
                for (kx, &wxk) in wx.iter().enumerate() {
                    rowacc += wxk * img.get_clamped(x0 + kx as isize - 1, y0 + ky as isize - 1);
                }
                acc += wyk * rowacc;
            }
            acc
        }
    }
}

pub fn resample<T: Scalar>(
    img: &ImageGrid<T>,
    target: ResampleTarget,
    method: Interpolation,
) -> Result<ImageGrid<T>> {
    let src = img.geometry();
    let out = target_geometry(src, target)?;
    ImageGrid::from_fn(out.width, out.height, out.spacing, |i, j| {
        sample(
            img,
            source_coord(i, out.spacing.x, src.spacing.x),
            source_coord(j, out.spacing.y, src.spacing.y),
            method,
        )
    })
}

/// Nearest-neighbour resampling of a mask (the only method that keeps it binary).
pub fn resample_mask(mask: &BinaryMask, target: ResampleTarget) -> Result<BinaryMask> {
    let src = mask.geometry();
    let out = target_geometry(src, target)?;
    BinaryMask::from_fn(out.width, out.height, out.spacing, |i, j| {
        let u = source_coord(i, out.spacing.x, src.spacing.x);
        let v = source_coord(j, out.spacing.y, src.spacing.y);
        let x = ((u + 0.5).floor() as isize).clamp(0, src.width as isize - 1);
        let y = ((v + 0.5).floor() as isize).clamp(0, src.height as isize - 1);
        mask.is_set(x as usize, y as usize)
    })
}
