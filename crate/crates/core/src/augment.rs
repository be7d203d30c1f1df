//! Seeded training-time augmentation: class-balanced patch cropping and
//! random affine perturbation.

use std::f64::consts::PI;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{sample, BinaryMask, ImageGrid, Interpolation};
use crate::rng::{hash_str, keyed_rng};
use crate::scalar::Scalar;

const PATCH_STREAM: u64 = 0x5041_5443;
const AFFINE_STREAM: u64 = 0x4146_4649;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AugmentConfig {
    pub patch_size: usize,
    pub fg_center_prob: f64,
    /// Maximum absolute translation per axis, pixels.
    pub translation_range: f64,
    /// Maximum absolute rotation, radians.
    pub rotation_range: f64,
    /// Scale is drawn from `[1 / scale_limit, scale_limit]`.
    pub scale_limit: f64,
    pub seed: u64,
    /// Extra stream key, usually a hash of the case id.
    #[serde(default)]
    pub case_key: u64,
}

impl Default for AugmentConfig {
    fn default() -> Self {
        Self {
            patch_size: 64,
            fg_center_prob: 2.0 / 3.0,
            translation_range: 5.0,
            rotation_range: PI / 12.0,
            scale_limit: 1.1,
            seed: 0,
            case_key: 0,
        }
    }
}

impl AugmentConfig {
    pub fn for_case(&self, case_id: &str) -> Self {
        Self {
            case_key: hash_str(case_id),
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.patch_size == 0 {
            return Err(Error::InvalidArgument("patch_size must be positive".into()));
        }
        if !(0.0..=1.0).contains(&self.fg_center_prob) {
            return Err(Error::InvalidArgument(format!(
                "fg_center_prob must lie in [0, 1], got {}",
                self.fg_center_prob
            )));
        }
        if !(self.scale_limit >= 1.0) {
            return Err(Error::InvalidArgument(format!(
                "scale_limit must be >= 1, got {}",
                self.scale_limit
            )));
        }
        if !(self.translation_range >= 0.0 && self.rotation_range >= 0.0) {
            return Err(Error::InvalidArgument("ranges must be non-negative".into()));
        }
        Ok(())
    }

    fn rng(&self, stream: u64, draw_index: u64) -> ChaCha8Rng {
        keyed_rng(&[self.seed, self.case_key, stream, draw_index])
    }
}

/// A cropped patch together with the source pixel it is centered on.
#[derive(Debug, Clone, PartialEq)]
pub struct Patch<T> {
    pub image: ImageGrid<T>,
    pub mask: BinaryMask,
    pub center: (usize, usize),
    pub foreground_centered: bool,
}

fn uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * rng.random::<f64>()
}

/// Crops a `patch_size` square centered on a foreground pixel with probability
/// `fg_center_prob`, otherwise on a background pixel. Pixels beyond the grid
/// edge replicate the nearest edge pixel.
pub fn sample_patch_detailed<T: Scalar>(
    img: &ImageGrid<T>,
    mask: &BinaryMask,
    cfg: &AugmentConfig,
    draw_index: u64,
) -> Result<Patch<T>> {
    cfg.validate()?;
    img.geometry().ensure_same(&mask.geometry(), "sample_patch")?;
    let fg = mask.foreground();
    let bg = mask.background();
    if fg.is_empty() || bg.is_empty() {
        return Err(Error::Sampling(format!(
            "patch sampling needs foreground and background pixels (fg={}, bg={})",
            fg.len(),
            bg.len()
        )));
    }
    let mut rng = cfg.rng(PATCH_STREAM, draw_index);
    let foreground_centered = rng.random::<f64>() < cfg.fg_center_prob;
    let pool = if foreground_centered { &fg } else { &bg };
    let center = pool[rng.random_range(0..pool.len())];

    let half = (cfg.patch_size / 2) as isize;
    let (cx, cy) = (center.0 as isize, center.1 as isize);
    let ps = cfg.patch_size;
    let image = ImageGrid::from_fn(ps, ps, img.spacing(), |u, v| {
        img.get_clamped(cx - half + u as isize, cy - half + v as isize)
    })?;
    let (w, h) = (mask.width() as isize, mask.height() as isize);
    let mask = BinaryMask::from_fn(ps, ps, mask.spacing(), |u, v| {
        let x = (cx - half + u as isize).clamp(0, w - 1);
        let y = (cy - half + v as isize).clamp(0, h - 1);
        mask.is_set(x as usize, y as usize)
    })?;
    Ok(Patch {
        image,
        mask,
        center,
        foreground_centered,
    })
}

pub fn sample_patch<T: Scalar>(
    img: &ImageGrid<T>,
    mask: &BinaryMask,
    cfg: &AugmentConfig,
    draw_index: u64,
) -> Result<(ImageGrid<T>, BinaryMask)> {
    let p = sample_patch_detailed(img, mask, cfg, draw_index)?;
    Ok((p.image, p.mask))
}

/// Parameters of one affine draw.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffineDraw {
    pub translation: (f64, f64),
    pub rotation: f64,
    pub scale: f64,
}

impl AffineDraw {
    pub fn draw(cfg: &AugmentConfig, draw_index: u64) -> Self {
        let mut rng = cfg.rng(AFFINE_STREAM, draw_index);
        let t = cfg.translation_range;
        let tx = uniform(&mut rng, -t, t);
        let ty = uniform(&mut rng, -t, t);
        let rotation = uniform(&mut rng, -cfg.rotation_range, cfg.rotation_range);
        let scale = uniform(&mut rng, 1.0 / cfg.scale_limit, cfg.scale_limit);
        Self {
            translation: (tx, ty),
            rotation,
            scale,
        }
    }

    /// Maps an output pixel index to the source index it samples
    /// (inverse of scale -> rotate -> translate about the grid center).
    fn source_of(&self, x: f64, y: f64, cx: f64, cy: f64) -> (f64, f64) {
        let (sin, cos) = self.rotation.sin_cos();
        let dx = x - cx - self.translation.0;
        let dy = y - cy - self.translation.1;
        let rx = cos * dx + sin * dy;
        let ry = -sin * dx + cos * dy;
        (rx / self.scale + cx, ry / self.scale + cy)
    }
}

/// Applies a single affine draw: bilinear for the image, nearest for the mask.
pub fn apply_affine<T: Scalar>(
    img: &ImageGrid<T>,
    mask: &BinaryMask,
    draw: &AffineDraw,
) -> Result<(ImageGrid<T>, BinaryMask)> {
    img.geometry().ensure_same(&mask.geometry(), "random_affine")?;
    let cx = (img.width() as f64 - 1.0) / 2.0;
    let cy = (img.height() as f64 - 1.0) / 2.0;
    let out_img = ImageGrid::from_fn(img.width(), img.height(), img.spacing(), |x, y| {
        let (u, v) = draw.source_of(x as f64, y as f64, cx, cy);
        sample(img, u, v, Interpolation::Bilinear)
    })?;
    let (w, h) = (mask.width() as isize, mask.height() as isize);
    let out_mask = BinaryMask::from_fn(mask.width(), mask.height(), mask.spacing(), |x, y| {
        let (u, v) = draw.source_of(x as f64, y as f64, cx, cy);
        let sx = ((u + 0.5).floor() as isize).clamp(0, w - 1);
        let sy = ((v + 0.5).floor() as isize).clamp(0, h - 1);
        mask.is_set(sx as usize, sy as usize)
    })?;
    Ok((out_img, out_mask))
}

pub fn random_affine<T: Scalar>(
    img: &ImageGrid<T>,
    mask: &BinaryMask,
    cfg: &AugmentConfig,
    draw_index: u64,
) -> Result<(ImageGrid<T>, BinaryMask)> {
    cfg.validate()?;
    apply_affine(img, mask, &AffineDraw::draw(cfg, draw_index))
}
