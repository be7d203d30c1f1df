//! Segmentation-side evaluation: the Dice + false-positive loss, the Dice
//! similarity coefficient, sliding-window scoring, thresholding and ROI counts.

use crate::error::{Error, Result};
use crate::grid::{BinaryMask, Geometry, ImageGrid};
use crate::scalar::Scalar;

pub const DEFAULT_ALPHA: f64 = 2.0;
pub const DEFAULT_EPS: f64 = 1e-5;
pub const DEFAULT_WINDOW: usize = 128;

/// Per-pixel foreground probabilities in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityMap<T>(ImageGrid<T>);

impl<T: Scalar> ProbabilityMap<T> {
    pub fn new(grid: ImageGrid<T>) -> Result<Self> {
        if let Some(v) = grid
            .pixels()
            .iter()
            .find(|&&v| !(v >= T::zero() && v <= T::one()))
        {
            return Err(Error::InvalidRange(format!(
                "probability {v} outside [0, 1]"
            )));
        }
        Ok(Self(grid))
    }

    /// Probabilities 0/1 from a mask.
    pub fn from_mask(mask: &BinaryMask) -> Self {
        let g = mask.geometry();
        Self(
            ImageGrid::new(
                g.width,
                g.height,
                g.spacing,
                mask.values().iter().map(|&v| T::from_count(v as usize)).collect(),
            )
            .expect("mask geometry is valid"),
        )
    }

    pub fn grid(&self) -> &ImageGrid<T> {
        &self.0
    }

    pub fn values(&self) -> &[T] {
        self.0.pixels()
    }

    pub fn geometry(&self) -> Geometry {
        self.0.geometry()
    }
}

/// `1 - (2 sum(p g) + eps) / (sum p + sum g + eps) + alpha * sum(p (1 - g)) / (sum p + sum g + eps)`
pub fn dice_fp_loss<T: Scalar>(
    pred: &ProbabilityMap<T>,
    gt: &BinaryMask,
    alpha: T,
    eps: T,
) -> Result<T> {
    pred.geometry().ensure_same(&gt.geometry(), "dice_fp_loss")?;
    if !(eps > T::zero()) || !(alpha >= T::zero()) {
        return Err(Error::InvalidArgument(format!(
            "dice_fp_loss requires eps > 0 and alpha >= 0 (eps={eps}, alpha={alpha})"
        )));
    }
    let mut inter = T::zero();
    let mut sum_p = T::zero();
    let mut sum_g = T::zero();
    let mut false_pos = T::zero();
    for (&p, &g) in pred.values().iter().zip(gt.values()) {
        sum_p += p;
        if g != 0 {
            inter += p;
            sum_g += T::one();
        } else {
            false_pos += p;
        }
    }
    let denom = sum_p + sum_g + eps;
    let two = T::lit(2.0);
    Ok(T::one() - (two * inter + eps) / denom + alpha * false_pos / denom)
}

/// `2 |A ∩ B| / (|A| + |B|)`, with two empty masks scoring 1.
pub fn dsc(a: &BinaryMask, b: &BinaryMask) -> Result<f64> {
    a.geometry().ensure_same(&b.geometry(), "dsc")?;
    let (mut inter, mut na, mut nb) = (0usize, 0usize, 0usize);
    for (&x, &y) in a.values().iter().zip(b.values()) {
        na += x as usize;
        nb += y as usize;
        inter += (x & y) as usize;
    }
    if na + nb == 0 {
        return Ok(1.0);
    }
    Ok(2.0 * inter as f64 / (na + nb) as f64)
}

/// Tile origins along one axis: stride `window / 2`, last tile flush with the edge.
fn tile_origins(len: usize, window: usize) -> Vec<usize> {
    if window >= len {
        return vec![0];
    }
    let stride = (window / 2).max(1);
    let last = len - window;
    let mut origins: Vec<usize> = (0..=last).step_by(stride).collect();
    if *origins.last().unwrap() != last {
        origins.push(last);
    }
    origins
}

/// Scores overlapping square tiles (50% overlap) and averages overlaps with
/// uniform weights. The scorer receives a tile and returns one probability per
/// tile pixel, row-major. Tiles are visited in row-major tile order.
pub fn sliding_window_apply<T, F>(
    img: &ImageGrid<T>,
    window: usize,
    mut scorer: F,
) -> Result<ProbabilityMap<T>>
where
    T: Scalar,
    F: FnMut(&ImageGrid<T>) -> Vec<T>,
{
    if window == 0 {
        return Err(Error::InvalidArgument("window must be positive".into()));
    }
    let (w, h) = (img.width(), img.height());
    let tw = window.min(w);
    let th = window.min(h);
    let mut sum = vec![T::zero(); w * h];
    let mut hits = vec![0usize; w * h];
    for &oy in &tile_origins(h, window) {
        for &ox in &tile_origins(w, window) {
            let tile = ImageGrid::from_fn(tw, th, img.spacing(), |x, y| img.get(ox + x, oy + y))?;
            let scores = scorer(&tile);
            if scores.len() != tw * th {
                return Err(Error::Contract(format!(
                    "scorer returned {} values for a {tw}x{th} tile",
                    scores.len()
                )));
            }
            for y in 0..th {
                for x in 0..tw {
                    let s = scores[y * tw + x];
                    if !(s >= T::zero() && s <= T::one()) {
                        return Err(Error::Contract(format!("scorer produced {s} outside [0, 1]")));
                    }
                    let idx = (oy + y) * w + ox + x;
                    sum[idx] += s;
                    hits[idx] += 1;
                }
            }
        }
    }
    let values = sum
        .into_iter()
        .zip(hits)
        .map(|(s, n)| s / T::from_count(n))
        .collect();
    ProbabilityMap::new(img.with_pixels(values))
}

/// Foreground where `p >= threshold`.
pub fn binarize<T: Scalar>(p: &ProbabilityMap<T>, threshold: T) -> Result<BinaryMask> {
    if !(threshold >= T::zero() && threshold <= T::one()) {
        return Err(Error::InvalidRange(format!(
            "threshold {threshold} outside [0, 1]"
        )));
    }
    let g = p.geometry();
    BinaryMask::new(
        g.width,
        g.height,
        g.spacing,
        p.values().iter().map(|&v| (v >= threshold) as u8).collect(),
    )
}

/// Sum of raw pixel values inside the mask.
pub fn roi_counts<T: Scalar>(img: &ImageGrid<T>, mask: &BinaryMask) -> Result<f64> {
    img.geometry().ensure_same(&mask.geometry(), "roi_counts")?;
    Ok(img
        .pixels()
        .iter()
        .zip(mask.values())
        .filter(|(_, &m)| m != 0)
        .map(|(v, _)| v.as_f64())
        .sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Spacing;
    use proptest::prelude::*;

    fn mask(v: &[u8]) -> BinaryMask {
        BinaryMask::new(v.len(), 1, Spacing::default(), v.to_vec()).unwrap()
    }

    fn prob(v: &[f64]) -> ProbabilityMap<f64> {
        ProbabilityMap::new(ImageGrid::new(v.len(), 1, Spacing::default(), v.to_vec()).unwrap()).unwrap()
    }

    #[test]
    fn loss_examples() {
        let g = mask(&[1, 1, 0, 1, 0]);
        let p = ProbabilityMap::from_mask(&g);
        assert_eq!(dice_fp_loss(&p, &g, 2.0, 1e-5).unwrap(), 0.0);
        let g0 = mask(&[0; 100]);
        let p0 = prob(&[0.0; 100]);
        assert_eq!(dice_fp_loss(&p0, &g0, 2.0, 1e-5).unwrap(), 0.0);
        let p1 = prob(&[1.0; 100]);
        let l = dice_fp_loss(&p1, &g0, 2.0, 1e-5).unwrap();
        let want = 1.0 - 1e-5 / (100.0 + 1e-5) + 2.0 * 100.0 / (100.0 + 1e-5);
        assert!((l - want).abs() < 1e-15);
        assert!((l - 3.0).abs() < 1e-6);
        assert!(dice_fp_loss(&p1, &mask(&[0; 3]), 2.0, 1e-5).is_err());
    }

    #[test]
    fn dsc_examples() {
        let a = mask(&[1, 1, 0, 0]);
        assert_eq!(dsc(&a, &a).unwrap(), 1.0);
        assert_eq!(dsc(&a, &mask(&[0, 0, 1, 1])).unwrap(), 0.0);
        let a = mask(&[1, 1, 1, 1, 0, 0]);
        let b = mask(&[0, 0, 1, 1, 1, 1]);
        assert_eq!(dsc(&a, &b).unwrap(), 0.5);
        assert_eq!(dsc(&mask(&[0, 0]), &mask(&[0, 0])).unwrap(), 1.0);
    }

    #[test]
    fn sliding_window_examples() {
        let img = ImageGrid::from_fn(10, 7, Spacing::default(), |x, y| (x * y) as f64 / 63.0).unwrap();
        let single = sliding_window_apply(&img, 128, |t| t.pixels().to_vec()).unwrap();
        assert_eq!(single.values(), img.pixels());

        let constant = sliding_window_apply(&img, 4, |t| vec![0.7; t.pixels().len()]).unwrap();
        assert!(constant.values().iter().all(|&v| (v - 0.7f64).abs() < 1e-15));

        let strip = ImageGrid::filled(6, 4, Spacing::default(), 0.0f64).unwrap();
        let mut calls = 0;
        let out = sliding_window_apply(&strip, 4, |t| {
            calls += 1;
            vec![if calls == 1 { 0.2 } else { 0.6 }; t.pixels().len()]
        })
        .unwrap();
        assert_eq!(calls, 2);
        for y in 0..4 {
            assert!((out.grid().get(0, y) - 0.2).abs() < 1e-15);
            assert!((out.grid().get(2, y) - 0.4).abs() < 1e-15);
            assert!((out.grid().get(3, y) - 0.4).abs() < 1e-15);
            assert!((out.grid().get(5, y) - 0.6).abs() < 1e-15);
        }
        assert!(matches!(
            sliding_window_apply(&strip, 4, |_| vec![0.5; 3]),
            Err(Error::Contract(_))
        ));
    }

    #[test]
    fn tiles_cover_with_edge_clamp() {
        assert_eq!(tile_origins(128, 128), vec![0]);
        assert_eq!(tile_origins(200, 128), vec![0, 64, 72]);
        assert_eq!(tile_origins(256, 128), vec![0, 64, 128]);
    }

    #[test]
    fn binarize_examples() {
        assert_eq!(binarize(&prob(&[1.0; 3]), 0.5).unwrap().values(), &[1, 1, 1]);
        assert_eq!(binarize(&prob(&[0.0; 3]), 0.5).unwrap().values(), &[0, 0, 0]);
        assert_eq!(binarize(&prob(&[0.49, 0.5, 0.51]), 0.5).unwrap().values(), &[0, 1, 1]);
    }

    #[test]
    fn roi_count_examples() {
        let img = ImageGrid::new(3, 1, Spacing::default(), vec![10.0, 20.0, 30.0]).unwrap();
        assert_eq!(roi_counts(&img, &mask(&[1, 0, 1])).unwrap(), 40.0);
        assert_eq!(roi_counts(&img, &mask(&[0, 0, 0])).unwrap(), 0.0);
        assert_eq!(roi_counts(&img, &mask(&[1, 1, 1])).unwrap(), 60.0);
    }

    proptest! {
        #[test]
        fn loss_alpha_zero_binary_matches_dsc(bits in prop::collection::vec((0u8..2, 0u8..2), 1..60)) {
            let p: Vec<u8> = bits.iter().map(|b| b.0).collect();
            let g: Vec<u8> = bits.iter().map(|b| b.1).collect();
            let pm = mask(&p);
            let gm = mask(&g);
            let eps = 1e-5;
            let loss = dice_fp_loss(&ProbabilityMap::from_mask(&pm), &gm, 0.0, eps).unwrap();
            let sp: usize = p.iter().map(|&v| v as usize).sum();
            let sg: usize = g.iter().map(|&v| v as usize).sum();
            let bound = eps / (sp as f64 + sg as f64 + eps);
            let d = dsc(&pm, &gm).unwrap();
            prop_assert!((loss - (1.0 - d)).abs() <= bound + 1e-15);
        }

        #[test]
        fn dsc_symmetric_and_bounded(bits in prop::collection::vec((0u8..2, 0u8..2), 1..60)) {
            let a = mask(&bits.iter().map(|b| b.0).collect::<Vec<_>>());
            let b = mask(&bits.iter().map(|b| b.1).collect::<Vec<_>>());
            let ab = dsc(&a, &b).unwrap();
            prop_assert_eq!(ab, dsc(&b, &a).unwrap());
            prop_assert!((0.0..=1.0).contains(&ab));
        }

        #[test]
        fn constant_scorer_is_tiling_invariant(w in 1usize..40, h in 1usize..40, window in 1usize..50, c in 0.0f64..1.0) {
            let img = ImageGrid::filled(w, h, Spacing::default(), 0.0).unwrap();
            let out = sliding_window_apply(&img, window, |t| vec![c; t.pixels().len()]).unwrap();
            for &v in out.values() {
                prop_assert!((v - c).abs() <= 1e-15);
            }
        }
    }
}
