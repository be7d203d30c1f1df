//! Synthetic multi-center thyroid scintigraphy phantom.
//!
//! Each case is a two-lobe gland on a flat background. Diffuse goiter (DG)
//! is an enlarged gland with uniform high uptake, multinodular goiter (MNG)
//! a moderate gland carrying hot and cold Gaussian nodules, and thyroiditis
//! (TH) a faint gland barely above background. Counts are Poisson draws
//! around the activity model, scaled by a per-center gain.

use std::path::Path;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::scin::{write_image_u16, write_mask};
use crate::grid::{BinaryMask, ImageGrid, Spacing};
use crate::label::Label;
use crate::lococv::{CaseEntry, DatasetManifest};
use crate::rng::keyed_rng;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PhantomSpec {
    pub centers: u32,
    /// Cases per center for MNG, TH, DG.
    pub per_center: [usize; 3],
    pub image_size: usize,
    /// Center imaged at twice the matrix size and half the pixel spacing.
    pub large_center: Option<u32>,
    pub field_of_view_mm: f64,
    /// Expected counts per mm^2 outside the gland.
    pub background: f64,
    /// Expected gland counts per mm^2 for MNG, TH, DG.
    pub uptake: [f64; 3],
    pub gain_range: [f64; 2],
    pub size_jitter: [f64; 2],
    /// Probability of flipping a boundary pixel of the predicted mask.
    pub boundary_flip_prob: f64,
    pub seed: u64,
}

impl Default for PhantomSpec {
    fn default() -> Self {
        Self {
            centers: 9,
            per_center: [20, 20, 20],
            image_size: 128,
            large_center: Some(5),
            field_of_view_mm: 128.0,
            background: 2.0,
            uptake: [40.0, 8.0, 90.0],
            gain_range: [0.75, 1.3],
            size_jitter: [0.9, 1.1],
            boundary_flip_prob: 0.3,
            seed: 7,
        }
    }
}

impl PhantomSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidArgument(m));
        if self.centers == 0 {
            return bad("at least one center is required".into());
        }
        if self.image_size < 16 {
            return bad(format!("image_size {} is too small", self.image_size));
        }
        if !(self.gain_range[0] > 0.0 && self.gain_range[0] <= self.gain_range[1]) {
            return bad(format!("gain range {:?} must be positive and ordered", self.gain_range));
        }
        if !(self.size_jitter[0] > 0.0 && self.size_jitter[0] <= self.size_jitter[1]) {
            return bad(format!("size jitter {:?} must be positive and ordered", self.size_jitter));
        }
        if !(self.background >= 0.0) || self.uptake.iter().any(|u| !(*u > 0.0)) {
            return bad("background must be nonnegative and uptakes positive".into());
        }
        if !(0.0..=1.0).contains(&self.boundary_flip_prob) {
            return bad("boundary_flip_prob must lie in [0, 1]".into());
        }
        Ok(())
    }

    pub fn n_cases(&self) -> usize {
        self.centers as usize * self.per_center.iter().sum::<usize>()
    }
}

pub struct PhantomCase {
    pub case_id: String,
    pub center_id: u32,
    pub label: Label,
    pub image: ImageGrid<f64>,
    pub mask: BinaryMask,
    pub predicted: BinaryMask,
}

fn uniform(rng: &mut ChaCha8Rng, r: [f64; 2]) -> f64 {
    if r[0] == r[1] {
        r[0]
    } else {
        rng.random_range(r[0]..r[1])
    }
}

struct Lobe {
    cx: f64,
    cy: f64,
    a: f64,
    b: f64,
    cos: f64,
    sin: f64,
}

impl Lobe {
    /// Squared normalized elliptical radius; 1 on the outline.
    fn r2(&self, x: f64, y: f64) -> f64 {
        let (dx, dy) = (x - self.cx, y - self.cy);
        let u = dx * self.cos + dy * self.sin;
        let v = -dx * self.sin + dy * self.cos;
        (u / self.a).powi(2) + (v / self.b).powi(2)
    }
}

struct Nodule {
    x: f64,
    y: f64,
    sigma: f64,
    amplitude: f64,
}

fn smoothstep(e0: f64, e1: f64, x: f64) -> f64 {
    let t = ((x - e0) / (e1 - e0)).clamp(0.0, 1.0);
    t * t * (3.0 - 2.0 * t)
}

const KEY_CENTER: u64 = 0xC3;
const KEY_CASE: u64 = 0xCA;
const KEY_NOISE: u64 = 0x9015;
const KEY_MASK: u64 = 0x3A5C;

fn case_id(center: u32, label: Label, idx: usize) -> String {
    format!("c{center:02}_{label}_{idx:03}")
}

/// Builds one case entirely in memory.
pub fn generate_case(spec: &PhantomSpec, center: u32, label: Label, idx: usize) -> Result<PhantomCase> {
    let mut crng = keyed_rng(&[spec.seed, KEY_CENTER, center as u64]);
    let gain = uniform(&mut crng, spec.gain_range);
    let center_scale = uniform(&mut crng, spec.size_jitter);

    let large = spec.large_center == Some(center);
    let n = if large { spec.image_size * 2 } else { spec.image_size };
    let sp = spec.field_of_view_mm / n as f64;
    let spacing = Spacing::new(sp, sp)?;

    let key = [spec.seed, KEY_CASE, center as u64, label.index() as u64, idx as u64];
    let mut rng = keyed_rng(&key);
    let mut scale = center_scale * rng.random_range(0.93..1.07);
    if label == Label::Dg {
        scale *= 1.3;
    }
    let tilt = 0.2 + rng.random_range(-0.06..0.06);
    let cy = rng.random_range(-4.0..4.0);
    let lobes: Vec<Lobe> = [-1.0, 1.0]
        .iter()
        .map(|&side: &f64| {
            let th = side * tilt;
            Lobe {
                cx: side * 11.0 * scale + rng.random_range(-1.0..1.0),
                cy: cy + rng.random_range(-1.5..1.5),
                a: 7.0 * scale * rng.random_range(0.9..1.1),
                b: 17.0 * scale * rng.random_range(0.9..1.1),
                cos: th.cos(),
                sin: th.sin(),
            }
        })
        .collect();

    let uptake = spec.uptake[label.index()] * rng.random_range(0.85..1.15);
    let nodules: Vec<Nodule> = if label == Label::Mng {
        let count = rng.random_range(2..=5);
        (0..count)
            .map(|k| {
                let lobe = &lobes[rng.random_range(0..2)];
                let rho = 0.65 * rng.random::<f64>().sqrt();
                let phi = rng.random_range(0.0..std::f64::consts::TAU);
                let (u, v) = (rho * lobe.a * phi.cos(), rho * lobe.b * phi.sin());
                let hot = k == 0 || rng.random_bool(0.5);
                Nodule {
                    x: lobe.cx + u * lobe.cos - v * lobe.sin,
                    y: lobe.cy + u * lobe.sin + v * lobe.cos,
                    sigma: rng.random_range(2.5..5.0),
                    amplitude: if hot {
                        uptake * rng.random_range(1.0..2.0)
                    } else {
                        -uptake * rng.random_range(0.5..0.8)
                    },
                }
            })
            .collect()
    } else {
        Vec::new()
    };
    // Edge sharpness varies per case so low ROI percentiles overlap across
    // labels, as they do with real collimator blur.
    let edge_start = rng.random_range(0.5..0.95);
    let edge_falloff = match label {
        Label::Dg => 0.1,
        Label::Mng => 0.2,
        Label::Th => 0.35,
    };

    let half = spec.field_of_view_mm / 2.0;
    let area = spacing.area();
    let mut noise = keyed_rng(&[spec.seed, KEY_NOISE, center as u64, label.index() as u64, idx as u64]);
    let mut pixels = Vec::with_capacity(n * n);
    let mut mask = Vec::with_capacity(n * n);
    for yi in 0..n {
        for xi in 0..n {
            let x = (xi as f64 + 0.5) * sp - half;
            let y = (yi as f64 + 0.5) * sp - half;
            let r2 = lobes.iter().map(|l| l.r2(x, y)).fold(f64::INFINITY, f64::min);
            mask.push((r2 <= 1.0) as u8);
            let inside = 1.0 - smoothstep(edge_start, 1.15, r2.sqrt());
            let mut gland = uptake * (1.0 - edge_falloff * r2.min(1.0));
            for nd in &nodules {
                let d2 = (x - nd.x).powi(2) + (y - nd.y).powi(2);
                gland += nd.amplitude * (-d2 / (2.0 * nd.sigma * nd.sigma)).exp();
            }
            gland = gland.max(0.15 * uptake);
            let activity = (spec.background + inside * gland) * gain * area;
            let count = if activity > 0.0 {
                Poisson::new(activity)
                    .map_err(|e| Error::InvalidArgument(format!("Poisson rate {activity}: {e}")))?
                    .sample(&mut noise)
            } else {
                0.0
            };
            pixels.push(count.min(u16::MAX as f64));
        }
    }
    let image = ImageGrid::new(n, n, spacing, pixels)?;
    let mask = BinaryMask::new(n, n, spacing, mask)?;
    let predicted = perturb_mask(
        &mask,
        spec.boundary_flip_prob,
        &mut keyed_rng(&[spec.seed, KEY_MASK, center as u64, label.index() as u64, idx as u64]),
    )?;
    Ok(PhantomCase {
        case_id: case_id(center, label, idx),
        center_id: center,
        label,
        image,
        mask,
        predicted,
    })
}

fn morph(mask: &BinaryMask, dilate: bool) -> Result<BinaryMask> {
    let (w, h) = (mask.width(), mask.height());
    BinaryMask::from_fn(w, h, mask.spacing(), |x, y| {
        let mut any = false;
        let mut all = true;
        for dy in -1..=1 {
            for dx in -1..=1 {
                let v = mask.contains(x as isize + dx, y as isize + dy);
                any |= v;
                all &= v;
            }
        }
        if dilate { any } else { all }
    })
}

/// Stand-in for an automatic segmentation: a one-pixel shift, a one-pixel
/// erosion or dilation (or neither), then random flips along the outline.
pub fn perturb_mask(mask: &BinaryMask, flip_prob: f64, rng: &mut ChaCha8Rng) -> Result<BinaryMask> {
    let (w, h) = (mask.width(), mask.height());
    let (sx, sy) = (rng.random_range(0..3i64) as isize - 1, rng.random_range(0..3i64) as isize - 1);
    let shifted = BinaryMask::from_fn(w, h, mask.spacing(), |x, y| {
        mask.contains(x as isize - sx, y as isize - sy)
    })?;
    let morphed = match rng.random_range(0..3) {
        0 => morph(&shifted, false)?,
        1 => morph(&shifted, true)?,
        _ => shifted,
    };
    let mut flips = Vec::new();
    for y in 0..h {
        for x in 0..w {
            let v = morphed.is_set(x, y);
            let edge = (-1..=1).any(|dy| {
                (-1..=1).any(|dx| morphed.contains(x as isize + dx, y as isize + dy) != v)
            });
            flips.push(edge && rng.random_bool(flip_prob));
        }
    }
    let out = BinaryMask::from_fn(w, h, mask.spacing(), |x, y| morphed.is_set(x, y) ^ flips[y * w + x])?;
    if out.is_empty() {
        return Ok(mask.clone());
    }
    Ok(out)
}

fn case_plan(spec: &PhantomSpec) -> Vec<(u32, Label, usize)> {
    let mut plan = Vec::with_capacity(spec.n_cases());
    for c in 1..=spec.centers {
        for l in Label::ALL {
            for i in 0..spec.per_center[l.index()] {
                plan.push((c, l, i));
            }
        }
    }
    plan
}

/// Writes every case as SCIN files under `out_dir/{images,masks,predicted}`
/// plus `out_dir/manifest.json`, and returns the manifest.
pub fn generate_dataset(spec: &PhantomSpec, out_dir: &Path) -> Result<DatasetManifest> {
    spec.validate()?;
    for sub in ["images", "masks", "predicted"] {
        let d = out_dir.join(sub);
        std::fs::create_dir_all(&d).map_err(|e| Error::io(&d, e))?;
    }
    let entries: Vec<Result<CaseEntry>> = case_plan(spec)
        .into_par_iter()
        .map(|(c, l, i)| {
            let case = generate_case(spec, c, l, i)?;
            let file = format!("{}.json", case.case_id);
            let rel = |sub: &str| Path::new(sub).join(&file);
            write_image_u16(&out_dir.join(rel("images")), &case.image)?;
            write_mask(&out_dir.join(rel("masks")), &case.mask)?;
            write_mask(&out_dir.join(rel("predicted")), &case.predicted)?;
            Ok(CaseEntry {
                case_id: case.case_id,
                center_id: c,
                label: l,
                image: rel("images"),
                physician_mask: rel("masks"),
                predicted_mask: Some(rel("predicted")),
            })
        })
        .collect();
    let cases = entries.into_iter().collect::<Result<Vec<_>>>()?;
    let manifest = DatasetManifest::new(cases, out_dir);
    manifest.save(&out_dir.join("manifest.json"))?;
    Ok(manifest)
}
