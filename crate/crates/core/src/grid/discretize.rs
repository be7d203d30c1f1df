use crate::error::{Error, Result};
use crate::grid::{BinaryMask, Geometry, ImageGrid};
use crate::scalar::Scalar;

/// A single ROI pixel with its gray level (1-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RoiEntry {
    pub x: usize,
    pub y: usize,
    pub level: usize,
}

/// Fixed-bin-width discretization of the pixels inside a mask.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscretizedRoi {
    geometry: Geometry,
    entries: Vec<RoiEntry>,
    levels: Vec<usize>,
    num_levels: usize,
    bin_width: f64,
}

impl DiscretizedRoi {
    /// Builds a ROI directly from a level grid (0 = outside). Mostly useful in tests.
    pub fn from_levels(geometry: Geometry, levels: Vec<usize>, bin_width: f64) -> Result<Self> {
        if levels.len() != geometry.len() {
            return Err(Error::InvalidGrid("level grid length mismatch".into()));
        }
        let entries: Vec<RoiEntry> = levels
            .iter()
            .enumerate()
            .filter(|(_, &l)| l > 0)
            .map(|(i, &level)| RoiEntry {
                x: i % geometry.width,
                y: i / geometry.width,
                level,
            })
            .collect();
        if entries.is_empty() {
            return Err(Error::EmptyRoi("level grid has no ROI pixels".into()));
        }
        let num_levels = entries.iter().map(|e| e.level).max().unwrap_or(0);
        Ok(Self {
            geometry,
            entries,
            levels,
            num_levels,
            bin_width,
        })
    }

    pub fn geometry(&self) -> Geometry {
        self.geometry
    }

    pub fn entries(&self) -> &[RoiEntry] {
        &self.entries
    }

    /// Number of gray levels, i.e. the highest level present.
    pub fn num_levels(&self) -> usize {
        self.num_levels
    }

    pub fn bin_width(&self) -> f64 {
        self.bin_width
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Level at `(x, y)`, or `None` outside the ROI or the grid.
    #[inline]
    pub fn level_at(&self, x: isize, y: isize) -> Option<usize> {
        if x < 0 || y < 0 || x as usize >= self.geometry.width || y as usize >= self.geometry.height
        {
            return None;
        }
        match self.levels[y as usize * self.geometry.width + x as usize] {
            0 => None,
            l => Some(l),
        }
    }

    /// Pixel count per gray level, indexed `level - 1`.
    pub fn histogram(&self) -> Vec<usize> {
        let mut h = vec![0; self.num_levels];
        for e in &self.entries {
            h[e.level - 1] += 1;
        }
        h
    }
}

/// `level = floor((x - roi_min) / bin_width) + 1` for every mask-positive pixel.
pub fn discretize_roi<T: Scalar>(
    img: &ImageGrid<T>,
    mask: &BinaryMask,
    bin_width: f64,
) -> Result<DiscretizedRoi> {
    if !(bin_width > 0.0) {
        return Err(Error::InvalidRange(format!(
            "bin width must be positive, got {bin_width}"
        )));
    }
    img.geometry().ensure_same(&mask.geometry(), "discretize_roi")?;
    let roi_min = img
        .pixels()
        .iter()
        .zip(mask.values())
        .filter(|(_, &m)| m != 0)
        .map(|(&v, _)| v.as_f64())
        .fold(f64::INFINITY, f64::min);
    if !roi_min.is_finite() {
        return Err(Error::EmptyRoi("mask has no foreground pixels".into()));
    }
    let levels = img
        .pixels()
        .iter()
        .zip(mask.values())
        .map(|(&v, &m)| {
            if m == 0 {
                0
            } else {
                ((v.as_f64() - roi_min) / bin_width).floor() as usize + 1
            }
        })
        .collect();
    DiscretizedRoi::from_levels(img.geometry(), levels, bin_width)
}
