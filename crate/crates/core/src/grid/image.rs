use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Physical pixel size in millimetres along x (columns) and y (rows).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Spacing {
    pub x: f64,
    pub y: f64,
}

impl Spacing {
    pub fn new(x: f64, y: f64) -> Result<Self> {
        if !(x > 0.0 && y > 0.0 && x.is_finite() && y.is_finite()) {
            return Err(Error::InvalidRange(format!(
                "spacing must be positive and finite, got ({x}, {y})"
            )));
        }
        Ok(Self { x, y })
    }

    pub const fn isotropic(s: f64) -> Self {
        Self { x: s, y: s }
    }

    pub fn area(&self) -> f64 {
        self.x * self.y
    }
}

impl Default for Spacing {
    fn default() -> Self {
        Self::isotropic(1.0)
    }
}

/// Size and physical spacing of a 2D grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Geometry {
    pub width: usize,
    pub height: usize,
    pub spacing: Spacing,
}

impl Geometry {
    pub fn len(&self) -> usize {
        self.width * self.height
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub(crate) fn ensure_same(&self, other: &Geometry, what: &str) -> Result<()> {
        if self != other {
            return Err(Error::GeometryMismatch(format!(
                "{what}: {}x{} @ ({}, {}) vs {}x{} @ ({}, {})",
                self.width,
                self.height,
                self.spacing.x,
                self.spacing.y,
                other.width,
                other.height,
                other.spacing.x,
                other.spacing.y
            )));
        }
        Ok(())
    }
}

fn check_dims(width: usize, height: usize, len: usize) -> Result<()> {
    if width == 0 || height == 0 {
        return Err(Error::InvalidGrid(format!(
            "dimensions must be positive, got {width}x{height}"
        )));
    }
    if width * height != len {
        return Err(Error::InvalidGrid(format!(
            "{width}x{height} grid needs {} values, got {len}",
            width * height
        )));
    }
    Ok(())
}

/// A 2D scalar pixel field stored row-major (`y * width + x`).
#[derive(Debug, Clone, PartialEq)]
pub struct ImageGrid<T> {
    width: usize,
    height: usize,
    spacing: Spacing,
    pixels: Vec<T>,
}

impl<T: Scalar> ImageGrid<T> {
    pub fn new(width: usize, height: usize, spacing: Spacing, pixels: Vec<T>) -> Result<Self> {
        check_dims(width, height, pixels.len())?;
        if let Some(i) = pixels.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidGrid(format!("pixel {i} is not finite")));
        }
        Ok(Self {
            width,
            height,
            spacing,
            pixels,
        })
    }

    pub fn filled(width: usize, height: usize, spacing: Spacing, value: T) -> Result<Self> {
        Self::new(width, height, spacing, vec![value; width * height])
    }

    pub fn from_fn(
        width: usize,
        height: usize,
        spacing: Spacing,
        mut f: impl FnMut(usize, usize) -> T,
    ) -> Result<Self> {
        let mut pixels = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                pixels.push(f(x, y));
            }
        }
        Self::new(width, height, spacing, pixels)
    }

    /// Builds a grid that reuses this grid's geometry. Values must be finite.
    pub(crate) fn with_pixels(&self, pixels: Vec<T>) -> Self {
        debug_assert_eq!(pixels.len(), self.pixels.len());
        debug_assert!(pixels.iter().all(|v| v.is_finite()));
        Self {
            width: self.width,
            height: self.height,
            spacing: self.spacing,
            pixels,
        }
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(T) -> U) -> Result<ImageGrid<U>> {
        ImageGrid::new(
            self.width,
            self.height,
            self.spacing,
            self.pixels.iter().map(|&v| f(v)).collect(),
        )
    }

    /// Converts to another scalar precision.
    pub fn cast<U: Scalar>(&self) -> ImageGrid<U> {
        ImageGrid {
            width: self.width,
            height: self.height,
            spacing: self.spacing,
            pixels: self
                .pixels
                .iter()
                .map(|v| U::from_f64(v.as_f64()).expect("finite value"))
                .collect(),
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn spacing(&self) -> Spacing {
        self.spacing
    }

    pub fn geometry(&self) -> Geometry {
        Geometry {
            width: self.width,
            height: self.height,
            spacing: self.spacing,
        }
    }

    pub fn pixels(&self) -> &[T] {
        &self.pixels
    }

    pub fn into_pixels(self) -> Vec<T> {
        self.pixels
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> T {
        self.pixels[y * self.width + x]
    }

    /// Pixel lookup with clamp-to-edge for out-of-range indices.
    #[inline]
    pub fn get_clamped(&self, x: isize, y: isize) -> T {
        let cx = x.clamp(0, self.width as isize - 1) as usize;
        let cy = y.clamp(0, self.height as isize - 1) as usize;
        self.get(cx, cy)
    }

    pub fn min_max(&self) -> (T, T) {
        self.pixels
            .iter()
            .fold((T::infinity(), T::neg_infinity()), |(lo, hi), &v| {
                (lo.min(v), hi.max(v))
            })
    }
}

/// Per-pixel region membership, values restricted to {0, 1}.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryMask {
    width: usize,
    height: usize,
    spacing: SpacingBits,
    values: Vec<u8>,
}

// Spacing stored as raw bits so the mask can derive `Eq`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct SpacingBits(u64, u64);

impl From<Spacing> for SpacingBits {
    fn from(s: Spacing) -> Self {
        SpacingBits(s.x.to_bits(), s.y.to_bits())
    }
}

impl From<SpacingBits> for Spacing {
    fn from(s: SpacingBits) -> Self {
        Spacing {
            x: f64::from_bits(s.0),
            y: f64::from_bits(s.1),
        }
    }
}

impl BinaryMask {
    pub fn new(width: usize, height: usize, spacing: Spacing, values: Vec<u8>) -> Result<Self> {
        check_dims(width, height, values.len())?;
        if let Some(i) = values.iter().position(|&v| v > 1) {
            return Err(Error::InvalidGrid(format!(
                "mask value {} at index {i} is not 0 or 1",
                values[i]
            )));
        }
        Ok(Self {
            width,
            height,
            spacing: spacing.into(),
            values,
        })
    }

    pub fn from_fn(
        width: usize,
        height: usize,
        spacing: Spacing,
        mut f: impl FnMut(usize, usize) -> bool,
    ) -> Result<Self> {
        let mut values = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                values.push(f(x, y) as u8);
            }
        }
        Self::new(width, height, spacing, values)
    }

    pub fn empty_like(geometry: Geometry) -> Self {
        Self {
            width: geometry.width,
            height: geometry.height,
            spacing: geometry.spacing.into(),
            values: vec![0; geometry.len()],
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn spacing(&self) -> Spacing {
        self.spacing.into()
    }

    pub fn geometry(&self) -> Geometry {
        Geometry {
            width: self.width,
            height: self.height,
            spacing: self.spacing.into(),
        }
    }

    pub fn values(&self) -> &[u8] {
        &self.values
    }

    #[inline]
    pub fn is_set(&self, x: usize, y: usize) -> bool {
        self.values[y * self.width + x] != 0
    }

    /// Membership test that treats out-of-grid coordinates as background.
    #[inline]
    pub fn contains(&self, x: isize, y: isize) -> bool {
        x >= 0
            && y >= 0
            && (x as usize) < self.width
            && (y as usize) < self.height
            && self.is_set(x as usize, y as usize)
    }

    pub fn count(&self) -> usize {
        self.values.iter().filter(|&&v| v != 0).count()
    }

    pub fn is_empty(&self) -> bool {
        self.values.iter().all(|&v| v == 0)
    }

    /// Foreground pixel coordinates in row-major order.
    pub fn foreground(&self) -> Vec<(usize, usize)> {
        self.coords_where(1)
    }

    pub fn background(&self) -> Vec<(usize, usize)> {
        self.coords_where(0)
    }

    fn coords_where(&self, v: u8) -> Vec<(usize, usize)> {
        self.values
            .iter()
            .enumerate()
            .filter(|(_, &m)| m == v)
            .map(|(i, _)| (i % self.width, i / self.width))
            .collect()
    }
}
