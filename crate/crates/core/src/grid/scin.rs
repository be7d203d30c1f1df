//! SCIN image files: a JSON header next to a raw little-endian row-major payload.
//!
//! ```json
//! {"width": 128, "height": 128, "spacing_mm": [1.0, 1.0], "dtype": "u16", "data": "case.raw"}
//! ```
//! Masks use dtype `u8` restricted to {0, 1}.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fsutil::{write_atomic, write_json_atomic};
use crate::grid::{BinaryMask, ImageGrid, Spacing};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Dtype {
    U8,
    U16,
    F32,
}

impl Dtype {
    pub fn size(self) -> usize {
        match self {
            Dtype::U8 => 1,
            Dtype::U16 => 2,
            Dtype::F32 => 4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScinHeader {
    pub width: usize,
    pub height: usize,
    pub spacing_mm: [f64; 2],
    pub dtype: Dtype,
    pub data: String,
}

impl ScinHeader {
    fn spacing(&self, path: &Path) -> Result<Spacing> {
        Spacing::new(self.spacing_mm[0], self.spacing_mm[1])
            .map_err(|e| Error::schema(path, e.to_string()))
    }
}

fn read_payload(header_path: &Path) -> Result<(ScinHeader, Vec<u8>)> {
    let text = fs::read(header_path).map_err(|e| Error::io(header_path, e))?;
    let header: ScinHeader =
        serde_json::from_slice(&text).map_err(|e| Error::schema(header_path, e.to_string()))?;
    if header.width == 0 || header.height == 0 {
        return Err(Error::schema(header_path, "width and height must be positive"));
    }
    let data_path = header_path
        .parent()
        .unwrap_or_else(|| Path::new("."))
        .join(&header.data);
    let bytes = fs::read(&data_path).map_err(|e| Error::io(&data_path, e))?;
    let expected = header.width * header.height * header.dtype.size();
    if bytes.len() != expected {
        return Err(Error::schema(
            &data_path,
            format!(
                "payload has {} bytes, header implies {expected}",
                bytes.len()
            ),
        ));
    }
    Ok((header, bytes))
}

/// Reads a `u16` or `f32` image.
pub fn read_image<T: Scalar>(header_path: &Path) -> Result<ImageGrid<T>> {
    let (header, bytes) = read_payload(header_path)?;
    let spacing = header.spacing(header_path)?;
    let pixels: Vec<T> = match header.dtype {
        Dtype::U16 => bytes
            .chunks_exact(2)
            .map(|c| T::lit(u16::from_le_bytes([c[0], c[1]]) as f64))
            .collect(),
        Dtype::F32 => bytes
            .chunks_exact(4)
            .map(|c| T::lit(f32::from_le_bytes([c[0], c[1], c[2], c[3]]) as f64))
            .collect(),
        Dtype::U8 => {
            return Err(Error::schema(
                header_path,
                "dtype u8 is reserved for masks; expected u16 or f32",
            ))
        }
    };
    ImageGrid::new(header.width, header.height, spacing, pixels)
        .map_err(|e| Error::schema(header_path, e.to_string()))
}

pub fn read_mask(header_path: &Path) -> Result<BinaryMask> {
    let (header, bytes) = read_payload(header_path)?;
    if header.dtype != Dtype::U8 {
        return Err(Error::schema(header_path, "masks must use dtype u8"));
    }
    let spacing = header.spacing(header_path)?;
    BinaryMask::new(header.width, header.height, spacing, bytes)
        .map_err(|e| Error::schema(header_path, e.to_string()))
}

fn payload_name(header_path: &Path) -> Result<(PathBuf, String)> {
    let stem = header_path
        .file_stem()
        .ok_or_else(|| Error::InvalidArgument(format!("bad header path {}", header_path.display())))?
        .to_string_lossy()
        .into_owned();
    let name = format!("{stem}.raw");
    Ok((header_path.with_file_name(&name), name))
}

fn write_with(header_path: &Path, width: usize, height: usize, spacing: Spacing, dtype: Dtype, payload: Vec<u8>) -> Result<()> {
    let (data_path, name) = payload_name(header_path)?;
    write_atomic(&data_path, &payload)?;
    let header = ScinHeader {
        width,
        height,
        spacing_mm: [spacing.x, spacing.y],
        dtype,
        data: name,
    };
    write_json_atomic(header_path, &header)
}

/// Writes counts as `u16`, rounding and saturating each pixel.
pub fn write_image_u16<T: Scalar>(header_path: &Path, img: &ImageGrid<T>) -> Result<()> {
    let payload = img
        .pixels()
        .iter()
        .flat_map(|v| (v.as_f64().round().clamp(0.0, u16::MAX as f64) as u16).to_le_bytes())
        .collect();
    write_with(header_path, img.width(), img.height(), img.spacing(), Dtype::U16, payload)
}

pub fn write_image_f32<T: Scalar>(header_path: &Path, img: &ImageGrid<T>) -> Result<()> {
    let payload = img
        .pixels()
        .iter()
        .flat_map(|v| (v.as_f64() as f32).to_le_bytes())
        .collect();
    write_with(header_path, img.width(), img.height(), img.spacing(), Dtype::F32, payload)
}

pub fn write_mask(header_path: &Path, mask: &BinaryMask) -> Result<()> {
    write_with(
        header_path,
        mask.width(),
        mask.height(),
        mask.spacing(),
        Dtype::U8,
        mask.values().to_vec(),
    )
}
