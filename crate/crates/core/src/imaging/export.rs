//! Image file writers: 16-bit binary PGM, CSV raster and a JSON sidecar.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::SceneImage;
use crate::io::write_atomic;

/// Axis metadata written next to every exported image.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ImageSidecar {
    pub cell_size: f64,
    pub raster: usize,
    pub wavelength_mm: f64,
}

/// Binary PGM (`P5`, maxval 65535, big-endian). Values are scaled linearly so
/// the brightest pixel maps to 65535. Rows are written in raster order
/// (first row is the most negative beta).
pub fn pgm16_bytes(img: &SceneImage) -> Vec<u8> {
    let peak = img.max();
    let mut out = format!("P5\n{} {}\n65535\n", img.width(), img.height()).into_bytes();
    out.reserve(img.pixels().len() * 2);
    for &p in img.pixels() {
        let v = if peak > 0.0 {
            (p / peak * 65535.0).round().clamp(0.0, 65535.0) as u16
        } else {
            0
        };
        out.extend_from_slice(&v.to_be_bytes());
    }
    out
}

/// One line per raster row, comma-separated.
pub fn csv_raster(img: &SceneImage) -> String {
    let mut s = String::with_capacity(img.pixels().len() * 12);
    for r in 0..img.height() {
        for c in 0..img.width() {
            if c > 0 {
                s.push(',');
            }
            let _ = write!(s, "{}", img.get(r, c));
        }
        s.push('\n');
    }
    s
}

pub fn write_pgm16(img: &SceneImage, path: &Path) -> std::io::Result<()> {
    write_atomic(path, &pgm16_bytes(img))
}

pub fn write_csv_raster(img: &SceneImage, path: &Path) -> std::io::Result<()> {
    write_atomic(path, csv_raster(img).as_bytes())
}

pub fn write_sidecar(meta: &ImageSidecar, path: &Path) -> std::io::Result<()> {
    let json = serde_json::to_string_pretty(meta).expect("sidecar serializes");
    write_atomic(path, json.as_bytes())
}
