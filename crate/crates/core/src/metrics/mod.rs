//! Layout and image quality figures: unique-sample counts, sidelobe levels
//! and structural similarity.

mod sll;
mod ssim;
mod study;

pub use sll::{avg_sll, psl, sll_profile, MainLobe, SllProfile, DEFAULT_RADIAL_STEP_PX};
pub use ssim::{ssim, SsimParams};
pub use study::{scene_ssim, scene_study, SsimTable, StudyError, StudyLayout};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{ApertureFigures, SamplingFunction};
use crate::imaging::SceneImage;

#[derive(Debug, Error, PartialEq)]
pub enum MetricsError {
    #[error("main lobe fills raster")]
    MainLobeFillsRaster,
    #[error("PSF raster too small for a radial profile")]
    RasterTooSmall,
    #[error("image dimensions differ: {0}")]
    DimensionMismatch(String),
    #[error("field of view is zero or undefined")]
    ZeroFov,
    #[error("field of view {fov} exceeds image half-extent {extent}")]
    FovExceedsImage { fov: f64, extent: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

/// Distinct occupied cells and the rest of the N² pair samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleCounts {
    pub unique: usize,
    pub redundant: usize,
}

pub fn count_unique(s: &SamplingFunction) -> SampleCounts {
    let unique = s.distinct();
    SampleCounts {
        unique,
        redundant: s.total() as usize - unique,
    }
}

/// Summary figures for one layout or image.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub unique_samples: usize,
    pub redundant_samples: usize,
    pub avg_sll_db: f64,
    pub psl_db: f64,
    pub ssim: Option<f64>,
}

/// Sub-raster with `|α| ≤ fov_alpha` and `|β| ≤ fov_beta`.
pub fn crop_to_fov(
    img: &SceneImage,
    fov_alpha: f64,
    fov_beta: f64,
) -> Result<SceneImage, MetricsError> {
    if !(fov_alpha > 0.0 && fov_beta > 0.0) {
        return Err(MetricsError::ZeroFov);
    }
    let range = |axis: &crate::imaging::Axis, fov: f64| -> Result<(usize, usize), MetricsError> {
        let extent = axis.max_abs();
        let tol = 1e-9 * axis.step;
        if fov > extent + tol {
            return Err(MetricsError::FovExceedsImage { fov, extent });
        }
        let inside: Vec<usize> = (0..axis.len)
            .filter(|&k| axis.value(k).abs() <= fov + tol)
            .collect();
        match (inside.first(), inside.last()) {
            (Some(&lo), Some(&hi)) => Ok((lo, hi + 1)),
            _ => Err(MetricsError::ZeroFov),
        }
    };
    let (c0, c1) = range(img.alpha(), fov_alpha)?;
    let (r0, r1) = range(img.beta(), fov_beta)?;
    Ok(img.crop(r0, r1, c0, c1))
}

/// [`crop_to_fov`] with the field of view of a layout.
pub fn crop_to_aperture_fov(
    img: &SceneImage,
    fov: &ApertureFigures,
) -> Result<SceneImage, MetricsError> {
    match (fov.fov_alpha, fov.fov_beta) {
        (Some(a), Some(b)) => crop_to_fov(img, a, b),
        _ => Err(MetricsError::ZeroFov),
    }
}
