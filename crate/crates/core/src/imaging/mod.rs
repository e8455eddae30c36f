//! Point spread functions, visibility sampling and dirty-image reconstruction.
//!
//! Conventions used throughout:
//!
//! * The visibility is the forward transform of intensity,
//!   `V(u, v) = Σ I(α, β) exp(-j2π(uα + vβ))`.
//! * Images are recovered with the inverse transform scaled by
//!   `1 / (raster cells)`, so a fully sampled visibility reconstructs the
//!   scene exactly.
//! * Images are DC-centred: pixel `n / 2` of each axis is direction cosine 0,
//!   and a UV lattice of `n` cells of `cell_size` wavelengths maps to image
//!   pixels spaced `1 / (n * cell_size)`.
//! * Sampled cells are weighted 1 regardless of multiplicity; multiplicities
//!   are carried alongside in the mask for the metrics.

pub mod export;
mod fft;
mod image;
mod scene;
mod visibility;

pub use fft::{fft2, fftshift, ifftshift};
pub use image::{Axis, ComplexImage, Raster, SceneImage};
pub use scene::{draw_shapes, generate_random_scene, render_shapes, SceneParams, Shape};
pub use visibility::VisibilityGrid;

use num_complex::Complex64;
use rustfft::FftDirection;
use thiserror::Error;

use crate::geometry::SamplingFunction;

/// Default square raster edge for PSFs and scenes.
pub const DEFAULT_RASTER: usize = 256;

#[derive(Debug, Error)]
pub enum ImagingError {
    #[error("sampling support needs a raster of at least {required} cells, got {raster}")]
    SupportExceedsRaster { required: usize, raster: usize },
    #[error("UV lattice mismatch: cell size {left} vs {right}")]
    LatticeMismatch { left: f64, right: f64 },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("pixel {index} is negative or not finite")]
    NegativeIntensity { index: usize },
    #[error("invalid axis: {0}")]
    InvalidAxis(String),
    #[error("sampling function is empty")]
    EmptySampling,
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Point spread function of a sampling function on a `raster`² UV lattice,
/// peak-normalized so the largest magnitude is 1.
pub fn psf(s: &SamplingFunction, raster: usize) -> Result<ComplexImage, ImagingError> {
    if s.distinct() == 0 {
        return Err(ImagingError::EmptySampling);
    }
    let mask = VisibilityGrid::from_sampling(s, raster)?;
    let mut image = dirty_image(&mask);
    let peak = image.max_norm();
    let scaled: Vec<Complex64> = image.pixels().iter().map(|p| p / peak).collect();
    image = ComplexImage::new(*image.alpha(), *image.beta(), scaled)?;
    Ok(image)
}

/// Full forward transform of a DC-centred square scene; every cell sampled.
pub fn scene_visibility(scene: &SceneImage) -> Result<VisibilityGrid, ImagingError> {
    let n = scene.width();
    if scene.height() != n {
        return Err(ImagingError::DimensionMismatch(format!(
            "scene must be square, got {}x{}",
            scene.height(),
            n
        )));
    }
    let cell = scene
        .alpha()
        .uv_cell_size()
        .ok_or_else(|| ImagingError::InvalidAxis("alpha axis is not DC-centred".into()))?;
    let cell_b = scene
        .beta()
        .uv_cell_size()
        .ok_or_else(|| ImagingError::InvalidAxis("beta axis is not DC-centred".into()))?;
    if (cell - cell_b).abs() > 1e-9 * cell {
        return Err(ImagingError::LatticeMismatch {
            left: cell,
            right: cell_b,
        });
    }
    let complex: Vec<Complex64> = scene
        .pixels()
        .iter()
        .map(|&p| Complex64::new(p, 0.0))
        .collect();
    let mut data = ifftshift(&complex, n, n);
    fft2(&mut data, n, n, FftDirection::Forward);
    Ok(VisibilityGrid::from_parts(n, cell, data, vec![1; n * n]))
}

/// Keeps only the cells occupied by `s`; the output mask carries
/// multiplicities.
pub fn sample_visibility(
    v: &VisibilityGrid,
    s: &SamplingFunction,
) -> Result<VisibilityGrid, ImagingError> {
    let sampled = VisibilityGrid::from_sampling(s, v.size())?;
    if (sampled.cell_size() - v.cell_size()).abs() > 1e-9 * v.cell_size() {
        return Err(ImagingError::LatticeMismatch {
            left: v.cell_size(),
            right: sampled.cell_size(),
        });
    }
    let values = v
        .values()
        .iter()
        .zip(sampled.mask())
        .map(|(&val, &m)| if m > 0 { val } else { Complex64::new(0.0, 0.0) })
        .collect();
    Ok(VisibilityGrid::from_parts(
        v.size(),
        v.cell_size(),
        values,
        sampled.mask().to_vec(),
    ))
}

/// Complex dirty image: scaled inverse transform of the visibility grid.
pub fn dirty_image(v: &VisibilityGrid) -> ComplexImage {
    let n = v.size();
    let mut data = v.values().to_vec();
    fft2(&mut data, n, n, FftDirection::Inverse);
    let axis = Axis::for_uv(n, v.cell_size());
    ComplexImage::new(axis, axis, fftshift(&data, n, n)).expect("square raster")
}

/// Magnitude of the dirty image.
pub fn reconstruct(v: &VisibilityGrid) -> SceneImage {
    dirty_image(v).magnitude()
}

/// Circular convolution of a scene with a complex PSF on the same raster;
/// magnitude taken after convolving, then peak-normalized.
pub fn simulate_reconstruction(
    scene: &SceneImage,
    psf: &ComplexImage,
) -> Result<SceneImage, ImagingError> {
    if !scene.same_geometry(psf) {
        return Err(ImagingError::DimensionMismatch(
            "scene and PSF rasters differ".into(),
        ));
    }
    let (rows, cols) = (scene.height(), scene.width());
    let complex: Vec<Complex64> = scene
        .pixels()
        .iter()
        .map(|&p| Complex64::new(p, 0.0))
        .collect();
    let mut a = ifftshift(&complex, rows, cols);
    let mut b = ifftshift(psf.pixels(), rows, cols);
    fft2(&mut a, rows, cols, FftDirection::Forward);
    fft2(&mut b, rows, cols, FftDirection::Forward);
    a.iter_mut().zip(&b).for_each(|(x, y)| *x *= y);
    fft2(&mut a, rows, cols, FftDirection::Inverse);
    let out = fftshift(&a, rows, cols);
    let mag = SceneImage::new(
        *scene.alpha(),
        *scene.beta(),
        out.iter().map(|p| p.norm()).collect(),
    )?;
    Ok(mag.peak_normalized())
}
