use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::ImagingError;

/// Uniformly spaced direction-cosine axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub start: f64,
    pub step: f64,
    pub len: usize,
}

impl Axis {
    /// Axis of `len` samples with sample `len / 2` at zero.
    pub fn centered(len: usize, step: f64) -> Self {
        Self {
            start: -((len / 2) as f64) * step,
            step,
            len,
        }
    }

    /// Image-plane axis conjugate to a `len`-cell UV lattice of `cell_size`
    /// wavelengths: step `1 / (len * cell_size)`.
    pub fn for_uv(len: usize, cell_size: f64) -> Self {
        Self::centered(len, 1.0 / (len as f64 * cell_size))
    }

    pub fn value(&self, k: usize) -> f64 {
        self.start + k as f64 * self.step
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.len).map(|k| self.value(k)).collect()
    }

    /// Largest `|coordinate|` on the axis.
    pub fn max_abs(&self) -> f64 {
        if self.len == 0 {
            return 0.0;
        }
        self.start.abs().max(self.value(self.len - 1).abs())
    }

    /// UV cell size implied by this axis, if it is DC-centred.
    pub fn uv_cell_size(&self) -> Option<f64> {
        let c = Axis::centered(self.len, self.step);
        let tol = 1e-9 * self.step.abs().max(1e-300);
        ((c.start - self.start).abs() <= tol && self.step > 0.0)
            .then(|| 1.0 / (self.len as f64 * self.step))
    }

    pub(crate) fn same_as(&self, other: &Axis) -> bool {
        let tol = 1e-9 * self.step.abs();
        self.len == other.len
            && (self.start - other.start).abs() <= tol
            && (self.step - other.step).abs() <= tol
    }
}

/// Row-major raster on a direction-cosine grid; rows follow `beta`, columns
/// follow `alpha`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Raster<T> {
    alpha: Axis,
    beta: Axis,
    pixels: Vec<T>,
}

/// Non-negative intensity image.
pub type SceneImage = Raster<f64>;

/// Complex-valued image (dirty image before magnitude, PSF).
pub type ComplexImage = Raster<Complex64>;

impl<T: Copy> Raster<T> {
    fn build(alpha: Axis, beta: Axis, pixels: Vec<T>) -> Result<Self, ImagingError> {
        if pixels.len() != alpha.len * beta.len {
            return Err(ImagingError::DimensionMismatch(format!(
                "{} pixels for a {}x{} raster",
                pixels.len(),
                beta.len,
                alpha.len
            )));
        }
        if !(alpha.step > 0.0 && beta.step > 0.0) {
            return Err(ImagingError::InvalidAxis("axis steps must be positive".into()));
        }
        Ok(Self {
            alpha,
            beta,
            pixels,
        })
    }

    pub fn alpha(&self) -> &Axis {
        &self.alpha
    }

    pub fn beta(&self) -> &Axis {
        &self.beta
    }

    pub fn width(&self) -> usize {
        self.alpha.len
    }

    pub fn height(&self) -> usize {
        self.beta.len
    }

    pub fn pixels(&self) -> &[T] {
        &self.pixels
    }

    pub fn get(&self, row: usize, col: usize) -> T {
        self.pixels[row * self.alpha.len + col]
    }

    pub fn same_geometry<U>(&self, other: &Raster<U>) -> bool {
        self.alpha.same_as(&other.alpha) && self.beta.same_as(&other.beta)
    }

    pub(crate) fn map<U: Copy>(&self, f: impl Fn(T) -> U) -> Raster<U> {
        Raster {
            alpha: self.alpha,
            beta: self.beta,
            pixels: self.pixels.iter().map(|&p| f(p)).collect(),
        }
    }

    /// Sub-raster of rows `r0..r1` and columns `c0..c1`.
    pub fn crop(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> Self {
        let mut pixels = Vec::with_capacity((r1 - r0) * (c1 - c0));
        for r in r0..r1 {
            pixels.extend_from_slice(&self.pixels[r * self.alpha.len + c0..r * self.alpha.len + c1]);
        }
        Self {
            alpha: Axis {
                start: self.alpha.value(c0),
                step: self.alpha.step,
                len: c1 - c0,
            },
            beta: Axis {
                start: self.beta.value(r0),
                step: self.beta.step,
                len: r1 - r0,
            },
            pixels,
        }
    }
}

impl Raster<f64> {
    /// Intensity image; every pixel must be finite and non-negative.
    pub fn new(alpha: Axis, beta: Axis, pixels: Vec<f64>) -> Result<Self, ImagingError> {
        if let Some(k) = pixels.iter().position(|p| !(p.is_finite() && *p >= 0.0)) {
            return Err(ImagingError::NegativeIntensity { index: k });
        }
        Self::build(alpha, beta, pixels)
    }

    pub fn zeros(alpha: Axis, beta: Axis) -> Self {
        Self {
            pixels: vec![0.0; alpha.len * beta.len],
            alpha,
            beta,
        }
    }

    /// Square image on the grid conjugate to a `size`-cell UV lattice.
    pub fn zeros_for_uv(size: usize, cell_size: f64) -> Self {
        let a = Axis::for_uv(size, cell_size);
        Self::zeros(a, a)
    }

    pub(crate) fn pixels_mut(&mut self) -> &mut [f64] {
        &mut self.pixels
    }

    pub fn max(&self) -> f64 {
        self.pixels.iter().copied().fold(0.0, f64::max)
    }

    /// Divides by the largest pixel; an all-zero image is returned as is.
    pub fn peak_normalized(&self) -> Self {
        let peak = self.max();
        if peak > 0.0 {
            self.map(|p| p / peak)
        } else {
            self.clone()
        }
    }
}

impl Raster<Complex64> {
    pub fn new(alpha: Axis, beta: Axis, pixels: Vec<Complex64>) -> Result<Self, ImagingError> {
        Self::build(alpha, beta, pixels)
    }

    pub fn magnitude(&self) -> SceneImage {
        self.map(|p| p.norm())
    }

    pub fn max_norm(&self) -> f64 {
        self.pixels.iter().map(|p| p.norm()).fold(0.0, f64::max)
    }
}
