//! Candidate grids, array layouts and the baseline geometry derived from them.

mod aperture;
mod grid;
mod sampling;

pub use aperture::{aperture_figures, ApertureFigures};
pub use grid::{ArrayLayout, GridConstraints, PositionGrid, Slot, LATTICE48_CSV};
pub use sampling::{quantize, sampling_function, Cell, SamplingFunction};
pub(crate) use sampling::{baseline_cell, sampling_from_positions};

use thiserror::Error;

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Default carrier frequency in GHz.
pub const DEFAULT_FREQUENCY_GHZ: f64 = 38.0;

/// Default UV cell size in wavelengths (half-wavelength lattice).
pub const DEFAULT_CELL_SIZE: f64 = 0.5;

/// Free-space wavelength in millimetres for a carrier in GHz.
pub fn wavelength_mm(frequency_ghz: f64) -> f64 {
    SPEED_OF_LIGHT / (frequency_ghz * 1e9) * 1e3
}

/// Wavelength and UV quantization shared by everything that turns element
/// positions into spatial frequencies.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct UvConfig {
    pub wavelength_mm: f64,
    /// Cell edge in wavelengths.
    pub cell_size: f64,
}

impl UvConfig {
    pub fn new(wavelength_mm: f64, cell_size: f64) -> Self {
        Self {
            wavelength_mm,
            cell_size,
        }
    }

    pub fn from_frequency_ghz(frequency_ghz: f64, cell_size: f64) -> Self {
        Self::new(wavelength_mm(frequency_ghz), cell_size)
    }

    /// Physical length of one UV cell in millimetres.
    pub fn cell_mm(&self) -> f64 {
        self.cell_size * self.wavelength_mm
    }
}

impl Default for UvConfig {
    fn default() -> Self {
        Self::from_frequency_ghz(DEFAULT_FREQUENCY_GHZ, DEFAULT_CELL_SIZE)
    }
}

#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },
    #[error("no slots")]
    NoSlots,
    #[error("duplicate slot id {id}")]
    DuplicateId { id: u32 },
    #[error("slot ids must run 1..={count}; id {id} is out of sequence")]
    NonContiguousIds { id: u32, count: usize },
    #[error("slots {a} and {b} are {distance_mm:.3} mm apart (minimum {min_mm} mm)")]
    Spacing {
        a: u32,
        b: u32,
        distance_mm: f64,
        min_mm: f64,
    },
    #[error("{axis} extent {extent_mm:.3} mm between slots {low} and {high} exceeds {max_mm} mm")]
    Extent {
        axis: char,
        extent_mm: f64,
        max_mm: f64,
        low: u32,
        high: u32,
    },
    #[error("layout references slot {id}, not present in grid {grid:?}")]
    UnknownSlot { id: u32, grid: String },
    #[error("layout repeats slot {id}")]
    DuplicateIndex { id: u32 },
    #[error("layout declares n = {declared} but lists {found} indices")]
    CountMismatch { declared: usize, found: usize },
    #[error("layout targets grid {layout:?} but grid is {grid:?}")]
    GridMismatch { layout: String, grid: String },
    #[error("layout needs at least {needed} elements, has {found}")]
    TooFewElements { needed: usize, found: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
