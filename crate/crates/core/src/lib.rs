//! Sparse receive-array layout design for active incoherent millimeter-wave
//! (AIM) interferometric imaging.
//!
//! The crate covers the whole chain from candidate element positions to image
//! quality numbers:
//!
//! * [`geometry`]: position grids, array layouts, the quantized UV sampling
//!   function and the closed-form resolution / field-of-view figures.
//! * [`imaging`]: point spread functions, visibility sampling, dirty-image
//!   reconstruction and random test scenes.
//! * [`signalsim`]: snapshot-level Monte Carlo of receiver cross-correlations
//!   and point-source gain calibration.
//! * [`metrics`]: unique-sample counts, sidelobe profiles and SSIM.
//! * [`optimize`]: seeded random search and an NSGA-II style genetic
//!   algorithm over layouts.
//!
//! Data-parallel inner loops run on rayon when the `parallel` feature is
//! enabled (the default) and fall back to plain iterators otherwise. Results
//! never depend on which path ran.

pub mod geometry;
pub mod imaging;
pub mod io;
pub mod metrics;
pub mod optimize;
pub mod par;
pub mod signalsim;

pub use geometry::{
    aperture_figures, sampling_function, ApertureFigures, ArrayLayout, Cell, GeometryError,
    GridConstraints, PositionGrid, SamplingFunction, Slot, UvConfig,
};
