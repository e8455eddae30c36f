use serde::{Deserialize, Serialize};

use super::{ArrayLayout, GeometryError, PositionGrid};

/// Resolution and unambiguous field of view of a layout, per axis.
///
/// Resolution is the half-power beamwidth `0.88 λ / D` of the widest baseline
/// along an axis; the field of view is the direction-cosine half extent
/// `λ / (2 d)` set by the smallest nonzero element separation along that axis.
/// An axis on which every element shares one coordinate has no figures and
/// reports `None`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ApertureFigures {
    pub span_x_mm: Option<f64>,
    pub span_y_mm: Option<f64>,
    pub spacing_x_mm: Option<f64>,
    pub spacing_y_mm: Option<f64>,
    pub res_alpha_rad: Option<f64>,
    pub res_beta_rad: Option<f64>,
    pub fov_alpha: Option<f64>,
    pub fov_beta: Option<f64>,
}

/// Half-power beamwidth factor for a uniformly filled aperture.
pub const HPBW_FACTOR: f64 = 0.88;

// Coordinates closer than this along an axis count as aligned.
const AXIS_TOL_MM: f64 = 1e-9;

impl ApertureFigures {
    pub fn from_positions(pos: &[(f64, f64)], wavelength_mm: f64) -> Self {
        let (span_x, spacing_x) = axis_extremes(pos.iter().map(|p| p.0));
        let (span_y, spacing_y) = axis_extremes(pos.iter().map(|p| p.1));
        Self {
            span_x_mm: span_x,
            span_y_mm: span_y,
            spacing_x_mm: spacing_x,
            spacing_y_mm: spacing_y,
            res_alpha_rad: span_x.map(|d| HPBW_FACTOR * wavelength_mm / d),
            res_beta_rad: span_y.map(|d| HPBW_FACTOR * wavelength_mm / d),
            fov_alpha: spacing_x.map(|d| wavelength_mm / (2.0 * d)),
            fov_beta: spacing_y.map(|d| wavelength_mm / (2.0 * d)),
        }
    }

    /// `max(res_alpha, res_beta)`, defined only when both axes are.
    pub fn worst_resolution(&self) -> Option<f64> {
        Some(self.res_alpha_rad?.max(self.res_beta_rad?))
    }

    /// `min(fov_alpha, fov_beta)`, defined only when both axes are.
    pub fn worst_fov(&self) -> Option<f64> {
        Some(self.fov_alpha?.min(self.fov_beta?))
    }
}

/// Largest and smallest nonzero pairwise separation of the given coordinates.
fn axis_extremes(coords: impl Iterator<Item = f64>) -> (Option<f64>, Option<f64>) {
    let mut c: Vec<f64> = coords.collect();
    c.sort_by(f64::total_cmp);
    let (Some(&lo), Some(&hi)) = (c.first(), c.last()) else {
        return (None, None);
    };
    let span = hi - lo;
    if span <= AXIS_TOL_MM {
        return (None, None);
    }
    // After sorting, the closest distinct pair is adjacent.
    let spacing = c
        .windows(2)
        .map(|w| w[1] - w[0])
        .filter(|&d| d > AXIS_TOL_MM)
        .fold(f64::INFINITY, f64::min);
    (Some(span), Some(spacing))
}

pub fn aperture_figures(
    layout: &ArrayLayout,
    grid: &PositionGrid,
    wavelength_mm: f64,
) -> Result<ApertureFigures, GeometryError> {
    layout.check_membership(grid)?;
    if layout.len() < 2 {
        return Err(GeometryError::TooFewElements {
            needed: 2,
            found: layout.len(),
        });
    }
    if !(wavelength_mm > 0.0) {
        return Err(GeometryError::InvalidParameter("wavelength must be positive".into()));
    }
    Ok(ApertureFigures::from_positions(
        &layout.positions(grid),
        wavelength_mm,
    ))
}
