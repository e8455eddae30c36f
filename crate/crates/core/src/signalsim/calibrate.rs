use std::f64::consts::PI;

use num_complex::Complex64;

use super::{steering, SignalError, VisibilityEstimate};
use crate::geometry::{ArrayLayout, PositionGrid};

const GAUSS_NEWTON_ITERS: usize = 20;

fn wrap(x: f64) -> f64 {
    let y = (x + PI).rem_euclid(2.0 * PI) - PI;
    if y == -PI {
        PI
    } else {
        y
    }
}

/// Solves `measured(i, j) ≈ I · g_i · conj(g_j) · model(i, j)` for a single
/// point source at `source = (α, β)` and returns weights `w_i = 1 / g_i`.
///
/// Log-amplitudes come from a closed-form least-squares fit over all cross
/// pairs with geometric-mean-one anchoring. Phases start from the pairs with
/// channel 0 (anchored at 0) and are refined by Gauss-Newton on wrapped
/// residuals; any final pair residual beyond π/2 is reported.
pub fn calibrate_point_source(
    measured: &VisibilityEstimate,
    layout: &ArrayLayout,
    grid: &PositionGrid,
    wavelength_mm: f64,
    source: (f64, f64),
) -> Result<Vec<Complex64>, SignalError> {
    layout.check_membership(grid)?;
    calibrate_from_positions(measured, &layout.positions(grid), wavelength_mm, source)
}

pub(crate) fn calibrate_from_positions(
    measured: &VisibilityEstimate,
    positions: &[(f64, f64)],
    wavelength_mm: f64,
    source: (f64, f64),
) -> Result<Vec<Complex64>, SignalError> {
    let n = positions.len();
    if measured.n() != n {
        return Err(SignalError::EstimateSize {
            expected: n,
            found: measured.n(),
        });
    }
    if n < 3 {
        return Err(SignalError::RankDeficient { found: n });
    }
    if !(wavelength_mm > 0.0) {
        return Err(SignalError::InvalidWavelength);
    }
    let model: Vec<Complex64> = positions
        .iter()
        .map(|&p| steering(p, source.0, source.1, wavelength_mm))
        .collect();
    // r[i][j] = measured / model for i < j
    let mut log_amp = vec![vec![0.0; n]; n];
    let mut phase = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let r = measured.get(i, j) / (model[i] * model[j].conj());
            let m = r.norm();
            if !(m.is_finite() && m > 0.0) {
                return Err(SignalError::DegeneratePair { i, j });
            }
            log_amp[i][j] = m.ln();
            log_amp[j][i] = log_amp[i][j];
            phase[i][j] = r.arg();
            phase[j][i] = -phase[i][j];
        }
    }

    // log|r_ij| = b_i + b_j: row sums give b in closed form.
    let row: Vec<f64> = (0..n)
        .map(|i| (0..n).filter(|&j| j != i).map(|j| log_amp[i][j]).sum())
        .collect();
    let total: f64 = row.iter().sum::<f64>() / 2.0;
    let b_sum = total / (n - 1) as f64;
    let b: Vec<f64> = row
        .iter()
        .map(|s| (s - b_sum) / (n - 2) as f64)
        .collect();
    let b_mean = b.iter().sum::<f64>() / n as f64;
    let amp: Vec<f64> = b.iter().map(|v| v - b_mean).collect();

    // arg r_ij = φ_i - φ_j
    let mut phi: Vec<f64> = (0..n).map(|i| if i == 0 { 0.0 } else { -phase[0][i] }).collect();
    for _ in 0..GAUSS_NEWTON_ITERS {
        let delta: Vec<f64> = (0..n)
            .map(|i| {
                (0..n)
                    .filter(|&j| j != i)
                    .map(|j| wrap(phase[i][j] - (phi[i] - phi[j])))
                    .sum::<f64>()
                    / n as f64
            })
            .collect();
        let d0 = delta[0];
        let mut step = 0.0f64;
        for (p, d) in phi.iter_mut().zip(&delta) {
            *p += d - d0;
            step = step.max((d - d0).abs());
        }
        if step < 1e-15 {
            break;
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            let residual = wrap(phase[i][j] - (phi[i] - phi[j]));
            if residual.abs() > PI / 2.0 {
                return Err(SignalError::PhaseResidual { i, j, residual });
            }
        }
    }
    Ok(amp
        .iter()
        .zip(&phi)
        .map(|(&a, &p)| Complex64::from_polar(a.exp(), wrap(p)).inv())
        .collect())
}

/// `w_i · conj(w_j) · R_ij` for every pair.
pub fn apply_weights(
    est: &VisibilityEstimate,
    weights: &[Complex64],
) -> Result<VisibilityEstimate, SignalError> {
    if weights.len() != est.n() {
        return Err(SignalError::EstimateSize {
            expected: est.n(),
            found: weights.len(),
        });
    }
    Ok(est.map_upper(|i, j, v| weights[i] * weights[j].conj() * v))
}
