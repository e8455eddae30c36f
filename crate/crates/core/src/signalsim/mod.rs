//! Snapshot-level simulation of receiver cross-correlations and point-source
//! gain calibration.
//!
//! Scene points are independent circular complex Gaussian emitters. Receiver
//! `i` at `(x_i, y_i)` sees each point through the steering phasor
//! `exp(-j2π(x_i α + y_i β)/λ)`, so the expected cross-product
//! `<E_i E_j*>` equals the visibility at `u = (x_i - x_j)/λ` under the same
//! sign convention as [`crate::imaging`].
//!
//! Snapshots are generated in fixed chunks of [`SNAPSHOT_CHUNK`]; chunk `c`
//! draws from ChaCha8 stream `c` of the run seed and chunk sums are added in
//! chunk order, so estimates are bit-identical with or without the
//! `parallel` feature.

mod calibrate;
mod estimate;

pub use calibrate::{apply_weights, calibrate_point_source};
pub use estimate::VisibilityEstimate;

use std::f64::consts::PI;
use std::path::Path;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{ArrayLayout, GeometryError, PositionGrid, UvConfig};
use crate::imaging::{ImagingError, VisibilityGrid};
use crate::par;

/// Snapshots per independently seeded chunk.
pub const SNAPSHOT_CHUNK: usize = 1024;

#[derive(Debug, Error)]
pub enum SignalError {
    #[error("emitter {index} at ({alpha}, {beta}) is outside the unit circle")]
    InvalidDirection { index: usize, alpha: f64, beta: f64 },
    #[error("emitter {index} has negative or non-finite intensity")]
    InvalidIntensity { index: usize },
    #[error("snapshot count must be at least 1")]
    ZeroSnapshots,
    #[error("channel model has {found} gains, layout has {expected} elements")]
    ChannelCount { expected: usize, found: usize },
    #[error("gain {index}: amplitude must be positive and finite")]
    InvalidGain { index: usize },
    #[error("noise power must be non-negative and finite")]
    InvalidNoise,
    #[error("wavelength must be positive")]
    InvalidWavelength,
    #[error("calibration needs at least 3 channels for independent pair equations, got {found}")]
    RankDeficient { found: usize },
    #[error("pair ({i}, {j}) has zero or non-finite correlation")]
    DegeneratePair { i: usize, j: usize },
    #[error("phase residual {residual:.3} rad on pair ({i}, {j}) exceeds π/2")]
    PhaseResidual { i: usize, j: usize, residual: f64 },
    #[error("estimate covers {found} channels, expected {expected}")]
    EstimateSize { expected: usize, found: usize },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Imaging(#[from] ImagingError),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EmitterPoint {
    pub alpha: f64,
    pub beta: f64,
    pub intensity: f64,
}

/// Point emitters in direction cosines. JSON form:
/// `{"points": [{"alpha": .., "beta": .., "intensity": ..}]}`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct EmitterScene {
    pub points: Vec<EmitterPoint>,
}

impl EmitterScene {
    pub fn new(points: Vec<EmitterPoint>) -> Result<Self, SignalError> {
        let scene = Self { points };
        scene.validate()?;
        Ok(scene)
    }

    pub fn point(alpha: f64, beta: f64, intensity: f64) -> Result<Self, SignalError> {
        Self::new(vec![EmitterPoint {
            alpha,
            beta,
            intensity,
        }])
    }

    pub fn validate(&self) -> Result<(), SignalError> {
        for (index, p) in self.points.iter().enumerate() {
            if !(p.alpha.is_finite() && p.beta.is_finite())
                || p.alpha * p.alpha + p.beta * p.beta > 1.0
            {
                return Err(SignalError::InvalidDirection {
                    index,
                    alpha: p.alpha,
                    beta: p.beta,
                });
            }
            if !(p.intensity.is_finite() && p.intensity >= 0.0) {
                return Err(SignalError::InvalidIntensity { index });
            }
        }
        Ok(())
    }

    pub fn from_json(s: &str) -> Result<Self, SignalError> {
        let scene: Self = serde_json::from_str(s)?;
        scene.validate()?;
        Ok(scene)
    }

    pub fn load(path: &Path) -> Result<Self, SignalError> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelGain {
    pub amp: f64,
    pub phase_rad: f64,
}

impl ChannelGain {
    pub fn to_complex(self) -> Complex64 {
        Complex64::from_polar(self.amp, self.phase_rad)
    }
}

/// Per-receiver complex gains plus additive channel noise. JSON form:
/// `{"gains": [{"amp": .., "phase_rad": ..}], "noise_power": ..}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelModel {
    pub gains: Vec<ChannelGain>,
    pub noise_power: f64,
}

impl ChannelModel {
    /// Unit gains, no noise.
    pub fn ideal(n: usize) -> Self {
        Self {
            gains: vec![
                ChannelGain {
                    amp: 1.0,
                    phase_rad: 0.0
                };
                n
            ],
            noise_power: 0.0,
        }
    }

    /// Seeded random gains with amplitude in `amp_range` and phase over the
    /// full circle.
    pub fn random(n: usize, amp_range: (f64, f64), noise_power: f64, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let gains = (0..n)
            .map(|_| ChannelGain {
                amp: rng.random_range(amp_range.0..=amp_range.1),
                phase_rad: rng.random_range(-PI..PI),
            })
            .collect();
        Self { gains, noise_power }
    }

    pub fn validate(&self) -> Result<(), SignalError> {
        for (index, g) in self.gains.iter().enumerate() {
            if !(g.amp.is_finite() && g.amp > 0.0 && g.phase_rad.is_finite()) {
                return Err(SignalError::InvalidGain { index });
            }
        }
        if !(self.noise_power.is_finite() && self.noise_power >= 0.0) {
            return Err(SignalError::InvalidNoise);
        }
        Ok(())
    }

    pub fn from_json(s: &str) -> Result<Self, SignalError> {
        let model: Self = serde_json::from_str(s)?;
        model.validate()?;
        Ok(model)
    }

    pub fn load(path: &Path) -> Result<Self, SignalError> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("channel model serializes")
    }
}

/// Receiver steering phasor for one element and one direction.
pub(crate) fn steering(pos: (f64, f64), alpha: f64, beta: f64, wavelength_mm: f64) -> Complex64 {
    Complex64::from_polar(1.0, -2.0 * PI * (pos.0 * alpha + pos.1 * beta) / wavelength_mm)
}

fn gaussian(rng: &mut ChaCha8Rng, variance: f64) -> Complex64 {
    let s = (variance / 2.0).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(s * re, s * im)
}

/// Snapshot-averaged cross-products `<E_i E_j*>` for every receiver pair.
pub fn simulate_visibility(
    scene: &EmitterScene,
    layout: &ArrayLayout,
    grid: &PositionGrid,
    wavelength_mm: f64,
    channel: &ChannelModel,
    snapshots: u64,
    seed: u64,
) -> Result<VisibilityEstimate, SignalError> {
    layout.check_membership(grid)?;
    simulate_from_positions(
        scene,
        &layout.positions(grid),
        wavelength_mm,
        channel,
        snapshots,
        seed,
    )
}

/// [`simulate_visibility`] on raw element positions in millimetres.
pub fn simulate_from_positions(
    scene: &EmitterScene,
    positions: &[(f64, f64)],
    wavelength_mm: f64,
    channel: &ChannelModel,
    snapshots: u64,
    seed: u64,
) -> Result<VisibilityEstimate, SignalError> {
    scene.validate()?;
    channel.validate()?;
    if snapshots == 0 {
        return Err(SignalError::ZeroSnapshots);
    }
    if !(wavelength_mm > 0.0) {
        return Err(SignalError::InvalidWavelength);
    }
    let n = positions.len();
    if channel.gains.len() != n {
        return Err(SignalError::ChannelCount {
            expected: n,
            found: channel.gains.len(),
        });
    }
    let k = scene.points.len();
    // a[i * k + p]: gain-weighted steering of point p into receiver i
    let mut a = Vec::with_capacity(n * k);
    for (pos, g) in positions.iter().zip(&channel.gains) {
        let g = g.to_complex();
        for p in &scene.points {
            a.push(g * steering(*pos, p.alpha, p.beta, wavelength_mm));
        }
    }
    let intensities: Vec<f64> = scene.points.iter().map(|p| p.intensity).collect();
    let noise = channel.noise_power;
    let packed = n * (n + 1) / 2;

    let n_chunks = snapshots.div_ceil(SNAPSHOT_CHUNK as u64) as usize;
    let partials = par::map_range(n_chunks, |c| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(c as u64);
        let start = c as u64 * SNAPSHOT_CHUNK as u64;
        let len = (snapshots - start).min(SNAPSHOT_CHUNK as u64);
        let mut acc = vec![Complex64::new(0.0, 0.0); packed];
        let mut s = vec![Complex64::new(0.0, 0.0); k];
        let mut e = vec![Complex64::new(0.0, 0.0); n];
        for _ in 0..len {
            for (sp, &var) in s.iter_mut().zip(&intensities) {
                *sp = gaussian(&mut rng, var);
            }
            for (i, ei) in e.iter_mut().enumerate() {
                *ei = a[i * k..(i + 1) * k]
                    .iter()
                    .zip(&s)
                    .map(|(w, sp)| w * sp)
                    .sum();
                if noise > 0.0 {
                    *ei += gaussian(&mut rng, noise);
                }
            }
            let mut idx = 0;
            for i in 0..n {
                for j in i..n {
                    acc[idx] += e[i] * e[j].conj();
                    idx += 1;
                }
            }
        }
        acc
    });
    let mut total = vec![Complex64::new(0.0, 0.0); packed];
    for part in partials {
        total.iter_mut().zip(part).for_each(|(t, p)| *t += p);
    }
    let scale = 1.0 / snapshots as f64;
    total.iter_mut().for_each(|t| *t *= scale);
    Ok(VisibilityEstimate::from_upper(n, snapshots, total))
}

/// Grids an estimate onto the UV lattice, averaging all ordered pairs that
/// land in the same cell.
pub fn grid_estimate(
    est: &VisibilityEstimate,
    layout: &ArrayLayout,
    grid: &PositionGrid,
    uv: UvConfig,
    size: usize,
) -> Result<VisibilityGrid, SignalError> {
    layout.check_membership(grid)?;
    grid_from_positions(est, &layout.positions(grid), uv, size)
}

/// [`grid_estimate`] on raw element positions in millimetres.
pub fn grid_from_positions(
    est: &VisibilityEstimate,
    positions: &[(f64, f64)],
    uv: UvConfig,
    size: usize,
) -> Result<VisibilityGrid, SignalError> {
    if est.n() != positions.len() {
        return Err(SignalError::EstimateSize {
            expected: positions.len(),
            found: est.n(),
        });
    }
    let s = crate::geometry::sampling_from_positions(positions, uv);
    let mut out = VisibilityGrid::from_sampling(&s, size)?;
    let mut sums = vec![Complex64::new(0.0, 0.0); size * size];
    let mut counts = vec![0u32; size * size];
    let n = positions.len();
    for i in 0..n {
        let k = out.index(crate::geometry::Cell::DC);
        sums[k] += est.get(i, i);
        counts[k] += 1;
        for j in i + 1..n {
            let c = crate::geometry::baseline_cell(positions[i], positions[j], &uv);
            let k = out.index(c);
            sums[k] += est.get(i, j);
            counts[k] += 1;
            let k = out.index(c.neg());
            sums[k] += est.get(j, i);
            counts[k] += 1;
        }
    }
    for (k, (sum, count)) in sums.into_iter().zip(counts).enumerate() {
        if count > 0 {
            out.set_index(k, sum / count as f64);
        }
    }
    Ok(out)
}
