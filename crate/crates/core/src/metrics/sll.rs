use serde::{Deserialize, Serialize};

use super::MetricsError;
use crate::imaging::ComplexImage;

/// Radial sampling step along each ray, in pixels.
pub const DEFAULT_RADIAL_STEP_PX: f64 = 0.25;

/// How the main lobe is cut out of each ray before taking the sidelobe peak.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum MainLobe {
    /// First radial local minimum; rays without one fall back to the first
    /// sample at or below -3 dB.
    FirstMinimum,
    /// Fixed exclusion radius in pixels.
    Radius(f64),
}

/// Peak sidelobe level per ray around the PSF centre.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SllProfile {
    pub angles_deg: Vec<f64>,
    pub levels_db: Vec<f64>,
}

impl SllProfile {
    pub fn len(&self) -> usize {
        self.angles_deg.len()
    }

    pub fn is_empty(&self) -> bool {
        self.angles_deg.is_empty()
    }

    /// `angle_deg,level_db` lines with a header.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("angle_deg,level_db\n");
        for (a, l) in self.angles_deg.iter().zip(&self.levels_db) {
            s.push_str(&format!("{a},{l}\n"));
        }
        s
    }
}

const FLOOR_DB: f64 = -300.0;
const HALF_POWER: f64 = 0.707_945_784_384_137_9; // 10^(-3/20)

fn bilinear(mag: &[f64], cols: usize, x: f64, y: f64) -> f64 {
    let x0 = x.floor();
    let y0 = y.floor();
    let (fx, fy) = (x - x0, y - y0);
    let (x0, y0) = (x0 as usize, y0 as usize);
    let x1 = (x0 + 1).min(cols - 1);
    let rows = mag.len() / cols;
    let y1 = (y0 + 1).min(rows - 1);
    let at = |r: usize, c: usize| mag[r * cols + c];
    (1.0 - fy) * ((1.0 - fx) * at(y0, x0) + fx * at(y0, x1))
        + fy * ((1.0 - fx) * at(y1, x0) + fx * at(y1, x1))
}

/// Samples `|PSF|` along rays from the centre pixel every `step_deg`
/// degrees (bilinear, quarter-pixel radial step, out to the inscribed
/// circle), drops the main lobe and records the largest remaining level in
/// dB relative to the centre.
pub fn sll_profile(
    psf: &ComplexImage,
    step_deg: f64,
    main_lobe: MainLobe,
) -> Result<SllProfile, MetricsError> {
    if !(step_deg > 0.0 && step_deg <= 360.0) {
        return Err(MetricsError::InvalidParameter(format!("angle step {step_deg}")));
    }
    let (rows, cols) = (psf.height(), psf.width());
    let r_max = (rows.min(cols) / 2) as f64 - 1.0;
    if r_max < 1.0 {
        return Err(MetricsError::RasterTooSmall);
    }
    let mag: Vec<f64> = psf.pixels().iter().map(|p| p.norm()).collect();
    let (cy, cx) = ((rows / 2) as f64, (cols / 2) as f64);
    let peak = mag[(rows / 2) * cols + cols / 2];
    if !(peak > 0.0) {
        return Err(MetricsError::InvalidParameter("PSF centre is zero".into()));
    }
    let n_steps = (r_max / DEFAULT_RADIAL_STEP_PX).floor() as usize;
    let n_angles = (360.0 / step_deg).round() as usize;

    let mut angles = Vec::with_capacity(n_angles);
    let mut levels = Vec::with_capacity(n_angles);
    let mut ray = Vec::with_capacity(n_steps + 1);
    for k in 0..n_angles {
        let deg = k as f64 * step_deg;
        let (s, c) = deg.to_radians().sin_cos();
        ray.clear();
        ray.extend((0..=n_steps).map(|i| {
            let r = i as f64 * DEFAULT_RADIAL_STEP_PX;
            bilinear(&mag, cols, cx + r * c, cy + r * s) / peak
        }));
        let start = match main_lobe {
            MainLobe::FirstMinimum => first_local_min(&ray)
                .or_else(|| ray.iter().position(|&v| v <= HALF_POWER))
                .ok_or(MetricsError::MainLobeFillsRaster)?,
            MainLobe::Radius(r) => {
                let i = (r / DEFAULT_RADIAL_STEP_PX).ceil().max(0.0) as usize;
                if i > n_steps {
                    return Err(MetricsError::MainLobeFillsRaster);
                }
                i
            }
        };
        let top = ray[start..].iter().copied().fold(0.0, f64::max);
        angles.push(deg);
        levels.push(if top > 0.0 {
            (20.0 * top.log10()).max(FLOOR_DB)
        } else {
            FLOOR_DB
        });
    }
    Ok(SllProfile {
        angles_deg: angles,
        levels_db: levels,
    })
}

fn first_local_min(ray: &[f64]) -> Option<usize> {
    (1..ray.len().saturating_sub(1)).find(|&i| ray[i] < ray[i - 1] && ray[i] <= ray[i + 1])
}

/// Mean of the per-angle levels, in dB.
pub fn avg_sll(profile: &SllProfile) -> Result<f64, MetricsError> {
    if profile.is_empty() {
        return Err(MetricsError::InvalidParameter("empty profile".into()));
    }
    Ok(profile.levels_db.iter().sum::<f64>() / profile.len() as f64)
}

/// Highest per-angle level (peak sidelobe level), in dB.
pub fn psl(profile: &SllProfile) -> Result<f64, MetricsError> {
    profile
        .levels_db
        .iter()
        .copied()
        .reduce(f64::max)
        .ok_or_else(|| MetricsError::InvalidParameter("empty profile".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::imaging::Axis;
    use num_complex::Complex64;

    fn image_from(n: usize, f: impl Fn(f64, f64) -> f64) -> ComplexImage {
        let c = (n / 2) as f64;
        let px = (0..n * n)
            .map(|k| Complex64::new(f((k % n) as f64 - c, (k / n) as f64 - c), 0.0))
            .collect();
        let a = Axis::for_uv(n, 0.5);
        ComplexImage::new(a, a, px).unwrap()
    }

    #[test]
    fn gaussian_profile_is_flat_at_half_power() {
        let sigma = 30.0;
        let img = image_from(256, |x, y| (-(x * x + y * y) / (2.0 * sigma * sigma)).exp());
        let p = sll_profile(&img, 1.0, MainLobe::FirstMinimum).unwrap();
        assert_eq!(p.len(), 360);
        let lo = p.levels_db.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = psl(&p).unwrap();
        assert!(hi - lo <= 0.1, "spread {}", hi - lo);
        assert!(hi <= -3.0 && hi > -3.2);
    }

    #[test]
    fn main_lobe_filling_raster_is_an_error() {
        let img = image_from(16, |_, _| 1.0);
        assert_eq!(
            sll_profile(&img, 1.0, MainLobe::FirstMinimum),
            Err(MetricsError::MainLobeFillsRaster)
        );
    }

    #[test]
    fn averages() {
        let flat = SllProfile {
            angles_deg: vec![0.0, 1.0, 2.0],
            levels_db: vec![-20.0; 3],
        };
        assert_eq!(avg_sll(&flat).unwrap(), -20.0);
        let two = SllProfile {
            angles_deg: vec![0.0, 1.0],
            levels_db: vec![-10.0, -30.0],
        };
        assert_eq!(avg_sll(&two).unwrap(), -20.0);
        assert_eq!(psl(&two).unwrap(), -10.0);
    }
}
