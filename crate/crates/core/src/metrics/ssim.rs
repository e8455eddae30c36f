use serde::{Deserialize, Serialize};

use super::MetricsError;
use crate::imaging::SceneImage;

/// Gaussian-window SSIM settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SsimParams {
    pub window: usize,
    pub sigma: f64,
    pub k1: f64,
    pub k2: f64,
    /// Dynamic range `L`; `None` takes the larger pixel range of the two
    /// images.
    pub dynamic_range: Option<f64>,
}

impl Default for SsimParams {
    fn default() -> Self {
        Self {
            window: 11,
            sigma: 1.5,
            k1: 0.01,
            k2: 0.03,
            dynamic_range: None,
        }
    }
}

fn gaussian_kernel(len: usize, sigma: f64) -> Vec<f64> {
    let c = (len as f64 - 1.0) / 2.0;
    let w: Vec<f64> = (0..len)
        .map(|i| (-((i as f64 - c).powi(2)) / (2.0 * sigma * sigma)).exp())
        .collect();
    let s: f64 = w.iter().sum();
    w.into_iter().map(|v| v / s).collect()
}

/// Separable "valid" filtering: output is `(rows - k + 1) x (cols - k + 1)`.
fn filter_valid(x: &[f64], rows: usize, cols: usize, k: &[f64]) -> Vec<f64> {
    let w = k.len();
    let oc = cols - w + 1;
    let or = rows - w + 1;
    let mut tmp = vec![0.0; rows * oc];
    for r in 0..rows {
        let row = &x[r * cols..(r + 1) * cols];
        for c in 0..oc {
            tmp[r * oc + c] = k.iter().zip(&row[c..c + w]).map(|(a, b)| a * b).sum();
        }
    }
    let mut out = vec![0.0; or * oc];
    for r in 0..or {
        for c in 0..oc {
            out[r * oc + c] = k
                .iter()
                .enumerate()
                .map(|(i, a)| a * tmp[(r + i) * oc + c])
                .sum();
        }
    }
    out
}

fn range(x: &[f64]) -> f64 {
    let lo = x.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = x.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    hi - lo
}

/// Mean structural similarity of two equally sized non-negative images.
/// Symmetric in its arguments; two identical flat images score 1.
pub fn ssim(a: &SceneImage, b: &SceneImage, params: &SsimParams) -> Result<f64, MetricsError> {
    let (rows, cols) = (a.height(), a.width());
    if (rows, cols) != (b.height(), b.width()) {
        return Err(MetricsError::DimensionMismatch(format!(
            "{rows}x{cols} vs {}x{}",
            b.height(),
            b.width()
        )));
    }
    if params.window == 0 || rows < params.window || cols < params.window {
        return Err(MetricsError::DimensionMismatch(format!(
            "{rows}x{cols} image is smaller than the {} px window",
            params.window
        )));
    }
    let (x, y) = (a.pixels(), b.pixels());
    if x.iter().chain(y).any(|v| !(v.is_finite() && *v >= 0.0)) {
        return Err(MetricsError::InvalidParameter(
            "SSIM inputs must be finite and non-negative".into(),
        ));
    }
    let mut l = params.dynamic_range.unwrap_or_else(|| range(x).max(range(y)));
    if l == 0.0 {
        if x == y {
            return Ok(1.0);
        }
        l = x.iter().chain(y).copied().fold(0.0, f64::max);
    }
    let c1 = (params.k1 * l).powi(2);
    let c2 = (params.k2 * l).powi(2);

    let k = gaussian_kernel(params.window, params.sigma);
    let xx: Vec<f64> = x.iter().map(|v| v * v).collect();
    let yy: Vec<f64> = y.iter().map(|v| v * v).collect();
    let xy: Vec<f64> = x.iter().zip(y).map(|(p, q)| p * q).collect();
    let mu_x = filter_valid(x, rows, cols, &k);
    let mu_y = filter_valid(y, rows, cols, &k);
    let e_xx = filter_valid(&xx, rows, cols, &k);
    let e_yy = filter_valid(&yy, rows, cols, &k);
    let e_xy = filter_valid(&xy, rows, cols, &k);

    let n = mu_x.len();
    let total: f64 = (0..n)
        .map(|i| {
            let (mx, my) = (mu_x[i], mu_y[i]);
            let sxx = e_xx[i] - mx * mx;
            let syy = e_yy[i] - my * my;
            let sxy = e_xy[i] - mx * my;
            ((2.0 * mx * my + c1) * (2.0 * sxy + c2))
                / ((mx * mx + my * my + c1) * (sxx + syy + c2))
        })
        .sum();
    Ok((total / n as f64).clamp(-1.0, 1.0))
}
