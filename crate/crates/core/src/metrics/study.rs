use serde::Serialize;
use thiserror::Error;

use super::{crop_to_fov, ssim, MetricsError, SsimParams};
use crate::geometry::{ApertureFigures, SamplingFunction};
use crate::imaging::{
    generate_random_scene, psf, simulate_reconstruction, ComplexImage, ImagingError, SceneImage,
    SceneParams,
};
use crate::par;

#[derive(Debug, Error)]
pub enum StudyError {
    #[error(transparent)]
    Imaging(#[from] ImagingError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
}

/// One column of a scene study.
#[derive(Debug, Clone)]
pub struct StudyLayout {
    pub name: String,
    pub sampling: SamplingFunction,
    pub figures: ApertureFigures,
}

/// SSIM per scene (rows) and layout (columns).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SsimTable {
    pub layouts: Vec<String>,
    pub seeds: Vec<u64>,
    pub rows: Vec<Vec<f64>>,
}

impl SsimTable {
    /// Column means; empty when there are no scenes.
    pub fn means(&self) -> Vec<f64> {
        if self.rows.is_empty() {
            return Vec::new();
        }
        let n = self.rows.len() as f64;
        (0..self.layouts.len())
            .map(|c| self.rows.iter().map(|r| r[c]).sum::<f64>() / n)
            .collect()
    }

    /// `scene,<layout>...` then one row per scene seed and a closing `mean`
    /// row. No scenes gives the header alone.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("scene");
        for name in &self.layouts {
            out.push(',');
            out.push_str(name);
        }
        out.push('\n');
        for (seed, row) in self.seeds.iter().zip(&self.rows) {
            out.push_str(&seed.to_string());
            for v in row {
                out.push_str(&format!(",{v}"));
            }
            out.push('\n');
        }
        let means = self.means();
        if !means.is_empty() {
            out.push_str("mean");
            for v in means {
                out.push_str(&format!(",{v}"));
            }
            out.push('\n');
        }
        out
    }
}

/// Crop to the layout's field of view, clamped to the raster when the
/// aperture sees more than the image holds.
fn crop_fov(img: &SceneImage, figures: &ApertureFigures) -> Result<SceneImage, MetricsError> {
    let (fa, fb) = match (figures.fov_alpha, figures.fov_beta) {
        (Some(a), Some(b)) => (a, b),
        _ => return Err(MetricsError::ZeroFov),
    };
    crop_to_fov(
        img,
        fa.min(img.alpha().max_abs()),
        fb.min(img.beta().max_abs()),
    )
}

/// SSIM between a scene and its reconstruction through `psf`, both
/// peak-normalized and cropped to the aperture field of view.
pub fn scene_ssim(
    scene: &SceneImage,
    psf: &ComplexImage,
    figures: &ApertureFigures,
    params: &SsimParams,
) -> Result<f64, StudyError> {
    let recon = simulate_reconstruction(scene, psf)?;
    let truth = scene.peak_normalized();
    let a = crop_fov(&truth, figures)?;
    let b = crop_fov(&recon, figures)?;
    Ok(ssim(&a, &b, params)?)
}

/// Scene seeds are `seed, seed + 1, ...`. Scenes run in parallel; the table
/// does not depend on the thread count.
pub fn scene_study(
    layouts: &[StudyLayout],
    n_scenes: usize,
    seed: u64,
    scene_params: &SceneParams,
    ssim_params: &SsimParams,
) -> Result<SsimTable, StudyError> {
    let psfs = layouts
        .iter()
        .map(|l| psf(&l.sampling, scene_params.raster))
        .collect::<Result<Vec<_>, _>>()?;
    let seeds: Vec<u64> = (0..n_scenes as u64).map(|k| seed.wrapping_add(k)).collect();
    let rows = par::map(&seeds, |&s| {
        let scene = generate_random_scene(s, scene_params);
        layouts
            .iter()
            .zip(&psfs)
            .map(|(l, p)| scene_ssim(&scene, p, &l.figures, ssim_params))
            .collect::<Result<Vec<_>, _>>()
    })
    .into_iter()
    .collect::<Result<Vec<_>, _>>()?;
    Ok(SsimTable {
        layouts: layouts.iter().map(|l| l.name.clone()).collect(),
        seeds,
        rows,
    })
}
