use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{Axis, SceneImage};

/// Parameters of the random test-scene generator. Lengths are in direction
/// cosines.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SceneParams {
    pub raster: usize,
    pub cell_size: f64,
    /// Inclusive range of shape counts.
    pub shape_count: (usize, usize),
    /// Intensity range, drawn uniformly.
    pub intensity: (f64, f64),
    /// Shape centres fall in `[-extent, extent]` on both axes; may exceed the
    /// unambiguous field of view on purpose.
    pub extent: f64,
    /// Half-width (rectangles) or radius (circles) range.
    pub size: (f64, f64),
}

impl Default for SceneParams {
    fn default() -> Self {
        Self {
            raster: super::DEFAULT_RASTER,
            cell_size: crate::geometry::DEFAULT_CELL_SIZE,
            shape_count: (7, 16),
            intensity: (0.2, 1.0),
            extent: 0.6,
            size: (0.05, 0.2),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Shape {
    Rect {
        alpha: f64,
        beta: f64,
        half_width: f64,
        half_height: f64,
        intensity: f64,
    },
    Circle {
        alpha: f64,
        beta: f64,
        radius: f64,
        intensity: f64,
    },
}

impl Shape {
    pub fn intensity(&self) -> f64 {
        match *self {
            Shape::Rect { intensity, .. } | Shape::Circle { intensity, .. } => intensity,
        }
    }

    fn contains(&self, a: f64, b: f64) -> bool {
        match *self {
            Shape::Rect {
                alpha,
                beta,
                half_width,
                half_height,
                ..
            } => (a - alpha).abs() <= half_width && (b - beta).abs() <= half_height,
            Shape::Circle {
                alpha, beta, radius, ..
            } => (a - alpha).powi(2) + (b - beta).powi(2) <= radius * radius,
        }
    }
}

fn uniform(rng: &mut ChaCha8Rng, (lo, hi): (f64, f64)) -> f64 {
    if hi > lo {
        rng.random_range(lo..hi)
    } else {
        lo
    }
}

/// Draws the shape list for a seed. Same seed and params, same shapes.
pub fn draw_shapes(seed: u64, params: &SceneParams) -> Vec<Shape> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (lo, hi) = params.shape_count;
    let count = if hi > lo {
        rng.random_range(lo..=hi)
    } else {
        lo
    };
    let e = params.extent;
    (0..count)
        .map(|_| {
            let alpha = uniform(&mut rng, (-e, e));
            let beta = uniform(&mut rng, (-e, e));
            let intensity = uniform(&mut rng, params.intensity);
            if rng.random_bool(0.5) {
                Shape::Rect {
                    alpha,
                    beta,
                    half_width: uniform(&mut rng, params.size),
                    half_height: uniform(&mut rng, params.size),
                    intensity,
                }
            } else {
                Shape::Circle {
                    alpha,
                    beta,
                    radius: uniform(&mut rng, params.size),
                    intensity,
                }
            }
        })
        .collect()
}

/// Paints shapes in order onto a zero raster; later shapes overwrite earlier
/// ones where they overlap.
pub fn render_shapes(shapes: &[Shape], params: &SceneParams) -> SceneImage {
    let axis = Axis::for_uv(params.raster, params.cell_size);
    let mut img = SceneImage::zeros(axis, axis);
    let n = params.raster;
    let px = img.pixels_mut();
    for shape in shapes {
        for r in 0..n {
            let b = axis.value(r);
            for c in 0..n {
                if shape.contains(axis.value(c), b) {
                    px[r * n + c] = shape.intensity();
                }
            }
        }
    }
    img
}

pub fn generate_random_scene(seed: u64, params: &SceneParams) -> SceneImage {
    render_shapes(&draw_shapes(seed, params), params)
}
