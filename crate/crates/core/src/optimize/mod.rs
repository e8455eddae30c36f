//! Layout search: seeded random search on unique-sample count and an
//! NSGA-II genetic algorithm over (unique samples, resolution, field of
//! view).
//!
//! All three objectives are minimized: `-unique`, the worse of the two
//! per-axis resolutions, and minus the narrower of the two per-axis fields of
//! view. Layouts with a degenerate axis have no resolution or FOV there and
//! are infeasible.

mod evaluator;
mod nsga;
mod random;
mod sort;

pub use evaluator::LayoutEvaluator;
pub use nsga::{
    ga_multiobjective, Checkpoint, GaEngine, GaOutcome, GaParams, GenerationStats, RunReport,
};
pub use random::{random_search, SearchResult, RANDOM_CHUNK};
pub use sort::{crowding_distance, dominates, non_dominated_sort, pareto_filter};

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{
    aperture_figures, sampling_function, ArrayLayout, GeometryError, PositionGrid, UvConfig,
};
use crate::metrics::count_unique;

#[derive(Debug, Error)]
pub enum OptimizeError {
    #[error("cannot place {n} elements on a grid of {slots} slots")]
    TooManyElements { n: usize, slots: usize },
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("no feasible layout after {attempts} redraws of a population of {population}: {detail}")]
    InfeasiblePopulation {
        attempts: usize,
        population: usize,
        detail: String,
    },
    #[error("front is empty")]
    EmptyFront,
    #[error("checkpoint does not match this run: {0}")]
    CheckpointMismatch(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Minimization objectives of a feasible layout.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveVector {
    pub neg_unique: i64,
    /// `max(res_alpha, res_beta)` in radians.
    pub worst_res: f64,
    /// `-min(fov_alpha, fov_beta)`.
    pub neg_worst_fov: f64,
}

impl ObjectiveVector {
    pub fn unique(&self) -> usize {
        (-self.neg_unique) as usize
    }

    pub fn worst_fov(&self) -> f64 {
        -self.neg_worst_fov
    }

    pub(crate) fn as_array(&self) -> [f64; 3] {
        [self.neg_unique as f64, self.worst_res, self.neg_worst_fov]
    }
}

/// Outcome of scoring one layout. `objectives` is `None` when an axis is
/// degenerate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub unique: usize,
    pub objectives: Option<ObjectiveVector>,
}

impl Evaluation {
    pub fn is_feasible(&self) -> bool {
        self.objectives.is_some()
    }

    /// Worst resolution, `+∞` when infeasible.
    pub fn worst_res_or_inf(&self) -> f64 {
        self.objectives.map_or(f64::INFINITY, |o| o.worst_res)
    }
}

/// Scores a layout through the general sampling-function and aperture code.
/// [`LayoutEvaluator`] is the fast equivalent used inside the searches.
pub fn evaluate_objectives(
    layout: &ArrayLayout,
    grid: &PositionGrid,
    uv: UvConfig,
) -> Result<Evaluation, OptimizeError> {
    let s = sampling_function(layout, grid, uv)?;
    let unique = count_unique(&s).unique;
    let fig = aperture_figures(layout, grid, uv.wavelength_mm)?;
    let objectives = match (fig.worst_resolution(), fig.worst_fov()) {
        (Some(res), Some(fov)) => Some(ObjectiveVector {
            neg_unique: -(unique as i64),
            worst_res: res,
            neg_worst_fov: -fov,
        }),
        _ => None,
    };
    Ok(Evaluation { unique, objectives })
}

/// A front member.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParetoSolution {
    pub layout: ArrayLayout,
    pub objectives: ObjectiveVector,
}

/// Final pick from a front: most unique samples, then smaller worst
/// resolution, then larger worst FOV, then lexicographically smallest
/// indices.
pub fn select_final(front: &[ParetoSolution]) -> Result<&ParetoSolution, OptimizeError> {
    front
        .iter()
        .min_by(|a, b| final_order(a, b))
        .ok_or(OptimizeError::EmptyFront)
}

fn final_order(a: &ParetoSolution, b: &ParetoSolution) -> Ordering {
    let (x, y) = (&a.objectives, &b.objectives);
    x.neg_unique
        .cmp(&y.neg_unique)
        .then(x.worst_res.total_cmp(&y.worst_res))
        .then(x.neg_worst_fov.total_cmp(&y.neg_worst_fov))
        .then_with(|| a.layout.indices().cmp(b.layout.indices()))
}

pub(crate) fn check_size(grid: &PositionGrid, n: usize) -> Result<(), OptimizeError> {
    if n > grid.len() {
        return Err(OptimizeError::TooManyElements {
            n,
            slots: grid.len(),
        });
    }
    if n < 2 {
        return Err(OptimizeError::InvalidParams(format!(
            "need at least 2 elements, got {n}"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{GridConstraints, Slot};

    pub(crate) fn toy_grid(coords: &[(f64, f64)]) -> PositionGrid {
        let slots = coords
            .iter()
            .enumerate()
            .map(|(k, &(x, y))| Slot {
                id: k as u32 + 1,
                x_mm: x,
                y_mm: y,
            })
            .collect();
        let c = GridConstraints {
            min_spacing_mm: 1.0,
            max_extent_mm: 1000.0,
        };
        PositionGrid::new("toy", slots, &c).unwrap()
    }

    #[test]
    fn line_is_infeasible_with_five_unique() {
        let uv = UvConfig::default();
        let h = uv.wavelength_mm / 2.0;
        let g = toy_grid(&[(0.0, 0.0), (h, 0.0), (2.0 * h, 0.0)]);
        let l = ArrayLayout::for_grid(&g, vec![1, 2, 3]).unwrap();
        let e = evaluate_objectives(&l, &g, uv).unwrap();
        assert_eq!(e.unique, 5);
        assert!(!e.is_feasible());
    }

    #[test]
    fn square_objectives() {
        let uv = UvConfig::new(7.8893, 0.5);
        let g = toy_grid(&[(0.0, 0.0), (26.0, 0.0), (0.0, 26.0), (26.0, 26.0)]);
        let l = ArrayLayout::for_grid(&g, vec![1, 2, 3, 4]).unwrap();
        let o = evaluate_objectives(&l, &g, uv).unwrap().objectives.unwrap();
        assert_eq!(o.neg_unique, -9);
        assert!((o.worst_res - 0.88 * 7.8893 / 26.0).abs() < 1e-15);
        assert!((o.worst_fov() - 7.8893 / 52.0).abs() < 1e-15);
    }

    #[test]
    fn final_selection_rule() {
        let mk = |ids: Vec<u32>, u: i64, r: f64, f: f64| ParetoSolution {
            layout: ArrayLayout::new("g", ids).unwrap(),
            objectives: ObjectiveVector {
                neg_unique: -u,
                worst_res: r,
                neg_worst_fov: -f,
            },
        };
        let a = mk(vec![1, 2], 10, 0.04, 0.2);
        let b = mk(vec![3, 4], 10, 0.03, 0.1);
        assert_eq!(select_final(std::slice::from_ref(&a)).unwrap(), &a);
        assert_eq!(select_final(&[a.clone(), b.clone()]).unwrap(), &b);
        let c = mk(vec![1, 3], 10, 0.03, 0.1);
        assert_eq!(select_final(&[b.clone(), c.clone()]).unwrap(), &c);
        let d = mk(vec![5, 6], 11, 0.09, 0.01);
        assert_eq!(select_final(&[a, b, c, d.clone()]).unwrap(), &d);
        assert!(matches!(select_final(&[]), Err(OptimizeError::EmptyFront)));
    }
}
