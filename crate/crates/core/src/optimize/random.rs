use std::cmp::Ordering;

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{check_size, Evaluation, LayoutEvaluator, OptimizeError};
use crate::geometry::{ArrayLayout, PositionGrid, UvConfig};
use crate::par;

/// Trials per independently seeded chunk.
pub const RANDOM_CHUNK: u64 = 4096;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchResult {
    pub layout: ArrayLayout,
    pub evaluation: Evaluation,
    pub trials: u64,
    pub seed: u64,
}

pub(crate) fn draw_genome(rng: &mut ChaCha8Rng, slots: usize, n: usize) -> Vec<u32> {
    let mut ids: Vec<u32> = index::sample(rng, slots, n)
        .into_iter()
        .map(|i| i as u32 + 1)
        .collect();
    ids.sort_unstable();
    ids
}

// Less is better.
fn search_order(a: &(Vec<u32>, Evaluation), b: &(Vec<u32>, Evaluation)) -> Ordering {
    b.1.unique
        .cmp(&a.1.unique)
        .then(a.1.worst_res_or_inf().total_cmp(&b.1.worst_res_or_inf()))
        .then_with(|| a.0.cmp(&b.0))
}

/// Draws `n_trials` uniform layouts of `n_elements` distinct slots and keeps
/// the one with the most unique samples (ties: smaller worst resolution,
/// then lexicographically smaller indices).
///
/// Trials are split into chunks of [`RANDOM_CHUNK`], each on its own
/// ChaCha8 stream of `seed`, so the result does not depend on thread count.
pub fn random_search(
    grid: &PositionGrid,
    n_elements: usize,
    n_trials: u64,
    uv: UvConfig,
    seed: u64,
) -> Result<SearchResult, OptimizeError> {
    check_size(grid, n_elements)?;
    if n_trials == 0 {
        return Err(OptimizeError::InvalidParams("n_trials must be at least 1".into()));
    }
    let eval = LayoutEvaluator::new(grid, uv);
    let chunks = n_trials.div_ceil(RANDOM_CHUNK) as usize;
    let bests = par::map_range(chunks, |c| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(c as u64);
        let len = (n_trials - c as u64 * RANDOM_CHUNK).min(RANDOM_CHUNK);
        (0..len)
            .map(|_| {
                let ids = draw_genome(&mut rng, grid.len(), n_elements);
                let e = eval.evaluate(&ids);
                (ids, e)
            })
            .min_by(search_order)
            .expect("chunk is non-empty")
    });
    let (ids, evaluation) = bests
        .into_iter()
        .min_by(search_order)
        .expect("at least one chunk");
    Ok(SearchResult {
        layout: ArrayLayout::new(grid.name(), ids)?,
        evaluation,
        trials: n_trials,
        seed,
    })
}
