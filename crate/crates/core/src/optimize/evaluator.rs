use super::{Evaluation, ObjectiveVector};
use crate::geometry::{baseline_cell, ApertureFigures, PositionGrid, UvConfig};

/// Precomputed pair table for scoring many layouts on one grid.
///
/// Every slot pair's UV cell is quantized once up front, so a layout's
/// unique count is a bitset union over its pairs. Results match
/// [`super::evaluate_objectives`] exactly.
#[derive(Debug, Clone)]
pub struct LayoutEvaluator {
    positions: Vec<(f64, f64)>,
    wavelength_mm: f64,
    // dense ids of cell(a, b) and cell(b, a) for slot indices a < b,
    // stored at tri(a, b)
    pair_cells: Vec<(u32, u32)>,
    dc: u32,
    words: usize,
}

impl LayoutEvaluator {
    pub fn new(grid: &PositionGrid, uv: UvConfig) -> Self {
        let positions: Vec<(f64, f64)> = grid.slots().iter().map(|s| (s.x_mm, s.y_mm)).collect();
        let n = positions.len();
        let mut raw = Vec::with_capacity(n * n.saturating_sub(1) / 2);
        let (mut mu, mut mv) = (0i64, 0i64);
        for a in 0..n {
            for b in a + 1..n {
                let c = baseline_cell(positions[a], positions[b], &uv);
                mu = mu.max(i64::from(c.u).abs());
                mv = mv.max(i64::from(c.v).abs());
                raw.push(c);
            }
        }
        let width = 2 * mu + 1;
        let id = |u: i32, v: i32| ((i64::from(v) + mv) * width + i64::from(u) + mu) as u32;
        let pair_cells = raw.iter().map(|c| (id(c.u, c.v), id(-c.u, -c.v))).collect();
        let cells = (width * (2 * mv + 1)) as usize;
        Self {
            positions,
            wavelength_mm: uv.wavelength_mm,
            pair_cells,
            dc: id(0, 0),
            words: cells.div_ceil(64),
        }
    }

    pub fn slots(&self) -> usize {
        self.positions.len()
    }

    fn tri(&self, a: usize, b: usize) -> usize {
        let n = self.positions.len();
        a * (2 * n - a - 1) / 2 + (b - a - 1)
    }

    /// Scores a layout given as sorted, distinct 1-based slot ids.
    pub fn evaluate(&self, ids: &[u32]) -> Evaluation {
        let idx: Vec<usize> = ids.iter().map(|&id| id as usize - 1).collect();
        let mut bits = vec![0u64; self.words];
        let mut set = |c: u32| bits[(c / 64) as usize] |= 1 << (c % 64);
        if !idx.is_empty() {
            set(self.dc);
        }
        for (k, &a) in idx.iter().enumerate() {
            for &b in &idx[k + 1..] {
                let (p, q) = self.pair_cells[self.tri(a, b)];
                set(p);
                set(q);
            }
        }
        let unique = bits.iter().map(|w| w.count_ones() as usize).sum();
        let pos: Vec<(f64, f64)> = idx.iter().map(|&i| self.positions[i]).collect();
        let fig = ApertureFigures::from_positions(&pos, self.wavelength_mm);
        let objectives = match (fig.worst_resolution(), fig.worst_fov()) {
            (Some(res), Some(fov)) => Some(ObjectiveVector {
                neg_unique: -(unique as i64),
                worst_res: res,
                neg_worst_fov: -fov,
            }),
            _ => None,
        };
        Evaluation { unique, objectives }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::ArrayLayout;
    use crate::optimize::evaluate_objectives;

    #[test]
    fn matches_general_path_on_lattice48() {
        let g = PositionGrid::lattice48();
        let uv = UvConfig::default();
        let ev = LayoutEvaluator::new(&g, uv);
        for ids in [
            (1..=24).collect::<Vec<u32>>(),
            (25..=48).collect(),
            (1..=48).step_by(2).collect(),
            vec![1, 48],
        ] {
            let l = ArrayLayout::for_grid(&g, ids.clone()).unwrap();
            assert_eq!(ev.evaluate(&ids), evaluate_objectives(&l, &g, uv).unwrap());
        }
    }
}
