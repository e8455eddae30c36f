use num_complex::Complex64;

use super::ImagingError;
use crate::geometry::{Cell, SamplingFunction};

/// Complex visibilities on a square UV lattice together with a multiplicity
/// mask (0 where unsampled). Storage is in transform order: cell `(p, q)`
/// lives at row `q mod n`, column `p mod n`.
#[derive(Debug, Clone, PartialEq)]
pub struct VisibilityGrid {
    size: usize,
    cell_size: f64,
    values: Vec<Complex64>,
    mask: Vec<u32>,
}

impl VisibilityGrid {
    pub(crate) fn from_parts(
        size: usize,
        cell_size: f64,
        values: Vec<Complex64>,
        mask: Vec<u32>,
    ) -> Self {
        debug_assert_eq!(values.len(), size * size);
        debug_assert_eq!(mask.len(), size * size);
        Self {
            size,
            cell_size,
            values,
            mask,
        }
    }

    /// Empty grid (all zero, nothing sampled).
    pub fn zeros(size: usize, cell_size: f64) -> Self {
        Self::from_parts(
            size,
            cell_size,
            vec![Complex64::new(0.0, 0.0); size * size],
            vec![0; size * size],
        )
    }

    /// Binarized sampling mask as a visibility grid: 1 on every occupied cell,
    /// multiplicities in the mask.
    pub fn from_sampling(s: &SamplingFunction, size: usize) -> Result<Self, ImagingError> {
        let required = 2 * s.max_abs_index() as usize + 1;
        if size < required {
            return Err(ImagingError::SupportExceedsRaster {
                required,
                raster: size,
            });
        }
        let mut grid = Self::zeros(size, s.cell_size());
        for (&c, &m) in s.cells() {
            let k = grid.index(c);
            grid.values[k] = Complex64::new(1.0, 0.0);
            grid.mask[k] = m;
        }
        Ok(grid)
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn cell_size(&self) -> f64 {
        self.cell_size
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn mask(&self) -> &[u32] {
        &self.mask
    }

    /// Index of a cell in transform order, with wraparound.
    pub fn index(&self, c: Cell) -> usize {
        let n = self.size as i64;
        let row = i64::from(c.v).rem_euclid(n) as usize;
        let col = i64::from(c.u).rem_euclid(n) as usize;
        row * self.size + col
    }

    pub fn get(&self, c: Cell) -> Complex64 {
        self.values[self.index(c)]
    }

    pub fn multiplicity(&self, c: Cell) -> u32 {
        self.mask[self.index(c)]
    }

    /// Sets a cell value and its multiplicity.
    pub fn set(&mut self, c: Cell, value: Complex64, multiplicity: u32) {
        let k = self.index(c);
        self.values[k] = value;
        self.mask[k] = multiplicity;
    }

    pub(crate) fn set_index(&mut self, k: usize, value: Complex64) {
        self.values[k] = value;
    }

    /// `V(-p, -q) = conj(V(p, q))` on every sampled cell whose mirror is also
    /// sampled, within `tol`.
    pub fn is_hermitian(&self, tol: f64) -> bool {
        let n = self.size as i32;
        let half = n / 2;
        (-half..n - half).all(|q| {
            (-half..n - half).all(|p| {
                let c = Cell::new(p, q);
                let m = c.neg();
                self.multiplicity(c) == 0
                    || self.multiplicity(m) == 0
                    || (self.get(c) - self.get(m).conj()).norm() <= tol
            })
        })
    }
}
