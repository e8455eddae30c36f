use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{ArrayLayout, GeometryError, PositionGrid, UvConfig};

/// Integer UV cell index; `u` follows x, `v` follows y.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Cell {
    pub u: i32,
    pub v: i32,
}

impl Cell {
    pub const DC: Cell = Cell { u: 0, v: 0 };

    pub fn new(u: i32, v: i32) -> Self {
        Self { u, v }
    }

    pub fn neg(self) -> Self {
        Self {
            u: -self.u,
            v: -self.v,
        }
    }
}

/// Nearest integer with exact halves going toward +inf.
pub fn quantize(x: f64) -> i32 {
    (x + 0.5).floor() as i32
}

/// Multiset of occupied UV cells, one entry per ordered element pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplingFunction {
    cell_size: f64,
    wavelength_mm: f64,
    cells: BTreeMap<Cell, u32>,
}

impl SamplingFunction {
    /// Builds a sampling function directly from cell multiplicities.
    /// Zero multiplicities are dropped.
    pub fn from_cells(
        cells: impl IntoIterator<Item = (Cell, u32)>,
        uv: UvConfig,
    ) -> Self {
        let mut map = BTreeMap::new();
        for (c, m) in cells {
            if m > 0 {
                *map.entry(c).or_insert(0) += m;
            }
        }
        Self {
            cell_size: uv.cell_size,
            wavelength_mm: uv.wavelength_mm,
            cells: map,
        }
    }

    pub fn cell_size(&self) -> f64 {
        self.cell_size
    }

    pub fn wavelength_mm(&self) -> f64 {
        self.wavelength_mm
    }

    pub fn cells(&self) -> &BTreeMap<Cell, u32> {
        &self.cells
    }

    pub fn multiplicity(&self, cell: Cell) -> u32 {
        self.cells.get(&cell).copied().unwrap_or(0)
    }

    /// Number of distinct occupied cells.
    pub fn distinct(&self) -> usize {
        self.cells.len()
    }

    /// Sum of all multiplicities (N² for an N-element array).
    pub fn total(&self) -> u64 {
        self.cells.values().map(|&m| u64::from(m)).sum()
    }

    /// Largest `|u|` or `|v|` over occupied cells.
    pub fn max_abs_index(&self) -> u32 {
        self.cells
            .keys()
            .map(|c| c.u.unsigned_abs().max(c.v.unsigned_abs()))
            .max()
            .unwrap_or(0)
    }

    /// True when every cell's mirror is present with equal multiplicity.
    pub fn is_hermitian(&self) -> bool {
        self.cells
            .iter()
            .all(|(c, m)| self.multiplicity(c.neg()) == *m)
    }
}

/// Quantized cell of the baseline from element `b` to element `a`.
pub(crate) fn baseline_cell(a: (f64, f64), b: (f64, f64), uv: &UvConfig) -> Cell {
    let scale = uv.wavelength_mm * uv.cell_size;
    Cell::new(quantize((a.0 - b.0) / scale), quantize((a.1 - b.1) / scale))
}

/// Accumulates every ordered element pair (including self pairs) into UV
/// cells. Each unordered pair is quantized once and mirrored, which keeps the
/// support exactly Hermitian even for baselines that land on a rounding tie.
pub fn sampling_function(
    layout: &ArrayLayout,
    grid: &PositionGrid,
    uv: UvConfig,
) -> Result<SamplingFunction, GeometryError> {
    if !(uv.wavelength_mm > 0.0) || !(uv.cell_size > 0.0) {
        return Err(GeometryError::InvalidParameter(
            "wavelength and cell size must be positive".into(),
        ));
    }
    layout.check_membership(grid)?;
    Ok(sampling_from_positions(&layout.positions(grid), uv))
}

pub(crate) fn sampling_from_positions(pos: &[(f64, f64)], uv: UvConfig) -> SamplingFunction {
    let mut cells = BTreeMap::new();
    for (i, &a) in pos.iter().enumerate() {
        *cells.entry(Cell::DC).or_insert(0) += 1;
        for &b in &pos[i + 1..] {
            let c = baseline_cell(a, b, &uv);
            *cells.entry(c).or_insert(0) += 1;
            *cells.entry(c.neg()).or_insert(0) += 1;
        }
    }
    SamplingFunction {
        cell_size: uv.cell_size,
        wavelength_mm: uv.wavelength_mm,
        cells,
    }
}
