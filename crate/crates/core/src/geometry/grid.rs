use std::collections::HashSet;
use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::GeometryError;

/// Shipped 48-slot grid, `id,x_mm,y_mm`.
pub const LATTICE48_CSV: &str = include_str!("../../data/lattice48.csv");

/// One candidate element location.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Slot {
    pub id: u32,
    pub x_mm: f64,
    pub y_mm: f64,
}

/// Physical limits every grid must satisfy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridConstraints {
    pub min_spacing_mm: f64,
    pub max_extent_mm: f64,
}

impl Default for GridConstraints {
    fn default() -> Self {
        Self {
            min_spacing_mm: 26.0,
            max_extent_mm: 202.0,
        }
    }
}

// Absorbs decimal round-off in hand-written coordinates.
const LENGTH_TOL_MM: f64 = 1e-9;

/// A validated set of candidate slots, stored in id order (ids are 1..=n).
#[derive(Debug, Clone, PartialEq)]
pub struct PositionGrid {
    name: String,
    slots: Vec<Slot>,
}

impl PositionGrid {
    /// Builds a grid from slots in any order, enforcing id, spacing and
    /// extent invariants.
    pub fn new(
        name: impl Into<String>,
        mut slots: Vec<Slot>,
        constraints: &GridConstraints,
    ) -> Result<Self, GeometryError> {
        if slots.is_empty() {
            return Err(GeometryError::NoSlots);
        }
        let mut seen = HashSet::with_capacity(slots.len());
        for s in &slots {
            if !seen.insert(s.id) {
                return Err(GeometryError::DuplicateId { id: s.id });
            }
        }
        slots.sort_by_key(|s| s.id);
        let count = slots.len();
        for (k, s) in slots.iter().enumerate() {
            if s.id as usize != k + 1 {
                return Err(GeometryError::NonContiguousIds { id: s.id, count });
            }
            if !s.x_mm.is_finite() || !s.y_mm.is_finite() {
                return Err(GeometryError::InvalidParameter(format!(
                    "slot {} has a non-finite coordinate",
                    s.id
                )));
            }
        }
        for (i, a) in slots.iter().enumerate() {
            for b in &slots[i + 1..] {
                let d = (a.x_mm - b.x_mm).hypot(a.y_mm - b.y_mm);
                if d < constraints.min_spacing_mm - LENGTH_TOL_MM {
                    return Err(GeometryError::Spacing {
                        a: a.id,
                        b: b.id,
                        distance_mm: d,
                        min_mm: constraints.min_spacing_mm,
                    });
                }
            }
        }
        let grid = Self {
            name: name.into(),
            slots,
        };
        for axis in ['x', 'y'] {
            let (low, high) = grid.axis_extremes(axis);
            let extent = grid.coord(high, axis) - grid.coord(low, axis);
            if extent > constraints.max_extent_mm + LENGTH_TOL_MM {
                return Err(GeometryError::Extent {
                    axis,
                    extent_mm: extent,
                    max_mm: constraints.max_extent_mm,
                    low: low.id,
                    high: high.id,
                });
            }
        }
        Ok(grid)
    }

    /// Parses the `id,x_mm,y_mm` CSV format.
    pub fn from_csv_reader<R: Read>(
        name: impl Into<String>,
        reader: R,
        constraints: &GridConstraints,
    ) -> Result<Self, GeometryError> {
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .comment(Some(b'#'))
            .from_reader(reader);
        let headers = rdr.headers().map_err(|e| csv_error(&e))?.clone();
        if headers.is_empty() {
            return Err(GeometryError::NoSlots);
        }
        let expected = ["id", "x_mm", "y_mm"];
        if headers.len() != 3 || headers.iter().zip(expected).any(|(h, e)| h != e) {
            return Err(GeometryError::Parse {
                line: 1,
                message: format!("expected header `id,x_mm,y_mm`, found `{}`", headers.iter().collect::<Vec<_>>().join(",")),
            });
        }
        let mut slots = Vec::new();
        for rec in rdr.records() {
            let rec = rec.map_err(|e| csv_error(&e))?;
            let line = rec.position().map_or(0, |p| p.line());
            let field = |k: usize| -> Result<&str, GeometryError> {
                rec.get(k).ok_or_else(|| GeometryError::Parse {
                    line,
                    message: format!("missing column {}", expected[k]),
                })
            };
            let id = field(0)?.parse::<u32>().map_err(|e| GeometryError::Parse {
                line,
                message: format!("bad id: {e}"),
            })?;
            let num = |k: usize| -> Result<f64, GeometryError> {
                field(k)?.parse::<f64>().map_err(|e| GeometryError::Parse {
                    line,
                    message: format!("bad {}: {e}", expected[k]),
                })
            };
            slots.push(Slot {
                id,
                x_mm: num(1)?,
                y_mm: num(2)?,
            });
        }
        Self::new(name, slots, constraints)
    }

    /// Loads a grid file; the grid is named after the file stem.
    pub fn load(path: &Path, constraints: &GridConstraints) -> Result<Self, GeometryError> {
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "grid".to_string());
        let file = std::fs::File::open(path)?;
        Self::from_csv_reader(name, file, constraints)
    }

    /// The shipped 48-slot grid.
    pub fn lattice48() -> Self {
        Self::from_csv_reader(
            "lattice48",
            LATTICE48_CSV.as_bytes(),
            &GridConstraints::default(),
        )
        .expect("shipped grid is valid")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn slots(&self) -> &[Slot] {
        &self.slots
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    pub fn slot(&self, id: u32) -> Option<&Slot> {
        (id as usize)
            .checked_sub(1)
            .and_then(|k| self.slots.get(k))
    }

    /// `(max x - min x, max y - min y)` in mm.
    pub fn extents_mm(&self) -> (f64, f64) {
        let span = |axis| {
            let (lo, hi) = self.axis_extremes(axis);
            self.coord(hi, axis) - self.coord(lo, axis)
        };
        (span('x'), span('y'))
    }

    /// Smallest pairwise Euclidean distance, `None` for a single slot.
    pub fn min_spacing_mm(&self) -> Option<f64> {
        let mut best: Option<f64> = None;
        for (i, a) in self.slots.iter().enumerate() {
            for b in &self.slots[i + 1..] {
                let d = (a.x_mm - b.x_mm).hypot(a.y_mm - b.y_mm);
                best = Some(best.map_or(d, |m| m.min(d)));
            }
        }
        best
    }

    /// Centre of the bounding box.
    pub fn center_mm(&self) -> (f64, f64) {
        let mid = |axis| {
            let (lo, hi) = self.axis_extremes(axis);
            0.5 * (self.coord(lo, axis) + self.coord(hi, axis))
        };
        (mid('x'), mid('y'))
    }

    /// The `n` slots whose distance from the bounding-box centre is closest to
    /// `radius_mm` (ties go to the lower id): a circular-style reference layout.
    pub fn circular_reference(&self, n: usize, radius_mm: f64) -> Result<ArrayLayout, GeometryError> {
        if n > self.len() {
            return Err(GeometryError::InvalidParameter(format!(
                "cannot place {n} elements on {} slots",
                self.len()
            )));
        }
        let (cx, cy) = self.center_mm();
        let mut ranked: Vec<(f64, u32)> = self
            .slots
            .iter()
            .map(|s| (((s.x_mm - cx).hypot(s.y_mm - cy) - radius_mm).abs(), s.id))
            .collect();
        ranked.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let ids = ranked.into_iter().take(n).map(|(_, id)| id).collect();
        ArrayLayout::for_grid(self, ids)
    }

    fn coord(&self, s: &Slot, axis: char) -> f64 {
        if axis == 'x' {
            s.x_mm
        } else {
            s.y_mm
        }
    }

    fn axis_extremes(&self, axis: char) -> (&Slot, &Slot) {
        let mut lo = &self.slots[0];
        let mut hi = &self.slots[0];
        for s in &self.slots {
            if self.coord(s, axis) < self.coord(lo, axis) {
                lo = s;
            }
            if self.coord(s, axis) > self.coord(hi, axis) {
                hi = s;
            }
        }
        (lo, hi)
    }
}

fn csv_error(e: &csv::Error) -> GeometryError {
    GeometryError::Parse {
        line: e.position().map_or(0, |p| p.line()),
        message: e.to_string(),
    }
}

/// A choice of distinct slots on a named grid. Indices are kept sorted.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "LayoutFile", into = "LayoutFile")]
pub struct ArrayLayout {
    grid: String,
    indices: Vec<u32>,
}

#[derive(Serialize, Deserialize)]
struct LayoutFile {
    grid: String,
    indices: Vec<u32>,
    n: usize,
}

impl From<ArrayLayout> for LayoutFile {
    fn from(l: ArrayLayout) -> Self {
        let n = l.indices.len();
        Self {
            grid: l.grid,
            indices: l.indices,
            n,
        }
    }
}

impl TryFrom<LayoutFile> for ArrayLayout {
    type Error = GeometryError;

    fn try_from(file: LayoutFile) -> Result<Self, GeometryError> {
        if file.n != file.indices.len() {
            return Err(GeometryError::CountMismatch {
                declared: file.n,
                found: file.indices.len(),
            });
        }
        Self::new(file.grid, file.indices)
    }
}

impl ArrayLayout {
    /// Builds a layout, rejecting repeated indices. Grid membership is checked
    /// by [`ArrayLayout::validate`].
    pub fn new(grid: impl Into<String>, mut indices: Vec<u32>) -> Result<Self, GeometryError> {
        indices.sort_unstable();
        if let Some(w) = indices.windows(2).find(|w| w[0] == w[1]) {
            return Err(GeometryError::DuplicateIndex { id: w[0] });
        }
        Ok(Self {
            grid: grid.into(),
            indices,
        })
    }

    /// Builds and validates a layout against `grid` in one go.
    pub fn for_grid(grid: &PositionGrid, indices: Vec<u32>) -> Result<Self, GeometryError> {
        let layout = Self::new(grid.name(), indices)?;
        layout.validate(grid)?;
        Ok(layout)
    }

    pub fn validate(&self, grid: &PositionGrid) -> Result<(), GeometryError> {
        if self.grid != grid.name() {
            return Err(GeometryError::GridMismatch {
                layout: self.grid.clone(),
                grid: grid.name().to_string(),
            });
        }
        self.check_membership(grid)
    }

    /// Membership check only; for layouts loaded against a grid under a
    /// different name.
    pub fn check_membership(&self, grid: &PositionGrid) -> Result<(), GeometryError> {
        match self.indices.iter().find(|&&id| grid.slot(id).is_none()) {
            Some(&id) => Err(GeometryError::UnknownSlot {
                id,
                grid: grid.name().to_string(),
            }),
            None => Ok(()),
        }
    }

    pub fn grid_name(&self) -> &str {
        &self.grid
    }

    pub fn indices(&self) -> &[u32] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// Element coordinates in mm, in index order. Panics if the layout was
    /// not validated against `grid`.
    pub fn positions(&self, grid: &PositionGrid) -> Vec<(f64, f64)> {
        self.indices
            .iter()
            .map(|&id| {
                let s = grid.slot(id).expect("layout validated against grid");
                (s.x_mm, s.y_mm)
            })
            .collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("layout serializes")
    }

    pub fn from_json(s: &str) -> Result<Self, GeometryError> {
        let file: LayoutFile = serde_json::from_str(s)?;
        file.try_into()
    }

    pub fn load(path: &Path) -> Result<Self, GeometryError> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}
