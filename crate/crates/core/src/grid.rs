//! Uniform-grid spatial hash for neighbor queries.

use crate::vec2::Vec2;
use std::collections::HashMap;

/// Buckets agent indices into square cells of side `cell_size`. A query at a
/// point gathers the 3x3 block of cells around it, which covers every agent
/// within `cell_size` of the point; callers apply the exact radius test.
#[derive(Debug)]
pub struct NeighborGrid {
    cell_size: f64,
    cells: HashMap<(i64, i64), Vec<usize>>,
}

impl NeighborGrid {
    pub fn build(positions: &[Vec2], cell_size: f64) -> Self {
        assert!(cell_size > 0.0, "cell size must be positive");
        let mut cells: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
        for (i, p) in positions.iter().enumerate() {
            cells.entry(Self::cell_of(*p, cell_size)).or_default().push(i);
        }
        NeighborGrid { cell_size, cells }
    }

    fn cell_of(p: Vec2, cell_size: f64) -> (i64, i64) {
        (
            (p.x / cell_size).floor() as i64,
            (p.y / cell_size).floor() as i64,
        )
    }

    /// Collects candidate indices within `cell_size` of `at` into `out`,
    /// sorted ascending. The list is a superset of the true in-radius set;
    /// sorting fixes the accumulation order so results do not depend on
    /// hash-map iteration order.
    pub fn candidates_sorted(&self, at: Vec2, out: &mut Vec<usize>) {
        out.clear();
        let (cx, cy) = Self::cell_of(at, self.cell_size);
        // saturating: cell coordinates of barely-finite positions pin to the
        // i64 range and must not wrap
        for dx in -1..=1 {
            for dy in -1..=1 {
                if let Some(bucket) = self.cells.get(&(cx.saturating_add(dx), cy.saturating_add(dy))) {
                    out.extend_from_slice(bucket);
                }
            }
        }
        out.sort_unstable();
    }
}
