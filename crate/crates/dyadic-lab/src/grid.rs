//! Dyadic grid on the unit interval.
//!
//! The grid of depth `N` consists of the half-open intervals
//! `[j 2^-k, (j+1) 2^-k)` for `0 <= k <= N`, `0 <= j < 2^k`. Cubes are
//! addressed either as `(level, pos)` pairs or by a heap-order id
//! `2^level - 1 + pos`, so per-cube data lives in flat vectors of length
//! `2^(N+1) - 1` with contiguous per-level slices.

use crate::error::LabError;

/// A dyadic interval `[pos * 2^-level, (pos+1) * 2^-level)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Cube {
    pub level: usize,
    pub pos: usize,
}

impl Cube {
    pub const ROOT: Cube = Cube { level: 0, pos: 0 };

    /// Heap-order index: level-order position among all cubes of the grid.
    #[inline]
    pub fn id(&self) -> usize {
        (1usize << self.level) - 1 + self.pos
    }

    #[inline]
    pub fn from_id(id: usize) -> Cube {
        let level = (id + 1).ilog2() as usize;
        Cube {
            level,
            pos: id + 1 - (1 << level),
        }
    }

    #[inline]
    pub fn parent(&self) -> Option<Cube> {
        (self.level > 0).then(|| Cube {
            level: self.level - 1,
            pos: self.pos / 2,
        })
    }

    /// Left and right halves. Only meaningful below the finest level.
    #[inline]
    pub fn children(&self) -> [Cube; 2] {
        [
            Cube {
                level: self.level + 1,
                pos: 2 * self.pos,
            },
            Cube {
                level: self.level + 1,
                pos: 2 * self.pos + 1,
            },
        ]
    }

    /// Lebesgue measure `2^-level`.
    #[inline]
    pub fn measure(&self) -> f64 {
        0.5f64.powi(self.level as i32)
    }

    /// Left endpoint of the interval.
    #[inline]
    pub fn left(&self) -> f64 {
        self.pos as f64 * self.measure()
    }

    #[inline]
    pub fn contains(&self, other: &Cube) -> bool {
        other.level >= self.level && (other.pos >> (other.level - self.level)) == self.pos
    }

    /// The descendant of `self` at `self.level + down` containing the same
    /// left endpoint, shifted by `offset` positions.
    #[inline]
    pub fn descendant(&self, down: usize, offset: usize) -> Cube {
        Cube {
            level: self.level + down,
            pos: (self.pos << down) + offset,
        }
    }
}

/// Index structure of the dyadic cubes over `[0,1)` down to depth `N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DyadicGrid {
    depth: usize,
}

impl DyadicGrid {
    pub fn new(depth: usize) -> Result<DyadicGrid, LabError> {
        if depth > 30 {
            return Err(LabError::InvalidParameter(format!(
                "grid depth {depth} exceeds the addressable limit 30"
            )));
        }
        Ok(DyadicGrid { depth })
    }

    #[inline]
    pub fn depth(&self) -> usize {
        self.depth
    }

    /// Number of finest cells, `2^N`.
    #[inline]
    pub fn leaf_count(&self) -> usize {
        1 << self.depth
    }

    /// Total number of cubes, `2^(N+1) - 1`.
    #[inline]
    pub fn cube_count(&self) -> usize {
        (1 << (self.depth + 1)) - 1
    }

    #[inline]
    pub fn leaf_measure(&self) -> f64 {
        0.5f64.powi(self.depth as i32)
    }

    /// The range of leaf positions covered by `cube`.
    #[inline]
    pub fn leaf_range(&self, cube: &Cube) -> std::ops::Range<usize> {
        let span = 1usize << (self.depth - cube.level);
        let start = cube.pos * span;
        start..start + span
    }

    #[inline]
    pub fn leaf(&self, pos: usize) -> Cube {
        Cube {
            level: self.depth,
            pos,
        }
    }

    pub fn contains_cube(&self, cube: &Cube) -> bool {
        cube.level <= self.depth && cube.pos < (1 << cube.level)
    }

    /// All cubes in level order (root first).
    pub fn cubes(&self) -> impl Iterator<Item = Cube> + '_ {
        (0..self.cube_count()).map(Cube::from_id)
    }

    pub fn cubes_at_level(&self, level: usize) -> impl Iterator<Item = Cube> {
        (0..1usize << level).map(move |pos| Cube { level, pos })
    }

    /// All dyadic cubes containing the given leaf, from the root down.
    pub fn ancestors_of_leaf(&self, pos: usize) -> impl Iterator<Item = Cube> + '_ {
        (0..=self.depth).map(move |level| Cube {
            level,
            pos: pos >> (self.depth - level),
        })
    }
}

/// Per-cube integrals of a piecewise-constant function given by its leaf
/// values: entry `cube.id()` holds the integral of the function over that
/// cube. Built bottom-up in one pass.
pub fn cube_integrals(grid: &DyadicGrid, leaf_values: &[f64]) -> Vec<f64> {
    debug_assert_eq!(leaf_values.len(), grid.leaf_count());
    let mut out = vec![0.0; grid.cube_count()];
    let cell = grid.leaf_measure();
    let leaf_base = grid.leaf_count() - 1;
    for (j, v) in leaf_values.iter().enumerate() {
        out[leaf_base + j] = v * cell;
    }
    for id in (0..leaf_base).rev() {
        out[id] = out[2 * id + 1] + out[2 * id + 2];
    }
    out
}

/// Per-cube minimum of the leaf values over each cube.
pub fn cube_mins(grid: &DyadicGrid, leaf_values: &[f64]) -> Vec<f64> {
    debug_assert_eq!(leaf_values.len(), grid.leaf_count());
    let mut out = vec![0.0; grid.cube_count()];
    let leaf_base = grid.leaf_count() - 1;
    out[leaf_base..].copy_from_slice(leaf_values);
    for id in (0..leaf_base).rev() {
        out[id] = out[2 * id + 1].min(out[2 * id + 2]);
    }
    out
}
