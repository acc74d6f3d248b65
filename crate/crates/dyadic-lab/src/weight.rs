//! Weights and grid functions on the finest cells.
//!
//! A weight is a strictly positive piecewise-constant density given by its
//! leaf averages; all functionals downstream treat those averages as the
//! weight itself. Closed-form families (two-valued, power) materialize with
//! exact cell averages so the dyadic functionals are exactly computable.

use serde::{Deserialize, Serialize};

use crate::error::LabError;
use crate::grid::{cube_integrals, Cube, DyadicGrid};

/// Real-valued function on the grid, stored by leaf values.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    grid: DyadicGrid,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(grid: DyadicGrid, values: Vec<f64>) -> Result<GridFunction, LabError> {
        if values.len() != grid.leaf_count() {
            return Err(LabError::InvalidParameter(format!(
                "expected {} leaf values, got {}",
                grid.leaf_count(),
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(LabError::InvalidParameter(
                "grid function values must be finite".into(),
            ));
        }
        Ok(GridFunction { grid, values })
    }

    pub fn constant(grid: DyadicGrid, c: f64) -> GridFunction {
        GridFunction {
            values: vec![c; grid.leaf_count()],
            grid,
        }
    }

    /// Indicator of a dyadic cube.
    pub fn indicator(grid: DyadicGrid, cube: &Cube) -> GridFunction {
        let mut values = vec![0.0; grid.leaf_count()];
        for j in grid.leaf_range(cube) {
            values[j] = 1.0;
        }
        GridFunction { grid, values }
    }

    /// Sup-normalized Haar function of a cube: +1 on the left half, -1 on
    /// the right half, 0 outside. Requires the cube to be above leaf level.
    pub fn haar(grid: DyadicGrid, cube: &Cube) -> GridFunction {
        assert!(cube.level < grid.depth(), "haar needs a non-leaf cube");
        let mut values = vec![0.0; grid.leaf_count()];
        let [l, r] = cube.children();
        for j in grid.leaf_range(&l) {
            values[j] = 1.0;
        }
        for j in grid.leaf_range(&r) {
            values[j] = -1.0;
        }
        GridFunction { grid, values }
    }

    #[inline]
    pub fn grid(&self) -> &DyadicGrid {
        &self.grid
    }

    #[inline]
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> GridFunction {
        GridFunction {
            grid: self.grid,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn abs(&self) -> GridFunction {
        self.map(f64::abs)
    }

    pub fn scale(&self, c: f64) -> GridFunction {
        self.map(|v| c * v)
    }

    pub fn add(&self, other: &GridFunction) -> GridFunction {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &GridFunction) -> GridFunction {
        self.zip(other, |a, b| a - b)
    }

    pub fn mul(&self, other: &GridFunction) -> GridFunction {
        self.zip(other, |a, b| a * b)
    }

    fn zip(&self, other: &GridFunction, f: impl Fn(f64, f64) -> f64) -> GridFunction {
        assert_eq!(self.grid, other.grid);
        GridFunction {
            grid: self.grid,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    /// L2 pairing `<f,g> = sum f_i g_i 2^-N`.
    pub fn pair(&self, other: &GridFunction) -> f64 {
        assert_eq!(self.grid, other.grid);
        let cell = self.grid.leaf_measure();
        self.values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| a * b)
            .sum::<f64>()
            * cell
    }

    /// `(int |f|^p w)^(1/p)`; pass `None` for Lebesgue measure.
    pub fn lp_norm(&self, p: f64, weight: Option<&Weight>) -> f64 {
        self.lp_norm_pow(p, weight).powf(1.0 / p)
    }

    /// `int |f|^p w` without the outer root (the natural quantity for p < 1).
    pub fn lp_norm_pow(&self, p: f64, weight: Option<&Weight>) -> f64 {
        let cell = self.grid.leaf_measure();
        match weight {
            Some(w) => {
                assert_eq!(self.grid, w.grid);
                self.values
                    .iter()
                    .zip(w.values())
                    .map(|(&v, &wi)| v.abs().powf(p) * wi)
                    .sum::<f64>()
                    * cell
            }
            None => self.values.iter().map(|&v| v.abs().powf(p)).sum::<f64>() * cell,
        }
    }

    pub fn l2_norm(&self, weight: Option<&Weight>) -> f64 {
        let cell = self.grid.leaf_measure();
        match weight {
            Some(w) => (self
                .values
                .iter()
                .zip(w.values())
                .map(|(&v, &wi)| v * v * wi)
                .sum::<f64>()
                * cell)
                .sqrt(),
            None => (self.values.iter().map(|&v| v * v).sum::<f64>() * cell).sqrt(),
        }
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, &v| m.max(v.abs()))
    }

    /// Integral over a cube.
    pub fn integral_on(&self, cube: &Cube) -> f64 {
        let cell = self.grid.leaf_measure();
        self.grid
            .leaf_range(cube)
            .map(|j| self.values[j])
            .sum::<f64>()
            * cell
    }
}

/// Strictly positive weight with cached per-cube masses `w(Q) = int_Q w`.
#[derive(Debug, Clone)]
pub struct Weight {
    grid: DyadicGrid,
    values: Vec<f64>,
    masses: Vec<f64>,
}

impl Weight {
    pub fn new(grid: DyadicGrid, values: Vec<f64>) -> Result<Weight, LabError> {
        if values.len() != grid.leaf_count() {
            return Err(LabError::InvalidWeight(format!(
                "expected {} leaf values, got {}",
                grid.leaf_count(),
                values.len()
            )));
        }
        if values.iter().any(|&v| !v.is_finite() || v <= 0.0) {
            return Err(LabError::InvalidWeight(
                "weight values must be strictly positive and finite".into(),
            ));
        }
        let masses = cube_integrals(&grid, &values);
        Ok(Weight {
            grid,
            values,
            masses,
        })
    }

    pub fn constant(grid: DyadicGrid, c: f64) -> Weight {
        Weight::new(grid, vec![c; grid.leaf_count()]).expect("positive constant")
    }

    #[inline]
    pub fn grid(&self) -> &DyadicGrid {
        &self.grid
    }

    #[inline]
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `w(Q)`, from the bottom-up cache.
    #[inline]
    pub fn mass(&self, cube: &Cube) -> f64 {
        self.masses[cube.id()]
    }

    /// `<w>_Q = w(Q)/|Q|`.
    #[inline]
    pub fn average(&self, cube: &Cube) -> f64 {
        self.masses[cube.id()] / cube.measure()
    }

    #[inline]
    pub fn total_mass(&self) -> f64 {
        self.masses[0]
    }

    pub fn as_function(&self) -> GridFunction {
        GridFunction {
            grid: self.grid,
            values: self.values.clone(),
        }
    }

    /// Leafwise power `w^r` (a weight again).
    pub fn pow(&self, r: f64) -> Weight {
        Weight::new(self.grid, self.values.iter().map(|v| v.powf(r)).collect())
            .expect("powers of positive values stay positive")
    }
}

/// The measurable set in a two-valued weight, restricted to unions of
/// finest cells.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LeafSet {
    /// `[0, 1/2)`.
    #[serde(with = "left_half_tag")]
    LeftHalf,
    /// Explicit finest-cell indices.
    Leaves(Vec<usize>),
}

mod left_half_tag {
    use serde::de::Error;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str("left_half")
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<(), D::Error> {
        let tag = String::deserialize(d)?;
        if tag == "left_half" {
            Ok(())
        } else {
            Err(D::Error::custom(format!("unknown leaf set tag `{tag}`")))
        }
    }
}

impl LeafSet {
    pub fn membership(&self, grid: &DyadicGrid) -> Result<Vec<bool>, LabError> {
        let n = grid.leaf_count();
        let mut mask = vec![false; n];
        match self {
            LeafSet::LeftHalf => {
                for m in mask.iter_mut().take(n / 2) {
                    *m = true;
                }
            }
            LeafSet::Leaves(ix) => {
                for &j in ix {
                    if j >= n {
                        return Err(LabError::InvalidWeight(format!(
                            "leaf index {j} out of range (grid has {n} leaves)"
                        )));
                    }
                    mask[j] = true;
                }
            }
        }
        let count = mask.iter().filter(|&&m| m).count();
        if count == 0 || count == n {
            return Err(LabError::InvalidWeight(
                "two-valued set must be nonempty and proper".into(),
            ));
        }
        Ok(mask)
    }
}

/// Closed-form weight families with exact cell averages.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum WeightFamilySpec {
    Raw { values: Vec<f64> },
    TwoValued { t: f64, e: LeafSet },
    Power { alpha: f64 },
}

/// Exact average of `x^alpha` over `[a,b)`, i.e.
/// `(b^(alpha+1) - a^(alpha+1)) / ((alpha+1)(b-a))`.
fn power_cell_average(alpha: f64, a: f64, b: f64) -> f64 {
    if alpha == 0.0 {
        return 1.0;
    }
    (b.powf(alpha + 1.0) - a.powf(alpha + 1.0)) / ((alpha + 1.0) * (b - a))
}

/// Build the weight whose leaf values are the exact cell averages of the
/// ideal family member.
pub fn materialize(spec: &WeightFamilySpec, grid: &DyadicGrid) -> Result<Weight, LabError> {
    match spec {
        WeightFamilySpec::Raw { values } => Weight::new(*grid, values.clone()),
        WeightFamilySpec::TwoValued { t, e } => {
            if !t.is_finite() || *t <= 0.0 {
                return Err(LabError::InvalidWeight(format!(
                    "two-valued level t must be positive and finite, got {t}"
                )));
            }
            let mask = e.membership(grid)?;
            let values = mask.iter().map(|&m| if m { *t } else { 1.0 }).collect();
            Weight::new(*grid, values)
        }
        WeightFamilySpec::Power { alpha } => {
            if !alpha.is_finite() || *alpha <= -1.0 {
                return Err(LabError::InvalidWeight(format!(
                    "power exponent must satisfy alpha > -1, got {alpha}"
                )));
            }
            let cell = grid.leaf_measure();
            let values = (0..grid.leaf_count())
                .map(|j| power_cell_average(*alpha, j as f64 * cell, (j + 1) as f64 * cell))
                .collect();
            Weight::new(*grid, values)
        }
    }
}

/// Dual weight `sigma = w^(-1/(p-1))`, acting on leaf values.
pub fn dual_weight(w: &Weight, p: f64) -> Result<Weight, LabError> {
    if !p.is_finite() || p <= 1.0 {
        return Err(LabError::InvalidParameter(format!(
            "dual weight needs p > 1, got {p}"
        )));
    }
    Ok(w.pow(-1.0 / (p - 1.0)))
}
