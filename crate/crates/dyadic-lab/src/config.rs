//! JSON descriptions of weights and shifts, the wire formats consumed by
//! the command-line driver.
//!
//! Weight spec:
//! `{"depth": 8, "weight": {"family": "two_valued", "t": 3.0, "e": "left_half"}}`
//! with families `two_valued` (e is `"left_half"` or a leaf index list),
//! `power` (`{"alpha": -0.5}`), and `raw` (`{"values": [...]}`).
//!
//! Shift spec:
//! `{"m": 0, "n": 1, "kind": "petermichl", "seed": 1, "cancellative": true}`.

use serde::{Deserialize, Serialize};

use crate::error::LabError;
use crate::grid::DyadicGrid;
use crate::shift::{build_shift, CoeffSource, HaarShift};
use crate::weight::{materialize, Weight, WeightFamilySpec};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WeightSpecFile {
    pub depth: usize,
    pub weight: WeightFamilySpec,
}

impl WeightSpecFile {
    pub fn parse(json: &str) -> Result<WeightSpecFile, LabError> {
        serde_json::from_str(json).map_err(|e| LabError::Spec(e.to_string()))
    }

    pub fn build(&self) -> Result<(DyadicGrid, Weight), LabError> {
        let grid = DyadicGrid::new(self.depth)?;
        let w = materialize(&self.weight, &grid)?;
        Ok((grid, w))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShiftKind {
    Petermichl,
    HaarMultiplier,
    Random,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ShiftSpec {
    #[serde(default)]
    pub m: usize,
    #[serde(default)]
    pub n: usize,
    pub kind: ShiftKind,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_true")]
    pub cancellative: bool,
}

fn default_true() -> bool {
    true
}

impl ShiftSpec {
    pub fn parse(json: &str) -> Result<ShiftSpec, LabError> {
        serde_json::from_str(json).map_err(|e| LabError::Spec(e.to_string()))
    }

    pub fn build(&self, grid: DyadicGrid) -> Result<HaarShift, LabError> {
        match self.kind {
            ShiftKind::Petermichl => build_shift(grid, 0, 1, CoeffSource::Petermichl, true),
            ShiftKind::HaarMultiplier => build_shift(
                grid,
                0,
                0,
                CoeffSource::HaarMultiplier {
                    seed: Some(self.seed),
                },
                true,
            ),
            ShiftKind::Random => build_shift(
                grid,
                self.m,
                self.n,
                CoeffSource::Random { seed: self.seed },
                self.cancellative,
            ),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weight::LeafSet;

    #[test]
    fn weight_spec_round_trips() {
        let json =
            r#"{"depth": 3, "weight": {"family": "two_valued", "t": 3.0, "e": "left_half"}}"#;
        let spec = WeightSpecFile::parse(json).unwrap();
        assert_eq!(spec.depth, 3);
        match &spec.weight {
            WeightFamilySpec::TwoValued { t, e } => {
                assert_eq!(*t, 3.0);
                assert_eq!(*e, LeafSet::LeftHalf);
            }
            other => panic!("unexpected family {other:?}"),
        }
        let (_, w) = spec.build().unwrap();
        assert_eq!(w.values()[0], 3.0);
        assert_eq!(w.values()[7], 1.0);

        let reparsed = WeightSpecFile::parse(&serde_json::to_string(&spec).unwrap()).unwrap();
        assert_eq!(reparsed.weight, spec.weight);
    }

    #[test]
    fn weight_spec_with_explicit_leaves() {
        let json = r#"{"depth": 2, "weight": {"family": "two_valued", "t": 5.0, "e": [0, 3]}}"#;
        let (_, w) = WeightSpecFile::parse(json).unwrap().build().unwrap();
        assert_eq!(w.values(), &[5.0, 1.0, 1.0, 5.0]);
    }

    #[test]
    fn power_and_raw_specs() {
        let json = r#"{"depth": 1, "weight": {"family": "power", "alpha": 1.0}}"#;
        let (_, w) = WeightSpecFile::parse(json).unwrap().build().unwrap();
        assert!((w.values()[0] - 0.25).abs() < 1e-15);

        let json = r#"{"depth": 1, "weight": {"family": "raw", "values": [4.0, 1.0]}}"#;
        let (_, w) = WeightSpecFile::parse(json).unwrap().build().unwrap();
        assert_eq!(w.values(), &[4.0, 1.0]);
    }

    #[test]
    fn malformed_specs_are_rejected_with_diagnostics() {
        assert!(WeightSpecFile::parse("{").is_err());
        let json = r#"{"depth": 2, "weight": {"family": "power", "alpha": -2.0}}"#;
        let err = WeightSpecFile::parse(json).unwrap().build().unwrap_err();
        assert!(err.to_string().contains("alpha"));
    }

    #[test]
    fn shift_spec_builds() {
        let grid = DyadicGrid::new(4).unwrap();
        let spec = ShiftSpec::parse(r#"{"kind": "petermichl"}"#).unwrap();
        let sha = spec.build(grid).unwrap();
        assert_eq!(sha.params(), (0, 1));

        let spec = ShiftSpec::parse(
            r#"{"m": 2, "n": 1, "kind": "random", "seed": 7, "cancellative": false}"#,
        )
        .unwrap();
        let sha = spec.build(grid).unwrap();
        assert_eq!(sha.params(), (2, 1));
        assert!(!sha.is_cancellative());
    }
}
