use thiserror::Error;

#[derive(Debug, Error)]
pub enum LabError {
    #[error("invalid weight: {0}")]
    InvalidWeight(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("shift parameters (m={m}, n={n}) leave no representable block at depth {depth}")]
    ShiftExceedsDepth { m: usize, n: usize, depth: usize },
    #[error("depth {depth} exceeds the dense-matrix guard ({max}); dense norms are O(4^N)")]
    DepthGuard { depth: usize, max: usize },
    #[error("malformed spec: {0}")]
    Spec(String),
}
