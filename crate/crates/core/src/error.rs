use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("degenerate input: {0}")]
    Degenerate(&'static str),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("inconsistent relations at basis triple ({0}, {1}, {2})")]
    Inconsistent(usize, usize, usize),
    #[error("not torsion-free: {0}")]
    NotTorsionFree(String),
    #[error("invalid relation: {0}")]
    InvalidRelation(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("frame unsupported: {0}")]
    FrameUnsupported(String),
    #[error("subgroup is not normal")]
    NotNormal,
    #[error("subgroup is not isolated")]
    NotIsolated,
    #[error("index {index} out of range (series length {len})")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("subgroup has infinite index")]
    InfiniteIndex,
    #[error("element lies in the subgroup")]
    InSubgroup,
    #[error("element is not central")]
    NotCentral,
    #[error("not in coset: image of the element is outside the image of the subgroup")]
    NotInCoset,
    #[error("cap exceeded: {what} > {cap}")]
    CapExceeded { what: &'static str, cap: u64 },
    #[error("insufficient rows: need {need}, have {have}")]
    InsufficientRows { need: usize, have: usize },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("search exhausted: {0}")]
    Exhausted(String),
}

pub type Result<T> = std::result::Result<T, Error>;
