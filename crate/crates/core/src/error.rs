use std::fmt;

use thiserror::Error;

/// Integer corner and level of a dyadic cube, used in diagnostics.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CubeId {
    pub level: u32,
    pub corner: Vec<i64>,
}

impl fmt::Display for CubeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "level {} cube at {:?}", self.level, self.corner)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("exponent {0} is outside the admissible range")]
    InvalidExponent(f64),
    #[error("invalid box: {0}")]
    InvalidBox(String),
    #[error("field has {found} samples but its box holds {expected}")]
    SampleCount { expected: usize, found: usize },
    #[error("field contains a non-finite sample at flat index {0}")]
    NonFinite(usize),
    #[error("fields live on different boxes")]
    BoxMismatch,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("dyadic level {0} is finer than the grid")]
    MisalignedLevel(i64),
    #[error("field is not constant on {0}")]
    NotMeasurable(CubeId),
    #[error("scale {0} contains no quadrature node")]
    DegenerateScale(f64),
    #[error("invalid convex body: {0}")]
    InvalidBody(String),
    #[error("invalid time grid: {0}")]
    InvalidTimeGrid(String),
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),
    #[error("point lies outside the interpolation hull (violates {0})")]
    OutsideHull(String),
    #[error("search failed: {0}")]
    SearchFailed(String),
    #[error("malformed field file: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
