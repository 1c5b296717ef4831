use thiserror::Error;

/// Errors produced by the metric, assignment and estimation routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("a point needs at least one coordinate")]
    EmptyPoint,

    #[error("point coordinates must be finite")]
    NonFiniteCoordinate,

    #[error("invalid {name} = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("length mismatch: model has {expected} components, vector has {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("index {index} out of range for {len} components")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("indicator entries must be 0 or 1, found {0}")]
    InvalidIndicator(String),

    #[error("cost matrix has {rows} rows but only {cols} columns")]
    TooManyRows { rows: usize, cols: usize },

    #[error("cost matrix entry ({row}, {col}) = {value} is not a finite nonnegative number")]
    InvalidCost { row: usize, col: usize, value: f64 },

    #[error("problem size {size} exceeds the cap of {cap}; {hint}")]
    SizeCap {
        size: usize,
        cap: usize,
        hint: &'static str,
    },

    #[error("components {first} and {second} are {distance} apart, which is not further than c = {c}")]
    SeparationViolated {
        first: usize,
        second: usize,
        distance: f64,
        c: f64,
    },

    #[error("the GOSPA decomposition only exists for alpha = 2, got {0}")]
    AlphaNotTwo(f64),

    #[error("mean-square closed forms are defined for p = 2 only, got p = {0}")]
    OrderNotTwo(f64),

    #[error("unknown {what} `{value}`")]
    UnknownName { what: &'static str, value: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
