use thiserror::Error;

/// Errors raised by the operators, grids, integrators and monitors.
#[derive(Error, Debug, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("operator is not symmetric positive definite")]
    NotSpd,

    #[error("quadratic c2*x^2 + c1*x + c0 has complex roots (discriminant {discriminant:e})")]
    ComplexRoots { discriminant: f64 },

    #[error("zero or non-finite pivot at row {row} in tridiagonal elimination")]
    SingularFactor { row: usize },

    #[error("negative quadratic form {0:e}: operator is not positive definite")]
    NegativeQuadraticForm(f64),

    #[error("operators are built on different base matrices")]
    BaseMismatch,

    #[error("invalid time grid: {0}")]
    InvalidGrid(String),

    #[error("invalid mesh step h = {0}: 1/h must be an integer >= 2")]
    InvalidMesh(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("scheme requires a uniform time grid")]
    NonUniformGrid,

    #[error("scheme requires at least {needed} time steps, grid has {found}")]
    TooFewSteps { needed: usize, found: usize },

    #[error("step to level {level} failed: {source}")]
    Step {
        level: usize,
        #[source]
        source: Box<Error>,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
