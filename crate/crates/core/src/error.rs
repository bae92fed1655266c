use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("cube {cube} lies outside the sampled domain")]
    CubeOutsideDomain { cube: String },

    #[error("cube at level {level} is finer than the sample grid (cell level {cell_level})")]
    CubeFinerThanGrid { level: i32, cell_level: i32 },

    #[error("sampled functions live on different grids")]
    GridMismatch,

    #[error("non-finite sample {value} in cell {cell}")]
    NonFinite { cell: usize, value: f64 },

    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unsupported dimension {dim} for {what}")]
    UnsupportedDimension { dim: usize, what: &'static str },

    #[error("weight must be positive but cell {cell} has value {value}")]
    NonPositiveWeight { cell: usize, value: f64 },

    #[error("division by zero in factored weight at cell {cell}")]
    DegenerateMaximal { cell: usize },

    #[error("Haar shift coefficient rule violates property ({property}): {detail}")]
    InvalidShiftRule { property: &'static str, detail: String },

    #[error("no symbolic asymptotics for Young function {0}")]
    UnknownAsymptotics(String),

    #[error("cannot take the logarithm of non-positive coordinate {0}")]
    NonPositiveCoordinate(f64),

    #[error("need at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },

    #[error("exp(±εb) overflows: ε·max|b| = {0}")]
    ContourOverflow(f64),

    #[error("radial integral diverges: {0}")]
    Diverges(String),

    #[error("quadrature failed to converge: {0}")]
    Quadrature(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}
