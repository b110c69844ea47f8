use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("no {family} operator of order {order} ({layout})")]
    UnsupportedOrder {
        family: String,
        order: usize,
        layout: &'static str,
    },
    #[error("grid with {n_points} points is too small, need at least {required}")]
    GridTooSmall { n_points: usize, required: usize },
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("shape mismatch: expected {expected:?}, got {got:?}")]
    ShapeMismatch {
        expected: (usize, usize),
        got: (usize, usize),
    },
    #[error("ramp fraction {0} outside (0, 0.5]")]
    BadRamp(f64),
    #[error("non-positive depth h = {value} at node {index}")]
    NonPositiveDepth { index: usize, value: f64 },
    #[error("singular weight matrix at node {index}")]
    SingularWeight { index: usize },
    #[error("flow is not subcritical: |u| = {speed}, sqrt(gh) = {celerity}")]
    NotSubcritical { speed: f64, celerity: f64 },
    #[error("penalty parameters violate the stability table: {0}")]
    BadPenalty(String),
    #[error("non-finite value produced at step {step}")]
    NonFinite { step: usize },
    #[error("no root in bracket: {0}")]
    NoRoot(String),
    #[error("matrix dimension {0} exceeds the dense solver guard")]
    DimensionTooLarge(usize),
    #[error("eigenvalue iteration did not converge")]
    NoConvergence,
    #[error("spectra require a square grid, got {0}x{1}")]
    NonSquareGrid(usize, usize),
    #[error("invalid data: {0}")]
    InvalidData(String),
    #[error("runner failed: {0}")]
    RunnerFailure(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
