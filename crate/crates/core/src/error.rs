use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("coordinate index {index} out of range 1..={n}")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("point has {got} real coordinates, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("point is not finite")]
    NonFinite,

    #[error("point lies outside the domain")]
    OutsideDomain,

    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("invalid stage: {0}")]
    InvalidStage(String),

    #[error("flow inversion failed: {0}")]
    FlowInverse(String),

    #[error("bend inversion did not converge after {0} iterations")]
    BendNotConverged(usize),

    #[error("no admissible epsilon: condition ({condition}) leaves {bound:e}")]
    NoEpsilon { condition: char, bound: f64 },

    #[error("center sampling exhausted after {0} attempts")]
    SamplerExhausted(usize),

    #[error("build failed at stage {stage}: condition ({condition}) violated: {detail}")]
    Invariant {
        stage: usize,
        condition: char,
        detail: String,
    },

    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },

    #[error("unknown identifier `{name}` at offset {offset}")]
    UnknownIdentifier { offset: usize, name: String },

    #[error("expression uses z{index} but the point has only {n} complex coordinates")]
    UnboundVariable { index: usize, n: usize },

    #[error("division by zero in `{0}`")]
    DivisionByZero(String),

    #[error("evaluation produced NaN")]
    NotANumber,

    #[error("ray leaves the domain")]
    DomainExit,

    #[error("degenerate arms: |Im(conj(t1) t2)| = {0:e}")]
    DegenerateArms(f64),

    #[error("no angular points: manifest has no stages")]
    NoAngularPoints,

    #[error("unsupported manifest: {0}")]
    Manifest(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
