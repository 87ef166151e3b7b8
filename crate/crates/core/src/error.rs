use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("evaluation at pole {pole} (z = {z})")]
    AtPole { z: Complex64, pole: Complex64 },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("matrix function is identically singular")]
    Singular,

    #[error("non-integrable coupling: {0}")]
    NonIntegrable(String),

    #[error("holomorphic point: {0} is not a pole")]
    HolomorphicPoint(Complex64),

    #[error("schema violation at `{path}`: {message}")]
    Schema { path: String, message: String },

    #[error("invariant `{name}` violated: {detail}")]
    Invariant { name: String, detail: String },

    #[error("unknown builtin model `{0}`")]
    UnknownModel(String),

    #[error("no null vector: {0}")]
    NoNullVector(String),

    #[error("conjugate pole, Lemma inapplicable: {0} and its conjugate are both poles")]
    ConjugatePole(Complex64),

    #[error("contour too close to a zero or pole: {0}")]
    ContourTooClose(String),

    #[error("quadrature did not converge (estimate {estimate}, error {error:e})")]
    Quadrature { estimate: Complex64, error: f64 },

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
