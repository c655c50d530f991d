use num_complex::Complex64;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("overflow while evaluating {context}")]
    Overflow { context: String },

    #[error("sequence index {n} is outside the explicit list of length {len}")]
    Index { n: usize, len: usize },

    #[error("degree {degree} exceeds the supported cap of {cap}")]
    DegreeCap { degree: usize, cap: usize },

    #[error("Borel transform has a pole at t = 0")]
    Pole,

    #[error("divisor nearly vanishes on |t| = {radius}: min |Phi_n| = {min_modulus:e} against max {max_modulus:e}")]
    NearZeroDivisor { radius: f64, min_modulus: f64, max_modulus: f64 },

    #[error("quadrature did not converge after {nodes} nodes: last {estimate}, previous {previous}")]
    NotConverged { estimate: Complex64, previous: Complex64, nodes: usize },

    #[error("function nearly vanishes on |t| = {radius} near angle {angle}: |f| = {modulus:e}")]
    ZeroOnContour { radius: f64, angle: f64, modulus: f64 },

    #[error("phase step still >= pi/2 on |t| = {radius} with {nodes} nodes")]
    PhaseStepTooLarge { radius: f64, nodes: usize },

    #[error("winding estimate {estimate} on |t| = {radius} is not within 0.01 of an integer")]
    NonIntegerWinding { radius: f64, estimate: f64 },

    #[error("scalar c_{n} vanishes")]
    ZeroScalar { n: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn overflow(context: impl Into<String>) -> Self {
        Error::Overflow { context: context.into() }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    /// Errors that mean "the numerics could not decide" rather than "the input is wrong".
    pub fn is_inconclusive(&self) -> bool {
        matches!(self, Error::NotConverged { .. } | Error::PhaseStepTooLarge { .. } | Error::NonIntegerWinding { .. })
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
