use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("argument outside the supported domain: {0}")]
    Domain(String),

    #[error("argument {0} is within the exclusion radius of a pole")]
    Pole(Complex64),

    #[error("singular argument: {0}")]
    SingularArgument(String),

    #[error("parameters outside the supported family: {0}")]
    UnsupportedParameters(String),

    #[error("accuracy target missed: estimate {estimate}, error bound {error:e}")]
    Accuracy { estimate: Complex64, error: f64 },

    #[error("inadmissible boundary pair: {0}")]
    Admissibility(String),

    #[error("spectral parameter {0} is an eigenvalue of the extension")]
    EigenvalueHit(Complex64),

    #[error("root search failed: {0}")]
    RootSearch(String),

    #[error("sampled function reaches the grid edge (edge/peak ratio {0:e})")]
    Aliasing(f64),

    #[error("numerically singular matrix: {0}")]
    Conditioning(String),
}

pub type Result<T> = std::result::Result<T, Error>;
