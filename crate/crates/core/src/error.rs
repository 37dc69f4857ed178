use thiserror::Error;

/// Errors raised by the numerical routines.
///
/// Verdicts (invalid parameter regions, failed property checks, ambiguous
/// calibrations) are data and are reported through result types instead.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("argument {value} outside the domain {domain}")]
    Domain { value: f64, domain: &'static str },

    #[error(
        "x = {x} lies within {eps:e} of an endpoint where the translation prefactor is singular"
    )]
    Edge { x: f64, eps: f64 },

    #[error("quadrature size must be at least {min}, got {got}")]
    QuadratureSize { min: usize, got: usize },

    #[error("Gauss-Legendre root {index} of {size} did not converge in {iterations} iterations")]
    Convergence {
        index: usize,
        size: usize,
        iterations: usize,
    },

    #[error("non-finite value {value} at x = {x}")]
    NonFinite { x: f64, value: f64 },

    #[error("multiplier has not been validated against the empirical fit")]
    UnvalidatedMultiplier,

    #[error(
        "diagonal Fourier-Jacobi coefficient {value:e} for degree {n} is too small to divide by"
    )]
    DivisionGuard { n: usize, value: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("linear system is singular: {0}")]
    Singular(&'static str),

    #[error("{context}: {source}")]
    Context {
        context: String,
        #[source]
        source: Box<Error>,
    },

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub fn context(self, context: impl Into<String>) -> Self {
        Error::Context {
            context: context.into(),
            source: Box::new(self),
        }
    }
}

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

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
