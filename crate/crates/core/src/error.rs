use thiserror::Error;

/// Everything that can go wrong inside the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("argument outside the domain of {function}: {detail}")]
    Domain { function: &'static str, detail: String },

    #[error("matrix is not Hermitian: deviation {deviation:e} at ({row}, {col})")]
    NotHermitian { row: usize, col: usize, deviation: f64 },

    #[error("matrix is numerically singular: pivot {pivot:e} at step {step}")]
    SingularMatrix { step: usize, pivot: f64 },

    #[error("points {first} and {second} coincide")]
    DuplicatePoints { first: usize, second: usize },

    #[error("incomplete gamma argument |u| = {modulus:e} exceeds the supported range")]
    OverflowGuard { modulus: f64 },

    #[error("{what} did not converge after {iterations} iterations")]
    NoConvergence { what: &'static str, iterations: usize },

    #[error("point {point} lies outside the droplet of radius {radius}")]
    OutsideDroplet { point: String, radius: f64 },

    #[error("need at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },

    #[error("holes {first} and {second} overlap")]
    OverlappingHoles { first: usize, second: usize },

    #[error("hole {index} is not contained in the droplet")]
    HoleOutsideDroplet { index: usize },

    #[error("problem size {size} exceeds the limit {limit}")]
    TooLarge { size: usize, limit: usize },

    #[error("total charge {total} differs from the sum of cluster charges {sum}")]
    ChargeMismatch { total: f64, sum: f64 },

    #[error("Monte Carlo relative error {ratio:.3} is too large to trust")]
    VarianceExplosion { ratio: f64 },

    #[error("kernel trace {value} is not an integer")]
    NonIntegerTrace { value: f64 },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("assumption violated: {0}")]
    AssumptionViolated(String),

    #[error("i/o failure: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn domain(function: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain {
            function,
            detail: detail.into(),
        }
    }

    /// True for failures caused by the input rather than by the arithmetic.
    pub fn is_configuration_error(&self) -> bool {
        matches!(
            self,
            Error::Domain { .. }
                | Error::DuplicatePoints { .. }
                | Error::OutsideDroplet { .. }
                | Error::TooFewPoints { .. }
                | Error::OverlappingHoles { .. }
                | Error::HoleOutsideDroplet { .. }
                | Error::TooLarge { .. }
                | Error::ChargeMismatch { .. }
                | Error::InvalidConfig(_)
                | Error::AssumptionViolated(_)
                | Error::Io(_)
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::InvalidConfig(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
