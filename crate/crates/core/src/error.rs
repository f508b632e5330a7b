use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the function.
    #[error("domain error in {function}: {reason} (got {value})")]
    Domain {
        function: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("invalid parameter {name} = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("invalid moment orders (n = {n}, m = {m}): need n > m > 0, both finite")]
    InvalidOrders { n: f64, m: f64 },

    /// The requested moment is not representable as an `f64`.
    #[error("moment overflow: log-moment {log_moment} exceeds the representable range")]
    Overflow { log_moment: f64 },

    #[error("quadrature did not converge: error estimate {error_estimate:e} after {subdivisions} subdivisions")]
    Convergence {
        subdivisions: usize,
        error_estimate: f64,
    },

    /// Empirical moments at or below the `R = 1` boundary: no finite shape
    /// parameter reproduces them.
    #[error("non-identifiable sample: log moment ratio {statistic:e} is not positive beyond rounding")]
    NonIdentifiable { statistic: f64 },

    #[error("bracket expansion from ({lo}, {hi}) could not straddle target {target}")]
    BracketFailure { lo: f64, hi: f64, target: f64 },

    #[error("bisection did not converge after {iterations} iterations (residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("invalid data: {0}")]
    Data(String),

    #[error("invalid configuration: {0}")]
    Config(String),
}

impl Error {
    pub(crate) fn domain(function: &'static str, value: f64, reason: &'static str) -> Self {
        Error::Domain {
            function,
            value,
            reason,
        }
    }
}
