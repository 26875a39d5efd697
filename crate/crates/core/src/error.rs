use thiserror::Error;

/// Errors raised by the numerical and distributional routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter { name: &'static str, value: f64, reason: &'static str },

    #[error("{function}: argument {value} outside the domain ({reason})")]
    Domain { function: &'static str, value: f64, reason: &'static str },

    #[error("quadrature did not converge on [{a}, {b}]: error estimate {error_estimate:e} > tolerance {tol:e} after {evaluations} evaluations")]
    NonConvergence { a: f64, b: f64, error_estimate: f64, tol: f64, evaluations: usize },

    #[error("root is not bracketed: g({lo}) = {g_lo}, g({hi}) = {g_hi}")]
    InvalidBracket { lo: f64, hi: f64, g_lo: f64, g_hi: f64 },

    #[error("root finder exhausted {iterations} iterations with bracket width {width:e}")]
    RootIterations { iterations: usize, width: f64 },

    #[error("could not bracket the {p} quantile")]
    BracketFailure { p: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
