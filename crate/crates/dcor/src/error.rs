use alloc::string::String;
use core::fmt;

/// Error type shared by every module in the crate.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A parameter lies outside the domain of the function.
    Domain(String),
    /// A run configuration is inconsistent or out of supported range.
    Config(String),
    /// Matrix or sample dimensions do not line up.
    Dimension(String),
    /// An input contains NaN or infinity.
    NonFinite(String),
    /// A matrix that must be (numerically) positive definite is not;
    /// carries the offending eigenvalue.
    Singular { eigenvalue: f64 },
    /// LU elimination hit a pivot below tolerance in the given column.
    SingularPivot { column: usize, pivot: f64 },
    /// A sample is degenerate for the requested statistic (for example,
    /// all points of one variable coincide).
    Degenerate(String),
    /// Quadrature could not reach the requested tolerance within its
    /// subdivision budget; carries the best estimate and its error bound.
    Accuracy { estimate: f64, error_bound: f64 },
    /// An internal consistency check failed; indicates a bug, not bad input.
    Internal(String),
}

pub type Result<T> = core::result::Result<T, Error>;

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain(msg) => write!(f, "domain error: {msg}"),
            Error::Config(msg) => write!(f, "config error: {msg}"),
            Error::Dimension(msg) => write!(f, "dimension mismatch: {msg}"),
            Error::NonFinite(msg) => write!(f, "non-finite input: {msg}"),
            Error::Singular { eigenvalue } => {
                write!(f, "singular matrix: eigenvalue {eigenvalue:e} below tolerance")
            }
            Error::SingularPivot { column, pivot } => {
                write!(f, "singular matrix: pivot {pivot:e} in column {column} below tolerance")
            }
            Error::Degenerate(msg) => write!(f, "degenerate sample: {msg}"),
            Error::Accuracy { estimate, error_bound } => write!(
                f,
                "requested accuracy not reached: estimate {estimate:e}, error bound {error_bound:e}"
            ),
            Error::Internal(msg) => write!(f, "internal consistency check failed: {msg}"),
        }
    }
}

impl core::error::Error for Error {}
