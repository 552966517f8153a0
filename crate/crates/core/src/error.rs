//! Crate-wide error type.

use std::fmt;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// An argument is outside the domain of the operation.
    Domain(String),
    /// Evaluation hit the pole of a map or potential.
    Pole,
    /// A rank-one update with `t = -1` has no inverse.
    SingularMatrix,
    /// A profile violates its boundary or smoothness contract.
    InvalidProfile(String),
    /// A Rayleigh quotient with vanishing denominator.
    ZeroDenominator,
    /// A quadrature with a singular point needs a declared local exponent.
    MissingSingularity,
    /// A quadrature failed to converge and the caller required convergence.
    Unconverged { value: f64, error_estimate: f64 },
    /// Unknown experiment name.
    UnknownExperiment(String),
    /// Malformed experiment configuration.
    InvalidConfig(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain(msg) => write!(f, "domain error: {msg}"),
            Error::Pole => write!(f, "evaluation at a pole"),
            Error::SingularMatrix => write!(f, "singular matrix (t = -1)"),
            Error::InvalidProfile(msg) => write!(f, "invalid profile: {msg}"),
            Error::ZeroDenominator => write!(f, "undefined quotient: zero denominator"),
            Error::MissingSingularity => {
                write!(f, "singular mass near the pole but no declared exponent")
            }
            Error::Unconverged {
                value,
                error_estimate,
            } => write!(
                f,
                "quadrature did not converge (value {value:e}, error {error_estimate:e})"
            ),
            Error::UnknownExperiment(name) => write!(f, "unknown experiment `{name}`"),
            Error::InvalidConfig(msg) => write!(f, "invalid configuration: {msg}"),
        }
    }
}

impl std::error::Error for Error {}
