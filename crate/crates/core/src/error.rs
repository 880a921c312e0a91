use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("degree must be at least {min}, got {got}")]
    InvalidDegree { got: u32, min: u32 },

    #[error("invalid polynomial: {0}")]
    InvalidPolynomial(String),

    /// Both sign choices of the Laguerre denominator vanish.
    #[error("Laguerre denominator vanishes for both signs at z = {re} + {im}i")]
    DegenerateDenominator { re: f64, im: f64 },

    /// The general-form step produced a value outside the finite doubles.
    #[error("Laguerre step overflowed at z = {re} + {im}i")]
    NonFinite { re: f64, im: f64 },

    #[error("no sign change to bracket the {which} zero of f_{n} at theta = {theta}")]
    BracketFailure {
        n: u32,
        theta: f64,
        which: &'static str,
    },

    #[error("fewer than three resolvable errors; cannot fit a convergence order")]
    InsufficientResolution,

    #[error("Newton refinement did not converge in {steps} steps (residual {residual:e})")]
    NoConvergence { steps: usize, residual: f64 },

    #[error("point closes with period {divisor}, which divides {period}")]
    NotPrimitive { period: usize, divisor: usize },

    #[error("refined point {re} + {im}i left the open sector 0 < arg z < pi/n")]
    EscapedSector { re: f64, im: f64 },

    #[error("refined point converged to a root of unity")]
    ConvergedToRoot,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
