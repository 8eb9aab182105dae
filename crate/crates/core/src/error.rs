use alloc::string::String;
use core::fmt;

pub type Result<T, E = Error> = core::result::Result<T, E>;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Determinant too small to invert (degenerate pixel).
    SingularMatrix,
    /// A Cholesky pivot fell below the scale-aware tolerance.
    NotPositiveDefinite,
    /// An observation handed to the density is not positive definite.
    InvalidObservation,
    /// Number of looks outside the admissible range.
    InvalidLooks(f64),
    EmptySample,
    /// Argument outside the domain of a special function or formula.
    DomainError(&'static str),
    /// The looks score does not change sign on the search bracket. `clamp`
    /// is the bracket end the estimate should be clamped to.
    NoRoot {
        clamp: f64,
    },
    /// `1 - 4·α·δt/h²` is negative, so the diffusion step is not a convex
    /// combination.
    StabilityViolation {
        margin: f64,
    },
    /// Energy or gradient evaluated to NaN or infinity.
    NonFiniteEnergy {
        iteration: usize,
    },
    InvalidSpec(String),
    InvalidWeights(String),
    /// Grid dimensions disagree with the data handed in.
    DimensionMismatch {
        expected: usize,
        found: usize,
    },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::SingularMatrix => write!(f, "matrix is singular"),
            Error::NotPositiveDefinite => write!(f, "matrix is not positive definite"),
            Error::InvalidObservation => {
                write!(f, "observation is not a positive definite matrix")
            }
            Error::InvalidLooks(l) => write!(f, "invalid number of looks: {l}"),
            Error::EmptySample => write!(f, "sample is empty"),
            Error::DomainError(what) => write!(f, "argument out of domain: {what}"),
            Error::NoRoot { clamp } => {
                write!(f, "looks equation has no root in bracket (clamp to {clamp})")
            }
            Error::StabilityViolation { margin } => {
                write!(f, "stability condition violated: 1 - 4*alpha*dt/h^2 = {margin}")
            }
            Error::NonFiniteEnergy { iteration } => {
                write!(f, "non-finite energy at iteration {iteration}")
            }
            Error::InvalidSpec(msg) => write!(f, "invalid phantom spec: {msg}"),
            Error::InvalidWeights(msg) => write!(f, "invalid weights: {msg}"),
            Error::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
        }
    }
}

impl core::error::Error for Error {}
