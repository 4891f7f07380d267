use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

/// Which density-matrix invariant a matrix failed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DensityViolation {
    NonFinite,
    NotSquare,
    NonHermitian(f64),
    Trace(f64),
    Negative(f64),
}

impl fmt::Display for DensityViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::NonFinite => write!(f, "non-finite entries"),
            Self::NotSquare => write!(f, "entry count is not dim²"),
            Self::NonHermitian(d) => write!(f, "hermiticity defect {d:e}"),
            Self::Trace(t) => write!(f, "trace {t} differs from 1"),
            Self::Negative(e) => write!(f, "minimum eigenvalue {e:e} is negative"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not symmetric (max asymmetry {0:e})")]
    NotSymmetric(f64),

    #[error("not a density matrix: {0}")]
    NotADensityMatrix(DensityViolation),

    #[error("state is not X-shaped: largest off-X magnitude {0:e}")]
    XLeakage(f64),

    #[error("remainder identity violated by {0:e}")]
    IdentityViolation(f64),

    #[error("{what} = {value} is outside [{min}, {max}]")]
    OutOfRange {
        what: &'static str,
        value: f64,
        min: f64,
        max: f64,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(&'static str),

    #[error("trace drift {drift:e} after {steps} integration steps; reduce the step size")]
    StepTooLarge { drift: f64, steps: usize },

    #[error("population {0:e} at the Fock cutoff couples out of the truncated space")]
    TruncationError(f64),

    #[error("Fock cutoff {n_max} is below the initial excitation number {excitations}")]
    InsufficientCutoff { n_max: usize, excitations: usize },
}

pub(crate) fn check_range(what: &'static str, value: f64, min: f64, max: f64) -> Result<()> {
    if value.is_finite() && value >= min && value <= max {
        Ok(())
    } else {
        Err(Error::OutOfRange {
            what,
            value,
            min,
            max,
        })
    }
}
