use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Cholesky pivot at `index` was not strictly positive.
    NotPositiveDefinite { index: usize, pivot: f64 },
    /// Matrix claimed symmetric differs from its transpose beyond tolerance.
    Asymmetric { row: usize, col: usize },
    /// A parameter violated its documented range.
    InvalidParameter { name: &'static str, reason: &'static str },
    /// Envelope queried before its anchor time.
    BeforeAnchor { t: f64, anchor: f64 },
    /// Tracking error reached or left the barrier envelope.
    EnvelopeBreach { joint: usize, error: f64, bound: f64 },
    /// Envelope breach raised while integrating, stamped with the step time.
    BreachDuringRun { t: f64, joint: usize, error: f64, bound: f64 },
    /// The error at a phase start is already outside the fresh envelope.
    InfeasiblePhaseStart { joint: usize, error: f64, rho0: f64 },
    /// Non-finite derivative or state.
    SimDiverged { t: f64 },
    /// Empty or out-of-range statistics window.
    EmptyWindow { lo: f64, hi: f64 },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::NotPositiveDefinite { index, pivot } => {
                write!(f, "matrix is not positive definite (pivot {index} = {pivot:e})")
            }
            Error::Asymmetric { row, col } => {
                write!(f, "matrix is not symmetric at ({row}, {col})")
            }
            Error::InvalidParameter { name, reason } => write!(f, "invalid {name}: {reason}"),
            Error::BeforeAnchor { t, anchor } => {
                write!(f, "envelope evaluated at t = {t} before its anchor {anchor}")
            }
            Error::EnvelopeBreach { joint, error, bound } => {
                write!(f, "envelope breach on joint {}: |e| = {} >= b = {}", joint + 1, libm::fabs(*error), bound)
            }
            Error::BreachDuringRun { t, joint, error, bound } => write!(
                f,
                "envelope breach at t = {t:.4} s on joint {}: |e| = {} >= b = {}",
                joint + 1,
                libm::fabs(*error),
                bound
            ),
            Error::InfeasiblePhaseStart { joint, error, rho0 } => write!(
                f,
                "phase start infeasible on joint {}: |e| = {} >= rho0 = {}",
                joint + 1,
                libm::fabs(*error),
                rho0
            ),
            Error::SimDiverged { t } => write!(f, "simulation diverged at t = {t:.4} s"),
            Error::EmptyWindow { lo, hi } => write!(f, "no samples in window [{lo}, {hi}]"),
        }
    }
}

impl core::error::Error for Error {}
