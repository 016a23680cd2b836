//! Error taxonomy shared by every operation in the crate.

use thiserror::Error;

/// Failure modes of the simulator.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A parameter violated its documented physical range.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The pump reached the stand-alone oscillation threshold: the
    /// amplitude-sum pole `|-(N-1)k + gamma1 + gamma2 + i*omega*tau|`
    /// fell below the 1e-12 guard.
    #[error("oscillation threshold reached (pole magnitude {0:.3e} < 1e-12)")]
    ThresholdReached(f64),

    /// A drift or scattering matrix was exactly singular at the requested
    /// frequency (at or beyond an instability).
    #[error("singular linear system at the requested frequency")]
    SingularSystem,

    /// The loop self-consistency denominator `|1 - m*sqrt(s*r)|` fell
    /// below the 1e-9 guard: the feedback-modified threshold is reached
    /// and the steady-state variance would diverge.
    #[error("coherent feedback loop unstable (denominator magnitude {0:.3e} <= 1e-9)")]
    LoopUnstable(f64),

    /// Two variance reports computed for different mode counts were
    /// combined.
    #[error("mismatched context: reports computed for N={0} and N={1} modes")]
    MismatchedContext(u32, u32),

    /// Every sample point of a sweep was unstable.
    #[error("empty result: every sample point was unstable")]
    EmptyResult,
}

pub type Result<T> = std::result::Result<T, Error>;
