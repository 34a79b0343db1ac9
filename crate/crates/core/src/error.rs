use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("undefined mixing angle: control amplitude is zero")]
    UndefinedMixingAngle,

    #[error("non-real phase: coefficient unitarity violated by {deviation:.3e} at shift k={shift}")]
    NonRealPhase { shift: i64, deviation: f64 },

    #[error("truncation too small: {0}")]
    Truncation(String),

    #[error("recurrence unstable: row length {n_max} too short for argument {x}")]
    RecurrenceUnstable { n_max: usize, x: f64 },

    #[error("under-resolved spectrum: {0}")]
    UnderResolved(String),

    #[error("two-photon pole on grid at omega={omega:e} (gamma_cb = 0)")]
    TwoPhotonPole { omega: f64 },

    #[error("singular coupling matrix at omega={omega:e} (condition estimate {condition:.3e})")]
    Singular { omega: f64, condition: f64 },

    #[error("susceptibility pole at omega={omega:e}")]
    SusceptibilityPole { omega: f64 },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("unsupported: {0}")]
    Unsupported(String),
}

impl Error {
    /// Errors that come from the numerics rather than from bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::TwoPhotonPole { .. }
                | Error::Singular { .. }
                | Error::SusceptibilityPole { .. }
                | Error::RecurrenceUnstable { .. }
        )
    }
}
