use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("state has weight {residual:e} outside the separated-variable subspace")]
    NotSOV { residual: f64 },
    #[error("point is not in the canonical region: {reason}")]
    NotInDelta { reason: String },
    #[error("point is not in the projected region: {reason}")]
    NotInDeltaPrime { reason: String },
    #[error("point is not normalized (squared norm {norm_sqr})")]
    NotNormalized { norm_sqr: f64 },
    #[error("zero state")]
    ZeroState,
    #[error("matrix is not unitary (deviation {deviation:e})")]
    NotUnitary { deviation: f64 },
    #[error("canonical form failed consistency checks: {detail}")]
    Inconsistent { detail: String },
    #[error("calibration residual {residual:e} exceeds tolerance")]
    CalibrationFailed { residual: f64 },
    #[error("optimizer did not converge: {detail}")]
    OptimizerFailed { detail: String },
    #[error("malformed input: {detail}")]
    Parse { detail: String },
}

impl Error {
    /// Variant name, used verbatim in machine readable error payloads.
    pub fn name(&self) -> &'static str {
        match self {
            Error::NotSOV { .. } => "NotSOV",
            Error::NotInDelta { .. } => "NotInDelta",
            Error::NotInDeltaPrime { .. } => "NotInDeltaPrime",
            Error::NotNormalized { .. } => "NotNormalized",
            Error::ZeroState => "ZeroState",
            Error::NotUnitary { .. } => "NotUnitary",
            Error::Inconsistent { .. } => "Inconsistent",
            Error::CalibrationFailed { .. } => "CalibrationFailed",
            Error::OptimizerFailed { .. } => "OptimizerFailed",
            Error::Parse { .. } => "Parse",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
