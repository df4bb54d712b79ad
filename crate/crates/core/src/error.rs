use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("time window [{t0}, {t1}] is not covered by the trace [{start}, {end}]")]
    WindowOutsideTrace { t0: f64, t1: f64, start: f64, end: f64 },
    #[error("time window is shorter than 1 microsecond")]
    DegenerateWindow,
    #[error("invalid trace: {0}")]
    InvalidTrace(String),
    #[error("invalid layout: {0}")]
    InvalidLayout(String),
    #[error("unknown AP id {0}")]
    UnknownAp(usize),
    #[error("client position coincides with the AP")]
    ZeroDistance,
    #[error("both members of the pair are degenerate")]
    DegeneratePair,
    #[error("need at least two samples at two distinct positions")]
    InsufficientSamples,
    #[error("invalid sample: {0}")]
    InvalidSample(String),
    #[error("gradient descent produced a non-finite iterate (learning rate too high?)")]
    NonFinite,
    #[error("moving direction has zero length")]
    ZeroDirection,
    #[error("speed must be positive")]
    ZeroSpeed,
    #[error("p + alpha must be positive")]
    ZeroDenominator,
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: String, reason: String },
    #[error("invalid scenario: `{field}`: {reason}")]
    InvalidScenario { field: String, reason: String },
    #[error("scenarios differ in `{0}` (only `mode` may differ)")]
    MismatchedScenarios(String),
}

impl Error {
    pub(crate) fn param(field: &str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            field: field.into(),
            reason: reason.into(),
        }
    }

    pub(crate) fn scenario(field: &str, reason: impl Into<String>) -> Self {
        Error::InvalidScenario {
            field: field.into(),
            reason: reason.into(),
        }
    }
}
