use thiserror::Error;

/// Invalid numeric input to a quantity constructor or model operation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum DomainError {
    #[error("ratio must be strictly positive and finite, got {0}")]
    NonPositiveRatio(f64),
    #[error("duration must be finite and non-negative, got {0} s")]
    NegativeDuration(f64),
    #[error("rate must be finite and non-negative, got {0} bps")]
    NegativeRate(f64),
    #[error("frequency must be strictly positive and finite, got {0} Hz")]
    NonPositiveFrequency(f64),
    #[error("cadence must be strictly positive")]
    ZeroCadence,
    #[error("angle {0}° outside [0°, 180°]")]
    AngleOutOfRange(f64),
    #[error("distance must be strictly positive and finite, got {0} m")]
    NonPositiveDistance(f64),
    #[error("invalid {field}: {reason}")]
    Invalid { field: &'static str, reason: String },
    #[error("data size overflow")]
    Overflow,
}

impl DomainError {
    pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Self {
        DomainError::Invalid { field, reason: reason.into() }
    }
}

/// Violations of the deployment control protocol.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProtocolError {
    #[error("burn requested while knife set {active} is still firing")]
    BurnWhileBurning { active: usize },
    #[error("switch evaluation requested outside the Evaluate phase")]
    NotEvaluating,
}
