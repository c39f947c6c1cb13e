use thiserror::Error;

/// Errors raised by the channel, link and network models.
#[derive(Debug, Error)]
pub enum Error {
    #[error("altitude {altitude} m is outside the {model} profile range ({min} m, {max} m]")]
    AltitudeOutOfRange {
        model: &'static str,
        altitude: f64,
        min: f64,
        max: f64,
    },
    #[error("wavenumber must be positive, got {0}")]
    NonPositiveWavenumber(f64),
    #[error("propagation distance must be positive, got {0}")]
    ZeroDistance(f64),
    #[error("invalid parameter `{name}`: {value} ({reason})")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },
    #[error("zenith angle {zenith_deg:.3} deg is outside [0, {max_deg} deg)")]
    ZenithOutOfRange { zenith_deg: f64, max_deg: f64 },
    #[error("quadrature did not reach tolerance {tolerance:e}: estimate {estimate:e}, error {error:e}")]
    QuadratureFailure {
        estimate: f64,
        error: f64,
        tolerance: f64,
    },
    #[error("input is empty")]
    EmptyInput,
    #[error("malformed record at row {row}: {reason}")]
    MalformedRecord { row: usize, reason: String },
    #[error("transmissivity factor `{name}` = {value} is outside [0, 1]")]
    FactorOutOfRange { name: &'static str, value: f64 },
    #[error("variance `{name}` = {value} is negative")]
    NegativeVariance { name: &'static str, value: f64 },
    #[error("invalid channel geometry: {0}")]
    InvalidGeometry(String),
    #[error("semi-axis covariance is not positive definite: {0}")]
    NonPositiveDefiniteCovariance(String),
    #[error("link geometry must be positive: {0}")]
    NonPositiveGeometry(String),
    #[error("invalid quantum state: {0}")]
    InvalidState(String),
    #[error("invalid topology: {0}")]
    InvalidTopology(String),
    #[error("reference state is not normalized (norm {0})")]
    NonNormalizedReference(f64),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Whether the failure comes from a numerical routine rather than from
    /// invalid input.
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            Error::QuadratureFailure { .. } | Error::NonPositiveDefiniteCovariance(_)
        )
    }

    pub fn is_io(&self) -> bool {
        matches!(self, Error::Io(_)) || matches!(self, Error::Csv(e) if e.is_io_error())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn positive(name: &'static str, value: f64) -> Result<f64> {
    if value > 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            reason: "must be positive and finite",
        })
    }
}

pub(crate) fn non_negative(name: &'static str, value: f64) -> Result<f64> {
    if value >= 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            reason: "must be non-negative and finite",
        })
    }
}
