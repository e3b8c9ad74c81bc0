use thiserror::Error;

/// Errors raised by the physical and cost models.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    /// An input lies outside the domain of a model formula.
    #[error("{field} = {value} is outside the model domain: {reason}")]
    Domain {
        field: &'static str,
        value: f64,
        reason: &'static str,
    },
    /// A composite input (profile, sweep grid, layout) is inconsistent.
    #[error("invalid {what}: {reason}")]
    Validation { what: &'static str, reason: String },
}

pub type Result<T> = std::result::Result<T, ModelError>;

pub(crate) fn ensure_positive(field: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(ModelError::Domain {
            field,
            value,
            reason: "must be finite and > 0",
        })
    }
}

pub(crate) fn ensure_non_negative(field: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value >= 0.0 {
        Ok(value)
    } else {
        Err(ModelError::Domain {
            field,
            value,
            reason: "must be finite and >= 0",
        })
    }
}

/// Elevation angles are restricted to (0, π/2]; horizontal paths are not modelled.
pub(crate) fn ensure_elevation(value: f64) -> Result<f64> {
    if value.is_finite() && value > 0.0 && value <= std::f64::consts::FRAC_PI_2 {
        Ok(value)
    } else {
        Err(ModelError::Domain {
            field: "elevation",
            value,
            reason: "must lie in (0, pi/2] radians",
        })
    }
}
