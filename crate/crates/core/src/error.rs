use thiserror::Error;

/// Errors raised when an input violates a documented precondition.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("radius must lie in [0, 1], got {0}")]
    Radius(f64),

    #[error("exponent {name} must be {requirement}, got {value}")]
    Exponent {
        name: &'static str,
        requirement: &'static str,
        value: f64,
    },

    #[error("invalid argument: {0}")]
    Invalid(String),

    #[error("weight is not in the doubling class: {0}")]
    NotDoubling(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_exponent(name: &'static str, value: f64, allow_inf: bool) -> Result<()> {
    let ok = value > 0.0 && (value.is_finite() || (allow_inf && value == f64::INFINITY));
    if ok {
        Ok(())
    } else {
        Err(Error::Exponent {
            name,
            requirement: if allow_inf { "in (0, inf]" } else { "in (0, inf)" },
            value,
        })
    }
}

pub(crate) fn check_radius(r: f64) -> Result<()> {
    if (0.0..=1.0).contains(&r) {
        Ok(())
    } else {
        Err(Error::Radius(r))
    }
}
