use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parameter `{name}` = {value} violates {constraint}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        constraint: &'static str,
    },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid quantum state: {0}")]
    InvalidState(String),

    #[error("Kraus operators are not complete: max |sum K^dag K - I| = {deviation:e}")]
    IncompleteChannel { deviation: f64 },

    #[error("state vector is not normalized (norm^2 = {norm_sqr})")]
    NotNormalized { norm_sqr: f64 },

    #[error("no per-input closed form for `{kind}`; use the protocol simulator")]
    NoClosedForm { kind: &'static str },

    #[error("closed-form averaging needs an integrand affine in sin^2(theta) and cos(2 phi) sin^2(theta)")]
    NonAffineIntegrand,

    #[error(
        "fidelity deviation vanishes on the whole alpha range; sensitivity cutoff is unbounded"
    )]
    UnboundedSensitivity,

    #[error("alpha grid is empty")]
    EmptyGrid,

    #[error("alpha grid must be sorted and lie within [0, 1/2]")]
    InvalidGrid,

    #[error("malformed model spec `{spec}`: {reason}")]
    ModelSpec { spec: String, reason: String },

    #[error("{context}: {message}")]
    Format { context: String, message: String },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn param(name: &'static str, value: f64, constraint: &'static str) -> Self {
        Error::InvalidParameter {
            name,
            value,
            constraint,
        }
    }
}

/// Checks `lo <= value <= hi`, rejecting NaN.
pub(crate) fn check_range(
    name: &'static str,
    value: f64,
    lo: f64,
    hi: f64,
    constraint: &'static str,
) -> Result<()> {
    if value.is_finite() && value >= lo && value <= hi {
        Ok(())
    } else {
        Err(Error::param(name, value, constraint))
    }
}
