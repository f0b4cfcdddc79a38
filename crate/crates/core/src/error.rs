use thiserror::Error;

/// Every failure the library can report.
///
/// Variants split into two families: the caller asked for something outside
/// a supported domain ([`Error::is_validation`]), or a numerical method failed
/// on an input it was supposed to handle.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{what} = {value} is outside the supported domain {domain}")]
    Domain {
        what: &'static str,
        value: f64,
        domain: &'static str,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("problem size {size} exceeds the cap of {cap}; {hint}")]
    TooLarge { size: u64, cap: u64, hint: &'static str },

    #[error("series diverges: {0}")]
    Divergent(&'static str),

    #[error(
        "adaptive quadrature stalled at estimated error {estimate:e} (target {target:e}) after {segments} segments"
    )]
    Quadrature {
        estimate: f64,
        target: f64,
        segments: usize,
    },

    #[error("matrix is singular to working precision (the functional has a pole here)")]
    Singular,

    #[error("condensed phase: T* = {t_star} does not exceed the critical temperature {t_critical}")]
    Condensed { t_star: f64, t_critical: f64 },

    #[error("root finding failed: {0}")]
    NoConvergence(String),
}

impl Error {
    /// True when the error reflects bad input rather than a numerical breakdown.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::Domain { .. } | Error::InvalidParameter(_) | Error::TooLarge { .. }
        )
    }

    pub(crate) fn domain(what: &'static str, value: f64, domain: &'static str) -> Self {
        Error::Domain { what, value, domain }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
