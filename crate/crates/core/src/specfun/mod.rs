//! Scalar special functions: Bose–Einstein polylogarithms and the zeta
//! constants behind them, the Mittag-Leffler function with its derivatives,
//! the one-sided stable law (density, sampler and the induced mixing law on
//! Poisson intensities) and the lognormal density.

mod lognormal;
mod mittag_leffler;
mod polylog;
mod stable;

pub use lognormal::{lognormal_pdf, lognormal_rule};
pub use mittag_leffler::{mittag_leffler, mittag_leffler_complex, mittag_leffler_deriv, ML_MIN_ARGUMENT};
pub use polylog::{polylog, polylog_direct, polylog_neg_log, polylog_robinson, zeta_const};
pub use stable::{sample_mixing_tau, stable_density, MixingDensity};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Supported polylogarithm orders `s ∈ {1/2, 3/2, 5/2}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PolylogOrder {
    Half,
    ThreeHalves,
    FiveHalves,
}

impl PolylogOrder {
    pub fn s(self) -> f64 {
        match self {
            PolylogOrder::Half => 0.5,
            PolylogOrder::ThreeHalves => 1.5,
            PolylogOrder::FiveHalves => 2.5,
        }
    }

    pub fn from_s(s: f64) -> Result<Self> {
        match s {
            0.5 => Ok(PolylogOrder::Half),
            1.5 => Ok(PolylogOrder::ThreeHalves),
            2.5 => Ok(PolylogOrder::FiveHalves),
            _ => Err(Error::domain("polylog order", s, "{1/2, 3/2, 5/2}")),
        }
    }

    /// The order one below, as produced by `z d/dz`.
    pub fn lowered(self) -> Option<Self> {
        match self {
            PolylogOrder::Half => None,
            PolylogOrder::ThreeHalves => Some(PolylogOrder::Half),
            PolylogOrder::FiveHalves => Some(PolylogOrder::ThreeHalves),
        }
    }
}

/// Order `α ∈ (0, 1]` of a fractional Poisson law; `α = 1` is plain Poisson.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct FractionalOrder(f64);

impl FractionalOrder {
    pub const POISSON: FractionalOrder = FractionalOrder(1.0);

    pub fn new(alpha: f64) -> Result<Self> {
        if alpha > 0.0 && alpha <= 1.0 {
            Ok(Self(alpha))
        } else {
            Err(Error::domain("alpha", alpha, "(0, 1]"))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }

    pub fn is_poisson(self) -> bool {
        self.0 == 1.0
    }
}

impl TryFrom<f64> for FractionalOrder {
    type Error = Error;
    fn try_from(alpha: f64) -> Result<Self> {
        Self::new(alpha)
    }
}

impl From<FractionalOrder> for f64 {
    fn from(order: FractionalOrder) -> f64 {
        order.0
    }
}

/// Width `σ > 0` of the lognormal law with mode at 1.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct LogNormalWidth(f64);

impl LogNormalWidth {
    pub fn new(sigma: f64) -> Result<Self> {
        if sigma > 0.0 && sigma.is_finite() {
            Ok(Self(sigma))
        } else {
            Err(Error::domain("sigma", sigma, "(0, ∞)"))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for LogNormalWidth {
    type Error = Error;
    fn try_from(sigma: f64) -> Result<Self> {
        Self::new(sigma)
    }
}

impl From<LogNormalWidth> for f64 {
    fn from(width: LogNormalWidth) -> f64 {
        width.0
    }
}
