//! Lognormal law with mode at 1: `ln x ~ Normal(σ², σ)`.
//!
//! The exponent is taken as `(ln x − σ²)²/(2σ²)`. Without the square the
//! function is neither normalisable nor peaked at `x = 1`.

use std::f64::consts::PI;

use super::LogNormalWidth;
use crate::error::{Error, Result};
use crate::quad::{gauss_hermite, Rule};

pub fn lognormal_pdf(width: LogNormalWidth, x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::domain("x", x, "(0, ∞)"));
    }
    let s = width.get();
    let d = x.ln() - s * s;
    Ok((-d * d / (2.0 * s * s)).exp() / (x * s * (2.0 * PI).sqrt()))
}

/// Probability-weighted nodes for expectations `E[g(x)] ≈ Σ w_i g(x_i)`:
/// Gauss–Hermite in `ln x`, weights summing to one.
pub fn lognormal_rule(width: LogNormalWidth, n: usize) -> Rule {
    let s = width.get();
    let hermite = gauss_hermite(n);
    let norm = PI.sqrt();
    Rule {
        nodes: hermite
            .nodes
            .iter()
            .map(|t| (s * s + s * std::f64::consts::SQRT_2 * t).exp())
            .collect(),
        weights: hermite.weights.iter().map(|w| w / norm).collect(),
    }
}
