use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::{integrate, integrate_to_infinity, Tolerance};
use crate::specfun::{lognormal_pdf, lognormal_rule, FractionalOrder, LogNormalWidth, MixingDensity};

/// Gauss–Hermite nodes for lognormal averages.
pub const LOGNORMAL_NODES: usize = 64;

const MIXTURE_TOL: Tolerance = Tolerance::new(1e-14, 1e-12);

/// Probability law of the intensity multiplier in a compound Poisson
/// functional.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MixingMeasure {
    Dirac { rho0: f64 },
    Exponential { rho_bar: f64 },
    LogNormal { sigma: LogNormalWidth },
    Discrete { atoms: Vec<f64>, weights: Vec<f64> },
    FractionalNu { alpha: FractionalOrder },
}

impl MixingMeasure {
    pub fn validate(&self) -> Result<()> {
        let positive = |what: &'static str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::domain(what, v, "(0, ∞)"))
            }
        };
        match self {
            MixingMeasure::Dirac { rho0 } => positive("rho0", *rho0),
            MixingMeasure::Exponential { rho_bar } => positive("rho_bar", *rho_bar),
            MixingMeasure::LogNormal { .. } | MixingMeasure::FractionalNu { .. } => Ok(()),
            MixingMeasure::Discrete { atoms, weights } => {
                if atoms.is_empty() || atoms.len() != weights.len() {
                    return Err(Error::InvalidParameter(
                        "discrete mixture needs matching, non-empty atoms and weights".into(),
                    ));
                }
                for &a in atoms {
                    positive("atom", a)?;
                }
                for &w in weights {
                    positive("weight", w)?;
                }
                let total: f64 = weights.iter().sum();
                if (total - 1.0).abs() > 1e-12 {
                    return Err(Error::domain("sum of weights", total, "{1}"));
                }
                Ok(())
            }
        }
    }

    /// `∫ e^{ρ a} dξ(ρ)`: closed forms where they exist (Dirac, exponential,
    /// discrete), Gauss–Hermite for the lognormal, adaptive quadrature
    /// against the mixing density for ν_α.
    ///
    /// The exponential law needs `ρ̄·Re a < 1`.
    pub fn laplace(&self, a: Complex64) -> Result<Complex64> {
        self.validate()?;
        match self {
            MixingMeasure::Dirac { rho0 } => Ok((a * rho0).exp()),
            MixingMeasure::Exponential { rho_bar } => {
                if rho_bar * a.re >= 1.0 {
                    return Err(Error::Divergent("exponential mixture needs ρ̄·Re A < 1"));
                }
                Ok(1.0 / (1.0 - a * rho_bar))
            }
            MixingMeasure::LogNormal { sigma } => {
                let rule = lognormal_rule(*sigma, LOGNORMAL_NODES);
                Ok(rule
                    .nodes
                    .iter()
                    .zip(&rule.weights)
                    .map(|(x, w)| (a * x).exp() * w)
                    .sum())
            }
            MixingMeasure::Discrete { atoms, weights } => {
                Ok(atoms.iter().zip(weights).map(|(x, w)| (a * x).exp() * w).sum())
            }
            MixingMeasure::FractionalNu { alpha } => fractional_laplace(*alpha, a),
        }
    }

    /// The same transform by direct numerical integration against the
    /// density of the law, with no closed form involved. Used to cross-check
    /// [`MixingMeasure::laplace`].
    pub fn laplace_by_quadrature(&self, a: Complex64) -> Result<Complex64> {
        self.validate()?;
        match self {
            MixingMeasure::Exponential { rho_bar } => {
                if rho_bar * a.re >= 1.0 {
                    return Err(Error::Divergent("exponential mixture needs ρ̄·Re A < 1"));
                }
                let scale = *rho_bar;
                let est = integrate_to_infinity(
                    |rho: f64| ((a - 1.0 / scale) * rho).exp() / scale,
                    0.0,
                    &[scale, 5.0 * scale, 20.0 * scale],
                    MIXTURE_TOL,
                )?;
                Ok(est.value)
            }
            MixingMeasure::LogNormal { sigma } => {
                let s = sigma.get();
                let (lo, hi) = ((s * s - 12.0 * s).exp(), (s * s + 12.0 * s).exp());
                let mode_points = [lo, 0.5, 1.0, 2.0, hi];
                let mut points: Vec<f64> = mode_points.into_iter().filter(|p| *p >= lo && *p <= hi).collect();
                points.sort_by(f64::total_cmp);
                points.dedup();
                let est = integrate(
                    |x: f64| (a * x).exp() * lognormal_pdf(*sigma, x).unwrap_or(0.0),
                    &points,
                    MIXTURE_TOL,
                )?;
                Ok(est.value)
            }
            _ => self.laplace(a),
        }
    }
}

fn fractional_laplace(alpha: FractionalOrder, a: Complex64) -> Result<Complex64> {
    if alpha.is_poisson() {
        return Ok(a.exp());
    }
    let density = MixingDensity::new(alpha)?;
    let mut breaks = vec![];
    if a.norm() > 0.0 {
        breaks.extend([1.0 / a.norm(), 4.0 / a.norm()]);
    }
    density.expectation(|t| (a * t).exp(), &breaks, MIXTURE_TOL)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn validation() {
        assert!(MixingMeasure::Dirac { rho0: 0.0 }.validate().is_err());
        assert!(MixingMeasure::Exponential { rho_bar: -1.0 }.validate().is_err());
        let bad = MixingMeasure::Discrete {
            atoms: vec![1.0, 2.0],
            weights: vec![0.5, 0.4],
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn exponential_closed_form_vs_quadrature() {
        let xi = MixingMeasure::Exponential { rho_bar: 1.0 };
        for a in [c(-1.0, 0.0), c(-0.3, 0.8), c(0.4, -2.0)] {
            let closed = xi.laplace(a).unwrap();
            let quad = xi.laplace_by_quadrature(a).unwrap();
            assert!((closed - quad).norm() < 1e-10, "{a}");
        }
        assert_eq!(xi.laplace(c(-1.0, 0.0)).unwrap(), c(0.5, 0.0));
        assert!(xi.laplace(c(1.0, 0.0)).is_err());
    }

    #[test]
    fn lognormal_hermite_vs_adaptive() {
        let xi = MixingMeasure::LogNormal {
            sigma: LogNormalWidth::new(0.4).unwrap(),
        };
        let a = c(-1.5, 0.7);
        assert!((xi.laplace(a).unwrap() - xi.laplace_by_quadrature(a).unwrap()).norm() < 1e-10);
    }

    #[test]
    fn fractional_mixture_on_the_real_axis() {
        let xi = MixingMeasure::FractionalNu {
            alpha: FractionalOrder::new(0.5).unwrap(),
        };
        let v = xi.laplace(c(-1.0, 0.0)).unwrap();
        assert!((v.re - 0.427_583_576_155_807).abs() < 1e-12);
        assert!(v.im.abs() < 1e-15);
    }
}
