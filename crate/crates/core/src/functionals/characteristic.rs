use num_complex::Complex64;
use rayon::prelude::*;
use statrs::function::gamma::ln_gamma;

use super::domain::{BoxDomain, IntensityMeasure};
use super::mixing::MixingMeasure;
use super::test_function::TestFunction;
use crate::error::{Error, Result};
use crate::quad::gauss_legendre;
use crate::specfun::{mittag_leffler_complex, FractionalOrder, MixingDensity};

/// Largest total mass accepted by the fractional functionals.
pub const MAX_FRACTIONAL_MASS: f64 = 50.0;

/// Nodes per Gauss–Legendre panel in [`weights_fractional`].
const PANEL_NODES: usize = 16;

/// `A = ρ ∫(e^{if} − 1)dx` over the measure's box.
fn log_poisson(f: &TestFunction, mu: &IntensityMeasure) -> Result<Complex64> {
    Ok(f.exp_integral(&mu.domain)? * mu.rho())
}

/// Poisson functional `exp(ρ∫(e^{if} − 1)dx)`.
pub fn char_poisson(f: &TestFunction, mu: &IntensityMeasure) -> Result<Complex64> {
    Ok(log_poisson(f, mu)?.exp())
}

/// `((1/V)∫e^{if}dx)^N`, evaluated as `exp(N·log(1 + A/V))` so large `N`
/// keeps full precision.
pub fn char_finite_nv(f: &TestFunction, n: u64, domain: &BoxDomain) -> Result<Complex64> {
    if n == 0 {
        return Err(Error::InvalidParameter("particle number must be positive".into()));
    }
    let w = f.exp_integral(domain)? / domain.volume();
    let base = w + 1.0;
    if base == Complex64::new(0.0, 0.0) {
        return Ok(base);
    }
    Ok((complex_log1p(w) * n as f64).exp())
}

/// `log(1 + w)` without cancellation for small `|w|`.
fn complex_log1p(w: Complex64) -> Complex64 {
    let modulus_sq_m1 = 2.0 * w.re + w.norm_sqr();
    Complex64::new(0.5 * modulus_sq_m1.ln_1p(), w.im.atan2(1.0 + w.re))
}

/// Compound Poisson functional `∫ exp(ρA) dξ(ρ)` with `A` taken per unit
/// intensity of `mu` (so `mu` normally has `ρ = 1`).
pub fn char_compound(f: &TestFunction, mu: &IntensityMeasure, xi: &MixingMeasure) -> Result<Complex64> {
    xi.laplace(log_poisson(f, mu)?)
}

/// [`char_compound`] with the ρ-integral done numerically even where a
/// closed form exists.
pub fn char_compound_quadrature(f: &TestFunction, mu: &IntensityMeasure, xi: &MixingMeasure) -> Result<Complex64> {
    xi.laplace_by_quadrature(log_poisson(f, mu)?)
}

fn check_fractional_mass(m: f64) -> Result<()> {
    if (0.0..=MAX_FRACTIONAL_MASS).contains(&m) {
        Ok(())
    } else {
        Err(Error::domain("total mass m", m, "[0, 50]"))
    }
}

/// Fractional Poisson functional `E_α(ρ∫(e^{if} − 1)dx)`.
pub fn char_fractional(f: &TestFunction, mu: &IntensityMeasure, alpha: FractionalOrder) -> Result<Complex64> {
    check_fractional_mass(mu.total_mass())?;
    mittag_leffler_complex(alpha, log_poisson(f, mu)?)
}

/// Count distribution of the fractional Poisson process with mean measure
/// of mass `m`: `p_n = (−m)ⁿ/n!·E_α^{(n)}(−m)` for `n = 0..=n_max`.
///
/// For `α < 1` the weights are the mixture `∫ h(τ)·Pois(n; mτ) dτ`, summed
/// on Gauss–Legendre panels whose width follows the Poisson spread in `τ`.
/// Every `p_n` is then a sum of positive terms.
pub fn weights_fractional(alpha: FractionalOrder, m: f64, n_max: usize) -> Result<Vec<f64>> {
    check_fractional_mass(m)?;
    let mut weights = vec![0.0; n_max + 1];
    if m == 0.0 {
        weights[0] = 1.0;
        return Ok(weights);
    }
    if alpha.is_poisson() {
        for (n, p) in weights.iter_mut().enumerate() {
            *p = poisson_pmf(n, m);
        }
        return Ok(weights);
    }
    let density = MixingDensity::new(alpha)?;
    let nodes = panel_nodes(m, density.tail_cutoff());
    let contributions: Vec<Vec<f64>> = nodes
        .par_iter()
        .map(|&(tau, w)| {
            let h = density.density(tau)?;
            Ok((0..=n_max).map(|n| w * h * poisson_pmf(n, m * tau)).collect())
        })
        .collect::<Result<_>>()?;
    // Fixed summation order keeps the output independent of scheduling.
    for row in &contributions {
        for (p, c) in weights.iter_mut().zip(row) {
            *p += c;
        }
    }
    Ok(weights)
}

fn poisson_pmf(n: usize, mean: f64) -> f64 {
    if mean == 0.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    let nf = n as f64;
    (nf * mean.ln() - mean - ln_gamma(nf + 1.0)).exp()
}

/// Quadrature nodes on `[0, end]`: panels of half the local standard
/// deviation of `Pois(·; mτ)` in `τ`, which is `√(τ/m)`, capped at 0.5.
fn panel_nodes(m: f64, end: f64) -> Vec<(f64, f64)> {
    let rule = gauss_legendre(PANEL_NODES);
    let mut out = Vec::new();
    let mut lo = 0.0;
    while lo < end {
        let width = (0.5 * (lo.max(1.0 / m) / m).sqrt()).min(0.5);
        let hi = (lo + width).min(end);
        let (mid, half) = (0.5 * (lo + hi), 0.5 * (hi - lo));
        out.extend(
            rule.nodes
                .iter()
                .zip(&rule.weights)
                .map(|(x, w)| (mid + half * x, half * w)),
        );
        lo = hi;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn order(a: f64) -> FractionalOrder {
        FractionalOrder::new(a).unwrap()
    }

    #[test]
    fn log1p_is_accurate_for_small_arguments() {
        let w = Complex64::new(1e-12, -3e-13);
        let expected = w - w * w / 2.0;
        assert!((complex_log1p(w) - expected).norm() < 1e-27);
        let w = Complex64::new(-0.5, 0.5);
        assert!((complex_log1p(w) - (w + 1.0).ln()).norm() < 1e-15);
    }

    #[test]
    fn finite_nv_exact_cancellation() {
        let f = TestFunction::indicator_1d(0.0, 0.5, PI).unwrap();
        let unit = BoxDomain::interval(1.0).unwrap();
        for n in [1, 2, 7] {
            assert!(char_finite_nv(&f, n, &unit).unwrap().norm() < 1e-15);
        }
    }

    #[test]
    fn mass_cap() {
        let mu = IntensityMeasure::new(BoxDomain::interval(10.0).unwrap(), 6.0).unwrap();
        let f = TestFunction::zero();
        assert!(char_fractional(&f, &mu, order(0.5)).unwrap_err().is_validation());
        assert!(weights_fractional(order(0.5), 50.5, 10).is_err());
        assert!(weights_fractional(order(0.5), -1.0, 10).is_err());
    }

    #[test]
    fn degenerate_weights() {
        assert_eq!(
            weights_fractional(order(0.3), 0.0, 3).unwrap(),
            vec![1.0, 0.0, 0.0, 0.0]
        );
        let p = weights_fractional(FractionalOrder::POISSON, 2.0, 4).unwrap();
        assert!((p[2] / (2.0 * (-2f64).exp()) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn panels_cover_the_range() {
        let nodes = panel_nodes(3.0, 7.5);
        let length: f64 = nodes.iter().map(|(_, w)| w).sum();
        assert!((length - 7.5).abs() < 1e-13);
        assert!(nodes.iter().all(|&(x, _)| x > 0.0 && x < 7.5));
    }
}
