//! One-sided α-stable law and the mixing law on Poisson intensities it
//! induces.
//!
//! Everything here rests on Kanter's function
//! `a(φ) = [sin(αφ)^α · sin((1−α)φ)^{1−α} / sin φ]^{1/(1−α)}` on `(0, π)`,
//! which increases from `a(0⁺) = α^{α/(1−α)}(1−α)` to infinity. With
//! `Z(c) = (1/π) ∫_0^π a(φ) e^{−c·a(φ)} dφ`:
//!
//! * stable density: `f(x) = α/(1−α) · x^{−1/(1−α)} · Z(x^{−α/(1−α)})`
//! * mixing density of `τ = S^{−α}`: `h(τ) = τ^{α/(1−α)} · Z(τ^{1/(1−α)}) / (1−α)`
//!
//! and `∫ e^{−sτ} h(τ) dτ = E_α(−s)`. For small `τ` the density is summed
//! from its (entire) power series instead, since the φ-integrand collapses
//! onto `φ = π` there.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, Exp1, Open01};
use statrs::function::gamma::ln_gamma;

use super::FractionalOrder;
use crate::error::{Error, Result};
use crate::quad::{integrate, Integrand, Tolerance};

const ZOLOTAREV_TOL: Tolerance = Tolerance::new(0.0, 1e-13);

/// Below this `τ` the mixing density uses its power series.
const SERIES_LIMIT: f64 = 1.0;

const MAX_SERIES_TERMS: usize = 400;
const SERIES_CUTOFF: f64 = -45.0;

/// `h` is below `e^{−50}` of its scale beyond the cutoff.
const TAIL_EXPONENT: f64 = 50.0;

fn ln_kanter(alpha: f64, phi: f64) -> f64 {
    let b = 1.0 - alpha;
    (alpha * (alpha * phi).sin().ln() + b * (b * phi).sin().ln() - phi.sin().ln()) / b
}

fn kanter_at_zero(alpha: f64) -> f64 {
    alpha.powf(alpha / (1.0 - alpha)) * (1.0 - alpha)
}

/// `Z(c)` for `c > 0`.
fn zolotarev(alpha: f64, c: f64) -> Result<f64> {
    let mut points = vec![0.0];
    // The integrand a·e^{−ca} peaks where a = 1/c; split there.
    let ln_peak = -c.ln();
    if ln_peak > ln_kanter(alpha, 1e-12) {
        let (mut lo, mut hi) = (0.0, PI);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if ln_kanter(alpha, mid) < ln_peak {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        points.push(0.5 * (lo + hi));
    }
    points.push(PI);
    let est = integrate(
        |phi: f64| {
            let ln_a = ln_kanter(alpha, phi);
            if !ln_a.is_finite() {
                return 0.0;
            }
            (ln_a - c * ln_a.exp()).exp()
        },
        &points,
        ZOLOTAREV_TOL,
    )?;
    Ok(est.value / PI)
}

/// Density of the one-sided stable law with Laplace transform `e^{−t^α}`.
pub fn stable_density(alpha: FractionalOrder, x: f64) -> Result<f64> {
    let a = alpha.get();
    if alpha.is_poisson() {
        return Err(Error::domain("alpha", a, "(0, 1) (α = 1 is a point mass)"));
    }
    if !(x > 0.0) {
        return Err(Error::domain("x", x, "(0, ∞)"));
    }
    let y = x.powf(-a);
    if y < 0.1 {
        return Ok(stable_tail_series(a, x));
    }
    let b = 1.0 - a;
    Ok(a / b * x.powf(-1.0 / b) * zolotarev(a, x.powf(-a / b))?)
}

// f(x) = (1/π) Σ_{k≥1} (−1)^{k+1} Γ(αk+1)/k! · sin(παk) · x^{−αk−1}
fn stable_tail_series(alpha: f64, x: f64) -> f64 {
    let ln_x = x.ln();
    let mut sum = 0.0;
    for k in 1..400 {
        let kf = k as f64;
        let magnitude = (ln_gamma(alpha * kf + 1.0) - ln_gamma(kf + 1.0) - (alpha * kf + 1.0) * ln_x).exp();
        let term = magnitude * (PI * alpha * kf).sin();
        sum += if k % 2 == 1 { term } else { -term };
        if magnitude < 1e-18 * sum.abs() {
            break;
        }
    }
    sum / PI
}

/// Draws `τ = S^{−α}` for `S` one-sided α-stable (Kanter's method).
/// `α = 1` returns the point mass `τ = 1`.
pub fn sample_mixing_tau<R: Rng + ?Sized>(alpha: FractionalOrder, rng: &mut R) -> f64 {
    if alpha.is_poisson() {
        return 1.0;
    }
    let a = alpha.get();
    let u: f64 = Open01.sample(rng);
    let w: f64 = Exp1.sample(rng);
    ((1.0 - a) * (w.ln() - ln_kanter(a, PI * u))).exp()
}

/// Density `h` of the law of `τ` on `(0, ∞)`, with `∫ e^{−sτ} h(τ) dτ = E_α(−s)`.
#[derive(Debug, Clone)]
pub struct MixingDensity {
    alpha: f64,
    /// Coefficients of `h(τ) = Σ_k c_k (−τ)^k`.
    series: Vec<f64>,
    /// Largest `τ` the truncated series is trusted at.
    series_limit: f64,
}

impl MixingDensity {
    pub fn new(alpha: FractionalOrder) -> Result<Self> {
        let a = alpha.get();
        if alpha.is_poisson() {
            return Err(Error::domain("alpha", a, "(0, 1) (α = 1 is a point mass)"));
        }
        // c_k = Γ(α(k+1))·sin(πα(k+1)) / (π·k!)
        let mut series = Vec::new();
        let mut ln_last = 0.0;
        for k in 0..MAX_SERIES_TERMS {
            let kf = k as f64;
            ln_last = ln_gamma(a * (kf + 1.0)) - ln_gamma(kf + 1.0);
            series.push(ln_last.exp() * (PI * a * (kf + 1.0)).sin() / PI);
            if ln_last < SERIES_CUTOFF {
                break;
            }
        }
        // For α near 1 the coefficients decay slowly; shrink the range so the
        // dropped tail stays below e^{−45}.
        let k = (series.len() - 1) as f64;
        let series_limit = if ln_last < SERIES_CUTOFF {
            SERIES_LIMIT
        } else {
            SERIES_LIMIT.min(((SERIES_CUTOFF - ln_last) / k).exp())
        };
        Ok(Self {
            alpha: a,
            series,
            series_limit,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Point beyond which the remaining mass is below `e^{−50}`.
    pub fn tail_cutoff(&self) -> f64 {
        let b = 1.0 - self.alpha;
        (TAIL_EXPONENT / kanter_at_zero(self.alpha)).powf(b)
    }

    pub fn density(&self, tau: f64) -> Result<f64> {
        if tau < 0.0 {
            return Ok(0.0);
        }
        if tau <= self.series_limit {
            let mut sum = 0.0;
            let mut power = 1.0;
            for c in &self.series {
                sum += c * power;
                power *= -tau;
            }
            return Ok(sum);
        }
        let b = 1.0 - self.alpha;
        Ok(tau.powf(self.alpha / b) * zolotarev(self.alpha, tau.powf(1.0 / b))? / b)
    }

    /// `∫ g(τ) h(τ) dτ` by adaptive quadrature. Extra breakpoints help when
    /// `g` is sharply peaked; the range runs to the tail cutoff or the last
    /// breakpoint, whichever is further, so growing `g` can push it out.
    pub fn expectation<T, G>(&self, g: G, breaks: &[f64], tol: Tolerance) -> Result<T>
    where
        T: Integrand,
        G: Fn(f64) -> T,
    {
        let cutoff = breaks.iter().copied().fold(self.tail_cutoff(), f64::max);
        let mut points = vec![0.0, self.series_limit.min(cutoff)];
        points.extend(breaks.iter().copied().filter(|&x| x > 0.0 && x < cutoff));
        points.push(cutoff);
        points.sort_by(f64::total_cmp);
        points.dedup();
        // The integrand is a product with a density that cannot fail on
        // (0, cutoff] except through quadrature; surface that failure.
        let failure = std::cell::Cell::new(None);
        let est = integrate(
            |tau: f64| match self.density(tau) {
                Ok(h) => g(tau) * h,
                Err(e) => {
                    failure.set(Some(e));
                    T::default()
                }
            },
            &points,
            tol,
        )?;
        match failure.take() {
            Some(e) => Err(e),
            None => Ok(est.value),
        }
    }
}
