//! Ideal Bose gas with the fugacity smeared over powers `z^x`, `x ~ ν`.
//!
//! Units: `T*` is chosen so that `ρλ³ = T*^{−3/2}`. Above the critical
//! temperature the fugacity solves `Σ_x ν(x) g_{3/2}(z^x) = T*^{−3/2}`;
//! below it `z = 1` and the excess sits in the condensate.
//!
//! Internally everything is written in `μ = −ln z ≥ 0`, so that `z^x` is
//! `e^{−xμ}` and the polylogarithms are evaluated through
//! [`polylog_neg_log`] without forming `1 − z`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::specfun::{lognormal_rule, polylog_neg_log, zeta_const, LogNormalWidth, PolylogOrder};

/// Gauss–Hermite nodes for lognormal ensembles.
pub const DEFAULT_NODES: usize = 64;

/// `z > 1 − 1e−12` is treated as the condensed branch.
const CRITICAL_GUARD: f64 = 1e-12;

/// Step of the finite-difference check of `C_V = du/dT*`.
pub const FD_STEP: f64 = 1e-4;

/// Absolute tolerance on the constraint residual.
const RESIDUAL_TOL: f64 = 1e-12;

/// Discrete superposition `Σ_i w_i δ(x − x_i)` of exponents.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ensemble {
    exponents: Vec<f64>,
    weights: Vec<f64>,
}

impl Ensemble {
    /// The ordinary grand-canonical gas, `ν = δ(x − 1)`.
    pub fn dirac() -> Self {
        Self {
            exponents: vec![1.0],
            weights: vec![1.0],
        }
    }

    pub fn lognormal(sigma: LogNormalWidth) -> Self {
        Self::lognormal_with_nodes(sigma, DEFAULT_NODES)
    }

    pub fn lognormal_with_nodes(sigma: LogNormalWidth, nodes: usize) -> Self {
        let rule = lognormal_rule(sigma, nodes);
        Self {
            exponents: rule.nodes,
            weights: rule.weights,
        }
    }

    /// `σ = 0` is the Dirac ensemble, `σ > 0` the lognormal one.
    pub fn from_sigma(sigma: f64) -> Result<Self> {
        if sigma == 0.0 {
            Ok(Self::dirac())
        } else {
            Ok(Self::lognormal(LogNormalWidth::new(sigma)?))
        }
    }

    pub fn discrete(exponents: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if exponents.is_empty() || exponents.len() != weights.len() {
            return Err(Error::InvalidParameter(
                "discrete ensemble needs matching, non-empty exponents and weights".into(),
            ));
        }
        if let Some(&x) = exponents.iter().find(|x| !(**x > 0.0 && x.is_finite())) {
            return Err(Error::domain("exponent", x, "(0, ∞)"));
        }
        if let Some(&w) = weights.iter().find(|w| !(**w > 0.0 && w.is_finite())) {
            return Err(Error::domain("weight", w, "(0, ∞)"));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::domain("sum of weights", total, "{1}"));
        }
        Ok(Self { exponents, weights })
    }

    fn mass(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// `Σ w·x^p·g_s(e^{−xμ})`.
    fn average(&self, order: PolylogOrder, power: i32, mu: f64) -> Result<f64> {
        self.exponents.iter().zip(&self.weights).try_fold(0.0, |acc, (&x, &w)| {
            Ok(acc + w * x.powi(power) * polylog_neg_log(order, x * mu)?)
        })
    }
}

/// `T*_c = (Σ ν·ζ(3/2))^{−2/3}`, the same for every normalised `ν`.
pub fn critical_temperature(ens: &Ensemble) -> f64 {
    let zeta = zeta_const(1.5).expect("ζ(3/2) is tabulated");
    (ens.mass() * zeta).powf(-2.0 / 3.0)
}

fn check_temperature(t_star: f64) -> Result<()> {
    if t_star > 0.0 && t_star.is_finite() {
        Ok(())
    } else {
        Err(Error::domain("T*", t_star, "(0, ∞)"))
    }
}

/// `μ = −ln z` above the critical temperature.
fn solve_mu(t_star: f64, ens: &Ensemble) -> Result<f64> {
    check_temperature(t_star)?;
    let t_critical = critical_temperature(ens);
    if t_star <= t_critical {
        return Err(Error::Condensed { t_star, t_critical });
    }
    let target = t_star.powf(-1.5);
    let residual = |mu: f64| -> Result<f64> { Ok(ens.average(PolylogOrder::ThreeHalves, 0, mu)? - target) };

    // The constraint decreases from ζ(3/2) − target > 0 at μ = 0.
    let mut hi = 1.0;
    while residual(hi)? > 0.0 {
        hi *= 2.0;
        if hi > 1e6 {
            return Err(Error::NoConvergence(format!("no fugacity bracket at T* = {t_star}")));
        }
    }
    let mut lo = 0.0;
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if residual(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-6 * hi {
            break;
        }
    }
    // Safeguarded Newton; d/dμ Σ w g_{3/2}(e^{−xμ}) = −Σ w x g_{1/2}(e^{−xμ}).
    let mut mu = 0.5 * (lo + hi);
    let mut r = residual(mu)?;
    for _ in 0..100 {
        if r.abs() < RESIDUAL_TOL {
            return Ok(mu);
        }
        if r > 0.0 {
            lo = mu;
        } else {
            hi = mu;
        }
        let slope = -ens.average(PolylogOrder::Half, 1, mu)?;
        let next = mu - r / slope;
        mu = if next > lo && next < hi { next } else { 0.5 * (lo + hi) };
        r = residual(mu)?;
    }
    Err(Error::NoConvergence(format!(
        "fugacity residual {r:e} at T* = {t_star}"
    )))
}

/// Fugacity `z ∈ (0, 1)` for `T* > T*_c`; [`Error::Condensed`] otherwise.
pub fn solve_fugacity(t_star: f64, ens: &Ensemble) -> Result<f64> {
    Ok((-solve_mu(t_star, ens)?).exp())
}

/// State of the gas at one temperature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThermoPoint {
    pub t_star: f64,
    pub z: f64,
    /// `U/(N k T_0)` in the same units as `T*`.
    pub u: f64,
    /// `C_V/(N k)`.
    pub cv: f64,
}

/// `μ` if the gas is above `T*_c` and not within the guard of it.
fn normal_phase_mu(t_star: f64, ens: &Ensemble) -> Result<Option<f64>> {
    match solve_mu(t_star, ens) {
        Ok(mu) if mu >= CRITICAL_GUARD => Ok(Some(mu)),
        Ok(_) | Err(Error::Condensed { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

fn condensed(t_star: f64) -> ThermoPoint {
    let zeta = zeta_const(2.5).expect("ζ(5/2) is tabulated");
    ThermoPoint {
        t_star,
        z: 1.0,
        u: 1.5 * t_star.powf(2.5) * zeta,
        cv: 3.75 * t_star.powf(1.5) * zeta,
    }
}

/// Normal-phase state at a given `μ = −ln z`; `C_V` from implicit
/// differentiation of the constraint.
fn normal(t_star: f64, mu: f64, ens: &Ensemble) -> Result<ThermoPoint> {
    let g5 = ens.average(PolylogOrder::FiveHalves, 0, mu)?;
    let g3 = ens.average(PolylogOrder::ThreeHalves, 0, mu)?;
    let g3x = ens.average(PolylogOrder::ThreeHalves, 1, mu)?;
    let g1x = ens.average(PolylogOrder::Half, 1, mu)?;
    let t32 = t_star.powf(1.5);
    Ok(ThermoPoint {
        t_star,
        z: (-mu).exp(),
        u: 1.5 * t_star * t32 * g5,
        cv: 3.75 * t32 * g5 - 2.25 * t32 * g3 * g3x / g1x,
    })
}

pub fn thermo_point(t_star: f64, ens: &Ensemble) -> Result<ThermoPoint> {
    check_temperature(t_star)?;
    match normal_phase_mu(t_star, ens)? {
        Some(mu) => normal(t_star, mu, ens),
        None => Ok(condensed(t_star)),
    }
}

/// `U/N` at `T*`, condensed branch below `T*_c`.
pub fn internal_energy(t_star: f64, ens: &Ensemble) -> Result<f64> {
    Ok(thermo_point(t_star, ens)?.u)
}

/// `C_V/(Nk)` at `T*`, condensed branch below `T*_c` and within the guard.
pub fn specific_heat(t_star: f64, ens: &Ensemble) -> Result<f64> {
    Ok(thermo_point(t_star, ens)?.cv)
}

/// Both branches evaluated at an explicit `μ`, for continuity checks at the
/// critical point. `μ = 0` gives the condensed values.
pub fn thermo_at_mu(t_star: f64, mu: f64, ens: &Ensemble) -> Result<ThermoPoint> {
    check_temperature(t_star)?;
    if mu == 0.0 {
        return Ok(condensed(t_star));
    }
    if !(mu > 0.0) {
        return Err(Error::domain("μ = −ln z", mu, "[0, ∞)"));
    }
    normal(t_star, mu, ens)
}

/// Inverse of [`solve_fugacity`]: the `T*` at which `z = e^{−μ}`.
pub fn temperature_for_mu(mu: f64, ens: &Ensemble) -> Result<f64> {
    Ok(ens.average(PolylogOrder::ThreeHalves, 0, mu)?.powf(-2.0 / 3.0))
}

/// One row of [`cv_curve`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurveRow {
    pub sigma: f64,
    #[serde(flatten)]
    pub point: ThermoPoint,
    /// `|C_V − (u(T*+h) − u(T*−h))/(2h)| / C_V` with `h = 1e−4`.
    pub cv_fd_relerr: f64,
}

impl CurveRow {
    pub const CSV_HEADER: &'static str = "sigma,T_star,z,u,cv,cv_fd_relerr";

    pub fn csv_line(&self) -> String {
        let p = &self.point;
        format!(
            "{},{},{},{},{},{:e}",
            self.sigma, p.t_star, p.z, p.u, p.cv, self.cv_fd_relerr
        )
    }
}

/// `C_V(T*)` curves for each `σ` (0 = Dirac) on an ascending grid, rows
/// ordered by `σ` then `T*`.
pub fn cv_curve(sigmas: &[f64], t_grid: &[f64]) -> Result<Vec<CurveRow>> {
    if t_grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidParameter(
            "temperature grid must be strictly ascending".into(),
        ));
    }
    if let Some(&t) = t_grid.iter().find(|&&t| !(t > FD_STEP && t.is_finite())) {
        return Err(Error::domain("T*", t, "(1e−4, ∞)"));
    }
    let ensembles: Vec<(f64, Ensemble)> = sigmas
        .iter()
        .map(|&s| Ok((s, Ensemble::from_sigma(s)?)))
        .collect::<Result<_>>()?;
    let jobs: Vec<(usize, f64)> = (0..ensembles.len())
        .flat_map(|i| t_grid.iter().map(move |&t| (i, t)))
        .collect();
    jobs.par_iter()
        .map(|&(i, t)| {
            let (sigma, ens) = &ensembles[i];
            let point = thermo_point(t, ens)?;
            let fd = (internal_energy(t + FD_STEP, ens)? - internal_energy(t - FD_STEP, ens)?) / (2.0 * FD_STEP);
            Ok(CurveRow {
                sigma: *sigma,
                point,
                cv_fd_relerr: ((point.cv - fd) / point.cv).abs(),
            })
        })
        .collect()
}

/// Steepest slope `|ΔC_V/ΔT*|` between consecutive points of one curve with
/// `T*_c < T*_i < T*_{i+1} ≤ 1.2·T*_c`.
pub fn sharpness(rows: &[CurveRow], t_critical: f64) -> f64 {
    rows.windows(2)
        .filter(|w| w[0].point.t_star > t_critical && w[1].point.t_star <= 1.2 * t_critical)
        .map(|w| ((w[1].point.cv - w[0].point.cv) / (w[1].point.t_star - w[0].point.t_star)).abs())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn critical_point_values() {
        let tc = critical_temperature(&Ensemble::dirac());
        assert!((tc - 0.527_201_068_797_149).abs() < 1e-14);
        let cv = specific_heat(tc, &Ensemble::dirac()).unwrap();
        assert!((cv - 1.925_671_675_481_954_5).abs() < 1e-12);
    }

    #[test]
    fn condensed_signal() {
        let err = solve_fugacity(0.5, &Ensemble::dirac()).unwrap_err();
        assert!(matches!(err, Error::Condensed { .. }));
    }

    #[test]
    fn discrete_validation() {
        assert!(Ensemble::discrete(vec![1.0, 2.0], vec![0.5, 0.5]).is_ok());
        assert!(Ensemble::discrete(vec![1.0, -2.0], vec![0.5, 0.5]).is_err());
        assert!(Ensemble::discrete(vec![1.0], vec![0.9]).is_err());
    }

    #[test]
    fn csv_row_format() {
        let row = CurveRow {
            sigma: 0.4,
            point: ThermoPoint {
                t_star: 1.0,
                z: 0.5,
                u: 1.25,
                cv: 1.75,
            },
            cv_fd_relerr: 2.5e-9,
        };
        assert_eq!(row.csv_line(), "0.4,1,0.5,1.25,1.75,2.5e-9");
    }
}
