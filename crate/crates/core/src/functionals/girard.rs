use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::domain::BoxDomain;
use super::test_function::TestFunction;
use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;

/// Free bosons on a circle of length `L` in the grand-canonical ensemble,
/// with dispersion `ε_k = k²` on the modes `k = 2πn/L`, `|n| ≤ n_max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GirardParams {
    pub circle_length: f64,
    pub n_max: usize,
    pub beta: f64,
    pub rho_bar: f64,
}

/// Largest mode cutoff accepted; the matrix has `2·n_max + 1` rows.
const MAX_MODES: usize = 512;

/// Quadrature points per unit of `n_max` for the Fourier coefficients.
const GRID_PER_MODE: usize = 16;

impl GirardParams {
    pub fn validate(&self) -> Result<()> {
        for (what, v) in [
            ("circle_length", self.circle_length),
            ("beta", self.beta),
            ("rho_bar", self.rho_bar),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::domain(what, v, "(0, ∞)"));
            }
        }
        if self.n_max == 0 || self.n_max > MAX_MODES {
            return Err(Error::InvalidParameter(format!(
                "n_max = {} must lie in 1..={MAX_MODES}",
                self.n_max
            )));
        }
        Ok(())
    }

    /// `μ = −(1/β)·ln(1 + 1/(ρ̄L))`, which puts exactly `ρ̄L` bosons in
    /// the zero mode.
    pub fn chemical_potential(&self) -> f64 {
        -(1.0 / (self.rho_bar * self.circle_length)).ln_1p() / self.beta
    }

    /// Bose occupation `1/(e^{β(k² − μ)} − 1)` of mode `n`.
    pub fn occupation(&self, n: i64) -> f64 {
        let k = 2.0 * PI * n as f64 / self.circle_length;
        let exponent = self.beta * k * k + (1.0 / (self.rho_bar * self.circle_length)).ln_1p();
        1.0 / exponent.exp_m1()
    }
}

/// Which side the occupation diagonal `D` multiplies `A` from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OccupationOrdering {
    /// `det(I − A·D)^{−1}`.
    #[default]
    Right,
    /// `det(I − D·A)^{−1}`.
    Left,
}

/// Grand-canonical functional `det(I − A·D)^{−1}` where
/// `A_{pq} = (1/L)∫_0^L (e^{if(x)} − 1) e^{−i(k_p − k_q)x} dx` and `D` holds
/// the mode occupations.
///
/// The Fourier coefficients use the midpoint rule on `16·n_max` points,
/// which is spectrally accurate for smooth periodic `f` and exact for the
/// zero mode of indicators whose edges sit on cell boundaries.
pub fn girard_functional(f: &TestFunction, params: &GirardParams, ordering: OccupationOrdering) -> Result<Complex64> {
    params.validate()?;
    let circle = BoxDomain::interval(params.circle_length)?;
    f.check_support(&circle)?;
    let n_max = params.n_max as i64;
    let grid = GRID_PER_MODE * params.n_max;
    let spacing = params.circle_length / grid as f64;
    let samples: Vec<(f64, Complex64)> = (0..grid)
        .map(|j| {
            let x = (j as f64 + 0.5) * spacing;
            (x, Complex64::new(0.0, f.eval(&[x])).exp() - 1.0)
        })
        .collect();
    // c_m for m = −2n_max..=2n_max, stored at index m + 2n_max.
    let coefficients: Vec<Complex64> = (-2 * n_max..=2 * n_max)
        .map(|m| {
            let k = 2.0 * PI * m as f64 / params.circle_length;
            samples
                .iter()
                .map(|(x, g)| g * Complex64::from_polar(1.0, -k * x))
                .sum::<Complex64>()
                / grid as f64
        })
        .collect();
    let occupations: Vec<f64> = (-n_max..=n_max).map(|n| params.occupation(n)).collect();
    let size = occupations.len();
    let a = |p: usize, q: usize| coefficients[p + size - 1 - q];
    let system = ComplexMatrix::from_fn(size, |p, q| {
        let delta = if p == q { 1.0 } else { 0.0 };
        let weight = match ordering {
            OccupationOrdering::Right => occupations[q],
            OccupationOrdering::Left => occupations[p],
        };
        Complex64::new(delta, 0.0) - a(p, q) * weight
    });
    let det = system.determinant()?;
    Ok(1.0 / det)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(beta: f64, n_max: usize) -> GirardParams {
        GirardParams {
            circle_length: 1.0,
            n_max,
            beta,
            rho_bar: 1.0,
        }
    }

    #[test]
    fn zero_mode_holds_the_target_density() {
        for beta in [0.1, 1.0, 200.0] {
            let p = GirardParams {
                circle_length: 3.0,
                n_max: 4,
                beta,
                rho_bar: 0.7,
            };
            assert!((p.occupation(0) - 2.1).abs() < 1e-13);
            assert!(p.chemical_potential() < 0.0);
        }
    }

    #[test]
    fn zero_function() {
        let v = girard_functional(&TestFunction::zero(), &params(1.0, 4), OccupationOrdering::Right).unwrap();
        assert_eq!(v, Complex64::new(1.0, 0.0));
    }

    #[test]
    fn coefficient_indexing() {
        // A single Fourier mode e^{if} − 1 ≈ i·ε·cos(2πx) couples neighbours only.
        let f = TestFunction::single(super::super::Shape::Gaussian, vec![0.5], 0.05, 1e-3).unwrap();
        let p = params(0.01, 3);
        let right = girard_functional(&f, &p, OccupationOrdering::Right).unwrap();
        let left = girard_functional(&f, &p, OccupationOrdering::Left).unwrap();
        // det(I − AD) = det(I − DA) for any A, D.
        assert!((right - left).norm() < 1e-12);
    }

    #[test]
    fn rejects_bad_parameters() {
        let mut p = params(1.0, 4);
        p.beta = 0.0;
        assert!(p.validate().is_err());
        assert!(params(1.0, 0).validate().is_err());
    }
}
