use std::cell::Cell;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::domain::{BoxDomain, PointConfiguration, MAX_DIM};
use crate::error::{Error, Result};
use crate::quad::{integrate, Tolerance};

/// Profile of a single bump.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Shape {
    /// `1` on the axis-aligned cube of side `width` centred at `center`.
    Indicator,
    /// `exp(−|x−c|²/(2·width²))`.
    Gaussian,
    /// Raised cosine `½(1 + cos(π r/width))` for `r < width`, zero beyond.
    Cosine,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bump {
    pub shape: Shape,
    pub center: Vec<f64>,
    pub width: f64,
    pub amplitude: f64,
}

impl Bump {
    fn value(&self, x: &[f64]) -> f64 {
        match self.shape {
            Shape::Indicator => {
                let half = 0.5 * self.width;
                let inside = x.iter().zip(&self.center).all(|(xi, ci)| (xi - ci).abs() <= half);
                if inside {
                    self.amplitude
                } else {
                    0.0
                }
            }
            Shape::Gaussian => {
                let r2: f64 = x.iter().zip(&self.center).map(|(xi, ci)| (xi - ci).powi(2)).sum();
                self.amplitude * (-r2 / (2.0 * self.width * self.width)).exp()
            }
            Shape::Cosine => {
                let r = x
                    .iter()
                    .zip(&self.center)
                    .map(|(xi, ci)| (xi - ci).powi(2))
                    .sum::<f64>()
                    .sqrt();
                if r < self.width {
                    self.amplitude * 0.5 * (1.0 + (PI * r / self.width).cos())
                } else {
                    0.0
                }
            }
        }
    }

    /// Coordinates along `axis` where the bump is not smooth or changes
    /// scale; used as quadrature breakpoints.
    fn features(&self, axis: usize) -> Vec<f64> {
        let c = self.center[axis];
        let w = self.width;
        match self.shape {
            Shape::Indicator => vec![c - 0.5 * w, c + 0.5 * w],
            Shape::Cosine => vec![c - w, c, c + w],
            Shape::Gaussian => vec![c - 6.0 * w, c - 3.0 * w, c - w, c, c + w, c + 3.0 * w, c + 6.0 * w],
        }
    }
}

/// Real test function: a finite sum of bumps.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct TestFunction {
    pub terms: Vec<Bump>,
}

const EXP_INTEGRAL_TOL: Tolerance = Tolerance::new(1e-12, 1e-11);
const INNER_TOL: Tolerance = Tolerance::new(1e-14, 1e-13);

impl TestFunction {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn single(shape: Shape, center: Vec<f64>, width: f64, amplitude: f64) -> Result<Self> {
        Self::zero().with(shape, center, width, amplitude)
    }

    pub fn with(mut self, shape: Shape, center: Vec<f64>, width: f64, amplitude: f64) -> Result<Self> {
        if !(width > 0.0 && width.is_finite()) {
            return Err(Error::domain("bump width", width, "(0, ∞)"));
        }
        if !amplitude.is_finite() || center.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidParameter("bump parameters must be finite".into()));
        }
        if let Some(first) = self.terms.first() {
            if first.center.len() != center.len() {
                return Err(Error::InvalidParameter("bumps of mixed dimension".into()));
            }
        }
        self.terms.push(Bump {
            shape,
            center,
            width,
            amplitude,
        });
        Ok(self)
    }

    /// `amplitude · 1_{[lo, hi]}` on the line.
    pub fn indicator_1d(lo: f64, hi: f64, amplitude: f64) -> Result<Self> {
        Self::single(Shape::Indicator, vec![0.5 * (lo + hi)], hi - lo, amplitude)
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.terms.iter().map(|t| t.value(x)).sum()
    }

    /// `⟨γ, f⟩ = Σ_j f(x_j)`.
    pub fn pair(&self, config: &PointConfiguration) -> f64 {
        config.points().map(|p| self.eval(p)).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.iter().all(|t| t.amplitude == 0.0)
    }

    fn indicator_only(&self) -> bool {
        self.terms.iter().all(|t| t.shape == Shape::Indicator)
    }

    /// Checks that the function lives in `domain`: matching dimension, and
    /// compact bumps inside it. Gaussian bumps must be centred inside; their
    /// tails are cut at the box.
    pub fn check_support(&self, domain: &BoxDomain) -> Result<()> {
        const SLACK: f64 = 1e-12;
        for t in &self.terms {
            if t.center.len() != domain.dim() {
                return Err(Error::InvalidParameter(format!(
                    "test function of dimension {} on a {}-dimensional box",
                    t.center.len(),
                    domain.dim()
                )));
            }
            if t.amplitude == 0.0 {
                continue;
            }
            let reach = match t.shape {
                Shape::Indicator => 0.5 * t.width,
                Shape::Cosine => t.width,
                Shape::Gaussian => 0.0,
            };
            let outside = t
                .center
                .iter()
                .zip(domain.sides())
                .any(|(c, s)| c - reach < -SLACK || c + reach > s + SLACK);
            if outside {
                return Err(Error::InvalidParameter(format!(
                    "{:?} bump at {:?} (width {}) leaves the box",
                    t.shape, t.center, t.width
                )));
            }
        }
        Ok(())
    }

    /// `∫_box (e^{i f(x)} − 1) dx`: exact for indicator sums, adaptive
    /// nested Gauss–Kronrod otherwise.
    pub fn exp_integral(&self, domain: &BoxDomain) -> Result<Complex64> {
        self.check_support(domain)?;
        if self.is_zero() {
            return Ok(Complex64::new(0.0, 0.0));
        }
        if self.indicator_only() {
            return Ok(self.piecewise_constant_integral(domain));
        }
        self.nested_integral(domain)
    }

    fn breakpoints(&self, domain: &BoxDomain, axis: usize) -> Vec<f64> {
        let side = domain.sides()[axis];
        let mut points = vec![0.0, side];
        for t in &self.terms {
            points.extend(t.features(axis).into_iter().filter(|&x| x > 0.0 && x < side));
        }
        points.sort_by(f64::total_cmp);
        points.dedup();
        points
    }

    // Indicator sums are constant on the cells cut by all bump edges.
    fn piecewise_constant_integral(&self, domain: &BoxDomain) -> Complex64 {
        let grids: Vec<Vec<f64>> = (0..domain.dim()).map(|a| self.breakpoints(domain, a)).collect();
        let mut total = Complex64::new(0.0, 0.0);
        let mut index = vec![0usize; grids.len()];
        let mut centre = vec![0.0; grids.len()];
        loop {
            let mut volume = 1.0;
            for (axis, g) in grids.iter().enumerate() {
                let (lo, hi) = (g[index[axis]], g[index[axis] + 1]);
                centre[axis] = 0.5 * (lo + hi);
                volume *= hi - lo;
            }
            let f = self.eval(&centre);
            if f != 0.0 {
                total += (Complex64::new(0.0, f).exp() - 1.0) * volume;
            }
            // Odometer over cells.
            let mut axis = 0;
            loop {
                if axis == grids.len() {
                    return total;
                }
                index[axis] += 1;
                if index[axis] + 1 < grids[axis].len() {
                    break;
                }
                index[axis] = 0;
                axis += 1;
            }
        }
    }

    fn nested_integral(&self, domain: &BoxDomain) -> Result<Complex64> {
        let breaks: Vec<Vec<f64>> = (0..domain.dim()).map(|a| self.breakpoints(domain, a)).collect();
        let failure = Cell::new(None);
        let value = self.integrate_axis(&breaks, 0, [0.0; MAX_DIM], &failure, EXP_INTEGRAL_TOL)?;
        match failure.take() {
            Some(e) => Err(e),
            None => Ok(value),
        }
    }

    fn integrate_axis(
        &self,
        breaks: &[Vec<f64>],
        axis: usize,
        point: [f64; MAX_DIM],
        failure: &Cell<Option<Error>>,
        tol: Tolerance,
    ) -> Result<Complex64> {
        let dim = breaks.len();
        let est = integrate(
            |x: f64| {
                let mut p = point;
                p[axis] = x;
                if axis + 1 == dim {
                    let f = self.eval(&p[..dim]);
                    return Complex64::new(0.0, f).exp() - 1.0;
                }
                match self.integrate_axis(breaks, axis + 1, p, failure, INNER_TOL) {
                    Ok(v) => v,
                    Err(e) => {
                        failure.set(Some(e));
                        Complex64::new(0.0, 0.0)
                    }
                }
            },
            &breaks[axis],
            tol,
        )?;
        Ok(est.value)
    }
}
