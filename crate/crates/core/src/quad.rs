//! Quadrature rules shared by the special functions, the functionals and the
//! thermodynamics.
//!
//! The workhorse is a globally adaptive 7/15-point Gauss–Kronrod scheme
//! (QUADPACK's QAG strategy) that is generic over real and complex integrands.
//! Fixed Gauss–Legendre and Gauss–Hermite rules are generated on demand by
//! Newton iteration on the three-term recurrences.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Values an integrand may return.
pub trait Integrand: Copy + Default + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> {
    fn magnitude(self) -> f64;
}

impl Integrand for f64 {
    fn magnitude(self) -> f64 {
        self.abs()
    }
}

impl Integrand for Complex64 {
    fn magnitude(self) -> f64 {
        self.norm()
    }
}

/// Stopping rule: converged once the error estimate is below
/// `max(abs, rel·|value|)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_segments: usize,
}

impl Tolerance {
    pub const fn new(abs: f64, rel: f64) -> Self {
        Self {
            abs,
            rel,
            max_segments: 4000,
        }
    }

    pub const fn with_max_segments(mut self, max_segments: usize) -> Self {
        self.max_segments = max_segments;
        self
    }

    fn target(&self, value: f64) -> f64 {
        self.abs.max(self.rel * value.abs())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate<T> {
    pub value: T,
    pub error: f64,
}

// Kronrod abscissae (descending, last is the centre) and weights; the Gauss
// points are the odd-indexed abscissae plus the centre.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy)]
struct Segment<T> {
    a: f64,
    b: f64,
    value: T,
    error: f64,
}

impl<T> PartialEq for Segment<T> {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}
impl<T> Eq for Segment<T> {}
impl<T> PartialOrd for Segment<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T> Ord for Segment<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod15<T: Integrand, F: Fn(f64) -> T>(f: &F, a: f64, b: f64) -> Segment<T> {
    let centre = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(centre);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut samples = [(T::default(), T::default()); 7];
    for (j, sample) in samples.iter_mut().enumerate() {
        let dx = half * XGK[j];
        let pair = (f(centre - dx), f(centre + dx));
        let sum = pair.0 + pair.1;
        kronrod = kronrod + sum * WGK[j];
        if j % 2 == 1 {
            gauss = gauss + sum * WG[j / 2];
        }
        *sample = pair;
    }
    let mean = kronrod * 0.5;
    let mut asc = WGK[7] * (fc - mean).magnitude();
    for (j, (lo, hi)) in samples.iter().enumerate() {
        asc += WGK[j] * ((*lo - mean).magnitude() + (*hi - mean).magnitude());
    }
    let asc = asc * half.abs();
    let mut error = ((kronrod - gauss) * half).magnitude();
    if asc != 0.0 && error != 0.0 {
        error = asc * (200.0 * error / asc).powf(1.5).min(1.0);
    }
    Segment {
        a,
        b,
        value: kronrod * half,
        error,
    }
}

/// Adaptive integral of `f` over the piecewise interval given by `points`
/// (sorted, at least two entries). Interior points are breakpoints the
/// integrand is known to be rough at.
pub fn integrate<T, F>(f: F, points: &[f64], tol: Tolerance) -> Result<Estimate<T>>
where
    T: Integrand,
    F: Fn(f64) -> T,
{
    if points.len() < 2 {
        return Err(Error::InvalidParameter(
            "quadrature needs at least two endpoints".into(),
        ));
    }
    let mut heap = BinaryHeap::new();
    for w in points.windows(2) {
        if w[1] > w[0] {
            heap.push(kronrod15(&f, w[0], w[1]));
        }
    }
    let exact_sum = |heap: &BinaryHeap<Segment<T>>| {
        heap.iter()
            .fold((T::default(), 0.0), |(v, e), s| (v + s.value, e + s.error))
    };
    // Running totals drive the loop; the exact sum confirms convergence.
    let (mut value, mut error) = exact_sum(&heap);
    loop {
        let target = tol.target(value.magnitude());
        if error <= target {
            let (v, e) = exact_sum(&heap);
            if e <= tol.target(v.magnitude()) {
                return Ok(Estimate { value: v, error: e });
            }
            value = v;
            error = e;
        }
        let worst = match heap.pop() {
            Some(s) => s,
            None => return Ok(Estimate { value, error }),
        };
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b || heap.len() + 2 > tol.max_segments {
            return Err(Error::Quadrature {
                estimate: error,
                target,
                segments: heap.len() + 1,
            });
        }
        let left = kronrod15(&f, worst.a, mid);
        let right = kronrod15(&f, mid, worst.b);
        value = value + left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }
}

/// Integral over `[a, ∞)` through the map `x = a + s/(1−s)`. Breakpoints in
/// `x` are carried over to the unit interval.
pub fn integrate_to_infinity<T, F>(f: F, a: f64, breaks: &[f64], tol: Tolerance) -> Result<Estimate<T>>
where
    T: Integrand,
    F: Fn(f64) -> T,
{
    let mut points = vec![0.0];
    points.extend(
        breaks
            .iter()
            .filter(|&&x| x > a && x.is_finite())
            .map(|&x| (x - a) / (1.0 + x - a)),
    );
    points.push(1.0);
    points.sort_by(f64::total_cmp);
    points.dedup();
    integrate(
        |s: f64| {
            let one_minus = 1.0 - s;
            if one_minus <= 0.0 {
                return T::default();
            }
            f(a + s / one_minus) * (1.0 / (one_minus * one_minus))
        },
        &points,
        tol,
    )
}

/// Nodes and weights of a fixed rule.
#[derive(Debug, Clone, PartialEq)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule {
    /// Applies the rule to `[a, b]` (Legendre rules only).
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F, a: f64, b: f64) -> f64 {
        let half = 0.5 * (b - a);
        let centre = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| w * f(centre + half * x))
            .sum::<f64>()
            * half
    }
}

/// `n`-point Gauss–Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> Rule {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let step = p / d;
            x -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        dp = if d != 0.0 { d } else { dp };
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    Rule { nodes, weights }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// `n`-point Gauss–Hermite rule for the weight `e^{−t²}` on the real line.
pub fn gauss_hermite(n: usize) -> Rule {
    const PIM4: f64 = 0.751_125_544_464_942_5; // π^{-1/4}
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    let mut z = 0.0;
    for i in 0..n.div_ceil(2) {
        // Standard asymptotic starting guesses for the largest roots, then
        // extrapolation from the previously found ones.
        z = match i {
            0 => (2.0 * nf + 1.0).sqrt() - 1.855_75 * (2.0 * nf + 1.0).powf(-1.0 / 6.0),
            1 => z - 1.14 * nf.powf(0.426) / z,
            2 => 1.86 * z - 0.86 * nodes[0],
            3 => 1.91 * z - 0.91 * nodes[1],
            _ => 2.0 * z - nodes[i - 2],
        };
        let mut pp = 0.0;
        for _ in 0..200 {
            let (mut p1, mut p2) = (PIM4, 0.0);
            for j in 0..n {
                let p3 = p2;
                p2 = p1;
                let jf = j as f64;
                p1 = z * (2.0 / (jf + 1.0)).sqrt() * p2 - (jf / (jf + 1.0)).sqrt() * p3;
            }
            pp = (2.0 * nf).sqrt() * p2;
            let step = p1 / pp;
            z -= step;
            if step.abs() <= 1e-15 * z.abs().max(1.0) {
                break;
            }
        }
        nodes[i] = z;
        nodes[n - 1 - i] = -z;
        weights[i] = 2.0 / (pp * pp);
        weights[n - 1 - i] = weights[i];
    }
    nodes.reverse();
    weights.reverse();
    Rule { nodes, weights }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn kronrod_integrates_smooth_functions() {
        let r = integrate(f64::sin, &[0.0, std::f64::consts::PI], Tolerance::new(0.0, 1e-14)).unwrap();
        assert_relative_eq!(r.value, 2.0, max_relative = 1e-14);
    }

    #[test]
    fn kronrod_handles_integrable_endpoint_singularity() {
        let r = integrate(|x: f64| x.powf(-0.5), &[0.0, 1.0], Tolerance::new(0.0, 1e-10)).unwrap();
        assert_relative_eq!(r.value, 2.0, max_relative = 1e-9);
    }

    #[test]
    fn complex_integrand() {
        let r = integrate(
            |x: f64| Complex64::new(0.0, x).exp(),
            &[0.0, std::f64::consts::FRAC_PI_2],
            Tolerance::new(0.0, 1e-14),
        )
        .unwrap();
        assert_relative_eq!(r.value.re, 1.0, max_relative = 1e-13);
        assert_relative_eq!(r.value.im, 1.0, max_relative = 1e-13);
    }

    #[test]
    fn semi_infinite_exponential() {
        let r = integrate_to_infinity(|x: f64| (-x).exp(), 0.0, &[], Tolerance::new(0.0, 1e-13)).unwrap();
        assert_relative_eq!(r.value, 1.0, max_relative = 1e-12);
    }

    #[test]
    fn legendre_rule_is_exact_for_polynomials() {
        let rule = gauss_legendre(20);
        assert_relative_eq!(rule.weights.iter().sum::<f64>(), 2.0, max_relative = 1e-14);
        let v = rule.integrate(|x| x.powi(38), -1.0, 1.0);
        assert_relative_eq!(v, 2.0 / 39.0, max_relative = 1e-13);
    }

    #[test]
    fn hermite_rule_moments() {
        for n in [16, 64, 128] {
            let rule = gauss_hermite(n);
            let sqrt_pi = std::f64::consts::PI.sqrt();
            let m0: f64 = rule.weights.iter().sum();
            let m2: f64 = rule.nodes.iter().zip(&rule.weights).map(|(x, w)| w * x * x).sum();
            assert_relative_eq!(m0, sqrt_pi, max_relative = 1e-13);
            assert_relative_eq!(m2, sqrt_pi / 2.0, max_relative = 1e-12);
            assert!(rule.nodes.windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn non_convergence_is_reported() {
        let err = integrate(
            |x: f64| if x > 0.5 { 1.0 / (x - 0.5) } else { 0.0 },
            &[0.0, 1.0],
            Tolerance::new(0.0, 1e-12).with_max_segments(50),
        )
        .unwrap_err();
        assert!(matches!(err, Error::Quadrature { .. }));
    }
}
