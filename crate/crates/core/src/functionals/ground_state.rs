use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Fewest points per axis; the fourth-order stencils need two neighbours on
/// each side.
const MIN_AXIS_POINTS: usize = 5;

/// Evenly spaced coordinates `lo + i·step`, `i < len`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UniformAxis {
    pub lo: f64,
    pub step: f64,
    pub len: usize,
}

impl UniformAxis {
    pub fn spanning(lo: f64, hi: f64, len: usize) -> Result<Self> {
        if len < MIN_AXIS_POINTS {
            return Err(Error::InvalidParameter(format!(
                "grid too coarse: {len} points per axis, need at least {MIN_AXIS_POINTS}"
            )));
        }
        if !(hi > lo && lo.is_finite() && hi.is_finite()) {
            return Err(Error::InvalidParameter(format!("empty axis [{lo}, {hi}]")));
        }
        Ok(Self {
            lo,
            step: (hi - lo) / (len - 1) as f64,
            len,
        })
    }

    pub fn at(&self, i: usize) -> f64 {
        self.lo + i as f64 * self.step
    }
}

/// Tensor-product grid, one axis per particle coordinate. Points are stored
/// in row-major order (last axis fastest).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TensorGrid {
    axes: Vec<UniformAxis>,
}

impl TensorGrid {
    pub fn new(axes: Vec<UniformAxis>) -> Result<Self> {
        if axes.is_empty() {
            return Err(Error::InvalidParameter("grid needs at least one axis".into()));
        }
        if let Some(a) = axes.iter().find(|a| a.len < MIN_AXIS_POINTS) {
            return Err(Error::InvalidParameter(format!(
                "grid too coarse: {} points per axis, need at least {MIN_AXIS_POINTS}",
                a.len
            )));
        }
        Ok(Self { axes })
    }

    /// `dim` copies of `[lo, hi]` with `len` points each.
    pub fn cube(dim: usize, lo: f64, hi: f64, len: usize) -> Result<Self> {
        Self::new(vec![UniformAxis::spanning(lo, hi, len)?; dim])
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn axes(&self) -> &[UniformAxis] {
        &self.axes
    }

    pub fn len(&self) -> usize {
        self.axes.iter().map(|a| a.len).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1; self.dim()];
        for k in (0..self.dim().saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * self.axes[k + 1].len;
        }
        strides
    }

    fn multi_index(&self, mut flat: usize, out: &mut [usize]) {
        for k in (0..self.dim()).rev() {
            out[k] = flat % self.axes[k].len;
            flat /= self.axes[k].len;
        }
    }

    /// Coordinates of the point with flat index `flat`.
    pub fn point(&self, flat: usize) -> Vec<f64> {
        let mut idx = vec![0; self.dim()];
        self.multi_index(flat, &mut idx);
        idx.iter().zip(&self.axes).map(|(&i, a)| a.at(i)).collect()
    }
}

/// Pair interaction added to the harmonic part of `W`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PairPotential {
    /// `W = (ω/2) Σ_{i,j} (x_i − x_j)²`.
    Harmonic { omega: f64 },
    /// Harmonic plus `λ Σ_{i<j} ln|x_i − x_j|`. Singular where two
    /// coordinates meet; the potential there is reported as NaN.
    Calogero { omega: f64, lambda: f64 },
}

/// Logarithm `W` of a nodeless ground state `Ω = e^{−W}` of `N` particles on
/// the line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum GroundStateField {
    Analytic {
        n_particles: usize,
        pair: PairPotential,
    },
    /// Samples of `W` on a grid, in the grid's point order.
    Custom {
        grid: TensorGrid,
        values: Vec<f64>,
    },
}

impl GroundStateField {
    pub fn n_particles(&self) -> usize {
        match self {
            GroundStateField::Analytic { n_particles, .. } => *n_particles,
            GroundStateField::Custom { grid, .. } => grid.dim(),
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            GroundStateField::Analytic { n_particles, pair } => {
                if *n_particles == 0 {
                    return Err(Error::InvalidParameter("n_particles must be positive".into()));
                }
                let (PairPotential::Harmonic { omega } | PairPotential::Calogero { omega, .. }) = *pair;
                if !omega.is_finite() {
                    return Err(Error::domain("omega", omega, "finite reals"));
                }
                if let PairPotential::Calogero { lambda, .. } = *pair {
                    if !lambda.is_finite() {
                        return Err(Error::domain("lambda", lambda, "finite reals"));
                    }
                }
                Ok(())
            }
            GroundStateField::Custom { grid, values } => {
                if values.len() != grid.len() {
                    return Err(Error::InvalidParameter(format!(
                        "{} samples of W for a grid of {} points",
                        values.len(),
                        grid.len()
                    )));
                }
                if values.iter().any(|w| !w.is_finite()) {
                    return Err(Error::InvalidParameter("W must be finite on the grid".into()));
                }
                Ok(())
            }
        }
    }

    fn analytic_w(pair: PairPotential, x: &[f64]) -> f64 {
        let mut w = 0.0;
        for i in 0..x.len() {
            for j in (i + 1)..x.len() {
                let r = x[i] - x[j];
                match pair {
                    PairPotential::Harmonic { omega } => w += omega * r * r,
                    PairPotential::Calogero { omega, lambda } => w += omega * r * r + lambda * r.abs().ln(),
                }
            }
        }
        w
    }

    /// `V = −ΔW + |∇W|²` from the closed-form derivatives.
    fn analytic_potential(pair: PairPotential, x: &[f64]) -> f64 {
        let n = x.len() as f64;
        let (omega, lambda) = match pair {
            PairPotential::Harmonic { omega } => (omega, 0.0),
            PairPotential::Calogero { omega, lambda } => (omega, lambda),
        };
        let sum: f64 = x.iter().sum();
        let mut laplacian = 2.0 * omega * n * (n - 1.0);
        let mut grad_sq = 0.0;
        for (k, &xk) in x.iter().enumerate() {
            let mut g = 2.0 * omega * (n * xk - sum);
            if lambda != 0.0 {
                for (j, &xj) in x.iter().enumerate() {
                    if j != k {
                        let inv = 1.0 / (xk - xj);
                        g += lambda * inv;
                        laplacian -= lambda * inv * inv;
                    }
                }
            }
            grad_sq += g * g;
        }
        let v = grad_sq - laplacian;
        if v.is_finite() {
            v
        } else {
            f64::NAN
        }
    }
}

/// Potential `V = −ΔW + ∇W·∇W` whose Schrödinger operator `−Δ + V` has
/// `e^{−W}` as a zero-energy ground state, evaluated at every grid point.
///
/// Analytic fields use exact derivatives. Custom fields use fourth-order
/// central differences, dropping to second order within two points of an
/// edge.
pub fn ground_state_potential(field: &GroundStateField, grid: &TensorGrid) -> Result<Vec<f64>> {
    field.validate()?;
    if grid.dim() != field.n_particles() {
        return Err(Error::InvalidParameter(format!(
            "grid has {} axes for {} particles",
            grid.dim(),
            field.n_particles()
        )));
    }
    match field {
        GroundStateField::Analytic { pair, .. } => Ok((0..grid.len())
            .map(|i| GroundStateField::analytic_potential(*pair, &grid.point(i)))
            .collect()),
        GroundStateField::Custom { grid: own, values } => {
            if own != grid {
                return Err(Error::InvalidParameter(
                    "custom W must be evaluated on the grid it was sampled on".into(),
                ));
            }
            Ok(finite_difference_potential(grid, values))
        }
    }
}

fn finite_difference_potential(grid: &TensorGrid, w: &[f64]) -> Vec<f64> {
    let strides = grid.strides();
    let mut idx = vec![0; grid.dim()];
    (0..grid.len())
        .map(|flat| {
            grid.multi_index(flat, &mut idx);
            let mut laplacian = 0.0;
            let mut grad_sq = 0.0;
            for (k, axis) in grid.axes().iter().enumerate() {
                let at = |offset: isize| w[(flat as isize + offset * strides[k] as isize) as usize];
                let (d1, d2) = axis_derivatives(at, idx[k], axis.len, axis.step);
                laplacian += d2;
                grad_sq += d1 * d1;
            }
            grad_sq - laplacian
        })
        .collect()
}

/// First and second derivative along one axis at position `i` of `len`.
fn axis_derivatives(f: impl Fn(isize) -> f64, i: usize, len: usize, h: f64) -> (f64, f64) {
    if i >= 2 && i + 2 < len {
        let (m2, m1, c, p1, p2) = (f(-2), f(-1), f(0), f(1), f(2));
        let d1 = (m2 - 8.0 * m1 + 8.0 * p1 - p2) / (12.0 * h);
        let d2 = (-m2 + 16.0 * m1 - 30.0 * c + 16.0 * p1 - p2) / (12.0 * h * h);
        (d1, d2)
    } else if i >= 1 && i + 1 < len {
        let (m1, c, p1) = (f(-1), f(0), f(1));
        ((p1 - m1) / (2.0 * h), (p1 - 2.0 * c + m1) / (h * h))
    } else {
        // One-sided, second order; `s` points inwards.
        let s: isize = if i == 0 { 1 } else { -1 };
        let (c, a, b, d) = (f(0), f(s), f(2 * s), f(3 * s));
        let d1 = s as f64 * (-3.0 * c + 4.0 * a - b) / (2.0 * h);
        let d2 = (2.0 * c - 5.0 * a + 4.0 * b - d) / (h * h);
        (d1, d2)
    }
}

/// Outcome of [`residual_check`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Residual {
    /// `‖(−Δ + V)Ω‖ / ‖Ω‖` over the points checked.
    pub relative: f64,
    pub points_checked: usize,
    pub points_excluded: usize,
}

/// Applies `−Δ + V` to `Ω = e^{−W}` with a fourth-order finite-difference
/// Laplacian at every point at least two cells inside the grid, skipping
/// points closer than `margin` cells to a coincidence `x_i = x_j` when the
/// field has a pair singularity.
pub fn residual_check(field: &GroundStateField, grid: &TensorGrid, margin: f64) -> Result<Residual> {
    let potential = ground_state_potential(field, grid)?;
    let omega_values: Vec<f64> = match field {
        GroundStateField::Analytic { pair, .. } => (0..grid.len())
            .map(|i| (-GroundStateField::analytic_w(*pair, &grid.point(i))).exp())
            .collect(),
        GroundStateField::Custom { values, .. } => values.iter().map(|w| (-w).exp()).collect(),
    };
    let singular = matches!(
        field,
        GroundStateField::Analytic {
            pair: PairPotential::Calogero { .. },
            ..
        }
    );
    let strides = grid.strides();
    let min_step = grid.axes().iter().map(|a| a.step).fold(f64::INFINITY, f64::min);
    let mut idx = vec![0; grid.dim()];
    let (mut num, mut den) = (0.0, 0.0);
    let (mut checked, mut excluded) = (0, 0);
    for flat in 0..grid.len() {
        grid.multi_index(flat, &mut idx);
        let interior = idx.iter().zip(grid.axes()).all(|(&i, a)| i >= 2 && i + 2 < a.len);
        if !interior {
            continue;
        }
        if singular {
            let x = grid.point(flat);
            let near = (0..x.len()).any(|i| ((i + 1)..x.len()).any(|j| (x[i] - x[j]).abs() < margin * min_step));
            if near {
                excluded += 1;
                continue;
            }
        }
        let mut laplacian = 0.0;
        for (k, axis) in grid.axes().iter().enumerate() {
            let at = |offset: isize| omega_values[(flat as isize + offset * strides[k] as isize) as usize];
            laplacian += axis_derivatives(at, idx[k], axis.len, axis.step).1;
        }
        let r = -laplacian + potential[flat] * omega_values[flat];
        num += r * r;
        den += omega_values[flat] * omega_values[flat];
        checked += 1;
    }
    if checked == 0 || den == 0.0 {
        return Err(Error::InvalidParameter("no grid points left to check".into()));
    }
    Ok(Residual {
        relative: (num / den).sqrt(),
        points_checked: checked,
        points_excluded: excluded,
    })
}
