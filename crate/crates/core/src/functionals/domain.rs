use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Axis-aligned box `[0, side_0] × … × [0, side_{d−1}]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxDomain {
    sides: Vec<f64>,
}

/// Highest dimension supported by the nested quadrature.
pub const MAX_DIM: usize = 3;

impl BoxDomain {
    pub fn new(sides: Vec<f64>) -> Result<Self> {
        if sides.is_empty() || sides.len() > MAX_DIM {
            return Err(Error::InvalidParameter(format!(
                "box dimension must be 1..={MAX_DIM}, got {}",
                sides.len()
            )));
        }
        if let Some(&bad) = sides.iter().find(|s| !(**s > 0.0 && s.is_finite())) {
            return Err(Error::domain("box side", bad, "(0, ∞)"));
        }
        Ok(Self { sides })
    }

    pub fn interval(length: f64) -> Result<Self> {
        Self::new(vec![length])
    }

    pub fn cube(dim: usize, side: f64) -> Result<Self> {
        Self::new(vec![side; dim])
    }

    pub fn dim(&self) -> usize {
        self.sides.len()
    }

    pub fn sides(&self) -> &[f64] {
        &self.sides
    }

    pub fn volume(&self) -> f64 {
        self.sides.iter().product()
    }

    pub fn contains(&self, point: &[f64]) -> bool {
        point.len() == self.dim() && point.iter().zip(&self.sides).all(|(x, s)| (0.0..=*s).contains(x))
    }
}

/// Constant intensity `ρ` times Lebesgue measure on a box.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntensityMeasure {
    pub domain: BoxDomain,
    rho: f64,
}

impl IntensityMeasure {
    pub fn new(domain: BoxDomain, rho: f64) -> Result<Self> {
        if !(rho >= 0.0 && rho.is_finite()) {
            return Err(Error::domain("rho", rho, "[0, ∞)"));
        }
        Ok(Self { domain, rho })
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn total_mass(&self) -> f64 {
        self.rho * self.domain.volume()
    }
}

/// A finite point set in a box, stored as flat coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointConfiguration {
    dim: usize,
    coords: Vec<f64>,
}

impl PointConfiguration {
    pub fn empty(dim: usize) -> Self {
        Self {
            dim,
            coords: Vec::new(),
        }
    }

    pub fn from_points(dim: usize, points: &[Vec<f64>]) -> Result<Self> {
        let mut coords = Vec::with_capacity(points.len() * dim);
        for p in points {
            if p.len() != dim {
                return Err(Error::InvalidParameter(format!(
                    "point of dimension {} in a {dim}-dimensional configuration",
                    p.len()
                )));
            }
            coords.extend_from_slice(p);
        }
        Ok(Self { dim, coords })
    }

    pub(crate) fn push(&mut self, point: &[f64]) {
        debug_assert_eq!(point.len(), self.dim);
        self.coords.extend_from_slice(point);
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len().checked_div(self.dim).unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> {
        self.coords.chunks_exact(self.dim.max(1))
    }
}
