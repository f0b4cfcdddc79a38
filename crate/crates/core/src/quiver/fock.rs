//! Fermion operators on the Fock space of a small lattice, as sparse
//! complex matrices.
//!
//! Mode `site·2 + spin` (spin 0 = ↑, 1 = ↓) is bit `mode` of the basis
//! index. The Jordan–Wigner string runs over all lower modes.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use super::lattice::Lattice;
use crate::error::{Error, Result};

/// Largest lattice the exact algebra is built for (`4^6 = 4096` states).
pub const MAX_FOCK_SITES: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Spin {
    Up = 0,
    Down = 1,
}

impl Spin {
    pub const BOTH: [Spin; 2] = [Spin::Up, Spin::Down];

    pub fn flipped(self) -> Spin {
        match self {
            Spin::Up => Spin::Down,
            Spin::Down => Spin::Up,
        }
    }
}

/// Sparse square matrix stored by rows; each row is sorted by column.
#[derive(Debug, Clone, PartialEq)]
pub struct FockOperator {
    dim: usize,
    rows: Vec<Vec<(usize, Complex64)>>,
}

impl FockOperator {
    pub fn zero(dim: usize) -> Self {
        Self {
            dim,
            rows: vec![Vec::new(); dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            dim,
            rows: (0..dim).map(|i| vec![(i, Complex64::new(1.0, 0.0))]).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.rows[row]
            .binary_search_by_key(&col, |(c, _)| *c)
            .map(|k| self.rows[row][k].1)
            .unwrap_or_default()
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            dim: self.dim,
            rows: self
                .rows
                .iter()
                .map(|r| r.iter().map(|&(c, v)| (c, v * s)).collect())
                .collect(),
        }
    }

    pub fn adjoint(&self) -> Self {
        let mut rows = vec![Vec::new(); self.dim];
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, v) in row {
                rows[j].push((i, v.conj()));
            }
        }
        // Rows were filled in increasing `i`, so they are already sorted.
        Self { dim: self.dim, rows }
    }

    pub fn frobenius(&self) -> f64 {
        self.rows
            .iter()
            .flatten()
            .fold(0.0, |acc, (_, v)| acc + v.norm_sqr())
            .sqrt()
    }

    pub fn commutator(&self, other: &Self) -> Self {
        &(self * other) - &(other * self)
    }

    pub fn anticommutator(&self, other: &Self) -> Self {
        &(self * other) + &(other * self)
    }

    fn combine(&self, other: &Self, sign: f64) -> Self {
        assert_eq!(self.dim, other.dim, "operator dimensions differ");
        let rows = self
            .rows
            .iter()
            .zip(&other.rows)
            .map(|(a, b)| {
                let mut out = Vec::with_capacity(a.len() + b.len());
                let (mut i, mut j) = (0, 0);
                while i < a.len() || j < b.len() {
                    let ca = a.get(i).map_or(usize::MAX, |e| e.0);
                    let cb = b.get(j).map_or(usize::MAX, |e| e.0);
                    if ca < cb {
                        out.push(a[i]);
                        i += 1;
                    } else if cb < ca {
                        out.push((cb, b[j].1 * sign));
                        j += 1;
                    } else {
                        let v = a[i].1 + b[j].1 * sign;
                        if v != Complex64::default() {
                            out.push((ca, v));
                        }
                        i += 1;
                        j += 1;
                    }
                }
                out
            })
            .collect();
        Self { dim: self.dim, rows }
    }
}

impl Add for &FockOperator {
    type Output = FockOperator;
    fn add(self, rhs: &FockOperator) -> FockOperator {
        self.combine(rhs, 1.0)
    }
}

impl Sub for &FockOperator {
    type Output = FockOperator;
    fn sub(self, rhs: &FockOperator) -> FockOperator {
        self.combine(rhs, -1.0)
    }
}

impl Neg for &FockOperator {
    type Output = FockOperator;
    fn neg(self) -> FockOperator {
        self.scale(Complex64::new(-1.0, 0.0))
    }
}

impl Mul for &FockOperator {
    type Output = FockOperator;
    fn mul(self, rhs: &FockOperator) -> FockOperator {
        assert_eq!(self.dim, rhs.dim, "operator dimensions differ");
        let mut scratch = vec![Complex64::default(); self.dim];
        let mut touched = Vec::new();
        let rows = self
            .rows
            .iter()
            .map(|row| {
                for &(k, a) in row {
                    for &(j, b) in &rhs.rows[k] {
                        if scratch[j] == Complex64::default() {
                            touched.push(j);
                        }
                        scratch[j] += a * b;
                    }
                }
                touched.sort_unstable();
                touched.dedup();
                let out: Vec<_> = touched
                    .iter()
                    .filter_map(|&j| {
                        let v = std::mem::take(&mut scratch[j]);
                        (v != Complex64::default()).then_some((j, v))
                    })
                    .collect();
                touched.clear();
                out
            })
            .collect();
        FockOperator { dim: self.dim, rows }
    }
}

/// Annihilation operators `c_{aσ}` of every mode of a lattice.
#[derive(Debug, Clone)]
pub struct FermionOps {
    n_sites: usize,
    annihilators: Vec<FockOperator>,
    creators: Vec<FockOperator>,
}

impl FermionOps {
    pub fn new(lattice: &Lattice) -> Result<Self> {
        let n_sites = lattice.n_sites();
        if n_sites > MAX_FOCK_SITES {
            return Err(Error::TooLarge {
                size: n_sites as u64,
                cap: MAX_FOCK_SITES as u64,
                hint: "exact operator algebra is limited to 6 sites",
            });
        }
        let modes = 2 * n_sites;
        let dim = 1usize << modes;
        let annihilators: Vec<FockOperator> = (0..modes)
            .map(|m| {
                let bit = 1usize << m;
                let mut op = FockOperator::zero(dim);
                for source in 0..dim {
                    if source & bit != 0 {
                        let parity = (source & (bit - 1)).count_ones() % 2;
                        let sign = if parity == 0 { 1.0 } else { -1.0 };
                        op.rows[source ^ bit].push((source, Complex64::new(sign, 0.0)));
                    }
                }
                op
            })
            .collect();
        let creators = annihilators.iter().map(FockOperator::adjoint).collect();
        Ok(Self {
            n_sites,
            annihilators,
            creators,
        })
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn dim(&self) -> usize {
        1 << (2 * self.n_sites)
    }

    pub fn mode(site: usize, spin: Spin) -> usize {
        site * 2 + spin as usize
    }

    fn check_site(&self, site: usize) -> Result<()> {
        if site < self.n_sites {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!(
                "site {site} outside a lattice of {} sites",
                self.n_sites
            )))
        }
    }

    pub fn c(&self, site: usize, spin: Spin) -> Result<&FockOperator> {
        self.check_site(site)?;
        Ok(&self.annihilators[Self::mode(site, spin)])
    }

    pub fn c_dag(&self, site: usize, spin: Spin) -> Result<&FockOperator> {
        self.check_site(site)?;
        Ok(&self.creators[Self::mode(site, spin)])
    }

    /// `c†_{xσ} c_{yσ}`.
    pub fn hop(&self, x: usize, y: usize, spin: Spin) -> Result<FockOperator> {
        Ok(self.c_dag(x, spin)? * self.c(y, spin)?)
    }

    pub fn all_modes(&self) -> impl Iterator<Item = (&FockOperator, &FockOperator)> {
        self.annihilators.iter().zip(&self.creators)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_site_car() {
        let ops = FermionOps::new(&Lattice::open(1, 1).unwrap()).unwrap();
        let c = ops.c(0, Spin::Up).unwrap();
        let cd = ops.c_dag(0, Spin::Up).unwrap();
        let id = FockOperator::identity(4);
        assert_eq!((&c.anticommutator(cd) - &id).frobenius(), 0.0);
        assert_eq!((c * c).frobenius(), 0.0);
    }

    #[test]
    fn too_many_sites() {
        assert!(matches!(
            FermionOps::new(&Lattice::open(7, 1).unwrap()),
            Err(Error::TooLarge { .. })
        ));
    }

    #[test]
    fn sparse_algebra() {
        let ops = FermionOps::new(&Lattice::open(2, 1).unwrap()).unwrap();
        let a = ops.hop(0, 1, Spin::Up).unwrap();
        assert_eq!(a.adjoint(), ops.hop(1, 0, Spin::Up).unwrap());
        assert_eq!((&a - &a).frobenius(), 0.0);
        assert_eq!((&a + &a).frobenius(), 2.0 * a.frobenius());
        assert_eq!((&a * &a).frobenius(), 0.0);
        assert_eq!(a.get(0, 1), Complex64::default());
    }
}
