//! Numerical toolkit for ideal and fractional boson-gas measures, the
//! thermodynamics of superposed Bose–Einstein ensembles, and a lattice model
//! of hole pairing built from fermionic current operators.
//!
//! Modules, bottom up:
//!
//! * [`quad`], [`linalg`]: quadrature rules and complex determinants.
//! * [`specfun`]: polylogarithms, Mittag-Leffler, stable laws, lognormal.
//! * [`functionals`]: characteristic functionals, samplers, Monte Carlo.
//! * [`bec`]: fugacity, energy and specific heat of superposed ensembles.
//! * [`quiver`]: fermion operators, current algebra, lattice energy, searches.

// Guards are written `!(x > 0.0)` on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bec;
pub mod error;
pub mod functionals;
pub mod linalg;
pub mod quad;
pub mod quiver;
pub mod specfun;

pub use error::{Error, Result};
