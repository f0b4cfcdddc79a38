//! Densities, currents and hop maps built from the exact fermion
//! operators, and exhaustive residual checks of their algebra.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::fock::{FermionOps, FockOperator, Spin};
use crate::error::Result;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// The four operators attached to an ordered site pair `(a, b)` and spin.
#[derive(Debug, Clone)]
pub struct CurrentOps {
    /// `ρ(a) = c†_a c_a`.
    pub rho: FockOperator,
    /// `J(a,b) = −i(c†_b c_a − c†_a c_b)`.
    pub j: FockOperator,
    /// `K(a,b) = c†_b c_a + c†_a c_b`.
    pub k: FockOperator,
    /// `V(a,b) = ½(K + iJ)`, the hop from `a` to `b`.
    pub v: FockOperator,
}

/// Literal construction from the creation/annihilation operators, with
/// `V` assembled as `½(K + iJ)` rather than simplified.
pub fn current_ops(ops: &FermionOps, a: usize, b: usize, spin: Spin) -> Result<CurrentOps> {
    let rho = ops.hop(a, a, spin)?;
    let forward = ops.hop(b, a, spin)?;
    let backward = ops.hop(a, b, spin)?;
    let j = (&forward - &backward).scale(-I);
    let k = &forward + &backward;
    let v = (&k + &j.scale(I)).scale(Complex64::new(0.5, 0.0));
    Ok(CurrentOps { rho, j, k, v })
}

/// Every `c†_x c_y` of one lattice, indexed for the residual checks.
struct HopTable {
    n: usize,
    dim: usize,
    hops: Vec<FockOperator>,
}

impl HopTable {
    fn new(ops: &FermionOps) -> Self {
        let n = ops.n_sites();
        let mut hops = Vec::with_capacity(2 * n * n);
        for spin in Spin::BOTH {
            for x in 0..n {
                for y in 0..n {
                    hops.push(ops.hop(x, y, spin).expect("sites are in range"));
                }
            }
        }
        Self {
            n,
            dim: ops.dim(),
            hops,
        }
    }

    fn e(&self, x: usize, y: usize, s: Spin) -> &FockOperator {
        &self.hops[(s as usize * self.n + x) * self.n + y]
    }

    fn rho(&self, a: usize, s: Spin) -> FockOperator {
        self.e(a, a, s).clone()
    }

    fn j(&self, a: usize, b: usize, s: Spin) -> FockOperator {
        (self.e(b, a, s) - self.e(a, b, s)).scale(-I)
    }

    fn k(&self, a: usize, b: usize, s: Spin) -> FockOperator {
        self.e(b, a, s) + self.e(a, b, s)
    }

    fn v(&self, a: usize, b: usize, s: Spin) -> &FockOperator {
        self.e(b, a, s)
    }

    fn zero(&self) -> FockOperator {
        FockOperator::zero(self.dim)
    }

    fn tuples(&self) -> Vec<[usize; 4]> {
        let n = self.n;
        (0..n.pow(4))
            .map(|i| [i % n, (i / n) % n, (i / n / n) % n, i / n / n / n])
            .collect()
    }
}

fn delta(x: usize, y: usize) -> f64 {
    if x == y {
        1.0
    } else {
        0.0
    }
}

/// Sum of `coefficient · operator` terms, skipping zero coefficients.
fn combination(zero: FockOperator, terms: &[(f64, FockOperator)]) -> FockOperator {
    terms
        .iter()
        .filter(|(c, _)| *c != 0.0)
        .fold(zero, |acc, (c, op)| &acc + &op.scale(Complex64::new(*c, 0.0)))
}

/// Largest residual found by an exhaustive check, and where it occurred.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualReport {
    pub max_residual: f64,
    pub identities_checked: usize,
    pub worst_case: String,
}

impl ResidualReport {
    fn empty() -> Self {
        Self {
            max_residual: 0.0,
            identities_checked: 0,
            worst_case: String::new(),
        }
    }

    fn record(&mut self, residual: f64, case: impl FnOnce() -> String) {
        self.identities_checked += 1;
        if residual > self.max_residual || self.worst_case.is_empty() {
            self.max_residual = self.max_residual.max(residual);
            self.worst_case = case();
        }
    }

    fn merge(mut self, other: Self) -> Self {
        self.identities_checked += other.identities_checked;
        if other.max_residual > self.max_residual || self.worst_case.is_empty() {
            self.max_residual = other.max_residual;
            self.worst_case = other.worst_case;
        }
        self
    }
}

/// `{c_i, c†_j} = δ_ij` and `{c_i, c_j} = 0` over every mode pair.
pub fn check_car(ops: &FermionOps) -> ResidualReport {
    let modes: Vec<_> = ops.all_modes().collect();
    let identity = FockOperator::identity(ops.dim());
    let zero = FockOperator::zero(ops.dim());
    let mut report = ResidualReport::empty();
    for (i, (ci, _)) in modes.iter().enumerate() {
        for (j, (cj, cj_dag)) in modes.iter().enumerate() {
            let expected = if i == j { &identity } else { &zero };
            report.record((&ci.anticommutator(cj_dag) - expected).frobenius(), || {
                format!("{{c_{i}, c†_{j}}}")
            });
            report.record(ci.anticommutator(cj).frobenius(), || format!("{{c_{i}, c_{j}}}"));
        }
    }
    report
}

/// The five density/current commutator identities, for every site tuple
/// `(a, b, m, n)` and spin pair; identities between different spins must
/// vanish.
pub fn check_commutators(ops: &FermionOps) -> ResidualReport {
    let table = HopTable::new(ops);
    table
        .tuples()
        .into_par_iter()
        .map(|[a, b, m, n]| {
            let mut report = ResidualReport::empty();
            for s in Spin::BOTH {
                for s2 in Spin::BOTH {
                    let same = if s == s2 { 1.0 } else { 0.0 };
                    let case = |name: &str| format!("{name} a={a} b={b} m={m} n={n} σ={s:?} σ′={s2:?}");
                    let rhs = |terms: &[(f64, FockOperator)]| combination(table.zero(), terms).scale(I * same);

                    let lhs = table.rho(a, s).commutator(&table.j(m, n, s2));
                    let expected = rhs(&[(-(delta(a, n) - delta(a, m)), table.k(m, n, s))]);
                    report.record((&lhs - &expected).frobenius(), || case("[ρ,J]"));

                    let lhs = table.rho(a, s).commutator(&table.k(m, n, s2));
                    let expected = rhs(&[(delta(a, n) - delta(a, m), table.j(m, n, s))]);
                    report.record((&lhs - &expected).frobenius(), || case("[ρ,K]"));

                    let lhs = table.j(a, b, s).commutator(&table.j(m, n, s2));
                    let expected = rhs(&[
                        (-delta(a, m), table.j(b, n, s)),
                        (delta(a, n), table.j(b, m, s)),
                        (-delta(b, n), table.j(a, m, s)),
                        (delta(b, m), table.j(a, n, s)),
                    ]);
                    report.record((&lhs - &expected).frobenius(), || case("[J,J]"));

                    let lhs = table.j(a, b, s).commutator(&table.k(m, n, s2));
                    let expected = rhs(&[
                        (-delta(a, m), table.k(n, b, s)),
                        (-delta(a, n), table.k(m, b, s)),
                        (delta(b, n), table.k(m, a, s)),
                        (delta(b, m), table.k(n, a, s)),
                    ]);
                    report.record((&lhs - &expected).frobenius(), || case("[J,K]"));

                    let lhs = table.k(a, b, s).commutator(&table.k(m, n, s2));
                    let expected = rhs(&[
                        (delta(a, m), table.j(n, b, s)),
                        (delta(a, n), table.j(m, b, s)),
                        (delta(b, n), table.j(m, a, s)),
                        (delta(b, m), table.j(n, a, s)),
                    ]);
                    report.record((&lhs - &expected).frobenius(), || case("[K,K]"));
                }
            }
            report
        })
        .reduce(ResidualReport::empty, ResidualReport::merge)
}

/// Residuals of the hop-map composition laws.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompositionReport {
    /// `V(a,b)V(m,n) = δ_an V(m,b) + δ_mn V(a,b) − V(m,b)V(a,n)`, all tuples.
    pub composition: ResidualReport,
    /// `V(a,b)V(b,a) = ρ(b)(1 − ρ(a))` for `a ≠ b`.
    pub hop_back: ResidualReport,
    /// The same identity at `a = b`, where the left side is `ρ(a)² = ρ(a)`
    /// and the right side is `ρ(a)(1 − ρ(a)) = 0`; reported, not required.
    pub hop_back_same_site: ResidualReport,
}

pub fn check_composition(ops: &FermionOps) -> CompositionReport {
    let table = HopTable::new(ops);
    let identity = FockOperator::identity(table.dim);
    let composition = table
        .tuples()
        .into_par_iter()
        .map(|[a, b, m, n]| {
            let mut report = ResidualReport::empty();
            for s in Spin::BOTH {
                let lhs = table.v(a, b, s) * table.v(m, n, s);
                let expected = combination(
                    table.zero(),
                    &[
                        (delta(a, n), table.v(m, b, s).clone()),
                        (delta(m, n), table.v(a, b, s).clone()),
                        (-1.0, table.v(m, b, s) * table.v(a, n, s)),
                    ],
                );
                report.record((&lhs - &expected).frobenius(), || {
                    format!("V(a,b)V(m,n) a={a} b={b} m={m} n={n} σ={s:?}")
                });
            }
            report
        })
        .reduce(ResidualReport::empty, ResidualReport::merge);

    let mut hop_back = ResidualReport::empty();
    let mut hop_back_same_site = ResidualReport::empty();
    for a in 0..table.n {
        for b in 0..table.n {
            for s in Spin::BOTH {
                let lhs = table.v(a, b, s) * table.v(b, a, s);
                let expected = table.e(b, b, s) * &(&identity - table.e(a, a, s));
                let residual = (&lhs - &expected).frobenius();
                let case = || format!("V(a,b)V(b,a) a={a} b={b} σ={s:?}");
                if a == b {
                    hop_back_same_site.record(residual, case);
                } else {
                    hop_back.record(residual, case);
                }
            }
        }
    }
    CompositionReport {
        composition,
        hop_back,
        hop_back_same_site,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quiver::Lattice;

    #[test]
    fn hop_map_simplifies() {
        let ops = FermionOps::new(&Lattice::open(2, 1).unwrap()).unwrap();
        let cur = current_ops(&ops, 0, 1, Spin::Down).unwrap();
        let direct = ops.hop(1, 0, Spin::Down).unwrap();
        assert!((&cur.v - &direct).frobenius() < 1e-14);
        let same = current_ops(&ops, 1, 1, Spin::Up).unwrap();
        assert!((&same.v - &same.rho).frobenius() < 1e-15);
        assert!((&same.k - &same.rho.scale(Complex64::new(2.0, 0.0))).frobenius() < 1e-15);
        assert_eq!(same.j.frobenius(), 0.0);
    }
}
