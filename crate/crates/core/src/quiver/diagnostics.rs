use std::collections::{BTreeMap, VecDeque};

use serde::Serialize;

use super::energy::{Occupation, QuiverParams};
use super::lattice::Lattice;
use crate::error::{Error, Result};

/// Hole statistics of one occupation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PairingReport {
    pub holes: usize,
    /// Nearest-neighbour bonds with a hole at both ends, each counted once.
    pub adjacent_hole_pairs: usize,
    /// Cluster size → number of clusters, clusters being connected
    /// components of hole sites under nearest-neighbour adjacency.
    pub clusters: BTreeMap<usize, usize>,
    pub max_cluster: usize,
    /// Some cluster has more than two holes.
    pub larger_cluster: bool,
}

pub fn pairing_report(occ: &Occupation, lattice: &Lattice) -> Result<PairingReport> {
    if occ.len() != lattice.n_sites() {
        return Err(Error::InvalidParameter(format!(
            "occupation has {} sites, lattice has {}",
            occ.len(),
            lattice.n_sites()
        )));
    }
    let hole = |s: usize| occ.states()[s].is_hole();
    let adjacent_hole_pairs = lattice.bonds().into_iter().filter(|&(a, b)| hole(a) && hole(b)).count();
    let mut seen = vec![false; lattice.n_sites()];
    let mut clusters = BTreeMap::new();
    for start in occ.hole_sites() {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        let mut queue = VecDeque::from([start]);
        let mut size = 0;
        while let Some(s) = queue.pop_front() {
            size += 1;
            for &n in lattice.neighbors(s) {
                if hole(n) && !seen[n] {
                    seen[n] = true;
                    queue.push_back(n);
                }
            }
        }
        *clusters.entry(size).or_insert(0) += 1;
    }
    let max_cluster = clusters.keys().next_back().copied().unwrap_or(0);
    Ok(PairingReport {
        holes: occ.holes(),
        adjacent_hole_pairs,
        clusters,
        max_cluster,
        larger_cluster: max_cluster > 2,
    })
}

pub fn pairing_diagnostics(occs: &[Occupation], lattice: &Lattice) -> Result<Vec<PairingReport>> {
    occs.iter().map(|o| pairing_report(o, lattice)).collect()
}

/// Closed-form ground-energy estimates for `N` sites and `H` holes:
/// `e_10 = −t(N−H)(N−H−1)/2 − 4JH` for unconditional next-nearest hopping
/// and `e_01 = −t(N−H)(N−H−1)/2 − 2JH + kH/2` for the hole-conditioned one.
/// Shown next to enumerated minima; they are not expected to agree.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergyEstimates {
    pub e_10: f64,
    pub e_01: f64,
}

pub fn energy_estimates(n_sites: usize, holes: usize, p: &QuiverParams) -> Result<EnergyEstimates> {
    p.validate()?;
    if holes > n_sites {
        return Err(Error::InvalidParameter(format!("{holes} holes on {n_sites} sites")));
    }
    let (n, h) = (n_sites as f64, holes as f64);
    let kinetic = -p.t * (n - h) * (n - h - 1.0) / 2.0;
    Ok(EnergyEstimates {
        e_10: kinetic - 4.0 * p.j * h,
        e_01: kinetic - 2.0 * p.j * h + p.k * h / 2.0,
    })
}
