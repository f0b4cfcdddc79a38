use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::energy::{energy, EnergyCounts, Occupation, QuiverModel, QuiverParams, SiteState};
use super::lattice::Lattice;
use crate::error::{Error, Result};

/// Largest configuration space `4^N` enumerated exactly.
pub const MAX_EXACT_STATES: u64 = 20_000_000;

/// Energies within this of the running minimum stay candidates during the
/// walk; the final degenerate set uses [`DEGENERACY_TOL`] after a full
/// recompute.
const CANDIDATE_TOL: f64 = 1e-6;
const DEGENERACY_TOL: f64 = 1e-9;

const CHUNKS: u64 = 64;

/// A sweep proposes one move per (site, site state) pair.
const MOVES_PER_SITE: usize = 4;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExactGround {
    pub energy: f64,
    /// Every minimiser, in lexicographic order.
    pub argmins: Vec<Occupation>,
    /// Number of occupations with the requested electron count.
    pub sector_size: u64,
}

fn check_electrons(lattice: &Lattice, electrons: usize) -> Result<()> {
    if electrons > 2 * lattice.n_sites() {
        return Err(Error::InvalidParameter(format!(
            "{electrons} electrons do not fit on {} sites",
            lattice.n_sites()
        )));
    }
    Ok(())
}

/// State of the modular base-4 Gray code at step `i`: digit `d` is
/// `(i_d − i_{d+1}) mod 4`. Consecutive steps differ in one digit, which
/// increments by one.
fn gray_states(i: u64, n_sites: usize) -> Vec<SiteState> {
    (0..n_sites)
        .map(|d| {
            let here = (i >> (2 * d)) & 3;
            let next = if 2 * (d + 1) < 64 { (i >> (2 * (d + 1))) & 3 } else { 0 };
            SiteState::from_index(((here + 4 - next) % 4) as usize)
        })
        .collect()
}

struct Candidates {
    best: f64,
    states: Vec<(f64, Vec<SiteState>)>,
}

impl Candidates {
    fn new() -> Self {
        Self {
            best: f64::INFINITY,
            states: Vec::new(),
        }
    }

    fn offer(&mut self, e: f64, states: impl FnOnce() -> Vec<SiteState>) {
        if e > self.best + CANDIDATE_TOL {
            return;
        }
        if e < self.best {
            self.best = e;
            let cutoff = e + CANDIDATE_TOL;
            self.states.retain(|(x, _)| *x <= cutoff);
        }
        self.states.push((e, states()));
    }

    fn merge(mut self, other: Self) -> Self {
        for (e, s) in other.states {
            self.offer(e, || s);
        }
        self
    }
}

/// Minimum energy and all minimisers among occupations with `electrons`
/// electrons, by exhaustive enumeration.
///
/// The walk follows a base-4 Gray code so each step changes one site and
/// the energy is updated from the terms touching it. Contiguous ranges of
/// the walk run in parallel and are merged in order.
pub fn ground_search_exact(lattice: &Lattice, params: &QuiverParams, electrons: usize) -> Result<ExactGround> {
    check_electrons(lattice, electrons)?;
    let n = lattice.n_sites();
    let total = 4u64
        .checked_pow(n as u32)
        .filter(|&t| t <= MAX_EXACT_STATES)
        .ok_or(Error::TooLarge {
            size: 4u64.saturating_pow(n as u32),
            cap: MAX_EXACT_STATES,
            hint: "use annealing for lattices beyond 12 sites",
        })?;
    let model = QuiverModel::new(lattice, *params)?;
    let chunk = total.div_ceil(CHUNKS);
    let walks: Vec<(Candidates, u64)> = (0..total.div_ceil(chunk))
        .into_par_iter()
        .map(|c| {
            let (start, end) = (c * chunk, ((c + 1) * chunk).min(total));
            let mut states = gray_states(start, n);
            let mut counts = model
                .counts(&Occupation::new(states.clone()))
                .expect("walk state matches the lattice");
            let mut count: usize = states.iter().map(|s| s.electrons()).sum();
            let mut found = Candidates::new();
            let mut sector = 0;
            for i in start..end {
                if count == electrons {
                    sector += 1;
                    found.offer(model.energy_of_counts(&counts), || states.clone());
                }
                if i + 1 < end {
                    let site = ((i + 1).trailing_zeros() / 2) as usize;
                    let before = model.local_counts(&states, &[site]);
                    count -= states[site].electrons();
                    states[site] = SiteState::from_index(states[site] as usize + 1);
                    count += states[site].electrons();
                    counts = counts + (model.local_counts(&states, &[site]) - before);
                }
            }
            (found, sector)
        })
        .collect();
    let sector_size = walks.iter().map(|w| w.1).sum();
    let merged = walks
        .into_iter()
        .map(|w| w.0)
        .fold(Candidates::new(), Candidates::merge);
    let mut exact: Vec<(f64, Occupation)> = merged
        .states
        .into_iter()
        .map(|(_, s)| {
            let occ = Occupation::new(s);
            Ok((energy(&occ, lattice, params)?, occ))
        })
        .collect::<Result<_>>()?;
    let min = exact.iter().map(|e| e.0).fold(f64::INFINITY, f64::min);
    let tol = DEGENERACY_TOL * min.abs().max(1.0);
    exact.retain(|e| e.0 <= min + tol);
    let mut argmins: Vec<Occupation> = exact.into_iter().map(|e| e.1).collect();
    argmins.sort();
    Ok(ExactGround {
        energy: min,
        argmins,
        sector_size,
    })
}

/// Geometric cooling: sweep `k` runs at `t_init · cooling^k`. A sweep is
/// `4·N_sites` proposed moves.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnnealSchedule {
    pub t_init: f64,
    pub cooling: f64,
    pub sweeps: usize,
}

impl AnnealSchedule {
    /// `T_init = 2t`, cooling 0.95, 2000 sweeps.
    pub fn for_params(p: &QuiverParams) -> Self {
        Self {
            t_init: 2.0 * p.t,
            cooling: 0.95,
            sweeps: 2000,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t_init >= 0.0 && self.t_init.is_finite()) {
            return Err(Error::domain("t_init", self.t_init, "[0, ∞)"));
        }
        if !(self.cooling > 0.0 && self.cooling < 1.0) {
            return Err(Error::domain("cooling", self.cooling, "(0, 1)"));
        }
        if self.sweeps == 0 {
            return Err(Error::InvalidParameter("sweeps must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnnealResult {
    pub best_energy: f64,
    pub best: Occupation,
    /// Current energy at the end of every sweep.
    pub trace: Vec<f64>,
}

fn random_occupation<R: Rng + ?Sized>(n_sites: usize, electrons: usize, rng: &mut R) -> Vec<SiteState> {
    let mut modes: Vec<usize> = (0..2 * n_sites).collect();
    modes.shuffle(rng);
    let mut filled = vec![[false; 2]; n_sites];
    for &m in &modes[..electrons] {
        filled[m / 2][m % 2] = true;
    }
    filled.iter().map(|f| SiteState::from_numbers(f[0], f[1])).collect()
}

/// Proposes a relocation of one electron or a spin flip of a singly
/// occupied site, each with probability ½. Returns the sites changed and
/// their new states, or `None` when the chosen move type is impossible.
fn propose<R: Rng + ?Sized>(states: &[SiteState], rng: &mut R) -> Option<Vec<(usize, SiteState)>> {
    if rng.random_bool(0.5) {
        let occupied: Vec<(usize, usize)> = (0..states.len())
            .flat_map(|s| {
                (0..2)
                    .filter(move |&spin| states[s].n(spin) == 1)
                    .map(move |spin| (s, spin))
            })
            .collect();
        let &(from, spin) = occupied.get(rng.random_range(0..occupied.len().max(1)))?;
        let targets: Vec<usize> = (0..states.len()).filter(|&s| states[s].n(spin) == 0).collect();
        let &to = targets.get(rng.random_range(0..targets.len().max(1)))?;
        let set = |state: SiteState, value: bool| {
            let mut n = [state.n_up() == 1, state.n_down() == 1];
            n[spin] = value;
            SiteState::from_numbers(n[0], n[1])
        };
        Some(vec![(from, set(states[from], false)), (to, set(states[to], true))])
    } else {
        let singles: Vec<usize> = (0..states.len())
            .filter(|&s| matches!(states[s], SiteState::Up | SiteState::Down))
            .collect();
        let &site = singles.get(rng.random_range(0..singles.len().max(1)))?;
        Some(vec![(site, states[site].spin_flipped())])
    }
}

/// Metropolis annealing at fixed electron count. `t_init = 0` accepts only
/// moves that do not raise the energy.
pub fn ground_search_anneal<R: Rng + ?Sized>(
    lattice: &Lattice,
    params: &QuiverParams,
    electrons: usize,
    schedule: &AnnealSchedule,
    rng: &mut R,
) -> Result<AnnealResult> {
    check_electrons(lattice, electrons)?;
    schedule.validate()?;
    let model = QuiverModel::new(lattice, *params)?;
    let n = lattice.n_sites();
    let mut states = random_occupation(n, electrons, rng);
    let mut counts: EnergyCounts = model.counts(&Occupation::new(states.clone()))?;
    let mut current = model.energy_of_counts(&counts);
    let (mut best_energy, mut best) = (current, states.clone());
    let mut trace = Vec::with_capacity(schedule.sweeps);
    let mut temperature = schedule.t_init;
    for _ in 0..schedule.sweeps {
        for _ in 0..n * MOVES_PER_SITE {
            let Some(changes) = propose(&states, rng) else {
                continue;
            };
            let sites: Vec<usize> = changes.iter().map(|c| c.0).collect();
            let old: Vec<SiteState> = sites.iter().map(|&s| states[s]).collect();
            let before = model.local_counts(&states, &sites);
            for &(s, state) in &changes {
                states[s] = state;
            }
            let delta = model.local_counts(&states, &sites) - before;
            let trial = model.energy_of_counts(&(counts + delta));
            let step = trial - current;
            let accept = step <= 0.0 || (temperature > 0.0 && rng.random::<f64>() < (-step / temperature).exp());
            if accept {
                counts = counts + delta;
                current = trial;
                if current < best_energy {
                    best_energy = current;
                    best.clone_from(&states);
                }
            } else {
                for (&s, &state) in sites.iter().zip(&old) {
                    states[s] = state;
                }
            }
        }
        trace.push(current);
        temperature *= schedule.cooling;
    }
    let best = Occupation::new(best);
    Ok(AnnealResult {
        best_energy: energy(&best, lattice, params)?,
        best,
        trace,
    })
}

/// Independent annealing runs, one per seed, each on its own ChaCha8
/// generator. Results come back in seed order.
pub fn anneal_seeds(
    lattice: &Lattice,
    params: &QuiverParams,
    electrons: usize,
    schedule: &AnnealSchedule,
    seeds: &[u64],
) -> Result<Vec<AnnealResult>> {
    seeds
        .par_iter()
        .map(|&seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            ground_search_anneal(lattice, params, electrons, schedule, &mut rng)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gray_walk_changes_one_site_by_one() {
        let n = 3;
        for i in 0..63u64 {
            let a = gray_states(i, n);
            let b = gray_states(i + 1, n);
            let changed: Vec<usize> = (0..n).filter(|&d| a[d] != b[d]).collect();
            let site = ((i + 1).trailing_zeros() / 2) as usize;
            assert_eq!(changed, vec![site]);
            assert_eq!(b[site] as usize, (a[site] as usize + 1) % 4);
        }
        let mut seen: Vec<_> = (0..64).map(|i| gray_states(i, n)).collect();
        seen.sort();
        seen.dedup();
        assert_eq!(seen.len(), 64);
    }

    #[test]
    fn random_start_has_the_requested_count() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for e in [0, 5, 18] {
            let s = random_occupation(9, e, &mut rng);
            assert_eq!(s.iter().map(|x| x.electrons()).sum::<usize>(), e);
        }
    }

    #[test]
    fn rejects_oversized_problems() {
        let lattice = Lattice::open(4, 4).unwrap();
        let err = ground_search_exact(&lattice, &QuiverParams::pairing_regime(1, 0), 14).unwrap_err();
        assert!(matches!(err, Error::TooLarge { .. }));
        let small = Lattice::open(2, 1).unwrap();
        assert!(ground_search_exact(&small, &QuiverParams::pairing_regime(1, 0), 5).is_err());
    }
}
