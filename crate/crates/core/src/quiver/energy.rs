use std::fmt;
use std::ops::{Add, Sub};

use serde::{Deserialize, Serialize};

use super::lattice::{Lattice, NnnRule};
use crate::error::{Error, Result};

/// State of one site, in the order (↑↓, ↑, ↓, ◯).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SiteState {
    Double = 0,
    Up = 1,
    Down = 2,
    Hole = 3,
}

impl SiteState {
    pub const ALL: [SiteState; 4] = [SiteState::Double, SiteState::Up, SiteState::Down, SiteState::Hole];

    pub fn from_index(i: usize) -> SiteState {
        Self::ALL[i % 4]
    }

    pub fn from_numbers(n_up: bool, n_down: bool) -> SiteState {
        match (n_up, n_down) {
            (true, true) => SiteState::Double,
            (true, false) => SiteState::Up,
            (false, true) => SiteState::Down,
            (false, false) => SiteState::Hole,
        }
    }

    pub fn n_up(self) -> i64 {
        matches!(self, SiteState::Double | SiteState::Up) as i64
    }

    pub fn n_down(self) -> i64 {
        matches!(self, SiteState::Double | SiteState::Down) as i64
    }

    /// `n_σ` with spin index 0 = ↑, 1 = ↓.
    pub fn n(self, spin: usize) -> i64 {
        if spin == 0 {
            self.n_up()
        } else {
            self.n_down()
        }
    }

    pub fn electrons(self) -> usize {
        (self.n_up() + self.n_down()) as usize
    }

    pub fn is_hole(self) -> bool {
        self == SiteState::Hole
    }

    pub fn spin_flipped(self) -> SiteState {
        match self {
            SiteState::Up => SiteState::Down,
            SiteState::Down => SiteState::Up,
            other => other,
        }
    }

    fn symbol(self) -> char {
        match self {
            SiteState::Double => 'D',
            SiteState::Up => 'u',
            SiteState::Down => 'd',
            SiteState::Hole => 'o',
        }
    }
}

/// Per-site occupation of a lattice. Ordered lexicographically by site.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Occupation(Vec<SiteState>);

impl Occupation {
    pub fn new(states: Vec<SiteState>) -> Self {
        Self(states)
    }

    pub fn uniform(n_sites: usize, state: SiteState) -> Self {
        Self(vec![state; n_sites])
    }

    pub fn states(&self) -> &[SiteState] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn electrons(&self) -> usize {
        self.0.iter().map(|s| s.electrons()).sum()
    }

    pub fn hole_sites(&self) -> Vec<usize> {
        (0..self.0.len()).filter(|&s| self.0[s].is_hole()).collect()
    }

    pub fn holes(&self) -> usize {
        self.0.iter().filter(|s| s.is_hole()).count()
    }

    pub fn double_occupancy(&self) -> usize {
        self.0.iter().filter(|&&s| s == SiteState::Double).count()
    }

    pub fn spin_flipped(&self) -> Self {
        Self(self.0.iter().map(|s| s.spin_flipped()).collect())
    }

    /// Moves the state of site `s` to site `map(s)`; `map` must be a
    /// permutation of the sites.
    pub fn permuted(&self, map: impl Fn(usize) -> usize) -> Self {
        let mut out = self.0.clone();
        for (s, &state) in self.0.iter().enumerate() {
            out[map(s)] = state;
        }
        Self(out)
    }

    fn check_size(&self, lattice: &Lattice) -> Result<()> {
        if self.0.len() == lattice.n_sites() {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!(
                "occupation has {} sites, lattice has {}",
                self.0.len(),
                lattice.n_sites()
            )))
        }
    }
}

/// One character per site: `D` double, `u` up, `d` down, `o` hole.
impl fmt::Display for Occupation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.iter().try_for_each(|s| write!(f, "{}", s.symbol()))
    }
}

/// How the nearest-neighbour sums run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BondConvention {
    /// Each bond in both directions.
    #[default]
    Ordered,
    /// Each bond once. The directed hop term is averaged over its two
    /// directions, so this is exactly half the ordered bond sums.
    Unordered,
}

impl BondConvention {
    fn weight(self) -> f64 {
        match self {
            BondConvention::Ordered => 1.0,
            BondConvention::Unordered => 0.5,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            BondConvention::Ordered => "ordered",
            BondConvention::Unordered => "unordered",
        }
    }
}

/// Couplings of the quiver energy. `alpha_q` switches on unconditional
/// next-nearest hopping, `beta_q` the hole-conditioned one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuiverParams {
    pub u: f64,
    pub t: f64,
    pub k: f64,
    pub j: f64,
    pub alpha_q: u8,
    pub beta_q: u8,
    #[serde(default)]
    pub bond_convention: BondConvention,
    #[serde(default)]
    pub nnn_rule: NnnRule,
}

impl QuiverParams {
    /// `(U, t, J, k) = (100, 1, 0.6, 1.8)`: `U ≫ t`, `t > J`, `4J > k` and
    /// `2k > 5J` all hold.
    pub fn pairing_regime(alpha_q: u8, beta_q: u8) -> Self {
        Self {
            u: 100.0,
            t: 1.0,
            k: 1.8,
            j: 0.6,
            alpha_q,
            beta_q,
            bond_convention: BondConvention::Ordered,
            nnn_rule: NnnRule::Diagonal,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (what, v) in [("U", self.u), ("t", self.t), ("k", self.k), ("J", self.j)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::domain(what, v, "[0, ∞)"));
            }
        }
        for (what, v) in [("alpha_q", self.alpha_q), ("beta_q", self.beta_q)] {
            if v > 1 {
                return Err(Error::InvalidParameter(format!("{what} = {v} must be 0 or 1")));
            }
        }
        Ok(())
    }

    /// True for `(alpha_q, beta_q)` equal to `(1, 0)` or `(0, 1)`; other
    /// combinations are allowed but unusual.
    pub fn is_standard_scenario(&self) -> bool {
        matches!((self.alpha_q, self.beta_q), (1, 0) | (0, 1))
    }
}

/// Integer ingredients of the energy; the energy is a fixed linear
/// combination of them, so incremental updates are exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct EnergyCounts {
    /// `Σ_a n_↑(a) n_↓(a)`.
    pub double: i64,
    /// `Σ_{ordered bonds (a,b), σ} n_σ(b)(1 − n_σ(a))`.
    pub hop: i64,
    /// `Σ_{ordered bonds} h(a) h(b)`.
    pub hole_pairs: i64,
    /// `Σ_a Σ_{[n, n′]} X(n, n′)` with `X = Σ_σ n_σ(n′)(1 − n_σ(n))`.
    pub nnn: i64,
    /// As `nnn`, weighted by `h(a)`.
    pub nnn_hole: i64,
}

impl Add for EnergyCounts {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self {
            double: self.double + o.double,
            hop: self.hop + o.hop,
            hole_pairs: self.hole_pairs + o.hole_pairs,
            nnn: self.nnn + o.nnn,
            nnn_hole: self.nnn_hole + o.nnn_hole,
        }
    }
}

impl Sub for EnergyCounts {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self {
            double: self.double - o.double,
            hop: self.hop - o.hop,
            hole_pairs: self.hole_pairs - o.hole_pairs,
            nnn: self.nnn - o.nnn,
            nnn_hole: self.nnn_hole - o.nnn_hole,
        }
    }
}

fn hop_term(from: SiteState, to: SiteState) -> i64 {
    (0..2).map(|s| to.n(s) * (1 - from.n(s))).sum()
}

/// Lattice and couplings with the term lists precomputed, for repeated
/// and incremental evaluation.
#[derive(Debug, Clone)]
pub struct QuiverModel {
    lattice: Lattice,
    params: QuiverParams,
    bonds: Vec<(usize, usize)>,
    /// `(a, n, n′)` for every site `a` and NNN pair `[n, n′]` of `a`.
    triples: Vec<(usize, usize, usize)>,
    site_bonds: Vec<Vec<usize>>,
    site_triples: Vec<Vec<usize>>,
}

impl QuiverModel {
    pub fn new(lattice: &Lattice, params: QuiverParams) -> Result<Self> {
        params.validate()?;
        let n = lattice.n_sites();
        let bonds = lattice.ordered_bonds();
        let triples: Vec<_> = (0..n)
            .flat_map(|a| {
                lattice
                    .nnn_pairs(a, params.nnn_rule)
                    .into_iter()
                    .map(move |(m, p)| (a, m, p))
            })
            .collect();
        let mut site_bonds = vec![Vec::new(); n];
        for (i, &(a, b)) in bonds.iter().enumerate() {
            site_bonds[a].push(i);
            site_bonds[b].push(i);
        }
        let mut site_triples = vec![Vec::new(); n];
        for (i, &(a, m, p)) in triples.iter().enumerate() {
            for s in [a, m, p] {
                if site_triples[s].last() != Some(&i) {
                    site_triples[s].push(i);
                }
            }
        }
        Ok(Self {
            lattice: lattice.clone(),
            params,
            bonds,
            triples,
            site_bonds,
            site_triples,
        })
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn params(&self) -> &QuiverParams {
        &self.params
    }

    fn bond_counts(&self, states: &[SiteState], i: usize) -> EnergyCounts {
        let (a, b) = self.bonds[i];
        EnergyCounts {
            hop: hop_term(states[a], states[b]),
            hole_pairs: (states[a].is_hole() && states[b].is_hole()) as i64,
            ..Default::default()
        }
    }

    fn triple_counts(&self, states: &[SiteState], i: usize) -> EnergyCounts {
        let (a, m, p) = self.triples[i];
        let x = hop_term(states[m], states[p]);
        EnergyCounts {
            nnn: x,
            nnn_hole: if states[a].is_hole() { x } else { 0 },
            ..Default::default()
        }
    }

    pub fn counts(&self, occ: &Occupation) -> Result<EnergyCounts> {
        occ.check_size(&self.lattice)?;
        let states = occ.states();
        let mut c = EnergyCounts {
            double: occ.double_occupancy() as i64,
            ..Default::default()
        };
        for i in 0..self.bonds.len() {
            c = c + self.bond_counts(states, i);
        }
        for i in 0..self.triples.len() {
            c = c + self.triple_counts(states, i);
        }
        Ok(c)
    }

    /// Contribution of every term that involves at least one of `sites`.
    pub(crate) fn local_counts(&self, states: &[SiteState], sites: &[usize]) -> EnergyCounts {
        let mut bonds: Vec<usize> = sites.iter().flat_map(|&s| self.site_bonds[s].iter().copied()).collect();
        let mut triples: Vec<usize> = sites
            .iter()
            .flat_map(|&s| self.site_triples[s].iter().copied())
            .collect();
        if sites.len() > 1 {
            bonds.sort_unstable();
            bonds.dedup();
            triples.sort_unstable();
            triples.dedup();
        }
        let mut c = EnergyCounts {
            double: sites.iter().filter(|&&s| states[s] == SiteState::Double).count() as i64,
            ..Default::default()
        };
        for i in bonds {
            c = c + self.bond_counts(states, i);
        }
        for i in triples {
            c = c + self.triple_counts(states, i);
        }
        c
    }

    /// `U·D − t·w·Hop + 2k·w·HH − 2J(α_q·X + β_q·X_h)`, with `w` the bond
    /// weight and the factors 2 from the spin sums in the `k` and `J` terms.
    pub fn energy_of_counts(&self, c: &EnergyCounts) -> f64 {
        let p = &self.params;
        let w = p.bond_convention.weight();
        p.u * c.double as f64 - p.t * w * c.hop as f64 + 2.0 * p.k * w * c.hole_pairs as f64
            - 2.0 * p.j * (p.alpha_q as f64 * c.nnn as f64 + p.beta_q as f64 * c.nnn_hole as f64)
    }

    pub fn energy(&self, occ: &Occupation) -> Result<f64> {
        Ok(self.energy_of_counts(&self.counts(occ)?))
    }
}

/// The quiver energy of an occupation. Assembled from integer term counts,
/// so occupations related by a lattice symmetry get bit-identical energies.
pub fn energy(occ: &Occupation, lattice: &Lattice, p: &QuiverParams) -> Result<f64> {
    QuiverModel::new(lattice, *p)?.energy(occ)
}

/// The same energy summed term by term in floating point, straight from
/// the number-operator form. Kept as an independent check on the counts.
pub fn energy_term_by_term(occ: &Occupation, lattice: &Lattice, p: &QuiverParams) -> Result<f64> {
    p.validate()?;
    occ.check_size(lattice)?;
    let s = occ.states();
    let n = |site: usize, spin: usize| s[site].n(spin) as f64;
    let h = |site: usize| (1.0 - n(site, 0)) * (1.0 - n(site, 1));
    let w = p.bond_convention.weight();
    let mut e = 0.0;
    for a in 0..lattice.n_sites() {
        e += p.u * n(a, 0) * n(a, 1);
    }
    for (a, b) in lattice.ordered_bonds() {
        for spin in 0..2 {
            e -= p.t * w * n(b, spin) * (1.0 - n(a, spin));
            e += p.k * w * h(a) * h(b);
        }
    }
    for a in 0..lattice.n_sites() {
        let pairs = lattice.nnn_pairs(a, p.nnn_rule);
        for _spin in 0..2 {
            let prefactor = p.alpha_q as f64 + p.beta_q as f64 * h(a);
            for &(m, q) in &pairs {
                for spin2 in 0..2 {
                    e -= p.j * prefactor * n(q, spin2) * (1.0 - n(m, spin2));
                }
            }
        }
    }
    Ok(e)
}
