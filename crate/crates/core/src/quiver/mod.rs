//! Hole-pairing lattice model on a square lattice.
//!
//! Two layers:
//!
//! * exact fermion operators on lattices of up to 6 sites ([`FermionOps`]),
//!   with densities, currents and hop maps and exhaustive checks of their
//!   commutator and composition identities;
//! * a diagonal energy on site occupations ([`energy`], [`QuiverModel`]),
//!   searched exactly by enumeration or approximately by annealing, with
//!   hole-cluster diagnostics.

mod algebra;
mod diagnostics;
mod energy;
mod fock;
mod lattice;
mod search;
mod vertex;

pub use algebra::{
    check_car, check_commutators, check_composition, current_ops, CompositionReport, CurrentOps, ResidualReport,
};
pub use diagnostics::{energy_estimates, pairing_diagnostics, pairing_report, EnergyEstimates, PairingReport};
pub use energy::{
    energy, energy_term_by_term, BondConvention, EnergyCounts, Occupation, QuiverModel, QuiverParams, SiteState,
};
pub use fock::{FermionOps, FockOperator, Spin, MAX_FOCK_SITES};
pub use lattice::{Boundary, Lattice, NnnRule};
pub use search::{
    anneal_seeds, ground_search_anneal, ground_search_exact, AnnealResult, AnnealSchedule, ExactGround,
    MAX_EXACT_STATES,
};
pub use vertex::{matmul, support, vertex_matrices, VertexMatrices, VertexMatrix};
