//! Characteristic functionals `L(f) = E[exp(i⟨γ, f⟩)]` of random point
//! configurations in a box, the samplers that produce those configurations,
//! and a Monte Carlo estimator tying the two together.
//!
//! Every functional reduces to the single number `A = ∫(e^{if} − 1)dμ`:
//!
//! | measure | `L(f)` |
//! |---|---|
//! | Poisson | `exp(A)` |
//! | `N` points in volume `V` | `(1 + A/(ρV))^N` |
//! | compound, mixing law `ξ` | `∫ exp(ρA) dξ(ρ)` |
//! | fractional, order `α` | `E_α(A)` |
//!
//! The grand-canonical free gas on a circle is the exception: its functional
//! is a Fredholm-type determinant, see [`girard_functional`].
//!
//! [`ground_state_potential`] is unrelated to the rest: it turns a nodeless
//! ground state `e^{−W}` into the potential that has it as ground state.

mod characteristic;
mod domain;
mod girard;
mod ground_state;
mod mixing;
mod sampling;
mod test_function;

pub use characteristic::{
    char_compound, char_compound_quadrature, char_finite_nv, char_fractional, char_poisson, weights_fractional,
    MAX_FRACTIONAL_MASS,
};
pub use domain::{BoxDomain, IntensityMeasure, PointConfiguration, MAX_DIM};
pub use girard::{girard_functional, GirardParams, OccupationOrdering};
pub use ground_state::{
    ground_state_potential, residual_check, GroundStateField, PairPotential, Residual, TensorGrid, UniformAxis,
};
pub use mixing::{MixingMeasure, LOGNORMAL_NODES};
pub use sampling::{
    count_fit, mc_char, sample_counts, ConfigurationSampler, CountFit, FractionalSampler, McEstimate, PoissonSampler,
    MC_STREAMS,
};
pub use test_function::{Bump, Shape, TestFunction};
