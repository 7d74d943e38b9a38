//! Two-parameter evolution operators `U(t,s)` for `∂_t U = A(t) U`,
//! `U(s,s) = I`, and checks of the semigroup law and growth bounds.

mod generator;
mod propagate;

pub use generator::{GeneratorKind, GeneratorSpec, Profile, TableSample};
pub use propagate::{
    check_growth_bound, check_semigroup, propagate, EvolutionOperator, GrowthBound, PropagationConfig, Stepper,
};
