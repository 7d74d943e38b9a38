//! Numerical operator calculus for evolution operators.
//!
//! The crate builds two-parameter evolution operators `U(t,s)` from
//! time-dependent generators, regularizes them with a scalar shift `κ`
//! into bounded logarithms `a(t,s) = Log(U(t,s) + κI)`, and checks
//! Baker–Campbell–Hausdorff style identities and the log/commutator form
//! of the von Neumann equation on dense complex matrices.
//!
//! Everything is generic over the real type (`f32` or `f64`); the aliases
//! at the crate root pin the common `f64` instantiation.

// Negated comparisons are deliberate throughout: `!(x > 0)` also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bch;
pub mod error;
pub mod evolution;
pub mod lab;
pub mod linalg;
pub mod logrep;
pub mod matfun;
pub mod numfmt;
pub mod sample;
pub mod scalar;

pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, Disc, SpectralEnclosure};
pub use scalar::{Real, Scalar};

pub use num_complex::Complex;

pub type C64 = num_complex::Complex<f64>;
pub type C32 = num_complex::Complex<f32>;
pub type CMatrix64 = ComplexMatrix<f64>;
pub type CMatrix32 = ComplexMatrix<f32>;
pub type Generator64 = evolution::GeneratorSpec<f64>;
pub type Evolution64 = evolution::EvolutionOperator<f64>;
pub type LogRepresentation64 = logrep::LogRepresentation<f64>;
