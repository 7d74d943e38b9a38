//! Dense complex matrices, LU solves, norms, and Gershgorin enclosures.

mod lu;
mod matrix;
mod spectral;

pub use lu::{inverse, solve, Lu};
pub use matrix::ComplexMatrix;
pub use spectral::{distance_to_cut, spectral_enclosure, Disc, SpectralEnclosure};
pub(crate) use spectral::{gershgorin_clears_cut, gershgorin_in_sector};

use crate::scalar::Real;

/// Induced 1-norm (maximum absolute column sum).
pub fn norm_1<R: Real>(a: &ComplexMatrix<R>) -> R {
    a.norm_1()
}
