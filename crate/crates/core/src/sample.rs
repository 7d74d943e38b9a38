//! Seeded random test matrices. All randomness in the crate flows through
//! `ChaCha8Rng` so that a campaign seed fixes every sample on every platform.

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::ComplexMatrix;
use crate::scalar::Real;

pub type SampleRng = ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> SampleRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Complex Gaussian matrix rescaled to `‖A‖₁ = norm`.
pub fn random_matrix<R: Real>(rng: &mut SampleRng, n: usize, norm: f64) -> ComplexMatrix<R> {
    let raw = ComplexMatrix::<f64>::from_fn(n, |_, _| {
        Complex::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    rescale(raw, norm).cast()
}

/// Real Gaussian matrix rescaled to `‖A‖₁ = norm`.
pub fn random_real_matrix<R: Real>(rng: &mut SampleRng, n: usize, norm: f64) -> ComplexMatrix<R> {
    let raw = ComplexMatrix::<f64>::from_fn(n, |_, _| Complex::new(rng.sample(StandardNormal), 0.0));
    rescale(raw, norm).cast()
}

/// Hermitian matrix `(G + G^H)/2` rescaled to `‖H‖₁ = norm`.
pub fn random_hermitian<R: Real>(rng: &mut SampleRng, n: usize, norm: f64) -> ComplexMatrix<R> {
    let g = random_matrix::<f64>(rng, n, 1.0);
    let h = (&g + &g.adjoint()).scale_real(0.5);
    rescale(h, norm).cast()
}

/// Uniform draw from `[lo, hi)`.
pub fn uniform(rng: &mut SampleRng, lo: f64, hi: f64) -> f64 {
    rng.random_range(lo..hi)
}

fn rescale(m: ComplexMatrix<f64>, norm: f64) -> ComplexMatrix<f64> {
    let current = m.norm_1();
    if current == 0.0 {
        m
    } else {
        m.scale_real(norm / current)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_matrix() {
        let a = random_matrix::<f64>(&mut seeded_rng(3), 4, 0.7);
        let b = random_matrix::<f64>(&mut seeded_rng(3), 4, 0.7);
        assert_eq!(a, b);
        assert!((a.norm_1() - 0.7).abs() < 1e-14);
    }

    #[test]
    fn hermitian_is_hermitian() {
        let h = random_hermitian::<f64>(&mut seeded_rng(5), 6, 2.0);
        assert!(h.dist_1(&h.adjoint()) < 1e-15);
    }
}
