//! Commutator calculus and BCH-type identities.

mod series;
mod vonneumann;

pub use series::{
    bch_truncated, regularized_bch_compare, regularized_bch_corrected, regularized_bch_residual, smallness_condition,
    BchTerm, BchTruncation, RegularizedBchComparison, SmallnessReport, Word,
};
pub use vonneumann::{
    evolve_density, generalized_bch_expand, generalized_bch_for_generators, von_neumann_rhs,
    von_neumann_second_derivative, ExpansionMode, GeneralizedBchReport, VnPoint, VnReport, VonNeumannConfig,
};

use crate::error::Result;
use crate::linalg::ComplexMatrix;
use crate::matfun::{expm, logm_iss};
use crate::scalar::Real;

/// `[A, B] = AB − BA`.
pub fn commutator<R: Real>(a: &ComplexMatrix<R>, b: &ComplexMatrix<R>) -> Result<ComplexMatrix<R>> {
    a.check_same_dim(b)?;
    Ok(&a.matmul(b) - &b.matmul(a))
}

/// `Σ_{k=0}^{N} ad_{a₁}^k(a₂)/k!`, the truncated series of `e^{a₁} a₂ e^{−a₁}`.
pub fn adjoint_series<R: Real>(a1: &ComplexMatrix<R>, a2: &ComplexMatrix<R>, terms: usize) -> Result<ComplexMatrix<R>> {
    a1.check_same_dim(a2)?;
    let mut term = a2.clone();
    let mut sum = a2.clone();
    for k in 1..=terms {
        term = commutator(a1, &term)?.scale_real(R::from_usize(k).unwrap().recip());
        sum += &term;
    }
    Ok(sum)
}

/// `Log(e^X e^Y)` by direct evaluation; the reference for every truncation.
pub fn log_product<R: Real>(x: &ComplexMatrix<R>, y: &ComplexMatrix<R>) -> Result<ComplexMatrix<R>> {
    x.check_same_dim(y)?;
    logm_iss(&expm(x)?.matmul(&expm(y)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sample::{random_matrix, seeded_rng};
    use num_complex::Complex;

    fn m(rows: &[&[(f64, f64)]]) -> ComplexMatrix<f64> {
        ComplexMatrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&(re, im)| Complex::new(re, im)).collect())
                .collect(),
        )
        .unwrap()
    }

    fn elementary(n: usize, i: usize, j: usize) -> ComplexMatrix<f64> {
        ComplexMatrix::from_fn(n, |r, c| {
            if (r, c) == (i, j) {
                Complex::new(1.0, 0.0)
            } else {
                Complex::default()
            }
        })
    }

    #[test]
    fn pauli_commutator() {
        let sx = m(&[&[(0.0, 0.0), (1.0, 0.0)], &[(1.0, 0.0), (0.0, 0.0)]]);
        let sy = m(&[&[(0.0, 0.0), (0.0, -1.0)], &[(0.0, 1.0), (0.0, 0.0)]]);
        let want = m(&[&[(0.0, 2.0), (0.0, 0.0)], &[(0.0, 0.0), (0.0, -2.0)]]);
        assert_eq!(commutator(&sx, &sy).unwrap(), want);
        assert_eq!(commutator(&sx, &sx).unwrap(), ComplexMatrix::zeros(2));
        let d1 = ComplexMatrix::from_real_diag(&[1.0, 2.0]);
        let d2 = ComplexMatrix::from_real_diag(&[3.0, 4.0]);
        assert_eq!(commutator(&d1, &d2).unwrap(), ComplexMatrix::zeros(2));
        assert!(commutator(&d1, &ComplexMatrix::zeros(3)).is_err());
    }

    #[test]
    fn adjoint_series_trivial_cases() {
        let a2 = random_matrix::<f64>(&mut seeded_rng(70), 3, 1.0);
        for n in [0, 3, 12] {
            assert_eq!(adjoint_series(&ComplexMatrix::zeros(3), &a2, n).unwrap(), a2);
        }
        let d1 = ComplexMatrix::from_real_diag(&[0.3, -0.2]);
        let d2 = ComplexMatrix::from_real_diag(&[1.0, 5.0]);
        assert_eq!(adjoint_series(&d1, &d2, 7).unwrap(), d2);
    }

    #[test]
    fn adjoint_series_converges_to_conjugation() {
        let mut rng = seeded_rng(71);
        let a1 = random_matrix::<f64>(&mut rng, 2, 0.5);
        let a2 = random_matrix::<f64>(&mut rng, 2, 1.0);
        let oracle = expm(&a1).unwrap().matmul(&a2).matmul(&expm(&-&a1).unwrap());
        let residuals: Vec<f64> = (0..=12)
            .map(|n| adjoint_series(&a1, &a2, n).unwrap().dist_1(&oracle))
            .collect();
        assert!(residuals.windows(2).all(|w| w[1] <= w[0]));
        assert!(residuals[12] <= 1e-8);
    }

    #[test]
    fn log_product_cases() {
        let x = random_matrix::<f64>(&mut seeded_rng(72), 4, 0.8);
        assert!(log_product(&x, &ComplexMatrix::zeros(4)).unwrap().dist_1(&x) < 1e-12);

        let d1 = ComplexMatrix::from_real_diag(&[0.3, -0.2, 1.0]);
        let d2 = ComplexMatrix::from_real_diag(&[0.1, 0.4, -0.7]);
        assert!(log_product(&d1, &d2).unwrap().dist_1(&(&d1 + &d2)) < 1e-13);

        let x = elementary(3, 0, 1);
        let y = elementary(3, 1, 2);
        let want = &(&x + &y) + &elementary(3, 0, 2).scale_real(0.5);
        assert!(log_product(&x, &y).unwrap().dist_1(&want) < 1e-13);
    }
}
