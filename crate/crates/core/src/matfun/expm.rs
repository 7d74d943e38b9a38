use num_complex::Complex;

use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::scalar::Real;

/// Inputs with `‖A‖₁` above this are rejected instead of squared into garbage.
pub const EXPM_NORM_LIMIT: f64 = 1e4;

const SCALED_NORM: f64 = 0.5;
const TERM_TOL: f64 = 1e-16;
const MAX_TERMS: usize = 60;

/// Matrix exponential by scaling and squaring with a truncated Taylor series.
///
/// The input is scaled by `2^-s` until `‖A/2^s‖₁ ≤ 0.5`, the series is summed
/// until a term drops below `1e-16` of the partial sum, and the result is
/// squared `s` times.
pub fn expm<R: Real>(a: &ComplexMatrix<R>) -> Result<ComplexMatrix<R>> {
    let norm = a.norm_1();
    if !norm.is_finite() {
        return Err(Error::NonFinite("expm input"));
    }
    if norm > R::lit(EXPM_NORM_LIMIT) {
        return Err(Error::Overflow {
            norm: norm.as_f64(),
            limit: EXPM_NORM_LIMIT,
        });
    }

    let mut squarings = 0u32;
    let mut scaled_norm = norm;
    while scaled_norm > R::lit(SCALED_NORM) {
        scaled_norm = scaled_norm / R::lit(2.0);
        squarings += 1;
    }
    let scaled = a.scale_real(R::lit(0.5f64.powi(squarings as i32)));

    let n = a.dim();
    let mut sum = ComplexMatrix::identity(n);
    let mut term = ComplexMatrix::identity(n);
    for k in 1..=MAX_TERMS {
        term = term
            .matmul(&scaled)
            .scale(Complex::new(R::one() / R::from_usize(k).unwrap(), R::zero()));
        sum += &term;
        if term.norm_1() <= R::lit(TERM_TOL) * sum.norm_1() {
            break;
        }
    }

    for _ in 0..squarings {
        sum = sum.matmul(&sum);
    }
    sum.finite_or("expm")
}
