use crate::error::{Error, Result};
use crate::linalg::{gershgorin_clears_cut, solve, ComplexMatrix};
use crate::scalar::Real;

use super::{certified_roots, denman_beavers};

/// Square roots stop once `‖Z − I‖₁` is at most this.
const ROOT_TARGET: f64 = 0.25;
const MAX_ROOTS: u32 = 64;
const SERIES_TOL: f64 = 1e-16;
const MAX_SERIES_TERMS: usize = 200;

/// Whether the principal logarithm of `m` is certified to exist by
/// Gershgorin discs (rows or columns).
pub fn log_admissible<R: Real>(m: &ComplexMatrix<R>) -> bool {
    gershgorin_clears_cut(m)
}

/// Principal matrix logarithm by inverse scaling and squaring.
///
/// Takes `k` Denman–Beavers square roots until `‖M^{1/2^k} − I‖₁ ≤ 1/4`,
/// sums the Gregory series `2·atanh((Z − I)(Z + I)⁻¹)`, and rescales by `2^k`.
/// When the Gershgorin discs of `M` touch the cut, the early roots double
/// as an admissibility certificate (see `certified_roots`).
pub fn logm_iss<R: Real>(m: &ComplexMatrix<R>) -> Result<ComplexMatrix<R>> {
    let n = m.dim();
    let identity = ComplexMatrix::identity(n);
    let mut z = m.clone();
    let mut roots = 0u32;

    if !gershgorin_clears_cut(m) {
        (z, roots) = certified_roots(m)?;
    }

    while z.dist_1(&identity) > R::lit(ROOT_TARGET) {
        if roots >= MAX_ROOTS {
            return Err(Error::NoConvergence {
                what: "inverse scaling and squaring",
                iterations: roots as usize,
            });
        }
        z = denman_beavers(&z)?;
        roots += 1;
    }

    let log_z = log_near_identity(&z)?;
    log_z.scale_real(R::lit(2f64.powi(roots as i32))).finite_or("logm_iss")
}

/// `log Z = 2 Σ W^{2j+1}/(2j+1)` with `W = (Z + I)⁻¹(Z − I)`, for `Z` near `I`.
fn log_near_identity<R: Real>(z: &ComplexMatrix<R>) -> Result<ComplexMatrix<R>> {
    let n = z.dim();
    let one = num_complex::Complex::new(R::one(), R::zero());
    let w = solve(&z.shift(one), &z.shift(-one))?;
    let w2 = w.matmul(&w);
    let mut power = w.clone();
    let mut sum = w;
    let tol = R::lit(SERIES_TOL);
    let mut converged = false;
    for j in 1..MAX_SERIES_TERMS {
        power = power.matmul(&w2);
        let term = power.scale_real(R::one() / R::from_usize(2 * j + 1).unwrap());
        sum += &term;
        if term.norm_1() <= tol * sum.norm_1() {
            converged = true;
            break;
        }
    }
    if !converged && n > 0 && sum.norm_1() > R::zero() {
        return Err(Error::NoConvergence {
            what: "logarithm series",
            iterations: MAX_SERIES_TERMS,
        });
    }
    Ok(sum.scale_real(R::lit(2.0)))
}
