use crate::error::{Error, Result};
use crate::linalg::{gershgorin_clears_cut, gershgorin_in_sector, inverse, ComplexMatrix};
use crate::scalar::Real;

const DB_TOL: f64 = 1e-13;
const DB_MAX_ITER: usize = 60;
const MAX_CERTIFYING_ROOTS: u32 = 6;

/// Principal square root by the Denman–Beavers iteration.
///
/// Admissibility is established either up front (Gershgorin discs of `M`
/// avoid `(−∞, 0]`) or after the fact by [`certified_roots`].
pub fn sqrtm_db<R: Real>(m: &ComplexMatrix<R>) -> Result<ComplexMatrix<R>> {
    if gershgorin_clears_cut(m) {
        return denman_beavers(m);
    }
    let (mut y, k) = certified_roots(m)?;
    for _ in 1..k {
        y = y.matmul(&y);
    }
    Ok(y)
}

/// Repeated roots `Z_k` with `Z_k^{2^k} = M`, stopping at the first `k`
/// whose Gershgorin discs fit in the sector `|arg z| < π/2^k`.
///
/// Such a `Z_k` is the principal `2^k`-th root, so `M` has no eigenvalue
/// on `(−∞, 0]`. The sector test sharpens with `k`, which lets spectra
/// that Gershgorin cannot separate from the cut at `k = 0` be certified.
pub(crate) fn certified_roots<R: Real>(m: &ComplexMatrix<R>) -> Result<(ComplexMatrix<R>, u32)> {
    let mut z = m.clone();
    for k in 1..=MAX_CERTIFYING_ROOTS {
        z = denman_beavers(&z).map_err(|e| {
            Error::BranchCutViolation(format!(
                "no certifying root sequence ({e}); spectrum may meet (-inf, 0]"
            ))
        })?;
        if gershgorin_in_sector(&z, R::PI() / R::lit(2f64.powi(k as i32))) {
            return Ok((z, k));
        }
    }
    Err(Error::BranchCutViolation(
        "spectral enclosure of the argument meets (-inf, 0]".into(),
    ))
}

/// Unchecked Denman–Beavers iteration `Y ← (Y + Z⁻¹)/2`, `Z ← (Z + Y⁻¹)/2`.
pub(crate) fn denman_beavers<R: Real>(m: &ComplexMatrix<R>) -> Result<ComplexMatrix<R>> {
    let half = R::lit(0.5);
    let tol = R::tol(DB_TOL);
    let mut y = m.clone();
    let mut z = ComplexMatrix::identity(m.dim());
    for _ in 0..DB_MAX_ITER {
        let y_inv = inverse(&y)?;
        let z_inv = inverse(&z)?;
        let y_next = (&y + &z_inv).scale_real(half);
        z = (&z + &y_inv).scale_real(half);
        let step = y_next.dist_1(&y);
        let scale = y.norm_1();
        y = y_next.finite_or("sqrtm_db")?;
        if step <= tol * scale {
            return Ok(y);
        }
    }
    Err(Error::NoConvergence {
        what: "Denman-Beavers square root",
        iterations: DB_MAX_ITER,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matfun::expm;
    use crate::sample::{random_matrix, seeded_rng};

    #[test]
    fn identity_root() {
        let y = sqrtm_db(&ComplexMatrix::<f64>::identity(4)).unwrap();
        assert!(y.dist_1(&ComplexMatrix::identity(4)) < 1e-15);
    }

    #[test]
    fn diagonal_root() {
        let y = sqrtm_db(&ComplexMatrix::<f64>::from_real_diag(&[4.0, 9.0])).unwrap();
        assert!(y.dist_1(&ComplexMatrix::from_real_diag(&[2.0, 3.0])) < 1e-14);
    }

    #[test]
    fn squaring_round_trip() {
        let mut rng = seeded_rng(11);
        for n in [2, 4, 8] {
            let m = expm(&random_matrix::<f64>(&mut rng, n, 1.0)).unwrap();
            let y = sqrtm_db(&m).unwrap();
            assert!((&y * &y).dist_1(&m) <= 1e-12 * m.norm_1());
        }
    }

    #[test]
    fn negative_eigenvalue_rejected() {
        let m = ComplexMatrix::<f64>::from_real_diag(&[-1.0, 2.0]);
        assert!(matches!(sqrtm_db(&m), Err(Error::BranchCutViolation(_))));
    }
}
