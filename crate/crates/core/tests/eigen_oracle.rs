//! Spectral checks against an independent eigenvalue oracle: the
//! characteristic polynomial by Faddeev–LeVerrier, its roots by
//! Durand–Kerner. Adequate for the small, well-separated spectra of
//! random matrices with n ≤ 8.

use opcalc::linalg::SpectralEnclosure;
use opcalc::matfun::{expm, logm_iss};
use opcalc::sample::{random_matrix, seeded_rng};
use opcalc::{CMatrix64, C64};

/// Monic characteristic polynomial coefficients `c[0..=n]`, `c[n] = 1`.
fn char_poly(a: &CMatrix64) -> Vec<C64> {
    let n = a.dim();
    let mut coeffs = vec![C64::new(0.0, 0.0); n + 1];
    coeffs[n] = C64::new(1.0, 0.0);
    let mut m = CMatrix64::zeros(n);
    for k in 1..=n {
        m = &a.matmul(&m) + &CMatrix64::from_diag_elem(n, coeffs[n - k + 1]);
        coeffs[n - k] = -a.matmul(&m).trace() / k as f64;
    }
    coeffs
}

fn eval(coeffs: &[C64], z: C64) -> C64 {
    coeffs.iter().rev().fold(C64::new(0.0, 0.0), |acc, &c| acc * z + c)
}

fn eigenvalues(a: &CMatrix64) -> Vec<C64> {
    let coeffs = char_poly(a);
    let n = a.dim();
    let radius = 1.0 + coeffs[..n].iter().map(|c| c.norm()).fold(0.0, f64::max);
    let mut roots: Vec<C64> = (0..n)
        .map(|k| C64::from_polar(radius, 0.4 + 2.0 * std::f64::consts::PI * k as f64 / n as f64))
        .collect();
    for _ in 0..2000 {
        let mut delta = 0.0f64;
        for i in 0..n {
            let denom = (0..n)
                .filter(|&j| j != i)
                .fold(C64::new(1.0, 0.0), |acc, j| acc * (roots[i] - roots[j]));
            let step = eval(&coeffs, roots[i]) / denom;
            roots[i] -= step;
            delta = delta.max(step.norm());
        }
        if delta < 1e-15 * radius {
            break;
        }
    }
    roots
}

#[test]
fn oracle_recovers_known_spectrum() {
    let a = CMatrix64::from_diag(&[C64::new(1.0, 0.0), C64::new(-2.0, 1.0), C64::new(0.5, -0.5)]);
    let mut eig = eigenvalues(&a);
    eig.sort_by(|x, y| x.re.partial_cmp(&y.re).unwrap());
    assert!((eig[0] - C64::new(-2.0, 1.0)).norm() < 1e-10);
    assert!((eig[2] - C64::new(1.0, 0.0)).norm() < 1e-10);
}

#[test]
fn eigenvalues_lie_in_gershgorin_discs() {
    let mut rng = seeded_rng(2001);
    for n in 2..=8 {
        for _ in 0..10 {
            let a = random_matrix::<f64>(&mut rng, n, 3.0);
            let rows = SpectralEnclosure::rows(&a);
            let cols = SpectralEnclosure::columns(&a);
            for lambda in eigenvalues(&a) {
                assert!(rows.union_contains(lambda, 1e-8), "n={n}: {lambda} outside row discs");
                assert!(
                    cols.union_contains(lambda, 1e-8),
                    "n={n}: {lambda} outside column discs"
                );
                assert!(rows.covering_disc().contains(lambda) || (lambda - rows.center).norm() <= rows.radius + 1e-8);
            }
        }
    }
}

#[test]
fn exponential_maps_spectrum() {
    let mut rng = seeded_rng(2002);
    for n in [2, 3, 5] {
        let a = random_matrix::<f64>(&mut rng, n, 1.5);
        let exp_eigs = eigenvalues(&expm(&a).unwrap());
        for lambda in eigenvalues(&a) {
            let target = lambda.exp();
            let nearest = exp_eigs
                .iter()
                .map(|mu| (mu - target).norm())
                .fold(f64::INFINITY, f64::min);
            assert!(nearest < 1e-8, "n={n}: e^{lambda} missing");
        }
    }
}

#[test]
fn logarithm_is_principal() {
    let mut rng = seeded_rng(2003);
    for n in [2, 4, 6] {
        // exponents with imaginary spectrum up to ~2.5 in modulus
        let a = random_matrix::<f64>(&mut rng, n, 2.5);
        let m = expm(&a).unwrap();
        let l = match logm_iss(&m) {
            Ok(l) => l,
            Err(_) => continue,
        };
        for mu in eigenvalues(&l) {
            assert!(mu.im > -std::f64::consts::PI && mu.im <= std::f64::consts::PI, "{mu}");
        }
        assert!(expm(&l).unwrap().dist_1(&m) < 1e-9 * m.norm_1());
    }
}
