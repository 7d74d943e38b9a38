use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{distance_to_cut, solve, ComplexMatrix, SpectralEnclosure};
use crate::scalar::Real;

const REFINE_TOL: f64 = 1e-9;
const MAX_NODES: usize = 4096;

/// Circle `|λ − center| = radius` sampled at `nodes` equispaced points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct ContourSpec<R: Real> {
    pub center: Complex<R>,
    pub radius: R,
    pub nodes: usize,
}

impl<R: Real> ContourSpec<R> {
    pub fn circle(center: Complex<R>, radius: R, nodes: usize) -> Self {
        Self { center, radius, nodes }
    }

    /// Radius, node count, and the closed disc must all be usable for the
    /// principal branch: the disc may not reach the ray `(−∞, 0]`.
    pub fn validate(&self) -> Result<()> {
        if !(self.radius > R::zero()) || !self.radius.is_finite() {
            return Err(Error::ContourInvalid(format!(
                "radius {} must be positive",
                self.radius
            )));
        }
        if self.nodes == 0 {
            return Err(Error::ContourInvalid("node count must be positive".into()));
        }
        if distance_to_cut(self.center) <= self.radius {
            return Err(Error::ContourInvalid(format!(
                "disc ({}, {}) reaches the branch cut",
                self.center, self.radius
            )));
        }
        Ok(())
    }

    /// Places a circle around the Gershgorin discs of `m`, balancing the
    /// gap to the spectrum against the gap to the branch cut.
    pub fn enclosing(m: &ComplexMatrix<R>, nodes: usize) -> Result<Self> {
        let mut best: Option<(R, Self)> = None;
        for enc in [SpectralEnclosure::rows(m), SpectralEnclosure::columns(m)] {
            for center in candidate_centers(&enc) {
                let reach = reach(&enc, center);
                let gap = distance_to_cut(center);
                if !(reach < gap) {
                    continue;
                }
                let inner = reach.max(gap * R::lit(1e-3));
                let radius = (inner * gap).sqrt();
                let ratio = (inner / radius).max(radius / gap);
                if best.as_ref().is_none_or(|(r, _)| ratio < *r) {
                    best = Some((ratio, Self::circle(center, radius, nodes)));
                }
            }
        }
        best.map(|(_, c)| c)
            .ok_or_else(|| Error::ContourInvalid("no circle separates the Gershgorin discs from the branch cut".into()))
    }

    fn encloses(&self, enc: &SpectralEnclosure<R>) -> bool {
        enc.discs
            .iter()
            .all(|d| (d.center - self.center).norm() + d.radius < self.radius)
    }
}

fn reach<R: Real>(enc: &SpectralEnclosure<R>, center: Complex<R>) -> R {
    enc.discs
        .iter()
        .map(|d| (d.center - center).norm() + d.radius)
        .fold(R::zero(), R::max)
}

/// Covering-disc center plus the best real center found by golden-section
/// search on `reach(x)/x` (quasi-convex in `x > 0`).
fn candidate_centers<R: Real>(enc: &SpectralEnclosure<R>) -> Vec<Complex<R>> {
    let mut out = vec![enc.center];
    let scale = enc
        .discs
        .iter()
        .map(|d| d.center.norm() + d.radius)
        .fold(R::zero(), R::max);
    if !(scale > R::zero()) {
        return out;
    }
    let ratio = |log_x: R| {
        let x = log_x.exp();
        reach(enc, Complex::new(x, R::zero())) / x
    };
    let (mut lo, mut hi) = ((scale * R::lit(1e-6)).ln(), (scale * R::lit(1e6)).ln());
    let golden = R::lit(0.618_033_988_749_894_8);
    for _ in 0..200 {
        let a = hi - golden * (hi - lo);
        let b = lo + golden * (hi - lo);
        if ratio(a) < ratio(b) {
            hi = b;
        } else {
            lo = a;
        }
    }
    let x = ((lo + hi) * R::lit(0.5)).exp();
    out.push(Complex::new(x, R::zero()));
    out
}

/// Principal logarithm from the resolvent integral
/// `(1/2πi) ∮ log(λ) (λI − M)⁻¹ dλ`, trapezoidal rule on the circle.
///
/// Nodes start at `contour.nodes` and double until successive results differ
/// by less than `1e-9` (relative, floored at 1), up to 4096 nodes.
pub fn logm_contour<R: Real>(m: &ComplexMatrix<R>, contour: &ContourSpec<R>) -> Result<ComplexMatrix<R>> {
    contour.validate()?;
    let rows = SpectralEnclosure::rows(m);
    let cols = SpectralEnclosure::columns(m);
    if !contour.encloses(&rows) && !contour.encloses(&cols) {
        return Err(Error::ContourInvalid(
            "Gershgorin discs are not strictly inside the contour".into(),
        ));
    }

    let mut nodes = contour.nodes;
    // nested trapezoid: keep the raw node sum and add only the new midpoints
    let mut sum = node_sum(m, contour, nodes, 0, 1)?;
    let mut estimate = sum.scale_real(R::one() / R::from_usize(nodes).unwrap());
    loop {
        if 2 * nodes > MAX_NODES {
            return Err(Error::NoConvergence {
                what: "contour quadrature",
                iterations: nodes,
            });
        }
        sum += &node_sum(m, contour, 2 * nodes, 1, 2)?;
        nodes *= 2;
        let next = sum.scale_real(R::one() / R::from_usize(nodes).unwrap());
        let change = next.dist_1(&estimate);
        estimate = next;
        if change < R::lit(REFINE_TOL) * estimate.norm_1().max(R::one()) {
            return estimate.finite_or("logm_contour");
        }
    }
}

/// Sum of `log(λ_k)(λ_k − c)(λ_k I − M)⁻¹` over nodes `k = first, first+stride, …`.
fn node_sum<R: Real>(
    m: &ComplexMatrix<R>,
    contour: &ContourSpec<R>,
    total: usize,
    first: usize,
    stride: usize,
) -> Result<ComplexMatrix<R>> {
    let n = m.dim();
    let identity = ComplexMatrix::identity(n);
    let neg_m = -m;
    let mut acc = ComplexMatrix::zeros(n);
    let two_pi = R::TAU();
    let total_r = R::from_usize(total).unwrap();
    for k in (first..total).step_by(stride) {
        let theta = two_pi * R::from_usize(k).unwrap() / total_r;
        let offset = Complex::from_polar(contour.radius, theta);
        let lambda = contour.center + offset;
        let resolvent = solve(&neg_m.shift(lambda), &identity)?;
        acc = acc.axpy(lambda.ln() * offset, &resolvent);
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matfun::{expm, logm_iss};
    use crate::sample::{random_matrix, seeded_rng};

    fn c(re: f64) -> Complex<f64> {
        Complex::new(re, 0.0)
    }

    #[test]
    fn identity_gives_zero() {
        let l = logm_contour(
            &ComplexMatrix::<f64>::identity(3),
            &ContourSpec::circle(c(1.0), 0.5, 64),
        )
        .unwrap();
        assert!(l.norm_1() < 1e-12);
    }

    #[test]
    fn diagonal_case() {
        let m = ComplexMatrix::<f64>::from_real_diag(&[2.0, 3.0]);
        let l = logm_contour(&m, &ContourSpec::circle(c(2.5), 1.2, 64)).unwrap();
        let want = ComplexMatrix::from_real_diag(&[2f64.ln(), 3f64.ln()]);
        assert!(l.dist_1(&want) < 1e-9);
    }

    #[test]
    fn agrees_with_inverse_scaling_and_squaring() {
        let mut rng = seeded_rng(31);
        for n in [2, 4, 8] {
            let m = expm(&random_matrix::<f64>(&mut rng, n, 0.5)).unwrap().shift(c(3.0));
            let contour = ContourSpec::enclosing(&m, 64).unwrap();
            let a = logm_contour(&m, &contour).unwrap();
            let b = logm_iss(&m).unwrap();
            assert!(a.dist_1(&b) <= 1e-8 * b.norm_1(), "n = {n}");
        }
    }

    #[test]
    fn contour_crossing_cut_rejected() {
        let m = ComplexMatrix::<f64>::identity(2);
        let bad = ContourSpec::circle(c(1.0), 1.5, 64);
        assert!(matches!(logm_contour(&m, &bad), Err(Error::ContourInvalid(_))));
    }

    #[test]
    fn spectrum_outside_rejected() {
        let m = ComplexMatrix::<f64>::from_real_diag(&[2.0, 8.0]);
        let small = ContourSpec::circle(c(2.0), 1.0, 64);
        assert!(matches!(logm_contour(&m, &small), Err(Error::ContourInvalid(_))));
    }

    #[test]
    fn enclosing_fails_for_cut_spectrum() {
        let m = ComplexMatrix::<f64>::from_real_diag(&[-1.0, 2.0]);
        assert!(ContourSpec::enclosing(&m, 64).is_err());
    }
}
