use num_complex::Complex;
use serde::Serialize;

use super::ComplexMatrix;
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Disc<R: Real> {
    pub center: Complex<R>,
    pub radius: R,
}

impl<R: Real> Disc<R> {
    pub fn contains_disc(&self, other: &Disc<R>, slack: R) -> bool {
        (other.center - self.center).norm() + other.radius <= self.radius + slack
    }

    pub fn contains(&self, z: Complex<R>) -> bool {
        (z - self.center).norm() <= self.radius
    }

    /// Whether the closed disc lies in the open sector `|arg z| < half_angle`.
    pub fn in_sector(&self, half_angle: R) -> bool {
        let m = self.center.norm();
        self.radius < m && self.center.arg().abs() + (self.radius / m).asin() < half_angle
    }

    /// Distance from the disc boundary to the ray `(−∞, 0]`; negative when they meet.
    pub fn clearance_from_cut(&self) -> R {
        distance_to_cut(self.center) - self.radius
    }
}

/// Euclidean distance from `z` to the closed ray `(−∞, 0]`.
pub fn distance_to_cut<R: Real>(z: Complex<R>) -> R {
    if z.re <= R::zero() {
        z.im.abs()
    } else {
        z.norm()
    }
}

/// Gershgorin discs of a matrix plus one disc covering all of them.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralEnclosure<R: Real> {
    pub center: Complex<R>,
    pub radius: R,
    pub discs: Vec<Disc<R>>,
}

impl<R: Real> SpectralEnclosure<R> {
    /// Row discs: centers `a_ii`, radii `Σ_{j≠i} |a_ij|`.
    pub fn rows(a: &ComplexMatrix<R>) -> Self {
        let n = a.dim();
        let discs = (0..n)
            .map(|i| Disc {
                center: a[(i, i)],
                radius: (0..n).filter(|&j| j != i).map(|j| a[(i, j)].norm()).sum(),
            })
            .collect();
        Self::covering(discs)
    }

    /// Column discs: the row discs of the transpose.
    pub fn columns(a: &ComplexMatrix<R>) -> Self {
        Self::rows(&a.transpose())
    }

    fn covering(discs: Vec<Disc<R>>) -> Self {
        let count = R::from_usize(discs.len().max(1)).unwrap();
        let center = discs.iter().map(|d| d.center).sum::<Complex<R>>() / count;
        let radius = discs
            .iter()
            .map(|d| (d.center - center).norm() + d.radius)
            .fold(R::zero(), R::max);
        Self { center, radius, discs }
    }

    pub fn covering_disc(&self) -> Disc<R> {
        Disc {
            center: self.center,
            radius: self.radius,
        }
    }

    /// Smallest distance between any disc and the branch cut `(−∞, 0]`.
    pub fn clearance_from_cut(&self) -> R {
        self.discs
            .iter()
            .map(Disc::clearance_from_cut)
            .fold(R::infinity(), R::min)
    }

    pub fn clears_branch_cut(&self) -> bool {
        self.clearance_from_cut() > R::zero()
    }

    pub fn in_open_right_half_plane(&self) -> bool {
        self.discs.iter().all(|d| d.center.re > d.radius)
    }

    pub fn in_sector(&self, half_angle: R) -> bool {
        self.discs.iter().all(|d| d.in_sector(half_angle))
    }

    pub fn union_contains(&self, z: Complex<R>, slack: R) -> bool {
        self.discs.iter().any(|d| (z - d.center).norm() <= d.radius + slack)
    }
}

pub fn spectral_enclosure<R: Real>(a: &ComplexMatrix<R>) -> SpectralEnclosure<R> {
    SpectralEnclosure::rows(a)
}

/// True when row or column Gershgorin discs avoid `(−∞, 0]`, which
/// certifies that the principal logarithm and square root exist.
pub(crate) fn gershgorin_clears_cut<R: Real>(a: &ComplexMatrix<R>) -> bool {
    SpectralEnclosure::rows(a).clears_branch_cut() || SpectralEnclosure::columns(a).clears_branch_cut()
}

/// True when row or column Gershgorin discs lie in `|arg z| < half_angle`.
pub(crate) fn gershgorin_in_sector<R: Real>(a: &ComplexMatrix<R>, half_angle: R) -> bool {
    SpectralEnclosure::rows(a).in_sector(half_angle) || SpectralEnclosure::columns(a).in_sector(half_angle)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_matrix_discs() {
        let e = spectral_enclosure(&ComplexMatrix::<f64>::from_real_diag(&[1.0, 5.0]));
        assert_eq!(e.discs.len(), 2);
        assert_eq!(e.discs[0].center, Complex::new(1.0, 0.0));
        assert_eq!(e.discs[0].radius, 0.0);
        assert_eq!(e.discs[1].center, Complex::new(5.0, 0.0));
        assert_eq!(e.discs[1].radius, 0.0);
    }

    #[test]
    fn swap_matrix_discs() {
        let a = ComplexMatrix::<f64>::from_real(2, &[0.0, 1.0, 1.0, 0.0]).unwrap();
        let e = spectral_enclosure(&a);
        for d in &e.discs {
            assert_eq!(d.center, Complex::new(0.0, 0.0));
            assert_eq!(d.radius, 1.0);
        }
        assert_eq!(e.center, Complex::new(0.0, 0.0));
        assert_eq!(e.radius, 1.0);
        assert!(!e.clears_branch_cut());
    }

    #[test]
    fn covering_disc_contains_every_disc() {
        let a = ComplexMatrix::<f64>::from_real(3, &[4.0, 1.0, 0.0, 0.5, -2.0, 0.5, 0.0, 0.0, 9.0]).unwrap();
        let e = spectral_enclosure(&a);
        for d in &e.discs {
            assert!(e.covering_disc().contains_disc(d, 1e-12));
        }
    }

    #[test]
    fn cut_distance() {
        assert_eq!(distance_to_cut(Complex::new(-3.0, 2.0)), 2.0);
        assert_eq!(distance_to_cut(Complex::new(3.0, 4.0)), 5.0);
        let shifted = ComplexMatrix::<f64>::from_real(2, &[0.0, 1.0, 1.0, 0.0])
            .unwrap()
            .shift(Complex::new(2.5, 0.0));
        assert!(gershgorin_clears_cut(&shifted));
        // discs |z − 2.5| ≤ 1 subtend asin(0.4) ≈ 0.41 rad
        assert!(gershgorin_in_sector(&shifted, 0.42));
        assert!(!gershgorin_in_sector(&shifted, 0.40));
    }
}
