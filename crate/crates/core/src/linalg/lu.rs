use num_complex::Complex;
use num_traits::Zero;

use super::ComplexMatrix;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Relative pivot threshold: a pivot below `PIVOT_TOL·‖A‖₁` is singular.
const PIVOT_TOL: f64 = 1e-14;

/// LU factorization with partial pivoting, `PA = LU` packed in one matrix.
#[derive(Debug, Clone)]
pub struct Lu<R: Real> {
    lu: ComplexMatrix<R>,
    perm: Vec<usize>,
}

impl<R: Real> Lu<R> {
    pub fn factor(a: &ComplexMatrix<R>) -> Result<Self> {
        let n = a.dim();
        let threshold = R::lit(PIVOT_TOL) * a.norm_1();
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();

        for k in 0..n {
            let (p, pivot_abs) = (k..n)
                .map(|i| (i, lu[(i, k)].norm()))
                .fold(
                    (k, R::neg_infinity()),
                    |best, cur| if cur.1 > best.1 { cur } else { best },
                );
            if !(pivot_abs > threshold) || pivot_abs.is_zero() {
                return Err(Error::SingularMatrix {
                    pivot: pivot_abs.as_f64(),
                    threshold: threshold.as_f64(),
                });
            }
            if p != k {
                perm.swap(p, k);
                for j in 0..n {
                    let tmp = lu[(k, j)];
                    lu[(k, j)] = lu[(p, j)];
                    lu[(p, j)] = tmp;
                }
            }
            let pivot = lu[(k, k)];
            for i in k + 1..n {
                let factor = lu[(i, k)] / pivot;
                lu[(i, k)] = factor;
                if factor.is_zero() {
                    continue;
                }
                for j in k + 1..n {
                    let u = lu[(k, j)];
                    lu[(i, j)] = lu[(i, j)] - factor * u;
                }
            }
        }
        Ok(Self { lu, perm })
    }

    pub fn solve(&self, b: &ComplexMatrix<R>) -> Result<ComplexMatrix<R>> {
        self.lu.check_same_dim(b)?;
        let n = self.lu.dim();
        let mut x = ComplexMatrix::zeros(n);
        let mut col = vec![Complex::<R>::zero(); n];
        for c in 0..n {
            for i in 0..n {
                col[i] = b[(self.perm[i], c)];
            }
            // forward substitution with unit-diagonal L
            for i in 0..n {
                let acc = (0..i).fold(col[i], |acc, k| acc - self.lu[(i, k)] * col[k]);
                col[i] = acc;
            }
            for i in (0..n).rev() {
                let acc = (i + 1..n).fold(col[i], |acc, k| acc - self.lu[(i, k)] * col[k]);
                col[i] = acc / self.lu[(i, i)];
            }
            for i in 0..n {
                x[(i, c)] = col[i];
            }
        }
        x.finite_or("lu solve")
    }
}

/// Solves `A X = B` by LU with partial pivoting.
pub fn solve<R: Real>(a: &ComplexMatrix<R>, b: &ComplexMatrix<R>) -> Result<ComplexMatrix<R>> {
    a.check_same_dim(b)?;
    Lu::factor(a)?.solve(b)
}

pub fn inverse<R: Real>(a: &ComplexMatrix<R>) -> Result<ComplexMatrix<R>> {
    solve(a, &ComplexMatrix::identity(a.dim()))
}
