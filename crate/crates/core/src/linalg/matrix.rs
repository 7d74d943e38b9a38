use std::fmt;
use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub, SubAssign};

use num_complex::Complex;
use num_traits::Zero;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::scalar::{real, Real};

/// Dense square matrix with complex entries, stored row-major.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix<R: Real> {
    n: usize,
    data: Vec<Complex<R>>,
}

impl<R: Real> ComplexMatrix<R> {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![Complex::zero(); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_diag_elem(n, Complex::new(R::one(), R::zero()))
    }

    pub fn from_diag_elem(n: usize, value: Complex<R>) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = value;
        }
        m
    }

    pub fn from_diag(diag: &[Complex<R>]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    pub fn from_real_diag(diag: &[R]) -> Self {
        let d: Vec<_> = diag.iter().map(|&x| real(x)).collect();
        Self::from_diag(&d)
    }

    /// Builds a matrix from row-major complex entries; `data.len()` must be `n*n`.
    pub fn from_vec(n: usize, data: Vec<Complex<R>>) -> Result<Self> {
        if n == 0 || data.len() != n * n {
            return Err(Error::NotSquare {
                rows: n,
                cols: data.len().checked_div(n).unwrap_or(0),
            });
        }
        Ok(Self { n, data })
    }

    pub fn from_rows(rows: Vec<Vec<Complex<R>>>) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(Error::NotSquare {
                    rows: n,
                    cols: row.len(),
                });
            }
            data.extend(row);
        }
        Self::from_vec(n, data)
    }

    /// Real row-major entries, converted from `f64`.
    pub fn from_real(n: usize, entries: &[f64]) -> Result<Self> {
        Self::from_vec(n, entries.iter().map(|&x| real(R::lit(x))).collect())
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Complex<R>) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Self { n, data }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn as_slice(&self) -> &[Complex<R>] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[Complex<R>] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Returns `self` if every entry is finite, otherwise `NonFinite(op)`.
    pub fn finite_or(self, op: &'static str) -> Result<Self> {
        if self.is_finite() {
            Ok(self)
        } else {
            Err(Error::NonFinite(op))
        }
    }

    pub fn norm_1(&self) -> R {
        (0..self.n)
            .map(|j| (0..self.n).map(|i| self[(i, j)].norm()).sum::<R>())
            .fold(R::zero(), R::max)
    }

    pub fn norm_inf(&self) -> R {
        (0..self.n)
            .map(|i| self.row(i).iter().map(|z| z.norm()).sum::<R>())
            .fold(R::zero(), R::max)
    }

    pub fn norm_fro(&self) -> R {
        self.data.iter().map(|z| z.norm_sqr()).sum::<R>().sqrt()
    }

    /// `‖self − other‖₁`.
    pub fn dist_1(&self, other: &Self) -> R {
        (self - other).norm_1()
    }

    pub fn trace(&self) -> Complex<R> {
        (0..self.n).map(|i| self[(i, i)]).sum()
    }

    pub fn diag(&self) -> Vec<Complex<R>> {
        (0..self.n).map(|i| self[(i, i)]).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.n, |i, j| self[(j, i)])
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.n, |i, j| self[(j, i)].conj())
    }

    pub fn scale(&self, c: Complex<R>) -> Self {
        self.map(|z| z * c)
    }

    pub fn scale_real(&self, x: R) -> Self {
        self.map(|z| z * x)
    }

    /// `self + c·I`.
    pub fn shift(&self, c: Complex<R>) -> Self {
        let mut m = self.clone();
        for i in 0..self.n {
            m[(i, i)] = m[(i, i)] + c;
        }
        m
    }

    pub fn map(&self, f: impl Fn(Complex<R>) -> Complex<R>) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().map(|&z| f(z)).collect(),
        }
    }

    /// `self + c·other`.
    pub fn axpy(&self, c: Complex<R>, other: &Self) -> Self {
        assert_eq!(self.n, other.n, "axpy dimension mismatch");
        Self {
            n: self.n,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| a + b * c).collect(),
        }
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n, "matmul dimension mismatch");
        let n = self.n;
        let mut out = vec![Complex::zero(); n * n];
        for i in 0..n {
            let out_row = &mut out[i * n..(i + 1) * n];
            for k in 0..n {
                let a = self.data[i * n + k];
                if a.is_zero() {
                    continue;
                }
                let b_row = &other.data[k * n..(k + 1) * n];
                for (o, &b) in out_row.iter_mut().zip(b_row) {
                    *o = *o + a * b;
                }
            }
        }
        Self { n, data: out }
    }

    /// Precision conversion, e.g. `f64` to `f32`.
    pub fn cast<S: Real>(&self) -> ComplexMatrix<S> {
        ComplexMatrix {
            n: self.n,
            data: self
                .data
                .iter()
                .map(|z| Complex::new(S::lit(z.re.as_f64()), S::lit(z.im.as_f64())))
                .collect(),
        }
    }

    pub(crate) fn check_same_dim(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: other.n,
            });
        }
        Ok(())
    }
}

impl<R: Real> Index<(usize, usize)> for ComplexMatrix<R> {
    type Output = Complex<R>;

    fn index(&self, (i, j): (usize, usize)) -> &Complex<R> {
        &self.data[i * self.n + j]
    }
}

impl<R: Real> IndexMut<(usize, usize)> for ComplexMatrix<R> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex<R> {
        &mut self.data[i * self.n + j]
    }
}

macro_rules! elementwise {
    ($tr:ident, $method:ident, $op:tt) => {
        impl<R: Real> $tr<&ComplexMatrix<R>> for &ComplexMatrix<R> {
            type Output = ComplexMatrix<R>;

            fn $method(self, rhs: &ComplexMatrix<R>) -> ComplexMatrix<R> {
                assert_eq!(self.n, rhs.n, "dimension mismatch");
                ComplexMatrix {
                    n: self.n,
                    data: self.data.iter().zip(&rhs.data).map(|(&a, &b)| a $op b).collect(),
                }
            }
        }

        impl<R: Real> $tr<ComplexMatrix<R>> for ComplexMatrix<R> {
            type Output = ComplexMatrix<R>;

            fn $method(self, rhs: ComplexMatrix<R>) -> ComplexMatrix<R> {
                (&self).$method(&rhs)
            }
        }

        impl<R: Real> $tr<&ComplexMatrix<R>> for ComplexMatrix<R> {
            type Output = ComplexMatrix<R>;

            fn $method(self, rhs: &ComplexMatrix<R>) -> ComplexMatrix<R> {
                (&self).$method(rhs)
            }
        }
    };
}

elementwise!(Add, add, +);
elementwise!(Sub, sub, -);

impl<R: Real> AddAssign<&ComplexMatrix<R>> for ComplexMatrix<R> {
    fn add_assign(&mut self, rhs: &ComplexMatrix<R>) {
        assert_eq!(self.n, rhs.n, "dimension mismatch");
        for (a, &b) in self.data.iter_mut().zip(&rhs.data) {
            *a = *a + b;
        }
    }
}

impl<R: Real> SubAssign<&ComplexMatrix<R>> for ComplexMatrix<R> {
    fn sub_assign(&mut self, rhs: &ComplexMatrix<R>) {
        assert_eq!(self.n, rhs.n, "dimension mismatch");
        for (a, &b) in self.data.iter_mut().zip(&rhs.data) {
            *a = *a - b;
        }
    }
}

impl<R: Real> Mul<&ComplexMatrix<R>> for &ComplexMatrix<R> {
    type Output = ComplexMatrix<R>;

    fn mul(self, rhs: &ComplexMatrix<R>) -> ComplexMatrix<R> {
        self.matmul(rhs)
    }
}

impl<R: Real> Mul<ComplexMatrix<R>> for ComplexMatrix<R> {
    type Output = ComplexMatrix<R>;

    fn mul(self, rhs: ComplexMatrix<R>) -> ComplexMatrix<R> {
        self.matmul(&rhs)
    }
}

impl<R: Real> Mul<Complex<R>> for &ComplexMatrix<R> {
    type Output = ComplexMatrix<R>;

    fn mul(self, c: Complex<R>) -> ComplexMatrix<R> {
        self.scale(c)
    }
}

impl<R: Real> Neg for &ComplexMatrix<R> {
    type Output = ComplexMatrix<R>;

    fn neg(self) -> ComplexMatrix<R> {
        self.map(|z| -z)
    }
}

impl<R: Real> Neg for ComplexMatrix<R> {
    type Output = ComplexMatrix<R>;

    fn neg(self) -> ComplexMatrix<R> {
        -&self
    }
}

impl<R: Real> fmt::Debug for ComplexMatrix<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix({}x{}) [", self.n, self.n)?;
        for i in 0..self.n {
            write!(f, "  ")?;
            for z in self.row(i) {
                write!(f, "{:+.6e}{:+.6e}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

// JSON layout: array of rows, each entry a two-element `[re, im]` array.
impl<R: Real> Serialize for ComplexMatrix<R> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<[R; 2]>> = (0..self.n)
            .map(|i| self.row(i).iter().map(|z| [z.re, z.im]).collect())
            .collect();
        rows.serialize(serializer)
    }
}

impl<'de, R: Real> Deserialize<'de> for ComplexMatrix<R> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let rows: Vec<Vec<[R; 2]>> = Vec::deserialize(deserializer)?;
        let rows: Vec<Vec<Complex<R>>> = rows
            .into_iter()
            .map(|r| r.into_iter().map(|[re, im]| Complex::new(re, im)).collect())
            .collect();
        let m = ComplexMatrix::from_rows(rows).map_err(D::Error::custom)?;
        if !m.is_finite() {
            return Err(D::Error::custom("matrix entries must be finite"));
        }
        Ok(m)
    }
}
