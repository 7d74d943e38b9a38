use std::fmt;

use num_complex::Complex;
use num_rational::Ratio;
use num_traits::Signed;
use serde::Serialize;

use super::commutator;
use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::matfun::expm;
use crate::scalar::Real;

/// A nested commutator in the letters `X` and `Y`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Word {
    X,
    Y,
    Bracket(Box<Word>, Box<Word>),
}

impl Word {
    fn bracket(a: Word, b: Word) -> Word {
        Word::Bracket(Box::new(a), Box::new(b))
    }

    /// Total number of letters.
    pub fn degree(&self) -> usize {
        match self {
            Word::X | Word::Y => 1,
            Word::Bracket(a, b) => a.degree() + b.degree(),
        }
    }

    pub fn evaluate<R: Real>(&self, x: &ComplexMatrix<R>, y: &ComplexMatrix<R>) -> Result<ComplexMatrix<R>> {
        match self {
            Word::X => Ok(x.clone()),
            Word::Y => Ok(y.clone()),
            Word::Bracket(a, b) => commutator(&a.evaluate(x, y)?, &b.evaluate(x, y)?),
        }
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Word::X => f.write_str("X"),
            Word::Y => f.write_str("Y"),
            Word::Bracket(a, b) => write!(f, "[{a},{b}]"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BchTerm {
    pub coefficient: Ratio<i64>,
    pub word: Word,
}

/// Partial sum of `Log(e^X e^Y)` through a given degree:
///
/// `X + Y + ½[X,Y] + (1/12)[X,[X,Y]] − (1/12)[Y,[X,Y]] − (1/24)[Y,[X,[X,Y]]]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BchTruncation {
    order: usize,
    terms: Vec<BchTerm>,
}

impl BchTruncation {
    pub const MAX_ORDER: usize = 4;

    pub fn new(order: usize) -> Result<Self> {
        if !(1..=Self::MAX_ORDER).contains(&order) {
            return Err(Error::InvalidInput(format!("BCH order {order} outside 1..=4")));
        }
        use Word::{X, Y};
        let xy = || Word::bracket(X, Y);
        let all = [
            (Ratio::from_integer(1), X),
            (Ratio::from_integer(1), Y),
            (Ratio::new(1, 2), xy()),
            (Ratio::new(1, 12), Word::bracket(X, xy())),
            (Ratio::new(-1, 12), Word::bracket(Y, xy())),
            (Ratio::new(-1, 24), Word::bracket(Y, Word::bracket(X, xy()))),
        ];
        let terms = all
            .into_iter()
            .filter(|(_, w)| w.degree() <= order)
            .map(|(coefficient, word)| BchTerm { coefficient, word })
            .collect();
        Ok(Self { order, terms })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn terms(&self) -> &[BchTerm] {
        &self.terms
    }

    pub fn evaluate<R: Real>(&self, x: &ComplexMatrix<R>, y: &ComplexMatrix<R>) -> Result<ComplexMatrix<R>> {
        x.check_same_dim(y)?;
        let mut sum = ComplexMatrix::zeros(x.dim());
        for term in &self.terms {
            let c = R::from_i64(*term.coefficient.numer()).unwrap() / R::from_i64(*term.coefficient.denom()).unwrap();
            sum = sum.axpy(Complex::new(c, R::zero()), &term.word.evaluate(x, y)?);
        }
        Ok(sum)
    }
}

impl fmt::Display for BchTruncation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, term) in self.terms.iter().enumerate() {
            let c = term.coefficient;
            let sign = if c < Ratio::from_integer(0) {
                "-"
            } else if i > 0 {
                "+"
            } else {
                ""
            };
            let mag = c.abs();
            if i > 0 {
                f.write_str(" ")?;
            }
            f.write_str(sign)?;
            if i > 0 && !sign.is_empty() {
                f.write_str(" ")?;
            }
            if mag == Ratio::from_integer(1) {
                write!(f, "{}", term.word)?;
            } else {
                write!(f, "({mag}){}", term.word)?;
            }
        }
        Ok(())
    }
}

pub fn bch_truncated<R: Real>(x: &ComplexMatrix<R>, y: &ComplexMatrix<R>, order: usize) -> Result<ComplexMatrix<R>> {
    BchTruncation::new(order)?.evaluate(x, y)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(bound = "")]
pub struct SmallnessReport<R: Real> {
    /// `‖e^{tA}‖₁ < δ` and `‖e^{tB}‖₁ < δ` at every grid time.
    pub holds: bool,
    /// `‖e^{tA}e^{tB}‖₁ < 2` at every grid time, the bound the condition buys.
    pub product_below_two: bool,
    pub max_norm_a: R,
    pub max_norm_b: R,
    pub max_norm_product: R,
}

/// Smallness condition `‖e^{tA}‖, ‖e^{tB}‖ < δ` with `0 < δ ≤ √2` on a grid in `[0, 1]`.
pub fn smallness_condition<R: Real>(
    a: &ComplexMatrix<R>,
    b: &ComplexMatrix<R>,
    delta: R,
    tgrid: &[R],
) -> Result<SmallnessReport<R>> {
    a.check_same_dim(b)?;
    if !(delta > R::zero() && delta <= R::SQRT_2()) {
        return Err(Error::InvalidInput(format!("delta = {delta} must lie in (0, sqrt 2]")));
    }
    if tgrid.is_empty() || tgrid.iter().any(|&t| !(R::zero() <= t && t <= R::one())) {
        return Err(Error::InvalidInput(
            "time grid must be non-empty and inside [0, 1]".into(),
        ));
    }
    let mut max_norm_a = R::zero();
    let mut max_norm_b = R::zero();
    let mut max_norm_product = R::zero();
    for &t in tgrid {
        let ea = expm(&a.scale_real(t))?;
        let eb = expm(&b.scale_real(t))?;
        max_norm_a = max_norm_a.max(ea.norm_1());
        max_norm_b = max_norm_b.max(eb.norm_1());
        max_norm_product = max_norm_product.max(ea.matmul(&eb).norm_1());
    }
    Ok(SmallnessReport {
        holds: max_norm_a < delta && max_norm_b < delta,
        product_below_two: max_norm_product < R::lit(2.0),
        max_norm_a,
        max_norm_b,
        max_norm_product,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound = "")]
pub struct RegularizedBchComparison<R: Real> {
    /// `e^{a₁}e^{a₂} + κI`
    pub lhs: ComplexMatrix<R>,
    /// `exp(Log(κ+1)I + (κ+1)⁻¹(a₁+a₂) + ½(κ+1)⁻¹[a₁,a₂])`
    pub rhs: ComplexMatrix<R>,
    pub residual: R,
    /// `‖(κ+1)⁻¹(e^{a₁}e^{a₂} − I)‖₁`, which must stay below 1.
    pub series_argument: R,
}

fn regularized_exponent<R: Real>(
    a1: &ComplexMatrix<R>,
    a2: &ComplexMatrix<R>,
    kappa: Complex<R>,
    order: usize,
) -> Result<ComplexMatrix<R>> {
    a1.check_same_dim(a2)?;
    if !(1..=2).contains(&order) {
        return Err(Error::InvalidInput(format!(
            "regularized expansion order {order} outside 1..=2"
        )));
    }
    let kp1 = kappa + Complex::new(R::one(), R::zero());
    if kp1.norm() <= R::epsilon() {
        return Err(Error::InvalidInput("kappa = -1 makes (kappa + 1) singular".into()));
    }
    let inv = kp1.inv();
    let mut exponent = (a1 + a2).scale(inv).shift(kp1.ln());
    if order == 2 {
        exponent = exponent.axpy(inv * R::lit(0.5), &commutator(a1, a2)?);
    }
    Ok(exponent)
}

fn product_of_exponentials<R: Real>(a1: &ComplexMatrix<R>, a2: &ComplexMatrix<R>) -> Result<ComplexMatrix<R>> {
    Ok(expm(a1)?.matmul(&expm(a2)?))
}

/// Compares `e^{a₁}e^{a₂} + κI` with its second-order regularized
/// exponential form, after checking the series-convergence condition.
pub fn regularized_bch_compare<R: Real>(
    a1: &ComplexMatrix<R>,
    a2: &ComplexMatrix<R>,
    kappa: Complex<R>,
    order: usize,
) -> Result<RegularizedBchComparison<R>> {
    let exponent = regularized_exponent(a1, a2, kappa, order)?;
    let product = product_of_exponentials(a1, a2)?;
    let kp1 = kappa + Complex::new(R::one(), R::zero());
    let series_argument = (&product - &ComplexMatrix::identity(a1.dim())).norm_1() / kp1.norm();
    if !(series_argument < R::one()) {
        return Err(Error::ConvergenceViolation {
            norm: series_argument.as_f64(),
        });
    }
    let lhs = product.shift(kappa);
    let rhs = expm(&exponent)?;
    let residual = lhs.dist_1(&rhs);
    Ok(RegularizedBchComparison {
        lhs,
        rhs,
        residual,
        series_argument,
    })
}

/// `‖lhs − rhs‖₁` of [`regularized_bch_compare`] without the convergence check.
pub fn regularized_bch_residual<R: Real>(
    a1: &ComplexMatrix<R>,
    a2: &ComplexMatrix<R>,
    kappa: Complex<R>,
    order: usize,
) -> Result<R> {
    let rhs = expm(&regularized_exponent(a1, a2, kappa, order)?)?;
    Ok(product_of_exponentials(a1, a2)?.shift(kappa).dist_1(&rhs))
}

/// Same comparison with the second-order term that the expansion of
/// `Log((κ+1)(I + (κ+1)⁻¹(e^{a₁}e^{a₂} − I)))` actually produces:
/// `½κ(κ+1)⁻²(a₁+a₂)²` joins the exponent, which makes the residual
/// third order in `a` for every `κ ≠ −1`.
pub fn regularized_bch_corrected<R: Real>(
    a1: &ComplexMatrix<R>,
    a2: &ComplexMatrix<R>,
    kappa: Complex<R>,
) -> Result<RegularizedBchComparison<R>> {
    let kp1 = kappa + Complex::new(R::one(), R::zero());
    let sum = a1 + a2;
    let exponent = regularized_exponent(a1, a2, kappa, 2)?.axpy(kappa / (kp1 * kp1) * R::lit(0.5), &sum.matmul(&sum));
    let product = product_of_exponentials(a1, a2)?;
    let series_argument = (&product - &ComplexMatrix::identity(a1.dim())).norm_1() / kp1.norm();
    let lhs = product.shift(kappa);
    let rhs = expm(&exponent)?;
    let residual = lhs.dist_1(&rhs);
    Ok(RegularizedBchComparison {
        lhs,
        rhs,
        residual,
        series_argument,
    })
}
