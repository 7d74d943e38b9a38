use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum FdScheme {
    #[default]
    Central,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DerivativeOrder {
    First,
    Second,
}

/// Finite-difference settings: base step, scheme, Richardson levels (≤ 3).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct FdConfig<R: Real> {
    pub step: R,
    #[serde(default)]
    pub scheme: FdScheme,
    pub richardson_levels: usize,
}

impl<R: Real> Default for FdConfig<R> {
    fn default() -> Self {
        Self {
            step: R::lit(1e-3),
            scheme: FdScheme::Central,
            richardson_levels: 1,
        }
    }
}

impl<R: Real> FdConfig<R> {
    pub fn new(step: R, richardson_levels: usize) -> Self {
        Self {
            step,
            scheme: FdScheme::Central,
            richardson_levels,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.step > R::zero()) || !self.step.is_finite() {
            return Err(Error::InvalidInput(format!("fd step {} must be positive", self.step)));
        }
        if self.richardson_levels > 3 {
            return Err(Error::InvalidInput(format!(
                "richardson_levels {} exceeds 3",
                self.richardson_levels
            )));
        }
        Ok(())
    }
}

/// Central-difference derivative of a matrix curve at `t0`, refined by
/// Richardson extrapolation over the steps `h, h/2, …, h/2^levels`.
///
/// Error is `O(h^{2+2·levels})` for smooth curves; first-order differences
/// of linear curves and second-order differences of quadratics are exact.
pub fn fd_derivative<R, F>(mut f: F, t0: R, cfg: &FdConfig<R>, order: DerivativeOrder) -> Result<ComplexMatrix<R>>
where
    R: Real,
    F: FnMut(R) -> Result<ComplexMatrix<R>>,
{
    cfg.validate()?;
    let center = match order {
        DerivativeOrder::Second => Some(f(t0)?),
        DerivativeOrder::First => None,
    };

    let levels = cfg.richardson_levels;
    let mut tableau: Vec<ComplexMatrix<R>> = Vec::with_capacity(levels + 1);
    let mut h = cfg.step;
    for level in 0..=levels {
        let plus = f(t0 + h)?;
        let minus = f(t0 - h)?;
        let estimate = match &center {
            None => (&plus - &minus).scale_real(R::one() / (R::lit(2.0) * h)),
            Some(mid) => (&(&plus + &minus) - &mid.scale_real(R::lit(2.0))).scale_real(R::one() / (h * h)),
        };
        // Neville-style update of the previous row of the tableau
        let mut row = vec![estimate];
        for k in 1..=level {
            let factor = R::lit(4f64.powi(k as i32) - 1.0);
            let refined = {
                let fine = &row[k - 1];
                let coarse = &tableau[k - 1];
                fine + &(fine - coarse).scale_real(R::one() / factor)
            };
            row.push(refined);
        }
        tableau = row;
        h = h * R::lit(0.5);
    }
    tableau
        .pop()
        .expect("tableau has levels + 1 entries")
        .finite_or("fd_derivative")
}
