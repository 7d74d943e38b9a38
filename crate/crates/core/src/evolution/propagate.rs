use serde::{Deserialize, Serialize};

use super::GeneratorSpec;
use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::matfun::expm;
use crate::scalar::{real, Real};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Stepper {
    /// Classical fourth-order Runge–Kutta on the matrix ODE.
    #[default]
    Rk4,
    /// Exponential midpoint rule `U ← expm(h·A(τ + h/2))·U`.
    Magnus2,
}

/// Claimed constants `(M, ω)` of `‖U(t,s)‖ ≤ M e^{ω(t−s)}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct GrowthBound<R: Real> {
    pub m: R,
    pub omega: R,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PropagationConfig {
    pub stepper: Stepper,
    pub steps: usize,
}

impl Default for PropagationConfig {
    fn default() -> Self {
        Self {
            stepper: Stepper::Rk4,
            steps: 256,
        }
    }
}

/// `U(t,s)` together with how it was produced.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound = "")]
pub struct EvolutionOperator<R: Real> {
    pub u: ComplexMatrix<R>,
    pub t: R,
    pub s: R,
    pub generator_id: String,
    pub stepper: Stepper,
    pub steps: usize,
    pub growth: Option<GrowthBound<R>>,
}

impl<R: Real> EvolutionOperator<R> {
    /// Wraps an operator known in closed form (no time stepping).
    pub fn exact(u: ComplexMatrix<R>, t: R, s: R, generator_id: impl Into<String>) -> Self {
        Self {
            u,
            t,
            s,
            generator_id: generator_id.into(),
            stepper: Stepper::Rk4,
            steps: 0,
            growth: None,
        }
    }

    pub fn with_growth(mut self, m: R, omega: R) -> Self {
        self.growth = Some(GrowthBound { m, omega });
        self
    }

    pub fn elapsed(&self) -> R {
        self.t - self.s
    }
}

/// Integrates `∂_τ U = A(τ) U` from `U(s,s) = I` to `τ = t` in `steps` equal steps.
pub fn propagate<R: Real>(
    g: &GeneratorSpec<R>,
    t: R,
    s: R,
    steps: usize,
    stepper: Stepper,
) -> Result<EvolutionOperator<R>> {
    if !(R::zero() <= s && s <= t && t <= g.horizon()) {
        return Err(Error::InvalidInput(format!(
            "need 0 <= s <= t <= T, got s = {s}, t = {t}, T = {}",
            g.horizon()
        )));
    }
    if steps == 0 {
        return Err(Error::InvalidInput("steps must be at least 1".into()));
    }
    let h = (t - s) / R::from_usize(steps).unwrap();
    let half = R::lit(0.5);
    let mut u = ComplexMatrix::identity(g.dim());
    for step in 0..steps {
        let tau = s + h * R::from_usize(step).unwrap();
        u = match stepper {
            Stepper::Rk4 => {
                let a0 = g.eval(tau)?;
                let a_mid = g.eval(tau + h * half)?;
                let a1 = g.eval(tau + h)?;
                let k1 = a0.matmul(&u);
                let k2 = a_mid.matmul(&u.axpy(real(h * half), &k1));
                let k3 = a_mid.matmul(&u.axpy(real(h * half), &k2));
                let k4 = a1.matmul(&u.axpy(real(h), &k3));
                let incr = &(&k1 + &k4) + &(&k2 + &k3).scale_real(R::lit(2.0));
                u.axpy(real(h / R::lit(6.0)), &incr)
            }
            Stepper::Magnus2 => {
                let a_mid = g.eval(tau + h * half)?;
                expm(&a_mid.scale_real(h))?.matmul(&u)
            }
        };
        if !u.is_finite() {
            return Err(Error::StepFailure { step, t: tau.as_f64() });
        }
    }
    Ok(EvolutionOperator {
        u,
        t,
        s,
        generator_id: g.id().to_string(),
        stepper,
        steps,
        growth: None,
    })
}

/// `‖U(t,r)·U(r,s) − U(t,s)‖₁`, sub-intervals stepped at the density of `[s, t]`.
pub fn check_semigroup<R: Real>(g: &GeneratorSpec<R>, s: R, r: R, t: R, steps: usize, stepper: Stepper) -> Result<R> {
    if !(s <= r && r <= t) {
        return Err(Error::InvalidInput(format!("need s <= r <= t, got {s}, {r}, {t}")));
    }
    let full = propagate(g, t, s, steps, stepper)?;
    let span = t - s;
    let sub_steps = |len: R| -> usize {
        if span > R::zero() {
            (len / span * R::from_usize(steps).unwrap())
                .round()
                .to_usize()
                .unwrap_or(1)
                .max(1)
        } else {
            1
        }
    };
    let late = propagate(g, t, r, sub_steps(t - r), stepper)?;
    let early = propagate(g, r, s, sub_steps(r - s), stepper)?;
    Ok(late.u.matmul(&early.u).dist_1(&full.u))
}

/// Whether `‖U‖₁ ≤ M e^{ω(t−s)}(1 + 1e−9)`.
pub fn check_growth_bound<R: Real>(u: &EvolutionOperator<R>, m: R, omega: R) -> Result<bool> {
    if !(m > R::zero()) {
        return Err(Error::InvalidInput(format!("growth constant M = {m} must be positive")));
    }
    let bound = m * (omega * u.elapsed()).exp() * (R::one() + R::lit(1e-9));
    Ok(u.u.norm_1() <= bound)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evolution::Profile;
    use crate::sample::{random_matrix, seeded_rng};

    #[test]
    fn zero_generator_gives_identity() {
        let g = GeneratorSpec::constant("zero", 1.0, ComplexMatrix::<f64>::zeros(3)).unwrap();
        for steps in [1, 7, 64] {
            for stepper in [Stepper::Rk4, Stepper::Magnus2] {
                let u = propagate(&g, 0.9, 0.1, steps, stepper).unwrap();
                assert_eq!(u.u, ComplexMatrix::identity(3));
            }
        }
    }

    #[test]
    fn constant_generator_matches_exponential() {
        let a = random_matrix::<f64>(&mut seeded_rng(51), 4, 2.0);
        let g = GeneratorSpec::constant("const", 2.0, a.clone()).unwrap();
        let u = propagate(&g, 1.0, 0.0, 256, Stepper::Rk4).unwrap();
        assert!(u.u.dist_1(&expm(&a).unwrap()) < 1e-8);
    }

    #[test]
    fn rk4_and_magnus_orders() {
        let a0 = random_matrix::<f64>(&mut seeded_rng(52), 4, 1.0);
        let a1 = random_matrix::<f64>(&mut seeded_rng(53), 4, 1.0);
        let g = GeneratorSpec::affine("aff", 1.0, a0, a1).unwrap();
        for (stepper, expected) in [(Stepper::Rk4, 16.0), (Stepper::Magnus2, 4.0)] {
            let diff = |n: usize| {
                let coarse = propagate(&g, 1.0, 0.0, n, stepper).unwrap().u;
                let fine = propagate(&g, 1.0, 0.0, 2 * n, stepper).unwrap().u;
                coarse.dist_1(&fine)
            };
            let ratio = diff(16) / diff(32);
            assert!((ratio / expected - 1.0).abs() < 0.15, "{stepper:?}: {ratio}");
        }
    }

    #[test]
    fn semigroup_residuals() {
        let zero = GeneratorSpec::constant("zero", 1.0, ComplexMatrix::<f64>::zeros(2)).unwrap();
        assert_eq!(check_semigroup(&zero, 0.0, 0.4, 1.0, 10, Stepper::Rk4).unwrap(), 0.0);

        let a0 = random_matrix::<f64>(&mut seeded_rng(54), 4, 1.5);
        let a1 = random_matrix::<f64>(&mut seeded_rng(55), 4, 1.5);
        let g = GeneratorSpec::affine("aff", 1.0, a0, a1).unwrap();
        let r = check_semigroup(&g, 0.0, 0.3, 1.0, 512, Stepper::Rk4).unwrap();
        assert!(r <= 1e-6, "{r}");
    }

    #[test]
    fn growth_bound_examples() {
        let id = EvolutionOperator::exact(ComplexMatrix::<f64>::identity(2), 1.0, 0.0, "id");
        assert!(check_growth_bound(&id, 1.0, 0.0).unwrap());
        let contraction = EvolutionOperator::exact(ComplexMatrix::from_real_diag(&[(-1f64).exp(); 2]), 1.0, 0.0, "c");
        assert!(check_growth_bound(&contraction, 1.0, 0.0).unwrap());
        let growing = EvolutionOperator::exact(ComplexMatrix::from_real_diag(&[1f64.exp(); 2]), 1.0, 0.0, "g");
        assert!(!check_growth_bound(&growing, 1.0, 0.5).unwrap());
        assert!(check_growth_bound(&growing, 0.0, 0.5).is_err());
    }

    #[test]
    fn rejects_bad_interval() {
        let g = GeneratorSpec::modulated("m", 1.0, ComplexMatrix::<f64>::identity(2), Profile::Constant).unwrap();
        assert!(propagate(&g, 0.2, 0.5, 4, Stepper::Rk4).is_err());
        assert!(propagate(&g, 1.5, 0.0, 4, Stepper::Rk4).is_err());
        assert!(propagate(&g, 0.5, 0.0, 0, Stepper::Rk4).is_err());
    }
}
