//! Mesh-refinement families of periodic finite-difference operators.
//!
//! A genuinely unbounded generator cannot live in a finite program, so the
//! lab emulates one by refinement: `‖A_n‖₁` diverges as the grid size `n`
//! grows, while the regularized logarithm `a_n(t,s) = Log(U_n(t,s) + κI)`
//! stays in a fixed band. Sweeps record both sides of that contrast.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::bch::{bch_truncated, regularized_bch_compare, regularized_bch_residual};
use crate::error::{Error, Result};
use crate::evolution::{check_semigroup, propagate, GeneratorKind, GeneratorSpec, Profile, Stepper};
use crate::linalg::ComplexMatrix;
use crate::logrep::{alt_generator, recover_generator, select_kappa_for};
use crate::matfun::{expm, FdConfig};
use crate::numfmt::sig17;
use crate::scalar::Real;

pub const MIN_GRID: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyKind {
    /// `c·D₁`, real skew-symmetric.
    Advection,
    /// `ν·D₂`, symmetric negative semi-definite.
    Diffusion,
    /// `f(t)·c·D₁` with `f(t) = 1 + ½ sin(2πt)`.
    AdvectionTdep,
}

impl FamilyKind {
    /// Scalar time modulation, if the family has one.
    pub fn modulation<R: Real>(&self, _params: &FamilyParams<R>) -> Option<Profile<R>> {
        match self {
            FamilyKind::AdvectionTdep => Some(Profile::Sinusoid {
                offset: R::one(),
                amplitude: R::lit(0.5),
                frequency: R::one(),
            }),
            FamilyKind::Advection | FamilyKind::Diffusion => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            FamilyKind::Advection => "advection",
            FamilyKind::Diffusion => "diffusion",
            FamilyKind::AdvectionTdep => "advection_tdep",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, bound = "")]
pub struct FamilyParams<R: Real> {
    /// Advection speed `c`.
    pub speed: R,
    /// Diffusion coefficient `ν`.
    pub viscosity: R,
    /// Time horizon `T` of the built generator.
    pub horizon: R,
}

impl<R: Real> Default for FamilyParams<R> {
    fn default() -> Self {
        Self {
            speed: R::one(),
            viscosity: R::one(),
            horizon: R::one(),
        }
    }
}

fn check_grid(n: usize) -> Result<()> {
    if n < MIN_GRID {
        Err(Error::InvalidSize(n))
    } else {
        Ok(())
    }
}

/// Periodic central first difference on `n` points of `[0, 1)`.
pub fn first_difference<R: Real>(n: usize) -> Result<ComplexMatrix<R>> {
    check_grid(n)?;
    let w = R::from_usize(n).unwrap() / R::lit(2.0);
    Ok(ComplexMatrix::from_fn(n, |i, j| {
        if j == (i + 1) % n {
            Complex::new(w, R::zero())
        } else if j == (i + n - 1) % n {
            Complex::new(-w, R::zero())
        } else {
            Complex::default()
        }
    }))
}

/// Periodic three-point second difference on `n` points of `[0, 1)`.
pub fn second_difference<R: Real>(n: usize) -> Result<ComplexMatrix<R>> {
    check_grid(n)?;
    let inv_h2 = R::from_usize(n * n).unwrap();
    Ok(ComplexMatrix::from_fn(n, |i, j| {
        if i == j {
            Complex::new(-inv_h2 * R::lit(2.0), R::zero())
        } else if j == (i + 1) % n || j == (i + n - 1) % n {
            Complex::new(inv_h2, R::zero())
        } else {
            Complex::default()
        }
    }))
}

/// The unmodulated operator of a family at grid size `n`.
pub fn operator_matrix<R: Real>(kind: FamilyKind, n: usize, params: &FamilyParams<R>) -> Result<ComplexMatrix<R>> {
    match kind {
        FamilyKind::Advection | FamilyKind::AdvectionTdep => Ok(first_difference(n)?.scale_real(params.speed)),
        FamilyKind::Diffusion => Ok(second_difference(n)?.scale_real(params.viscosity)),
    }
}

/// Grid potential `diag(amplitude·cos 2πx_j)`, `x_j = j/n`.
pub fn grid_potential<R: Real>(n: usize, amplitude: R) -> Result<ComplexMatrix<R>> {
    check_grid(n)?;
    let nf = R::from_usize(n).unwrap();
    let diag: Vec<R> = (0..n)
        .map(|j| amplitude * (R::TAU() * R::from_usize(j).unwrap() / nf).cos())
        .collect();
    Ok(ComplexMatrix::from_real_diag(&diag))
}

pub fn build<R: Real>(kind: FamilyKind, n: usize, params: &FamilyParams<R>) -> Result<GeneratorSpec<R>> {
    GeneratorSpec::new(
        format!("{}-n{n}", kind.name()),
        params.horizon,
        GeneratorKind::Builtin {
            family: kind,
            n,
            params: *params,
        },
    )
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct DiscretizedFamily<R: Real> {
    pub kind: FamilyKind,
    #[serde(default)]
    pub params: FamilyParams<R>,
    pub dims: Vec<usize>,
}

impl<R: Real> DiscretizedFamily<R> {
    pub fn validate(&self) -> Result<()> {
        if self.dims.is_empty() {
            return Err(Error::InvalidInput("sweep needs at least one grid size".into()));
        }
        if let Some(&n) = self.dims.iter().find(|&&n| n < MIN_GRID) {
            return Err(Error::InvalidSize(n));
        }
        if self.dims.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidInput("sweep dims must be strictly ascending".into()));
        }
        Ok(())
    }
}

/// Upper bound on the estimated floating-point work of a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WorkBudget {
    pub max_flops: f64,
}

impl Default for WorkBudget {
    fn default() -> Self {
        Self { max_flops: 2e11 }
    }
}

/// Knobs of a sweep beyond the family and the time pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, bound = "")]
pub struct SweepOptions<R: Real> {
    /// Amplitude of the grid potential `B` paired with `A_n`.
    pub potential_amplitude: R,
    pub stepper: Stepper,
    /// Stiffness guard: steps = max(min_steps, ⌈‖A_n‖₁(t−s)/step_norm⌉).
    pub step_norm: R,
    pub min_steps: usize,
    /// Base finite-difference step for generator recovery, divided by
    /// `max(1, ‖A_n‖₁(t−s)/16)` at each `n`.
    pub fd_step: R,
    pub richardson_levels: usize,
}

impl<R: Real> Default for SweepOptions<R> {
    fn default() -> Self {
        Self {
            potential_amplitude: R::one(),
            stepper: Stepper::Magnus2,
            step_norm: R::lit(4.0),
            min_steps: 32,
            fd_step: R::lit(1e-3),
            richardson_levels: 1,
        }
    }
}

impl<R: Real> SweepOptions<R> {
    pub fn steps_for(&self, norm_a: R, span: R) -> usize {
        let guard = (norm_a * span / self.step_norm).ceil().to_usize().unwrap_or(usize::MAX);
        guard.max(self.min_steps)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(bound = "")]
pub struct SweepRow<R: Real> {
    pub n: usize,
    pub steps: usize,
    pub norm_gen: R,
    pub norm_gen_ratio: R,
    pub norm_alt: R,
    pub kappa: R,
    pub residual_naive: R,
    pub residual_regularized: R,
    pub regularized_precondition: bool,
    pub residual_recovery: R,
    pub semigroup_residual: R,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound = "")]
pub struct SweepReport<R: Real> {
    pub kind: FamilyKind,
    pub t: R,
    pub s: R,
    pub rows: Vec<SweepRow<R>>,
    /// Least-squares slope of `log ‖A_n‖₁` against `log n` (NaN for one row).
    pub growth_slope: R,
    pub growth_monotone: bool,
    /// `max_n ‖a_n‖₁ / min_n ‖a_n‖₁`.
    pub band_ratio: R,
    pub max_residual_regularized: R,
}

pub const BAND_LIMIT: f64 = 4.0;
pub const DIFFUSION_SLOPE: (f64, f64) = (1.8, 2.2);
pub const ADVECTION_MIN_SLOPE: f64 = 0.8;
pub const SEMIGROUP_TOL: f64 = 1e-6;

impl<R: Real> SweepReport<R> {
    /// Growth of `‖A_n‖₁` at the family's rate while `‖a_n‖₁` stays banded.
    pub fn invariants_hold(&self) -> bool {
        let slope_ok = if self.rows.len() < 2 {
            true
        } else {
            let slope = self.growth_slope.as_f64();
            match self.kind {
                FamilyKind::Diffusion => (DIFFUSION_SLOPE.0..=DIFFUSION_SLOPE.1).contains(&slope),
                FamilyKind::Advection | FamilyKind::AdvectionTdep => slope >= ADVECTION_MIN_SLOPE,
            }
        };
        let semigroup_ok = self.rows.iter().all(|r| r.semigroup_residual.as_f64() <= SEMIGROUP_TOL);
        slope_ok && self.growth_monotone && self.band_ratio.as_f64() <= BAND_LIMIT && semigroup_ok
    }

    pub const CSV_HEADER: &'static str = "n,normA,normA_ratio,norm_a,kappa,residual_naive,residual_thm2,residual_eq6";

    pub fn to_csv(&self) -> String {
        let mut out = String::from(Self::CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            let cols = [
                r.norm_gen,
                r.norm_gen_ratio,
                r.norm_alt,
                r.kappa,
                r.residual_naive,
                r.residual_regularized,
                r.residual_recovery,
            ];
            out.push_str(&r.n.to_string());
            for c in cols {
                out.push(',');
                out.push_str(&sig17(c.as_f64()));
            }
            out.push('\n');
        }
        out
    }
}

fn estimate_flops<R: Real>(family: &DiscretizedFamily<R>, span: R, opts: &SweepOptions<R>) -> Result<f64> {
    // Per grid size: ~12 propagations (plain, semigroup pieces, fd stencil)
    // of `steps` steps costing ~20 complex products each, plus ~10 logarithms
    // of ~80 products each; a complex product costs ~8n³ flops.
    let mut total = 0.0;
    for &n in &family.dims {
        let norm = operator_matrix(family.kind, n, &family.params)?.norm_1() * R::lit(1.5);
        let steps = opts.steps_for(norm, span) as f64;
        let product = 8.0 * (n as f64).powi(3);
        total += product * (12.0 * 20.0 * steps + 10.0 * 80.0);
    }
    Ok(total)
}

/// Least-squares slope of `ln y` against `ln x`; NaN for fewer than two points.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let m = xs.len() as f64;
    if xs.len() < 2 {
        return f64::NAN;
    }
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let mx = lx.iter().sum::<f64>() / m;
    let my = ly.iter().sum::<f64>() / m;
    let cov: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let var: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    cov / var
}

pub fn refinement_sweep<R: Real>(
    family: &DiscretizedFamily<R>,
    t: R,
    s: R,
    budget: WorkBudget,
) -> Result<SweepReport<R>> {
    refinement_sweep_with(family, t, s, budget, &SweepOptions::default())
}

/// Runs the sweep over `family.dims`, pairing each `A_n` with the grid
/// potential `B_n` for the BCH comparisons. A common `κ` is selected over
/// `{U_n^A, U_n^B}` at each `n`.
pub fn refinement_sweep_with<R: Real>(
    family: &DiscretizedFamily<R>,
    t: R,
    s: R,
    budget: WorkBudget,
    opts: &SweepOptions<R>,
) -> Result<SweepReport<R>> {
    family.validate()?;
    if !(R::zero() <= s && s < t && t < family.params.horizon) {
        return Err(Error::InvalidInput(format!(
            "sweep needs 0 <= s < t < T, got s = {s}, t = {t}, T = {}",
            family.params.horizon
        )));
    }
    let span = t - s;
    let estimate = estimate_flops(family, span, opts)?;
    if estimate > budget.max_flops {
        return Err(Error::BudgetExceeded {
            estimate,
            budget: budget.max_flops,
        });
    }

    let mut rows: Vec<SweepRow<R>> = Vec::with_capacity(family.dims.len());
    for &n in &family.dims {
        let g = build(family.kind, n, &family.params)?;
        let a_t = g.eval(t)?;
        let norm_gen = a_t.norm_1();
        let sup_norm = (0..=16)
            .map(|k| {
                g.eval(s + span * R::from_usize(k).unwrap() / R::lit(16.0))
                    .map(|m| m.norm_1())
            })
            .collect::<Result<Vec<R>>>()?
            .into_iter()
            .fold(R::zero(), R::max);
        let steps = opts.steps_for(sup_norm, span);

        let u_a = propagate(&g, t, s, steps, opts.stepper)?;
        let b = grid_potential(n, opts.potential_amplitude)?;
        let u_b = expm(&b.scale_real(span))?;
        let kappa = select_kappa_for([&u_a.u, &u_b])?.kappa;
        let a1 = alt_generator(&u_a, kappa)?;
        let a2 = crate::logrep::alt_generator_of(&u_b, kappa)?;

        let x = a_t.scale_real(span);
        let y = b.scale_real(span);
        let residual_naive = match expm(&bch_truncated(&x, &y, 2)?) {
            Ok(rhs) => u_b_product(&x, &y)?.dist_1(&rhs),
            Err(Error::Overflow { .. }) => R::infinity(),
            Err(e) => return Err(e),
        };

        let (residual_regularized, regularized_precondition) = match regularized_bch_compare(&a1, &a2, kappa, 2) {
            Ok(cmp) => (cmp.residual, true),
            Err(Error::ConvergenceViolation { .. }) => (regularized_bch_residual(&a1, &a2, kappa, 2)?, false),
            Err(e) => return Err(e),
        };

        let residual_recovery = if g.is_commuting() {
            let scale = (norm_gen * span / R::lit(16.0)).max(R::one());
            let fd = FdConfig::new(opts.fd_step / scale, opts.richardson_levels);
            let prop = crate::evolution::PropagationConfig {
                stepper: opts.stepper,
                steps,
            };
            match recover_generator(&g, s, t, kappa, &fd, &prop) {
                Ok(rec) => rec.dist_1(&a_t) / norm_gen,
                Err(Error::SingularMatrix { .. }) => R::nan(),
                Err(e) => return Err(e),
            }
        } else {
            R::nan()
        };

        let r_mid = s + span * R::lit(0.5);
        let semigroup_residual = check_semigroup(&g, s, r_mid, t, steps, opts.stepper)?;

        let base = rows.first().map_or(norm_gen, |r| r.norm_gen);
        rows.push(SweepRow {
            n,
            steps,
            norm_gen,
            norm_gen_ratio: norm_gen / base,
            norm_alt: a1.norm_1(),
            kappa: kappa.re,
            residual_naive,
            residual_regularized,
            regularized_precondition,
            residual_recovery,
            semigroup_residual,
        });
    }

    let ns: Vec<f64> = rows.iter().map(|r| r.n as f64).collect();
    let norms: Vec<f64> = rows.iter().map(|r| r.norm_gen.as_f64()).collect();
    let growth_slope = R::lit(loglog_slope(&ns, &norms));
    let growth_monotone = rows.windows(2).all(|w| w[1].norm_gen > w[0].norm_gen);
    let max_alt = rows.iter().map(|r| r.norm_alt).fold(R::zero(), R::max);
    let min_alt = rows.iter().map(|r| r.norm_alt).fold(R::infinity(), R::min);
    let max_residual_regularized = rows.iter().map(|r| r.residual_regularized).fold(R::zero(), R::max);
    Ok(SweepReport {
        kind: family.kind,
        t,
        s,
        rows,
        growth_slope,
        growth_monotone,
        band_ratio: max_alt / min_alt,
        max_residual_regularized,
    })
}

fn u_b_product<R: Real>(x: &ComplexMatrix<R>, y: &ComplexMatrix<R>) -> Result<ComplexMatrix<R>> {
    Ok(expm(x)?.matmul(&expm(y)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(speed: f64, viscosity: f64) -> FamilyParams<f64> {
        FamilyParams {
            speed,
            viscosity,
            horizon: 1.0,
        }
    }

    #[test]
    fn stencil_norms() {
        let adv = build(FamilyKind::Advection, 4, &params(1.0, 1.0)).unwrap();
        assert_eq!(adv.eval(0.0).unwrap().norm_1(), 4.0);
        let dif = build(FamilyKind::Diffusion, 4, &params(1.0, 1.0)).unwrap();
        assert_eq!(dif.eval(0.0).unwrap().norm_1(), 64.0);
        let adv = build(FamilyKind::Advection, 10, &params(0.5, 1.0)).unwrap();
        assert!((adv.eval(0.0).unwrap().norm_1() - 5.0).abs() < 1e-14);
    }

    #[test]
    fn stencil_structure() {
        let d1 = first_difference::<f64>(8).unwrap();
        assert_eq!(d1.transpose(), -&d1);
        let d2 = second_difference::<f64>(8).unwrap();
        assert_eq!(d2.transpose(), d2);
        for i in 0..8 {
            let row_sum: Complex<f64> = d2.row(i).iter().sum();
            assert_eq!(row_sum, Complex::default());
        }
    }

    #[test]
    fn tdep_modulation_normalized() {
        let g = build(FamilyKind::AdvectionTdep, 8, &params(1.0, 1.0)).unwrap();
        let plain = build(FamilyKind::Advection, 8, &params(1.0, 1.0)).unwrap();
        assert_eq!(g.eval(0.0).unwrap(), plain.eval(0.0).unwrap());
        assert!(g.eval(0.25).unwrap().dist_1(&plain.eval(0.0).unwrap().scale_real(1.5)) < 1e-12);
        assert!(g.is_commuting());
    }

    #[test]
    fn small_grids_rejected() {
        assert!(matches!(
            build(FamilyKind::Diffusion, 3, &params(1.0, 1.0)),
            Err(Error::InvalidSize(3))
        ));
        let fam = DiscretizedFamily {
            kind: FamilyKind::Diffusion,
            params: params(1.0, 0.01),
            dims: vec![2, 8],
        };
        assert!(matches!(
            refinement_sweep(&fam, 0.5, 0.0, WorkBudget::default()),
            Err(Error::InvalidSize(2))
        ));
    }

    #[test]
    fn budget_enforced() {
        let fam = DiscretizedFamily {
            kind: FamilyKind::Diffusion,
            params: params(1.0, 0.01),
            dims: vec![8, 16],
        };
        let tiny = WorkBudget { max_flops: 1e3 };
        assert!(matches!(
            refinement_sweep(&fam, 0.5, 0.0, tiny),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn diffusion_sweep_ratios() {
        let fam = DiscretizedFamily {
            kind: FamilyKind::Diffusion,
            params: params(1.0, 0.01),
            dims: vec![8, 16, 32],
        };
        let rep = refinement_sweep(&fam, 0.5, 0.0, WorkBudget::default()).unwrap();
        let ratios: Vec<f64> = rep.rows.iter().map(|r| r.norm_gen_ratio).collect();
        assert_eq!(ratios, vec![1.0, 4.0, 16.0]);
        assert!((rep.growth_slope - 2.0).abs() < 1e-12);
        assert!(rep.band_ratio <= 2.0, "band {}", rep.band_ratio);
        assert!(rep.invariants_hold());
        let csv = rep.to_csv();
        assert_eq!(csv.lines().count(), 4);
        assert!(csv.starts_with(SweepReport::<f64>::CSV_HEADER));
    }

    #[test]
    fn singleton_sweep() {
        let fam = DiscretizedFamily {
            kind: FamilyKind::Advection,
            params: params(1.0, 1.0),
            dims: vec![4],
        };
        let rep = refinement_sweep(&fam, 0.5, 0.0, WorkBudget::default()).unwrap();
        assert_eq!(rep.rows.len(), 1);
        assert!(rep.growth_slope.is_nan());
        assert!(rep.invariants_hold());
    }

    #[test]
    fn advection_naive_residual_grows() {
        let fam = DiscretizedFamily {
            kind: FamilyKind::Advection,
            params: params(1.0, 1.0),
            dims: vec![8, 16, 32],
        };
        let rep = refinement_sweep(&fam, 0.5, 0.0, WorkBudget::default()).unwrap();
        assert!(rep.rows.windows(2).all(|w| w[1].residual_naive > w[0].residual_naive));
        assert!((rep.growth_slope - 1.0).abs() < 1e-12);
    }
}
