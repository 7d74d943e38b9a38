//! The commutator `[X, Y]` as `∂_s² Log(e^{Xs}e^{Ys})|₀`, and its use on
//! the von Neumann equation `∂_t ρ = (i/ħ)[ρ, H]`.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::commutator;
use crate::error::{Error, Result};
use crate::evolution::{propagate, GeneratorSpec, PropagationConfig};
use crate::linalg::ComplexMatrix;
use crate::logrep::alt_generator;
use crate::matfun::{expm, fd_derivative, logm_iss, DerivativeOrder, FdConfig};
use crate::scalar::Real;

/// How exponents are built from an `a`-family around the base point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExpansionMode {
    /// `G(σ) = a(0)·σ`
    #[default]
    Frozen,
    /// `G(σ) = ∫₀^σ a(τ) dτ` (Simpson)
    Integral,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, bound = "")]
pub struct VonNeumannConfig<R: Real> {
    pub hbar: R,
    pub fd: FdConfig<R>,
    pub mode: ExpansionMode,
    /// Target RK4 step for evolving `ρ`.
    pub rk4_step: R,
}

impl<R: Real> Default for VonNeumannConfig<R> {
    fn default() -> Self {
        Self {
            hbar: R::one(),
            fd: FdConfig::default(),
            mode: ExpansionMode::Frozen,
            rk4_step: R::lit(1e-3),
        }
    }
}

impl<R: Real> VonNeumannConfig<R> {
    pub fn validate(&self) -> Result<()> {
        if !(self.hbar > R::zero() && self.hbar.is_finite()) {
            return Err(Error::InvalidInput(format!("hbar = {} must be positive", self.hbar)));
        }
        if !(self.rk4_step > R::zero()) {
            return Err(Error::InvalidInput(format!(
                "rk4_step = {} must be positive",
                self.rk4_step
            )));
        }
        self.fd.validate()
    }

    /// `i/ħ`
    pub fn prefactor(&self) -> Complex<R> {
        Complex::new(R::zero(), self.hbar.recip())
    }
}

/// `∂_s² Log(e^{Xs} e^{Ys})` at `s = 0` by central differences.
pub fn von_neumann_second_derivative<R: Real>(
    x: &ComplexMatrix<R>,
    y: &ComplexMatrix<R>,
    cfg: &VonNeumannConfig<R>,
) -> Result<ComplexMatrix<R>> {
    x.check_same_dim(y)?;
    cfg.validate()?;
    let f = |s: R| logm_iss(&expm(&x.scale_real(s))?.matmul(&expm(&y.scale_real(s))?));
    fd_derivative(f, R::zero(), &cfg.fd, DerivativeOrder::Second)
}

/// `ρ(τ)` from `ρ(0) = ρ₀` by `steps` RK4 steps of `ρ' = (i/ħ)(ρH − Hρ)`;
/// negative `τ` integrates backwards.
pub fn evolve_density<R: Real>(
    rho0: &ComplexMatrix<R>,
    h: &ComplexMatrix<R>,
    hbar: R,
    tau: R,
    steps: usize,
) -> Result<ComplexMatrix<R>> {
    rho0.check_same_dim(h)?;
    let steps = steps.max(1);
    let dt = tau / R::from_usize(steps).unwrap();
    let pre = Complex::new(R::zero(), hbar.recip());
    let rhs = |rho: &ComplexMatrix<R>| (&rho.matmul(h) - &h.matmul(rho)).scale(pre);
    let half = Complex::new(dt * R::lit(0.5), R::zero());
    let full = Complex::new(dt, R::zero());
    let mut rho = rho0.clone();
    for _ in 0..steps {
        let k1 = rhs(&rho);
        let k2 = rhs(&rho.axpy(half, &k1));
        let k3 = rhs(&rho.axpy(half, &k2));
        let k4 = rhs(&rho.axpy(full, &k3));
        let incr = &(&k1 + &k4) + &(&k2 + &k3).scale_real(R::lit(2.0));
        rho = rho.axpy(Complex::new(dt / R::lit(6.0), R::zero()), &incr);
    }
    rho.finite_or("density evolution")
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound = "")]
pub struct VnPoint<R: Real> {
    pub t: R,
    pub rho: ComplexMatrix<R>,
    /// Central difference of the RK4 trajectory.
    pub drho_dt: ComplexMatrix<R>,
    /// `(i/ħ)·∂_s² Log(e^{ρs}e^{Hs})|₀`
    pub commutator_side: ComplexMatrix<R>,
    pub residual: R,
    pub trace_drift: R,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound = "")]
pub struct VnReport<R: Real> {
    pub points: Vec<VnPoint<R>>,
    pub max_residual: R,
    pub max_trace_drift: R,
}

/// Checks `∂_t ρ = (i/ħ)·∂_s² Log(e^{ρ(t)s}e^{Hs})|₀` along an RK4 trajectory.
///
/// Each grid time uses one step count for the trajectory and its difference
/// stencil, so the derivative is taken of a smooth function of `t`.
pub fn von_neumann_rhs<R: Real>(
    rho0: &ComplexMatrix<R>,
    h: &ComplexMatrix<R>,
    cfg: &VonNeumannConfig<R>,
    tgrid: &[R],
) -> Result<VnReport<R>> {
    rho0.check_same_dim(h)?;
    cfg.validate()?;
    let trace0 = rho0.trace();
    let mut points = Vec::with_capacity(tgrid.len());
    for &t in tgrid {
        let steps = (t.abs() / cfg.rk4_step).ceil().to_usize().unwrap_or(1).max(1);
        let traj = |tau: R| evolve_density(rho0, h, cfg.hbar, tau, steps);
        let rho = traj(t)?;
        let drho_dt = fd_derivative(traj, t, &cfg.fd, DerivativeOrder::First)?;
        let commutator_side = von_neumann_second_derivative(&rho, h, cfg)?.scale(cfg.prefactor());
        let residual = drho_dt.dist_1(&commutator_side);
        let trace_drift = (rho.trace() - trace0).norm();
        points.push(VnPoint {
            t,
            rho,
            drho_dt,
            commutator_side,
            residual,
            trace_drift,
        });
    }
    let max_residual = points.iter().map(|p| p.residual).fold(R::zero(), R::max);
    let max_trace_drift = points.iter().map(|p| p.trace_drift).fold(R::zero(), R::max);
    Ok(VnReport {
        points,
        max_residual,
        max_trace_drift,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound = "")]
pub struct GeneralizedBchReport<R: Real> {
    pub mode: ExpansionMode,
    /// `F'(0)`
    pub first: ComplexMatrix<R>,
    /// `F''(0)`
    pub second: ComplexMatrix<R>,
    /// `[a₁(0), a₂(0)]`
    pub commutator: ComplexMatrix<R>,
    /// `∂_σ(a₁ + a₂)` at `0`
    pub drift: ComplexMatrix<R>,
    /// `‖F'(0) − (a₁ + a₂)(0)‖₁`
    pub first_residual: R,
    /// Distance of `F''(0)` from its mode's prediction:
    /// `[a₁,a₂]` when frozen, `[a₁,a₂] + ∂_σ(a₁+a₂)` when integrated.
    pub second_residual: R,
    /// `‖F''(0) − [a₁,a₂]‖₁`; nonzero in integral mode by the drift term.
    pub commutator_gap: R,
}

fn simpson<R: Real, F>(f: &F, sigma: R) -> Result<ComplexMatrix<R>>
where
    F: Fn(R) -> Result<ComplexMatrix<R>>,
{
    const PANELS: usize = 4;
    let w = sigma / R::from_usize(PANELS).unwrap();
    let mut acc = f(R::zero())?;
    for k in 1..PANELS {
        let weight = if k % 2 == 1 { 4.0 } else { 2.0 };
        acc = acc.axpy(
            Complex::new(R::lit(weight), R::zero()),
            &f(w * R::from_usize(k).unwrap())?,
        );
    }
    acc += &f(sigma)?;
    Ok(acc.scale_real(w / R::lit(3.0)))
}

/// Taylor data of `F(σ) = Log(e^{G₁(σ)} e^{G₂(σ)})` at `σ = 0`, where the
/// families `a_i(σ)` are given relative to the expansion point.
pub fn generalized_bch_expand<R, F1, F2>(a1: F1, a2: F2, cfg: &VonNeumannConfig<R>) -> Result<GeneralizedBchReport<R>>
where
    R: Real,
    F1: Fn(R) -> Result<ComplexMatrix<R>>,
    F2: Fn(R) -> Result<ComplexMatrix<R>>,
{
    cfg.validate()?;
    let a10 = a1(R::zero())?;
    let a20 = a2(R::zero())?;
    a10.check_same_dim(&a20)?;
    let exponents = |sigma: R| -> Result<(ComplexMatrix<R>, ComplexMatrix<R>)> {
        match cfg.mode {
            ExpansionMode::Frozen => Ok((a10.scale_real(sigma), a20.scale_real(sigma))),
            ExpansionMode::Integral => Ok((simpson(&a1, sigma)?, simpson(&a2, sigma)?)),
        }
    };
    let f = |sigma: R| {
        let (g1, g2) = exponents(sigma)?;
        logm_iss(&expm(&g1)?.matmul(&expm(&g2)?))
    };
    let first = fd_derivative(f, R::zero(), &cfg.fd, DerivativeOrder::First)?;
    let second = fd_derivative(f, R::zero(), &cfg.fd, DerivativeOrder::Second)?;
    let comm = commutator(&a10, &a20)?;
    let drift = fd_derivative(|s| Ok(&a1(s)? + &a2(s)?), R::zero(), &cfg.fd, DerivativeOrder::First)?;
    let predicted = match cfg.mode {
        ExpansionMode::Frozen => comm.clone(),
        ExpansionMode::Integral => &comm + &drift,
    };
    Ok(GeneralizedBchReport {
        mode: cfg.mode,
        first_residual: first.dist_1(&(&a10 + &a20)),
        second_residual: second.dist_1(&predicted),
        commutator_gap: second.dist_1(&comm),
        first,
        second,
        commutator: comm,
        drift,
    })
}

/// [`generalized_bch_expand`] on `a_i(σ) = Log(U_i(t, s + σ) + κI)`.
///
/// Integral mode samples `s + σ` on both sides of `s`, so it needs
/// `s ≥ 4h`-ish room below `s` and `s + σ ≤ t` above.
pub fn generalized_bch_for_generators<R: Real>(
    g1: &GeneratorSpec<R>,
    g2: &GeneratorSpec<R>,
    t: R,
    s: R,
    kappa: Complex<R>,
    prop: &PropagationConfig,
    cfg: &VonNeumannConfig<R>,
) -> Result<GeneralizedBchReport<R>> {
    let family =
        |g: &GeneratorSpec<R>, sigma: R| alt_generator(&propagate(g, t, s + sigma, prop.steps, prop.stepper)?, kappa);
    generalized_bch_expand(|sigma| family(g1, sigma), |sigma| family(g2, sigma), cfg)
}
