//! Regularized logarithms of evolution operators.
//!
//! For a shift `κ` in the resolvent set of every `U(t,s)` under study, the
//! alternative generator `a(t,s) = Log(U(t,s) + κI)` is a bounded matrix
//! even when `A(t)` is not, `e^{a(t,s)} = U(t,s) + κI` holds by
//! construction, and `A(t) = (I − κe^{−a(t,s)})⁻¹ ∂_t a(t,s)` recovers the
//! generator whenever `∂_t U` commutes with `U`.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evolution::{propagate, EvolutionOperator, GeneratorSpec, PropagationConfig};
use crate::linalg::{inverse, solve, ComplexMatrix, Lu};
use crate::matfun::{expm, fd_derivative, logm_iss, DerivativeOrder, FdConfig};
use crate::scalar::{real, Real};

/// `κ = KAPPA_MARGIN · sup ‖U‖₁`.
pub const KAPPA_MARGIN: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(bound = "")]
pub struct KappaChoice<R: Real> {
    pub kappa: Complex<R>,
    pub sup_norm: R,
    pub margin: R,
}

/// Real `κ = 2·max ‖U‖₁` over the family.
///
/// Column Gershgorin discs of `U + κI` then lie in `|z − κ| ≤ κ/2`, so the
/// principal logarithm exists; invertibility of every `U + κI` is checked
/// by factorization.
pub fn select_kappa<R: Real>(family: &[EvolutionOperator<R>]) -> Result<KappaChoice<R>> {
    select_kappa_for(family.iter().map(|e| &e.u))
}

pub fn select_kappa_for<'a, R: Real>(family: impl IntoIterator<Item = &'a ComplexMatrix<R>>) -> Result<KappaChoice<R>> {
    let members: Vec<&ComplexMatrix<R>> = family.into_iter().collect();
    if members.is_empty() {
        return Err(Error::InvalidInput("kappa selection needs a non-empty family".into()));
    }
    let sup_norm = members.iter().map(|u| u.norm_1()).fold(R::zero(), R::max);
    let margin = R::lit(KAPPA_MARGIN);
    let kappa = real(margin * sup_norm);
    for u in &members {
        Lu::factor(&u.shift(kappa))?;
    }
    Ok(KappaChoice {
        kappa,
        sup_norm,
        margin,
    })
}

/// `a(t,s) = Log(U(t,s) + κI)`.
pub fn alt_generator<R: Real>(u: &EvolutionOperator<R>, kappa: Complex<R>) -> Result<ComplexMatrix<R>> {
    alt_generator_of(&u.u, kappa)
}

pub fn alt_generator_of<R: Real>(u: &ComplexMatrix<R>, kappa: Complex<R>) -> Result<ComplexMatrix<R>> {
    logm_iss(&u.shift(kappa)).map_err(|e| match e {
        Error::BranchCutViolation(msg) => {
            Error::BranchCutViolation(format!("U + kappa*I with kappa = {kappa} is not admissible: {msg}"))
        }
        other => other,
    })
}

/// Recovers `A(t)` from the alternative generator:
/// `(I − κ·expm(−a(t,s)))⁻¹ ∂_t a(t,s)`, with `∂_t` a central difference over
/// `τ ↦ Log(U(τ,s) + κI)` propagated with the same step count at every `τ`.
pub fn recover_generator<R: Real>(
    g: &GeneratorSpec<R>,
    s: R,
    t: R,
    kappa: Complex<R>,
    fd: &FdConfig<R>,
    prop: &PropagationConfig,
) -> Result<ComplexMatrix<R>> {
    fd.validate()?;
    if !(t - fd.step > s && t + fd.step <= g.horizon()) {
        return Err(Error::InvalidInput(format!(
            "t = {t} must be interior to [s, T] = [{s}, {}] by at least the fd step {}",
            g.horizon(),
            fd.step
        )));
    }
    let curve = |tau: R| alt_generator_of(&propagate(g, tau, s, prop.steps, prop.stepper)?.u, kappa);
    let da = fd_derivative(curve, t, fd, DerivativeOrder::First)?;
    let a = curve(t)?;
    let n = g.dim();
    let prefactor = &ComplexMatrix::identity(n) - &expm(&-&a)?.scale(kappa);
    solve(&prefactor, &da)
}

/// Both sides of the would-be identity `e^{−a(t,s)} = e^{a(s,t)}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound = "")]
pub struct Asymmetry<R: Real> {
    /// `expm(−a(t,s)) = (U + κI)⁻¹`
    pub lhs: ComplexMatrix<R>,
    /// `U⁻¹ + κI`, the value `e^{a(s,t)}` takes when `U(s,t) = U(t,s)⁻¹`
    pub rhs: ComplexMatrix<R>,
    pub gap: R,
}

pub fn asymmetry_of<R: Real>(u: &ComplexMatrix<R>, kappa: Complex<R>) -> Result<Asymmetry<R>> {
    let a = alt_generator_of(u, kappa)?;
    let lhs = expm(&-&a)?;
    let rhs = inverse(u)?.shift(kappa);
    let gap = lhs.dist_1(&rhs);
    Ok(Asymmetry { lhs, rhs, gap })
}

pub fn check_asymmetry<R: Real>(
    g: &GeneratorSpec<R>,
    s: R,
    t: R,
    kappa: Complex<R>,
    prop: &PropagationConfig,
) -> Result<Asymmetry<R>> {
    let u = propagate(g, t, s, prop.steps, prop.stepper)?;
    asymmetry_of(&u.u, kappa)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct LogEntry<R: Real> {
    pub t: R,
    pub s: R,
    pub a: ComplexMatrix<R>,
}

/// `κ` plus `a(t,s)` on a grid of `(t, s)` pairs, with `e^{a} = U + κI`.
#[derive(Debug, Clone, PartialEq)]
pub struct LogRepresentation<R: Real> {
    pub kappa: Complex<R>,
    pub generator_id: String,
    pub entries: Vec<LogEntry<R>>,
}

#[derive(Serialize, Deserialize)]
#[serde(bound = "")]
struct LogRepresentationJson<R: Real> {
    kappa: [R; 2],
    generator_id: String,
    grid: Vec<[R; 2]>,
    a_matrices: Vec<ComplexMatrix<R>>,
}

impl<R: Real> LogRepresentation<R> {
    /// Propagates `U(t,s)` on the grid and takes logarithms. Without an
    /// override `κ` comes from [`select_kappa`] over the whole grid.
    pub fn build(
        g: &GeneratorSpec<R>,
        grid: &[(R, R)],
        kappa: Option<Complex<R>>,
        prop: &PropagationConfig,
    ) -> Result<(Self, Vec<EvolutionOperator<R>>)> {
        let us = grid
            .iter()
            .map(|&(t, s)| propagate(g, t, s, prop.steps, prop.stepper))
            .collect::<Result<Vec<_>>>()?;
        let kappa = match kappa {
            Some(k) => k,
            None => select_kappa(&us)?.kappa,
        };
        let entries = us
            .iter()
            .map(|u| {
                Ok(LogEntry {
                    t: u.t,
                    s: u.s,
                    a: alt_generator(u, kappa)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let rep = Self {
            kappa,
            generator_id: g.id().to_string(),
            entries,
        };
        Ok((rep, us))
    }

    /// Largest `‖expm(a) − (U + κI)‖₁ / ‖U + κI‖₁` over the grid.
    pub fn defining_relation_residual(&self, us: &[EvolutionOperator<R>]) -> Result<R> {
        if us.len() != self.entries.len() {
            return Err(Error::DimensionMismatch {
                expected: self.entries.len(),
                found: us.len(),
            });
        }
        let mut worst = R::zero();
        for (entry, u) in self.entries.iter().zip(us) {
            let shifted = u.u.shift(self.kappa);
            worst = worst.max(expm(&entry.a)?.dist_1(&shifted) / shifted.norm_1());
        }
        Ok(worst)
    }

    pub fn to_json(&self) -> String {
        let dump = LogRepresentationJson {
            kappa: [self.kappa.re, self.kappa.im],
            generator_id: self.generator_id.clone(),
            grid: self.entries.iter().map(|e| [e.t, e.s]).collect(),
            a_matrices: self.entries.iter().map(|e| e.a.clone()).collect(),
        };
        serde_json::to_string_pretty(&dump).expect("log representation serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let dump: LogRepresentationJson<R> =
            serde_json::from_str(text).map_err(|e| Error::InvalidInput(e.to_string()))?;
        if dump.grid.len() != dump.a_matrices.len() {
            return Err(Error::InvalidInput("grid and a_matrices lengths differ".into()));
        }
        Ok(Self {
            kappa: Complex::new(dump.kappa[0], dump.kappa[1]),
            generator_id: dump.generator_id,
            entries: dump
                .grid
                .into_iter()
                .zip(dump.a_matrices)
                .map(|([t, s], a)| LogEntry { t, s, a })
                .collect(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evolution::{Profile, Stepper};
    use crate::sample::{random_matrix, seeded_rng};

    fn c(x: f64) -> Complex<f64> {
        Complex::new(x, 0.0)
    }

    fn exact(u: ComplexMatrix<f64>) -> EvolutionOperator<f64> {
        EvolutionOperator::exact(u, 1.0, 0.0, "test")
    }

    #[test]
    fn kappa_rule() {
        let id = exact(ComplexMatrix::identity(3));
        assert_eq!(select_kappa(std::slice::from_ref(&id)).unwrap().kappa, c(2.0));

        let contractions = vec![
            id,
            exact(ComplexMatrix::from_real_diag(&[0.5, 0.25, 1.0])),
            exact(ComplexMatrix::from_real(3, &[0.0, 1.0, 0.0, 0.0, 0.0, 1.0, 1.0, 0.0, 0.0]).unwrap()),
        ];
        assert_eq!(select_kappa(&contractions).unwrap().kappa, c(2.0));

        let big = exact(ComplexMatrix::from_real_diag(&[3.7, -1.0]));
        let choice = select_kappa(&[big.clone(), exact(ComplexMatrix::identity(2))]).unwrap();
        assert!((choice.kappa.re - 7.4).abs() < 1e-14);
        assert_eq!(choice.sup_norm, 3.7);
        assert!(inverse(&big.u.shift(choice.kappa)).is_ok());

        assert!(select_kappa::<f64>(&[]).is_err());
    }

    #[test]
    fn alt_generator_closed_forms() {
        let a = alt_generator(&exact(ComplexMatrix::identity(2)), c(2.0)).unwrap();
        assert!(a.dist_1(&ComplexMatrix::from_real_diag(&[3f64.ln(); 2])) < 1e-14);

        let e = std::f64::consts::E;
        let u = exact(ComplexMatrix::from_real_diag(&[e, 1.0 / e]));
        let a = alt_generator(&u, c(2.0 * e)).unwrap();
        let want = ComplexMatrix::from_real_diag(&[(3.0 * e).ln(), (2.0 * e + 1.0 / e).ln()]);
        assert!(a.dist_1(&want) < 1e-14);
    }

    #[test]
    fn alt_generator_defining_relation() {
        let a0 = random_matrix::<f64>(&mut seeded_rng(61), 8, 2.0);
        let a1 = random_matrix::<f64>(&mut seeded_rng(62), 8, 2.0);
        let g = GeneratorSpec::affine("aff8", 1.0, a0, a1).unwrap();
        let u = propagate(&g, 1.0, 0.0, 256, Stepper::Rk4).unwrap();
        let kappa = select_kappa(std::slice::from_ref(&u)).unwrap().kappa;
        let a = alt_generator(&u, kappa).unwrap();
        let shifted = u.u.shift(kappa);
        assert!(expm(&a).unwrap().dist_1(&shifted) <= 1e-9 * shifted.norm_1());
    }

    #[test]
    fn too_small_kappa_rejected() {
        let u = exact(ComplexMatrix::from_real_diag(&[-3.0, 1.0]));
        assert!(matches!(alt_generator(&u, c(1.0)), Err(Error::BranchCutViolation(_))));
    }

    #[test]
    fn recover_zero_generator() {
        let g = GeneratorSpec::constant("zero", 1.0, ComplexMatrix::<f64>::zeros(2)).unwrap();
        let rec = recover_generator(
            &g,
            0.0,
            0.5,
            c(2.0),
            &FdConfig::default(),
            &PropagationConfig::default(),
        )
        .unwrap();
        assert!(rec.norm_1() < 1e-12);
    }

    #[test]
    fn recover_rotation_generator() {
        let a = ComplexMatrix::<f64>::from_real(2, &[0.0, 1.0, -1.0, 0.0]).unwrap();
        let g = GeneratorSpec::constant("rot", 1.0, a.clone()).unwrap();
        let prop = PropagationConfig::default();
        let u = propagate(&g, 0.5, 0.0, prop.steps, prop.stepper).unwrap();
        let kappa = select_kappa(&[u]).unwrap().kappa;
        let rec = recover_generator(&g, 0.0, 0.5, kappa, &FdConfig::default(), &prop).unwrap();
        assert!(rec.dist_1(&a) < 1e-6, "{}", rec.dist_1(&a));
    }

    #[test]
    fn recover_modulated_generator() {
        let base = ComplexMatrix::<f64>::from_real_diag(&[1.0, -1.0]);
        let profile = Profile::Linear {
            offset: 1.0,
            slope: 1.0,
        };
        let g = GeneratorSpec::modulated("lin", 1.0, base.clone(), profile).unwrap();
        let prop = PropagationConfig::default();
        let u = propagate(&g, 0.3, 0.0, prop.steps, prop.stepper).unwrap();
        let kappa = select_kappa(&[u]).unwrap().kappa;
        let rec = recover_generator(&g, 0.0, 0.3, kappa, &FdConfig::default(), &prop).unwrap();
        assert!(rec.dist_1(&base.scale_real(1.3)) < 1e-6);
    }

    #[test]
    fn recover_rejects_boundary_time() {
        let g = GeneratorSpec::constant("z", 1.0, ComplexMatrix::<f64>::zeros(2)).unwrap();
        let r = recover_generator(
            &g,
            0.0,
            0.0,
            c(2.0),
            &FdConfig::default(),
            &PropagationConfig::default(),
        );
        assert!(matches!(r, Err(Error::InvalidInput(_))));
    }

    #[test]
    fn asymmetry_examples() {
        let u = ComplexMatrix::<f64>::from_real_diag(&[2.0, 2.0]);
        assert!(asymmetry_of(&u, c(0.0)).unwrap().gap <= 1e-10);
        let asym = asymmetry_of(&u, c(4.0)).unwrap();
        assert!((asym.gap - (9.0 / 2.0 - 1.0 / 6.0)).abs() < 1e-12);
        assert!(asym.lhs.dist_1(&ComplexMatrix::from_real_diag(&[1.0 / 6.0; 2])) < 1e-14);
    }

    #[test]
    fn json_dump_round_trip() {
        let g = GeneratorSpec::constant(
            "rot",
            1.0,
            ComplexMatrix::<f64>::from_real(2, &[0.0, 1.0, -1.0, 0.0]).unwrap(),
        )
        .unwrap();
        let grid = [(0.5, 0.0), (1.0, 0.25)];
        let (rep, us) = LogRepresentation::build(&g, &grid, None, &PropagationConfig::default()).unwrap();
        assert!(rep.defining_relation_residual(&us).unwrap() <= 1e-9);
        let back = LogRepresentation::<f64>::from_json(&rep.to_json()).unwrap();
        assert_eq!(back, rep);
    }
}
