//! Verification suites. Each case recomputes an identity on seeded data
//! and records the worst residual against its tolerance.

use std::time::Instant;

use opcalc::bch::{
    adjoint_series, bch_truncated, commutator, generalized_bch_expand, log_product, regularized_bch_compare,
    regularized_bch_corrected, smallness_condition, von_neumann_rhs, von_neumann_second_derivative, ExpansionMode,
    VonNeumannConfig,
};
use opcalc::evolution::{check_growth_bound, check_semigroup, propagate, GeneratorSpec, Profile, Stepper};
use opcalc::lab::{loglog_slope, refinement_sweep_with, DiscretizedFamily, FamilyKind};
use opcalc::logrep::{alt_generator, asymmetry_of, recover_generator, select_kappa};
use opcalc::matfun::{expm, logm_contour, logm_iss, sqrtm_db, ContourSpec, FdConfig};
use opcalc::sample::{random_hermitian, random_matrix, seeded_rng, uniform, SampleRng};
use opcalc::{CMatrix64, Error, C64};

use crate::config::{CampaignConfig, Suite, Tolerances};
use crate::report::VerificationReport;
use crate::CliError;

pub(crate) struct Runner {
    suite: Suite,
    timings: bool,
    pub(crate) reports: Vec<VerificationReport>,
}

impl Runner {
    pub(crate) fn new(suite: Suite, timings: bool) -> Self {
        Self {
            suite,
            timings,
            reports: Vec::new(),
        }
    }

    /// Records one case; a computation error is a failed case with NaN residual.
    fn check(
        &mut self,
        case: impl Into<String>,
        anchor: &str,
        tolerance: f64,
        f: impl FnOnce() -> opcalc::Result<f64>,
    ) {
        let start = Instant::now();
        let residual = f().unwrap_or(f64::NAN);
        let mut report = VerificationReport::new(self.suite.name(), case, anchor, residual, tolerance);
        if self.timings {
            report.runtime_ms = start.elapsed().as_secs_f64() * 1e3;
        }
        self.reports.push(report);
    }
}

fn rng_for(cfg: &CampaignConfig, suite: Suite) -> SampleRng {
    seeded_rng(cfg.seed.wrapping_add(suite.salt()))
}

fn dim_tag(n: usize) -> String {
    format!("n={n:03}")
}

pub(crate) fn run(suite: Suite, cfg: &CampaignConfig) -> Result<Vec<VerificationReport>, CliError> {
    let mut runner = Runner::new(suite, cfg.timings);
    let mut rng = rng_for(cfg, suite);
    let tol = &cfg.tolerances;
    match suite {
        Suite::Matfun => matfun(&mut runner, &mut rng, cfg, tol),
        Suite::Evolution => evolution(&mut runner, &mut rng, cfg, tol),
        Suite::Logrep => logrep(&mut runner, &mut rng, cfg, tol),
        Suite::Bch => bch(&mut runner, &mut rng, tol),
        Suite::VonNeumann => von_neumann(&mut runner, &mut rng, cfg, tol),
        Suite::Sweep => sweep(&mut runner, cfg, tol)?,
    }
    Ok(runner.reports)
}

fn max_over(samples: impl IntoIterator<Item = opcalc::Result<f64>>) -> opcalc::Result<f64> {
    let mut worst = 0.0f64;
    for s in samples {
        let s = s?;
        worst = if s.is_nan() { f64::NAN } else { worst.max(s) };
    }
    Ok(worst)
}

fn matfun(runner: &mut Runner, rng: &mut SampleRng, cfg: &CampaignConfig, tol: &Tolerances) {
    for &n in &cfg.dims {
        let samples: Vec<CMatrix64> = (0..cfg.samples)
            .map(|_| {
                let norm = uniform(rng, 0.05, 1.0);
                random_matrix(rng, n, norm)
            })
            .collect();
        runner.check(
            format!("log_round_trip/{}", dim_tag(n)),
            "log-exp-round-trip",
            tol.log_round_trip,
            || max_over(samples.iter().map(|a| Ok(logm_iss(&expm(a)?)?.dist_1(a)))),
        );
        runner.check(
            format!("contour_agreement/{}", dim_tag(n)),
            "riesz-dunford-logarithm",
            tol.contour_agreement,
            || {
                max_over(samples.iter().map(|a| {
                    let m = expm(a)?;
                    let iss = logm_iss(&m)?;
                    let contour = logm_contour(&m, &ContourSpec::enclosing(&m, 64)?)?;
                    Ok(contour.dist_1(&iss) / iss.norm_1().max(f64::MIN_POSITIVE))
                }))
            },
        );
        runner.check(
            format!("sqrt_round_trip/{}", dim_tag(n)),
            "principal-square-root",
            tol.sqrt_round_trip,
            || {
                max_over(samples.iter().map(|a| {
                    let m = expm(a)?;
                    let y = sqrtm_db(&m)?;
                    Ok(y.matmul(&y).dist_1(&m) / m.norm_1())
                }))
            },
        );
    }
}

fn evolution(runner: &mut Runner, rng: &mut SampleRng, cfg: &CampaignConfig, tol: &Tolerances) {
    for &n in &cfg.dims {
        let a = random_matrix::<f64>(rng, n, 2.0);
        let a0 = random_matrix::<f64>(rng, n, 1.0);
        let a1 = random_matrix::<f64>(rng, n, 1.0);
        for (stepper, name) in [(Stepper::Rk4, "rk4"), (Stepper::Magnus2, "magnus2")] {
            runner.check(
                format!("constant_generator_{name}/{}", dim_tag(n)),
                "evolution-operator",
                tol.propagation,
                || {
                    let g = GeneratorSpec::constant("const", 1.0, a.clone())?;
                    let u = propagate(&g, 1.0, 0.0, 256, stepper)?;
                    let exact = expm(&a)?;
                    Ok(u.u.dist_1(&exact) / exact.norm_1())
                },
            );
        }
        runner.check(
            format!("semigroup_affine/{}", dim_tag(n)),
            "evolution-semigroup",
            tol.semigroup,
            || {
                let g = GeneratorSpec::affine("affine", 1.0, a0.clone(), a1.clone())?;
                check_semigroup(&g, 0.0, 0.4, 1.0, 512, Stepper::Rk4)
            },
        );
        runner.check(
            format!("growth_bound_affine/{}", dim_tag(n)),
            "growth-bound",
            tol.growth_bound,
            || {
                let g = GeneratorSpec::affine("affine", 1.0, a0.clone(), a1.clone())?;
                let u = propagate(&g, 1.0, 0.0, 256, Stepper::Rk4)?;
                let omega = a0.norm_1() + a1.norm_1();
                let holds = check_growth_bound(&u, 1.0, omega)?;
                let ratio = u.u.norm_1() / omega.exp() - 1.0;
                Ok(if holds {
                    ratio.max(0.0)
                } else {
                    ratio.max(f64::MIN_POSITIVE)
                })
            },
        );
    }
}

fn logrep(runner: &mut Runner, rng: &mut SampleRng, cfg: &CampaignConfig, tol: &Tolerances) {
    for &n in &cfg.dims {
        let a0 = random_matrix::<f64>(rng, n, 2.0);
        let a1 = random_matrix::<f64>(rng, n, 2.0);
        runner.check(
            format!("defining_relation/{}", dim_tag(n)),
            "alternative-generator",
            tol.defining_relation,
            || {
                let g = GeneratorSpec::affine("affine", 1.0, a0.clone(), a1.clone())?;
                let u = propagate(&g, 1.0, 0.0, 256, Stepper::Rk4)?;
                let kappa = select_kappa(std::slice::from_ref(&u))?.kappa;
                let shifted = u.u.shift(kappa);
                Ok(expm(&alt_generator(&u, kappa)?)?.dist_1(&shifted) / shifted.norm_1())
            },
        );
    }

    let base = random_matrix::<f64>(rng, 4, 1.0);
    let families = [
        ("constant", GeneratorSpec::constant("constant", 1.0, base.clone())),
        (
            "modulated",
            GeneratorSpec::modulated(
                "modulated",
                1.0,
                base.clone(),
                Profile::Sinusoid {
                    offset: 1.0,
                    amplitude: 0.5,
                    frequency: 1.0,
                },
            ),
        ),
    ];
    let prop = opcalc::evolution::PropagationConfig::default();
    for (name, g) in families {
        for t in [0.25, 0.5, 0.75] {
            runner.check(
                format!("recovery_{name}/t={t:.2}"),
                "generator-recovery",
                tol.recovery,
                || {
                    let g = g.clone()?;
                    let u = propagate(&g, t, 0.0, prop.steps, prop.stepper)?;
                    let kappa = select_kappa(&[u])?.kappa;
                    let rec = recover_generator(&g, 0.0, t, kappa, &FdConfig::default(), &prop)?;
                    let exact = g.eval(t)?;
                    Ok(rec.dist_1(&exact) / exact.norm_1())
                },
            );
        }
    }

    let u = expm(&random_matrix::<f64>(rng, 4, 1.0)).expect("bounded exponent");
    runner.check("asymmetry/kappa_zero", "asymmetry-identity", tol.asymmetry_zero, || {
        Ok(asymmetry_of(&u, C64::new(0.0, 0.0))?.gap)
    });
    runner.check("asymmetry_gap_ratio/generic_4x4", "asymmetry-identity", 1.0, || {
        let gap = asymmetry_of(&u, C64::new(2.0 * u.norm_1(), 0.0))?.gap;
        Ok(tol.asymmetry_min_gap / gap)
    });
}

fn pair(rng: &mut SampleRng, n: usize, nx: f64, ny: f64) -> (CMatrix64, CMatrix64) {
    (random_matrix(rng, n, nx), random_matrix(rng, n, ny))
}

fn bch(runner: &mut Runner, rng: &mut SampleRng, tol: &Tolerances) {
    let pairs: Vec<_> = (0..10).map(|_| pair(rng, 4, 1.0, 1.0)).collect();
    let ts: Vec<f64> = (3..=7).map(|k| 2f64.powi(-k)).collect();
    for order in 1..=4usize {
        runner.check(format!("order_law/k={order}"), "bch-order-law", tol.bch_slope, || {
            max_over(pairs.iter().map(|(x, y)| {
                let res = ts
                    .iter()
                    .map(|&t| {
                        let (xt, yt) = (x.scale_real(t), y.scale_real(t));
                        Ok(log_product(&xt, &yt)?.dist_1(&bch_truncated(&xt, &yt, order)?))
                    })
                    .collect::<opcalc::Result<Vec<f64>>>()?;
                Ok((loglog_slope(&ts, &res) - (order + 1) as f64).abs())
            }))
        });
    }

    let adj: Vec<_> = (0..10).map(|_| pair(rng, 4, 0.5, 1.0)).collect();
    let residuals = |a1: &CMatrix64, a2: &CMatrix64| -> opcalc::Result<Vec<f64>> {
        let oracle = expm(a1)?.matmul(a2).matmul(&expm(&-a1)?);
        (2..=12)
            .map(|n| Ok(adjoint_series(a1, a2, n)?.dist_1(&oracle)))
            .collect()
    };
    runner.check(
        "adjoint_series/N=12",
        "type-one-adjoint-series",
        tol.adjoint_series,
        || {
            max_over(
                adj.iter()
                    .map(|(a1, a2)| Ok(*residuals(a1, a2)?.last().expect("non-empty"))),
            )
        },
    );
    runner.check(
        "adjoint_series/monotone_violations",
        "type-one-adjoint-series",
        0.0,
        || {
            let mut violations = 0usize;
            for (a1, a2) in &adj {
                violations += residuals(a1, a2)?.windows(2).filter(|w| w[1] > w[0]).count();
            }
            Ok(violations as f64)
        },
    );

    let eps = [0.2, 0.1, 0.05];
    let kappa = C64::new(2.0, 0.0);
    let t2_pairs: Vec<_> = (0..10).map(|_| pair(rng, 4, 1.0, 1.0)).collect();
    runner.check(
        "regularized_bch/eps_slope",
        "type-two-regularized-bch",
        tol.regularized_bch_slope,
        || {
            max_over(t2_pairs.iter().map(|(a1, a2)| {
                let res = eps
                    .iter()
                    .map(|&e| Ok(regularized_bch_compare(&a1.scale_real(e), &a2.scale_real(e), kappa, 2)?.residual))
                    .collect::<opcalc::Result<Vec<f64>>>()?;
                Ok((loglog_slope(&eps, &res) - 3.0).abs())
            }))
        },
    );
    runner.check(
        "regularized_bch/eps_slope_with_square_term",
        "type-two-regularized-bch",
        tol.regularized_bch_slope,
        || {
            max_over(t2_pairs.iter().map(|(a1, a2)| {
                let res = eps
                    .iter()
                    .map(|&e| Ok(regularized_bch_corrected(&a1.scale_real(e), &a2.scale_real(e), kappa)?.residual))
                    .collect::<opcalc::Result<Vec<f64>>>()?;
                Ok((loglog_slope(&eps, &res) - 3.0).abs())
            }))
        },
    );
    let d1 = CMatrix64::from_real_diag(&[0.1, -0.05, 0.02, 0.0]);
    let d2 = CMatrix64::from_real_diag(&[-0.03, 0.1, 0.0, 0.07]);
    runner.check(
        "regularized_bch/commuting_small",
        "type-two-regularized-bch",
        1e-3,
        || Ok(regularized_bch_compare(&d1, &d2, kappa, 2)?.residual),
    );

    let grid: Vec<f64> = (0..=10).map(|k| k as f64 / 10.0).collect();
    runner.check("smallness/contractions", "type-two-smallness", 0.0, || {
        let neg = CMatrix64::from_real_diag(&[-1.0; 3]);
        let rep = smallness_condition(&neg, &neg, 1.2, &grid)?;
        Ok(if rep.holds && rep.product_below_two { 0.0 } else { 1.0 })
    });

    let (c1, c2) = pair(rng, 3, 0.8, 0.8);
    let frozen = VonNeumannConfig::default();
    let rep = generalized_bch_expand(|_| Ok(c1.clone()), |_| Ok(c2.clone()), &frozen);
    let (first, second) = match &rep {
        Ok(r) => (Ok(r.first_residual), Ok(r.second_residual)),
        Err(e) => (Err(e.clone()), Err(e.clone())),
    };
    runner.check(
        "generalized_bch/frozen_first",
        "type-two-generalized-bch",
        tol.generalized_bch_first,
        || first,
    );
    runner.check(
        "generalized_bch/frozen_second",
        "type-two-generalized-bch",
        tol.generalized_bch_second,
        || second,
    );

    let (b1, b2) = pair(rng, 3, 0.6, 0.6);
    let (e1, e2) = pair(rng, 3, 0.6, 0.6);
    runner.check(
        "generalized_bch/integral_second_with_drift",
        "type-two-generalized-bch",
        1e-4,
        || {
            let cfg = VonNeumannConfig {
                mode: ExpansionMode::Integral,
                ..VonNeumannConfig::default()
            };
            let rep = generalized_bch_expand(
                |s| Ok(&b1 + &e1.scale_real(s)),
                |s| Ok(&b2 + &e2.scale_real(s * s + s)),
                &cfg,
            )?;
            Ok(rep.second_residual)
        },
    );
}

fn von_neumann(runner: &mut Runner, rng: &mut SampleRng, cfg: &CampaignConfig, tol: &Tolerances) {
    let vn = VonNeumannConfig::default();
    let pairs: Vec<_> = (0..20)
        .map(|_| {
            let (nx, ny) = (uniform(rng, 0.1, 1.0), uniform(rng, 0.1, 1.0));
            pair(rng, 4, nx, ny)
        })
        .collect();
    runner.check(
        "frozen_identity/20_pairs",
        "von-neumann-second-derivative",
        tol.vn_frozen,
        || {
            max_over(
                pairs
                    .iter()
                    .map(|(x, y)| Ok(von_neumann_second_derivative(x, y, &vn)?.dist_1(&commutator(x, y)?))),
            )
        },
    );
    runner.check(
        "frozen_identity/swapped_negated",
        "von-neumann-second-derivative",
        tol.vn_antisymmetry,
        || {
            max_over(pairs.iter().take(5).map(|(x, y)| {
                let direct = von_neumann_second_derivative(x, y, &vn)?;
                Ok(von_neumann_second_derivative(y, &-x, &vn)?.dist_1(&direct))
            }))
        },
    );
    let commuting: Vec<_> = (0..5)
        .map(|_| {
            let h = random_hermitian::<f64>(rng, 4, 1.0);
            let g = expm(&h.scale_real(-0.3)).expect("bounded exponent");
            (h, g)
        })
        .collect();
    runner.check(
        "frozen_identity/commuting",
        "von-neumann-second-derivative",
        tol.vn_commuting,
        || {
            max_over(
                commuting
                    .iter()
                    .map(|(x, y)| Ok(von_neumann_second_derivative(x, y, &vn)?.norm_1())),
            )
        },
    );

    let demo = &cfg.von_neumann;
    let grid = demo.grid();
    let report = von_neumann_rhs(&demo.rho0, &demo.hamiltonian, &demo.config, &grid);
    let (res, drift) = match &report {
        Ok(r) => (Ok(r.max_residual), Ok(r.max_trace_drift)),
        Err(e) => (Err(e.clone()), Err(e.clone())),
    };
    runner.check("demo/equation_residual", "von-neumann-equation", tol.vn_demo, || res);
    runner.check("demo/trace_drift", "von-neumann-equation", tol.trace_drift, || drift);
    runner.check("demo/hbar_linearity", "von-neumann-equation", 1e-9, || {
        let rho = &demo.rho0;
        let h = &demo.hamiltonian;
        let one = von_neumann_rhs(
            rho,
            h,
            &VonNeumannConfig {
                hbar: 1.0,
                ..demo.config
            },
            &[0.0],
        )?;
        let two = von_neumann_rhs(
            rho,
            h,
            &VonNeumannConfig {
                hbar: 2.0,
                ..demo.config
            },
            &[0.0],
        )?;
        let (a, b) = (&one.points[0].commutator_side, &two.points[0].commutator_side);
        Ok(b.scale_real(2.0).dist_1(a) / a.norm_1().max(1.0))
    });
}

fn sweep(runner: &mut Runner, cfg: &CampaignConfig, tol: &Tolerances) -> Result<(), CliError> {
    let report = crate::sweep_report(&cfg.sweep)?;
    let expected = match cfg.sweep.kind {
        FamilyKind::Diffusion => 2.0,
        FamilyKind::Advection | FamilyKind::AdvectionTdep => 1.0,
    };
    let kind = cfg.sweep.kind.name();
    if report.rows.len() >= 2 {
        runner.check(
            format!("{kind}/norm_growth_slope"),
            "unbounded-emulation",
            tol.sweep_slope,
            || Ok((report.growth_slope - expected).abs()),
        );
    }
    runner.check(
        format!("{kind}/norm_growth_monotone"),
        "unbounded-emulation",
        0.0,
        || Ok(if report.growth_monotone { 0.0 } else { 1.0 }),
    );
    runner.check(
        format!("{kind}/alt_generator_band"),
        "unbounded-emulation",
        tol.sweep_band,
        || Ok(report.band_ratio),
    );
    runner.check(
        format!("{kind}/semigroup"),
        "unbounded-emulation",
        tol.semigroup,
        || Ok(report.rows.iter().map(|r| r.semigroup_residual).fold(0.0, f64::max)),
    );
    runner.check(
        format!("{kind}/regularized_bch_residual"),
        "unbounded-emulation",
        tol.sweep_regularized_bch,
        || Ok(report.max_residual_regularized),
    );
    Ok(())
}

pub(crate) fn sweep_family(spec: &crate::config::SweepSpec) -> DiscretizedFamily<f64> {
    DiscretizedFamily {
        kind: spec.kind,
        params: spec.params,
        dims: spec.dims.clone(),
    }
}

pub(crate) fn run_sweep_spec(spec: &crate::config::SweepSpec) -> Result<opcalc::lab::SweepReport<f64>, Error> {
    refinement_sweep_with(&sweep_family(spec), spec.t, spec.s, spec.budget, &spec.options)
}
