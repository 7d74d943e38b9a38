use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lab::{self, FamilyKind, FamilyParams};
use crate::linalg::ComplexMatrix;
use crate::scalar::Real;

/// Scalar time modulation `f(t)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", bound = "")]
pub enum Profile<R: Real> {
    Constant,
    /// `offset + slope·t`
    Linear {
        offset: R,
        slope: R,
    },
    /// `offset + amplitude·sin(2π·frequency·t)`
    Sinusoid {
        offset: R,
        amplitude: R,
        frequency: R,
    },
}

impl<R: Real> Profile<R> {
    pub fn value(&self, t: R) -> R {
        match *self {
            Profile::Constant => R::one(),
            Profile::Linear { offset, slope } => offset + slope * t,
            Profile::Sinusoid {
                offset,
                amplitude,
                frequency,
            } => offset + amplitude * (R::TAU() * frequency * t).sin(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct TableSample<R: Real> {
    pub t: R,
    pub matrix: ComplexMatrix<R>,
}

/// How `A(t)` is produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", bound = "")]
pub enum GeneratorKind<R: Real> {
    Constant {
        matrix: ComplexMatrix<R>,
    },
    /// `f(t)·A₀`; members commute for all `t`.
    Modulated {
        matrix: ComplexMatrix<R>,
        profile: Profile<R>,
    },
    /// `A₀ + t·A₁`; non-commuting in general.
    Affine {
        a0: ComplexMatrix<R>,
        a1: ComplexMatrix<R>,
    },
    /// Piecewise-linear interpolation of samples sorted by time.
    Table {
        samples: Vec<TableSample<R>>,
    },
    /// A discretized differential operator from the refinement lab.
    Builtin {
        family: FamilyKind,
        n: usize,
        #[serde(default)]
        params: FamilyParams<R>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
struct RawSpec<R: Real> {
    id: String,
    dim: usize,
    #[serde(default = "default_horizon")]
    horizon: R,
    kind: GeneratorKind<R>,
}

fn default_horizon<R: Real>() -> R {
    R::one()
}

/// A time-dependent generator family `t ↦ A(t)` on `[0, T]`.
///
/// Immutable after construction; built-in families are materialized once.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSpec<R>", into = "RawSpec<R>", bound = "")]
pub struct GeneratorSpec<R: Real> {
    id: String,
    dim: usize,
    horizon: R,
    kind: GeneratorKind<R>,
    resolved: Resolved<R>,
}

#[derive(Debug, Clone, PartialEq)]
enum Resolved<R: Real> {
    Fixed(ComplexMatrix<R>),
    Modulated(ComplexMatrix<R>, Profile<R>),
    Affine(ComplexMatrix<R>, ComplexMatrix<R>),
    Table(Vec<TableSample<R>>),
}

impl<R: Real> GeneratorSpec<R> {
    pub fn new(id: impl Into<String>, horizon: R, kind: GeneratorKind<R>) -> Result<Self> {
        if !(horizon > R::zero()) {
            return Err(Error::InvalidInput(format!("horizon {horizon} must be positive")));
        }
        let resolved = match &kind {
            GeneratorKind::Constant { matrix } => Resolved::Fixed(matrix.clone()),
            GeneratorKind::Modulated { matrix, profile } => Resolved::Modulated(matrix.clone(), *profile),
            GeneratorKind::Affine { a0, a1 } => {
                a0.check_same_dim(a1)?;
                Resolved::Affine(a0.clone(), a1.clone())
            }
            GeneratorKind::Table { samples } => {
                if samples.is_empty() {
                    return Err(Error::InvalidInput("generator table is empty".into()));
                }
                if samples.windows(2).any(|w| !(w[0].t < w[1].t)) {
                    return Err(Error::InvalidInput("table times must be strictly increasing".into()));
                }
                for s in samples {
                    samples[0].matrix.check_same_dim(&s.matrix)?;
                }
                Resolved::Table(samples.clone())
            }
            GeneratorKind::Builtin { family, n, params } => {
                let base = lab::operator_matrix(*family, *n, params)?;
                match family.modulation(params) {
                    Some(profile) => Resolved::Modulated(base, profile),
                    None => Resolved::Fixed(base),
                }
            }
        };
        let dim = match &resolved {
            Resolved::Fixed(m) | Resolved::Modulated(m, _) | Resolved::Affine(m, _) => m.dim(),
            Resolved::Table(s) => s[0].matrix.dim(),
        };
        Ok(Self {
            id: id.into(),
            dim,
            horizon,
            kind,
            resolved,
        })
    }

    pub fn constant(id: impl Into<String>, horizon: R, matrix: ComplexMatrix<R>) -> Result<Self> {
        Self::new(id, horizon, GeneratorKind::Constant { matrix })
    }

    pub fn modulated(id: impl Into<String>, horizon: R, matrix: ComplexMatrix<R>, profile: Profile<R>) -> Result<Self> {
        Self::new(id, horizon, GeneratorKind::Modulated { matrix, profile })
    }

    pub fn affine(id: impl Into<String>, horizon: R, a0: ComplexMatrix<R>, a1: ComplexMatrix<R>) -> Result<Self> {
        Self::new(id, horizon, GeneratorKind::Affine { a0, a1 })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn horizon(&self) -> R {
        self.horizon
    }

    pub fn kind(&self) -> &GeneratorKind<R> {
        &self.kind
    }

    /// True when every `A(t)` is a scalar multiple of one matrix.
    pub fn is_commuting(&self) -> bool {
        matches!(self.resolved, Resolved::Fixed(_) | Resolved::Modulated(..))
    }

    pub fn eval(&self, t: R) -> Result<ComplexMatrix<R>> {
        match &self.resolved {
            Resolved::Fixed(m) => Ok(m.clone()),
            Resolved::Modulated(m, profile) => Ok(m.scale_real(profile.value(t))),
            Resolved::Affine(a0, a1) => Ok(a0.axpy(crate::scalar::real(t), a1)),
            Resolved::Table(samples) => interpolate(samples, t),
        }
    }

    /// Largest sampled `‖A(t+δ) − A(t)‖₁/δ` over `samples` equal steps on `[0, T]`.
    pub fn lipschitz_estimate(&self, samples: usize) -> Result<R> {
        let samples = samples.max(1);
        let delta = self.horizon / R::from_usize(samples).unwrap();
        let mut prev = self.eval(R::zero())?;
        let mut worst = R::zero();
        for k in 1..=samples {
            let next = self.eval(delta * R::from_usize(k).unwrap())?;
            worst = worst.max(next.dist_1(&prev) / delta);
            prev = next;
        }
        Ok(worst)
    }
}

fn interpolate<R: Real>(samples: &[TableSample<R>], t: R) -> Result<ComplexMatrix<R>> {
    let first = &samples[0];
    let last = &samples[samples.len() - 1];
    if t < first.t || t > last.t {
        return Err(Error::EvaluationFailure {
            t: t.as_f64(),
            reason: format!("outside table range [{}, {}]", first.t, last.t),
        });
    }
    if samples.len() == 1 {
        return Ok(first.matrix.clone());
    }
    let idx = samples.partition_point(|s| s.t <= t).clamp(1, samples.len() - 1);
    let (lo, hi) = (&samples[idx - 1], &samples[idx]);
    let w = (t - lo.t) / (hi.t - lo.t);
    Ok(lo
        .matrix
        .scale_real(R::one() - w)
        .axpy(crate::scalar::real(w), &hi.matrix))
}

impl<R: Real> TryFrom<RawSpec<R>> for GeneratorSpec<R> {
    type Error = Error;

    fn try_from(raw: RawSpec<R>) -> Result<Self> {
        let spec = GeneratorSpec::new(raw.id, raw.horizon, raw.kind)?;
        if spec.dim != raw.dim {
            return Err(Error::DimensionMismatch {
                expected: raw.dim,
                found: spec.dim,
            });
        }
        Ok(spec)
    }
}

impl<R: Real> From<GeneratorSpec<R>> for RawSpec<R> {
    fn from(spec: GeneratorSpec<R>) -> Self {
        RawSpec {
            id: spec.id,
            dim: spec.dim,
            horizon: spec.horizon,
            kind: spec.kind,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_builtin_and_table() {
        let text = r#"{"id":"adv","dim":8,"horizon":1.0,
            "kind":{"type":"builtin","family":"advection","n":8,"params":{"speed":1.0}}}"#;
        let g: GeneratorSpec<f64> = serde_json::from_str(text).unwrap();
        assert_eq!(g.dim(), 8);
        assert!((g.eval(0.3).unwrap().norm_1() - 8.0).abs() < 1e-12);

        let text = r#"{"id":"tab","dim":1,"horizon":1.0,"kind":{"type":"table","samples":[
            {"t":0.0,"matrix":[[[0.0,0.0]]]},{"t":1.0,"matrix":[[[2.0,0.0]]]}]}}"#;
        let g: GeneratorSpec<f64> = serde_json::from_str(text).unwrap();
        assert!((g.eval(0.25).unwrap()[(0, 0)].re - 0.5).abs() < 1e-15);
        assert!(matches!(g.eval(1.5), Err(Error::EvaluationFailure { .. })));

        let back: GeneratorSpec<f64> = serde_json::from_str(&serde_json::to_string(&g).unwrap()).unwrap();
        assert_eq!(back, g);
    }

    #[test]
    fn declared_dim_checked() {
        let text = r#"{"id":"c","dim":3,"kind":{"type":"constant","matrix":[[[1.0,0.0]]]}}"#;
        assert!(serde_json::from_str::<GeneratorSpec<f64>>(text).is_err());
    }

    #[test]
    fn lipschitz_of_affine_family() {
        let a1 = ComplexMatrix::<f64>::from_real(2, &[0.0, 3.0, 1.0, 0.0]).unwrap();
        let g = GeneratorSpec::affine("aff", 1.0, ComplexMatrix::identity(2), a1).unwrap();
        assert!((g.lipschitz_estimate(10).unwrap() - 3.0).abs() < 1e-12);
        assert!(!g.is_commuting());
    }
}
