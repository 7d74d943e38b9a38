use std::path::PathBuf;

use opcalc::bch::VonNeumannConfig;
use opcalc::lab::{FamilyKind, FamilyParams, SweepOptions, WorkBudget};
use opcalc::matfun::FdConfig;
use opcalc::ComplexMatrix;
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const MAX_DIM: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum Suite {
    Matfun,
    Evolution,
    Logrep,
    Bch,
    VonNeumann,
    Sweep,
}

impl Suite {
    pub const ALL: [Suite; 6] = [
        Suite::Matfun,
        Suite::Evolution,
        Suite::Logrep,
        Suite::Bch,
        Suite::VonNeumann,
        Suite::Sweep,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Matfun => "matfun",
            Suite::Evolution => "evolution",
            Suite::Logrep => "logrep",
            Suite::Bch => "bch",
            Suite::VonNeumann => "von_neumann",
            Suite::Sweep => "sweep",
        }
    }

    /// Per-suite stream offset, so filtering suites never changes a result.
    pub(crate) fn salt(self) -> u64 {
        0x9e37_79b9_7f4a_7c15u64.wrapping_mul(self as u64 + 1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub path: PathBuf,
    #[serde(default)]
    pub format: Format,
}

/// Thresholds of every verification case; a config may override any subset.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub log_round_trip: f64,
    pub contour_agreement: f64,
    pub sqrt_round_trip: f64,
    pub propagation: f64,
    pub semigroup: f64,
    pub growth_bound: f64,
    pub defining_relation: f64,
    pub recovery: f64,
    pub asymmetry_zero: f64,
    pub asymmetry_min_gap: f64,
    pub bch_slope: f64,
    pub adjoint_series: f64,
    pub regularized_bch_slope: f64,
    pub generalized_bch_first: f64,
    pub generalized_bch_second: f64,
    pub vn_frozen: f64,
    pub vn_commuting: f64,
    pub vn_antisymmetry: f64,
    pub vn_demo: f64,
    pub trace_drift: f64,
    pub sweep_slope: f64,
    pub sweep_band: f64,
    pub sweep_regularized_bch: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            log_round_trip: 1e-8,
            contour_agreement: 1e-8,
            sqrt_round_trip: 1e-10,
            propagation: 1e-8,
            semigroup: 1e-6,
            growth_bound: 1e-9,
            defining_relation: 1e-9,
            recovery: 1e-5,
            asymmetry_zero: 1e-10,
            asymmetry_min_gap: 0.1,
            bch_slope: 0.3,
            adjoint_series: 1e-8,
            regularized_bch_slope: 0.3,
            generalized_bch_first: 1e-7,
            generalized_bch_second: 1e-5,
            vn_frozen: 1e-5,
            vn_commuting: 1e-8,
            vn_antisymmetry: 2e-6,
            vn_demo: 1e-5,
            trace_drift: 1e-9,
            sweep_slope: 0.2,
            sweep_band: 4.0,
            sweep_regularized_bch: 1e-2,
        }
    }
}

/// Mesh-refinement sweep parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSpec {
    pub kind: FamilyKind,
    pub params: FamilyParams<f64>,
    pub dims: Vec<usize>,
    pub t: f64,
    pub s: f64,
    pub budget: WorkBudget,
    pub options: SweepOptions<f64>,
}

impl Default for SweepSpec {
    fn default() -> Self {
        Self {
            kind: FamilyKind::Diffusion,
            params: FamilyParams {
                viscosity: 0.01,
                ..FamilyParams::default()
            },
            dims: vec![8, 16, 32, 64],
            t: 0.5,
            s: 0.0,
            budget: WorkBudget::default(),
            options: SweepOptions::default(),
        }
    }
}

/// von Neumann demo: `H`, `ρ₀`, and an evenly spaced time grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VnDemoSpec {
    pub hamiltonian: ComplexMatrix<f64>,
    pub rho0: ComplexMatrix<f64>,
    pub t_end: f64,
    pub points: usize,
    pub config: VonNeumannConfig<f64>,
}

impl Default for VnDemoSpec {
    fn default() -> Self {
        Self {
            hamiltonian: ComplexMatrix::from_real_diag(&[1.0, -1.0]),
            rho0: ComplexMatrix::from_real(2, &[0.5, 0.5, 0.5, 0.5]).expect("2x2"),
            t_end: 1.9,
            points: 20,
            // A wider stencil with an extra extrapolation level keeps the
            // 1/h² rounding amplification of second differences near 1e-11.
            config: VonNeumannConfig {
                fd: FdConfig::new(1e-2, 2),
                ..VonNeumannConfig::default()
            },
        }
    }
}

impl VnDemoSpec {
    pub fn grid(&self) -> Vec<f64> {
        match self.points {
            0 => Vec::new(),
            1 => vec![0.0],
            p => (0..p).map(|k| self.t_end * k as f64 / (p - 1) as f64).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CampaignConfig {
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_suites")]
    pub suites: Vec<Suite>,
    /// Matrix sizes for the random test sets.
    #[serde(default = "default_dims")]
    pub dims: Vec<usize>,
    /// Random samples per size.
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub output: Option<OutputSpec>,
    #[serde(default)]
    pub sweep: SweepSpec,
    #[serde(default)]
    pub von_neumann: VnDemoSpec,
    /// Record wall-clock times; off by default so reports are reproducible.
    #[serde(default)]
    pub timings: bool,
}

fn default_seed() -> u64 {
    42
}

fn default_suites() -> Vec<Suite> {
    Suite::ALL.to_vec()
}

fn default_dims() -> Vec<usize> {
    vec![2, 4, 8, 16]
}

fn default_samples() -> usize {
    50
}

impl Default for CampaignConfig {
    fn default() -> Self {
        Self {
            seed: default_seed(),
            suites: default_suites(),
            dims: default_dims(),
            samples: default_samples(),
            tolerances: Tolerances::default(),
            output: None,
            sweep: SweepSpec::default(),
            von_neumann: VnDemoSpec::default(),
            timings: false,
        }
    }
}

impl CampaignConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| CliError::Config {
            field: None,
            line: Some(e.line()),
            message: e.to_string(),
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.suites.is_empty() {
            return Err(CliError::field("suites", "at least one suite must be selected"));
        }
        if self.dims.is_empty() {
            return Err(CliError::field("dims", "at least one dimension is required"));
        }
        if let Some(&n) = self.dims.iter().find(|&&n| n == 0 || n > MAX_DIM) {
            return Err(CliError::field("dims", format!("dimension {n} outside 1..={MAX_DIM}")));
        }
        if self.samples == 0 {
            return Err(CliError::field("samples", "must be positive"));
        }
        if let Some(&n) = self.sweep.dims.iter().find(|&&n| n > MAX_DIM) {
            return Err(CliError::field(
                "sweep.dims",
                format!("dimension {n} exceeds {MAX_DIM}"),
            ));
        }
        Ok(())
    }

    /// Suites in canonical order without duplicates.
    pub fn selected_suites(&self) -> Vec<Suite> {
        let mut suites = self.suites.clone();
        suites.sort();
        suites.dedup();
        suites
    }
}
