//! Configuration-driven verification campaigns, demos and sweeps.

pub mod config;
pub mod report;
mod suites;

use std::fmt::Write as _;
use std::fs::File;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use opcalc::bch::{bch_truncated, log_product, von_neumann_rhs, VnReport};
use opcalc::lab::SweepReport;
use opcalc::numfmt::sig17;
use opcalc::CMatrix64;
use serde::Serialize;

pub use config::{CampaignConfig, Format, OutputSpec, Suite, SweepSpec, Tolerances, VnDemoSpec};
pub use report::VerificationReport;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error{}{}: {message}", line.map(|l| format!(" at line {l}")).unwrap_or_default(), field.as_ref().map(|f| format!(" in `{f}`")).unwrap_or_default())]
    Config {
        field: Option<String>,
        line: Option<usize>,
        message: String,
    },
    #[error("i/o error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Compute(#[from] opcalc::Error),
}

impl CliError {
    pub fn field(field: &str, message: impl Into<String>) -> Self {
        CliError::Config {
            field: Some(field.to_string()),
            line: None,
            message: message.into(),
        }
    }

    fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}

/// Exit status contract: 0 when everything passed, 1 on failed checks,
/// 2 when the run could not be carried out.
pub mod exit {
    pub const PASS: i32 = 0;
    pub const FAIL: i32 = 1;
    pub const ERROR: i32 = 2;
}

pub fn load_config(path: Option<&Path>) -> Result<CampaignConfig, CliError> {
    match path {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| CliError::io(p, e))?;
            CampaignConfig::from_json(&text)
        }
        None => Ok(CampaignConfig::default()),
    }
}

/// Opens the destination before any work so an unwritable path fails fast.
pub struct Sink {
    target: Option<(PathBuf, File)>,
}

impl Sink {
    pub fn open(path: Option<&Path>) -> Result<Self, CliError> {
        let target = match path {
            Some(p) => Some((p.to_path_buf(), File::create(p).map_err(|e| CliError::io(p, e))?)),
            None => None,
        };
        Ok(Self { target })
    }

    pub fn write(self, text: &str) -> Result<(), CliError> {
        match self.target {
            Some((path, mut file)) => file.write_all(text.as_bytes()).map_err(|e| CliError::io(&path, e)),
            None => {
                print!("{text}");
                Ok(())
            }
        }
    }
}

/// Runs the selected suites in canonical order; reports are sorted by `(suite, case)`.
pub fn run_verify(cfg: &CampaignConfig) -> Result<Vec<VerificationReport>, CliError> {
    cfg.validate()?;
    let mut reports = Vec::new();
    for suite in cfg.selected_suites() {
        reports.extend(suites::run(suite, cfg)?);
    }
    report::canonical_order(&mut reports);
    Ok(reports)
}

pub fn render_reports(seed: u64, reports: &[VerificationReport], format: Format) -> String {
    match format {
        Format::Json => report::to_json(seed, reports),
        Format::Csv => report::to_csv(reports),
    }
}

const HERMITIAN_TOL: f64 = 1e-12;
const TRACE_TOL: f64 = 1e-9;

pub struct VnDemoOutput {
    pub reports: Vec<VerificationReport>,
    pub trajectory: VnReport<f64>,
}

impl VnDemoOutput {
    /// `t`, real and imaginary parts of each `ρ_ij` (row-major), residual, trace drift.
    pub fn trajectory_csv(&self) -> String {
        let n = self.trajectory.points.first().map_or(0, |p| p.rho.dim());
        let mut out = String::from("t");
        for i in 0..n {
            for j in 0..n {
                write!(out, ",rho{i}{j}_re,rho{i}{j}_im").expect("writing to a String");
            }
        }
        out.push_str(",residual,trace_drift\n");
        for p in &self.trajectory.points {
            out.push_str(&sig17(p.t));
            for z in p.rho.as_slice() {
                write!(out, ",{},{}", sig17(z.re), sig17(z.im)).expect("writing to a String");
            }
            writeln!(out, ",{},{}", sig17(p.residual), sig17(p.trace_drift)).expect("writing to a String");
        }
        out
    }
}

pub fn run_vn_demo(spec: &VnDemoSpec, tol: &Tolerances) -> Result<VnDemoOutput, CliError> {
    let h = &spec.hamiltonian;
    if h.dim() != spec.rho0.dim() {
        return Err(CliError::field(
            "von_neumann.rho0",
            "dimension differs from the Hamiltonian",
        ));
    }
    if h.dist_1(&h.adjoint()) > HERMITIAN_TOL * h.norm_1().max(1.0) {
        return Err(CliError::field("von_neumann.hamiltonian", "must be Hermitian"));
    }
    let trace = spec.rho0.trace();
    if (trace - opcalc::C64::new(1.0, 0.0)).norm() > TRACE_TOL {
        return Err(CliError::field(
            "von_neumann.rho0",
            format!("trace is {trace}, expected 1"),
        ));
    }
    if spec.points == 0 {
        return Err(CliError::field("von_neumann.points", "must be positive"));
    }
    spec.config
        .validate()
        .map_err(|e| CliError::field("von_neumann.config", e.to_string()))?;
    let trajectory = von_neumann_rhs(&spec.rho0, h, &spec.config, &spec.grid())?;
    let suite = Suite::VonNeumann.name();
    let mut reports: Vec<VerificationReport> = trajectory
        .points
        .iter()
        .enumerate()
        .map(|(k, p)| {
            VerificationReport::new(
                suite,
                format!("demo/t{k:03}"),
                "von-neumann-equation",
                p.residual,
                tol.vn_demo,
            )
        })
        .collect();
    reports.push(VerificationReport::new(
        suite,
        "demo/trace_drift",
        "von-neumann-equation",
        trajectory.max_trace_drift,
        tol.trace_drift,
    ));
    Ok(VnDemoOutput { reports, trajectory })
}

/// Runs the configured refinement sweep; bad grid sizes are config errors.
pub fn sweep_report(spec: &SweepSpec) -> Result<SweepReport<f64>, CliError> {
    suites::run_sweep_spec(spec).map_err(|e| match e {
        opcalc::Error::InvalidSize(n) => CliError::field(
            "sweep.dims",
            format!("grid size {n} is below the minimum of {}", opcalc::lab::MIN_GRID),
        ),
        opcalc::Error::InvalidInput(msg) => CliError::field("sweep", msg),
        other => CliError::Compute(other),
    })
}

pub fn run_sweep(spec: &SweepSpec, format: Format) -> Result<(SweepReport<f64>, String), CliError> {
    let report = sweep_report(spec)?;
    let text = match format {
        Format::Csv => report.to_csv(),
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&report).expect("sweep report serializes");
            s.push('\n');
            s
        }
    };
    Ok((report, text))
}

#[derive(Serialize)]
struct Truncation {
    order: usize,
    matrix: CMatrix64,
    residual: f64,
}

#[derive(Serialize)]
struct BchOutput {
    log_product: CMatrix64,
    truncations: Vec<Truncation>,
}

fn read_matrix(path: &Path) -> Result<CMatrix64, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| CliError::Config {
        field: Some(path.display().to_string()),
        line: Some(e.line()),
        message: e.to_string(),
    })
}

/// `Log(e^X e^Y)` and its truncations of order 1–4 with their residuals.
pub fn run_bch(x_path: &Path, y_path: &Path) -> Result<String, CliError> {
    let x = read_matrix(x_path)?;
    let y = read_matrix(y_path)?;
    if x.dim() != y.dim() {
        return Err(CliError::field(
            &y_path.display().to_string(),
            format!("dimension {} differs from {}", y.dim(), x.dim()),
        ));
    }
    let exact = log_product(&x, &y)?;
    let truncations = (1..=4)
        .map(|order| {
            let matrix = bch_truncated(&x, &y, order)?;
            let residual = matrix.dist_1(&exact);
            Ok(Truncation {
                order,
                matrix,
                residual,
            })
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let mut out = serde_json::to_string_pretty(&BchOutput {
        log_product: exact,
        truncations,
    })
    .expect("bch output serializes");
    out.push('\n');
    Ok(out)
}
