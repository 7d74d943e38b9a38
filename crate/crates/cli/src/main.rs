use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use opcalc_cli::{
    exit, load_config, render_reports, run_bch, run_sweep, run_verify, run_vn_demo, CliError, Format, Sink, Suite,
};

#[derive(Parser)]
#[command(
    name = "opcalc",
    version,
    about = "Verify regularized logarithm and BCH identities for evolution operators"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Campaign configuration (JSON); built-in defaults when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output file; stdout when omitted and the config names none.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Suppress per-case progress lines on stderr.
    #[arg(short, long)]
    quiet: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Run verification suites and write a report.
    Verify {
        #[command(flatten)]
        common: Common,
        /// Restrict to these suites (repeatable).
        #[arg(long = "suite", value_enum)]
        suites: Vec<Suite>,
        /// Override the campaign seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Evolve a density matrix and check the log/commutator form of the von Neumann equation.
    VnDemo {
        #[command(flatten)]
        common: Common,
    },
    /// Run the mesh-refinement sweep.
    Sweep {
        #[command(flatten)]
        common: Common,
    },
    /// Print Log(e^X e^Y) and its BCH truncations for two matrix files.
    Bch {
        /// JSON matrix file for X.
        x: PathBuf,
        /// JSON matrix file for Y (same dimension as X).
        y: PathBuf,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn destination(common: &Common, cfg: &opcalc_cli::CampaignConfig) -> (Option<PathBuf>, Option<Format>) {
    let out = common
        .out
        .clone()
        .or_else(|| cfg.output.as_ref().map(|o| o.path.clone()));
    let format = common.format.or_else(|| cfg.output.as_ref().map(|o| o.format));
    (out, format)
}

fn run(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::Verify { common, suites, seed } => {
            let mut cfg = load_config(common.config.as_deref())?;
            if !suites.is_empty() {
                cfg.suites = suites;
            }
            if let Some(seed) = seed {
                cfg.seed = seed;
            }
            cfg.validate()?;
            let (out, format) = destination(&common, &cfg);
            let sink = Sink::open(out.as_deref())?;
            let reports = run_verify(&cfg)?;
            if !common.quiet {
                for r in &reports {
                    eprintln!("{}", r.line());
                }
            }
            sink.write(&render_reports(cfg.seed, &reports, format.unwrap_or(Format::Json)))?;
            Ok(if reports.iter().all(|r| r.pass) {
                exit::PASS
            } else {
                exit::FAIL
            })
        }
        Command::VnDemo { common } => {
            let cfg = load_config(common.config.as_deref())?;
            let (out, format) = destination(&common, &cfg);
            let sink = Sink::open(out.as_deref())?;
            let demo = run_vn_demo(&cfg.von_neumann, &cfg.tolerances)?;
            if !common.quiet {
                for r in &demo.reports {
                    eprintln!("{}", r.line());
                }
            }
            let text = match format.unwrap_or(Format::Csv) {
                Format::Csv => demo.trajectory_csv(),
                Format::Json => render_reports(cfg.seed, &demo.reports, Format::Json),
            };
            sink.write(&text)?;
            Ok(if demo.reports.iter().all(|r| r.pass) {
                exit::PASS
            } else {
                exit::FAIL
            })
        }
        Command::Sweep { common } => {
            let cfg = load_config(common.config.as_deref())?;
            let (out, format) = destination(&common, &cfg);
            let sink = Sink::open(out.as_deref())?;
            let (report, text) = run_sweep(&cfg.sweep, format.unwrap_or(Format::Csv))?;
            sink.write(&text)?;
            let ok = report.invariants_hold();
            if !common.quiet {
                eprintln!(
                    "{} sweep: growth slope {:.4}, band ratio {:.4}",
                    if ok { "PASS" } else { "FAIL" },
                    report.growth_slope,
                    report.band_ratio
                );
            }
            Ok(if ok { exit::PASS } else { exit::FAIL })
        }
        Command::Bch { x, y, out } => {
            let sink = Sink::open(out.as_deref())?;
            sink.write(&run_bch(&x, &y)?)?;
            Ok(exit::PASS)
        }
    }
}

fn main() -> ExitCode {
    let code = match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit::ERROR
        }
    };
    ExitCode::from(code as u8)
}
