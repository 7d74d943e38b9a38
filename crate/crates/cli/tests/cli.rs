use std::path::Path;
use std::process::{Command, Output};

use opcalc_cli::{exit, run_sweep, run_verify, run_vn_demo, CampaignConfig, CliError, Format, Suite, SweepSpec};

fn opcalc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_opcalc"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn matfun_suite_passes_with_exit_zero() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "cfg.json", r#"{"seed": 42, "suites": ["matfun"]}"#);
    let out = dir.path().join("report.json");
    let run = opcalc(&["verify", "--config", &cfg, "--out", out.to_str().unwrap(), "-q"]);
    assert_eq!(
        run.status.code(),
        Some(exit::PASS),
        "{}",
        String::from_utf8_lossy(&run.stderr)
    );
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap();
    assert_eq!(report["all_pass"], true);
    assert_eq!(report["reports"].as_array().unwrap().len(), 12);
}

#[test]
fn empty_suites_is_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "cfg.json", r#"{"suites": []}"#);
    let run = opcalc(&["verify", "--config", &cfg]);
    assert_eq!(run.status.code(), Some(exit::ERROR));
    assert!(String::from_utf8_lossy(&run.stderr).contains("`suites`"));
    let parsed = CampaignConfig::from_json(r#"{"suites": []}"#);
    assert!(matches!(parsed, Err(CliError::Config { .. })));
}

#[test]
fn unwritable_output_is_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("no/such/dir/report.json");
    let run = opcalc(&["verify", "--suite", "matfun", "--out", missing.to_str().unwrap()]);
    assert_eq!(run.status.code(), Some(exit::ERROR));
    assert!(String::from_utf8_lossy(&run.stderr).contains("i/o error"));
}

#[test]
fn failing_cases_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "cfg.json",
        r#"{"suites": ["matfun"], "dims": [2], "samples": 3, "tolerances": {"log_round_trip": 0.0}}"#,
    );
    let run = opcalc(&["verify", "--config", &cfg, "-q", "--format", "csv"]);
    assert_eq!(run.status.code(), Some(exit::FAIL));
    let csv = String::from_utf8(run.stdout).unwrap();
    assert!(csv.starts_with("suite,case,paper_anchor,residual,tolerance,pass,runtime_ms\n"));
    assert!(csv
        .lines()
        .any(|l| l.contains("log_round_trip") && l.ends_with(",false,0.0000000000000000e0")));
}

#[test]
fn sweep_rows_and_ratios() {
    let spec = SweepSpec {
        dims: vec![8, 16, 32],
        ..SweepSpec::default()
    };
    let (report, csv) = run_sweep(&spec, Format::Csv).unwrap();
    assert_eq!(csv.lines().count(), 4);
    let ratios: Vec<f64> = report.rows.iter().map(|r| r.norm_gen_ratio).collect();
    assert_eq!(ratios, [1.0, 4.0, 16.0]);
}

#[test]
fn singleton_sweep_is_valid() {
    let spec = SweepSpec {
        dims: vec![4],
        ..SweepSpec::default()
    };
    let (report, _) = run_sweep(&spec, Format::Csv).unwrap();
    assert_eq!(report.rows.len(), 1);
    assert!(report.invariants_hold());
}

#[test]
fn sweep_with_tiny_grid_is_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "cfg.json", r#"{"sweep": {"dims": [2, 8]}}"#);
    let run = opcalc(&["sweep", "--config", &cfg]);
    assert_eq!(run.status.code(), Some(exit::ERROR));
    assert!(String::from_utf8_lossy(&run.stderr).contains("sweep.dims"));
}

#[test]
fn sweep_cli_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "cfg.json", r#"{"sweep": {"dims": [8, 16]}}"#);
    let out = dir.path().join("sweep.csv");
    let run = opcalc(&["sweep", "--config", &cfg, "--out", out.to_str().unwrap(), "-q"]);
    assert_eq!(run.status.code(), Some(exit::PASS));
    let csv = std::fs::read_to_string(out).unwrap();
    assert!(csv.starts_with("n,normA,normA_ratio,norm_a,kappa,residual_naive,residual_thm2,residual_eq6\n"));
}

#[test]
fn vn_demo_default_and_stationary() {
    let cfg = CampaignConfig::default();
    let demo = run_vn_demo(&cfg.von_neumann, &cfg.tolerances).unwrap();
    assert!(demo.reports.iter().all(|r| r.pass));
    assert_eq!(demo.trajectory_csv().lines().count(), 21);

    let stationary = CampaignConfig::from_json(
        r#"{"von_neumann": {"hamiltonian": [[[1,0],[0,0]],[[0,0],[-1,0]]],
                            "rho0": [[[0.75,0],[0,0]],[[0,0],[0.25,0]]]}}"#,
    )
    .unwrap();
    let demo = run_vn_demo(&stationary.von_neumann, &stationary.tolerances).unwrap();
    assert!(
        demo.trajectory.max_residual <= 1e-10,
        "{}",
        demo.trajectory.max_residual
    );
}

#[test]
fn vn_demo_rejects_bad_inputs() {
    let not_hermitian =
        CampaignConfig::from_json(r#"{"von_neumann": {"hamiltonian": [[[0,0],[1,0]],[[0,0],[0,0]]]}}"#).unwrap();
    assert!(matches!(
        run_vn_demo(&not_hermitian.von_neumann, &not_hermitian.tolerances),
        Err(CliError::Config { .. })
    ));
    let bad_trace =
        CampaignConfig::from_json(r#"{"von_neumann": {"rho0": [[[0,0],[0.5,0]],[[0.5,0],[0,0]]]}}"#).unwrap();
    assert!(matches!(
        run_vn_demo(&bad_trace.von_neumann, &bad_trace.tolerances),
        Err(CliError::Config { .. })
    ));
}

#[test]
fn bch_verb_prints_truncations() {
    let dir = tempfile::tempdir().unwrap();
    let x = write(
        dir.path(),
        "x.json",
        "[[[0,0],[0.1,0],[0,0]],[[0,0],[0,0],[0,0]],[[0,0],[0,0],[0,0]]]",
    );
    let y = write(
        dir.path(),
        "y.json",
        "[[[0,0],[0,0],[0,0]],[[0,0],[0,0],[0.2,0]],[[0,0],[0,0],[0,0]]]",
    );
    let run = opcalc(&["bch", &x, &y]);
    assert_eq!(run.status.code(), Some(exit::PASS));
    let v: serde_json::Value = serde_json::from_slice(&run.stdout).unwrap();
    let truncations = v["truncations"].as_array().unwrap();
    assert_eq!(truncations.len(), 4);
    // Heisenberg pair: the series stops after the first commutator.
    assert!(truncations[1]["residual"].as_f64().unwrap() < 1e-14);
    assert!((v["log_product"][0][2][0].as_f64().unwrap() - 0.01).abs() < 1e-14);
}

#[test]
fn suite_filter_does_not_change_results() {
    let all = run_verify(&CampaignConfig {
        suites: vec![Suite::Matfun, Suite::Evolution],
        dims: vec![2, 4],
        samples: 4,
        ..CampaignConfig::default()
    })
    .unwrap();
    let only = run_verify(&CampaignConfig {
        suites: vec![Suite::Evolution],
        dims: vec![2, 4],
        samples: 4,
        ..CampaignConfig::default()
    })
    .unwrap();
    let evolution: Vec<_> = all.into_iter().filter(|r| r.suite == "evolution").collect();
    assert_eq!(evolution, only);
}
