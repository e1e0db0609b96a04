//! Commands, configuration handling and file formats.

use jetstokes::fieldspace::{read_field_file, write_field_file, BandLimit, StoredField};
use jetstokes::harness::{cmd_evolve, cmd_project, cmd_solve_mode, cmd_spectrum, RunConfig};
use jetstokes::stokesop::read_matrix;
use jetstokes::{Domain, Error, VectorField};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use std::process::Command;

fn small() -> RunConfig {
    RunConfig::from_toml(
        r#"
        [domain]
        n_r = 12
        n_theta = 4
        n_z = 2

        [spectral]
        modes = [0, 1]
        count = 6

        [sweep]
        modes = [1]
        "#,
    )
    .unwrap()
}

#[test]
fn malformed_configs_are_rejected() {
    for text in [
        "[domain]\nn_r = \"many\"",
        "[domain]\nkappa = -0.5",
        "[spectral]\nmodes = []",
        "[evolution]\nmode = 3\n[domain]\nn_z = 2",
        "[suite]\nresolvent_lambdas = [[0.0, 0.1]]",
        "not toml at all [",
    ] {
        assert!(RunConfig::from_toml(text).is_err(), "accepted {text:?}");
    }
}

#[test]
fn missing_input_file_is_a_tagged_error() {
    let mut cfg = small();
    cfg.solve_mode.input = Some("/nonexistent/f.json".into());
    let dir = tempfile::tempdir().unwrap();
    match cmd_solve_mode(&cfg, dir.path()) {
        Err(Error::Criterion { module, .. }) => assert_eq!(module, "diskspec"),
        other => panic!("expected a tagged error, got {other:?}"),
    }
    assert!(std::fs::read_dir(dir.path()).unwrap().next().is_none(), "no partial outputs");
}

#[test]
fn solve_mode_writes_a_readable_solution() {
    let dir = tempfile::tempdir().unwrap();
    let out = cmd_solve_mode(&small(), dir.path()).unwrap();
    assert!(out.summary.contains("closed-form error"));
    let StoredField::Scalar(u) = read_field_file(&dir.path().join("solution.json")).unwrap() else {
        panic!("scalar expected");
    };
    assert_eq!(u.axial_band(), vec![1]);
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("solve_mode.json")).unwrap()).unwrap();
    assert!(report["relative_error"].as_f64().unwrap() < 1e-8);
}

#[test]
fn project_reads_a_stored_field() {
    let cfg = small();
    let domain = Domain::new(cfg.domain.config()).unwrap();
    let mut rng = ChaCha20Rng::seed_from_u64(3);
    let u = VectorField::random_smooth(&domain, &mut rng, BandLimit::within(&domain, 2), true);
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("u.json");
    write_field_file(&input, &u.into()).unwrap();
    let mut cfg = cfg;
    cfg.project.input = Some(input);
    let out = dir.path().join("out");
    cmd_project(&cfg, &out).unwrap();
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("project.json")).unwrap()).unwrap();
    assert!(report["idempotence"].as_f64().unwrap() < 1e-10);
    assert!(matches!(read_field_file(&out.join("projected.json")).unwrap(), StoredField::Vector(_)));
}

#[test]
fn spectrum_exports_blocks() {
    let mut cfg = small();
    cfg.spectral.export_blocks = true;
    let dir = tempfile::tempdir().unwrap();
    cmd_spectrum(&cfg, dir.path()).unwrap();
    let (h, a) = read_matrix(&dir.path().join("blocks/A_block_n1.json")).unwrap();
    assert_eq!((h.n, h.rows), (1, a.ncols()));
    assert!((&a - a.adjoint()).norm() < 1e-10 * a.norm());
    let csv = std::fs::read_to_string(dir.path().join("eigenvalues.csv")).unwrap();
    assert!(csv.starts_with("n,re_lambda,im_lambda,residual,in_sector"));
    assert_eq!(csv.lines().count(), 1 + 2 * 6);
}

#[test]
fn evolve_writes_one_energy_row_per_step() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small();
    cmd_evolve(&cfg, dir.path()).unwrap();
    let csv = std::fs::read_to_string(dir.path().join("energy.csv")).unwrap();
    let steps = (cfg.evolution.t_final / cfg.evolution.dt).round() as usize;
    assert_eq!(csv.lines().count(), 1 + steps + 1);
    let est: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("estimate.json")).unwrap()).unwrap();
    assert!(est["ratio"].as_f64().unwrap() > 0.0);
}

#[test]
fn cli_reports_bad_input_with_nonzero_exit() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "[[sweep.rays]]\ndirection = [0.0, 1.0]\nt = [0.1]\n").unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_jetstokes"))
        .args(["resolvent-sweep", "--config"])
        .arg(&cfg)
        .output()
        .unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("epsilon"));

    let missing = Command::new(env!("CARGO_BIN_EXE_jetstokes"))
        .args(["spectrum", "--config", "/nonexistent/run.toml"])
        .output()
        .unwrap();
    assert!(!missing.status.success());
}

#[test]
fn cli_solve_mode_succeeds() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_jetstokes"))
        .args(["solve-mode", "--seed", "7", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.path().join("solution.json").exists());
}
