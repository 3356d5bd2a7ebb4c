use std::path::Path;
use std::process::{Command, Output};

use ptcd_experiments::config::ExperimentConfig;
use ptcd_experiments::schema::validate_dir;

fn ptcd(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ptcd")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn runs_and_lists_valid_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = ptcd(&["--experiment", "encircle", "--out", out, "--direction", "ccw", "--cd", "hermitian"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let listed: Vec<String> = String::from_utf8(o.stdout).unwrap().lines().map(String::from).collect();
    let names: Vec<&str> = listed.iter().map(|p| Path::new(p).file_name().unwrap().to_str().unwrap()).collect();
    assert_eq!(
        names,
        ["trajectory_ccw_hermitian.csv", "drive_ccw_hermitian.csv", "adiabaticity_ccw.csv", "summary.json"]
    );
    assert_eq!(validate_dir(dir.path()).unwrap().len(), 4);
    let o = ptcd(&["--experiment", "encircle", "--out", out, "--validate"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
}

#[test]
fn config_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let cases: [&[&str]; 6] = [
        &["--out", out],
        &["--experiment", "encircle", "--out", out, "--period", "-0.2"],
        &["--experiment", "encircle", "--out", out, "--gamma-e", "1.37"],
        &["--experiment", "encircle", "--out", out, "--gamma-e", "1.0", "--gamma-f", "2.0"],
        &["--experiment", "encircle", "--out", out, "--direction", "up"],
        &["--experiment", "spiral", "--out", out],
    ];
    for args in cases {
        let o = ptcd(args);
        assert_eq!(code(&o), 2, "{args:?}: {}", stderr(&o));
    }
    let o = ptcd(&["--experiment", "encircle", "--out", out, "--gamma-e", "1.37"]);
    assert!(stderr(&o).contains("physical.gamma_f"), "{}", stderr(&o));

    let cfg = dir.path().join("both.toml");
    std::fs::write(&cfg, "experiment = \"encircle\"\n[physical]\ngamma_e = 1.37\ngamma_f = 0.21\nkappa = 0.29\n")
        .unwrap();
    let o = ptcd(&["--config", cfg.to_str().unwrap(), "--out", out]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("physical.kappa"));
}

#[test]
fn numerical_failures_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    // the loop's turning point sits on the EP
    let o = ptcd(&["--experiment", "encircle", "--out", out, "--kappa", "0.25", "--jmin", "0.25"]);
    assert_eq!(code(&o), 3, "{}", stderr(&o));
    assert!(stderr(&o).contains("numerical"));
}

#[test]
fn print_config_round_trips() {
    let o = ptcd(&[
        "--experiment",
        "period_sweep",
        "--dt",
        "1e-5",
        "--delta-amp",
        "-31.41592653589793",
        "--jmin",
        "-0.5",
        "--max-drive-amp",
        "80",
        "--print-config",
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = String::from_utf8(o.stdout).unwrap();
    let c = ExperimentConfig::parse(&text).unwrap();
    assert_eq!(c.integration.dt, Some(1e-5));
    assert_eq!(c.schedule.delta_amp, Some(-10.0 * std::f64::consts::PI));
    assert_eq!(c.schedule.j_min, Some(-0.5));
    assert_eq!(c.to_toml(), text);
}

#[test]
fn validate_rejects_foreign_files() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("trajectory_cw_none.csv"), "t,x\n0,1\n").unwrap();
    let o = ptcd(&["--experiment", "encircle", "--out", dir.path().to_str().unwrap(), "--validate"]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("header"));
}
