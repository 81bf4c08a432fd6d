mod common;

use std::process::{Command, Output};

use common::config_path;

fn aggsolve(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_aggsolve")).args(args).output().unwrap()
}

#[test]
fn solve_prints_a_json_report() {
    let cfg = config_path("finite_coupled");
    let out = aggsolve(&["solve", "--config", cfg.to_str().unwrap(), "--tol", "1e-9"]);
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["converged"], true);
    assert_eq!(report["x_hat"].as_array().unwrap().len(), 4);
    assert_eq!(report["X_hat"].as_array().unwrap().len(), 2);
}

#[test]
fn malformed_config_exits_with_two_and_a_position() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, "{\n  \"T\": 1,\n  \"C\": [[1]\n}\n").unwrap();
    let out = aggsolve(&["solve", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 4"), "{err}");
}

#[test]
fn non_convergence_exits_with_three_and_keeps_rows() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("rows.csv");
    let cfg = config_path("interval_jump");
    let out = aggsolve(&[
        "sweep",
        "--config",
        cfg.to_str().unwrap(),
        "--nu",
        "2,4",
        "--max-iter",
        "1",
        "--out",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3));
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("nu,I,delta_bar,eps_bar,D,lambda_bar,L_f,K_A,alpha,beta,Omega,"));
    assert_eq!(text.lines().count(), 3);
}

#[test]
fn sweep_rows_stay_below_their_bounds() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("rows.csv");
    let cfg = config_path("box_meshgrid");
    let out = aggsolve(&[
        "sweep",
        "--config",
        cfg.to_str().unwrap(),
        "--nu",
        "2,4,8",
        "--out",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let mut reader = csv::Reader::from_path(&csv).unwrap();
    let headers = reader.headers().unwrap().clone();
    let col = |name: &str| headers.iter().position(|h| h == name).unwrap();
    for rec in reader.records() {
        let rec = rec.unwrap();
        let get = |name: &str| rec[col(name)].parse::<f64>().unwrap();
        assert_eq!(&rec[col("applicable")], "true");
        assert!(get("err_agg") <= get("bound_agg") + 1e-9);
        assert!(get("err_profile") <= get("bound_profile") + 1e-9);
        assert_eq!(&rec[col("lambda_bar")], "");
    }
}

#[test]
fn vne_sweep_fills_lambda_bar() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("rows.csv");
    let cfg = config_path("smartgrid");
    let out = aggsolve(&[
        "sweep",
        "--config",
        cfg.to_str().unwrap(),
        "--nu",
        "2,4",
        "--vne",
        "--out",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let mut reader = csv::Reader::from_path(&csv).unwrap();
    for rec in reader.records() {
        let rec = rec.unwrap();
        assert!(rec[5].parse::<f64>().unwrap() > 0.0);
        // smart-grid profiles have no profile bound
        assert_eq!(&rec[13], "");
        assert_eq!(&rec[14], "");
    }
}

#[test]
fn smartgrid_command_reports_the_closed_form() {
    let out = aggsolve(&["smartgrid", "--aO", "1", "--aP", "2", "--Emax", "20", "--N", "3e7", "--I", "10"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["X_star"][0], 2e8);
    let err = v["err_analytic"].as_f64().unwrap();
    assert!((err - 5f64.sqrt() / 3.0 * 3e7).abs() < 1e-3);
    assert!((v["err_solved"].as_f64().unwrap() - err).abs() <= 1e-6 * err);

    let bad = aggsolve(&["smartgrid", "--aO", "2", "--aP", "1"]);
    assert_eq!(bad.status.code(), Some(2));
}
