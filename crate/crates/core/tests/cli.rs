use std::fs;
use std::process::{Command, Output};

use pilotopt::harness::{read_sweep_csv, SWEEP_HEADER};
use pilotopt::PilotMatrix;

fn pilotopt(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pilotopt"))
        .args(args)
        .output()
        .expect("run pilotopt")
}

fn stdout(out: &Output) -> String {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn sweep_snr_csv() {
    let text = stdout(&pilotopt(&["sweep-snr", "--snr-db", "-6,0,6", "--trials", "300"]));
    assert_eq!(text.lines().next().unwrap(), SWEEP_HEADER);
    let rows = read_sweep_csv(&text).unwrap();
    assert_eq!(rows.len(), 6);
    for r in &rows {
        assert!(r.deviation_in_stderr().unwrap() < 4.0, "{r:?}");
    }
}

#[test]
fn analytic_only_json_and_mode() {
    let text = stdout(&pilotopt(&[
        "sweep-snr",
        "--analytic-only",
        "--mode",
        "proposed",
        "--format",
        "json",
        "--snr-db",
        "0,10",
    ]));
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    let rows = v.as_array().unwrap();
    assert_eq!(rows.len(), 2);
    assert!(rows.iter().all(|r| r["algorithm"] == "proposed" && r["wsmse_empirical"].is_null()));
}

#[test]
fn sweep_n_svg_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("n.svg");
    stdout(&pilotopt(&[
        "sweep-n",
        "--analytic-only",
        "--n",
        "1,2,4,8",
        "--format",
        "svg",
        "--out",
        path.to_str().unwrap(),
    ]));
    let svg = fs::read_to_string(&path).unwrap();
    assert!(svg.starts_with("<svg") || svg.starts_with("<?xml"));
    // one polyline per (algorithm, SNR) series
    assert_eq!(svg.matches("<polyline").count(), 4);
}

#[test]
fn convergence_csv_all_inits() {
    let text = stdout(&pilotopt(&["convergence", "--init", "all"]));
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "init,update_index,objective");
    let inits: std::collections::BTreeSet<&str> = lines.map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(inits.into_iter().collect::<Vec<_>>(), ["dft-k", "dft-reuse", "random"]);
}

#[test]
fn optimize_writes_pilots_for_gains_file() {
    let dir = tempfile::tempdir().unwrap();
    let gains = dir.path().join("gains.txt");
    fs::write(&gains, "# four users\n0.2\n0.9\n\n0.5\n0.7\n").unwrap();
    let pilots = dir.path().join("x.txt");
    stdout(&pilotopt(&[
        "optimize",
        "--gains",
        gains.to_str().unwrap(),
        "--n",
        "2",
        "--power",
        "2",
        "--out",
        pilots.to_str().unwrap(),
    ]));
    let x = PilotMatrix::read_file(&pilots).unwrap();
    assert_eq!(x.shape(), (2, 4));
    for k in 0..4 {
        assert!((x.column_energy(k) - 2.0).abs() < 1e-9);
    }
}

#[test]
fn estimate_reports_every_user() {
    let text = stdout(&pilotopt(&["estimate", "--snr-db", "10", "--k", "6", "--n", "3"]));
    assert_eq!(text.lines().count(), 7);
    assert_eq!(text.lines().next().unwrap(), "user,gain,proposed,conventional");
}

#[test]
fn configuration_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.txt");
    fs::write(&bad, "0.5\n-1\n").unwrap();
    let cases: Vec<Vec<&str>> = vec![
        vec!["sweep-snr", "--k", "40"],
        vec!["sweep-snr", "--n", "1,2"],
        vec!["sweep-snr", "--trials", "0"],
        vec!["sweep-snr", "--m", "0"],
        vec!["sweep-n", "--n", "0,2"],
        vec!["convergence", "--snr-db", "0,3"],
        vec!["optimize", "--gains", bad.to_str().unwrap()],
        vec!["optimize", "--gains", "/nonexistent/gains.txt"],
        vec!["optimize", "--power", "-1"],
        vec!["sweep-snr", "--format", "xml"],
    ];
    for args in cases {
        let out = pilotopt(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn numerical_failure_exits_3() {
    let out = pilotopt(&["optimize", "--snr-db", "400"]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}
