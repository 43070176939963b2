use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use graphnls::solver::parse_key_value;

fn graphnls(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_graphnls"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn out_arg(dir: &Path) -> String {
    dir.to_str().expect("utf-8 temp path").to_string()
}

#[test]
fn missing_config_is_a_usage_error_without_output() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("run");
    let o = graphnls(&["solve", "--config", "/no/such/file.cfg", "--omega", "1", "--out", &out_arg(&out)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!out.exists());
    assert!(String::from_utf8_lossy(&o.stderr).contains("cannot read"));
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(graphnls(&["solve", "--preset", "no-such-preset"]).status.code(), Some(2));
    assert_eq!(
        graphnls(&["scan", "--preset", "dipole-line", "--param", "omega", "--grid", "1:2"]).status.code(),
        Some(2)
    );
    assert_eq!(
        graphnls(&["scan", "--preset", "dipole-line", "--param", "alpha", "--grid", "1:2:3"]).status.code(),
        Some(2)
    );
    assert_eq!(graphnls(&["solve"]).status.code(), Some(2));
}

#[test]
fn config_errors_carry_line_numbers() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("bad.cfg");
    fs::write(&cfg, "vertex o kirchhoff\nedge a o open inf\nbogus record\n").unwrap();
    let o = graphnls(&["solve", "--config", cfg.to_str().unwrap(), "--omega", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 3"));
}

#[test]
fn kirchhoff_preset_recovers_the_frequency() {
    let tmp = tempfile::tempdir().unwrap();
    let o = graphnls(&["solve", "--preset", "kirchhoff-line", "--out", &out_arg(tmp.path())]);
    assert_eq!(o.status.code(), Some(0));
    let report = parse_key_value(&fs::read_to_string(tmp.path().join("report.txt")).unwrap());
    assert_eq!(report["status"], "converged");
    let omega: f64 = report["omega"].parse().unwrap();
    assert!((omega - 1.0).abs() <= 0.01, "omega = {omega}");
    let manifest = fs::read_to_string(tmp.path().join("manifest.json")).unwrap();
    assert!(manifest.contains("\"subcommand\": \"solve\""));
    assert!(manifest.contains("\"preset\": \"kirchhoff-line\""));
    assert!(tmp.path().join("profile.csv").exists());
}

#[test]
fn attractive_delta_profile_has_the_expected_shift() {
    let tmp = tempfile::tempdir().unwrap();
    let o = graphnls(&["solve", "--preset", "delta-line-attractive", "--out", &out_arg(tmp.path())]);
    assert_eq!(o.status.code(), Some(0));
    let csv = fs::read_to_string(tmp.path().join("profile.csv")).unwrap();
    let vertex_value: f64 = csv
        .lines()
        .find(|l| l.starts_with("right,0,") || l.starts_with("right,0e0,"))
        .and_then(|l| l.rsplit(',').next())
        .and_then(|v| v.parse().ok())
        .expect("vertex row");
    // p = 4, omega = 1: u(0) = sqrt(2) sech(a).
    let shift = (2f64.sqrt() / vertex_value).acosh();
    assert!((shift - 0.5493).abs() <= 1e-3, "shift = {shift}");
}

#[test]
fn config_file_round_trip() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("ft.cfg");
    fs::write(
        &cfg,
        "# Fulop-Tsutsui junction\nvertex o fulop-tsutsui tau=2 v=1\nedge minus o open inf\nedge plus o open inf\nproblem p=4\ngrid h=0.02 L=24\n",
    )
    .unwrap();
    let o = graphnls(&["solve", "--config", cfg.to_str().unwrap(), "--omega", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let report = parse_key_value(&String::from_utf8(o.stdout).unwrap());
    assert_eq!(report["status"], "converged");
}

#[test]
fn unbounded_preset_exits_with_three() {
    let o = graphnls(&["solve", "--preset", "critical-p6-line"]);
    assert_eq!(o.status.code(), Some(3));
    let report = parse_key_value(&String::from_utf8(o.stdout).unwrap());
    assert_eq!(report["status"], "unbounded-suspected");
}

#[test]
fn scans_are_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let dir = tmp.path().join(name);
        let args = [
            "scan", "--preset", "dipole-line", "--param", "omega", "--grid", "0.5:2:4", "--seed", "3", "--out",
        ];
        let mut all: Vec<String> = args.iter().map(|s| s.to_string()).collect();
        all.push(out_arg(&dir));
        let refs: Vec<&str> = all.iter().map(String::as_str).collect();
        assert_eq!(graphnls(&refs).status.code(), Some(0));
        fs::read(dir.join("scan.csv")).unwrap()
    };
    let a = run("a");
    let b = run("b");
    assert_eq!(a, b);
    assert_eq!(String::from_utf8(a).unwrap().lines().count(), 5);
}

#[test]
fn empty_scan_has_a_header_only() {
    let o = graphnls(&["scan", "--preset", "dipole-line", "--param", "omega", "--grid", "1:2:0"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(String::from_utf8(o.stdout).unwrap().lines().count(), 1);
}

#[test]
fn thresholds_table() {
    let o = graphnls(&["thresholds"]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.starts_with("name,parameters,value\n"));
    assert!(text.contains("omega_star_delta_prime,beta=1 p=4,8\n"));
    assert!(text.contains("critical_mass_q4,,2\n"));
}

#[test]
fn balanced_bracket_reports_no_threshold() {
    let o = graphnls(&["bracket", "--preset", "nldelta-star3-q3", "--grid", "0.5:5:4"]);
    assert_eq!(o.status.code(), Some(1));
    let report = parse_key_value(&String::from_utf8(o.stdout).unwrap());
    assert_eq!(report["result"], "no threshold in range");
}

#[test]
fn stability_output_labels_the_verdicts() {
    let tmp = tempfile::tempdir().unwrap();
    let o = graphnls(&[
        "stability",
        "--preset",
        "delta-line-attractive",
        "--grid",
        "0.3:5:20",
        "--out",
        &out_arg(tmp.path()),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let summary = parse_key_value(&fs::read_to_string(tmp.path().join("stability.txt")).unwrap());
    assert_eq!(summary["verdict_kind"], "GSS-surrogate");
    assert_eq!(summary["count.stable"], "18");
    let csv = fs::read_to_string(tmp.path().join("curve.csv")).unwrap();
    assert!(csv.starts_with("omega,d,mass,d2,gss_surrogate_verdict\n"));
    assert_eq!(csv.lines().count(), 21);
}
