use std::fs;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_subharmonic"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

/// Parses a CSV and returns the row whose first cell is `eps`.
fn row(csv: &str, eps: &str) -> Vec<f64> {
    csv.lines()
        .skip(1)
        .map(|l| l.split(',').collect::<Vec<_>>())
        .find(|cells| cells[0] == eps)
        .unwrap_or_else(|| panic!("no row {eps}"))
        .iter()
        .map(|c| c.parse().unwrap())
        .collect()
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() < tol
}

/// A grid whose points include 0 and 0.3 exactly in nine digits.
const GRID: [&str; 6] = ["--eps-min", "0", "--eps-max", "0.35", "--steps", "8"];

fn with_grid<'a>(cmd: &'a str, extra: &[&'a str]) -> Vec<&'a str> {
    let mut v = vec![cmd];
    v.extend_from_slice(&GRID);
    v.extend_from_slice(extra);
    v
}

#[test]
fn figure2_family_columns() {
    let o = run(&with_grid("figure2", &[]));
    assert!(o.status.success());
    let csv = stdout(&o);
    assert_eq!(csv.lines().next().unwrap(), "epsilon,nbar[gamma_c=0],nbar[gamma_c=0.25],nbar[gamma_c=0.5]");
    assert_eq!(csv.lines().count(), 9);
    let r = row(&csv, "0.3");
    assert!(close(r[1], 1.285714, 1e-6));
    assert!(close(r[3], 1.028571, 1e-6));
    assert!(r[1] > r[2] && r[2] > r[3]);
    assert_eq!(&row(&csv, "0")[1..], &[0.0, 0.0, 0.0]);
    // Formulas, not data, go to stderr.
    assert!(!stderr(&o).is_empty());
}

#[test]
fn figure3_and_figure4_rows() {
    let o = run(&with_grid("figure3", &[]));
    assert!(o.status.success());
    let csv = stdout(&o);
    assert_eq!(csv.lines().next().unwrap(), "epsilon,var_plus,var_minus,vacuum_level");
    assert_eq!(row(&csv, "0"), vec![0.0, 2.625, 2.625, 2.625]);
    let r = row(&csv, "0.3");
    assert!(close(r[1], 1.714286, 1e-6) && close(r[2], 7.2, 1e-9));

    let o = run(&with_grid("figure4", &[]));
    assert!(o.status.success());
    let csv = stdout(&o);
    let r = row(&csv, "0.3");
    assert!(close(r[1], 0.346939, 1e-6) && close(r[2], 0.428571, 1e-6));
    assert_eq!(row(&csv, "0"), vec![0.0, 0.0, 0.0]);
    for line in csv.lines().skip(1) {
        let c: Vec<f64> = line.split(',').map(|x| x.parse().unwrap()).collect();
        if c[0] > 0.0 {
            assert!(c[1] < c[2], "{line}");
        }
    }
}

#[test]
fn sweep_writes_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sweep.csv");
    let o = run(&with_grid("sweep", &["--out", path.to_str().unwrap()]));
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(o.stdout.is_empty());
    let csv = fs::read_to_string(&path).unwrap();
    let header: Vec<&str> = csv.lines().next().unwrap().split(',').collect();
    assert_eq!(header, subharmonic_cli::commands::SWEEP_COLUMNS);
    let k = header.iter().position(|h| *h == "oracle_max_rel_diff").unwrap();
    for line in csv.lines().skip(1) {
        let v: f64 = line.split(',').nth(k).unwrap().parse().unwrap();
        assert!(v < 1e-10, "{line}");
    }
}

#[test]
fn identical_flags_give_identical_bytes() {
    for cmd in ["figure2", "figure3", "figure4", "sweep"] {
        let a = run(&[cmd]);
        let b = run(&[cmd]);
        assert!(a.status.success());
        assert_eq!(a.stdout, b.stdout, "{cmd}");
        assert!(!stdout(&a).contains('\r'));
    }
}

#[test]
fn exit_codes() {
    // Beyond the stability boundary.
    let o = run(&["figure3", "--eps-max", "0.4"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("error"));
    assert_eq!(run(&["figure2", "--kappa", "-1"]).status.code(), Some(2));
    assert_eq!(run(&["figure4", "--steps", "0"]).status.code(), Some(2));
    assert_eq!(run(&["figure4", "--bogus"]).status.code(), Some(2));
    assert_eq!(run(&["simulate", "--fock-cutoff", "0"]).status.code(), Some(2));
    let o = run(&["sweep", "--out", "/nonexistent-dir/x.csv"]);
    assert_eq!(o.status.code(), Some(2));
}

fn summary_value(summary: &str, label: &str) -> (f64, f64) {
    let line = summary
        .lines()
        .find(|l| l.trim_start().starts_with(label))
        .unwrap_or_else(|| panic!("no {label} in\n{summary}"));
    let nums: Vec<f64> = line[line.find(label).unwrap() + label.len()..]
        .split_whitespace()
        .map(|x| x.parse().unwrap())
        .collect();
    (nums[0], nums[1])
}

#[test]
fn simulate_bare_pump_matches_closed_form() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("traj.csv");
    let o = run(&["simulate", "--epsilon", "0.2", "--gamma-c", "0", "--fock-cutoff", "10", "--out", path.to_str().unwrap()]);
    let summary = stderr(&o);
    assert!(o.status.success(), "{summary}");
    assert!(summary.contains("status: converged"));
    let (sim, closed) = summary_value(&summary, "mean photon number");
    assert!(close(closed, 1.0 / 3.0, 1e-6));
    assert!((sim - closed).abs() / closed < 0.05, "{sim}");
    assert!(summary.contains("gamma_c = 0 is a like-for-like comparison"));

    let csv = fs::read_to_string(&path).unwrap();
    let header = csv.lines().next().unwrap();
    assert!(header.starts_with("t,"));
    assert!(csv.lines().count() > 2);
}

#[test]
fn simulate_unpumped_is_converged_immediately() {
    let o = run(&["simulate", "--epsilon", "0", "--gamma-c", "0", "--fock-cutoff", "4"]);
    let summary = stderr(&o);
    assert!(o.status.success(), "{summary}");
    assert!(summary.contains("status: converged at t = 0\n"), "{summary}");
    assert_eq!(summary_value(&summary, "mean photon number").0, 0.0);
}

/// At this coupling the run has not relaxed by the default 200/κ, so the
/// exit status reports a numerical failure, but the partial trajectory and
/// the residual report are still produced.
#[test]
fn simulate_weak_coupling_residuals() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("traj.csv");
    let o = run(&["simulate", "--epsilon", "0.2", "--gamma-c", "0.1", "--fock-cutoff", "8", "--out", path.to_str().unwrap()]);
    let summary = stderr(&o);
    assert_eq!(o.status.code(), Some(3), "{summary}");
    assert!(summary.contains("NOT converged"));
    let line = summary.lines().find(|l| l.contains("moment-equation residuals")).unwrap();
    let max: f64 = line.split("max ").nth(1).unwrap().split_whitespace().next().unwrap().parse().unwrap();
    assert!(max < 1e-4, "{line}");
    assert!(fs::metadata(&path).unwrap().len() > 0);
}

#[test]
fn verify_passes_and_reports_completeness() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.txt");
    let o = run(&["verify", "--out", path.to_str().unwrap()]);
    let report = stdout(&o);
    assert_eq!(o.status.code(), Some(0), "{report}");
    assert!(report.contains("population completeness |sum eta - 1|"));
    assert!(report.lines().last().unwrap().ends_with(", 0 failed"));
    assert_eq!(fs::read_to_string(&path).unwrap(), report);
}
