use std::path::Path;
use std::process::{Command, Output};

use ltlab_cli::output::{read_reports_csv, REPORT_HEADER};
use ltlab_core::{CheckReport, ProbeReport, Status, Verdict};

fn ltlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ltlab")).args(args).output().unwrap()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn verify_core_writes_csv_and_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.csv");
    let o = ltlab(&["verify", "--suite", "scalars", "--dims", "2,3", "--seed", "7", "--out", path_str(&out)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().next().unwrap(), REPORT_HEADER.join(","));
    let reports = read_reports_csv(text.as_bytes()).unwrap();
    assert_eq!(reports.len(), 8);
    assert!(reports.iter().all(|r| r.status == Status::Pass));
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.contains("8 checks, 8 pass"));
}

#[test]
fn json_reports_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("r.csv");
    let json = dir.path().join("r.json");
    for p in [&csv, &json] {
        let o = ltlab(&["verify", "--suite", "radial", "--dims", "2", "--out", path_str(p)]);
        assert_eq!(o.status.code(), Some(0));
    }
    let from_json: Vec<CheckReport> = serde_json::from_slice(&std::fs::read(&json).unwrap()).unwrap();
    let from_csv = read_reports_csv(&std::fs::read(&csv).unwrap()).unwrap();
    assert_eq!(from_json.len(), from_csv.len());
    for (a, b) in from_json.iter().zip(&from_csv) {
        assert!(a.same_outcome(b), "{a:?} != {b:?}");
    }
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(ltlab(&["verify", "--suite", "nope"]).status.code(), Some(2));
    assert_eq!(ltlab(&["verify", "--dims", "1"]).status.code(), Some(2));
    assert_eq!(ltlab(&["eval", "--functional", "moser"]).status.code(), Some(2));
    assert_eq!(ltlab(&["probe", "--dim", "2", "--beta", "0.5", "--alpha", "1", "--eps", "0.1,0.3"]).status.code(), Some(2));
    assert_eq!(ltlab(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(ltlab(&["--help"]).status.code(), Some(0));
}

#[test]
fn failing_check_exits_one() {
    let o = ltlab(&["verify", "--suite", "core", "--dims", "2", "--tol=-1"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn probe_example_diverges() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("p.json");
    let o = ltlab(&[
        "probe", "--dim", "2", "--beta", "0.25", "--alpha", "1.0", "--eps", "0.1,0.03,0.01,0.003,0.001", "--out",
        path_str(&out),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let p: ProbeReport = serde_json::from_slice(&std::fs::read(&out).unwrap()).unwrap();
    assert_eq!(p.verdict, Verdict::Diverging);
    assert_eq!(p.values.len(), 5);
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    let out = dir.path().join("e.csv");
    std::fs::write(
        &cfg,
        format!(
            "# evaluation\nfunctional = leray\nfamily = kind=bump;eps=0.5;amplitude=1\ndims = 2,3\nout = {}\n",
            out.display()
        ),
    )
    .unwrap();
    let o = ltlab(&["eval", "--config", path_str(&cfg), "--dims", "2"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&out).unwrap();
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 1);
    assert!(rows[0].starts_with("leray,2,kind=bump;eps=0.5;amplitude=1,"));
}

#[test]
fn bad_config_line_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    std::fs::write(&cfg, "dims = 2\nnot a pair\n").unwrap();
    let o = ltlab(&["verify", "--config", path_str(&cfg)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains(":2:"));
}

#[test]
fn sweep_writes_one_row_per_point() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s.csv");
    let o = ltlab(&[
        "sweep", "--functional", "lq", "--q", "4", "--param", "eps", "--range", "0.2:0.8:4", "--out", path_str(&out),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("param,param_value,functional,"));
    assert_eq!(text.lines().count(), 5);
}
