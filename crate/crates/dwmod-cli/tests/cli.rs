//! End-to-end checks of the binary: exit codes, output determinism, and the
//! worked command lines.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use dwmod_core::{
    cplx, AlgebraElement, ComplexMatrix, Construction, Instance, ModuleElement, ToleranceConfig,
};

fn dwmod(args: &[&str]) -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_dwmod"));
    // Ambient seed bases would break the explicit-range tests.
    cmd.env_remove("DWMOD_SEED");
    cmd.args(args);
    cmd
}

fn run(args: &[&str]) -> Output {
    dwmod(args).output().expect("binary runs")
}

fn exit_code(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

fn read_lines(path: &Path) -> usize {
    fs::read_to_string(path).unwrap().lines().count()
}

/// The pair {x, x} with weights {u, 2u}: the upper bound at index 0 is
/// 2‖x‖ + ‖x‖ = 3‖x‖ and equals the left side exactly.
fn equality_pair() -> Instance {
    let x = ModuleElement::new(ComplexMatrix::new(1, 1, vec![cplx(2.0, 0.0)]).unwrap());
    let u = AlgebraElement::identity(1);
    let two_u =
        AlgebraElement::new(ComplexMatrix::new(1, 1, vec![cplx(2.0, 0.0)]).unwrap()).unwrap();
    Instance::new(
        vec![x.clone(), x],
        vec![u, two_u],
        Some(Construction::ScalarFamily),
        &ToleranceConfig::default(),
    )
    .unwrap()
}

#[test]
fn check_sweep_writes_one_row_per_seed_and_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sweep.csv");
    let res = run(&[
        "check",
        "--seeds",
        "0..10000",
        "--d",
        "2",
        "--m",
        "2",
        "--n",
        "3",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(
        exit_code(&res),
        0,
        "{}",
        String::from_utf8_lossy(&res.stderr)
    );
    // Header plus one row per seed.
    assert_eq!(read_lines(&out), 10001);
}

#[test]
fn certify_equality_pair_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("instances.json");
    fs::write(
        &input,
        serde_json::to_string(&vec![equality_pair()]).unwrap(),
    )
    .unwrap();
    let out = dir.path().join("records.json");
    let res = run(&[
        "certify",
        "--in",
        input.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(
        exit_code(&res),
        0,
        "{}",
        String::from_utf8_lossy(&res.stderr)
    );
    let records: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(records[0]["classification"], "equal");
    assert!(!records[0]["certificate"].is_null());
    assert_eq!(records[0]["sum_zero_route"], false);
}

#[test]
fn verify_accepts_certificate_and_rejects_tampering() {
    let dir = tempfile::tempdir().unwrap();
    let inst_path = dir.path().join("instance.json");
    fs::write(&inst_path, serde_json::to_string(&equality_pair()).unwrap()).unwrap();
    let list_path = dir.path().join("instances.json");
    fs::write(
        &list_path,
        serde_json::to_string(&vec![equality_pair()]).unwrap(),
    )
    .unwrap();
    let records_path = dir.path().join("records.json");
    let res = run(&[
        "certify",
        "--in",
        list_path.to_str().unwrap(),
        "--out",
        records_path.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&res), 0);

    let records: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&records_path).unwrap()).unwrap();
    let cert = records[0]["certificate"].clone();
    let cert_path = dir.path().join("cert.json");
    fs::write(&cert_path, serde_json::to_string(&cert).unwrap()).unwrap();
    let res = run(&[
        "verify",
        "--in",
        inst_path.to_str().unwrap(),
        "--cert",
        cert_path.to_str().unwrap(),
    ]);
    assert_eq!(
        exit_code(&res),
        0,
        "{}",
        String::from_utf8_lossy(&res.stderr)
    );

    let mut tampered = cert;
    tampered["i"] = serde_json::json!(7);
    fs::write(&cert_path, serde_json::to_string(&tampered).unwrap()).unwrap();
    let res = run(&[
        "verify",
        "--in",
        inst_path.to_str().unwrap(),
        "--cert",
        cert_path.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&res), 1);
}

#[test]
fn seed_base_env_matches_explicit_range() {
    let shape = ["--d", "1", "--m", "1", "--n", "2"];
    let mut envd = dwmod(&["forge"]);
    envd.args(shape).env("DWMOD_SEED", "7");
    let envd = envd.output().unwrap();
    assert_eq!(envd.status.code(), Some(0));

    let mut args = vec!["forge", "--seeds", "7..107"];
    args.extend_from_slice(&shape);
    let explicit = run(&args);
    assert_eq!(explicit.status.code(), Some(0));
    assert_eq!(envd.stdout, explicit.stdout);

    // Reruns are byte-identical.
    let again = run(&args);
    assert_eq!(explicit.stdout, again.stdout);
}

#[test]
fn job_count_does_not_change_output_bytes() {
    let base = [
        "check",
        "--seeds",
        "0..50",
        "--d",
        "2",
        "--m",
        "2",
        "--n",
        "3",
        "--family",
        "recipnorm",
    ];
    let mut one = base.to_vec();
    one.extend_from_slice(&["--jobs", "1"]);
    let mut two = base.to_vec();
    two.extend_from_slice(&["--jobs", "2"]);
    let one = run(&one);
    let two = run(&two);
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(two.status.code(), Some(0));
    assert_eq!(one.stdout, two.stdout);
}

#[test]
fn shiftcheck_reports_no_violations() {
    let res = run(&["shiftcheck", "--n", "2", "--trunc", "8"]);
    assert_eq!(
        exit_code(&res),
        0,
        "{}",
        String::from_utf8_lossy(&res.stderr)
    );
    let report: serde_json::Value = serde_json::from_slice(&res.stdout).unwrap();
    assert_eq!(report["violations"], serde_json::json!([]));
    assert_eq!(report["window"], 4);
}

#[test]
fn report_aggregates_check_output() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("sweep.csv");
    let res = run(&[
        "check",
        "--seeds",
        "0..20",
        "--d",
        "2",
        "--m",
        "1",
        "--n",
        "3",
        "--out",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&res), 0);
    let res = run(&["report", "--in", csv.to_str().unwrap()]);
    assert_eq!(
        exit_code(&res),
        0,
        "{}",
        String::from_utf8_lossy(&res.stderr)
    );
    let summary: serde_json::Value = serde_json::from_slice(&res.stdout).unwrap();
    assert_eq!(summary["rows"], 20);
    assert_eq!(summary["violations"], 0);
    assert!(summary["min_slack_upper"].as_f64().unwrap() >= 0.0);
    assert!(
        summary["median_slack_upper"].as_f64().unwrap()
            >= summary["min_slack_upper"].as_f64().unwrap()
    );
}

#[test]
fn malformed_inputs_exit_sixty_four() {
    let res = run(&["check", "--seeds", "zero..ten"]);
    assert_eq!(exit_code(&res), 64);
    let res = run(&["check", "--seeds", "5..5"]);
    assert_eq!(exit_code(&res), 64);
    let res = run(&["certify", "--in", "/nonexistent/instances.json"]);
    assert_eq!(exit_code(&res), 64);
    let res = run(&["check", "--no-such-flag"]);
    assert_eq!(exit_code(&res), 64);
}

#[test]
fn certify_random_sweep_is_all_strict() {
    let res = run(&[
        "certify", "--seeds", "0..20", "--d", "2", "--m", "2", "--n", "3",
    ]);
    assert_eq!(
        exit_code(&res),
        0,
        "{}",
        String::from_utf8_lossy(&res.stderr)
    );
    let records: serde_json::Value = serde_json::from_slice(&res.stdout).unwrap();
    for rec in records.as_array().unwrap() {
        assert_eq!(rec["classification"], "strict");
        assert!(rec["certificate"].is_null());
    }
}

#[test]
fn certify_sum_zero_pair_takes_zero_route_and_certifies() {
    let res = run(&[
        "certify", "--seeds", "3..4", "--d", "1", "--m", "2", "--n", "2", "--kind", "sumzero",
    ]);
    assert_eq!(
        exit_code(&res),
        0,
        "{}",
        String::from_utf8_lossy(&res.stderr)
    );
    let records: serde_json::Value = serde_json::from_slice(&res.stdout).unwrap();
    assert_eq!(records[0]["sum_zero_route"], true);
    assert_eq!(records[0]["classification"], "equal");
}
