use std::process::Command;

use proptest::prelude::*;
use weakmetro::dynamics::dynamic_report;
use weakmetro::models::{build, ModelKind, ModelSpec};
use weakmetro::statics::analyze_static;
use weakmetro_cli::output::{DynamicOutput, ScanOutput, StaticOutput, SCAN_HEADER};
use weakmetro_cli::{run, Cli};

fn weakmetro(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_weakmetro")).args(args).output().unwrap();
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn value(csv: &str, key: &str) -> String {
    csv.lines()
        .find_map(|l| l.strip_prefix(&format!("{key},")))
        .unwrap_or_else(|| panic!("no {key} in {csv}"))
        .to_string()
}

fn in_process(args: &[&str]) -> String {
    let cli = <Cli as clap::Parser>::try_parse_from(std::iter::once("weakmetro").chain(args.iter().copied())).unwrap();
    run(&cli.command).unwrap()
}

#[test]
fn qutrit_static_bound() {
    let (code, out, _) = weakmetro(&["static", "--model", "qutrit", "--alpha", "1.5707963"]);
    assert_eq!(code, 0);
    let b: f64 = value(&out, "B").parse().unwrap();
    let r: f64 = value(&out, "R").parse().unwrap();
    assert!((b - 0.5).abs() < 1e-12);
    assert!(r.abs() < 1e-12);
}

#[test]
fn qubit_dynamic_at_time_zero() {
    let (code, out, _) = weakmetro(&["dynamic", "--model", "qubit", "--theta", "0", "--time", "0"]);
    assert_eq!(code, 0);
    assert_eq!(value(&out, "Q11").parse::<f64>().unwrap(), 0.0);
    assert_eq!(value(&out, "B"), "inf");
}

#[test]
fn anharmonic_scan_beats_static_inside_window() {
    let (code, out, _) = weakmetro(&[
        "scan", "--model", "anharmonic", "--t-min", "0.05", "--t-max", "3.1", "--t-steps", "200",
    ]);
    assert_eq!(code, 0);
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some(SCAN_HEADER));
    let reference: f64 = out
        .lines()
        .find_map(|l| l.strip_prefix("# static_reference="))
        .unwrap()
        .parse()
        .unwrap();
    assert!((reference - 466.0 / 1131.0).abs() < 1e-12);
    let rows: Vec<(f64, f64)> = lines
        .filter(|l| !l.starts_with('#'))
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            assert_eq!(f.len(), 7);
            (f[0].parse().unwrap(), f[5].parse().unwrap())
        })
        .collect();
    assert_eq!(rows.len(), 200);
    for (t, b) in rows {
        if t > 0.73 && t < 2.78 {
            assert!(b < reference, "t = {t}: B = {b}");
        }
        if t < 0.71 || t > 2.80 {
            assert!(b > reference, "t = {t}: B = {b}");
        }
    }
}

#[test]
fn singular_scan_points_print_inf() {
    let (code, out, _) = weakmetro(&["scan", "--model", "qubit", "--t-min", "0", "--t-max", "3.141592653589793", "--t-steps", "3"]);
    assert_eq!(code, 0);
    let rows: Vec<&str> = out.lines().skip(1).take(3).collect();
    assert_eq!(rows[0].split(',').nth(5), Some("inf"));
    assert_ne!(rows[1].split(',').nth(5), Some("inf"));
    assert_eq!(rows[2].split(',').nth(5), Some("inf"));
}

#[test]
fn validation_errors_exit_two() {
    assert_eq!(weakmetro(&["scan", "--model", "qubit", "--t-min", "2", "--t-max", "1"]).0, 2);
    assert_eq!(weakmetro(&["scan", "--model", "qubit", "--t-steps", "1"]).0, 2);
    assert_eq!(weakmetro(&["static", "--model", "/no/such/file.json"]).0, 2);
    assert_eq!(weakmetro(&["dynamic", "--model", "qubit"]).0, 2);
    assert_eq!(weakmetro(&["dynamic", "--model", "qubit", "--time", "-1"]).0, 2);
    assert_eq!(weakmetro(&["static", "--model", "anharmonic", "--fock-dim", "4"]).0, 2);
    assert_eq!(weakmetro(&["oracle-check", "--model", "qutrit", "--lambda", "0.001"]).0, 2);
}

#[test]
fn hamiltonian_files_and_numerical_failures() {
    let dir = tempfile::tempdir().unwrap();
    let ok = dir.path().join("qubit.json");
    std::fs::write(
        &ok,
        r#"{"dim": 2, "h0": [[[1,0],[0,0]],[[0,0],[-1,0]]],
            "perturbations": [[[[0,0],[1,0]],[[1,0],[0,0]]]], "level": 1}"#,
    )
    .unwrap();
    let (code, out, _) = weakmetro(&["static", "--model", ok.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(value(&out, "Q11").parse::<f64>().unwrap(), 1.0);

    // coupled degenerate pair: first-order theory does not apply
    let degenerate = dir.path().join("degenerate.json");
    std::fs::write(
        &degenerate,
        r#"{"dim": 2, "h0": [[[1,0],[0,0]],[[0,0],[1,0]]],
            "perturbations": [[[[0,0],[1,0]],[[1,0],[0,0]]]]}"#,
    )
    .unwrap();
    let (code, _, err) = weakmetro(&["static", "--model", degenerate.to_str().unwrap()]);
    assert_eq!(code, 3, "{err}");

    let garbled = dir.path().join("garbled.json");
    std::fs::write(&garbled, "{\"dim\": 2").unwrap();
    assert_eq!(weakmetro(&["static", "--model", garbled.to_str().unwrap()]).0, 2);
}

#[test]
fn writes_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.json");
    let (code, stdout, _) = weakmetro(&[
        "static", "--model", "anharmonic", "--output-format", "json", "--out", path.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    assert!(stdout.is_empty());
    let parsed: StaticOutput = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    assert!((parsed.bound_b.unwrap() - 466.0 / 1131.0).abs() < 1e-12);
}

#[test]
fn oracle_check_reports_relative_errors() {
    let (code, out, _) = weakmetro(&["oracle-check", "--model", "qubit", "--time", "1.5707963267948966"]);
    assert_eq!(code, 0);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "scheme,entry,engine,oracle,relative_error");
    for l in &lines[1..] {
        let rel: f64 = l.rsplit(',').next().unwrap().parse().unwrap();
        assert!(rel < 1e-4, "{l}");
    }
}

#[test]
fn scan_json_round_trip_is_exact() {
    let text = in_process(&["scan", "--model", "qutrit", "--alpha", "0.9", "--t-steps", "17", "--output-format", "json"]);
    let parsed: ScanOutput = serde_json::from_str(&text).unwrap();
    let spec = ModelSpec::new(ModelKind::Qutrit2Param).with_alpha(0.9);
    let p = build(&spec).unwrap();
    let psi = spec.probe_state(0.0, 0.0).unwrap();
    for row in &parsed.rows {
        let r = dynamic_report(&p, &psi, row.t).unwrap();
        for m in 0..2 {
            for n in 0..2 {
                assert_eq!(row.qfim[m][n].to_bits(), r.qfim.get(m, n).to_bits());
                assert_eq!(row.uhlmann[m][n].to_bits(), r.uhlmann.get(m, n).to_bits());
            }
        }
        assert_eq!(row.bound_b.map(f64::to_bits), r.bound_b.is_finite().then(|| r.bound_b.to_bits()));
    }
    assert_eq!(serde_json::to_string(&parsed).unwrap() + "\n", text);
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn static_json_round_trip(alpha in 0.05..3.1f64) {
        let a = alpha.to_string();
        let text = in_process(&["static", "--model", "qutrit", "--alpha", &a, "--output-format", "json"]);
        let parsed: StaticOutput = serde_json::from_str(&text).unwrap();
        let p = build(&ModelSpec::new(ModelKind::Qutrit2Param).with_alpha(alpha)).unwrap();
        let r = analyze_static(&p).unwrap().report;
        prop_assert_eq!(parsed.bound_b.unwrap().to_bits(), r.bound_b.to_bits());
        for m in 0..2 {
            for n in 0..2 {
                prop_assert_eq!(parsed.qfim[m][n].to_bits(), r.qfim.get(m, n).to_bits());
            }
        }
        prop_assert_eq!(serde_json::to_string(&parsed).unwrap() + "\n", text);
    }

    #[test]
    fn dynamic_json_round_trip(t in 0.0..10.0f64, theta in 0.0..3.1f64, phi in -3.0..3.0f64) {
        let (ts, th, ph) = (t.to_string(), theta.to_string(), phi.to_string());
        let text = in_process(&[
            "dynamic", "--model", "qubit", "--time", &ts, "--theta", &th, "--phi", &ph, "--output-format", "json",
        ]);
        let parsed: DynamicOutput = serde_json::from_str(&text).unwrap();
        let spec = ModelSpec::new(ModelKind::Qubit1Param);
        let r = dynamic_report(&build(&spec).unwrap(), &spec.probe_state(theta, phi).unwrap(), t).unwrap();
        prop_assert_eq!(parsed.time.to_bits(), t.to_bits());
        prop_assert_eq!(parsed.qfim[0][0].to_bits(), r.qfim.get(0, 0).to_bits());
        prop_assert_eq!(serde_json::to_string(&parsed).unwrap() + "\n", text);
    }

    #[test]
    fn csv_numbers_round_trip(t in 0.0..10.0f64) {
        let ts = t.to_string();
        let out = in_process(&["dynamic", "--model", "qubit", "--time", &ts, "--theta", "1.0"]);
        let spec = ModelSpec::new(ModelKind::Qubit1Param);
        let r = dynamic_report(&build(&spec).unwrap(), &spec.probe_state(1.0, 0.0).unwrap(), t).unwrap();
        prop_assert_eq!(value(&out, "Q11").parse::<f64>().unwrap().to_bits(), r.qfim.get(0, 0).to_bits());
    }
}
