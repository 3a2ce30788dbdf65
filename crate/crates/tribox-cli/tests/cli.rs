//! End-to-end checks of the `tribox` binary: subcommands, formats,
//! round-trips, and exit codes.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_tribox"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn tmpfile(name: &str) -> PathBuf {
    let mut p = std::env::temp_dir();
    p.push(format!("tribox-test-{}-{name}", std::process::id()));
    p
}

#[test]
fn analyze_family_reports_svetlichny_value() {
    let out = run(&["analyze", "--family", "svetlichny", "--v", "0.6"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let reports = v["reports"].as_array().unwrap();
    let s = reports
        .iter()
        .find(|r| r["name"] == "svetlichny")
        .unwrap();
    let value = s["value"].as_f64().unwrap();
    assert!((value - 4.0 * 2f64.sqrt() * 0.6).abs() < 1e-9);
    assert_eq!(s["scenario"], "fully-DI");
}

#[test]
fn analyze_state_with_ghz_paradox_settings() {
    let out = run(&[
        "analyze",
        "--state",
        "noisy-ghz",
        "--v",
        "0.8",
        "--settings",
        "ghz-paradox",
    ]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let m = v["reports"]
        .as_array()
        .unwrap()
        .iter()
        .find(|r| r["name"] == "mermin")
        .unwrap();
    assert!((m["value"].as_f64().unwrap() - 3.2).abs() < 1e-9);
    assert_eq!(v["assemblage"]["pass"], true);
}

#[test]
fn gen_analyze_round_trip_json_and_csv() {
    for format in ["json", "csv"] {
        let path = tmpfile(&format!("box.{format}"));
        let out = run(&[
            "gen",
            "--family",
            "mermin",
            "--v",
            "0.75",
            "--format",
            format,
            "--out",
            path.to_str().unwrap(),
        ]);
        assert!(out.status.success());

        let direct = run(&["analyze", "--family", "mermin", "--v", "0.75"]);
        let from_file = run(&["analyze", "--box-file", path.to_str().unwrap()]);
        assert!(from_file.status.success());

        let a: serde_json::Value = serde_json::from_str(&stdout(&direct)).unwrap();
        let b: serde_json::Value = serde_json::from_str(&stdout(&from_file)).unwrap();
        // Identical inequality reports either way.
        assert_eq!(a["reports"], b["reports"]);
        assert_eq!(b["no_signaling"]["pass"], true);
        std::fs::remove_file(&path).ok();
    }
}

#[test]
fn scan_emits_strip_and_thresholds() {
    let path = tmpfile("scan.json");
    let out = run(&[
        "scan",
        "--family",
        "svetlichny",
        "--steps",
        "101",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("svetlichny family"));
    assert!(text.contains("ghz-witness"));

    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let thresholds = v["thresholds"].as_array().unwrap();
    let find = |name: &str| {
        thresholds
            .iter()
            .find(|t| t["name"] == name)
            .unwrap_or_else(|| panic!("{name} missing"))["v"]
            .as_f64()
            .unwrap()
    };
    assert!((find("svetlichny") - 1.0 / 2f64.sqrt()).abs() < 1e-9);
    assert!((find("svetlichny-2sdi-steering") - 0.5).abs() < 1e-9);
    assert!((find("ghz-witness") - 3.0 / 7.0).abs() < 1e-9);
    std::fs::remove_file(&path).ok();
}

#[test]
fn verify_passes_in_range_and_usage_errors_out_of_range() {
    let out = run(&["verify", "--family", "mermin", "--v", "0.5"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["pass"], true);
    assert!(v["reconstruction_error"].as_f64().unwrap() <= 1e-12);

    let out = run(&["verify", "--family", "svetlichny", "--v", "0.9"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("out of stated range"));
}

#[test]
fn usage_errors_exit_two() {
    // Out-of-range parameter.
    let out = run(&["analyze", "--family", "svetlichny", "--v", "1.5"]);
    assert_eq!(out.status.code(), Some(2));
    // Unknown state name.
    let out = run(&["analyze", "--state", "bogus"]);
    assert_eq!(out.status.code(), Some(2));
    // Missing source entirely (clap-level usage error also exits 2).
    let out = run(&["analyze"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn malformed_box_file_exits_one() {
    let path = tmpfile("bad.csv");
    std::fs::write(&path, "x,y,z,a,b,c,p\n0,0,0,0,0,0,nope\n").unwrap();
    let out = run(&["analyze", "--box-file", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("parse error"));
    std::fs::remove_file(&path).ok();

    // A signaling box parses but fails validation: also exit 1.
    let path = tmpfile("signaling.csv");
    let mut b = tribox::TripartiteBox::uniform();
    b.set_prob(0, 0, 0, 0, 0, 0, 0.135);
    b.set_prob(0, 0, 0, 0, 0, 1, 0.115);
    std::fs::write(&path, b.to_csv()).unwrap();
    let out = run(&["analyze", "--box-file", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    std::fs::remove_file(&path).ok();
}

#[test]
fn singlet_ext_analysis_runs_clean() {
    let out = run(&[
        "analyze",
        "--state",
        "singlet-ext",
        "--settings",
        "svetlichny-optimal",
    ]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["no_signaling"]["pass"], true);
    for r in v["reports"].as_array().unwrap() {
        assert_eq!(r["violated"], false);
    }
}
