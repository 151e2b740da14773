//! End-to-end checks of the command-line interface: golden translations,
//! profile evaluation, exit codes, structured output, and the parse
//! round-trip through the canonical printer.

use std::path::PathBuf;
use std::process::{Command, Output};
use streamlog::lars::parse_lars;
use streamlog::ldsr::parse_ldsr;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_streamlog"))
        .args(args)
        .output()
        .expect("the binary runs")
}

fn run_f(args: &[&str], files: &[&PathBuf]) -> Output {
    let mut all: Vec<String> = Vec::new();
    let mut fi = files.iter();
    for a in args {
        if *a == "{}" {
            all.push(fi.next().expect("enough files").display().to_string());
        } else {
            all.push(a.to_string());
        }
    }
    let strs: Vec<&str> = all.iter().map(|s| s.as_str()).collect();
    run(&strs)
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf8 stdout")
}

fn temp_file(name: &str, content: &str) -> PathBuf {
    let path = std::env::temp_dir().join(format!("streamlog_cli_{}_{name}", std::process::id()));
    std::fs::write(&path, content).expect("temp file writes");
    path
}

#[test]
fn translate_rho2_reproduces_the_golden_image() {
    let out = run_f(&["translate", "--rho", "2", "{}"], &[&fixture("traffic.lars")]);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let got = parse_ldsr(&stdout(&out)).expect("output parses back");
    let want = parse_ldsr(&std::fs::read_to_string(fixture("traffic_rho2.ldsr")).unwrap()).unwrap();
    assert_eq!(got.rules, want.rules);
    assert_eq!(got.sig, want.sig);
    assert!(stdout(&out).contains("% rho 2 provenance"));
}

#[test]
fn translate_rho7_reproduces_the_golden_image() {
    let out = run_f(&["translate", "--rho", "7", "{}"], &[&fixture("train.ldsr")]);
    assert!(out.status.success());
    let got = parse_lars(&stdout(&out)).expect("output parses back");
    let want = parse_lars(&std::fs::read_to_string(fixture("train_rho7.lars")).unwrap()).unwrap();
    assert_eq!(got.rules, want.rules);
}

#[test]
fn translate_rejects_the_wrong_language_with_a_usage_error() {
    let out = run_f(&["translate", "--rho", "7", "{}"], &[&fixture("traffic.lars")]);
    assert_eq!(out.status.code(), Some(2));
    let out = run_f(&["translate", "--rho", "9", "{}"], &[&fixture("train.ldsr")]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn eval_prints_the_streaming_slot_of_the_recursive_program() {
    let out = run_f(
        &["eval", "{}", "--lang", "ldsr", "--stream", "{}", "--t", "2", "--profile", "atomic"],
        &[&fixture("p2.ldsr"), &fixture("p2_input.stream")],
    );
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.lines().any(|l| l == "2: a(1) a(2) b(1,2)"), "got:\n{text}");
    assert!(text.lines().any(|l| l == "1:"), "other slots stay empty in the atomic profile");
}

#[test]
fn the_backward_reference_program_reacts_to_one_future_slot() {
    let at = |stream: &str| {
        let out = run_f(
            &["eval", "{}", "--stream", "{}", "--t", "2", "--profile", "atomic"],
            &[&fixture("p1.lars"), &fixture(stream)],
        );
        assert!(out.status.success());
        stdout(&out)
    };
    assert!(at("p1_input.stream").lines().any(|l| l == "2: a"));
    assert!(at("p1_input_prime.stream").lines().any(|l| l == "2:"));
}

#[test]
fn parse_round_trips_through_the_canonical_printer() {
    for name in ["traffic.lars", "train_rho7.lars", "p1.lars"] {
        let first = stdout(&run_f(&["parse", "{}"], &[&fixture(name)]));
        let reparsed = temp_file(&format!("rt_{name}"), &first);
        let second = stdout(&run_f(&["parse", "{}", "--lang", "lars"], &[&reparsed]));
        assert_eq!(first, second, "round trip for {name}");
    }
    for name in ["traffic_rho2.ldsr", "train.ldsr", "p2.ldsr"] {
        let first = stdout(&run_f(&["parse", "{}"], &[&fixture(name)]));
        let reparsed = temp_file(&format!("rt_{name}"), &first);
        let second = stdout(&run_f(&["parse", "{}", "--lang", "ldsr"], &[&reparsed]));
        assert_eq!(first, second, "round trip for {name}");
    }
}

#[test]
fn an_empty_file_is_an_empty_program() {
    let empty = temp_file("empty.ldsr", "");
    let out = run_f(&["parse", "{}", "--lang", "ldsr"], &[&empty]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "");
}

#[test]
fn diff_exit_codes_follow_the_verdict() {
    let equal = run_f(
        &["diff", "{}", "{}", "--stream", "{}", "--t", "2", "--profile", "bound"],
        &[&fixture("traffic.lars"), &fixture("traffic_rho2.ldsr"), &fixture("traffic_input.stream")],
    );
    assert_eq!(equal.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&equal.stderr));
    assert!(stdout(&equal).starts_with("equal"));

    let unequal = run_f(
        &["diff", "{}", "{}", "--stream", "{}", "--t", "2", "--profile", "atomic"],
        &[&fixture("p1.lars"), &fixture("p2.ldsr"), &fixture("p1_input.stream")],
    );
    assert_eq!(unequal.status.code(), Some(1));
    assert!(stdout(&unequal).starts_with("differ"));
}

#[test]
fn classify_reports_membership_and_honors_expect() {
    let out = run_f(&["classify", "{}"], &[&fixture("train.ldsr")]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("F4: member"));
    assert!(text.contains("F7: member"));
    assert!(text.contains("F5: violation"));

    let ok = run_f(&["classify", "{}", "--expect", "F7"], &[&fixture("train.ldsr")]);
    assert_eq!(ok.status.code(), Some(0));
    let bad = run_f(&["classify", "{}", "--expect", "F5"], &[&fixture("train.ldsr")]);
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn fuzz_runs_a_seeded_campaign_and_rejects_unsupported_rows() {
    let out = run(&[
        "fuzz", "--fragment", "F3", "--rho", "3", "--profile", "full", "--strict", "--trials",
        "5", "--seed", "1",
    ]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout(&out).contains("5/5 passed"));

    let bad = run(&["fuzz", "--fragment", "F4", "--rho", "4", "--profile", "full", "--trials", "1"]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn structured_outputs_are_machine_readable() {
    let out = run_f(
        &[
            "eval", "{}", "--stream", "{}", "--t", "2", "--profile", "bound", "--format",
            "structured",
        ],
        &[&fixture("p2.ldsr"), &fixture("p2_input.stream")],
    );
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).expect("valid json");
    assert_eq!(v["profile"], "bound");
    assert_eq!(v["t"], 2);
    assert_eq!(v["stream"]["n"], 4);

    let out = run_f(&["classify", "{}", "--format", "structured"], &[&fixture("traffic.lars")]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).expect("valid json");
    let frags = v["fragments"].as_array().unwrap();
    assert_eq!(frags.len(), 3);
    assert_eq!(frags[0]["fragment"], "F1");
    assert_eq!(frags[0]["member"], true);
}

#[test]
fn a_shared_signature_file_feeds_declarations_and_conflicts_fail() {
    let sig = temp_file("shared.sig", "#stream c/0.\n#background base/0.\n");
    let prog = temp_file("bare.lars", "a <- c, base.\n");
    let out = run_f(&["parse", "{}", "--lang", "lars", "--sig", "{}"], &[&prog, &sig]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("#stream c/0."));

    let conflict = temp_file("conflict.sig", "#stream a/2.\n");
    let out = run_f(&["parse", "{}", "--sig", "{}"], &[&fixture("p2.ldsr"), &conflict]);
    assert_eq!(out.status.code(), Some(1));

    let rules = temp_file("rules.sig", "#stream c/0.\nq :- c.\n");
    let out = run_f(&["parse", "{}", "--sig", "{}"], &[&fixture("p2.ldsr"), &rules]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn missing_language_hints_are_usage_errors() {
    let noext = temp_file("noext", "a :- b.\n");
    let out = run_f(&["parse", "{}"], &[&noext]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["parse"]);
    assert_eq!(out.status.code(), Some(2));
}
