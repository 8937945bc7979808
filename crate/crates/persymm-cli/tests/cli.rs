//! End-to-end tests of the binary: flags, formats, exit codes, determinism.

use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_persymm"))
        .args(args)
        .env("PERSYMM_WORKERS", "2")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn gamma_closed_golden_json() {
    let out = run(&["gamma", "--s", "2", "--m", "0", "--l", "0", "--k", "6", "--method", "closed"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    assert_eq!(v["shape"]["s"], 2);
    assert_eq!(v["method"], "closed");
    let counts: Vec<&str> = v["counts"].as_array().unwrap().iter().map(|c| c.as_str().unwrap()).collect();
    assert_eq!(
        counts,
        ["1", "21", "1162", "20160", "258720", "1128960", "688128"]
    );
}

#[test]
fn gamma_json_roundtrips_bytes() {
    let out = run(&["gamma", "--s", "1", "--m", "1", "--l", "1", "--k", "3"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let v: serde_json::Value = serde_json::from_str(text.trim()).unwrap();
    assert_eq!(serde_json::to_string(&v).unwrap(), text.trim());
}

#[test]
fn gamma_deterministic_across_worker_counts() {
    let base = run(&["gamma", "--s", "2", "--m", "1", "--l", "0", "--k", "4", "--method", "brute"]);
    for workers in ["1", "4"] {
        let out = Command::new(env!("CARGO_BIN_EXE_persymm"))
            .args(["gamma", "--s", "2", "--m", "1", "--l", "0", "--k", "4", "--method", "brute"])
            .env("PERSYMM_WORKERS", workers)
            .output()
            .unwrap();
        assert_eq!(out.stdout, base.stdout);
    }
}

#[test]
fn gamma_brute_small() {
    let out = run(&["gamma", "--s", "1", "--k", "1", "--method", "brute", "--format", "tsv"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "rank\tcount\n0\t1\n1\t7\n");
}

#[test]
fn gamma_recurrence_matches_brute() {
    let rec = run(&["gamma", "--s", "2", "--m", "1", "--l", "1", "--k", "4", "--method", "recurrence", "--format", "tsv"]);
    let brute = run(&["gamma", "--s", "2", "--m", "1", "--l", "1", "--k", "4", "--method", "brute", "--format", "tsv"]);
    assert!(rec.status.success() && brute.status.success());
    assert_eq!(rec.stdout, brute.stdout);
}

#[test]
fn gamma_unsupported_exits_2() {
    // far beyond every closed window and budget
    let out = run(&["gamma", "--s", "5", "--m", "0", "--l", "3", "--k", "9", "--method", "brute", "--max-bits", "20"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn count_goldens() {
    let out = run(&["count", "--q", "3", "--k", "5", "--s", "3", "--m", "0"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("228089856"), "got: {text}");
    assert!(text.contains("= 27843*2^13"), "got: {text}");

    let out = run(&["count", "--q", "3", "--n", "2", "--m", "1", "--l", "3", "--k", "5"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("= 13281*2^20"), "got: {text}");

    let out = run(&["count", "--q", "1", "--k", "2", "--s", "1", "--m", "0"]);
    assert!(out.status.success());
    assert!(stdout(&out).starts_with("11\n"));
}

#[test]
fn count_requires_family() {
    let out = run(&["count", "--q", "1", "--k", "2"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_golden_suite_passes() {
    let out = run(&["verify", "--suite", "golden"]);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    assert!(text.contains("criterion  1 [PASS]"), "got: {text}");
    assert!(text.contains("criterion  2 [PASS]"), "got: {text}");
    assert!(text.contains("recorded errata in effect"), "got: {text}");
}

#[test]
fn verify_profiles_suite_passes() {
    let out = run(&["verify", "--suite", "profiles", "--max-bits", "14"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("criterion  9 [PASS]"));
}

#[test]
fn table_known_and_unknown() {
    let out = run(&["table", "thm10.9-s2k6"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("688128"));
    let out = run(&["table", "thm12.11-s3m4k7"]);
    assert!(out.status.success());
    // 2^35 - 3553*2^13
    assert!(stdout(&out).contains("34330632192"));
    let out = run(&["table", "does-not-exist"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("known ids"));
}
