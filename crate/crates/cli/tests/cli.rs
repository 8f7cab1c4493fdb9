//! End-to-end tests of the eosfuzz binary: exit codes, report and trace
//! files, replay, and the extract-memos output.

mod common;

use common::{fixture_path, fixtures_dir};
use std::path::PathBuf;
use std::process::{Command, Output};

fn eosfuzz(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_eosfuzz"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn temp_file(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("eosfuzz-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn code(output: &Output) -> i32 {
    output.status.code().expect("exit code")
}

#[test]
fn run_flags_vulnerable_contract_with_exit_code_two() {
    let report_path = temp_file("fake_vuln_report.json");
    let output = eosfuzz(&[
        "run",
        "--wasm",
        fixture_path("fake_vuln.wasm").to_str().unwrap(),
        "--abi",
        fixture_path("fake_vuln.abi.json").to_str().unwrap(),
        "--actions",
        "200",
        "--report",
        report_path.to_str().unwrap(),
    ]);
    assert_eq!(
        code(&output),
        2,
        "stderr: {}",
        String::from_utf8_lossy(&output.stderr)
    );
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&report_path).unwrap()).unwrap();
    assert_eq!(report["schema_version"], 1);
    assert_eq!(report["contracts"][0]["account"], "fake.vuln");
    assert_eq!(
        report["contracts"][0]["findings"][0]["vuln_type"],
        "fake_eos_transfer"
    );
}

#[test]
fn run_exits_clean_on_safe_contract() {
    let output = eosfuzz(&[
        "run",
        "--wasm",
        fixture_path("fake_safe.wasm").to_str().unwrap(),
        "--abi",
        fixture_path("fake_safe.abi.json").to_str().unwrap(),
        "--actions",
        "150",
    ]);
    assert_eq!(code(&output), 0);
    let report: serde_json::Value =
        serde_json::from_slice(&output.stdout).expect("report on stdout");
    assert_eq!(report["summary"]["contracts_with_findings"], 0);
}

#[test]
fn missing_files_exit_with_one() {
    let output = eosfuzz(&[
        "run",
        "--wasm",
        "/nonexistent.wasm",
        "--abi",
        "/nonexistent.abi.json",
    ]);
    assert_eq!(code(&output), 1);
    assert!(String::from_utf8_lossy(&output.stderr).contains("error"));
}

#[test]
fn trace_file_is_json_lines_with_exact_fields() {
    let trace_path = temp_file("probe_trace.jsonl");
    let output = eosfuzz(&[
        "run",
        "--wasm",
        fixture_path("fake_vuln.wasm").to_str().unwrap(),
        "--abi",
        fixture_path("fake_vuln.abi.json").to_str().unwrap(),
        "--actions",
        "50",
        "--trace",
        trace_path.to_str().unwrap(),
        "--report",
        temp_file("trace_report.json").to_str().unwrap(),
    ]);
    assert_eq!(code(&output), 2);
    let text = std::fs::read_to_string(&trace_path).unwrap();
    let mut call_indirects = 0;
    for line in text.lines() {
        let event: serde_json::Value = serde_json::from_str(line).expect("each line is JSON");
        for key in [
            "seq",
            "receiver",
            "receiver_raw",
            "code",
            "code_raw",
            "action",
            "action_raw",
            "kind",
        ] {
            assert!(event.get(key).is_some(), "missing {key} in {line}");
        }
        if event["kind"] == "call_indirect" {
            call_indirects += 1;
            assert!(event.get("table_index").is_some());
            assert!(event.get("resolved_func").is_some());
        }
    }
    assert!(call_indirects > 0, "trace must contain dispatcher events");
}

#[test]
fn extract_memos_prints_the_candidate_set() {
    let output = eosfuzz(&[
        "extract-memos",
        "--wasm",
        fixture_path("notif_vuln.wasm").to_str().unwrap(),
    ]);
    assert_eq!(code(&output), 0);
    let memos: Vec<String> = serde_json::from_slice(&output.stdout).unwrap();
    assert_eq!(memos, vec!["deposit".to_string()]);

    // A non-matching signature yields the empty set.
    let output = eosfuzz(&[
        "extract-memos",
        "--wasm",
        fixture_path("notif_vuln.wasm").to_str().unwrap(),
        "--signature",
        "i32 i32",
    ]);
    assert_eq!(code(&output), 0);
    let memos: Vec<String> = serde_json::from_slice(&output.stdout).unwrap();
    assert!(memos.is_empty());
}

#[test]
fn replay_reproduces_and_detects_tampering() {
    let report_path = temp_file("replay_report.json");
    let output = eosfuzz(&[
        "run",
        "--wasm",
        fixture_path("notif_vuln.wasm").to_str().unwrap(),
        "--abi",
        fixture_path("notif_vuln.abi.json").to_str().unwrap(),
        "--actions",
        "300",
        "--report",
        report_path.to_str().unwrap(),
    ]);
    assert_eq!(code(&output), 2);

    let output = eosfuzz(&[
        "replay",
        "--report",
        report_path.to_str().unwrap(),
        "--finding",
        "0",
    ]);
    assert_eq!(
        code(&output),
        2,
        "stderr: {}",
        String::from_utf8_lossy(&output.stderr)
    );
    assert!(String::from_utf8_lossy(&output.stdout).contains("oracle predicate reproduced"));

    // Out-of-range index is a tool error.
    let output = eosfuzz(&[
        "replay",
        "--report",
        report_path.to_str().unwrap(),
        "--finding",
        "99",
    ]);
    assert_eq!(code(&output), 1);

    // Point the report at a different wasm: the hash check must refuse.
    let tampered_path = temp_file("tampered_report.json");
    let mut report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&report_path).unwrap()).unwrap();
    report["contracts"][0]["wasm"] =
        serde_json::Value::String(fixture_path("fake_vuln.wasm").display().to_string());
    std::fs::write(&tampered_path, serde_json::to_string(&report).unwrap()).unwrap();
    let output = eosfuzz(&[
        "replay",
        "--report",
        tampered_path.to_str().unwrap(),
        "--finding",
        "0",
    ]);
    assert_eq!(code(&output), 1);
    assert!(String::from_utf8_lossy(&output.stderr).contains("sha256"));

    // Same refusal when the ABI no longer matches.
    let abi_tampered = temp_file("abi_tampered_report.json");
    let mut report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&report_path).unwrap()).unwrap();
    report["contracts"][0]["abi"] =
        serde_json::Value::String(fixture_path("diamond1_like.abi.json").display().to_string());
    std::fs::write(&abi_tampered, serde_json::to_string(&report).unwrap()).unwrap();
    let output = eosfuzz(&[
        "replay",
        "--report",
        abi_tampered.to_str().unwrap(),
        "--finding",
        "0",
    ]);
    assert_eq!(code(&output), 1);
    assert!(String::from_utf8_lossy(&output.stderr).contains("ABI"));
}

#[test]
fn corpus_reports_are_deterministic_at_the_binary_level() {
    let first = temp_file("corpus_a.json");
    let second = temp_file("corpus_b.json");
    for (path, jobs) in [(&first, "1"), (&second, "3")] {
        let output = eosfuzz(&[
            "corpus",
            "--dir",
            fixtures_dir().to_str().unwrap(),
            "--jobs",
            jobs,
            "--actions",
            "120",
            "--no-timing",
            "--report",
            path.to_str().unwrap(),
        ]);
        assert_eq!(
            code(&output),
            2,
            "stderr: {}",
            String::from_utf8_lossy(&output.stderr)
        );
    }
    assert_eq!(
        std::fs::read(&first).unwrap(),
        std::fs::read(&second).unwrap(),
        "normalized corpus reports must be byte-identical"
    );
}

#[test]
fn custom_genesis_is_honored() {
    let genesis_path = temp_file("genesis.json");
    std::fs::write(
        &genesis_path,
        r#"{
            "accounts": [
                {"name": "eosio.token", "balance": "0.0000 EOS"},
                {"name": "sender", "balance": "2.0000 EOS"},
                {"name": "fakeagent", "balance": "2.0000 EOS"},
                {"name": "notifier", "balance": "2.0000 EOS"},
                {"name": "fake.vuln", "balance": "2.0000 EOS"}
            ],
            "block": {"tapos_block_num": 1, "tapos_block_prefix": 2, "current_time_us": 3}
        }"#,
    )
    .unwrap();
    let report_path = temp_file("genesis_report.json");
    let output = eosfuzz(&[
        "run",
        "--wasm",
        fixture_path("fake_vuln.wasm").to_str().unwrap(),
        "--abi",
        fixture_path("fake_vuln.abi.json").to_str().unwrap(),
        "--actions",
        "100",
        "--genesis",
        genesis_path.to_str().unwrap(),
        "--report",
        report_path.to_str().unwrap(),
    ]);
    // With only 2 EOS of funding the campaign still runs; probes may abort
    // once the sender drains inside a long test case.
    assert!(code(&output) == 0 || code(&output) == 2);
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&report_path).unwrap()).unwrap();
    assert_eq!(report["config"]["genesis"], genesis_path.to_str().unwrap());
    assert_eq!(report["contracts"][0]["stats"]["transactions"], 100);
}

#[test]
fn bad_mix_is_rejected_up_front() {
    let output = eosfuzz(&[
        "run",
        "--wasm",
        fixture_path("fake_vuln.wasm").to_str().unwrap(),
        "--abi",
        fixture_path("fake_vuln.abi.json").to_str().unwrap(),
        "--mix",
        "0.5,0.5,0.5,0.5",
    ]);
    assert_eq!(code(&output), 1, "weights not summing to 1 must fail");
}
