//! Acceptance suite: one test per criterion, each printing a PASS line.
//! Run with `cargo test --test acceptance -- --nocapture` to see the lines;
//! the harness itself reports pass/fail per criterion either way.

mod common;

use common::{fixtures_dir, read_fixture, wat_scan_memo_strings};
use eosfuzz::corpus::{load_expectations, run_corpus, Expectations, FixtureExpectation};
use eosfuzz::runner::{load_contract, run_contract, LoadedContract, RunConfig};
use eosfuzz_core::campaign::{execute_step, CampaignOutcome};
use eosfuzz_core::chain::{ChainConfig, ChainSim, Genesis, HarnessAccounts, TransactionResult};
use eosfuzz_core::gen::{gen_value, GenConfig, GenContext};
use eosfuzz_core::interp::{call_apply, instantiate, ApplyStatus, HostEnv, InterpConfig, Value};
use eosfuzz_core::name::{name_to_u64, u64_to_name, AccountName, NAME_CHARS};
use eosfuzz_core::oracle::{verify_evidence, VulnType};
use eosfuzz_core::rng::DetRng;
use eosfuzz_core::strings::get_memo_strings;
use eosfuzz_core::trace::{TraceKind, TraceSink};
use eosfuzz_core::value::{
    deserialize, serialize, transfer_value, Asset, Field, StructDef, TypeDesc,
};
use eosfuzz_core::wasm::parse_wasm;
use std::collections::BTreeSet;
use std::sync::Arc;
use std::time::Instant;

fn expectations() -> Expectations {
    load_expectations(&fixtures_dir())
        .expect("expectations load")
        .expect("expectations.json present")
}

fn load_fixture(fx: &FixtureExpectation) -> LoadedContract {
    load_contract(
        &fixtures_dir().join(&fx.wasm),
        &fixtures_dir().join(&fx.abi),
        fx.account.as_deref(),
    )
    .expect("fixture loads")
}

fn finding_set(outcome: &CampaignOutcome) -> BTreeSet<String> {
    outcome
        .findings
        .iter()
        .map(|f| f.vuln_type.name().to_string())
        .collect()
}

#[test]
fn criterion_1_fixture_oracle_sweep() {
    let t0 = Instant::now();
    let expectations = expectations();
    let behavioral: Vec<&FixtureExpectation> = expectations
        .fixtures
        .iter()
        .filter(|f| f.behavioral)
        .collect();
    assert_eq!(behavioral.len(), 10, "ten behavioral fixtures ship");

    for fx in &behavioral {
        let contract = load_fixture(fx);
        let expected: BTreeSet<String> = fx.expected_findings.iter().cloned().collect();
        for seed in 1..=20u64 {
            let mut config = RunConfig::default();
            config.gen.seed = seed;
            let outcome = run_contract(&contract, &config).expect("campaign runs");
            assert_eq!(
                finding_set(&outcome),
                expected,
                "fixture {} seed {seed}",
                fx.name
            );
            assert_eq!(
                outcome.stats.invariant_violations, 0,
                "fixture {} seed {seed}",
                fx.name
            );
            for finding in &outcome.findings {
                assert!(
                    verify_evidence(&outcome.trace, finding),
                    "evidence must dereference for {} seed {seed}",
                    fx.name
                );
            }
            // Known detector limitations, pinned on purpose:
            if fx.name == "vigor_like" {
                assert!(
                    outcome
                        .findings
                        .iter()
                        .any(|f| f.vuln_type == VulnType::FakeEosTransfer),
                    "vigor-shape fixture must be flagged (documented false positive)"
                );
            }
            if fx.name == "lottery10_like" {
                assert!(
                    outcome.findings.is_empty(),
                    "lottery10-shape fixture must not be flagged at the default budget"
                );
            }
        }
    }
    let elapsed = t0.elapsed();
    assert!(
        elapsed.as_secs() < 600,
        "sweep must finish under 10 minutes, took {elapsed:?}"
    );
    println!("acceptance criterion 1 (fixture oracle sweep, 10 fixtures x 20 seeds in {elapsed:?}): PASS");
}

#[test]
fn criterion_2_memo_extraction_equivalence() {
    let expectations = expectations();
    let mut checked = 0;
    for fx in &expectations.fixtures {
        let wat_name = fx.wasm.replace(".wasm", ".wat");
        let wat_text = String::from_utf8(read_fixture(&wat_name)).expect("wat is utf-8");
        let module = parse_wasm(&read_fixture(&fx.wasm)).expect("fixture parses");
        let implementation = get_memo_strings(
            &module,
            &eosfuzz_core::strings::default_transfer_signature(),
        );
        let oracle = wat_scan_memo_strings(&wat_text);
        assert_eq!(
            implementation, oracle,
            "binary analysis and WAT-scan oracle disagree on {}",
            fx.name
        );
        // One-sided imprecision: strings actually compared against the memo
        // are never missed.
        for memo in &fx.memo_strings {
            assert!(
                implementation.contains(memo.as_str()),
                "{}: memo string {memo:?} missed",
                fx.name
            );
        }
        if !implementation.is_empty() {
            checked += 1;
        }
    }
    assert!(checked >= 7, "most fixtures carry memo candidates");
    println!(
        "acceptance criterion 2 (memo extraction equals the WAT-scan oracle on all fixtures): PASS"
    );
}

/// Deterministic random type descriptors for the round-trip sweep.
fn random_desc(rng: &mut DetRng, depth: u32) -> TypeDesc {
    let variants = if depth >= 2 { 16 } else { 18 };
    match rng.below(variants) {
        0 => TypeDesc::Int8,
        1 => TypeDesc::Int16,
        2 => TypeDesc::Int32,
        3 => TypeDesc::Int64,
        4 => TypeDesc::Uint8,
        5 => TypeDesc::Uint16,
        6 => TypeDesc::Uint32,
        7 => TypeDesc::Uint64,
        8 => TypeDesc::Float32,
        9 => TypeDesc::Float64,
        10 => TypeDesc::Bool,
        11 => TypeDesc::String,
        12 => TypeDesc::Name,
        13 => TypeDesc::Asset,
        14 => TypeDesc::Symbol,
        15 => TypeDesc::PublicKey,
        16 => TypeDesc::Array(Box::new(random_desc(rng, depth + 1))),
        _ => {
            let nfields = 1 + rng.below(4) as usize;
            TypeDesc::Struct(Box::new(StructDef {
                name: "case".into(),
                fields: (0..nfields)
                    .map(|i| Field {
                        name: format!("f{i}"),
                        ty: random_desc(rng, depth + 1),
                    })
                    .collect(),
            }))
        }
    }
}

#[test]
fn criterion_3_serialization_round_trips() {
    // The canonical transfer payload against the byte-level oracle.
    let from = AccountName::new("alice").unwrap();
    let to = AccountName::new("bob").unwrap();
    let bytes = serialize(&transfer_value(from, to, Asset::eos(10_000), "hi")).unwrap();
    let mut oracle = Vec::new();
    oracle.extend_from_slice(&from.0.to_le_bytes());
    oracle.extend_from_slice(&to.0.to_le_bytes());
    oracle.extend_from_slice(&10_000i64.to_le_bytes());
    oracle.extend_from_slice(&[4, b'E', b'O', b'S', 0, 0, 0, 0]);
    oracle.extend_from_slice(&[2, b'h', b'i']);
    assert_eq!(bytes.len(), 35);
    assert_eq!(bytes, oracle, "transfer byte layout");

    // 10,000 generator-driven round trips, zero failures.
    let cfg = GenConfig::default();
    let pool = vec!["deposit".to_string(), "Must transfer EOS".to_string()];
    let mut ctx = GenContext::new(
        &cfg,
        AccountName::new("roundtrip").unwrap(),
        pool.clone(),
        pool,
    );
    let mut desc_rng = DetRng::seed_from_u64(0xC0FFEE);
    for case in 0..10_000u32 {
        let desc = random_desc(&mut desc_rng, 0);
        let value = gen_value(&desc, &mut ctx);
        let bytes = serialize(&value)
            .unwrap_or_else(|e| panic!("case {case}: serialize failed: {e} ({desc:?})"));
        let back = deserialize(&bytes, &desc, true)
            .unwrap_or_else(|e| panic!("case {case}: deserialize failed: {e} ({desc:?})"));
        assert_eq!(back, value, "case {case} round trip ({desc:?})");
    }
    println!(
        "acceptance criterion 3 (10,000 serialization round trips + transfer byte layout): PASS"
    );
}

#[test]
fn criterion_4_name_codec_round_trips() {
    let alphabet: Vec<u8> = NAME_CHARS.to_vec();
    let non_dot: Vec<u8> = alphabet.iter().copied().filter(|&c| c != b'.').collect();

    let mut checked = 0u32;
    // Exhaustive one-character names (trailing dots cannot round-trip by
    // construction, so the valid set excludes the bare dot).
    for &c in &non_dot {
        let s = String::from_utf8(vec![c]).unwrap();
        assert_eq!(u64_to_name(name_to_u64(&s).unwrap()), s);
        checked += 1;
    }
    // Exhaustive two-character names: any first character, non-dot second.
    for &c1 in &alphabet {
        for &c2 in &non_dot {
            let s = String::from_utf8(vec![c1, c2]).unwrap();
            assert_eq!(u64_to_name(name_to_u64(&s).unwrap()), s);
            checked += 1;
        }
    }
    // 1,000 random 12-character names.
    let mut rng = DetRng::seed_from_u64(0xBA5E32);
    for _ in 0..1000 {
        let mut s: String = (0..11)
            .map(|_| alphabet[rng.below_usize(alphabet.len())] as char)
            .collect();
        s.push(non_dot[rng.below_usize(non_dot.len())] as char);
        assert_eq!(u64_to_name(name_to_u64(&s).unwrap()), s, "name {s:?}");
        checked += 1;
    }
    // 31 one-char names + 32*31 two-char names + 1000 random names.
    assert_eq!(checked, 31 + 32 * 31 + 1000);
    println!(
        "acceptance criterion 4 (name codec round trips, {checked} names, zero failures): PASS"
    );
}

#[test]
fn criterion_5_chain_invariants_hold() {
    // Supply conservation and rollback atomicity are asserted in-harness
    // after every transaction; any violation lands in the stats.
    let expectations = expectations();
    for fx in &expectations.fixtures {
        let contract = load_fixture(fx);
        let config = RunConfig::default();
        let outcome = run_contract(&contract, &config).expect("campaign runs");
        assert_eq!(
            outcome.stats.invariant_violations, 0,
            "violations in {}",
            fx.name
        );
        // Re-check independently over the recorded transactions.
        for txn in &outcome.trace.transactions {
            match &txn.result.status {
                eosfuzz_core::chain::TxStatus::Applied => {
                    assert_eq!(txn.result.delta_sum(), 0, "supply drift in {}", fx.name)
                }
                _ => assert!(
                    txn.result.balance_deltas.is_empty(),
                    "rollback leak in {}",
                    fx.name
                ),
            }
        }
    }
    println!("acceptance criterion 5 (supply conservation + rollback atomicity over all fixture campaigns): PASS");
}

struct NullEnv;

impl HostEnv for NullEnv {
    fn action_payload(&self) -> &[u8] {
        &[]
    }
    fn receiver(&self) -> u64 {
        0
    }
    fn is_authorized(&self, _account: u64) -> bool {
        false
    }
    fn require_recipient(&mut self, _account: u64) {}
    fn queue_inline(&mut self, _packed: &[u8]) -> Result<(), String> {
        Err("no chain".into())
    }
    fn current_time(&self) -> u64 {
        0
    }
    fn tapos_block_num(&self) -> u32 {
        0
    }
    fn tapos_block_prefix(&self) -> u32 {
        0
    }
}

fn run_micro(wasm: &str, action: &str) -> (ApplyStatus, u64, Vec<TraceKind>, Vec<(String, i64)>) {
    let module = Arc::new(parse_wasm(&read_fixture(wasm)).unwrap());
    let mut instance = instantiate(Arc::clone(&module), InterpConfig::default()).unwrap();
    let mut sink = TraceSink::new(false);
    let mut budget = 1_000_000u64;
    let account = name_to_u64("micro").unwrap();
    let outcome = call_apply(
        &mut instance,
        &mut NullEnv,
        account,
        account,
        name_to_u64(action).unwrap(),
        &mut budget,
        &mut sink,
    );
    let globals: Vec<(String, i64)> = module
        .exports
        .iter()
        .filter(|e| e.kind == eosfuzz_core::wasm::ExportKind::Global)
        .map(|e| {
            let v = match instance.global_by_export(&e.name) {
                Some(Value::I64(v)) => v,
                other => panic!("global {}: {other:?}", e.name),
            };
            (e.name.clone(), v)
        })
        .collect();
    (
        outcome.status,
        outcome.instr_count,
        sink.into_events().into_iter().map(|e| e.kind).collect(),
        globals,
    )
}

fn count_kind(events: &[TraceKind], pred: impl Fn(&TraceKind) -> bool) -> usize {
    events.iter().filter(|k| pred(k)).count()
}

#[test]
fn criterion_6_interpreter_conformance() {
    // micro_math: (3 + 4) * 100 + sum(1..=10) = 755; counts hand-derived
    // from the WAT source.
    let (status, instrs, events, globals) = run_micro("micro_math.wasm", "go");
    assert_eq!(status, ApplyStatus::Ok);
    assert_eq!(
        globals,
        vec![("result".to_string(), 755), ("marks".to_string(), 1)]
    );
    assert_eq!(instrs, 157, "micro_math executed-instruction count");
    assert_eq!(
        count_kind(&events, |k| matches!(k, TraceKind::Compare { .. })),
        11
    );
    assert_eq!(
        count_kind(&events, |k| matches!(k, TraceKind::CallIndirect { .. })),
        1
    );
    assert_eq!(
        count_kind(&events, |k| matches!(k, TraceKind::HostCall { .. })),
        0
    );

    // micro_flow: double(42) = 84, select keeps it, br_table case 0 adds 100.
    let (status, instrs, events, globals) = run_micro("micro_flow.wasm", "go");
    assert_eq!(status, ApplyStatus::Ok);
    assert_eq!(globals, vec![("result".to_string(), 184)]);
    assert_eq!(instrs, 39, "micro_flow executed-instruction count");
    assert_eq!(
        count_kind(&events, |k| matches!(k, TraceKind::Compare { .. })),
        1
    );
    assert_eq!(
        count_kind(&events, |k| matches!(k, TraceKind::CallIndirect { .. })),
        0
    );

    // Gated path: any other action returns after the guard comparison.
    let (status, instrs, events, globals) = run_micro("micro_math.wasm", "transfer");
    assert_eq!(status, ApplyStatus::Ok);
    assert_eq!(globals[0].1, 0, "gated run leaves the result untouched");
    assert_eq!(instrs, 5);
    assert_eq!(events.len(), 1, "only the gate comparison is monitored");

    // Identical reruns produce identical event sequences and counts.
    let a = run_micro("micro_flow.wasm", "go");
    let b = run_micro("micro_flow.wasm", "go");
    assert_eq!(a.1, b.1);
    assert_eq!(a.2, b.2);
    println!("acceptance criterion 6 (interpreter conformance: exact values, event counts, instruction counts): PASS");
}

#[test]
fn criterion_7_end_to_end_asset_loss() {
    let expectations = expectations();
    let fx = expectations
        .fixtures
        .iter()
        .find(|f| f.name == "diamond1_like")
        .unwrap();
    let contract = load_fixture(fx);
    let config = RunConfig::default();
    let outcome = run_contract(&contract, &config).expect("campaign runs");
    let got = finding_set(&outcome);
    assert!(
        got.contains("forged_transfer_notification"),
        "findings: {got:?}"
    );
    assert!(got.contains("asset_loss"), "findings: {got:?}");

    let finding = outcome
        .findings
        .iter()
        .find(|f| f.vuln_type == VulnType::AssetLoss)
        .unwrap();

    // Replay the recorded steps from genesis, twice, and compare.
    let replay = |steps: &[eosfuzz_core::gen::Step]| -> (i64, i64, Vec<TransactionResult>) {
        let harness = HarnessAccounts::default();
        let genesis = Genesis::standard(contract.account, &harness);
        let mut chain = ChainSim::new(genesis, harness, ChainConfig::default());
        chain
            .deploy_wasm(contract.account, Arc::clone(&contract.module))
            .unwrap();
        chain.set_attack_target(contract.account);
        let cut_before = chain.balance(contract.account);
        let sender_before = chain.balance(harness.sender);
        let mut results = Vec::new();
        for step in steps {
            results.push(execute_step(&mut chain, contract.account, step).unwrap());
            chain.advance_block();
        }
        (
            chain.balance(contract.account) - cut_before,
            chain.balance(harness.sender) - sender_before,
            results,
        )
    };
    let (cut_delta, sender_delta, first) = replay(&finding.replay);
    assert!(
        cut_delta < 0,
        "contract balance must strictly decrease: {cut_delta}"
    );
    assert!(
        sender_delta > 0,
        "sender balance must strictly increase: {sender_delta}"
    );
    let (cut2, sender2, second) = replay(&finding.replay);
    assert_eq!((cut_delta, sender_delta), (cut2, sender2));
    assert_eq!(first, second, "replay must be deterministic");
    println!("acceptance criterion 7 (diamond-style end-to-end: forged notification + asset loss, signs verified, deterministic replay): PASS");
}

#[test]
fn criterion_8_throughput_floor() {
    let config = RunConfig::default();
    let report = run_corpus(&fixtures_dir(), &config, 1).expect("corpus runs");
    let timing = report.timing.expect("timing present");
    assert!(
        timing.wall_ms < 120_000,
        "the 12-fixture corpus must finish under 120 s, took {} ms",
        timing.wall_ms
    );
    let total: u64 = report
        .contracts
        .iter()
        .map(|c| c.stats.transactions as u64)
        .sum();
    assert!(total >= 12_000, "corpus dispatched {total} actions");
    assert!(
        timing.actions_per_sec >= 11.0,
        "sustained rate {} actions/sec is below the floor",
        timing.actions_per_sec
    );
    println!(
        "acceptance criterion 8 (throughput {:.0} actions/sec >= 11 floor): PASS",
        timing.actions_per_sec
    );
}

#[test]
fn criterion_9_report_determinism() {
    let config = RunConfig::default();
    let first = run_corpus(&fixtures_dir(), &config, 1).expect("corpus runs");
    let second = run_corpus(&fixtures_dir(), &config, 4).expect("corpus runs");
    assert_eq!(
        first.normalized_json(),
        second.normalized_json(),
        "normalized reports must be byte-identical"
    );
    println!("acceptance criterion 9 (byte-identical reports after timestamp normalization): PASS");
}
