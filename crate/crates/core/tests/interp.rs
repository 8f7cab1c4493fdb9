//! Interpreter semantics and instrumentation tests against small WAT
//! programs with hand-derived expected values and event counts.

use eosfuzz_core::interp::{
    call_apply, instantiate, ApplyStatus, HostEnv, Instance, InterpConfig, LinkError, Trap, Value,
};
use eosfuzz_core::trace::{TraceEvent, TraceKind, TraceSink};
use eosfuzz_core::wasm::parse_wasm;
use std::sync::Arc;

#[derive(Default)]
struct TestEnv {
    payload: Vec<u8>,
    receiver: u64,
    authorized: Vec<u64>,
    recipients: Vec<u64>,
    inline: Vec<Vec<u8>>,
    time: u64,
    tapos_num: u32,
    tapos_prefix: u32,
}

impl HostEnv for TestEnv {
    fn action_payload(&self) -> &[u8] {
        &self.payload
    }
    fn receiver(&self) -> u64 {
        self.receiver
    }
    fn is_authorized(&self, account: u64) -> bool {
        self.authorized.contains(&account)
    }
    fn require_recipient(&mut self, account: u64) {
        self.recipients.push(account);
    }
    fn queue_inline(&mut self, packed: &[u8]) -> Result<(), String> {
        self.inline.push(packed.to_vec());
        Ok(())
    }
    fn current_time(&self) -> u64 {
        self.time
    }
    fn tapos_block_num(&self) -> u32 {
        self.tapos_num
    }
    fn tapos_block_prefix(&self) -> u32 {
        self.tapos_prefix
    }
}

fn build(wat_text: &str) -> Instance {
    let bytes = wat::parse_str(wat_text).unwrap();
    let module = Arc::new(parse_wasm(&bytes).unwrap());
    instantiate(module, InterpConfig::default()).unwrap()
}

fn run(
    instance: &mut Instance,
    env: &mut TestEnv,
    action: u64,
    budget: u64,
) -> (ApplyStatus, u64, Vec<TraceEvent>) {
    let mut sink = TraceSink::new(false);
    let mut remaining = budget;
    let outcome = call_apply(instance, env, 1, 2, action, &mut remaining, &mut sink);
    (outcome.status, outcome.instr_count, sink.into_events())
}

fn result_global(instance: &Instance) -> i64 {
    match instance.global_by_export("result").unwrap() {
        Value::I64(v) => v,
        other => panic!("unexpected global {other:?}"),
    }
}

#[test]
fn locals_add_and_store_to_global() {
    // Hand evaluation: 3 + 4 stored into the global; exactly nine
    // instructions run (2x const, 2x set, 2x get, add, global.set, end).
    let mut inst = build(
        r#"(module
            (global $result (export "result") (mut i64) (i64.const 0))
            (func (export "apply") (param i64 i64 i64)
                (local $a i64) (local $b i64)
                (local.set $a (i64.const 3))
                (local.set $b (i64.const 4))
                (global.set $result (i64.add (local.get $a) (local.get $b)))))"#,
    );
    let (status, count, events) = run(&mut inst, &mut TestEnv::default(), 0, 1_000);
    assert_eq!(status, ApplyStatus::Ok);
    assert_eq!(result_global(&inst), 7);
    assert_eq!(count, 9);
    assert!(events.is_empty(), "no monitored instructions ran");
}

#[test]
fn loop_sums_first_ten_integers() {
    let mut inst = build(
        r#"(module
            (global $result (export "result") (mut i64) (i64.const 0))
            (func (export "apply") (param i64 i64 i64)
                (local $i i64) (local $sum i64)
                (block $done
                    (loop $top
                        (local.set $i (i64.add (local.get $i) (i64.const 1)))
                        (local.set $sum (i64.add (local.get $sum) (local.get $i)))
                        (br_if $done (i64.eq (local.get $i) (i64.const 10)))
                        (br $top)))
                (global.set $result (local.get $sum))))"#,
    );
    let (status, _, events) = run(&mut inst, &mut TestEnv::default(), 0, 10_000);
    assert_eq!(status, ApplyStatus::Ok);
    assert_eq!(result_global(&inst), 55);
    // The loop guard comparison runs exactly ten times.
    let compares = events
        .iter()
        .filter(|e| matches!(e.kind, TraceKind::Compare { .. }))
        .count();
    assert_eq!(compares, 10);
}

#[test]
fn i64_eq_pushes_one_and_records_operands() {
    let mut inst = build(
        r#"(module
            (global $result (export "result") (mut i64) (i64.const 99))
            (func (export "apply") (param i64 i64 i64)
                (global.set $result
                    (i64.extend_i32_u (i64.eq (i64.const 5) (i64.const 5))))))"#,
    );
    let (status, _, events) = run(&mut inst, &mut TestEnv::default(), 0, 1_000);
    assert_eq!(status, ApplyStatus::Ok);
    assert_eq!(result_global(&inst), 1);
    assert_eq!(events.len(), 1);
    match &events[0].kind {
        TraceKind::Compare { lhs, rhs, .. } => {
            assert_eq!((*lhs, *rhs), (5, 5));
        }
        other => panic!("expected compare, got {other:?}"),
    }
}

#[test]
fn br_table_selects_cases_and_default() {
    let text = r#"(module
        (global $result (export "result") (mut i64) (i64.const 0))
        (func (export "apply") (param i64 i64 i64)
            (block $default
                (block $case1
                    (block $case0
                        (br_table $case0 $case1 $default (i32.wrap_i64 (local.get 2))))
                    (global.set $result (i64.const 100))
                    (return))
                (global.set $result (i64.const 200))
                (return))
            (global.set $result (i64.const 300))))"#;
    for (action, expected) in [(0u64, 100), (1, 200), (2, 300), (99, 300)] {
        let mut inst = build(text);
        let (status, _, _) = run(&mut inst, &mut TestEnv::default(), action, 1_000);
        assert_eq!(status, ApplyStatus::Ok);
        assert_eq!(result_global(&inst), expected, "action {action}");
    }
}

#[test]
fn call_indirect_resolves_and_is_instrumented() {
    let mut inst = build(
        r#"(module
            (type $h (func (param i64)))
            (table 3 funcref)
            (global $result (export "result") (mut i64) (i64.const 0))
            (func $set (param $v i64) (global.set $result (local.get $v)))
            (func (export "apply") (param i64 i64 i64)
                (call_indirect (type $h) (local.get 1) (i32.const 1)))
            (elem (i32.const 1) $set))"#,
    );
    let mut sink = TraceSink::new(false);
    let mut budget = 1_000u64;
    let outcome = call_apply(
        &mut inst,
        &mut TestEnv::default(),
        1,
        42,
        7,
        &mut budget,
        &mut sink,
    );
    assert_eq!(outcome.status, ApplyStatus::Ok);
    assert_eq!(result_global(&inst), 42);
    let events = sink.into_events();
    assert_eq!(events.len(), 1);
    match events[0].kind {
        TraceKind::CallIndirect {
            table_index,
            resolved_func,
        } => {
            assert_eq!(table_index, 1);
            assert_eq!(resolved_func, 0); // $set is the first function
        }
        ref other => panic!("expected call_indirect, got {other:?}"),
    }
}

#[test]
fn call_indirect_null_and_type_mismatch_trap() {
    let mut inst = build(
        r#"(module
            (type $h (func (param i64)))
            (table 3 funcref)
            (func $wrong (param i32))
            (func (export "apply") (param i64 i64 i64)
                (if (i64.eq (local.get 2) (i64.const 0))
                    (then (call_indirect (type $h) (i64.const 1) (i32.const 0)))
                    (else (call_indirect (type $h) (i64.const 1) (i32.const 2)))))
            (elem (i32.const 2) $wrong))"#,
    );
    let (status, _, _) = run(&mut inst, &mut TestEnv::default(), 0, 1_000);
    assert_eq!(status, ApplyStatus::Trapped(Trap::UndefinedTableElement));
    let (status, _, _) = run(&mut inst, &mut TestEnv::default(), 1, 1_000);
    assert_eq!(status, ApplyStatus::Trapped(Trap::IndirectTypeMismatch));
}

#[test]
fn failed_assert_aborts_with_message() {
    let mut inst = build(
        r#"(module
            (import "env" "eosio_assert" (func $assert (param i32 i32)))
            (memory 1)
            (data (i32.const 32) "Must transfer EOS\00")
            (func (export "apply") (param i64 i64 i64)
                (call $assert (i32.const 0) (i32.const 32))))"#,
    );
    let (status, _, events) = run(&mut inst, &mut TestEnv::default(), 0, 1_000);
    assert_eq!(status, ApplyStatus::Aborted("Must transfer EOS".into()));
    assert_eq!(events.len(), 1);
    match &events[0].kind {
        TraceKind::AssertFired { message } => assert_eq!(message, "Must transfer EOS"),
        other => panic!("expected assert_fired, got {other:?}"),
    }
}

#[test]
fn passing_assert_is_a_host_call() {
    let mut inst = build(
        r#"(module
            (import "env" "eosio_assert" (func $assert (param i32 i32)))
            (memory 1)
            (func (export "apply") (param i64 i64 i64)
                (call $assert (i32.const 1) (i32.const 0))))"#,
    );
    let (status, _, events) = run(&mut inst, &mut TestEnv::default(), 0, 1_000);
    assert_eq!(status, ApplyStatus::Ok);
    assert_eq!(events.len(), 1);
    assert!(matches!(
        events[0].kind,
        TraceKind::HostCall {
            intrinsic: "eosio_assert",
            ..
        }
    ));
}

#[test]
fn read_action_data_returns_payload() {
    let mut inst = build(
        r#"(module
            (import "env" "read_action_data" (func $rad (param i32 i32) (result i32)))
            (import "env" "action_data_size" (func $ads (result i32)))
            (memory 1)
            (global $size (export "size") (mut i64) (i64.const 0))
            (global $result (export "result") (mut i64) (i64.const 0))
            (func (export "apply") (param i64 i64 i64)
                (global.set $size (i64.extend_i32_u (call $ads)))
                (drop (call $rad (i32.const 64) (i32.const 128)))
                (global.set $result (i64.load (i32.const 64)))))"#,
    );
    let mut env = TestEnv {
        payload: 0x00C0_FFEE_DEAD_BEEFu64.to_le_bytes().to_vec(),
        ..TestEnv::default()
    };
    let (status, _, events) = run(&mut inst, &mut env, 0, 1_000);
    assert_eq!(status, ApplyStatus::Ok);
    assert_eq!(
        inst.global_by_export("size").unwrap(),
        Value::I64(8),
        "action_data_size must equal the payload length"
    );
    assert_eq!(result_global(&inst), 0x00C0_FFEE_DEAD_BEEFu64 as i64);
    let host_calls = events
        .iter()
        .filter(|e| matches!(e.kind, TraceKind::HostCall { .. }))
        .count();
    assert_eq!(host_calls, 2);
}

#[test]
fn tapos_reads_emit_block_info_events() {
    let mut inst = build(
        r#"(module
            (import "env" "tapos_block_num" (func $num (result i32)))
            (import "env" "tapos_block_prefix" (func $prefix (result i32)))
            (global $result (export "result") (mut i64) (i64.const 0))
            (func (export "apply") (param i64 i64 i64)
                (global.set $result
                    (i64.mul (i64.extend_i32_u (call $prefix))
                             (i64.extend_i32_u (call $num))))))"#,
    );
    let mut env = TestEnv {
        tapos_num: 100,
        tapos_prefix: 7,
        ..TestEnv::default()
    };
    let (status, _, events) = run(&mut inst, &mut env, 0, 1_000);
    assert_eq!(status, ApplyStatus::Ok);
    assert_eq!(result_global(&inst), 700);
    let block_reads = events
        .iter()
        .filter(|e| matches!(e.kind, TraceKind::BlockInfoRead { .. }))
        .count();
    assert_eq!(block_reads, 2);
    // tapos intrinsics are block-info reads, not generic host calls
    assert!(events
        .iter()
        .all(|e| !matches!(e.kind, TraceKind::HostCall { .. })));
}

#[test]
fn sha256_intrinsic_writes_exact_digest() {
    let mut inst = build(
        r#"(module
            (import "env" "sha256" (func $sha (param i32 i32 i32)))
            (memory 1)
            (data (i32.const 0) "abc")
            (global $result (export "result") (mut i64) (i64.const 0))
            (func (export "apply") (param i64 i64 i64)
                (call $sha (i32.const 0) (i32.const 3) (i32.const 100))
                (global.set $result (i64.load (i32.const 100)))))"#,
    );
    let (status, _, _) = run(&mut inst, &mut TestEnv::default(), 0, 1_000);
    assert_eq!(status, ApplyStatus::Ok);
    // First 8 bytes of sha256("abc"), little-endian.
    let expected = i64::from_le_bytes([0xba, 0x78, 0x16, 0xbf, 0x8f, 0x01, 0xcf, 0xea]);
    assert_eq!(result_global(&inst), expected);
}

#[test]
fn budget_exhaustion_stops_infinite_loops() {
    let mut inst = build(
        r#"(module
            (func (export "apply") (param i64 i64 i64)
                (loop $spin (br $spin))))"#,
    );
    let (status, count, _) = run(&mut inst, &mut TestEnv::default(), 0, 501);
    assert_eq!(status, ApplyStatus::OutOfBudget);
    assert_eq!(count, 501, "every executed instruction is charged");
}

#[test]
fn budget_runs_are_deterministic() {
    let text = r#"(module
        (global $result (export "result") (mut i64) (i64.const 0))
        (func (export "apply") (param i64 i64 i64)
            (local $i i64)
            (block $out (loop $top
                (local.set $i (i64.add (local.get $i) (i64.const 1)))
                (br_if $out (i64.eq (local.get $i) (i64.const 50)))
                (br $top)))
            (global.set $result (local.get $i))))"#;
    let runs: Vec<(ApplyStatus, u64, Vec<TraceEvent>)> = (0..2)
        .map(|_| {
            let mut inst = build(text);
            run(&mut inst, &mut TestEnv::default(), 0, 100_000)
        })
        .collect();
    assert_eq!(runs[0], runs[1]);
}

#[test]
fn verbose_mode_does_not_disturb_monitored_events() {
    let text = r#"(module
        (global $result (export "result") (mut i64) (i64.const 0))
        (func (export "apply") (param i64 i64 i64)
            (drop (i64.eq (local.get 0) (local.get 1)))
            (drop (i64.ne (local.get 0) (local.get 2)))
            (global.set $result (i64.const 11))))"#;

    let mut quiet_inst = build(text);
    let mut quiet_sink = TraceSink::new(false);
    let mut budget = 10_000u64;
    call_apply(
        &mut quiet_inst,
        &mut TestEnv::default(),
        1,
        2,
        3,
        &mut budget,
        &mut quiet_sink,
    );

    let mut loud_inst = build(text);
    let mut loud_sink = TraceSink::new(true);
    let mut budget = 10_000u64;
    call_apply(
        &mut loud_inst,
        &mut TestEnv::default(),
        1,
        2,
        3,
        &mut budget,
        &mut loud_sink,
    );

    assert_eq!(result_global(&quiet_inst), result_global(&loud_inst));
    let strip = |events: Vec<TraceEvent>| -> Vec<TraceKind> {
        events
            .into_iter()
            .filter(|e| !matches!(e.kind, TraceKind::Instr { .. }))
            .map(|e| e.kind)
            .collect()
    };
    let quiet_kinds = strip(quiet_sink.into_events());
    let loud_events = loud_sink.into_events();
    assert!(loud_events
        .iter()
        .any(|e| matches!(e.kind, TraceKind::Instr { .. })));
    assert_eq!(quiet_kinds, strip(loud_events));
}

#[test]
fn traps_surface_as_status() {
    let cases = [
        ("(unreachable)", Trap::Unreachable),
        (
            "(drop (i32.div_s (i32.const 1) (i32.const 0)))",
            Trap::DivideByZero,
        ),
        (
            "(drop (i32.div_s (i32.const -2147483648) (i32.const -1)))",
            Trap::IntegerOverflow,
        ),
        (
            "(drop (i64.load (i32.const 70000)))",
            Trap::MemoryOutOfBounds,
        ),
        (
            "(drop (i32.trunc_f64_s (f64.const 1e300)))",
            Trap::IntegerOverflow,
        ),
        (
            "(drop (i32.trunc_f64_s (f64.const nan)))",
            Trap::InvalidConversion,
        ),
    ];
    for (body, expected) in cases {
        let text = format!(
            r#"(module (memory 1)
                (func (export "apply") (param i64 i64 i64) {body}))"#
        );
        let mut inst = build(&text);
        let (status, _, _) = run(&mut inst, &mut TestEnv::default(), 0, 10_000);
        assert_eq!(status, ApplyStatus::Trapped(expected), "body: {body}");
    }
}

#[test]
fn memory_grow_beyond_cap_traps() {
    let mut inst = build(
        r#"(module (memory 1)
            (func (export "apply") (param i64 i64 i64)
                (drop (memory.grow (i32.const 100)))))"#,
    );
    let (status, _, _) = run(&mut inst, &mut TestEnv::default(), 0, 1_000);
    assert_eq!(status, ApplyStatus::Trapped(Trap::MemoryGrowBeyondCap));

    let mut inst = build(
        r#"(module (memory 1)
            (global $result (export "result") (mut i64) (i64.const 0))
            (func (export "apply") (param i64 i64 i64)
                (drop (memory.grow (i32.const 1)))
                (global.set $result (i64.extend_i32_u (memory.size)))))"#,
    );
    let (status, _, _) = run(&mut inst, &mut TestEnv::default(), 0, 1_000);
    assert_eq!(status, ApplyStatus::Ok);
    assert_eq!(result_global(&inst), 2);
}

#[test]
fn recursion_depth_is_bounded() {
    let mut inst = build(
        r#"(module
            (func $spin (call $spin))
            (func (export "apply") (param i64 i64 i64)
                (call $spin)))"#,
    );
    let (status, _, _) = run(&mut inst, &mut TestEnv::default(), 0, 100_000);
    assert_eq!(status, ApplyStatus::Trapped(Trap::CallDepthExceeded));
}

#[test]
fn missing_apply_is_a_link_error() {
    let bytes = wat::parse_str("(module (func (param i64)))").unwrap();
    let module = Arc::new(parse_wasm(&bytes).unwrap());
    assert_eq!(
        instantiate(module, InterpConfig::default()).unwrap_err(),
        LinkError::MissingApply
    );

    let bytes = wat::parse_str(r#"(module (func (export "apply") (param i64)))"#).unwrap();
    let module = Arc::new(parse_wasm(&bytes).unwrap());
    assert_eq!(
        instantiate(module, InterpConfig::default()).unwrap_err(),
        LinkError::WrongApplySignature
    );
}

#[test]
fn unresolved_import_is_a_link_error() {
    let bytes = wat::parse_str(
        r#"(module
            (import "env" "mystery_call" (func (param i32)))
            (func (export "apply") (param i64 i64 i64)))"#,
    )
    .unwrap();
    let module = Arc::new(parse_wasm(&bytes).unwrap());
    match instantiate(module, InterpConfig::default()) {
        Err(LinkError::UnresolvedImport { name, .. }) => assert_eq!(name, "mystery_call"),
        other => panic!("expected unresolved import, got {other:?}"),
    }
}

#[test]
fn float_bodies_obey_the_float_switch() {
    let bytes = wat::parse_str(
        r#"(module
            (global $result (export "result") (mut i64) (i64.const 0))
            (func (export "apply") (param i64 i64 i64)
                (global.set $result
                    (i64.trunc_f64_s (f64.add (f64.const 1.5) (f64.const 2.5))))))"#,
    )
    .unwrap();
    let module = Arc::new(parse_wasm(&bytes).unwrap());

    let disabled = InterpConfig {
        enable_floats: false,
        ..InterpConfig::default()
    };
    assert_eq!(
        instantiate(Arc::clone(&module), disabled).unwrap_err(),
        LinkError::FloatsDisabled
    );

    let mut inst = instantiate(module, InterpConfig::default()).unwrap();
    let (status, _, _) = run(&mut inst, &mut TestEnv::default(), 0, 1_000);
    assert_eq!(status, ApplyStatus::Ok);
    assert_eq!(result_global(&inst), 4);
}

#[test]
fn require_auth_aborts_for_unauthorized_accounts() {
    let text = r#"(module
        (import "env" "require_auth" (func $auth (param i64)))
        (func (export "apply") (param i64 i64 i64)
            (call $auth (local.get 2))))"#;
    let mut inst = build(text);
    let mut env = TestEnv {
        authorized: vec![77],
        ..TestEnv::default()
    };
    let (status, _, _) = run(&mut inst, &mut env, 77, 1_000);
    assert_eq!(status, ApplyStatus::Ok);
    let (status, _, _) = run(&mut inst, &mut env, 78, 1_000);
    assert!(matches!(status, ApplyStatus::Aborted(_)));
}

#[test]
fn require_recipient_reaches_the_host() {
    let mut inst = build(
        r#"(module
            (import "env" "require_recipient" (func $rr (param i64)))
            (func (export "apply") (param i64 i64 i64)
                (call $rr (local.get 2))
                (call $rr (local.get 2))))"#,
    );
    let mut env = TestEnv::default();
    let (status, _, events) = run(&mut inst, &mut env, 1234, 1_000);
    assert_eq!(status, ApplyStatus::Ok);
    // Dedup is the dispatcher's job; the interpreter forwards each call.
    assert_eq!(env.recipients, vec![1234, 1234]);
    assert_eq!(events.len(), 2);
}

#[test]
fn instance_reset_restores_memory_and_globals() {
    let mut inst = build(
        r#"(module
            (memory 1)
            (data (i32.const 0) "seed")
            (global $result (export "result") (mut i64) (i64.const 5))
            (func (export "apply") (param i64 i64 i64)
                (global.set $result (i64.const 33))
                (i64.store (i32.const 0) (i64.const -1))))"#,
    );
    let (status, _, _) = run(&mut inst, &mut TestEnv::default(), 0, 1_000);
    assert_eq!(status, ApplyStatus::Ok);
    assert_eq!(result_global(&inst), 33);
    inst.reset().unwrap();
    assert_eq!(result_global(&inst), 5);
    assert_eq!(&inst.memory()[0..4], b"seed");
}
