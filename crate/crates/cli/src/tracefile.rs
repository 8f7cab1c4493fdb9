//! JSON Lines trace export: one event per line with the fields
//! {seq, receiver, code, action, kind, ...payload}, names emitted both as
//! decoded strings and raw u64 values.

use eosfuzz_core::name::AccountName;
use eosfuzz_core::oracle::CampaignTrace;
use eosfuzz_core::trace::{TraceEvent, TraceKind};
use serde_json::{json, Map, Value};
use std::io::{BufWriter, Write};
use std::path::Path;

fn put_name(obj: &mut Map<String, Value>, key: &str, name: AccountName) {
    obj.insert(key.to_string(), json!(name.to_string_repr()));
    obj.insert(format!("{key}_raw"), json!(name.0));
}

pub fn event_json(event: &TraceEvent) -> Value {
    let mut obj = Map::new();
    obj.insert("seq".into(), json!(event.seq));
    put_name(&mut obj, "receiver", event.receiver);
    put_name(&mut obj, "code", event.code);
    put_name(&mut obj, "action", event.action);
    obj.insert("kind".into(), json!(event.kind.name()));
    match &event.kind {
        TraceKind::ActionBegin => {}
        TraceKind::ActionEnd { status } => {
            obj.insert("status".into(), json!(status.name()));
        }
        TraceKind::CallIndirect {
            table_index,
            resolved_func,
        } => {
            obj.insert("table_index".into(), json!(table_index));
            obj.insert("resolved_func".into(), json!(resolved_func));
        }
        TraceKind::Compare { op, lhs, rhs } => {
            obj.insert("op".into(), json!(op.name()));
            obj.insert("lhs".into(), json!(lhs));
            obj.insert("rhs".into(), json!(rhs));
        }
        TraceKind::HostCall { intrinsic, args } => {
            obj.insert("intrinsic".into(), json!(intrinsic));
            obj.insert("args".into(), json!(args));
        }
        TraceKind::TokenTransfer { from, to, amount } => {
            put_name(&mut obj, "from", *from);
            put_name(&mut obj, "to", *to);
            obj.insert("amount".into(), json!(amount));
        }
        TraceKind::AssertFired { message } => {
            obj.insert("message".into(), json!(message));
        }
        TraceKind::BlockInfoRead { which } => {
            obj.insert("which".into(), json!(which.name()));
        }
        TraceKind::Instr { opcode } => {
            obj.insert("opcode".into(), json!(opcode));
        }
    }
    Value::Object(obj)
}

/// Writes every event of the campaign to `path`, one JSON object per line.
pub fn write_trace(path: &Path, trace: &CampaignTrace) -> std::io::Result<()> {
    let file = std::fs::File::create(path)?;
    let mut w = BufWriter::new(file);
    for txn in &trace.transactions {
        for event in &txn.result.trace {
            serde_json::to_writer(&mut w, &event_json(event))?;
            w.write_all(b"\n")?;
        }
    }
    w.flush()
}

#[cfg(test)]
mod tests {
    use super::*;
    use eosfuzz_core::trace::ActionStatus;

    #[test]
    fn event_lines_carry_exact_fields() {
        let event = TraceEvent {
            seq: 3,
            receiver: AccountName::new("fake.vuln").unwrap(),
            code: AccountName::new("eosio.token").unwrap(),
            action: AccountName::new("transfer").unwrap(),
            kind: TraceKind::ActionEnd {
                status: ActionStatus::Ok,
            },
        };
        let value = event_json(&event);
        assert_eq!(value["seq"], 3);
        assert_eq!(value["receiver"], "fake.vuln");
        assert_eq!(value["code"], "eosio.token");
        assert_eq!(value["code_raw"], 6138663591592764928u64);
        assert_eq!(value["kind"], "action_end");
        assert_eq!(value["status"], "ok");
    }

    #[test]
    fn compare_events_carry_operands() {
        let event = TraceEvent {
            seq: 9,
            receiver: AccountName::new("a").unwrap(),
            code: AccountName::new("b").unwrap(),
            action: AccountName::new("transfer").unwrap(),
            kind: TraceKind::Compare {
                op: eosfuzz_core::trace::CompareOp::I64Ne,
                lhs: 5,
                rhs: 6,
            },
        };
        let value = event_json(&event);
        assert_eq!(value["op"], "i64.ne");
        assert_eq!(value["lhs"], 5);
        assert_eq!(value["rhs"], 6);
    }
}
