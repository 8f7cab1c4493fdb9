//! Report JSON schema and the JSON mirrors of core types.
//!
//! Reports must be byte-for-byte reproducible given identical config and
//! inputs, so every volatile value lives in the single optional `timing`
//! field and all collections are emitted in deterministic order. Replay
//! steps embed argument values losslessly (floats as bit patterns).

use anyhow::{bail, Context, Result};
use eosfuzz_core::gen::{AgentKind, Step};
use eosfuzz_core::name::AccountName;
use eosfuzz_core::oracle::{Evidence, Finding, VulnType};
use eosfuzz_core::value::{Asset, Symbol, TypedValue};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

pub const SCHEMA_VERSION: u32 = 1;

pub fn hex_encode(bytes: &[u8]) -> String {
    let mut out = String::with_capacity(bytes.len() * 2);
    for b in bytes {
        out.push_str(&format!("{b:02x}"));
    }
    out
}

pub fn hex_decode(s: &str) -> Result<Vec<u8>> {
    let s = s.strip_prefix("0x").unwrap_or(s);
    if !s.len().is_multiple_of(2) {
        bail!("odd-length hex string");
    }
    (0..s.len() / 2)
        .map(|i| u8::from_str_radix(&s[2 * i..2 * i + 2], 16).context("bad hex digit"))
        .collect()
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct Report {
    pub schema_version: u32,
    pub tool: ToolInfo,
    pub config: ConfigEcho,
    pub contracts: Vec<ContractReport>,
    pub summary: Summary,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing: Option<Timing>,
}

impl Report {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serialization");
        s.push('\n');
        s
    }

    /// The report with the volatile timing field removed; two runs with
    /// identical flags produce byte-identical normalized JSON.
    pub fn normalized_json(&self) -> String {
        let mut clone = self.clone();
        clone.timing = None;
        clone.to_json()
    }

    pub fn total_findings(&self) -> usize {
        self.contracts.iter().map(|c| c.findings.len()).sum()
    }
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct ToolInfo {
    pub name: String,
    pub version: String,
}

impl Default for ToolInfo {
    fn default() -> Self {
        ToolInfo {
            name: "eosfuzz".into(),
            version: env!("CARGO_PKG_VERSION").into(),
        }
    }
}

/// The full effective configuration, echoed for reproducibility.
#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct ConfigEcho {
    pub seed: u64,
    pub actions: u32,
    /// abi_call, fake_transfer, forged_notification, genuine_probe
    pub mix: [f64; 4],
    pub max_case_len: u32,
    pub max_array_len: u32,
    pub max_string_len: u32,
    pub abi_asset_cap: i64,
    pub attack_asset_cap: i64,
    pub budget: u64,
    pub max_action_depth: u32,
    pub strict_blockinfo: bool,
    pub verbose_trace: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub genesis: Option<String>,
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct Timing {
    pub started_unix_ms: u64,
    pub wall_ms: u64,
    pub actions_per_sec: f64,
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct ContractReport {
    pub name: String,
    pub account: String,
    pub wasm: String,
    pub abi: String,
    pub wasm_sha256: String,
    pub abi_sha256: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub findings: Vec<FindingJson>,
    pub skipped_oracles: Vec<SkippedOracleJson>,
    pub stats: StatsJson,
    pub string_pool_size: u32,
    pub memo_candidates: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expected: Option<ExpectedJson>,
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct SkippedOracleJson {
    pub oracle: String,
    pub reason: String,
}

#[derive(Serialize, Deserialize, Clone, Debug, Default)]
pub struct StatsJson {
    pub test_cases: u32,
    pub transactions: u32,
    pub applied: u32,
    pub aborted: u32,
    pub trapped: u32,
    pub budget_exceeded: u32,
    pub other_errors: u32,
    pub step_errors: u32,
    pub total_instructions: u64,
    pub invariant_violations: u32,
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct ExpectedJson {
    pub expected_findings: Vec<String>,
    pub ground_truth: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub limitation: Option<String>,
    /// Whether the actual finding set equals the expected one.
    pub matches: bool,
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct FindingJson {
    pub vuln_type: String,
    pub evidence: Vec<EvidenceJson>,
    pub replay: Vec<StepJson>,
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct EvidenceJson {
    pub transaction: usize,
    pub seq_start: u64,
    pub seq_end: u64,
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct Summary {
    pub contracts: u32,
    pub campaigns_failed: u32,
    pub contracts_with_findings: u32,
    /// Contracts flagged per vulnerability type.
    pub findings_by_type: BTreeMap<String, u32>,
    /// Per-type accuracy rows; FP/FN populated only when ground truth exists.
    pub table: Vec<SummaryRow>,
    /// Contracts whose finding set differs from the expected one.
    pub mismatches: Vec<MismatchJson>,
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct SummaryRow {
    pub vuln_type: String,
    pub total: u32,
    pub reported: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub false_positives: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub false_negatives: Option<u32>,
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct MismatchJson {
    pub contract: String,
    pub expected: Vec<String>,
    pub actual: Vec<String>,
}

/// Lossless JSON form of one generated step.
#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StepJson {
    AbiCall {
        action: String,
        args: Vec<ValueJson>,
    },
    Agent {
        agent: String,
        amount: String,
        memo: String,
    },
}

impl StepJson {
    pub fn from_step(step: &Step) -> StepJson {
        match step {
            Step::AbiCall { action, args } => StepJson::AbiCall {
                action: action.to_string_repr(),
                args: args.iter().map(ValueJson::from_value).collect(),
            },
            Step::Agent { kind, amount, memo } => StepJson::Agent {
                agent: kind.to_string(),
                amount: amount.to_string(),
                memo: memo.clone(),
            },
        }
    }

    pub fn to_step(&self) -> Result<Step> {
        Ok(match self {
            StepJson::AbiCall { action, args } => Step::AbiCall {
                action: AccountName::new(action)
                    .map_err(|e| anyhow::anyhow!("bad action name {action:?}: {e}"))?,
                args: args
                    .iter()
                    .map(ValueJson::to_value)
                    .collect::<Result<_>>()?,
            },
            StepJson::Agent {
                agent,
                amount,
                memo,
            } => Step::Agent {
                kind: AgentKind::parse(agent)
                    .with_context(|| format!("unknown agent kind {agent:?}"))?,
                amount: Asset::parse(amount).with_context(|| format!("bad asset {amount:?}"))?,
                memo: memo.clone(),
            },
        })
    }
}

/// Lossless JSON form of one typed value; floats carry their bit patterns.
#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
#[serde(tag = "t", rename_all = "snake_case")]
pub enum ValueJson {
    Int8 { v: i8 },
    Int16 { v: i16 },
    Int32 { v: i32 },
    Int64 { v: i64 },
    Uint8 { v: u8 },
    Uint16 { v: u16 },
    Uint32 { v: u32 },
    Uint64 { v: u64 },
    Float32 { bits: String },
    Float64 { bits: String },
    Bool { v: bool },
    String { v: String },
    Name { v: String },
    Asset { v: String },
    Symbol { v: String },
    PublicKey { hex: String },
    Array { items: Vec<ValueJson> },
    Struct { fields: Vec<FieldJson> },
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct FieldJson {
    pub name: String,
    pub value: ValueJson,
}

impl ValueJson {
    pub fn from_value(v: &TypedValue) -> ValueJson {
        match v {
            TypedValue::Int8(v) => ValueJson::Int8 { v: *v },
            TypedValue::Int16(v) => ValueJson::Int16 { v: *v },
            TypedValue::Int32(v) => ValueJson::Int32 { v: *v },
            TypedValue::Int64(v) => ValueJson::Int64 { v: *v },
            TypedValue::Uint8(v) => ValueJson::Uint8 { v: *v },
            TypedValue::Uint16(v) => ValueJson::Uint16 { v: *v },
            TypedValue::Uint32(v) => ValueJson::Uint32 { v: *v },
            TypedValue::Uint64(v) => ValueJson::Uint64 { v: *v },
            TypedValue::Float32(v) => ValueJson::Float32 {
                bits: format!("0x{:08x}", v.to_bits()),
            },
            TypedValue::Float64(v) => ValueJson::Float64 {
                bits: format!("0x{:016x}", v.to_bits()),
            },
            TypedValue::Bool(v) => ValueJson::Bool { v: *v },
            TypedValue::String(v) => ValueJson::String { v: v.clone() },
            TypedValue::Name(n) => ValueJson::Name {
                v: n.to_string_repr(),
            },
            TypedValue::Asset(a) => ValueJson::Asset { v: a.to_string() },
            TypedValue::Symbol(s) => ValueJson::Symbol { v: s.to_string() },
            TypedValue::PublicKey(k) => ValueJson::PublicKey { hex: hex_encode(k) },
            TypedValue::Array(items) => ValueJson::Array {
                items: items.iter().map(ValueJson::from_value).collect(),
            },
            TypedValue::Struct(fields) => ValueJson::Struct {
                fields: fields
                    .iter()
                    .map(|(name, value)| FieldJson {
                        name: name.clone(),
                        value: ValueJson::from_value(value),
                    })
                    .collect(),
            },
        }
    }

    pub fn to_value(&self) -> Result<TypedValue> {
        Ok(match self {
            ValueJson::Int8 { v } => TypedValue::Int8(*v),
            ValueJson::Int16 { v } => TypedValue::Int16(*v),
            ValueJson::Int32 { v } => TypedValue::Int32(*v),
            ValueJson::Int64 { v } => TypedValue::Int64(*v),
            ValueJson::Uint8 { v } => TypedValue::Uint8(*v),
            ValueJson::Uint16 { v } => TypedValue::Uint16(*v),
            ValueJson::Uint32 { v } => TypedValue::Uint32(*v),
            ValueJson::Uint64 { v } => TypedValue::Uint64(*v),
            ValueJson::Float32 { bits } => {
                let raw = u32::from_str_radix(bits.trim_start_matches("0x"), 16)
                    .context("bad f32 bits")?;
                TypedValue::Float32(f32::from_bits(raw))
            }
            ValueJson::Float64 { bits } => {
                let raw = u64::from_str_radix(bits.trim_start_matches("0x"), 16)
                    .context("bad f64 bits")?;
                TypedValue::Float64(f64::from_bits(raw))
            }
            ValueJson::Bool { v } => TypedValue::Bool(*v),
            ValueJson::String { v } => TypedValue::String(v.clone()),
            ValueJson::Name { v } => TypedValue::Name(
                AccountName::new(v).map_err(|e| anyhow::anyhow!("bad name {v:?}: {e}"))?,
            ),
            ValueJson::Asset { v } => {
                TypedValue::Asset(Asset::parse(v).with_context(|| format!("bad asset {v:?}"))?)
            }
            ValueJson::Symbol { v } => {
                let (precision, code) = v
                    .split_once(',')
                    .with_context(|| format!("bad symbol {v:?}"))?;
                TypedValue::Symbol(
                    Symbol::new(precision.parse()?, code)
                        .map_err(|e| anyhow::anyhow!("bad symbol {v:?}: {e}"))?,
                )
            }
            ValueJson::PublicKey { hex } => {
                let bytes = hex_decode(hex)?;
                let arr: [u8; 34] = bytes
                    .try_into()
                    .map_err(|_| anyhow::anyhow!("public key must be 34 bytes"))?;
                TypedValue::PublicKey(arr)
            }
            ValueJson::Array { items } => TypedValue::Array(
                items
                    .iter()
                    .map(ValueJson::to_value)
                    .collect::<Result<_>>()?,
            ),
            ValueJson::Struct { fields } => TypedValue::Struct(
                fields
                    .iter()
                    .map(|f| Ok((f.name.clone(), f.value.to_value()?)))
                    .collect::<Result<_>>()?,
            ),
        })
    }
}

pub fn finding_to_json(finding: &Finding) -> FindingJson {
    FindingJson {
        vuln_type: finding.vuln_type.name().into(),
        evidence: finding
            .evidence
            .iter()
            .map(|e: &Evidence| EvidenceJson {
                transaction: e.transaction,
                seq_start: e.seq_range.0,
                seq_end: e.seq_range.1,
            })
            .collect(),
        replay: finding.replay.iter().map(StepJson::from_step).collect(),
    }
}

pub fn parse_vuln_type(s: &str) -> Result<VulnType> {
    VulnType::parse(s).with_context(|| format!("unknown vulnerability type {s:?}"))
}
