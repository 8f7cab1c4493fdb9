//! Trace-based vulnerability detectors.
//!
//! Each detector is a pure predicate over a finished campaign's executed
//! transactions. The call-counting heuristics are context-attributed: where a
//! deployment of all-WASM system contracts would count global `CallIndirect`
//! executions, this engine counts `CallIndirect` events recorded within the
//! target contract's own dispatch context, which identifies the same handler
//! invocation without the agent/token noise.

use crate::chain::{TransactionResult, TxStatus};
use crate::gen::{AgentKind, Step};
use crate::name::AccountName;
use crate::trace::{TraceEvent, TraceKind};
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VulnType {
    FakeEosTransfer,
    ForgedTransferNotification,
    BlockInfoDependency,
    AssetLoss,
}

impl VulnType {
    pub fn name(self) -> &'static str {
        match self {
            VulnType::FakeEosTransfer => "fake_eos_transfer",
            VulnType::ForgedTransferNotification => "forged_transfer_notification",
            VulnType::BlockInfoDependency => "block_info_dependency",
            VulnType::AssetLoss => "asset_loss",
        }
    }

    pub fn parse(s: &str) -> Option<VulnType> {
        Some(match s {
            "fake_eos_transfer" => VulnType::FakeEosTransfer,
            "forged_transfer_notification" => VulnType::ForgedTransferNotification,
            "block_info_dependency" => VulnType::BlockInfoDependency,
            "asset_loss" => VulnType::AssetLoss,
            _ => return None,
        })
    }

    pub fn all() -> [VulnType; 4] {
        [
            VulnType::FakeEosTransfer,
            VulnType::ForgedTransferNotification,
            VulnType::BlockInfoDependency,
            VulnType::AssetLoss,
        ]
    }
}

impl fmt::Display for VulnType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A reference into the campaign trace: a transaction index and an inclusive
/// event sequence range within it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Evidence {
    pub transaction: usize,
    pub seq_range: (u64, u64),
}

/// A detected vulnerability with replayable provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct Finding {
    pub vuln_type: VulnType,
    pub evidence: Vec<Evidence>,
    /// The triggering test case's steps from its genesis reset up to and
    /// including the last evidence transaction.
    pub replay: Vec<Step>,
}

/// One executed transaction with its provenance inside the campaign.
#[derive(Debug, Clone, PartialEq)]
pub struct ExecutedStep {
    pub case_index: u32,
    /// Position within the test case; 0 is the probe prelude.
    pub step_index: u32,
    pub step: Step,
    pub result: TransactionResult,
}

impl ExecutedStep {
    pub fn agent_kind(&self) -> Option<AgentKind> {
        match &self.step {
            Step::Agent { kind, .. } => Some(*kind),
            Step::AbiCall { .. } => None,
        }
    }

    fn is_attack(&self) -> bool {
        self.agent_kind().is_some_and(|k| k.is_attack())
    }
}

/// Everything a campaign recorded, as the detectors consume it.
#[derive(Debug, Clone)]
pub struct CampaignTrace {
    pub cut: AccountName,
    pub token: AccountName,
    pub sender: AccountName,
    pub fake_agent: AccountName,
    pub notifier: AccountName,
    pub transactions: Vec<ExecutedStep>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OracleError {
    /// The campaign never mounted the scenario this oracle needs.
    MissingScenario(&'static str),
}

impl fmt::Display for OracleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OracleError::MissingScenario(what) => write!(f, "missing scenario: {what}"),
        }
    }
}

impl core::error::Error for OracleError {}

#[derive(Debug, Clone, Default)]
pub struct OracleConfig {
    /// Require the block-info read and the token transfer to fall inside the
    /// same transaction instead of anywhere in the campaign.
    pub strict_blockinfo: bool,
}

impl CampaignTrace {
    /// The replay prefix: all steps of the given transaction's test case, in
    /// order, up to and including the transaction itself.
    pub fn replay_prefix(&self, txn_index: usize) -> Vec<Step> {
        let target = &self.transactions[txn_index];
        self.transactions
            .iter()
            .filter(|t| t.case_index == target.case_index && t.step_index <= target.step_index)
            .map(|t| t.step.clone())
            .collect()
    }

    fn first_cut_call_indirect(&self, txn: &ExecutedStep) -> Option<u64> {
        txn.result.trace.iter().find_map(|e| match e.kind {
            TraceKind::CallIndirect { .. } if e.receiver == self.cut => Some(e.seq),
            _ => None,
        })
    }
}

/// Fake EOS Transfer: the target accepts genuine EOS (its handler runs under
/// a probe) and its handler is also reachable by the fake-transfer agent
/// without the token contract being involved.
pub fn detect_fake_eos_transfer(trace: &CampaignTrace) -> Result<Option<Finding>, OracleError> {
    let mut saw_probe = false;
    let mut saw_inline = false;
    let mut saw_forwarded = false;
    for txn in &trace.transactions {
        match txn.agent_kind() {
            Some(AgentKind::GenuineTransferProbe) => saw_probe = true,
            Some(AgentKind::FakeInline) => saw_inline = true,
            Some(AgentKind::FakeForwarded) => saw_forwarded = true,
            _ => {}
        }
    }
    if !saw_probe {
        return Err(OracleError::MissingScenario(
            "no genuine transfer probe ran",
        ));
    }
    if !saw_inline || !saw_forwarded {
        return Err(OracleError::MissingScenario(
            "both fake-transfer variants must be attempted",
        ));
    }

    // CanReceiveEOS: a probe reached the target's handler dispatch.
    let can_receive = trace.transactions.iter().enumerate().find_map(|(i, txn)| {
        if txn.agent_kind() == Some(AgentKind::GenuineTransferProbe) {
            trace.first_cut_call_indirect(txn).map(|seq| (i, seq))
        } else {
            None
        }
    });
    // TransferCalled: a fake attack of either variant was applied and reached
    // the target's handler dispatch.
    let transfer_called = trace.transactions.iter().enumerate().find_map(|(i, txn)| {
        let is_fake = matches!(
            txn.agent_kind(),
            Some(AgentKind::FakeInline | AgentKind::FakeForwarded)
        );
        if is_fake && txn.result.status.is_applied() {
            trace.first_cut_call_indirect(txn).map(|seq| (i, seq))
        } else {
            None
        }
    });

    Ok(match (can_receive, transfer_called) {
        (Some((probe_txn, probe_seq)), Some((attack_txn, attack_seq))) => Some(Finding {
            vuln_type: VulnType::FakeEosTransfer,
            evidence: alloc::vec![
                Evidence {
                    transaction: probe_txn,
                    seq_range: (probe_seq, probe_seq),
                },
                Evidence {
                    transaction: attack_txn,
                    seq_range: (attack_seq, attack_seq),
                },
            ],
            replay: trace.replay_prefix(attack_txn),
        }),
        _ => None,
    })
}

/// Forged Transfer Notification: a forwarded notification reaches the
/// target's transfer handler (code still the token contract) and no attack
/// ever observes the handler comparing the actual recipient (the notifier)
/// against the target's own name.
pub fn detect_forged_notification(trace: &CampaignTrace) -> Result<Option<Finding>, OracleError> {
    let mut ran_any = false;
    let mut first_entry: Option<(usize, u64)> = None;
    let mut recipient_checked = false;

    for (i, txn) in trace.transactions.iter().enumerate() {
        if txn.agent_kind() != Some(AgentKind::ForgedNotification) {
            continue;
        }
        ran_any = true;
        // Handler entry: the dispatch into the target while code is still
        // the token contract.
        let handler_start = txn.result.trace.iter().find_map(|e| match e.kind {
            TraceKind::CallIndirect { .. } if e.receiver == trace.cut && e.code == trace.token => {
                Some(e.seq)
            }
            _ => None,
        });
        let Some(start) = handler_start else {
            continue;
        };
        if first_entry.is_none() {
            first_entry = Some((i, start));
        }
        // The recipient check: a 64-bit eq/ne whose operand set is exactly
        // {notifier, target}, after the handler entry, in the target's
        // context. 32-bit comparisons cannot compare account names.
        let checked = txn.result.trace.iter().any(|e| {
            e.receiver == trace.cut
                && e.seq > start
                && matches!(
                    e.kind,
                    TraceKind::Compare { op, lhs, rhs }
                        if op.is_wide() && pair_matches(lhs, rhs, trace.notifier.0, trace.cut.0)
                )
        });
        if checked {
            recipient_checked = true;
        }
    }

    if !ran_any {
        return Err(OracleError::MissingScenario(
            "no forged-notification attack ran",
        ));
    }
    Ok(match first_entry {
        Some((txn, seq)) if !recipient_checked => Some(Finding {
            vuln_type: VulnType::ForgedTransferNotification,
            evidence: alloc::vec![Evidence {
                transaction: txn,
                seq_range: (seq, seq),
            }],
            replay: trace.replay_prefix(txn),
        }),
        _ => None,
    })
}

fn pair_matches(lhs: u64, rhs: u64, a: u64, b: u64) -> bool {
    (lhs == a && rhs == b) || (lhs == b && rhs == a)
}

/// Block Information Dependency: some execution read tapos block info and
/// the campaign moved EOS through the token contract. The default scope is
/// the whole campaign; strict mode requires both in one transaction.
pub fn detect_block_info_dependency(
    trace: &CampaignTrace,
    config: &OracleConfig,
) -> Option<Finding> {
    let find_in = |txn: &ExecutedStep, pred: &dyn Fn(&TraceEvent) -> bool| {
        txn.result.trace.iter().find(|e| pred(e)).map(|e| e.seq)
    };
    let is_read = |e: &TraceEvent| matches!(e.kind, TraceKind::BlockInfoRead { .. });
    let is_transfer = |e: &TraceEvent| matches!(e.kind, TraceKind::TokenTransfer { .. });

    if config.strict_blockinfo {
        for (i, txn) in trace.transactions.iter().enumerate() {
            if let (Some(read_seq), Some(xfer_seq)) =
                (find_in(txn, &is_read), find_in(txn, &is_transfer))
            {
                return Some(Finding {
                    vuln_type: VulnType::BlockInfoDependency,
                    evidence: alloc::vec![
                        Evidence {
                            transaction: i,
                            seq_range: (read_seq, read_seq),
                        },
                        Evidence {
                            transaction: i,
                            seq_range: (xfer_seq, xfer_seq),
                        },
                    ],
                    replay: trace.replay_prefix(i),
                });
            }
        }
        return None;
    }

    let mut read: Option<(usize, u64)> = None;
    let mut transfer: Option<(usize, u64)> = None;
    for (i, txn) in trace.transactions.iter().enumerate() {
        if read.is_none() {
            if let Some(seq) = find_in(txn, &is_read) {
                read = Some((i, seq));
            }
        }
        if transfer.is_none() {
            if let Some(seq) = find_in(txn, &is_transfer) {
                transfer = Some((i, seq));
            }
        }
        if read.is_some() && transfer.is_some() {
            break;
        }
    }
    match (read, transfer) {
        (Some((read_txn, read_seq)), Some((xfer_txn, xfer_seq))) => Some(Finding {
            vuln_type: VulnType::BlockInfoDependency,
            evidence: alloc::vec![
                Evidence {
                    transaction: read_txn,
                    seq_range: (read_seq, read_seq),
                },
                Evidence {
                    transaction: xfer_txn,
                    seq_range: (xfer_seq, xfer_seq),
                },
            ],
            replay: trace.replay_prefix(read_txn),
        }),
        _ => None,
    }
}

/// Asset loss: after some attack-connected transaction the target's balance
/// strictly decreased while a harness-controlled account gained. Genuine
/// probe refunds do not count, and the loss must follow an attack step
/// within the same test case.
pub fn detect_asset_loss(trace: &CampaignTrace) -> Option<Finding> {
    for (i, txn) in trace.transactions.iter().enumerate() {
        if txn.agent_kind() == Some(AgentKind::GenuineTransferProbe) {
            continue;
        }
        let cut_delta = txn
            .result
            .balance_deltas
            .get(&trace.cut)
            .copied()
            .unwrap_or(0);
        if cut_delta >= 0 {
            continue;
        }
        let harness_gain = [trace.sender, trace.fake_agent, trace.notifier]
            .iter()
            .any(|a| txn.result.balance_deltas.get(a).copied().unwrap_or(0) > 0);
        if !harness_gain {
            continue;
        }
        // Provenance: an attack step at or before this one in the same case.
        let attacked = trace.transactions[..=i].iter().any(|t| {
            t.case_index == txn.case_index && t.step_index <= txn.step_index && t.is_attack()
        });
        if !attacked {
            continue;
        }
        let last_seq = txn.result.trace.last().map(|e| e.seq).unwrap_or(0);
        return Some(Finding {
            vuln_type: VulnType::AssetLoss,
            evidence: alloc::vec![Evidence {
                transaction: i,
                seq_range: (0, last_seq),
            }],
            replay: trace.replay_prefix(i),
        });
    }
    None
}

/// Runs every detector. Detectors whose scenario never ran are reported as
/// skipped rather than failing the campaign.
pub fn evaluate_all(
    trace: &CampaignTrace,
    config: &OracleConfig,
) -> (Vec<Finding>, Vec<(VulnType, String)>) {
    use alloc::string::ToString;
    let mut findings = Vec::new();
    let mut skipped = Vec::new();

    match detect_fake_eos_transfer(trace) {
        Ok(Some(f)) => findings.push(f),
        Ok(None) => {}
        Err(e) => skipped.push((VulnType::FakeEosTransfer, e.to_string())),
    }
    match detect_forged_notification(trace) {
        Ok(Some(f)) => findings.push(f),
        Ok(None) => {}
        Err(e) => skipped.push((VulnType::ForgedTransferNotification, e.to_string())),
    }
    if let Some(f) = detect_block_info_dependency(trace, config) {
        findings.push(f);
    }
    if let Some(f) = detect_asset_loss(trace) {
        findings.push(f);
    }
    findings.sort_by_key(|f| f.vuln_type);
    (findings, skipped)
}

/// Machine-checks that a finding's evidence dereferences to events satisfying
/// its oracle's defining predicate.
pub fn verify_evidence(trace: &CampaignTrace, finding: &Finding) -> bool {
    let events_in = |ev: &Evidence| -> Vec<&TraceEvent> {
        match trace.transactions.get(ev.transaction) {
            Some(txn) => txn
                .result
                .trace
                .iter()
                .filter(|e| e.seq >= ev.seq_range.0 && e.seq <= ev.seq_range.1)
                .collect(),
            None => Vec::new(),
        }
    };
    let all_deref = finding.evidence.iter().all(|ev| !events_in(ev).is_empty());
    if !all_deref {
        return false;
    }
    match finding.vuln_type {
        VulnType::FakeEosTransfer => {
            finding.evidence.len() == 2
                && finding.evidence.iter().all(|ev| {
                    events_in(ev).iter().any(|e| {
                        e.receiver == trace.cut && matches!(e.kind, TraceKind::CallIndirect { .. })
                    })
                })
        }
        VulnType::ForgedTransferNotification => finding.evidence.iter().all(|ev| {
            events_in(ev).iter().any(|e| {
                e.receiver == trace.cut
                    && e.code == trace.token
                    && matches!(e.kind, TraceKind::CallIndirect { .. })
            })
        }),
        VulnType::BlockInfoDependency => {
            let kinds: Vec<&TraceEvent> = finding.evidence.iter().flat_map(&events_in).collect();
            kinds
                .iter()
                .any(|e| matches!(e.kind, TraceKind::BlockInfoRead { .. }))
                && kinds
                    .iter()
                    .any(|e| matches!(e.kind, TraceKind::TokenTransfer { .. }))
        }
        VulnType::AssetLoss => finding.evidence.iter().all(|ev| {
            trace.transactions.get(ev.transaction).is_some_and(|txn| {
                txn.result
                    .balance_deltas
                    .get(&trace.cut)
                    .copied()
                    .unwrap_or(0)
                    < 0
            })
        }),
    }
}

/// In-harness chain invariants, asserted per transaction by the campaign.
pub fn check_chain_invariants(result: &TransactionResult) -> Result<(), &'static str> {
    match &result.status {
        TxStatus::Applied => {
            if result.delta_sum() != 0 {
                return Err("supply not conserved in an applied transaction");
            }
        }
        _ => {
            if !result.balance_deltas.is_empty() {
                return Err("aborted transaction left balance changes behind");
            }
        }
    }
    Ok(())
}
