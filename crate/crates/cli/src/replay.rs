//! Re-executes a reported finding's steps from genesis and confirms the
//! oracle predicate still holds.

use crate::genesis::load_genesis;
use crate::report::{FindingJson, Report};
use crate::runner::sha256_hex;
use anyhow::{bail, Context, Result};
use eosfuzz_core::abi::parse_abi;
use eosfuzz_core::campaign::execute_step;
use eosfuzz_core::chain::{ChainConfig, ChainSim, Genesis, HarnessAccounts, TransactionResult};
use eosfuzz_core::gen::{AgentKind, Step};
use eosfuzz_core::name::AccountName;
use eosfuzz_core::oracle::{
    detect_asset_loss, detect_block_info_dependency, detect_forged_notification, CampaignTrace,
    ExecutedStep, OracleConfig, VulnType,
};
use eosfuzz_core::trace::TraceKind;
use eosfuzz_core::wasm::parse_wasm;
use std::path::{Path, PathBuf};
use std::sync::Arc;

pub struct ReplayOutcome {
    pub contract: String,
    pub vuln_type: VulnType,
    pub results: Vec<TransactionResult>,
    /// The evidence predicate re-evaluated over the replayed trace.
    pub predicate_holds: bool,
    pub cut_delta: i64,
    pub sender_delta: i64,
}

/// Resolves a path stored in the report: as given, then relative to the
/// report file's directory.
fn resolve(stored: &str, report_dir: Option<&Path>) -> PathBuf {
    let direct = PathBuf::from(stored);
    if direct.exists() {
        return direct;
    }
    if let Some(dir) = report_dir {
        let joined = dir.join(stored);
        if joined.exists() {
            return joined;
        }
    }
    direct
}

fn locate_finding(report: &Report, index: usize) -> Result<(usize, &FindingJson)> {
    let mut flat = 0usize;
    for (ci, contract) in report.contracts.iter().enumerate() {
        for finding in &contract.findings {
            if flat == index {
                return Ok((ci, finding));
            }
            flat += 1;
        }
    }
    bail!(
        "finding index {index} out of range; the report has {} findings",
        report.total_findings()
    );
}

/// Replays finding `index` (counting across contracts in report order).
pub fn replay_finding(
    report: &Report,
    index: usize,
    report_dir: Option<&Path>,
) -> Result<ReplayOutcome> {
    let (contract_idx, finding) = locate_finding(report, index)?;
    let contract = &report.contracts[contract_idx];
    let vuln_type = crate::report::parse_vuln_type(&finding.vuln_type)?;

    let wasm_path = resolve(&contract.wasm, report_dir);
    let abi_path = resolve(&contract.abi, report_dir);
    let wasm_bytes = std::fs::read(&wasm_path)
        .with_context(|| format!("reading wasm {}", wasm_path.display()))?;
    if sha256_hex(&wasm_bytes) != contract.wasm_sha256 {
        bail!(
            "replay refused: {} no longer matches the fuzzed binary (sha256 differs)",
            wasm_path.display()
        );
    }
    let module = Arc::new(
        parse_wasm(&wasm_bytes)
            .map_err(|e| anyhow::anyhow!("parsing {}: {e}", wasm_path.display()))?,
    );
    let abi_text = std::fs::read_to_string(&abi_path)
        .with_context(|| format!("reading abi {}", abi_path.display()))?;
    if sha256_hex(abi_text.as_bytes()) != contract.abi_sha256 {
        bail!(
            "replay refused: {} no longer matches the fuzzed ABI (sha256 differs)",
            abi_path.display()
        );
    }
    let abi = parse_abi(&abi_text).map_err(|e| anyhow::anyhow!("{e}"))?;
    let cut = AccountName::new(&contract.account)
        .map_err(|e| anyhow::anyhow!("bad account in report: {e}"))?;

    let harness = HarnessAccounts::default();
    let genesis = match &report.config.genesis {
        Some(path) => load_genesis(&resolve(path, report_dir))?,
        None => Genesis::standard(cut, &harness),
    };
    let chain_config = ChainConfig {
        budget: report.config.budget,
        verbose_trace: report.config.verbose_trace,
        ..ChainConfig::default()
    };
    let mut chain = ChainSim::new(genesis, harness, chain_config);
    chain
        .deploy_wasm(cut, module)
        .map_err(|e| anyhow::anyhow!("instantiating contract: {e}"))?;
    chain.set_attack_target(cut);
    chain.reset().map_err(|e| anyhow::anyhow!("{e}"))?;

    let steps: Vec<Step> = finding
        .replay
        .iter()
        .map(|s| s.to_step())
        .collect::<Result<_>>()?;
    if steps.is_empty() {
        bail!("finding carries no replay steps");
    }
    // ABI sanity: replayed calls must still exist in the interface.
    for step in &steps {
        if let Step::AbiCall { action, .. } = step {
            if abi.action(*action).is_none() {
                bail!("replay action {action} is not in the ABI");
            }
        }
    }

    let cut_before = chain.balance(cut);
    let sender_before = chain.balance(harness.sender);
    let mut executed = Vec::new();
    let mut results = Vec::new();
    for (i, step) in steps.iter().enumerate() {
        let result = execute_step(&mut chain, cut, step).map_err(|e| anyhow::anyhow!(e))?;
        chain.advance_block();
        executed.push(ExecutedStep {
            case_index: 0,
            step_index: i as u32,
            step: step.clone(),
            result: result.clone(),
        });
        results.push(result);
    }
    let cut_delta = chain.balance(cut) - cut_before;
    let sender_delta = chain.balance(harness.sender) - sender_before;

    let trace = CampaignTrace {
        cut,
        token: harness.token,
        sender: harness.sender,
        fake_agent: harness.fake_agent,
        notifier: harness.notifier,
        transactions: executed,
    };
    let predicate_holds = predicate_holds(vuln_type, &trace, report.config.strict_blockinfo);

    Ok(ReplayOutcome {
        contract: contract.name.clone(),
        vuln_type,
        results,
        predicate_holds,
        cut_delta,
        sender_delta,
    })
}

/// The finding-defining predicate, without the campaign-completeness
/// preconditions (a replay prefix contains the triggering scenario but not
/// necessarily every scenario the full campaign mounted).
fn predicate_holds(vuln_type: VulnType, trace: &CampaignTrace, strict_blockinfo: bool) -> bool {
    match vuln_type {
        VulnType::FakeEosTransfer => {
            let cut_ci = |txn: &ExecutedStep| {
                txn.result.trace.iter().any(|e| {
                    e.receiver == trace.cut && matches!(e.kind, TraceKind::CallIndirect { .. })
                })
            };
            let can_receive = trace
                .transactions
                .iter()
                .any(|t| t.agent_kind() == Some(AgentKind::GenuineTransferProbe) && cut_ci(t));
            let transfer_called = trace.transactions.iter().any(|t| {
                matches!(
                    t.agent_kind(),
                    Some(AgentKind::FakeInline | AgentKind::FakeForwarded)
                ) && t.result.status.is_applied()
                    && cut_ci(t)
            });
            can_receive && transfer_called
        }
        VulnType::ForgedTransferNotification => {
            matches!(detect_forged_notification(trace), Ok(Some(_)))
        }
        VulnType::BlockInfoDependency => {
            detect_block_info_dependency(trace, &OracleConfig { strict_blockinfo }).is_some()
        }
        VulnType::AssetLoss => detect_asset_loss(trace).is_some(),
    }
}
