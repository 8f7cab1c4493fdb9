//! Campaign orchestration: static analysis, input generation, execution,
//! and detection for one contract.
//!
//! A campaign spends a configured number of steps on one contract, split into
//! test cases. The chain resets to genesis between test cases; block info
//! advances monotonically across the whole campaign. Every test case starts
//! with a fixed genuine-transfer probe so the fake-transfer oracle always has
//! its CanReceiveEOS scenario on a fresh state.

use crate::abi::AbiInterface;
use crate::chain::{
    Action, ChainConfig, ChainSim, FakeVariant, Genesis, HarnessAccounts, Provenance,
    TransactionResult, TxError, TxStatus,
};
use crate::gen::{gen_test_case, AgentKind, GenConfig, GenContext, GenError, Step};
use crate::interp::LinkError;
use crate::name::AccountName;
use crate::oracle::{
    check_chain_invariants, evaluate_all, CampaignTrace, ExecutedStep, Finding, OracleConfig,
    VulnType,
};
use crate::strings::{default_transfer_signature, StringPool};
use crate::value::{self, Asset};
use crate::wasm::{FuncType, Module};
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

/// The fixed first step of every test case.
pub const PRELUDE_PROBE_AMOUNT: i64 = 1_0000; // 1.0000 EOS

pub fn prelude_probe() -> Step {
    Step::Agent {
        kind: AgentKind::GenuineTransferProbe,
        amount: Asset::eos(PRELUDE_PROBE_AMOUNT),
        memo: String::new(),
    }
}

#[derive(Clone)]
pub struct CampaignSpec {
    pub cut: AccountName,
    pub module: Arc<Module>,
    pub abi: AbiInterface,
    pub gen: GenConfig,
    /// Defaults to [`Genesis::standard`] for the target.
    pub genesis: Option<Genesis>,
    pub harness: HarnessAccounts,
    pub chain: ChainConfig,
    pub oracle: OracleConfig,
    /// Signature used by the memo-candidate analysis.
    pub transfer_sig: FuncType,
}

impl CampaignSpec {
    pub fn new(cut: AccountName, module: Arc<Module>, abi: AbiInterface) -> CampaignSpec {
        CampaignSpec {
            cut,
            module,
            abi,
            gen: GenConfig::default(),
            genesis: None,
            harness: HarnessAccounts::default(),
            chain: ChainConfig::default(),
            oracle: OracleConfig::default(),
            transfer_sig: default_transfer_signature(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum CampaignError {
    Link(LinkError),
    Gen(GenError),
    Config(String),
}

impl fmt::Display for CampaignError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CampaignError::Link(e) => write!(f, "link error: {e}"),
            CampaignError::Gen(e) => write!(f, "generation error: {e}"),
            CampaignError::Config(msg) => write!(f, "bad campaign config: {msg}"),
        }
    }
}

impl core::error::Error for CampaignError {}

impl From<LinkError> for CampaignError {
    fn from(e: LinkError) -> Self {
        CampaignError::Link(e)
    }
}

impl From<GenError> for CampaignError {
    fn from(e: GenError) -> Self {
        CampaignError::Gen(e)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CampaignStats {
    pub test_cases: u32,
    pub transactions: u32,
    pub applied: u32,
    pub aborted: u32,
    pub trapped: u32,
    pub budget_exceeded: u32,
    pub other_errors: u32,
    /// Steps that could not even be dispatched (argument encoding failures).
    pub step_errors: u32,
    pub total_instructions: u64,
    /// Supply-conservation, rollback-atomicity, or reset violations; always
    /// zero unless the simulator itself is broken.
    pub invariant_violations: u32,
}

#[derive(Debug)]
pub struct CampaignOutcome {
    pub findings: Vec<Finding>,
    /// Detectors whose scenario never ran in this campaign.
    pub skipped_oracles: Vec<(VulnType, String)>,
    pub stats: CampaignStats,
    pub trace: CampaignTrace,
    pub pool: StringPool,
}

/// Executes one step against the chain. Used by both the fuzzing loop and
/// finding replay, so replays walk the identical dispatch path.
pub fn execute_step(
    chain: &mut ChainSim,
    cut: AccountName,
    step: &Step,
) -> Result<TransactionResult, String> {
    match step {
        Step::AbiCall { action, args } => {
            let mut payload = Vec::new();
            for arg in args {
                let bytes = value::serialize(arg).map_err(|e| e.to_string())?;
                payload.extend_from_slice(&bytes);
            }
            Ok(chain.push_action(Action {
                account: cut,
                name: *action,
                authorization: vec![cut],
                payload,
                provenance: Provenance::AbiInvocation,
            }))
        }
        Step::Agent { kind, amount, memo } => Ok(match kind {
            AgentKind::FakeInline => {
                chain.run_fake_transfer_attack(FakeVariant::Inline, cut, *amount, memo)
            }
            AgentKind::FakeForwarded => {
                chain.run_fake_transfer_attack(FakeVariant::Forwarded, cut, *amount, memo)
            }
            AgentKind::ForgedNotification => {
                chain.run_forged_notification_attack(cut, *amount, memo)
            }
            AgentKind::GenuineTransferProbe => chain.run_genuine_transfer_probe(cut, *amount, memo),
        }),
    }
}

fn tally(stats: &mut CampaignStats, result: &TransactionResult) {
    stats.transactions += 1;
    stats.total_instructions += result.instr_count;
    match &result.status {
        TxStatus::Applied => stats.applied += 1,
        TxStatus::Aborted(_) => stats.aborted += 1,
        TxStatus::Error(TxError::Trap(_)) => stats.trapped += 1,
        TxStatus::Error(TxError::BudgetExceeded) => stats.budget_exceeded += 1,
        TxStatus::Error(_) => stats.other_errors += 1,
    }
    if check_chain_invariants(result).is_err() {
        stats.invariant_violations += 1;
    }
}

/// Runs the full four-phase workflow for one contract and returns the
/// findings, statistics, and the complete executed trace.
pub fn run_campaign(spec: &CampaignSpec) -> Result<CampaignOutcome, CampaignError> {
    spec.gen.validate()?;
    let harness = spec.harness;
    let reserved = [
        harness.token,
        harness.sender,
        harness.fake_agent,
        harness.notifier,
    ];
    if reserved.contains(&spec.cut) {
        return Err(CampaignError::Config(
            "target account collides with a harness account".to_string(),
        ));
    }

    // Phase 1: static analysis of the bytecode.
    let pool = StringPool::analyze(&spec.module, &spec.transfer_sig);

    let genesis = spec
        .genesis
        .clone()
        .unwrap_or_else(|| Genesis::standard(spec.cut, &harness));
    for required in reserved.iter().chain([&spec.cut]) {
        if !genesis.accounts.iter().any(|(a, _)| a == required) {
            return Err(CampaignError::Config(alloc::format!(
                "genesis does not create account {required}"
            )));
        }
    }
    let genesis_balances: Vec<(AccountName, i64)> = genesis.accounts.clone();

    let mut chain = ChainSim::new(genesis, harness, spec.chain.clone());
    chain.deploy_wasm(spec.cut, Arc::clone(&spec.module))?;
    chain.set_attack_target(spec.cut);

    // Phase 2..3 interleaved: generate a test case, execute it, reset.
    let mut ctx = GenContext::new(&spec.gen, spec.cut, pool.sorted_all(), pool.sorted_memos());
    let mut stats = CampaignStats::default();
    let mut transactions: Vec<ExecutedStep> = Vec::new();
    let mut executed: u32 = 0;
    let mut case_index: u32 = 0;

    while executed < spec.gen.actions_per_campaign {
        let test_case = gen_test_case(&spec.abi, &spec.gen, &mut ctx)?;
        chain.reset()?;
        if chain.balances().iter().any(|(a, b)| {
            genesis_balances
                .iter()
                .find(|(g, _)| g == a)
                .map(|(_, gb)| gb)
                != Some(b)
        }) {
            stats.invariant_violations += 1;
        }
        stats.test_cases += 1;

        for (step_index, step) in core::iter::once(prelude_probe())
            .chain(test_case.steps)
            .enumerate()
        {
            if executed >= spec.gen.actions_per_campaign {
                break;
            }
            match execute_step(&mut chain, spec.cut, &step) {
                Ok(result) => {
                    tally(&mut stats, &result);
                    transactions.push(ExecutedStep {
                        case_index,
                        step_index: step_index as u32,
                        step,
                        result,
                    });
                }
                Err(_) => stats.step_errors += 1,
            }
            chain.advance_block();
            executed += 1;
        }
        case_index += 1;
    }

    // Phase 4: oracle evaluation.
    let trace = CampaignTrace {
        cut: spec.cut,
        token: harness.token,
        sender: harness.sender,
        fake_agent: harness.fake_agent,
        notifier: harness.notifier,
        transactions,
    };
    let (findings, skipped_oracles) = evaluate_all(&trace, &spec.oracle);

    Ok(CampaignOutcome {
        findings,
        skipped_oracles,
        stats,
        trace,
        pool,
    })
}
