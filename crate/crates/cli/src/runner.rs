//! Contract loading and single-campaign execution glue.

use crate::report::{
    finding_to_json, hex_encode, ConfigEcho, ContractReport, SkippedOracleJson, StatsJson,
};
use anyhow::{Context, Result};
use eosfuzz_core::abi::{parse_abi, AbiInterface};
use eosfuzz_core::campaign::{run_campaign, CampaignError, CampaignOutcome, CampaignSpec};
use eosfuzz_core::chain::{ChainConfig, Genesis};
use eosfuzz_core::gen::GenConfig;
use eosfuzz_core::name::AccountName;
use eosfuzz_core::oracle::OracleConfig;
use eosfuzz_core::wasm::{parse_wasm, Module};
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};
use std::sync::Arc;

/// Derives a valid account name from a file stem: lowercase, characters
/// outside the name alphabet become dots, truncated to 12, trailing dots
/// trimmed.
pub fn sanitize_account(stem: &str) -> String {
    let mapped: String = stem
        .chars()
        .map(|c| {
            let c = c.to_ascii_lowercase();
            if c.is_ascii_lowercase() || ('1'..='5').contains(&c) || c == '.' {
                c
            } else {
                '.'
            }
        })
        .take(12)
        .collect();
    let trimmed = mapped.trim_end_matches('.');
    if trimmed.is_empty() {
        "contract".into()
    } else {
        trimmed.into()
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex_encode(&Sha256::digest(bytes))
}

#[derive(Clone)]
pub struct LoadedContract {
    pub name: String,
    pub account: AccountName,
    pub wasm_path: PathBuf,
    pub abi_path: PathBuf,
    pub wasm_sha256: String,
    pub abi_sha256: String,
    pub module: Arc<Module>,
    pub abi: AbiInterface,
}

pub fn load_contract(
    wasm_path: &Path,
    abi_path: &Path,
    account: Option<&str>,
) -> Result<LoadedContract> {
    let wasm_bytes = std::fs::read(wasm_path)
        .with_context(|| format!("reading wasm {}", wasm_path.display()))?;
    let abi_text = std::fs::read_to_string(abi_path)
        .with_context(|| format!("reading abi {}", abi_path.display()))?;
    let module = parse_wasm(&wasm_bytes)
        .map_err(|e| anyhow::anyhow!("parsing {}: {e}", wasm_path.display()))?;
    let abi =
        parse_abi(&abi_text).map_err(|e| anyhow::anyhow!("parsing {}: {e}", abi_path.display()))?;
    let name = wasm_path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("contract")
        .to_string();
    let account_str = match account {
        Some(a) => a.to_string(),
        None => sanitize_account(&name),
    };
    let account = AccountName::new(&account_str)
        .map_err(|e| anyhow::anyhow!("invalid account name {account_str:?}: {e}"))?;
    Ok(LoadedContract {
        name,
        account,
        wasm_path: wasm_path.to_path_buf(),
        abi_path: abi_path.to_path_buf(),
        wasm_sha256: sha256_hex(&wasm_bytes),
        abi_sha256: sha256_hex(abi_text.as_bytes()),
        module: Arc::new(module),
        abi,
    })
}

/// CLI-level knobs, mapped onto the core campaign configuration.
#[derive(Clone)]
pub struct RunConfig {
    pub gen: GenConfig,
    pub budget: u64,
    pub strict_blockinfo: bool,
    pub verbose_trace: bool,
    /// (path echoed into the report, parsed genesis)
    pub genesis: Option<(String, Genesis)>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            gen: GenConfig::default(),
            budget: ChainConfig::default().budget,
            strict_blockinfo: false,
            verbose_trace: false,
            genesis: None,
        }
    }
}

impl RunConfig {
    pub fn to_spec(&self, contract: &LoadedContract) -> CampaignSpec {
        let mut spec = CampaignSpec::new(
            contract.account,
            Arc::clone(&contract.module),
            contract.abi.clone(),
        );
        spec.gen = self.gen.clone();
        spec.chain.budget = self.budget;
        spec.chain.verbose_trace = self.verbose_trace;
        spec.oracle = OracleConfig {
            strict_blockinfo: self.strict_blockinfo,
        };
        spec.genesis = self.genesis.as_ref().map(|(_, g)| g.clone());
        spec
    }

    pub fn echo(&self) -> ConfigEcho {
        let chain = ChainConfig::default();
        ConfigEcho {
            seed: self.gen.seed,
            actions: self.gen.actions_per_campaign,
            mix: [
                self.gen.attack_mix.abi_call,
                self.gen.attack_mix.fake_transfer,
                self.gen.attack_mix.forged_notification,
                self.gen.attack_mix.genuine_probe,
            ],
            max_case_len: self.gen.max_case_len,
            max_array_len: self.gen.max_array_len,
            max_string_len: self.gen.max_string_len,
            abi_asset_cap: self.gen.abi_asset_cap,
            attack_asset_cap: self.gen.attack_asset_cap,
            budget: self.budget,
            max_action_depth: chain.max_action_depth,
            strict_blockinfo: self.strict_blockinfo,
            verbose_trace: self.verbose_trace,
            genesis: self.genesis.as_ref().map(|(p, _)| p.clone()),
        }
    }
}

pub fn run_contract(
    contract: &LoadedContract,
    config: &RunConfig,
) -> Result<CampaignOutcome, CampaignError> {
    run_campaign(&config.to_spec(contract))
}

/// Builds the per-contract report section from a campaign result.
pub fn contract_report(
    contract: &LoadedContract,
    outcome: &Result<CampaignOutcome, CampaignError>,
) -> ContractReport {
    let mut report = ContractReport {
        name: contract.name.clone(),
        account: contract.account.to_string_repr(),
        wasm: contract.wasm_path.display().to_string(),
        abi: contract.abi_path.display().to_string(),
        wasm_sha256: contract.wasm_sha256.clone(),
        abi_sha256: contract.abi_sha256.clone(),
        error: None,
        findings: Vec::new(),
        skipped_oracles: Vec::new(),
        stats: StatsJson::default(),
        string_pool_size: 0,
        memo_candidates: Vec::new(),
        expected: None,
    };
    match outcome {
        Ok(out) => {
            report.findings = out.findings.iter().map(finding_to_json).collect();
            report.skipped_oracles = out
                .skipped_oracles
                .iter()
                .map(|(v, reason)| SkippedOracleJson {
                    oracle: v.name().into(),
                    reason: reason.clone(),
                })
                .collect();
            report.stats = StatsJson {
                test_cases: out.stats.test_cases,
                transactions: out.stats.transactions,
                applied: out.stats.applied,
                aborted: out.stats.aborted,
                trapped: out.stats.trapped,
                budget_exceeded: out.stats.budget_exceeded,
                other_errors: out.stats.other_errors,
                step_errors: out.stats.step_errors,
                total_instructions: out.stats.total_instructions,
                invariant_violations: out.stats.invariant_violations,
            };
            report.string_pool_size = out.pool.all_strings.len() as u32;
            report.memo_candidates = out.pool.sorted_memos();
        }
        Err(e) => report.error = Some(e.to_string()),
    }
    report
}
