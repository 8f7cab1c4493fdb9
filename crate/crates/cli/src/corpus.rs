//! Corpus mode: run one campaign per (wasm, abi) pair in a directory,
//! optionally in parallel, and aggregate the results with an accuracy
//! summary against the expectations file when one is present.

use crate::report::{
    ContractReport, ExpectedJson, MismatchJson, Report, Summary, SummaryRow, Timing, ToolInfo,
    SCHEMA_VERSION,
};
use crate::runner::{contract_report, load_contract, run_contract, RunConfig};
use anyhow::{Context, Result};
use eosfuzz_core::oracle::VulnType;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

/// Ground truth and expected detector output for one shipped fixture.
#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct FixtureExpectation {
    pub name: String,
    pub wasm: String,
    pub abi: String,
    #[serde(default)]
    pub account: Option<String>,
    #[serde(default)]
    pub behavioral: bool,
    #[serde(default)]
    pub expected_findings: Vec<String>,
    #[serde(default)]
    pub ground_truth: Vec<String>,
    #[serde(default)]
    pub limitation: Option<String>,
    #[serde(default)]
    pub memo_strings: Vec<String>,
}

#[derive(Serialize, Deserialize, Clone, Debug, Default)]
pub struct Expectations {
    pub fixtures: Vec<FixtureExpectation>,
}

impl Expectations {
    pub fn for_wasm(&self, wasm_file_name: &str) -> Option<&FixtureExpectation> {
        self.fixtures.iter().find(|f| f.wasm == wasm_file_name)
    }
}

pub fn load_expectations(dir: &Path) -> Result<Option<Expectations>> {
    let path = dir.join("expectations.json");
    if !path.exists() {
        return Ok(None);
    }
    let text =
        std::fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
    Ok(Some(
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?,
    ))
}

/// Pairs of (wasm, abi) discovered in a directory, sorted by file name.
pub fn scan_corpus(dir: &Path) -> Result<Vec<(PathBuf, PathBuf)>> {
    let mut pairs = Vec::new();
    for entry in std::fs::read_dir(dir).with_context(|| format!("reading {}", dir.display()))? {
        let path = entry?.path();
        if path.extension().and_then(|e| e.to_str()) != Some("wasm") {
            continue;
        }
        let stem = match path.file_stem().and_then(|s| s.to_str()) {
            Some(s) => s.to_string(),
            None => continue,
        };
        let abi = dir.join(format!("{stem}.abi.json"));
        if abi.exists() {
            pairs.push((path, abi));
        }
    }
    pairs.sort();
    Ok(pairs)
}

fn run_pair(
    wasm: &Path,
    abi: &Path,
    config: &RunConfig,
    expectations: Option<&Expectations>,
) -> ContractReport {
    let wasm_file = wasm
        .file_name()
        .and_then(|s| s.to_str())
        .unwrap_or_default()
        .to_string();
    let expectation = expectations.and_then(|e| e.for_wasm(&wasm_file));
    let account = expectation.and_then(|e| e.account.as_deref());

    let mut report = match load_contract(wasm, abi, account) {
        Ok(contract) => {
            let outcome = run_contract(&contract, config);
            contract_report(&contract, &outcome)
        }
        Err(e) => ContractReport {
            name: wasm
                .file_stem()
                .and_then(|s| s.to_str())
                .unwrap_or("contract")
                .into(),
            account: String::new(),
            wasm: wasm.display().to_string(),
            abi: abi.display().to_string(),
            wasm_sha256: String::new(),
            abi_sha256: String::new(),
            error: Some(e.to_string()),
            findings: Vec::new(),
            skipped_oracles: Vec::new(),
            stats: Default::default(),
            string_pool_size: 0,
            memo_candidates: Vec::new(),
            expected: None,
        },
    };

    if let Some(exp) = expectation {
        let mut actual: Vec<String> = report
            .findings
            .iter()
            .map(|f| f.vuln_type.clone())
            .collect();
        actual.sort();
        let mut expected = exp.expected_findings.clone();
        expected.sort();
        report.expected = Some(ExpectedJson {
            expected_findings: expected.clone(),
            ground_truth: exp.ground_truth.clone(),
            limitation: exp.limitation.clone(),
            matches: actual == expected,
        });
    }
    report
}

fn build_summary(contracts: &[ContractReport]) -> Summary {
    let mut findings_by_type: BTreeMap<String, u32> = BTreeMap::new();
    let mut contracts_with_findings = 0;
    let mut campaigns_failed = 0;
    let mut mismatches = Vec::new();

    for c in contracts {
        if c.error.is_some() {
            campaigns_failed += 1;
        }
        if !c.findings.is_empty() {
            contracts_with_findings += 1;
        }
        for f in &c.findings {
            *findings_by_type.entry(f.vuln_type.clone()).or_default() += 1;
        }
        if let Some(exp) = &c.expected {
            if !exp.matches {
                let mut actual: Vec<String> =
                    c.findings.iter().map(|f| f.vuln_type.clone()).collect();
                actual.sort();
                mismatches.push(MismatchJson {
                    contract: c.name.clone(),
                    expected: exp.expected_findings.clone(),
                    actual,
                });
            }
        }
    }

    let any_ground_truth = contracts.iter().any(|c| c.expected.is_some());
    let table = VulnType::all()
        .iter()
        .map(|vt| {
            let name = vt.name().to_string();
            let reported = contracts
                .iter()
                .filter(|c| c.findings.iter().any(|f| f.vuln_type == name))
                .count() as u32;
            let (fp, fn_) = if any_ground_truth {
                let mut fp = 0;
                let mut fn_ = 0;
                for c in contracts {
                    let Some(exp) = &c.expected else { continue };
                    let flagged = c.findings.iter().any(|f| f.vuln_type == name);
                    let truly = exp.ground_truth.iter().any(|g| g == &name);
                    if flagged && !truly {
                        fp += 1;
                    }
                    if !flagged && truly {
                        fn_ += 1;
                    }
                }
                (Some(fp), Some(fn_))
            } else {
                (None, None)
            };
            SummaryRow {
                vuln_type: name,
                total: contracts.len() as u32,
                reported,
                false_positives: fp,
                false_negatives: fn_,
            }
        })
        .collect();

    Summary {
        contracts: contracts.len() as u32,
        campaigns_failed,
        contracts_with_findings,
        findings_by_type,
        table,
        mismatches,
    }
}

/// Runs every contract in the directory on up to `jobs` worker threads and
/// aggregates one deterministic report. Campaign results depend only on the
/// config, so the parallelism level cannot change the report.
pub fn run_corpus(dir: &Path, config: &RunConfig, jobs: usize) -> Result<Report> {
    let started = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_millis() as u64)
        .unwrap_or(0);
    let t0 = Instant::now();

    let pairs = scan_corpus(dir)?;
    let expectations = load_expectations(dir)?;
    let jobs = jobs.max(1).min(pairs.len().max(1));

    let slots: Vec<Mutex<Option<ContractReport>>> =
        pairs.iter().map(|_| Mutex::new(None)).collect();
    let cursor = AtomicUsize::new(0);

    std::thread::scope(|scope| {
        for _ in 0..jobs {
            scope.spawn(|| loop {
                let i = cursor.fetch_add(1, Ordering::Relaxed);
                if i >= pairs.len() {
                    break;
                }
                let (wasm, abi) = &pairs[i];
                let report = run_pair(wasm, abi, config, expectations.as_ref());
                *slots[i].lock().unwrap() = Some(report);
            });
        }
    });

    let mut contracts: Vec<ContractReport> = slots
        .into_iter()
        .map(|slot| {
            slot.into_inner()
                .unwrap()
                .expect("worker filled every slot")
        })
        .collect();
    contracts.sort_by(|a, b| a.name.cmp(&b.name));

    let summary = build_summary(&contracts);
    let wall_ms = t0.elapsed().as_millis() as u64;
    let total_actions: u64 = contracts.iter().map(|c| c.stats.transactions as u64).sum();
    let timing = Timing {
        started_unix_ms: started,
        wall_ms,
        actions_per_sec: if wall_ms == 0 {
            0.0
        } else {
            total_actions as f64 / (wall_ms as f64 / 1000.0)
        },
    };

    Ok(Report {
        schema_version: SCHEMA_VERSION,
        tool: ToolInfo::default(),
        config: config.echo(),
        contracts,
        summary,
        timing: Some(timing),
    })
}

/// Builds a single-contract report through the same summary path.
pub fn run_single(
    wasm: &Path,
    abi: &Path,
    account: Option<&str>,
    config: &RunConfig,
) -> Result<(Report, Option<eosfuzz_core::campaign::CampaignOutcome>)> {
    let started = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_millis() as u64)
        .unwrap_or(0);
    let t0 = Instant::now();

    let contract = load_contract(wasm, abi, account)?;
    let outcome = run_contract(&contract, config);
    let report_entry = contract_report(&contract, &outcome);
    let contracts = vec![report_entry];
    let summary = build_summary(&contracts);
    let wall_ms = t0.elapsed().as_millis() as u64;
    let total_actions: u64 = contracts.iter().map(|c| c.stats.transactions as u64).sum();

    let report = Report {
        schema_version: SCHEMA_VERSION,
        tool: ToolInfo::default(),
        config: config.echo(),
        contracts,
        summary,
        timing: Some(Timing {
            started_unix_ms: started,
            wall_ms,
            actions_per_sec: if wall_ms == 0 {
                0.0
            } else {
                total_actions as f64 / (wall_ms as f64 / 1000.0)
            },
        }),
    };
    Ok((report, outcome.ok()))
}
