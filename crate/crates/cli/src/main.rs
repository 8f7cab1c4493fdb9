//! eosfuzz: blackbox fuzzer for EOSIO-style WASM smart contracts.
//!
//! Exit codes: 0 = ran clean, 2 = findings present, 1 = tool error.

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use eosfuzz::corpus::{run_corpus, run_single};
use eosfuzz::genesis::load_genesis;
use eosfuzz::replay::replay_finding;
use eosfuzz::report::Report;
use eosfuzz::runner::RunConfig;
use eosfuzz::tracefile::write_trace;
use eosfuzz_core::chain::TxStatus;
use eosfuzz_core::gen::AttackMix;
use eosfuzz_core::strings::get_memo_strings;
use eosfuzz_core::wasm::{parse_wasm, FuncType, ValType};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "eosfuzz",
    version,
    about = "Blackbox fuzzer for EOSIO-style WASM smart contracts"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fuzz one contract and report the findings
    Run(RunArgs),
    /// Fuzz every (wasm, abi) pair in a directory
    Corpus(CorpusArgs),
    /// Print the memo candidate strings extracted from a contract
    ExtractMemos(ExtractMemosArgs),
    /// Re-execute a reported finding and confirm it reproduces
    Replay(ReplayArgs),
}

#[derive(Args)]
struct FuzzOptions {
    /// Seed for deterministic input generation
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Total interleaved steps to spend per contract
    #[arg(long, default_value_t = 1000)]
    actions: u32,
    /// Step-kind weights: abi-call,fake-transfer,forged-notification,probe
    #[arg(long, value_parser = parse_mix)]
    mix: Option<AttackMix>,
    /// Maximum generated steps per test case
    #[arg(long, default_value_t = 50)]
    max_case_len: u32,
    /// Instruction budget per transaction
    #[arg(long, default_value_t = 10_000_000)]
    budget: u64,
    /// Require block-info read and EOS transfer in the same transaction
    #[arg(long)]
    strict_blockinfo: bool,
    /// Record every executed opcode in the trace
    #[arg(long)]
    verbose_trace: bool,
    /// Genesis config JSON (initial accounts and block info)
    #[arg(long)]
    genesis: Option<PathBuf>,
    /// Omit the volatile timing section from the report
    #[arg(long)]
    no_timing: bool,
}

impl FuzzOptions {
    fn to_config(&self) -> Result<RunConfig> {
        let mut config = RunConfig::default();
        config.gen.seed = self.seed;
        config.gen.actions_per_campaign = self.actions;
        config.gen.max_case_len = self.max_case_len;
        if let Some(mix) = self.mix {
            config.gen.attack_mix = mix;
        }
        config.gen.validate().map_err(|e| anyhow::anyhow!("{e}"))?;
        config.budget = self.budget;
        config.strict_blockinfo = self.strict_blockinfo;
        config.verbose_trace = self.verbose_trace;
        if let Some(path) = &self.genesis {
            let genesis = load_genesis(path)?;
            config.genesis = Some((path.display().to_string(), genesis));
        }
        Ok(config)
    }
}

#[derive(Args)]
struct RunArgs {
    /// Contract bytecode
    #[arg(long)]
    wasm: PathBuf,
    /// Contract ABI JSON
    #[arg(long)]
    abi: PathBuf,
    /// Account name to deploy under (default: derived from the file name)
    #[arg(long)]
    account: Option<String>,
    /// Write the full instrumentation trace as JSON Lines
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Write the report JSON here (default: stdout)
    #[arg(long)]
    report: Option<PathBuf>,
    #[command(flatten)]
    fuzz: FuzzOptions,
}

#[derive(Args)]
struct CorpusArgs {
    /// Directory of (wasm, abi) pairs; expectations.json is honored
    #[arg(long)]
    dir: PathBuf,
    /// Parallel campaigns
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Write the aggregate report JSON here (default: stdout)
    #[arg(long)]
    report: Option<PathBuf>,
    #[command(flatten)]
    fuzz: FuzzOptions,
}

#[derive(Args)]
struct ExtractMemosArgs {
    /// Contract bytecode
    #[arg(long)]
    wasm: PathBuf,
    /// Transfer handler signature as space-separated param types
    #[arg(long, default_value = "i32 i64 i64 i32 i32")]
    signature: String,
}

#[derive(Args)]
struct ReplayArgs {
    /// Report JSON produced by `run` or `corpus`
    #[arg(long)]
    report: PathBuf,
    /// Finding index, counting across contracts in report order
    #[arg(long)]
    finding: usize,
}

fn parse_mix(s: &str) -> Result<AttackMix, String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 4 {
        return Err("mix needs four comma-separated weights".into());
    }
    let nums: Vec<f64> = parts
        .iter()
        .map(|p| p.trim().parse::<f64>().map_err(|e| e.to_string()))
        .collect::<Result<_, _>>()?;
    let mix = AttackMix {
        abi_call: nums[0],
        fake_transfer: nums[1],
        forged_notification: nums[2],
        genuine_probe: nums[3],
    };
    mix.validate().map_err(|e| e.to_string())?;
    Ok(mix)
}

fn parse_signature(s: &str) -> Result<FuncType> {
    let params = s
        .split_whitespace()
        .map(|t| match t {
            "i32" => Ok(ValType::I32),
            "i64" => Ok(ValType::I64),
            "f32" => Ok(ValType::F32),
            "f64" => Ok(ValType::F64),
            other => bail!("unknown value type {other:?}"),
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FuncType {
        params,
        results: vec![],
    })
}

fn emit_report(report: &Report, path: Option<&PathBuf>, strip_timing: bool) -> Result<()> {
    let text = if strip_timing {
        report.normalized_json()
    } else {
        report.to_json()
    };
    match path {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display()))?,
        None => print!("{text}"),
    }
    Ok(())
}

fn exit_for(report: &Report) -> ExitCode {
    if report.total_findings() > 0 {
        ExitCode::from(2)
    } else {
        ExitCode::SUCCESS
    }
}

fn cmd_run(args: RunArgs) -> Result<ExitCode> {
    let config = args.fuzz.to_config()?;
    let (report, outcome) = run_single(&args.wasm, &args.abi, args.account.as_deref(), &config)?;
    if let (Some(path), Some(outcome)) = (&args.trace, &outcome) {
        write_trace(path, &outcome.trace)
            .with_context(|| format!("writing trace {}", path.display()))?;
    }
    emit_report(&report, args.report.as_ref(), args.fuzz.no_timing)?;
    for contract in &report.contracts {
        if let Some(err) = &contract.error {
            eprintln!("campaign failed for {}: {err}", contract.name);
        }
    }
    Ok(exit_for(&report))
}

fn cmd_corpus(args: CorpusArgs) -> Result<ExitCode> {
    let config = args.fuzz.to_config()?;
    let report = run_corpus(&args.dir, &config, args.jobs)?;
    emit_report(&report, args.report.as_ref(), args.fuzz.no_timing)?;
    if !report.summary.mismatches.is_empty() {
        eprintln!(
            "warning: {} contract(s) deviated from their expectations",
            report.summary.mismatches.len()
        );
    }
    Ok(exit_for(&report))
}

fn cmd_extract_memos(args: ExtractMemosArgs) -> Result<ExitCode> {
    let bytes =
        std::fs::read(&args.wasm).with_context(|| format!("reading {}", args.wasm.display()))?;
    let module = parse_wasm(&bytes).map_err(|e| anyhow::anyhow!("{e}"))?;
    let signature = parse_signature(&args.signature)?;
    let memos: Vec<String> = get_memo_strings(&module, &signature).into_iter().collect();
    println!("{}", serde_json::to_string_pretty(&memos)?);
    Ok(ExitCode::SUCCESS)
}

fn cmd_replay(args: ReplayArgs) -> Result<ExitCode> {
    let text = std::fs::read_to_string(&args.report)
        .with_context(|| format!("reading {}", args.report.display()))?;
    let report: Report = serde_json::from_str(&text).context("parsing report JSON")?;
    let outcome = replay_finding(&report, args.finding, args.report.parent())?;

    println!(
        "replayed {} steps against {} ({})",
        outcome.results.len(),
        outcome.contract,
        outcome.vuln_type
    );
    for (i, result) in outcome.results.iter().enumerate() {
        let status = match &result.status {
            TxStatus::Applied => "applied".to_string(),
            TxStatus::Aborted(msg) => format!("aborted: {msg}"),
            TxStatus::Error(e) => format!("error: {e}"),
        };
        println!("  step {i}: {status} ({} events)", result.trace.len());
    }
    println!(
        "balance delta: contract {:+}, sender {:+}",
        outcome.cut_delta, outcome.sender_delta
    );
    if outcome.predicate_holds {
        println!("oracle predicate reproduced");
        Ok(ExitCode::from(2))
    } else {
        bail!("replay did not reproduce the oracle predicate");
    }
}

fn main() -> ExitCode {
    // Exit-code contract: 0 clean, 2 findings, 1 any tool error -- including
    // bad usage, which clap would otherwise exit 2 for.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if matches!(
                e.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            ) {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            };
            let _ = e.print();
            return code;
        }
    };
    let result = match cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Corpus(args) => cmd_corpus(args),
        Command::ExtractMemos(args) => cmd_extract_memos(args),
        Command::Replay(args) => cmd_replay(args),
    };
    match result {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}
