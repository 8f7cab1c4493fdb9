//! Genesis config file: initial accounts with balances and starting block
//! info.

use anyhow::{bail, Context, Result};
use eosfuzz_core::chain::{BlockInfo, Genesis};
use eosfuzz_core::name::AccountName;
use eosfuzz_core::value::{Asset, Symbol};
use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Serialize, Deserialize)]
struct GenesisFile {
    accounts: Vec<GenesisAccount>,
    #[serde(default)]
    block: Option<GenesisBlock>,
}

#[derive(Serialize, Deserialize)]
struct GenesisAccount {
    name: String,
    /// e.g. "1000.0000 EOS"
    balance: String,
}

#[derive(Serialize, Deserialize)]
struct GenesisBlock {
    tapos_block_num: u32,
    tapos_block_prefix: u32,
    current_time_us: u64,
}

pub fn load_genesis(path: &Path) -> Result<Genesis> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading genesis {}", path.display()))?;
    parse_genesis(&text)
}

pub fn parse_genesis(text: &str) -> Result<Genesis> {
    let file: GenesisFile = serde_json::from_str(text).context("parsing genesis JSON")?;
    let mut accounts = Vec::new();
    for entry in &file.accounts {
        let name = AccountName::new(&entry.name)
            .map_err(|e| anyhow::anyhow!("bad account name {:?}: {e}", entry.name))?;
        let asset = Asset::parse(&entry.balance)
            .with_context(|| format!("bad balance {:?}", entry.balance))?;
        if asset.symbol != Symbol::eos() {
            bail!("balance {:?} must be denominated in 4,EOS", entry.balance);
        }
        if asset.amount < 0 {
            bail!("balance {:?} is negative", entry.balance);
        }
        accounts.push((name, asset.amount));
    }
    let block = match file.block {
        Some(b) => BlockInfo {
            tapos_block_num: b.tapos_block_num,
            tapos_block_prefix: b.tapos_block_prefix,
            current_time_us: b.current_time_us,
        },
        None => BlockInfo::default(),
    };
    Ok(Genesis { accounts, block })
}
