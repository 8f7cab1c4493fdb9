//! Static extraction of candidate strings from the WASM binary.
//!
//! Two pools feed input generation: every constant string found in the data
//! segments, and the memo candidates — strings whose data-segment offsets
//! appear as `i32.const` immediates inside functions that share the
//! `transfer` handler signature `(param i32 i64 i64 i32 i32)`.
//!
//! The extraction rule, used consistently by both pools and by the test
//! oracles: a string is a NUL- or segment-terminated run of printable ASCII
//! (0x20..=0x7E) at least two bytes long.

use crate::wasm::{FuncType, Instr, Module, ValType};
use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;

const MIN_LEN: usize = 2;

fn printable(b: u8) -> bool {
    (0x20..=0x7e).contains(&b)
}

/// The conventional compiled signature of a `transfer` handler.
pub fn default_transfer_signature() -> FuncType {
    FuncType {
        params: alloc::vec![
            ValType::I32,
            ValType::I64,
            ValType::I64,
            ValType::I32,
            ValType::I32,
        ],
        results: Vec::new(),
    }
}

/// Candidate strings extracted from one module.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct StringPool {
    pub all_strings: BTreeSet<String>,
    pub memo_candidates: BTreeSet<String>,
}

impl StringPool {
    pub fn analyze(module: &Module, transfer_sig: &FuncType) -> StringPool {
        StringPool {
            all_strings: extract_string_pool(module),
            memo_candidates: get_memo_strings(module, transfer_sig),
        }
    }

    /// Sorted copies, handy for deterministic indexed picking.
    pub fn sorted_all(&self) -> Vec<String> {
        self.all_strings.iter().cloned().collect()
    }

    pub fn sorted_memos(&self) -> Vec<String> {
        self.memo_candidates.iter().cloned().collect()
    }
}

/// Collects every constant string in the data segments: maximal printable
/// runs of length >= 2, deduplicated.
pub fn extract_string_pool(module: &Module) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    for seg in &module.data_segments {
        let mut run = Vec::new();
        for &b in seg.bytes.iter().chain(core::iter::once(&0u8)) {
            if printable(b) {
                run.push(b);
            } else {
                if run.len() >= MIN_LEN {
                    out.insert(String::from_utf8_lossy(&run).into_owned());
                }
                run.clear();
            }
        }
    }
    out
}

/// The string starting at an absolute data offset, if the bytes there form a
/// printable NUL- or segment-terminated run of length >= 2.
fn string_at_offset(module: &Module, offset: u32) -> Option<String> {
    let seg = module.segment_at(offset)?;
    let start = (offset - seg.offset) as usize;
    let mut end = start;
    while end < seg.bytes.len() && seg.bytes[end] != 0 {
        if !printable(seg.bytes[end]) {
            return None;
        }
        end += 1;
    }
    if end - start >= MIN_LEN {
        Some(String::from_utf8_lossy(&seg.bytes[start..end]).into_owned())
    } else {
        None
    }
}

/// Extracts memo candidates: for every function whose signature equals
/// `transfer_sig`, every `i32.const` immediate is treated as a potential data
/// offset and resolved against the data segments.
pub fn get_memo_strings(module: &Module, transfer_sig: &FuncType) -> BTreeSet<String> {
    let mut offsets: BTreeSet<u32> = BTreeSet::new();
    let imported = module.num_imported_funcs();
    for (i, func) in module.functions.iter().enumerate() {
        let matches_sig = module
            .func_type(imported + i as u32)
            .is_some_and(|ty| ty == transfer_sig);
        if !matches_sig {
            continue;
        }
        for instr in &func.code {
            if let Instr::I32Const(imm) = instr {
                offsets.insert(*imm as u32);
            }
        }
    }
    offsets
        .into_iter()
        .filter_map(|off| string_at_offset(module, off))
        .collect()
}
