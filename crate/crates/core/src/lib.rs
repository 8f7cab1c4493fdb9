//! Blackbox fuzzing engine for EOSIO-style WASM smart contracts.
//!
//! The crate is organized around the fuzzing pipeline: [`abi`] parses the
//! contract's ABI and [`value`] serializes generated arguments to the EOSIO
//! binary wire format; [`strings`] extracts candidate string inputs from the
//! WASM binary; [`gen`] produces deterministic test cases that interleave ABI
//! invocations with attack-agent interactions; [`chain`] is a minimal chain
//! simulator that dispatches actions into instrumented contract instances run
//! by [`interp`]; [`oracle`] evaluates the vulnerability detectors over the
//! recorded [`trace`] events; [`campaign`] ties the steps together.
//!
//! The crate is `no_std`-compatible (requires `alloc`); the `std` feature is
//! on by default and only widens error-trait integration and dependency
//! features. File formats, the CLI, and the fixture corpus live in the
//! companion `eosfuzz` crate.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod abi;
pub mod campaign;
pub mod chain;
pub mod gen;
pub mod interp;
pub mod name;
pub mod oracle;
pub mod rng;
pub mod strings;
pub mod trace;
pub mod value;
pub mod wasm;

pub use abi::AbiInterface;
pub use campaign::{run_campaign, CampaignOutcome, CampaignSpec};
pub use chain::{ChainSim, Genesis, TransactionResult};
pub use gen::{GenConfig, Step, TestCase};
pub use name::AccountName;
pub use oracle::{CampaignTrace, Finding, VulnType};
pub use trace::{TraceEvent, TraceKind};
pub use value::{Asset, Symbol, TypeDesc, TypedValue};
