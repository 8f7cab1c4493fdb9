//! CLI, file formats, and corpus orchestration for the eosfuzz engine.
//!
//! The heavy lifting lives in `eosfuzz-core`; this crate adds everything that
//! touches the filesystem: contract loading, the report and trace file
//! formats, genesis configs, corpus batch runs, and finding replay.

pub mod corpus;
pub mod genesis;
pub mod replay;
pub mod report;
pub mod runner;
pub mod tracefile;

pub use eosfuzz_core as core;
