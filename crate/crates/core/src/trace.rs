//! Instrumentation trace records.
//!
//! Every monitored instruction or host interaction executed during a
//! transaction appends one event, stamped with a per-transaction sequence
//! number and the dispatch context (receiver, code, action) it ran under.
//! Verbose mode additionally records a generic `Instr` event for every other
//! executed opcode, so new detectors can be written against the same schema.

use crate::name::AccountName;
use alloc::string::String;
use alloc::vec::Vec;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CompareOp {
    I32Eq,
    I32Ne,
    I64Eq,
    I64Ne,
}

impl CompareOp {
    pub fn name(self) -> &'static str {
        match self {
            CompareOp::I32Eq => "i32.eq",
            CompareOp::I32Ne => "i32.ne",
            CompareOp::I64Eq => "i64.eq",
            CompareOp::I64Ne => "i64.ne",
        }
    }

    /// Account names are 64-bit; only these comparisons can check them.
    pub fn is_wide(self) -> bool {
        matches!(self, CompareOp::I64Eq | CompareOp::I64Ne)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlockInfoKind {
    TaposBlockNum,
    TaposBlockPrefix,
}

impl BlockInfoKind {
    pub fn name(self) -> &'static str {
        match self {
            BlockInfoKind::TaposBlockNum => "tapos_block_num",
            BlockInfoKind::TaposBlockPrefix => "tapos_block_prefix",
        }
    }
}

/// How one dispatched action finished.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ActionStatus {
    Ok,
    Aborted,
    Failed,
}

impl ActionStatus {
    pub fn name(self) -> &'static str {
        match self {
            ActionStatus::Ok => "ok",
            ActionStatus::Aborted => "aborted",
            ActionStatus::Failed => "failed",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TraceKind {
    ActionBegin,
    ActionEnd {
        status: ActionStatus,
    },
    CallIndirect {
        table_index: u32,
        resolved_func: u32,
    },
    Compare {
        op: CompareOp,
        lhs: u64,
        rhs: u64,
    },
    HostCall {
        intrinsic: &'static str,
        args: Vec<u64>,
    },
    TokenTransfer {
        from: AccountName,
        to: AccountName,
        amount: i64,
    },
    AssertFired {
        message: String,
    },
    BlockInfoRead {
        which: BlockInfoKind,
    },
    /// Verbose-only record for opcodes outside the monitored categories.
    Instr {
        opcode: &'static str,
    },
}

impl TraceKind {
    pub fn name(&self) -> &'static str {
        match self {
            TraceKind::ActionBegin => "action_begin",
            TraceKind::ActionEnd { .. } => "action_end",
            TraceKind::CallIndirect { .. } => "call_indirect",
            TraceKind::Compare { .. } => "compare",
            TraceKind::HostCall { .. } => "host_call",
            TraceKind::TokenTransfer { .. } => "token_transfer",
            TraceKind::AssertFired { .. } => "assert_fired",
            TraceKind::BlockInfoRead { .. } => "block_info_read",
            TraceKind::Instr { .. } => "instr",
        }
    }
}

/// One instrumentation record.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceEvent {
    pub seq: u64,
    pub receiver: AccountName,
    pub code: AccountName,
    pub action: AccountName,
    pub kind: TraceKind,
}

/// Collects the events of one transaction.
#[derive(Debug, Default)]
pub struct TraceSink {
    events: Vec<TraceEvent>,
    next_seq: u64,
    verbose: bool,
    receiver: AccountName,
    code: AccountName,
    action: AccountName,
}

impl TraceSink {
    pub fn new(verbose: bool) -> TraceSink {
        TraceSink {
            verbose,
            ..TraceSink::default()
        }
    }

    /// Sets the dispatch context stamped on subsequent events.
    pub fn set_context(&mut self, receiver: AccountName, code: AccountName, action: AccountName) {
        self.receiver = receiver;
        self.code = code;
        self.action = action;
    }

    pub fn verbose(&self) -> bool {
        self.verbose
    }

    pub fn emit(&mut self, kind: TraceKind) {
        let seq = self.next_seq;
        self.next_seq += 1;
        self.events.push(TraceEvent {
            seq,
            receiver: self.receiver,
            code: self.code,
            action: self.action,
            kind,
        });
    }

    /// Emits a generic opcode record when verbose mode is on.
    pub fn emit_instr(&mut self, opcode: &'static str) {
        if self.verbose {
            self.emit(TraceKind::Instr { opcode });
        }
    }

    pub fn events(&self) -> &[TraceEvent] {
        &self.events
    }

    pub fn into_events(self) -> Vec<TraceEvent> {
        self.events
    }
}
