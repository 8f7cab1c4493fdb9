//! Instrumented WASM interpreter (MVP subset).
//!
//! Executes contract modules with per-instruction hooks: every dynamic
//! `call_indirect`, every `i32`/`i64` eq/ne comparison (with both operand
//! values), and every host-intrinsic call emit exactly one trace event; a
//! verbose mode additionally records every other executed opcode. The host
//! intrinsics cover the action API used by EOSIO-style contracts.

use crate::name::AccountName;
use crate::trace::{BlockInfoKind, CompareOp, TraceKind, TraceSink};
use crate::wasm::{ConstExpr, ExportKind, FuncType, Instr, Module, ValType, PAGE_SIZE};
use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use sha2::{Digest, Sha256};

/// A runtime value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Value {
    I32(i32),
    I64(i64),
    F32(f32),
    F64(f64),
}

impl Value {
    pub fn ty(self) -> ValType {
        match self {
            Value::I32(_) => ValType::I32,
            Value::I64(_) => ValType::I64,
            Value::F32(_) => ValType::F32,
            Value::F64(_) => ValType::F64,
        }
    }

    fn zero_of(ty: ValType) -> Value {
        match ty {
            ValType::I32 => Value::I32(0),
            ValType::I64 => Value::I64(0),
            ValType::F32 => Value::F32(0.0),
            ValType::F64 => Value::F64(0.0),
        }
    }

    fn from_const(c: ConstExpr) -> Value {
        match c {
            ConstExpr::I32(v) => Value::I32(v),
            ConstExpr::I64(v) => Value::I64(v),
            ConstExpr::F32(bits) => Value::F32(f32::from_bits(bits)),
            ConstExpr::F64(bits) => Value::F64(f64::from_bits(bits)),
        }
    }
}

/// Why execution trapped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Trap {
    Unreachable,
    MemoryOutOfBounds,
    DivideByZero,
    IntegerOverflow,
    InvalidConversion,
    UndefinedTableElement,
    IndirectTypeMismatch,
    StackUnderflow,
    TypeMismatch,
    OutOfRange(&'static str),
    CallDepthExceeded,
    MemoryGrowBeyondCap,
}

impl fmt::Display for Trap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Trap::Unreachable => write!(f, "unreachable executed"),
            Trap::MemoryOutOfBounds => write!(f, "out-of-bounds memory access"),
            Trap::DivideByZero => write!(f, "integer divide by zero"),
            Trap::IntegerOverflow => write!(f, "integer overflow"),
            Trap::InvalidConversion => write!(f, "invalid float-to-int conversion"),
            Trap::UndefinedTableElement => write!(f, "undefined table element"),
            Trap::IndirectTypeMismatch => write!(f, "indirect call type mismatch"),
            Trap::StackUnderflow => write!(f, "value stack underflow"),
            Trap::TypeMismatch => write!(f, "value type mismatch"),
            Trap::OutOfRange(what) => write!(f, "{what} index out of range"),
            Trap::CallDepthExceeded => write!(f, "call depth exceeded"),
            Trap::MemoryGrowBeyondCap => write!(f, "memory growth beyond cap"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum LinkError {
    /// Module does not export `apply`.
    MissingApply,
    /// `apply` is not `(i64, i64, i64) -> ()`.
    WrongApplySignature,
    UnresolvedImport {
        module: String,
        name: String,
    },
    ImportSignatureMismatch {
        name: String,
    },
    /// Float opcodes present while floats are disabled.
    FloatsDisabled,
    MemoryTooLarge {
        pages: u32,
    },
    DataSegmentOutOfBounds,
    ElementSegmentOutOfBounds,
    TableEntryOutOfRange,
}

impl fmt::Display for LinkError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LinkError::MissingApply => write!(f, "module does not export an apply function"),
            LinkError::WrongApplySignature => {
                write!(f, "apply must have signature (i64, i64, i64) -> ()")
            }
            LinkError::UnresolvedImport { module, name } => {
                write!(f, "unresolved import {module}.{name}")
            }
            LinkError::ImportSignatureMismatch { name } => {
                write!(f, "import {name} has an unexpected signature")
            }
            LinkError::FloatsDisabled => write!(f, "module uses float opcodes, floats disabled"),
            LinkError::MemoryTooLarge { pages } => {
                write!(f, "module wants {pages} pages of memory, over the cap")
            }
            LinkError::DataSegmentOutOfBounds => write!(f, "data segment out of bounds"),
            LinkError::ElementSegmentOutOfBounds => write!(f, "element segment out of bounds"),
            LinkError::TableEntryOutOfRange => write!(f, "element entry is not a function"),
        }
    }
}

impl core::error::Error for LinkError {}

/// The host intrinsics contracts may import from the `env` module.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Intrinsic {
    ReadActionData,
    ActionDataSize,
    RequireRecipient,
    RequireAuth,
    SendInline,
    EosioAssert,
    CurrentReceiver,
    CurrentTime,
    TaposBlockNum,
    TaposBlockPrefix,
    Sha256,
    Memcpy,
    Memmove,
    Memset,
}

impl Intrinsic {
    pub fn resolve(module: &str, name: &str) -> Option<Intrinsic> {
        if module != "env" {
            return None;
        }
        Some(match name {
            "read_action_data" => Intrinsic::ReadActionData,
            "action_data_size" => Intrinsic::ActionDataSize,
            "require_recipient" => Intrinsic::RequireRecipient,
            "require_auth" => Intrinsic::RequireAuth,
            "send_inline" => Intrinsic::SendInline,
            "eosio_assert" => Intrinsic::EosioAssert,
            "current_receiver" => Intrinsic::CurrentReceiver,
            "current_time" => Intrinsic::CurrentTime,
            "tapos_block_num" => Intrinsic::TaposBlockNum,
            "tapos_block_prefix" => Intrinsic::TaposBlockPrefix,
            "sha256" => Intrinsic::Sha256,
            "memcpy" => Intrinsic::Memcpy,
            "memmove" => Intrinsic::Memmove,
            "memset" => Intrinsic::Memset,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Intrinsic::ReadActionData => "read_action_data",
            Intrinsic::ActionDataSize => "action_data_size",
            Intrinsic::RequireRecipient => "require_recipient",
            Intrinsic::RequireAuth => "require_auth",
            Intrinsic::SendInline => "send_inline",
            Intrinsic::EosioAssert => "eosio_assert",
            Intrinsic::CurrentReceiver => "current_receiver",
            Intrinsic::CurrentTime => "current_time",
            Intrinsic::TaposBlockNum => "tapos_block_num",
            Intrinsic::TaposBlockPrefix => "tapos_block_prefix",
            Intrinsic::Sha256 => "sha256",
            Intrinsic::Memcpy => "memcpy",
            Intrinsic::Memmove => "memmove",
            Intrinsic::Memset => "memset",
        }
    }

    fn signature(self) -> FuncType {
        use ValType::*;
        let (params, results): (&[ValType], &[ValType]) = match self {
            Intrinsic::ReadActionData => (&[I32, I32], &[I32]),
            Intrinsic::ActionDataSize => (&[], &[I32]),
            Intrinsic::RequireRecipient => (&[I64], &[]),
            Intrinsic::RequireAuth => (&[I64], &[]),
            Intrinsic::SendInline => (&[I32, I32], &[]),
            Intrinsic::EosioAssert => (&[I32, I32], &[]),
            Intrinsic::CurrentReceiver => (&[], &[I64]),
            Intrinsic::CurrentTime => (&[], &[I64]),
            Intrinsic::TaposBlockNum => (&[], &[I32]),
            Intrinsic::TaposBlockPrefix => (&[], &[I32]),
            Intrinsic::Sha256 => (&[I32, I32, I32], &[]),
            Intrinsic::Memcpy | Intrinsic::Memmove | Intrinsic::Memset => {
                (&[I32, I32, I32], &[I32])
            }
        };
        FuncType {
            params: params.to_vec(),
            results: results.to_vec(),
        }
    }
}

/// Host-side services backing the intrinsics during one dispatch.
pub trait HostEnv {
    fn action_payload(&self) -> &[u8];
    fn receiver(&self) -> u64;
    /// Whether `account` signed the transaction this dispatch belongs to.
    fn is_authorized(&self, account: u64) -> bool;
    fn require_recipient(&mut self, account: u64);
    /// Queues a packed inline action; an `Err` aborts the transaction.
    fn queue_inline(&mut self, packed: &[u8]) -> Result<(), String>;
    fn current_time(&self) -> u64;
    fn tapos_block_num(&self) -> u32;
    fn tapos_block_prefix(&self) -> u32;
}

#[derive(Debug, Clone)]
pub struct InterpConfig {
    pub enable_floats: bool,
    /// Hard cap on linear memory, in 64 KiB pages; growth beyond it traps.
    pub max_memory_pages: u32,
    pub max_call_depth: u32,
}

impl Default for InterpConfig {
    fn default() -> Self {
        InterpConfig {
            enable_floats: true,
            max_memory_pages: 64,
            max_call_depth: 256,
        }
    }
}

/// A linked, executable module instance: linear memory, globals, and the
/// indirect-call table, persisting across `apply` calls until reset.
#[derive(Debug)]
pub struct Instance {
    module: Arc<Module>,
    config: InterpConfig,
    imports: Vec<Intrinsic>,
    apply_idx: u32,
    memory: Vec<u8>,
    globals: Vec<Value>,
    table: Vec<Option<u32>>,
}

/// How one `apply` call finished.
#[derive(Debug, Clone, PartialEq)]
pub enum ApplyStatus {
    Ok,
    /// `eosio_assert` failed or the host rejected an operation.
    Aborted(String),
    Trapped(Trap),
    OutOfBudget,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ApplyOutcome {
    pub status: ApplyStatus,
    /// Instructions executed during this call.
    pub instr_count: u64,
}

/// Links a parsed module against the intrinsic table and initializes its
/// memory, globals, and table.
pub fn instantiate(module: Arc<Module>, config: InterpConfig) -> Result<Instance, LinkError> {
    let mut imports = Vec::with_capacity(module.imports.len());
    for import in &module.imports {
        let intrinsic = Intrinsic::resolve(&import.module, &import.name).ok_or_else(|| {
            LinkError::UnresolvedImport {
                module: import.module.clone(),
                name: import.name.clone(),
            }
        })?;
        let declared = &module.types[import.type_idx as usize];
        if *declared != intrinsic.signature() {
            return Err(LinkError::ImportSignatureMismatch {
                name: import.name.clone(),
            });
        }
        imports.push(intrinsic);
    }

    if !config.enable_floats && module.functions.iter().any(|f| f.uses_float) {
        return Err(LinkError::FloatsDisabled);
    }

    let apply_idx = module.export_func("apply").ok_or(LinkError::MissingApply)?;
    let apply_ty = module.func_type(apply_idx).ok_or(LinkError::MissingApply)?;
    let expected = FuncType {
        params: vec![ValType::I64, ValType::I64, ValType::I64],
        results: vec![],
    };
    if *apply_ty != expected {
        return Err(LinkError::WrongApplySignature);
    }

    let mut instance = Instance {
        module,
        config,
        imports,
        apply_idx,
        memory: Vec::new(),
        globals: Vec::new(),
        table: Vec::new(),
    };
    instance.reset()?;
    Ok(instance)
}

impl Instance {
    pub fn module(&self) -> &Module {
        &self.module
    }

    /// Re-initializes memory, globals, and the table to their post-link
    /// state, discarding all execution effects.
    pub fn reset(&mut self) -> Result<(), LinkError> {
        let min_pages = self
            .module
            .memories
            .first()
            .map(|m| m.min_pages)
            .unwrap_or(0);
        if min_pages > self.config.max_memory_pages {
            return Err(LinkError::MemoryTooLarge { pages: min_pages });
        }
        self.memory.clear();
        self.memory.resize(min_pages as usize * PAGE_SIZE, 0);
        for seg in &self.module.data_segments {
            let start = seg.offset as usize;
            let end = start
                .checked_add(seg.bytes.len())
                .ok_or(LinkError::DataSegmentOutOfBounds)?;
            if end > self.memory.len() {
                return Err(LinkError::DataSegmentOutOfBounds);
            }
            self.memory[start..end].copy_from_slice(&seg.bytes);
        }

        self.globals = self
            .module
            .globals
            .iter()
            .map(|g| Value::from_const(g.init))
            .collect();

        let table_size = self.module.tables.first().map(|t| t.min).unwrap_or(0);
        self.table.clear();
        self.table.resize(table_size as usize, None);
        let func_space =
            self.module.num_imported_funcs() as u64 + self.module.functions.len() as u64;
        for elem in &self.module.elements {
            let start = elem.offset as usize;
            let end = start
                .checked_add(elem.funcs.len())
                .ok_or(LinkError::ElementSegmentOutOfBounds)?;
            if end > self.table.len() {
                return Err(LinkError::ElementSegmentOutOfBounds);
            }
            for (slot, &func) in self.table[start..end].iter_mut().zip(&elem.funcs) {
                if (func as u64) >= func_space {
                    return Err(LinkError::TableEntryOutOfRange);
                }
                *slot = Some(func);
            }
        }
        Ok(())
    }

    /// Reads a global by export name; test and oracle helper.
    pub fn global_by_export(&self, name: &str) -> Option<Value> {
        let export = self
            .module
            .exports
            .iter()
            .find(|e| e.kind == ExportKind::Global && e.name == name)?;
        self.globals.get(export.index as usize).copied()
    }

    pub fn memory(&self) -> &[u8] {
        &self.memory
    }
}

/// Calls the instance's `apply(receiver, code, action)`, charging `budget`
/// one unit per executed instruction and emitting trace events into `sink`.
pub fn call_apply(
    instance: &mut Instance,
    env: &mut dyn HostEnv,
    receiver: u64,
    code: u64,
    action: u64,
    budget: &mut u64,
    sink: &mut TraceSink,
) -> ApplyOutcome {
    let start_budget = *budget;
    let mut exec = Exec {
        instance,
        env,
        sink,
        budget,
    };
    let args = vec![
        Value::I64(receiver as i64),
        Value::I64(code as i64),
        Value::I64(action as i64),
    ];
    let apply_idx = exec.instance.apply_idx;
    let status = match exec.run_call(apply_idx, args) {
        Ok(_) => ApplyStatus::Ok,
        Err(Stop::Abort(message)) => ApplyStatus::Aborted(message),
        Err(Stop::Trap(trap)) => ApplyStatus::Trapped(trap),
        Err(Stop::Budget) => ApplyStatus::OutOfBudget,
    };
    ApplyOutcome {
        status,
        instr_count: start_budget - *budget,
    }
}

enum Stop {
    Trap(Trap),
    Abort(String),
    Budget,
}

struct Label {
    cont: u32,
    base: usize,
    arity: u8,
    is_loop: bool,
}

/// One activation record. Frames live on the heap, so adversarial call
/// depth cannot overflow the host stack.
struct Frame {
    func_idx: u32,
    pc: usize,
    locals: Vec<Value>,
    labels: Vec<Label>,
    /// Value-stack height at entry; the frame may not pop below it.
    stack_base: usize,
    result_arity: usize,
}

struct Exec<'a> {
    instance: &'a mut Instance,
    env: &'a mut dyn HostEnv,
    sink: &'a mut TraceSink,
    budget: &'a mut u64,
}

type Run<T> = Result<T, Stop>;

fn trap<T>(t: Trap) -> Run<T> {
    Err(Stop::Trap(t))
}

fn new_frame(module: &Module, func_idx: u32, args: Vec<Value>, stack_base: usize) -> Run<Frame> {
    let body = match module.body(func_idx) {
        Some(b) => b,
        None => return trap(Trap::OutOfRange("function")),
    };
    let func_ty = module.func_type(func_idx).expect("checked by parser");
    if args.len() != func_ty.params.len()
        || args.iter().zip(&func_ty.params).any(|(a, p)| a.ty() != *p)
    {
        return trap(Trap::TypeMismatch);
    }
    let result_arity = func_ty.results.len();
    let mut locals = args;
    locals.extend(body.locals.iter().map(|&ty| Value::zero_of(ty)));
    Ok(Frame {
        func_idx,
        pc: 0,
        locals,
        labels: Vec::new(),
        stack_base,
        result_arity,
    })
}

/// Unwinds for a branch. Returns the continuation pc, or `None` when the
/// branch targets the function label (acting as return). Block and if labels
/// stay on the stack: their continuation is their own `End`, which pops them.
fn branch(stack: &mut Vec<Value>, labels: &mut Vec<Label>, depth: u32) -> Run<Option<usize>> {
    let depth = depth as usize;
    if depth >= labels.len() {
        return Ok(None);
    }
    let idx = labels.len() - 1 - depth;
    let (cont, base, arity, is_loop) = {
        let l = &labels[idx];
        (l.cont as usize, l.base, l.arity as usize, l.is_loop)
    };
    if is_loop {
        stack.truncate(base);
    } else {
        if stack.len() < base + arity {
            return trap(Trap::StackUnderflow);
        }
        let kept = stack.split_off(stack.len() - arity);
        stack.truncate(base);
        stack.extend(kept);
    }
    labels.truncate(idx + 1);
    Ok(Some(cont))
}

fn pop_args(stack: &mut Vec<Value>, frame_base: usize, ty: &FuncType) -> Run<Vec<Value>> {
    let n = ty.params.len();
    if stack.len() < frame_base + n {
        return trap(Trap::StackUnderflow);
    }
    Ok(stack.split_off(stack.len() - n))
}

impl Exec<'_> {
    /// Runs `root_func` to completion on an explicit frame stack.
    fn run_call(&mut self, root_func: u32, args: Vec<Value>) -> Run<Option<Value>> {
        let module = Arc::clone(&self.instance.module);
        let imported = module.num_imported_funcs();
        if root_func < imported {
            let intrinsic = self.instance.imports[root_func as usize];
            return self.invoke_intrinsic(intrinsic, &args);
        }

        let mut value_stack: Vec<Value> = Vec::with_capacity(64);
        let mut frames: Vec<Frame> = Vec::new();
        frames.push(new_frame(&module, root_func, args, 0)?);

        'dispatch: loop {
            let mut frame = frames.pop().expect("dispatch always has a frame");
            let body = module
                .body(frame.func_idx)
                .expect("frame built from a local function");
            let code = &body.code;

            macro_rules! pop {
                () => {
                    if value_stack.len() > frame.stack_base {
                        value_stack.pop().unwrap()
                    } else {
                        return trap(Trap::StackUnderflow);
                    }
                };
            }
            macro_rules! pop_i32 {
                () => {
                    match pop!() {
                        Value::I32(v) => v,
                        _ => return trap(Trap::TypeMismatch),
                    }
                };
            }
            macro_rules! pop_i64 {
                () => {
                    match pop!() {
                        Value::I64(v) => v,
                        _ => return trap(Trap::TypeMismatch),
                    }
                };
            }
            macro_rules! pop_f32 {
                () => {
                    match pop!() {
                        Value::F32(v) => v,
                        _ => return trap(Trap::TypeMismatch),
                    }
                };
            }
            macro_rules! pop_f64 {
                () => {
                    match pop!() {
                        Value::F64(v) => v,
                        _ => return trap(Trap::TypeMismatch),
                    }
                };
            }
            macro_rules! un_i32 {
                (|$a:ident| $e:expr) => {{
                    let $a = pop_i32!();
                    value_stack.push(Value::I32($e));
                }};
            }
            macro_rules! un_i64 {
                (|$a:ident| $e:expr) => {{
                    let $a = pop_i64!();
                    value_stack.push(Value::I64($e));
                }};
            }
            macro_rules! bin_i32 {
                (|$a:ident, $b:ident| $e:expr) => {{
                    let $b = pop_i32!();
                    let $a = pop_i32!();
                    value_stack.push(Value::I32($e));
                }};
            }
            macro_rules! bin_i64 {
                (|$a:ident, $b:ident| $e:expr) => {{
                    let $b = pop_i64!();
                    let $a = pop_i64!();
                    value_stack.push(Value::I64($e));
                }};
            }
            macro_rules! cmp_i32 {
                (|$a:ident, $b:ident| $e:expr) => {{
                    let $b = pop_i32!();
                    let $a = pop_i32!();
                    value_stack.push(Value::I32(($e) as i32));
                }};
            }
            macro_rules! cmp_i64 {
                (|$a:ident, $b:ident| $e:expr) => {{
                    let $b = pop_i64!();
                    let $a = pop_i64!();
                    value_stack.push(Value::I32(($e) as i32));
                }};
            }
            macro_rules! cmp_f32 {
                (|$a:ident, $b:ident| $e:expr) => {{
                    let $b = pop_f32!();
                    let $a = pop_f32!();
                    value_stack.push(Value::I32(($e) as i32));
                }};
            }
            macro_rules! cmp_f64 {
                (|$a:ident, $b:ident| $e:expr) => {{
                    let $b = pop_f64!();
                    let $a = pop_f64!();
                    value_stack.push(Value::I32(($e) as i32));
                }};
            }
            macro_rules! un_f32 {
                (|$a:ident| $e:expr) => {{
                    let $a = pop_f32!();
                    value_stack.push(Value::F32($e));
                }};
            }
            macro_rules! un_f64 {
                (|$a:ident| $e:expr) => {{
                    let $a = pop_f64!();
                    value_stack.push(Value::F64($e));
                }};
            }
            macro_rules! bin_f32 {
                (|$a:ident, $b:ident| $e:expr) => {{
                    let $b = pop_f32!();
                    let $a = pop_f32!();
                    value_stack.push(Value::F32($e));
                }};
            }
            macro_rules! bin_f64 {
                (|$a:ident, $b:ident| $e:expr) => {{
                    let $b = pop_f64!();
                    let $a = pop_f64!();
                    value_stack.push(Value::F64($e));
                }};
            }
            macro_rules! load {
                ($offset:expr, $n:expr, $conv:expr) => {{
                    let base = pop_i32!() as u32;
                    let bytes = self.mem_read(base, *$offset, $n)?;
                    let arr: [u8; $n] = bytes.try_into().unwrap();
                    value_stack.push($conv(arr));
                }};
            }
            macro_rules! store {
                ($offset:expr, $pop:ident, $n:expr, $to_bytes:expr) => {{
                    let v = $pop!();
                    let base = pop_i32!() as u32;
                    let bytes = $to_bytes(v);
                    self.mem_write(base, *$offset, &bytes[..$n])?;
                }};
            }
            macro_rules! monitored_cmp_i32 {
                ($op:expr, |$a:ident, $b:ident| $e:expr) => {{
                    let $b = pop_i32!();
                    let $a = pop_i32!();
                    self.sink.emit(TraceKind::Compare {
                        op: $op,
                        lhs: $a as u32 as u64,
                        rhs: $b as u32 as u64,
                    });
                    value_stack.push(Value::I32(($e) as i32));
                }};
            }
            macro_rules! monitored_cmp_i64 {
                ($op:expr, |$a:ident, $b:ident| $e:expr) => {{
                    let $b = pop_i64!();
                    let $a = pop_i64!();
                    self.sink.emit(TraceKind::Compare {
                        op: $op,
                        lhs: $a as u64,
                        rhs: $b as u64,
                    });
                    value_stack.push(Value::I32(($e) as i32));
                }};
            }
            /// Returns from the current function: truncate to the frame base,
            /// keep the result, and resume the caller (or finish).
            macro_rules! func_return {
                () => {{
                    let result = if frame.result_arity == 1 {
                        Some(pop!())
                    } else {
                        None
                    };
                    value_stack.truncate(frame.stack_base);
                    if let Some(v) = result {
                        value_stack.push(v);
                    }
                    if frames.is_empty() {
                        return Ok(result);
                    }
                    continue 'dispatch;
                }};
            }

            loop {
                let instr = match code.get(frame.pc) {
                    Some(i) => i,
                    // Falling off the end behaves like the final End.
                    None => func_return!(),
                };
                if *self.budget == 0 {
                    return Err(Stop::Budget);
                }
                *self.budget -= 1;

                match instr {
                    Instr::Unreachable => {
                        self.sink.emit_instr("unreachable");
                        return trap(Trap::Unreachable);
                    }
                    Instr::Nop => self.sink.emit_instr("nop"),
                    Instr::Block { end_pc, arity } => {
                        self.sink.emit_instr("block");
                        frame.labels.push(Label {
                            cont: *end_pc,
                            base: value_stack.len(),
                            arity: *arity,
                            is_loop: false,
                        });
                    }
                    Instr::Loop { start_pc } => {
                        self.sink.emit_instr("loop");
                        frame.labels.push(Label {
                            cont: *start_pc,
                            base: value_stack.len(),
                            arity: 0,
                            is_loop: true,
                        });
                    }
                    Instr::If {
                        else_pc,
                        end_pc,
                        arity,
                    } => {
                        self.sink.emit_instr("if");
                        let cond = pop_i32!();
                        frame.labels.push(Label {
                            cont: *end_pc,
                            base: value_stack.len(),
                            arity: *arity,
                            is_loop: false,
                        });
                        if cond == 0 {
                            frame.pc = *else_pc as usize;
                            continue;
                        }
                    }
                    Instr::Else { end_pc } => {
                        // Fallthrough from the then-branch: skip to the End.
                        self.sink.emit_instr("else");
                        frame.pc = *end_pc as usize;
                        continue;
                    }
                    Instr::End => {
                        self.sink.emit_instr("end");
                        if frame.labels.pop().is_none() {
                            func_return!();
                        }
                    }
                    Instr::Br { depth } => {
                        self.sink.emit_instr("br");
                        match branch(&mut value_stack, &mut frame.labels, *depth)? {
                            Some(target) => {
                                frame.pc = target;
                                continue;
                            }
                            None => func_return!(),
                        }
                    }
                    Instr::BrIf { depth } => {
                        self.sink.emit_instr("br_if");
                        let cond = pop_i32!();
                        if cond != 0 {
                            match branch(&mut value_stack, &mut frame.labels, *depth)? {
                                Some(target) => {
                                    frame.pc = target;
                                    continue;
                                }
                                None => func_return!(),
                            }
                        }
                    }
                    Instr::BrTable { targets, default } => {
                        self.sink.emit_instr("br_table");
                        let idx = pop_i32!() as u32 as usize;
                        let depth = targets.get(idx).copied().unwrap_or(*default);
                        match branch(&mut value_stack, &mut frame.labels, depth)? {
                            Some(target) => {
                                frame.pc = target;
                                continue;
                            }
                            None => func_return!(),
                        }
                    }
                    Instr::Return => {
                        self.sink.emit_instr("return");
                        func_return!();
                    }
                    Instr::Call { func } => {
                        self.sink.emit_instr("call");
                        let callee_ty = match module.func_type(*func) {
                            Some(t) => t,
                            None => return trap(Trap::OutOfRange("function")),
                        };
                        let args = pop_args(&mut value_stack, frame.stack_base, callee_ty)?;
                        if *func < imported {
                            let intrinsic = self.instance.imports[*func as usize];
                            if let Some(v) = self.invoke_intrinsic(intrinsic, &args)? {
                                value_stack.push(v);
                            }
                        } else {
                            if frames.len() + 2 > self.instance.config.max_call_depth as usize {
                                return trap(Trap::CallDepthExceeded);
                            }
                            frame.pc += 1;
                            let callee = new_frame(&module, *func, args, value_stack.len())?;
                            frames.push(frame);
                            frames.push(callee);
                            continue 'dispatch;
                        }
                    }
                    Instr::CallIndirect { type_idx } => {
                        let table_index = pop_i32!() as u32;
                        let entry = self
                            .instance
                            .table
                            .get(table_index as usize)
                            .copied()
                            .flatten();
                        self.sink.emit(TraceKind::CallIndirect {
                            table_index,
                            resolved_func: entry.unwrap_or(u32::MAX),
                        });
                        let func = match entry {
                            Some(f) => f,
                            None => return trap(Trap::UndefinedTableElement),
                        };
                        let expected = match module.types.get(*type_idx as usize) {
                            Some(t) => t,
                            None => return trap(Trap::OutOfRange("type")),
                        };
                        let actual = match module.func_type(func) {
                            Some(t) => t,
                            None => return trap(Trap::OutOfRange("function")),
                        };
                        if actual != expected {
                            return trap(Trap::IndirectTypeMismatch);
                        }
                        let args = pop_args(&mut value_stack, frame.stack_base, expected)?;
                        if func < imported {
                            let intrinsic = self.instance.imports[func as usize];
                            if let Some(v) = self.invoke_intrinsic(intrinsic, &args)? {
                                value_stack.push(v);
                            }
                        } else {
                            if frames.len() + 2 > self.instance.config.max_call_depth as usize {
                                return trap(Trap::CallDepthExceeded);
                            }
                            frame.pc += 1;
                            let callee = new_frame(&module, func, args, value_stack.len())?;
                            frames.push(frame);
                            frames.push(callee);
                            continue 'dispatch;
                        }
                    }
                    Instr::Drop => {
                        self.sink.emit_instr("drop");
                        let _ = pop!();
                    }
                    Instr::Select => {
                        self.sink.emit_instr("select");
                        let cond = pop_i32!();
                        let b = pop!();
                        let a = pop!();
                        value_stack.push(if cond != 0 { a } else { b });
                    }
                    Instr::LocalGet(i) => {
                        self.sink.emit_instr("local.get");
                        match frame.locals.get(*i as usize) {
                            Some(v) => value_stack.push(*v),
                            None => return trap(Trap::OutOfRange("local")),
                        }
                    }
                    Instr::LocalSet(i) => {
                        self.sink.emit_instr("local.set");
                        let v = pop!();
                        match frame.locals.get_mut(*i as usize) {
                            Some(slot) => *slot = v,
                            None => return trap(Trap::OutOfRange("local")),
                        }
                    }
                    Instr::LocalTee(i) => {
                        self.sink.emit_instr("local.tee");
                        let v = match value_stack.last() {
                            Some(v) => *v,
                            None => return trap(Trap::StackUnderflow),
                        };
                        match frame.locals.get_mut(*i as usize) {
                            Some(slot) => *slot = v,
                            None => return trap(Trap::OutOfRange("local")),
                        }
                    }
                    Instr::GlobalGet(i) => {
                        self.sink.emit_instr("global.get");
                        match self.instance.globals.get(*i as usize) {
                            Some(v) => value_stack.push(*v),
                            None => return trap(Trap::OutOfRange("global")),
                        }
                    }
                    Instr::GlobalSet(i) => {
                        self.sink.emit_instr("global.set");
                        let v = pop!();
                        match self.instance.globals.get_mut(*i as usize) {
                            Some(slot) => *slot = v,
                            None => return trap(Trap::OutOfRange("global")),
                        }
                    }

                    Instr::I32Load(off) => {
                        self.sink.emit_instr("i32.load");
                        load!(off, 4, |b| Value::I32(i32::from_le_bytes(b)));
                    }
                    Instr::I64Load(off) => {
                        self.sink.emit_instr("i64.load");
                        load!(off, 8, |b| Value::I64(i64::from_le_bytes(b)));
                    }
                    Instr::F32Load(off) => {
                        self.sink.emit_instr("f32.load");
                        load!(off, 4, |b| Value::F32(f32::from_le_bytes(b)));
                    }
                    Instr::F64Load(off) => {
                        self.sink.emit_instr("f64.load");
                        load!(off, 8, |b| Value::F64(f64::from_le_bytes(b)));
                    }
                    Instr::I32Load8S(off) => {
                        self.sink.emit_instr("i32.load8_s");
                        load!(off, 1, |b: [u8; 1]| Value::I32(b[0] as i8 as i32));
                    }
                    Instr::I32Load8U(off) => {
                        self.sink.emit_instr("i32.load8_u");
                        load!(off, 1, |b: [u8; 1]| Value::I32(b[0] as i32));
                    }
                    Instr::I32Load16S(off) => {
                        self.sink.emit_instr("i32.load16_s");
                        load!(off, 2, |b| Value::I32(i16::from_le_bytes(b) as i32));
                    }
                    Instr::I32Load16U(off) => {
                        self.sink.emit_instr("i32.load16_u");
                        load!(off, 2, |b| Value::I32(u16::from_le_bytes(b) as i32));
                    }
                    Instr::I64Load8S(off) => {
                        self.sink.emit_instr("i64.load8_s");
                        load!(off, 1, |b: [u8; 1]| Value::I64(b[0] as i8 as i64));
                    }
                    Instr::I64Load8U(off) => {
                        self.sink.emit_instr("i64.load8_u");
                        load!(off, 1, |b: [u8; 1]| Value::I64(b[0] as i64));
                    }
                    Instr::I64Load16S(off) => {
                        self.sink.emit_instr("i64.load16_s");
                        load!(off, 2, |b| Value::I64(i16::from_le_bytes(b) as i64));
                    }
                    Instr::I64Load16U(off) => {
                        self.sink.emit_instr("i64.load16_u");
                        load!(off, 2, |b| Value::I64(u16::from_le_bytes(b) as i64));
                    }
                    Instr::I64Load32S(off) => {
                        self.sink.emit_instr("i64.load32_s");
                        load!(off, 4, |b| Value::I64(i32::from_le_bytes(b) as i64));
                    }
                    Instr::I64Load32U(off) => {
                        self.sink.emit_instr("i64.load32_u");
                        load!(off, 4, |b| Value::I64(u32::from_le_bytes(b) as i64));
                    }
                    Instr::I32Store(off) => {
                        self.sink.emit_instr("i32.store");
                        store!(off, pop_i32, 4, |v: i32| v.to_le_bytes());
                    }
                    Instr::I64Store(off) => {
                        self.sink.emit_instr("i64.store");
                        store!(off, pop_i64, 8, |v: i64| v.to_le_bytes());
                    }
                    Instr::F32Store(off) => {
                        self.sink.emit_instr("f32.store");
                        store!(off, pop_f32, 4, |v: f32| v.to_le_bytes());
                    }
                    Instr::F64Store(off) => {
                        self.sink.emit_instr("f64.store");
                        store!(off, pop_f64, 8, |v: f64| v.to_le_bytes());
                    }
                    Instr::I32Store8(off) => {
                        self.sink.emit_instr("i32.store8");
                        store!(off, pop_i32, 1, |v: i32| v.to_le_bytes());
                    }
                    Instr::I32Store16(off) => {
                        self.sink.emit_instr("i32.store16");
                        store!(off, pop_i32, 2, |v: i32| v.to_le_bytes());
                    }
                    Instr::I64Store8(off) => {
                        self.sink.emit_instr("i64.store8");
                        store!(off, pop_i64, 1, |v: i64| v.to_le_bytes());
                    }
                    Instr::I64Store16(off) => {
                        self.sink.emit_instr("i64.store16");
                        store!(off, pop_i64, 2, |v: i64| v.to_le_bytes());
                    }
                    Instr::I64Store32(off) => {
                        self.sink.emit_instr("i64.store32");
                        store!(off, pop_i64, 4, |v: i64| v.to_le_bytes());
                    }
                    Instr::MemorySize => {
                        self.sink.emit_instr("memory.size");
                        value_stack
                            .push(Value::I32((self.instance.memory.len() / PAGE_SIZE) as i32));
                    }
                    Instr::MemoryGrow => {
                        self.sink.emit_instr("memory.grow");
                        let delta = pop_i32!() as u32;
                        let current = (self.instance.memory.len() / PAGE_SIZE) as u32;
                        match current.checked_add(delta) {
                            Some(pages) if pages <= self.instance.config.max_memory_pages => {
                                self.instance.memory.resize(pages as usize * PAGE_SIZE, 0);
                                value_stack.push(Value::I32(current as i32));
                            }
                            _ => return trap(Trap::MemoryGrowBeyondCap),
                        }
                    }

                    Instr::I32Const(v) => {
                        self.sink.emit_instr("i32.const");
                        value_stack.push(Value::I32(*v));
                    }
                    Instr::I64Const(v) => {
                        self.sink.emit_instr("i64.const");
                        value_stack.push(Value::I64(*v));
                    }
                    Instr::F32Const(bits) => {
                        self.sink.emit_instr("f32.const");
                        value_stack.push(Value::F32(f32::from_bits(*bits)));
                    }
                    Instr::F64Const(bits) => {
                        self.sink.emit_instr("f64.const");
                        value_stack.push(Value::F64(f64::from_bits(*bits)));
                    }

                    Instr::I32Eqz => {
                        self.sink.emit_instr("i32.eqz");
                        un_i32!(|a| (a == 0) as i32);
                    }
                    Instr::I32Eq => monitored_cmp_i32!(CompareOp::I32Eq, |a, b| a == b),
                    Instr::I32Ne => monitored_cmp_i32!(CompareOp::I32Ne, |a, b| a != b),
                    Instr::I32LtS => {
                        self.sink.emit_instr("i32.lt_s");
                        cmp_i32!(|a, b| a < b);
                    }
                    Instr::I32LtU => {
                        self.sink.emit_instr("i32.lt_u");
                        cmp_i32!(|a, b| (a as u32) < (b as u32));
                    }
                    Instr::I32GtS => {
                        self.sink.emit_instr("i32.gt_s");
                        cmp_i32!(|a, b| a > b);
                    }
                    Instr::I32GtU => {
                        self.sink.emit_instr("i32.gt_u");
                        cmp_i32!(|a, b| (a as u32) > (b as u32));
                    }
                    Instr::I32LeS => {
                        self.sink.emit_instr("i32.le_s");
                        cmp_i32!(|a, b| a <= b);
                    }
                    Instr::I32LeU => {
                        self.sink.emit_instr("i32.le_u");
                        cmp_i32!(|a, b| (a as u32) <= (b as u32));
                    }
                    Instr::I32GeS => {
                        self.sink.emit_instr("i32.ge_s");
                        cmp_i32!(|a, b| a >= b);
                    }
                    Instr::I32GeU => {
                        self.sink.emit_instr("i32.ge_u");
                        cmp_i32!(|a, b| (a as u32) >= (b as u32));
                    }
                    Instr::I64Eqz => {
                        self.sink.emit_instr("i64.eqz");
                        let a = pop_i64!();
                        value_stack.push(Value::I32((a == 0) as i32));
                    }
                    Instr::I64Eq => monitored_cmp_i64!(CompareOp::I64Eq, |a, b| a == b),
                    Instr::I64Ne => monitored_cmp_i64!(CompareOp::I64Ne, |a, b| a != b),
                    Instr::I64LtS => {
                        self.sink.emit_instr("i64.lt_s");
                        cmp_i64!(|a, b| a < b);
                    }
                    Instr::I64LtU => {
                        self.sink.emit_instr("i64.lt_u");
                        cmp_i64!(|a, b| (a as u64) < (b as u64));
                    }
                    Instr::I64GtS => {
                        self.sink.emit_instr("i64.gt_s");
                        cmp_i64!(|a, b| a > b);
                    }
                    Instr::I64GtU => {
                        self.sink.emit_instr("i64.gt_u");
                        cmp_i64!(|a, b| (a as u64) > (b as u64));
                    }
                    Instr::I64LeS => {
                        self.sink.emit_instr("i64.le_s");
                        cmp_i64!(|a, b| a <= b);
                    }
                    Instr::I64LeU => {
                        self.sink.emit_instr("i64.le_u");
                        cmp_i64!(|a, b| (a as u64) <= (b as u64));
                    }
                    Instr::I64GeS => {
                        self.sink.emit_instr("i64.ge_s");
                        cmp_i64!(|a, b| a >= b);
                    }
                    Instr::I64GeU => {
                        self.sink.emit_instr("i64.ge_u");
                        cmp_i64!(|a, b| (a as u64) >= (b as u64));
                    }
                    Instr::F32Eq => {
                        self.sink.emit_instr("f32.eq");
                        cmp_f32!(|a, b| a == b);
                    }
                    Instr::F32Ne => {
                        self.sink.emit_instr("f32.ne");
                        cmp_f32!(|a, b| a != b);
                    }
                    Instr::F32Lt => {
                        self.sink.emit_instr("f32.lt");
                        cmp_f32!(|a, b| a < b);
                    }
                    Instr::F32Gt => {
                        self.sink.emit_instr("f32.gt");
                        cmp_f32!(|a, b| a > b);
                    }
                    Instr::F32Le => {
                        self.sink.emit_instr("f32.le");
                        cmp_f32!(|a, b| a <= b);
                    }
                    Instr::F32Ge => {
                        self.sink.emit_instr("f32.ge");
                        cmp_f32!(|a, b| a >= b);
                    }
                    Instr::F64Eq => {
                        self.sink.emit_instr("f64.eq");
                        cmp_f64!(|a, b| a == b);
                    }
                    Instr::F64Ne => {
                        self.sink.emit_instr("f64.ne");
                        cmp_f64!(|a, b| a != b);
                    }
                    Instr::F64Lt => {
                        self.sink.emit_instr("f64.lt");
                        cmp_f64!(|a, b| a < b);
                    }
                    Instr::F64Gt => {
                        self.sink.emit_instr("f64.gt");
                        cmp_f64!(|a, b| a > b);
                    }
                    Instr::F64Le => {
                        self.sink.emit_instr("f64.le");
                        cmp_f64!(|a, b| a <= b);
                    }
                    Instr::F64Ge => {
                        self.sink.emit_instr("f64.ge");
                        cmp_f64!(|a, b| a >= b);
                    }

                    Instr::I32Clz => {
                        self.sink.emit_instr("i32.clz");
                        un_i32!(|a| a.leading_zeros() as i32);
                    }
                    Instr::I32Ctz => {
                        self.sink.emit_instr("i32.ctz");
                        un_i32!(|a| a.trailing_zeros() as i32);
                    }
                    Instr::I32Popcnt => {
                        self.sink.emit_instr("i32.popcnt");
                        un_i32!(|a| a.count_ones() as i32);
                    }
                    Instr::I32Add => {
                        self.sink.emit_instr("i32.add");
                        bin_i32!(|a, b| a.wrapping_add(b));
                    }
                    Instr::I32Sub => {
                        self.sink.emit_instr("i32.sub");
                        bin_i32!(|a, b| a.wrapping_sub(b));
                    }
                    Instr::I32Mul => {
                        self.sink.emit_instr("i32.mul");
                        bin_i32!(|a, b| a.wrapping_mul(b));
                    }
                    Instr::I32DivS => {
                        self.sink.emit_instr("i32.div_s");
                        let b = pop_i32!();
                        let a = pop_i32!();
                        if b == 0 {
                            return trap(Trap::DivideByZero);
                        }
                        if a == i32::MIN && b == -1 {
                            return trap(Trap::IntegerOverflow);
                        }
                        value_stack.push(Value::I32(a.wrapping_div(b)));
                    }
                    Instr::I32DivU => {
                        self.sink.emit_instr("i32.div_u");
                        let b = pop_i32!();
                        let a = pop_i32!();
                        if b == 0 {
                            return trap(Trap::DivideByZero);
                        }
                        value_stack.push(Value::I32(((a as u32) / (b as u32)) as i32));
                    }
                    Instr::I32RemS => {
                        self.sink.emit_instr("i32.rem_s");
                        let b = pop_i32!();
                        let a = pop_i32!();
                        if b == 0 {
                            return trap(Trap::DivideByZero);
                        }
                        value_stack.push(Value::I32(a.wrapping_rem(b)));
                    }
                    Instr::I32RemU => {
                        self.sink.emit_instr("i32.rem_u");
                        let b = pop_i32!();
                        let a = pop_i32!();
                        if b == 0 {
                            return trap(Trap::DivideByZero);
                        }
                        value_stack.push(Value::I32(((a as u32) % (b as u32)) as i32));
                    }
                    Instr::I32And => {
                        self.sink.emit_instr("i32.and");
                        bin_i32!(|a, b| a & b);
                    }
                    Instr::I32Or => {
                        self.sink.emit_instr("i32.or");
                        bin_i32!(|a, b| a | b);
                    }
                    Instr::I32Xor => {
                        self.sink.emit_instr("i32.xor");
                        bin_i32!(|a, b| a ^ b);
                    }
                    Instr::I32Shl => {
                        self.sink.emit_instr("i32.shl");
                        bin_i32!(|a, b| a.wrapping_shl(b as u32));
                    }
                    Instr::I32ShrS => {
                        self.sink.emit_instr("i32.shr_s");
                        bin_i32!(|a, b| a.wrapping_shr(b as u32));
                    }
                    Instr::I32ShrU => {
                        self.sink.emit_instr("i32.shr_u");
                        bin_i32!(|a, b| ((a as u32).wrapping_shr(b as u32)) as i32);
                    }
                    Instr::I32Rotl => {
                        self.sink.emit_instr("i32.rotl");
                        bin_i32!(|a, b| (a as u32).rotate_left(b as u32 % 32) as i32);
                    }
                    Instr::I32Rotr => {
                        self.sink.emit_instr("i32.rotr");
                        bin_i32!(|a, b| (a as u32).rotate_right(b as u32 % 32) as i32);
                    }
                    Instr::I64Clz => {
                        self.sink.emit_instr("i64.clz");
                        un_i64!(|a| a.leading_zeros() as i64);
                    }
                    Instr::I64Ctz => {
                        self.sink.emit_instr("i64.ctz");
                        un_i64!(|a| a.trailing_zeros() as i64);
                    }
                    Instr::I64Popcnt => {
                        self.sink.emit_instr("i64.popcnt");
                        un_i64!(|a| a.count_ones() as i64);
                    }
                    Instr::I64Add => {
                        self.sink.emit_instr("i64.add");
                        bin_i64!(|a, b| a.wrapping_add(b));
                    }
                    Instr::I64Sub => {
                        self.sink.emit_instr("i64.sub");
                        bin_i64!(|a, b| a.wrapping_sub(b));
                    }
                    Instr::I64Mul => {
                        self.sink.emit_instr("i64.mul");
                        bin_i64!(|a, b| a.wrapping_mul(b));
                    }
                    Instr::I64DivS => {
                        self.sink.emit_instr("i64.div_s");
                        let b = pop_i64!();
                        let a = pop_i64!();
                        if b == 0 {
                            return trap(Trap::DivideByZero);
                        }
                        if a == i64::MIN && b == -1 {
                            return trap(Trap::IntegerOverflow);
                        }
                        value_stack.push(Value::I64(a.wrapping_div(b)));
                    }
                    Instr::I64DivU => {
                        self.sink.emit_instr("i64.div_u");
                        let b = pop_i64!();
                        let a = pop_i64!();
                        if b == 0 {
                            return trap(Trap::DivideByZero);
                        }
                        value_stack.push(Value::I64(((a as u64) / (b as u64)) as i64));
                    }
                    Instr::I64RemS => {
                        self.sink.emit_instr("i64.rem_s");
                        let b = pop_i64!();
                        let a = pop_i64!();
                        if b == 0 {
                            return trap(Trap::DivideByZero);
                        }
                        value_stack.push(Value::I64(a.wrapping_rem(b)));
                    }
                    Instr::I64RemU => {
                        self.sink.emit_instr("i64.rem_u");
                        let b = pop_i64!();
                        let a = pop_i64!();
                        if b == 0 {
                            return trap(Trap::DivideByZero);
                        }
                        value_stack.push(Value::I64(((a as u64) % (b as u64)) as i64));
                    }
                    Instr::I64And => {
                        self.sink.emit_instr("i64.and");
                        bin_i64!(|a, b| a & b);
                    }
                    Instr::I64Or => {
                        self.sink.emit_instr("i64.or");
                        bin_i64!(|a, b| a | b);
                    }
                    Instr::I64Xor => {
                        self.sink.emit_instr("i64.xor");
                        bin_i64!(|a, b| a ^ b);
                    }
                    Instr::I64Shl => {
                        self.sink.emit_instr("i64.shl");
                        bin_i64!(|a, b| a.wrapping_shl(b as u32));
                    }
                    Instr::I64ShrS => {
                        self.sink.emit_instr("i64.shr_s");
                        bin_i64!(|a, b| a.wrapping_shr(b as u32));
                    }
                    Instr::I64ShrU => {
                        self.sink.emit_instr("i64.shr_u");
                        bin_i64!(|a, b| ((a as u64).wrapping_shr(b as u32)) as i64);
                    }
                    Instr::I64Rotl => {
                        self.sink.emit_instr("i64.rotl");
                        bin_i64!(|a, b| (a as u64).rotate_left((b as u64 % 64) as u32) as i64);
                    }
                    Instr::I64Rotr => {
                        self.sink.emit_instr("i64.rotr");
                        bin_i64!(|a, b| (a as u64).rotate_right((b as u64 % 64) as u32) as i64);
                    }

                    Instr::F32Abs => {
                        self.sink.emit_instr("f32.abs");
                        un_f32!(|a| f32::from_bits(a.to_bits() & 0x7fff_ffff));
                    }
                    Instr::F32Neg => {
                        self.sink.emit_instr("f32.neg");
                        un_f32!(|a| f32::from_bits(a.to_bits() ^ 0x8000_0000));
                    }
                    Instr::F32Ceil => {
                        self.sink.emit_instr("f32.ceil");
                        un_f32!(|a| libm::ceilf(a));
                    }
                    Instr::F32Floor => {
                        self.sink.emit_instr("f32.floor");
                        un_f32!(|a| libm::floorf(a));
                    }
                    Instr::F32Trunc => {
                        self.sink.emit_instr("f32.trunc");
                        un_f32!(|a| libm::truncf(a));
                    }
                    Instr::F32Nearest => {
                        self.sink.emit_instr("f32.nearest");
                        un_f32!(|a| libm::rintf(a));
                    }
                    Instr::F32Sqrt => {
                        self.sink.emit_instr("f32.sqrt");
                        un_f32!(|a| libm::sqrtf(a));
                    }
                    Instr::F32Add => {
                        self.sink.emit_instr("f32.add");
                        bin_f32!(|a, b| a + b);
                    }
                    Instr::F32Sub => {
                        self.sink.emit_instr("f32.sub");
                        bin_f32!(|a, b| a - b);
                    }
                    Instr::F32Mul => {
                        self.sink.emit_instr("f32.mul");
                        bin_f32!(|a, b| a * b);
                    }
                    Instr::F32Div => {
                        self.sink.emit_instr("f32.div");
                        bin_f32!(|a, b| a / b);
                    }
                    Instr::F32Min => {
                        self.sink.emit_instr("f32.min");
                        bin_f32!(|a, b| wasm_fmin32(a, b));
                    }
                    Instr::F32Max => {
                        self.sink.emit_instr("f32.max");
                        bin_f32!(|a, b| wasm_fmax32(a, b));
                    }
                    Instr::F32Copysign => {
                        self.sink.emit_instr("f32.copysign");
                        bin_f32!(|a, b| libm::copysignf(a, b));
                    }
                    Instr::F64Abs => {
                        self.sink.emit_instr("f64.abs");
                        un_f64!(|a| f64::from_bits(a.to_bits() & 0x7fff_ffff_ffff_ffff));
                    }
                    Instr::F64Neg => {
                        self.sink.emit_instr("f64.neg");
                        un_f64!(|a| f64::from_bits(a.to_bits() ^ 0x8000_0000_0000_0000));
                    }
                    Instr::F64Ceil => {
                        self.sink.emit_instr("f64.ceil");
                        un_f64!(|a| libm::ceil(a));
                    }
                    Instr::F64Floor => {
                        self.sink.emit_instr("f64.floor");
                        un_f64!(|a| libm::floor(a));
                    }
                    Instr::F64Trunc => {
                        self.sink.emit_instr("f64.trunc");
                        un_f64!(|a| libm::trunc(a));
                    }
                    Instr::F64Nearest => {
                        self.sink.emit_instr("f64.nearest");
                        un_f64!(|a| libm::rint(a));
                    }
                    Instr::F64Sqrt => {
                        self.sink.emit_instr("f64.sqrt");
                        un_f64!(|a| libm::sqrt(a));
                    }
                    Instr::F64Add => {
                        self.sink.emit_instr("f64.add");
                        bin_f64!(|a, b| a + b);
                    }
                    Instr::F64Sub => {
                        self.sink.emit_instr("f64.sub");
                        bin_f64!(|a, b| a - b);
                    }
                    Instr::F64Mul => {
                        self.sink.emit_instr("f64.mul");
                        bin_f64!(|a, b| a * b);
                    }
                    Instr::F64Div => {
                        self.sink.emit_instr("f64.div");
                        bin_f64!(|a, b| a / b);
                    }
                    Instr::F64Min => {
                        self.sink.emit_instr("f64.min");
                        bin_f64!(|a, b| wasm_fmin64(a, b));
                    }
                    Instr::F64Max => {
                        self.sink.emit_instr("f64.max");
                        bin_f64!(|a, b| wasm_fmax64(a, b));
                    }
                    Instr::F64Copysign => {
                        self.sink.emit_instr("f64.copysign");
                        bin_f64!(|a, b| libm::copysign(a, b));
                    }

                    Instr::I32WrapI64 => {
                        self.sink.emit_instr("i32.wrap_i64");
                        let a = pop_i64!();
                        value_stack.push(Value::I32(a as i32));
                    }
                    Instr::I32TruncF32S => {
                        self.sink.emit_instr("i32.trunc_f32_s");
                        let a = pop_f32!();
                        value_stack.push(Value::I32(trunc_f32_to_i32_s(a)?));
                    }
                    Instr::I32TruncF32U => {
                        self.sink.emit_instr("i32.trunc_f32_u");
                        let a = pop_f32!();
                        value_stack.push(Value::I32(trunc_f32_to_u32(a)? as i32));
                    }
                    Instr::I32TruncF64S => {
                        self.sink.emit_instr("i32.trunc_f64_s");
                        let a = pop_f64!();
                        value_stack.push(Value::I32(trunc_f64_to_i32_s(a)?));
                    }
                    Instr::I32TruncF64U => {
                        self.sink.emit_instr("i32.trunc_f64_u");
                        let a = pop_f64!();
                        value_stack.push(Value::I32(trunc_f64_to_u32(a)? as i32));
                    }
                    Instr::I64ExtendI32S => {
                        self.sink.emit_instr("i64.extend_i32_s");
                        let a = pop_i32!();
                        value_stack.push(Value::I64(a as i64));
                    }
                    Instr::I64ExtendI32U => {
                        self.sink.emit_instr("i64.extend_i32_u");
                        let a = pop_i32!();
                        value_stack.push(Value::I64(a as u32 as i64));
                    }
                    Instr::I64TruncF32S => {
                        self.sink.emit_instr("i64.trunc_f32_s");
                        let a = pop_f32!();
                        value_stack.push(Value::I64(trunc_f32_to_i64_s(a)?));
                    }
                    Instr::I64TruncF32U => {
                        self.sink.emit_instr("i64.trunc_f32_u");
                        let a = pop_f32!();
                        value_stack.push(Value::I64(trunc_f32_to_u64(a)? as i64));
                    }
                    Instr::I64TruncF64S => {
                        self.sink.emit_instr("i64.trunc_f64_s");
                        let a = pop_f64!();
                        value_stack.push(Value::I64(trunc_f64_to_i64_s(a)?));
                    }
                    Instr::I64TruncF64U => {
                        self.sink.emit_instr("i64.trunc_f64_u");
                        let a = pop_f64!();
                        value_stack.push(Value::I64(trunc_f64_to_u64(a)? as i64));
                    }
                    Instr::F32ConvertI32S => {
                        self.sink.emit_instr("f32.convert_i32_s");
                        let a = pop_i32!();
                        value_stack.push(Value::F32(a as f32));
                    }
                    Instr::F32ConvertI32U => {
                        self.sink.emit_instr("f32.convert_i32_u");
                        let a = pop_i32!();
                        value_stack.push(Value::F32(a as u32 as f32));
                    }
                    Instr::F32ConvertI64S => {
                        self.sink.emit_instr("f32.convert_i64_s");
                        let a = pop_i64!();
                        value_stack.push(Value::F32(a as f32));
                    }
                    Instr::F32ConvertI64U => {
                        self.sink.emit_instr("f32.convert_i64_u");
                        let a = pop_i64!();
                        value_stack.push(Value::F32(a as u64 as f32));
                    }
                    Instr::F32DemoteF64 => {
                        self.sink.emit_instr("f32.demote_f64");
                        let a = pop_f64!();
                        value_stack.push(Value::F32(a as f32));
                    }
                    Instr::F64ConvertI32S => {
                        self.sink.emit_instr("f64.convert_i32_s");
                        let a = pop_i32!();
                        value_stack.push(Value::F64(a as f64));
                    }
                    Instr::F64ConvertI32U => {
                        self.sink.emit_instr("f64.convert_i32_u");
                        let a = pop_i32!();
                        value_stack.push(Value::F64(a as u32 as f64));
                    }
                    Instr::F64ConvertI64S => {
                        self.sink.emit_instr("f64.convert_i64_s");
                        let a = pop_i64!();
                        value_stack.push(Value::F64(a as f64));
                    }
                    Instr::F64ConvertI64U => {
                        self.sink.emit_instr("f64.convert_i64_u");
                        let a = pop_i64!();
                        value_stack.push(Value::F64(a as u64 as f64));
                    }
                    Instr::F64PromoteF32 => {
                        self.sink.emit_instr("f64.promote_f32");
                        let a = pop_f32!();
                        value_stack.push(Value::F64(a as f64));
                    }
                    Instr::I32ReinterpretF32 => {
                        self.sink.emit_instr("i32.reinterpret_f32");
                        let a = pop_f32!();
                        value_stack.push(Value::I32(a.to_bits() as i32));
                    }
                    Instr::I64ReinterpretF64 => {
                        self.sink.emit_instr("i64.reinterpret_f64");
                        let a = pop_f64!();
                        value_stack.push(Value::I64(a.to_bits() as i64));
                    }
                    Instr::F32ReinterpretI32 => {
                        self.sink.emit_instr("f32.reinterpret_i32");
                        let a = pop_i32!();
                        value_stack.push(Value::F32(f32::from_bits(a as u32)));
                    }
                    Instr::F64ReinterpretI64 => {
                        self.sink.emit_instr("f64.reinterpret_i64");
                        let a = pop_i64!();
                        value_stack.push(Value::F64(f64::from_bits(a as u64)));
                    }
                }
                frame.pc += 1;
            }
        }
    }

    fn mem_read(&self, base: u32, offset: u32, n: usize) -> Run<&[u8]> {
        let start = base as u64 + offset as u64;
        let end = start + n as u64;
        if end > self.instance.memory.len() as u64 {
            return trap(Trap::MemoryOutOfBounds);
        }
        Ok(&self.instance.memory[start as usize..end as usize])
    }

    fn mem_write(&mut self, base: u32, offset: u32, bytes: &[u8]) -> Run<()> {
        let start = base as u64 + offset as u64;
        let end = start + bytes.len() as u64;
        if end > self.instance.memory.len() as u64 {
            return trap(Trap::MemoryOutOfBounds);
        }
        self.instance.memory[start as usize..end as usize].copy_from_slice(bytes);
        Ok(())
    }

    /// Reads the NUL-terminated abort message at `ptr`, clamped for safety.
    fn read_cstr(&self, ptr: u32) -> String {
        let mem = &self.instance.memory;
        let start = ptr as usize;
        if start >= mem.len() {
            return String::new();
        }
        let max_end = (start + 256).min(mem.len());
        let slice = &mem[start..max_end];
        let end = slice.iter().position(|&b| b == 0).unwrap_or(slice.len());
        String::from_utf8_lossy(&slice[..end]).into_owned()
    }

    fn invoke_intrinsic(&mut self, intrinsic: Intrinsic, args: &[Value]) -> Run<Option<Value>> {
        fn arg_i32(args: &[Value], i: usize) -> Run<i32> {
            match args.get(i) {
                Some(Value::I32(v)) => Ok(*v),
                _ => trap(Trap::TypeMismatch),
            }
        }
        fn arg_i64(args: &[Value], i: usize) -> Run<i64> {
            match args.get(i) {
                Some(Value::I64(v)) => Ok(*v),
                _ => trap(Trap::TypeMismatch),
            }
        }
        let summary: Vec<u64> = args
            .iter()
            .map(|v| match v {
                Value::I32(x) => *x as u32 as u64,
                Value::I64(x) => *x as u64,
                Value::F32(x) => x.to_bits() as u64,
                Value::F64(x) => x.to_bits(),
            })
            .collect();

        match intrinsic {
            Intrinsic::ReadActionData => {
                self.sink.emit(TraceKind::HostCall {
                    intrinsic: intrinsic.name(),
                    args: summary,
                });
                let ptr = arg_i32(args, 0)? as u32;
                let len = arg_i32(args, 1)? as u32;
                let payload = self.env.action_payload().to_vec();
                let size = payload.len() as u32;
                if len == 0 {
                    return Ok(Some(Value::I32(size as i32)));
                }
                let copy = size.min(len) as usize;
                self.mem_write(ptr, 0, &payload[..copy])?;
                Ok(Some(Value::I32(copy as i32)))
            }
            Intrinsic::ActionDataSize => {
                self.sink.emit(TraceKind::HostCall {
                    intrinsic: intrinsic.name(),
                    args: summary,
                });
                Ok(Some(Value::I32(self.env.action_payload().len() as i32)))
            }
            Intrinsic::RequireRecipient => {
                self.sink.emit(TraceKind::HostCall {
                    intrinsic: intrinsic.name(),
                    args: summary,
                });
                let who = arg_i64(args, 0)? as u64;
                self.env.require_recipient(who);
                Ok(None)
            }
            Intrinsic::RequireAuth => {
                self.sink.emit(TraceKind::HostCall {
                    intrinsic: intrinsic.name(),
                    args: summary,
                });
                let who = arg_i64(args, 0)? as u64;
                if self.env.is_authorized(who) {
                    Ok(None)
                } else {
                    Err(Stop::Abort(format!(
                        "missing authority of {}",
                        AccountName(who)
                    )))
                }
            }
            Intrinsic::SendInline => {
                self.sink.emit(TraceKind::HostCall {
                    intrinsic: intrinsic.name(),
                    args: summary,
                });
                let ptr = arg_i32(args, 0)? as u32;
                let len = arg_i32(args, 1)? as usize;
                let packed = self.mem_read(ptr, 0, len)?.to_vec();
                self.env.queue_inline(&packed).map_err(Stop::Abort)?;
                Ok(None)
            }
            Intrinsic::EosioAssert => {
                let cond = arg_i32(args, 0)?;
                let msg_ptr = arg_i32(args, 1)? as u32;
                if cond != 0 {
                    self.sink.emit(TraceKind::HostCall {
                        intrinsic: intrinsic.name(),
                        args: summary,
                    });
                    Ok(None)
                } else {
                    let message = self.read_cstr(msg_ptr);
                    self.sink.emit(TraceKind::AssertFired {
                        message: message.clone(),
                    });
                    Err(Stop::Abort(message))
                }
            }
            Intrinsic::CurrentReceiver => {
                self.sink.emit(TraceKind::HostCall {
                    intrinsic: intrinsic.name(),
                    args: summary,
                });
                Ok(Some(Value::I64(self.env.receiver() as i64)))
            }
            Intrinsic::CurrentTime => {
                self.sink.emit(TraceKind::HostCall {
                    intrinsic: intrinsic.name(),
                    args: summary,
                });
                Ok(Some(Value::I64(self.env.current_time() as i64)))
            }
            Intrinsic::TaposBlockNum => {
                self.sink.emit(TraceKind::BlockInfoRead {
                    which: BlockInfoKind::TaposBlockNum,
                });
                Ok(Some(Value::I32(self.env.tapos_block_num() as i32)))
            }
            Intrinsic::TaposBlockPrefix => {
                self.sink.emit(TraceKind::BlockInfoRead {
                    which: BlockInfoKind::TaposBlockPrefix,
                });
                Ok(Some(Value::I32(self.env.tapos_block_prefix() as i32)))
            }
            Intrinsic::Sha256 => {
                self.sink.emit(TraceKind::HostCall {
                    intrinsic: intrinsic.name(),
                    args: summary,
                });
                let data_ptr = arg_i32(args, 0)? as u32;
                let len = arg_i32(args, 1)? as usize;
                let out_ptr = arg_i32(args, 2)? as u32;
                let digest = Sha256::digest(self.mem_read(data_ptr, 0, len)?);
                self.mem_write(out_ptr, 0, &digest)?;
                Ok(None)
            }
            Intrinsic::Memcpy | Intrinsic::Memmove => {
                self.sink.emit(TraceKind::HostCall {
                    intrinsic: intrinsic.name(),
                    args: summary,
                });
                let dst = arg_i32(args, 0)? as u32;
                let src = arg_i32(args, 1)? as u32;
                let len = arg_i32(args, 2)? as usize;
                let data = self.mem_read(src, 0, len)?.to_vec();
                self.mem_write(dst, 0, &data)?;
                Ok(Some(Value::I32(dst as i32)))
            }
            Intrinsic::Memset => {
                self.sink.emit(TraceKind::HostCall {
                    intrinsic: intrinsic.name(),
                    args: summary,
                });
                let dst = arg_i32(args, 0)? as u32;
                let val = arg_i32(args, 1)? as u8;
                let len = arg_i32(args, 2)? as usize;
                let fill = vec![val; len];
                self.mem_write(dst, 0, &fill)?;
                Ok(Some(Value::I32(dst as i32)))
            }
        }
    }
}

// wasm min/max: NaN on any NaN input, and -0 orders below +0.
fn wasm_fmin32(a: f32, b: f32) -> f32 {
    if a.is_nan() || b.is_nan() {
        f32::NAN
    } else if a == 0.0 && b == 0.0 {
        if a.is_sign_negative() || b.is_sign_negative() {
            -0.0
        } else {
            0.0
        }
    } else if a < b {
        a
    } else {
        b
    }
}

fn wasm_fmax32(a: f32, b: f32) -> f32 {
    if a.is_nan() || b.is_nan() {
        f32::NAN
    } else if a == 0.0 && b == 0.0 {
        if a.is_sign_positive() || b.is_sign_positive() {
            0.0
        } else {
            -0.0
        }
    } else if a > b {
        a
    } else {
        b
    }
}

fn wasm_fmin64(a: f64, b: f64) -> f64 {
    if a.is_nan() || b.is_nan() {
        f64::NAN
    } else if a == 0.0 && b == 0.0 {
        if a.is_sign_negative() || b.is_sign_negative() {
            -0.0
        } else {
            0.0
        }
    } else if a < b {
        a
    } else {
        b
    }
}

fn wasm_fmax64(a: f64, b: f64) -> f64 {
    if a.is_nan() || b.is_nan() {
        f64::NAN
    } else if a == 0.0 && b == 0.0 {
        if a.is_sign_positive() || b.is_sign_positive() {
            0.0
        } else {
            -0.0
        }
    } else if a > b {
        a
    } else {
        b
    }
}

fn trunc_f32_to_i32_s(x: f32) -> Run<i32> {
    if x.is_nan() {
        return trap(Trap::InvalidConversion);
    }
    if !(-2_147_483_648.0f32..2_147_483_648.0f32).contains(&x) {
        return trap(Trap::IntegerOverflow);
    }
    Ok(x as i32)
}

fn trunc_f32_to_u32(x: f32) -> Run<u32> {
    if x.is_nan() {
        return trap(Trap::InvalidConversion);
    }
    if x >= 4_294_967_296.0f32 || x <= -1.0f32 {
        return trap(Trap::IntegerOverflow);
    }
    Ok(x as u32)
}

fn trunc_f64_to_i32_s(x: f64) -> Run<i32> {
    if x.is_nan() {
        return trap(Trap::InvalidConversion);
    }
    if x >= 2_147_483_648.0 || x <= -2_147_483_649.0 {
        return trap(Trap::IntegerOverflow);
    }
    Ok(x as i32)
}

fn trunc_f64_to_u32(x: f64) -> Run<u32> {
    if x.is_nan() {
        return trap(Trap::InvalidConversion);
    }
    if x >= 4_294_967_296.0 || x <= -1.0 {
        return trap(Trap::IntegerOverflow);
    }
    Ok(x as u32)
}

fn trunc_f32_to_i64_s(x: f32) -> Run<i64> {
    if x.is_nan() {
        return trap(Trap::InvalidConversion);
    }
    if !(-9_223_372_036_854_775_808.0f32..9_223_372_036_854_775_808.0f32).contains(&x) {
        return trap(Trap::IntegerOverflow);
    }
    Ok(x as i64)
}

fn trunc_f32_to_u64(x: f32) -> Run<u64> {
    if x.is_nan() {
        return trap(Trap::InvalidConversion);
    }
    if x >= 18_446_744_073_709_551_616.0f32 || x <= -1.0f32 {
        return trap(Trap::IntegerOverflow);
    }
    Ok(x as u64)
}

fn trunc_f64_to_i64_s(x: f64) -> Run<i64> {
    if x.is_nan() {
        return trap(Trap::InvalidConversion);
    }
    if !(-9_223_372_036_854_775_808.0..9_223_372_036_854_775_808.0).contains(&x) {
        return trap(Trap::IntegerOverflow);
    }
    Ok(x as i64)
}

fn trunc_f64_to_u64(x: f64) -> Run<u64> {
    if x.is_nan() {
        return trap(Trap::InvalidConversion);
    }
    if x >= 18_446_744_073_709_551_616.0 || x <= -1.0 {
        return trap(Trap::IntegerOverflow);
    }
    Ok(x as u64)
}
