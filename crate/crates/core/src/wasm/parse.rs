//! WASM binary format reader (MVP).
//!
//! Decodes the type, import, function, table, memory, global, export, start,
//! element, code, and data sections. Custom sections are skipped. Anything
//! from a later proposal (SIMD, threads, bulk memory, sign extension,
//! reference types, multi-value) is reported as an unsupported feature rather
//! than a malformed module.

use super::instr::Instr;
use super::{
    ConstExpr, DataSegment, ElementSegment, Export, ExportKind, FuncType, FunctionBody, GlobalDef,
    Import, MemoryType, Module, TableType, ValType,
};
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

const MAGIC: [u8; 4] = [0x00, 0x61, 0x73, 0x6d];
const VERSION: u32 = 1;
const MAX_LOCALS: u64 = 65_536;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WasmParseError {
    /// Input does not begin with `\0asm`.
    BadMagic,
    BadVersion(u32),
    UnexpectedEof,
    UnknownSectionId(u8),
    SectionOutOfOrder(u8),
    UnknownOpcode(u8),
    /// Valid wasm from a proposal this interpreter does not implement.
    UnsupportedFeature(&'static str),
    Malformed(&'static str),
}

impl fmt::Display for WasmParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WasmParseError::BadMagic => write!(f, "missing wasm magic bytes"),
            WasmParseError::BadVersion(v) => write!(f, "unsupported wasm version {v}"),
            WasmParseError::UnexpectedEof => write!(f, "unexpected end of input"),
            WasmParseError::UnknownSectionId(id) => write!(f, "unknown section id {id}"),
            WasmParseError::SectionOutOfOrder(id) => write!(f, "section {id} out of order"),
            WasmParseError::UnknownOpcode(op) => write!(f, "unknown opcode 0x{op:02x}"),
            WasmParseError::UnsupportedFeature(what) => write!(f, "unsupported feature: {what}"),
            WasmParseError::Malformed(what) => write!(f, "malformed module: {what}"),
        }
    }
}

impl core::error::Error for WasmParseError {}

type Result<T> = core::result::Result<T, WasmParseError>;

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn new(bytes: &'a [u8]) -> Reader<'a> {
        Reader { bytes, pos: 0 }
    }

    fn done(&self) -> bool {
        self.pos >= self.bytes.len()
    }

    fn u8(&mut self) -> Result<u8> {
        let b = *self
            .bytes
            .get(self.pos)
            .ok_or(WasmParseError::UnexpectedEof)?;
        self.pos += 1;
        Ok(b)
    }

    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self
            .pos
            .checked_add(n)
            .ok_or(WasmParseError::UnexpectedEof)?;
        if end > self.bytes.len() {
            return Err(WasmParseError::UnexpectedEof);
        }
        let s = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn leb_u32(&mut self) -> Result<u32> {
        let mut result: u32 = 0;
        for i in 0..5 {
            let byte = self.u8()?;
            let bits = (byte & 0x7f) as u32;
            if i == 4 && bits > 0x0f {
                return Err(WasmParseError::Malformed("overlong u32 leb"));
            }
            result |= bits << (7 * i);
            if byte & 0x80 == 0 {
                return Ok(result);
            }
        }
        Err(WasmParseError::Malformed("overlong u32 leb"))
    }

    fn leb_i32(&mut self) -> Result<i32> {
        Ok(self.leb_signed(32)? as i32)
    }

    fn leb_i64(&mut self) -> Result<i64> {
        self.leb_signed(64)
    }

    fn leb_signed(&mut self, bits: u32) -> Result<i64> {
        let mut result: i64 = 0;
        let mut shift = 0;
        let max_bytes = bits.div_ceil(7);
        for _ in 0..max_bytes {
            let byte = self.u8()?;
            result |= ((byte & 0x7f) as i64) << shift;
            shift += 7;
            if byte & 0x80 == 0 {
                if shift < bits && byte & 0x40 != 0 {
                    result |= -1i64 << shift;
                }
                // Mask to width, then sign-extend.
                if bits < 64 {
                    let m = 64 - bits;
                    result = (result << m) >> m;
                }
                return Ok(result);
            }
        }
        Err(WasmParseError::Malformed("overlong signed leb"))
    }

    fn name(&mut self) -> Result<String> {
        let len = self.leb_u32()? as usize;
        let raw = self.take(len)?;
        core::str::from_utf8(raw)
            .map(String::from)
            .map_err(|_| WasmParseError::Malformed("name is not UTF-8"))
    }

    fn valtype(&mut self) -> Result<ValType> {
        match self.u8()? {
            0x7f => Ok(ValType::I32),
            0x7e => Ok(ValType::I64),
            0x7d => Ok(ValType::F32),
            0x7c => Ok(ValType::F64),
            0x7b => Err(WasmParseError::UnsupportedFeature("v128 value type")),
            0x70 | 0x6f => Err(WasmParseError::UnsupportedFeature("reference value type")),
            _ => Err(WasmParseError::Malformed("invalid value type")),
        }
    }

    fn limits(&mut self) -> Result<(u32, Option<u32>)> {
        match self.u8()? {
            0x00 => Ok((self.leb_u32()?, None)),
            0x01 => {
                let min = self.leb_u32()?;
                let max = self.leb_u32()?;
                Ok((min, Some(max)))
            }
            0x03 => Err(WasmParseError::UnsupportedFeature("shared memory")),
            _ => Err(WasmParseError::Malformed("invalid limits flag")),
        }
    }

    fn const_expr(&mut self) -> Result<ConstExpr> {
        let value = match self.u8()? {
            0x41 => ConstExpr::I32(self.leb_i32()?),
            0x42 => ConstExpr::I64(self.leb_i64()?),
            0x43 => ConstExpr::F32(u32::from_le_bytes(self.take(4)?.try_into().unwrap())),
            0x44 => ConstExpr::F64(u64::from_le_bytes(self.take(8)?.try_into().unwrap())),
            0x23 => {
                return Err(WasmParseError::UnsupportedFeature(
                    "global.get initializer expression",
                ))
            }
            _ => return Err(WasmParseError::Malformed("invalid initializer expression")),
        };
        if self.u8()? != 0x0b {
            return Err(WasmParseError::Malformed("unterminated initializer"));
        }
        Ok(value)
    }
}

/// Parses a binary module. Function bodies are fully decoded; branch targets
/// are resolved during decoding.
pub fn parse_wasm(bytes: &[u8]) -> Result<Module> {
    let mut r = Reader::new(bytes);
    if r.take(4)? != MAGIC {
        return Err(WasmParseError::BadMagic);
    }
    let version = u32::from_le_bytes(r.take(4)?.try_into().unwrap());
    if version != VERSION {
        return Err(WasmParseError::BadVersion(version));
    }

    let mut module = Module::default();
    let mut declared_funcs: Vec<u32> = Vec::new();
    let mut bodies: Vec<FunctionBody> = Vec::new();
    let mut last_section = 0u8;

    while !r.done() {
        let id = r.u8()?;
        let size = r.leb_u32()? as usize;
        let payload = r.take(size)?;
        let mut s = Reader::new(payload);
        if id != 0 {
            if id == 12 {
                return Err(WasmParseError::UnsupportedFeature("data count section"));
            }
            if id > 11 {
                return Err(WasmParseError::UnknownSectionId(id));
            }
            if id <= last_section {
                return Err(WasmParseError::SectionOutOfOrder(id));
            }
            last_section = id;
        }
        match id {
            0 => continue, // custom section: skipped
            1 => {
                let count = s.leb_u32()?;
                for _ in 0..count {
                    if s.u8()? != 0x60 {
                        return Err(WasmParseError::Malformed("invalid functype tag"));
                    }
                    let nparams = s.leb_u32()?;
                    let mut params = Vec::new();
                    for _ in 0..nparams {
                        params.push(s.valtype()?);
                    }
                    let nresults = s.leb_u32()?;
                    if nresults > 1 {
                        return Err(WasmParseError::UnsupportedFeature("multi-value results"));
                    }
                    let mut results = Vec::new();
                    for _ in 0..nresults {
                        results.push(s.valtype()?);
                    }
                    module.types.push(FuncType { params, results });
                }
            }
            2 => {
                let count = s.leb_u32()?;
                for _ in 0..count {
                    let mod_name = s.name()?;
                    let field = s.name()?;
                    match s.u8()? {
                        0x00 => {
                            let type_idx = s.leb_u32()?;
                            if type_idx as usize >= module.types.len() {
                                return Err(WasmParseError::Malformed("import type out of range"));
                            }
                            module.imports.push(Import {
                                module: mod_name,
                                name: field,
                                type_idx,
                            });
                        }
                        _ => return Err(WasmParseError::UnsupportedFeature("non-function import")),
                    }
                }
            }
            3 => {
                let count = s.leb_u32()?;
                for _ in 0..count {
                    let type_idx = s.leb_u32()?;
                    if type_idx as usize >= module.types.len() {
                        return Err(WasmParseError::Malformed("function type out of range"));
                    }
                    declared_funcs.push(type_idx);
                }
            }
            4 => {
                let count = s.leb_u32()?;
                if count > 1 {
                    return Err(WasmParseError::UnsupportedFeature("multiple tables"));
                }
                for _ in 0..count {
                    if s.u8()? != 0x70 {
                        return Err(WasmParseError::Malformed("table element type"));
                    }
                    let (min, max) = s.limits()?;
                    module.tables.push(TableType { min, max });
                }
            }
            5 => {
                let count = s.leb_u32()?;
                if count > 1 {
                    return Err(WasmParseError::UnsupportedFeature("multiple memories"));
                }
                for _ in 0..count {
                    let (min_pages, max_pages) = s.limits()?;
                    module.memories.push(MemoryType {
                        min_pages,
                        max_pages,
                    });
                }
            }
            6 => {
                let count = s.leb_u32()?;
                for _ in 0..count {
                    let ty = s.valtype()?;
                    let mutable = match s.u8()? {
                        0x00 => false,
                        0x01 => true,
                        _ => return Err(WasmParseError::Malformed("invalid global mutability")),
                    };
                    let init = s.const_expr()?;
                    module.globals.push(GlobalDef { ty, mutable, init });
                }
            }
            7 => {
                let count = s.leb_u32()?;
                for _ in 0..count {
                    let name = s.name()?;
                    let kind = match s.u8()? {
                        0x00 => ExportKind::Func,
                        0x01 => ExportKind::Table,
                        0x02 => ExportKind::Memory,
                        0x03 => ExportKind::Global,
                        _ => return Err(WasmParseError::Malformed("invalid export kind")),
                    };
                    let index = s.leb_u32()?;
                    module.exports.push(Export { name, kind, index });
                }
            }
            8 => {
                module.start = Some(s.leb_u32()?);
            }
            9 => {
                let count = s.leb_u32()?;
                for _ in 0..count {
                    if s.leb_u32()? != 0 {
                        return Err(WasmParseError::Malformed("element table index"));
                    }
                    let offset = match s.const_expr()? {
                        ConstExpr::I32(v) => v as u32,
                        _ => return Err(WasmParseError::Malformed("non-i32 element offset")),
                    };
                    let n = s.leb_u32()?;
                    let mut funcs = Vec::new();
                    for _ in 0..n {
                        funcs.push(s.leb_u32()?);
                    }
                    module.elements.push(ElementSegment { offset, funcs });
                }
            }
            10 => {
                let count = s.leb_u32()?;
                for _ in 0..count {
                    let body_size = s.leb_u32()? as usize;
                    let body_bytes = s.take(body_size)?;
                    let mut b = Reader::new(body_bytes);
                    let mut locals = Vec::new();
                    let local_groups = b.leb_u32()?;
                    let mut total: u64 = 0;
                    for _ in 0..local_groups {
                        let n = b.leb_u32()?;
                        let ty = b.valtype()?;
                        total += n as u64;
                        if total > MAX_LOCALS {
                            return Err(WasmParseError::Malformed("too many locals"));
                        }
                        for _ in 0..n {
                            locals.push(ty);
                        }
                    }
                    let (code, uses_float) = decode_instrs(&mut b)?;
                    if !b.done() {
                        return Err(WasmParseError::Malformed("trailing bytes in body"));
                    }
                    bodies.push(FunctionBody {
                        type_idx: 0, // patched below
                        locals,
                        code,
                        uses_float,
                    });
                }
            }
            11 => {
                let count = s.leb_u32()?;
                for _ in 0..count {
                    if s.leb_u32()? != 0 {
                        return Err(WasmParseError::Malformed("data memory index"));
                    }
                    let offset = match s.const_expr()? {
                        ConstExpr::I32(v) => v as u32,
                        _ => return Err(WasmParseError::Malformed("non-i32 data offset")),
                    };
                    let len = s.leb_u32()? as usize;
                    let bytes = s.take(len)?.to_vec();
                    module.data_segments.push(DataSegment { offset, bytes });
                }
            }
            _ => unreachable!("section id already range-checked"),
        }
        if !s.done() {
            return Err(WasmParseError::Malformed("trailing bytes in section"));
        }
    }

    if declared_funcs.len() != bodies.len() {
        return Err(WasmParseError::Malformed("function/code count mismatch"));
    }
    for (body, type_idx) in bodies.iter_mut().zip(&declared_funcs) {
        body.type_idx = *type_idx;
    }
    module.functions = bodies;
    Ok(module)
}

enum Frame {
    Block(u32),
    Loop,
    If { pc: u32, else_pc: Option<u32> },
}

fn block_arity(r: &mut Reader) -> Result<u8> {
    match r.u8()? {
        0x40 => Ok(0),
        0x7c..=0x7f => Ok(1),
        0x7b => Err(WasmParseError::UnsupportedFeature("v128 block type")),
        _ => Err(WasmParseError::UnsupportedFeature("typed block signature")),
    }
}

fn memarg(r: &mut Reader) -> Result<u32> {
    let _align = r.leb_u32()?;
    r.leb_u32()
}

/// Decodes one body expression, resolving structured-control jump targets.
fn decode_instrs(r: &mut Reader) -> Result<(Vec<Instr>, bool)> {
    let mut code: Vec<Instr> = Vec::new();
    let mut frames: Vec<Frame> = Vec::new();
    let mut uses_float = false;

    loop {
        let pc = code.len() as u32;
        let op = r.u8()?;
        let instr = match op {
            0x00 => Instr::Unreachable,
            0x01 => Instr::Nop,
            0x02 => {
                let arity = block_arity(r)?;
                frames.push(Frame::Block(pc));
                Instr::Block { end_pc: 0, arity }
            }
            0x03 => {
                let _arity = block_arity(r)?;
                frames.push(Frame::Loop);
                Instr::Loop { start_pc: pc + 1 }
            }
            0x04 => {
                let arity = block_arity(r)?;
                frames.push(Frame::If { pc, else_pc: None });
                Instr::If {
                    else_pc: 0,
                    end_pc: 0,
                    arity,
                }
            }
            0x05 => {
                match frames.last_mut() {
                    Some(Frame::If { else_pc, .. }) if else_pc.is_none() => {
                        *else_pc = Some(pc);
                    }
                    _ => return Err(WasmParseError::Malformed("else without if")),
                }
                Instr::Else { end_pc: 0 }
            }
            0x0b => {
                code.push(Instr::End);
                match frames.pop() {
                    Some(Frame::Block(block_pc)) => {
                        if let Instr::Block { end_pc, .. } = &mut code[block_pc as usize] {
                            *end_pc = pc;
                        }
                        continue;
                    }
                    Some(Frame::Loop) => continue,
                    Some(Frame::If { pc: if_pc, else_pc }) => {
                        if let Some(else_at) = else_pc {
                            if let Instr::Else { end_pc } = &mut code[else_at as usize] {
                                *end_pc = pc;
                            }
                        }
                        if let Instr::If {
                            else_pc: target,
                            end_pc,
                            ..
                        } = &mut code[if_pc as usize]
                        {
                            *target = else_pc.map(|e| e + 1).unwrap_or(pc);
                            *end_pc = pc;
                        }
                        continue;
                    }
                    None => break, // function-level end
                }
            }
            0x0c => Instr::Br {
                depth: r.leb_u32()?,
            },
            0x0d => Instr::BrIf {
                depth: r.leb_u32()?,
            },
            0x0e => {
                let n = r.leb_u32()?;
                let mut targets = Vec::new();
                for _ in 0..n {
                    targets.push(r.leb_u32()?);
                }
                let default = r.leb_u32()?;
                Instr::BrTable {
                    targets: targets.into_boxed_slice(),
                    default,
                }
            }
            0x0f => Instr::Return,
            0x10 => Instr::Call { func: r.leb_u32()? },
            0x11 => {
                let type_idx = r.leb_u32()?;
                if r.u8()? != 0x00 {
                    return Err(WasmParseError::Malformed("call_indirect table index"));
                }
                Instr::CallIndirect { type_idx }
            }
            0x1a => Instr::Drop,
            0x1b => Instr::Select,
            0x1c => return Err(WasmParseError::UnsupportedFeature("typed select")),
            0x20 => Instr::LocalGet(r.leb_u32()?),
            0x21 => Instr::LocalSet(r.leb_u32()?),
            0x22 => Instr::LocalTee(r.leb_u32()?),
            0x23 => Instr::GlobalGet(r.leb_u32()?),
            0x24 => Instr::GlobalSet(r.leb_u32()?),
            0x28 => Instr::I32Load(memarg(r)?),
            0x29 => Instr::I64Load(memarg(r)?),
            0x2a => Instr::F32Load(memarg(r)?),
            0x2b => Instr::F64Load(memarg(r)?),
            0x2c => Instr::I32Load8S(memarg(r)?),
            0x2d => Instr::I32Load8U(memarg(r)?),
            0x2e => Instr::I32Load16S(memarg(r)?),
            0x2f => Instr::I32Load16U(memarg(r)?),
            0x30 => Instr::I64Load8S(memarg(r)?),
            0x31 => Instr::I64Load8U(memarg(r)?),
            0x32 => Instr::I64Load16S(memarg(r)?),
            0x33 => Instr::I64Load16U(memarg(r)?),
            0x34 => Instr::I64Load32S(memarg(r)?),
            0x35 => Instr::I64Load32U(memarg(r)?),
            0x36 => Instr::I32Store(memarg(r)?),
            0x37 => Instr::I64Store(memarg(r)?),
            0x38 => Instr::F32Store(memarg(r)?),
            0x39 => Instr::F64Store(memarg(r)?),
            0x3a => Instr::I32Store8(memarg(r)?),
            0x3b => Instr::I32Store16(memarg(r)?),
            0x3c => Instr::I64Store8(memarg(r)?),
            0x3d => Instr::I64Store16(memarg(r)?),
            0x3e => Instr::I64Store32(memarg(r)?),
            0x3f => {
                if r.u8()? != 0x00 {
                    return Err(WasmParseError::Malformed("memory.size index"));
                }
                Instr::MemorySize
            }
            0x40 => {
                if r.u8()? != 0x00 {
                    return Err(WasmParseError::Malformed("memory.grow index"));
                }
                Instr::MemoryGrow
            }
            0x41 => Instr::I32Const(r.leb_i32()?),
            0x42 => Instr::I64Const(r.leb_i64()?),
            0x43 => Instr::F32Const(u32::from_le_bytes(r.take(4)?.try_into().unwrap())),
            0x44 => Instr::F64Const(u64::from_le_bytes(r.take(8)?.try_into().unwrap())),
            0x45 => Instr::I32Eqz,
            0x46 => Instr::I32Eq,
            0x47 => Instr::I32Ne,
            0x48 => Instr::I32LtS,
            0x49 => Instr::I32LtU,
            0x4a => Instr::I32GtS,
            0x4b => Instr::I32GtU,
            0x4c => Instr::I32LeS,
            0x4d => Instr::I32LeU,
            0x4e => Instr::I32GeS,
            0x4f => Instr::I32GeU,
            0x50 => Instr::I64Eqz,
            0x51 => Instr::I64Eq,
            0x52 => Instr::I64Ne,
            0x53 => Instr::I64LtS,
            0x54 => Instr::I64LtU,
            0x55 => Instr::I64GtS,
            0x56 => Instr::I64GtU,
            0x57 => Instr::I64LeS,
            0x58 => Instr::I64LeU,
            0x59 => Instr::I64GeS,
            0x5a => Instr::I64GeU,
            0x5b => Instr::F32Eq,
            0x5c => Instr::F32Ne,
            0x5d => Instr::F32Lt,
            0x5e => Instr::F32Gt,
            0x5f => Instr::F32Le,
            0x60 => Instr::F32Ge,
            0x61 => Instr::F64Eq,
            0x62 => Instr::F64Ne,
            0x63 => Instr::F64Lt,
            0x64 => Instr::F64Gt,
            0x65 => Instr::F64Le,
            0x66 => Instr::F64Ge,
            0x67 => Instr::I32Clz,
            0x68 => Instr::I32Ctz,
            0x69 => Instr::I32Popcnt,
            0x6a => Instr::I32Add,
            0x6b => Instr::I32Sub,
            0x6c => Instr::I32Mul,
            0x6d => Instr::I32DivS,
            0x6e => Instr::I32DivU,
            0x6f => Instr::I32RemS,
            0x70 => Instr::I32RemU,
            0x71 => Instr::I32And,
            0x72 => Instr::I32Or,
            0x73 => Instr::I32Xor,
            0x74 => Instr::I32Shl,
            0x75 => Instr::I32ShrS,
            0x76 => Instr::I32ShrU,
            0x77 => Instr::I32Rotl,
            0x78 => Instr::I32Rotr,
            0x79 => Instr::I64Clz,
            0x7a => Instr::I64Ctz,
            0x7b => Instr::I64Popcnt,
            0x7c => Instr::I64Add,
            0x7d => Instr::I64Sub,
            0x7e => Instr::I64Mul,
            0x7f => Instr::I64DivS,
            0x80 => Instr::I64DivU,
            0x81 => Instr::I64RemS,
            0x82 => Instr::I64RemU,
            0x83 => Instr::I64And,
            0x84 => Instr::I64Or,
            0x85 => Instr::I64Xor,
            0x86 => Instr::I64Shl,
            0x87 => Instr::I64ShrS,
            0x88 => Instr::I64ShrU,
            0x89 => Instr::I64Rotl,
            0x8a => Instr::I64Rotr,
            0x8b => Instr::F32Abs,
            0x8c => Instr::F32Neg,
            0x8d => Instr::F32Ceil,
            0x8e => Instr::F32Floor,
            0x8f => Instr::F32Trunc,
            0x90 => Instr::F32Nearest,
            0x91 => Instr::F32Sqrt,
            0x92 => Instr::F32Add,
            0x93 => Instr::F32Sub,
            0x94 => Instr::F32Mul,
            0x95 => Instr::F32Div,
            0x96 => Instr::F32Min,
            0x97 => Instr::F32Max,
            0x98 => Instr::F32Copysign,
            0x99 => Instr::F64Abs,
            0x9a => Instr::F64Neg,
            0x9b => Instr::F64Ceil,
            0x9c => Instr::F64Floor,
            0x9d => Instr::F64Trunc,
            0x9e => Instr::F64Nearest,
            0x9f => Instr::F64Sqrt,
            0xa0 => Instr::F64Add,
            0xa1 => Instr::F64Sub,
            0xa2 => Instr::F64Mul,
            0xa3 => Instr::F64Div,
            0xa4 => Instr::F64Min,
            0xa5 => Instr::F64Max,
            0xa6 => Instr::F64Copysign,
            0xa7 => Instr::I32WrapI64,
            0xa8 => Instr::I32TruncF32S,
            0xa9 => Instr::I32TruncF32U,
            0xaa => Instr::I32TruncF64S,
            0xab => Instr::I32TruncF64U,
            0xac => Instr::I64ExtendI32S,
            0xad => Instr::I64ExtendI32U,
            0xae => Instr::I64TruncF32S,
            0xaf => Instr::I64TruncF32U,
            0xb0 => Instr::I64TruncF64S,
            0xb1 => Instr::I64TruncF64U,
            0xb2 => Instr::F32ConvertI32S,
            0xb3 => Instr::F32ConvertI32U,
            0xb4 => Instr::F32ConvertI64S,
            0xb5 => Instr::F32ConvertI64U,
            0xb6 => Instr::F32DemoteF64,
            0xb7 => Instr::F64ConvertI32S,
            0xb8 => Instr::F64ConvertI32U,
            0xb9 => Instr::F64ConvertI64S,
            0xba => Instr::F64ConvertI64U,
            0xbb => Instr::F64PromoteF32,
            0xbc => Instr::I32ReinterpretF32,
            0xbd => Instr::I64ReinterpretF64,
            0xbe => Instr::F32ReinterpretI32,
            0xbf => Instr::F64ReinterpretI64,
            0xc0..=0xc4 => {
                return Err(WasmParseError::UnsupportedFeature(
                    "sign-extension operators",
                ))
            }
            0xd0..=0xd2 => return Err(WasmParseError::UnsupportedFeature("reference types")),
            0xfc => {
                return Err(WasmParseError::UnsupportedFeature(
                    "saturating truncation / bulk memory",
                ))
            }
            0xfd => return Err(WasmParseError::UnsupportedFeature("SIMD")),
            0xfe => return Err(WasmParseError::UnsupportedFeature("threads / atomics")),
            other => return Err(WasmParseError::UnknownOpcode(other)),
        };
        uses_float |= instr.is_float_op();
        code.push(instr);
    }

    if !frames.is_empty() {
        return Err(WasmParseError::Malformed("unterminated block"));
    }
    Ok((code, uses_float))
}
