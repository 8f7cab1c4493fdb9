//! WASM binary module model: MVP sections decoded into plain structures,
//! with function bodies held as pre-decoded instruction streams whose branch
//! targets are already resolved.

pub mod instr;
pub mod parse;

pub use instr::Instr;
pub use parse::{parse_wasm, WasmParseError};

use alloc::string::String;
use alloc::vec::Vec;

pub const PAGE_SIZE: usize = 65_536;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ValType {
    I32,
    I64,
    F32,
    F64,
}

impl ValType {
    pub fn name(self) -> &'static str {
        match self {
            ValType::I32 => "i32",
            ValType::I64 => "i64",
            ValType::F32 => "f32",
            ValType::F64 => "f64",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct FuncType {
    pub params: Vec<ValType>,
    pub results: Vec<ValType>,
}

/// An imported function; only function imports are supported.
#[derive(Debug, Clone, PartialEq)]
pub struct Import {
    pub module: String,
    pub name: String,
    pub type_idx: u32,
}

/// A local (non-imported) function.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FunctionBody {
    pub type_idx: u32,
    /// Declared locals, expanded (params not included).
    pub locals: Vec<ValType>,
    pub code: Vec<Instr>,
    /// Whether the body contains any float opcode.
    pub uses_float: bool,
}

/// A constant initializer value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ConstExpr {
    I32(i32),
    I64(i64),
    F32(u32),
    F64(u64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct GlobalDef {
    pub ty: ValType,
    pub mutable: bool,
    pub init: ConstExpr,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportKind {
    Func,
    Table,
    Memory,
    Global,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Export {
    pub name: String,
    pub kind: ExportKind,
    pub index: u32,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TableType {
    pub min: u32,
    pub max: Option<u32>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MemoryType {
    pub min_pages: u32,
    pub max_pages: Option<u32>,
}

/// Function entries placed into the table at a constant offset.
#[derive(Debug, Clone, PartialEq)]
pub struct ElementSegment {
    pub offset: u32,
    pub funcs: Vec<u32>,
}

/// Bytes copied into linear memory at a constant offset.
#[derive(Debug, Clone, PartialEq)]
pub struct DataSegment {
    pub offset: u32,
    pub bytes: Vec<u8>,
}

/// A decoded module. The function index space is imports first, then local
/// functions.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Module {
    pub types: Vec<FuncType>,
    pub imports: Vec<Import>,
    pub functions: Vec<FunctionBody>,
    pub tables: Vec<TableType>,
    pub memories: Vec<MemoryType>,
    pub globals: Vec<GlobalDef>,
    pub exports: Vec<Export>,
    pub elements: Vec<ElementSegment>,
    pub data_segments: Vec<DataSegment>,
    pub start: Option<u32>,
}

impl Module {
    pub fn num_imported_funcs(&self) -> u32 {
        self.imports.len() as u32
    }

    /// The signature of a function by global index (imports included).
    pub fn func_type(&self, func_idx: u32) -> Option<&FuncType> {
        let imported = self.imports.len() as u32;
        let type_idx = if func_idx < imported {
            self.imports[func_idx as usize].type_idx
        } else {
            self.functions.get((func_idx - imported) as usize)?.type_idx
        };
        self.types.get(type_idx as usize)
    }

    /// The body of a local function by global index; `None` for imports.
    pub fn body(&self, func_idx: u32) -> Option<&FunctionBody> {
        let imported = self.imports.len() as u32;
        if func_idx < imported {
            return None;
        }
        self.functions.get((func_idx - imported) as usize)
    }

    pub fn export_func(&self, name: &str) -> Option<u32> {
        self.exports
            .iter()
            .find(|e| e.kind == ExportKind::Func && e.name == name)
            .map(|e| e.index)
    }

    /// The data segment covering `offset`, if any.
    pub fn segment_at(&self, offset: u32) -> Option<&DataSegment> {
        self.data_segments
            .iter()
            .find(|seg| offset >= seg.offset && (offset - seg.offset) < seg.bytes.len() as u32)
    }
}
