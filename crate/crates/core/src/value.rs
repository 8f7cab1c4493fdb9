//! EOSIO ABI value model and binary wire codec.
//!
//! The wire format is the EOSIO convention: little-endian fixed-width
//! numerics, `varuint32` length prefixes for strings and arrays, structs as
//! the concatenation of their fields in declaration order, and `asset` as an
//! 8-byte amount followed by an 8-byte symbol.

use crate::name::AccountName;
use alloc::boxed::Box;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

/// Maximum token amount magnitude: EOSIO reserves 62 bits for the amount.
pub const MAX_ASSET_AMOUNT: i64 = (1 << 62) - 1;

/// A token symbol: precision in the low byte, up to seven uppercase A-Z
/// characters in the remaining bytes, zero-padded from the first unused byte.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Symbol(pub u64);

impl Symbol {
    /// The EOS symbol at the conventional precision of 4.
    pub fn eos() -> Symbol {
        Symbol::new(4, "EOS").unwrap()
    }

    pub fn new(precision: u8, code: &str) -> Result<Symbol, SerializeError> {
        let mut value = precision as u64;
        if precision > 18 {
            return Err(SerializeError::InvalidSymbol);
        }
        if code.is_empty() || code.len() > 7 {
            return Err(SerializeError::InvalidSymbol);
        }
        for (i, b) in code.bytes().enumerate() {
            if !b.is_ascii_uppercase() {
                return Err(SerializeError::InvalidSymbol);
            }
            value |= (b as u64) << (8 * (i + 1));
        }
        Ok(Symbol(value))
    }

    pub fn precision(self) -> u8 {
        (self.0 & 0xff) as u8
    }

    /// The character part, e.g. `"EOS"`.
    pub fn code(self) -> String {
        let mut out = String::new();
        for i in 1..8 {
            let b = ((self.0 >> (8 * i)) & 0xff) as u8;
            if b == 0 {
                break;
            }
            out.push(b as char);
        }
        out
    }

    /// Precision 0..=18 and uppercase code, zero-padded with no embedded NULs.
    pub fn is_valid(self) -> bool {
        if self.precision() > 18 {
            return false;
        }
        let mut seen_zero = false;
        let mut chars = 0;
        for i in 1..8 {
            let b = ((self.0 >> (8 * i)) & 0xff) as u8;
            if b == 0 {
                seen_zero = true;
            } else if seen_zero || !b.is_ascii_uppercase() {
                return false;
            } else {
                chars += 1;
            }
        }
        chars > 0
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.precision(), self.code())
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Symbol({self})")
    }
}

/// A quantity of tokens in base units plus its symbol.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Asset {
    pub amount: i64,
    pub symbol: Symbol,
}

impl Asset {
    pub fn new(amount: i64, symbol: Symbol) -> Asset {
        Asset { amount, symbol }
    }

    /// EOS amount from base units (1 EOS = 10_000 units).
    pub fn eos(amount: i64) -> Asset {
        Asset::new(amount, Symbol::eos())
    }

    pub fn is_valid(self) -> bool {
        self.symbol.is_valid() && self.amount.unsigned_abs() <= MAX_ASSET_AMOUNT as u64
    }

    /// Parses `"1000.0000 EOS"` form; precision is the number of fraction digits.
    pub fn parse(s: &str) -> Option<Asset> {
        let (num, code) = s.split_once(' ')?;
        let (neg, num) = match num.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, num),
        };
        let (int_part, frac_part) = match num.split_once('.') {
            Some((i, f)) => (i, f),
            None => (num, ""),
        };
        if int_part.is_empty() && frac_part.is_empty() {
            return None;
        }
        if !int_part.bytes().all(|b| b.is_ascii_digit())
            || !frac_part.bytes().all(|b| b.is_ascii_digit())
        {
            return None;
        }
        let precision = frac_part.len() as u8;
        let mut amount: i64 = 0;
        for b in int_part.bytes().chain(frac_part.bytes()) {
            amount = amount.checked_mul(10)?.checked_add((b - b'0') as i64)?;
        }
        if neg {
            amount = -amount;
        }
        let symbol = Symbol::new(precision, code).ok()?;
        Some(Asset { amount, symbol })
    }
}

impl fmt::Display for Asset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = self.symbol.precision() as u32;
        let sign = if self.amount < 0 { "-" } else { "" };
        let mag = self.amount.unsigned_abs();
        let scale = 10u64.pow(p);
        if p == 0 {
            write!(f, "{sign}{mag} {}", self.symbol.code())
        } else {
            write!(
                f,
                "{sign}{}.{:0width$} {}",
                mag / scale,
                mag % scale,
                self.symbol.code(),
                width = p as usize
            )
        }
    }
}

/// A field of a struct type.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Field {
    pub name: String,
    pub ty: TypeDesc,
}

/// A fully resolved struct type: ordered named fields.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct StructDef {
    pub name: String,
    pub fields: Vec<Field>,
}

/// A resolved type descriptor: all aliases flattened, struct definitions
/// embedded, so values can be encoded and decoded without extra context.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum TypeDesc {
    Int8,
    Int16,
    Int32,
    Int64,
    Uint8,
    Uint16,
    Uint32,
    Uint64,
    Float32,
    Float64,
    Bool,
    String,
    Name,
    Asset,
    Symbol,
    PublicKey,
    Array(Box<TypeDesc>),
    Struct(Box<StructDef>),
}

impl TypeDesc {
    /// The ABI type name this descriptor re-emits as.
    pub fn type_name(&self) -> String {
        match self {
            TypeDesc::Int8 => "int8".into(),
            TypeDesc::Int16 => "int16".into(),
            TypeDesc::Int32 => "int32".into(),
            TypeDesc::Int64 => "int64".into(),
            TypeDesc::Uint8 => "uint8".into(),
            TypeDesc::Uint16 => "uint16".into(),
            TypeDesc::Uint32 => "uint32".into(),
            TypeDesc::Uint64 => "uint64".into(),
            TypeDesc::Float32 => "float32".into(),
            TypeDesc::Float64 => "float64".into(),
            TypeDesc::Bool => "bool".into(),
            TypeDesc::String => "string".into(),
            TypeDesc::Name => "name".into(),
            TypeDesc::Asset => "asset".into(),
            TypeDesc::Symbol => "symbol".into(),
            TypeDesc::PublicKey => "public_key".into(),
            TypeDesc::Array(inner) => {
                let mut s = inner.type_name();
                s.push_str("[]");
                s
            }
            TypeDesc::Struct(def) => def.name.clone(),
        }
    }
}

/// A value of one EOSIO ABI data type.
#[derive(Clone, Debug)]
pub enum TypedValue {
    Int8(i8),
    Int16(i16),
    Int32(i32),
    Int64(i64),
    Uint8(u8),
    Uint16(u16),
    Uint32(u32),
    Uint64(u64),
    Float32(f32),
    Float64(f64),
    Bool(bool),
    String(String),
    Name(AccountName),
    Asset(Asset),
    Symbol(Symbol),
    PublicKey([u8; 34]),
    Array(Vec<TypedValue>),
    Struct(Vec<(String, TypedValue)>),
}

// Bit-exact equality for floats so round-trip checks are total.
impl PartialEq for TypedValue {
    fn eq(&self, other: &Self) -> bool {
        use TypedValue::*;
        match (self, other) {
            (Int8(a), Int8(b)) => a == b,
            (Int16(a), Int16(b)) => a == b,
            (Int32(a), Int32(b)) => a == b,
            (Int64(a), Int64(b)) => a == b,
            (Uint8(a), Uint8(b)) => a == b,
            (Uint16(a), Uint16(b)) => a == b,
            (Uint32(a), Uint32(b)) => a == b,
            (Uint64(a), Uint64(b)) => a == b,
            (Float32(a), Float32(b)) => a.to_bits() == b.to_bits(),
            (Float64(a), Float64(b)) => a.to_bits() == b.to_bits(),
            (Bool(a), Bool(b)) => a == b,
            (String(a), String(b)) => a == b,
            (Name(a), Name(b)) => a == b,
            (Asset(a), Asset(b)) => a == b,
            (Symbol(a), Symbol(b)) => a == b,
            (PublicKey(a), PublicKey(b)) => a == b,
            (Array(a), Array(b)) => a == b,
            (Struct(a), Struct(b)) => a == b,
            _ => false,
        }
    }
}

impl Eq for TypedValue {}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SerializeError {
    /// Asset amount magnitude exceeds 62 bits.
    AssetMagnitude(i64),
    InvalidSymbol,
    /// Length prefix would not fit in a varuint-32.
    LengthOverflow(usize),
}

impl fmt::Display for SerializeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SerializeError::AssetMagnitude(a) => write!(f, "asset amount {a} exceeds 62 bits"),
            SerializeError::InvalidSymbol => write!(f, "symbol violates encoding invariants"),
            SerializeError::LengthOverflow(n) => write!(f, "length {n} exceeds varuint-32 range"),
        }
    }
}

impl core::error::Error for SerializeError {}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DeserializeError {
    /// Input ended before the value was complete.
    Truncated,
    /// Strict mode: bytes remained after the value.
    TrailingBytes(usize),
    InvalidBool(u8),
    InvalidUtf8,
    /// A varuint-32 ran past 5 bytes or overflowed.
    InvalidVaruint,
}

impl fmt::Display for DeserializeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DeserializeError::Truncated => write!(f, "input truncated"),
            DeserializeError::TrailingBytes(n) => write!(f, "{n} trailing bytes after value"),
            DeserializeError::InvalidBool(b) => write!(f, "invalid bool byte 0x{b:02x}"),
            DeserializeError::InvalidUtf8 => write!(f, "string is not valid UTF-8"),
            DeserializeError::InvalidVaruint => write!(f, "malformed varuint-32"),
        }
    }
}

impl core::error::Error for DeserializeError {}

/// Appends a varuint-32 (unsigned LEB128, at most 5 bytes).
pub fn write_varuint32(out: &mut Vec<u8>, mut v: u32) {
    loop {
        let mut byte = (v & 0x7f) as u8;
        v >>= 7;
        if v != 0 {
            byte |= 0x80;
        }
        out.push(byte);
        if v == 0 {
            break;
        }
    }
}

/// Reads a varuint-32, advancing `pos`.
pub fn read_varuint32(bytes: &[u8], pos: &mut usize) -> Result<u32, DeserializeError> {
    let mut result: u32 = 0;
    for i in 0..5 {
        let byte = *bytes.get(*pos).ok_or(DeserializeError::Truncated)?;
        *pos += 1;
        let bits = (byte & 0x7f) as u32;
        if i == 4 && bits > 0x0f {
            return Err(DeserializeError::InvalidVaruint);
        }
        result |= bits << (7 * i);
        if byte & 0x80 == 0 {
            return Ok(result);
        }
    }
    Err(DeserializeError::InvalidVaruint)
}

/// Serializes a value to the EOSIO binary format.
pub fn serialize(value: &TypedValue) -> Result<Vec<u8>, SerializeError> {
    let mut out = Vec::new();
    serialize_into(value, &mut out)?;
    Ok(out)
}

fn serialize_into(value: &TypedValue, out: &mut Vec<u8>) -> Result<(), SerializeError> {
    match value {
        TypedValue::Int8(v) => out.extend_from_slice(&v.to_le_bytes()),
        TypedValue::Int16(v) => out.extend_from_slice(&v.to_le_bytes()),
        TypedValue::Int32(v) => out.extend_from_slice(&v.to_le_bytes()),
        TypedValue::Int64(v) => out.extend_from_slice(&v.to_le_bytes()),
        TypedValue::Uint8(v) => out.extend_from_slice(&v.to_le_bytes()),
        TypedValue::Uint16(v) => out.extend_from_slice(&v.to_le_bytes()),
        TypedValue::Uint32(v) => out.extend_from_slice(&v.to_le_bytes()),
        TypedValue::Uint64(v) => out.extend_from_slice(&v.to_le_bytes()),
        TypedValue::Float32(v) => out.extend_from_slice(&v.to_le_bytes()),
        TypedValue::Float64(v) => out.extend_from_slice(&v.to_le_bytes()),
        TypedValue::Bool(v) => out.push(*v as u8),
        TypedValue::String(s) => {
            let len = s.len();
            if len > u32::MAX as usize {
                return Err(SerializeError::LengthOverflow(len));
            }
            write_varuint32(out, len as u32);
            out.extend_from_slice(s.as_bytes());
        }
        TypedValue::Name(n) => out.extend_from_slice(&n.0.to_le_bytes()),
        TypedValue::Asset(a) => {
            if a.amount.unsigned_abs() > MAX_ASSET_AMOUNT as u64 {
                return Err(SerializeError::AssetMagnitude(a.amount));
            }
            if !a.symbol.is_valid() {
                return Err(SerializeError::InvalidSymbol);
            }
            out.extend_from_slice(&a.amount.to_le_bytes());
            out.extend_from_slice(&a.symbol.0.to_le_bytes());
        }
        TypedValue::Symbol(s) => {
            if !s.is_valid() {
                return Err(SerializeError::InvalidSymbol);
            }
            out.extend_from_slice(&s.0.to_le_bytes());
        }
        TypedValue::PublicKey(k) => out.extend_from_slice(k),
        TypedValue::Array(items) => {
            if items.len() > u32::MAX as usize {
                return Err(SerializeError::LengthOverflow(items.len()));
            }
            write_varuint32(out, items.len() as u32);
            for item in items {
                serialize_into(item, out)?;
            }
        }
        TypedValue::Struct(fields) => {
            for (_, v) in fields {
                serialize_into(v, out)?;
            }
        }
    }
    Ok(())
}

/// Deserializes a value of the described type; strict mode rejects trailing bytes.
pub fn deserialize(
    bytes: &[u8],
    desc: &TypeDesc,
    strict: bool,
) -> Result<TypedValue, DeserializeError> {
    let mut pos = 0;
    let v = deserialize_at(bytes, &mut pos, desc)?;
    if strict && pos != bytes.len() {
        return Err(DeserializeError::TrailingBytes(bytes.len() - pos));
    }
    Ok(v)
}

fn take<'a>(bytes: &'a [u8], pos: &mut usize, n: usize) -> Result<&'a [u8], DeserializeError> {
    let end = pos.checked_add(n).ok_or(DeserializeError::Truncated)?;
    if end > bytes.len() {
        return Err(DeserializeError::Truncated);
    }
    let slice = &bytes[*pos..end];
    *pos = end;
    Ok(slice)
}

fn deserialize_at(
    bytes: &[u8],
    pos: &mut usize,
    desc: &TypeDesc,
) -> Result<TypedValue, DeserializeError> {
    macro_rules! fixed {
        ($ty:ty, $variant:ident) => {{
            let raw = take(bytes, pos, core::mem::size_of::<$ty>())?;
            TypedValue::$variant(<$ty>::from_le_bytes(raw.try_into().unwrap()))
        }};
    }
    Ok(match desc {
        TypeDesc::Int8 => fixed!(i8, Int8),
        TypeDesc::Int16 => fixed!(i16, Int16),
        TypeDesc::Int32 => fixed!(i32, Int32),
        TypeDesc::Int64 => fixed!(i64, Int64),
        TypeDesc::Uint8 => fixed!(u8, Uint8),
        TypeDesc::Uint16 => fixed!(u16, Uint16),
        TypeDesc::Uint32 => fixed!(u32, Uint32),
        TypeDesc::Uint64 => fixed!(u64, Uint64),
        TypeDesc::Float32 => fixed!(f32, Float32),
        TypeDesc::Float64 => fixed!(f64, Float64),
        TypeDesc::Bool => {
            let b = take(bytes, pos, 1)?[0];
            match b {
                0 => TypedValue::Bool(false),
                1 => TypedValue::Bool(true),
                other => return Err(DeserializeError::InvalidBool(other)),
            }
        }
        TypeDesc::String => {
            let len = read_varuint32(bytes, pos)? as usize;
            let raw = take(bytes, pos, len)?;
            let s = core::str::from_utf8(raw).map_err(|_| DeserializeError::InvalidUtf8)?;
            TypedValue::String(s.to_string())
        }
        TypeDesc::Name => {
            let raw = take(bytes, pos, 8)?;
            TypedValue::Name(AccountName(u64::from_le_bytes(raw.try_into().unwrap())))
        }
        TypeDesc::Asset => {
            let amount = i64::from_le_bytes(take(bytes, pos, 8)?.try_into().unwrap());
            let symbol = u64::from_le_bytes(take(bytes, pos, 8)?.try_into().unwrap());
            TypedValue::Asset(Asset {
                amount,
                symbol: Symbol(symbol),
            })
        }
        TypeDesc::Symbol => {
            let raw = take(bytes, pos, 8)?;
            TypedValue::Symbol(Symbol(u64::from_le_bytes(raw.try_into().unwrap())))
        }
        TypeDesc::PublicKey => {
            let raw = take(bytes, pos, 34)?;
            TypedValue::PublicKey(raw.try_into().unwrap())
        }
        TypeDesc::Array(elem) => {
            let len = read_varuint32(bytes, pos)? as usize;
            let mut items = Vec::new();
            for _ in 0..len {
                items.push(deserialize_at(bytes, pos, elem)?);
            }
            TypedValue::Array(items)
        }
        TypeDesc::Struct(def) => {
            let mut fields = Vec::with_capacity(def.fields.len());
            for field in &def.fields {
                fields.push((field.name.clone(), deserialize_at(bytes, pos, &field.ty)?));
            }
            TypedValue::Struct(fields)
        }
    })
}

/// The canonical `transfer` payload type: `{from: name, to: name,
/// quantity: asset, memo: string}`.
pub fn transfer_struct_desc() -> TypeDesc {
    TypeDesc::Struct(Box::new(StructDef {
        name: "transfer".into(),
        fields: alloc::vec![
            Field {
                name: "from".into(),
                ty: TypeDesc::Name,
            },
            Field {
                name: "to".into(),
                ty: TypeDesc::Name,
            },
            Field {
                name: "quantity".into(),
                ty: TypeDesc::Asset,
            },
            Field {
                name: "memo".into(),
                ty: TypeDesc::String,
            },
        ],
    }))
}

/// Builds a `transfer` payload value.
pub fn transfer_value(
    from: AccountName,
    to: AccountName,
    quantity: Asset,
    memo: &str,
) -> TypedValue {
    TypedValue::Struct(alloc::vec![
        ("from".into(), TypedValue::Name(from)),
        ("to".into(), TypedValue::Name(to)),
        ("quantity".into(), TypedValue::Asset(quantity)),
        ("memo".into(), TypedValue::String(memo.into())),
    ])
}
