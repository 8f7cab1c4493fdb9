//! Shared test support: fixture loading and the text-level WAT scan oracle
//! used to cross-check the binary memo-candidate analysis.

// Each integration test binary compiles this module and none uses all of it.
#![allow(dead_code)]

use std::collections::BTreeSet;
use std::path::PathBuf;

pub fn fixtures_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

pub fn fixture_path(name: &str) -> PathBuf {
    fixtures_dir().join(name)
}

pub fn read_fixture(name: &str) -> Vec<u8> {
    std::fs::read(fixture_path(name)).unwrap_or_else(|e| panic!("reading fixture {name}: {e}"))
}

// ---------------------------------------------------------------------------
// Minimal s-expression reader for WAT sources. Handles line (;;) and block
// ((; ;)) comments plus string escapes, which is all the fixtures use.

#[derive(Debug, Clone, PartialEq)]
pub enum Sexp {
    Atom(String),
    Str(Vec<u8>),
    List(Vec<Sexp>),
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn skip_trivia(&mut self) {
        loop {
            while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
                self.pos += 1;
            }
            if self.bytes[self.pos..].starts_with(b";;") {
                while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
                    self.pos += 1;
                }
                continue;
            }
            if self.bytes[self.pos..].starts_with(b"(;") {
                let mut depth = 0;
                while self.pos < self.bytes.len() {
                    if self.bytes[self.pos..].starts_with(b"(;") {
                        depth += 1;
                        self.pos += 2;
                    } else if self.bytes[self.pos..].starts_with(b";)") {
                        depth -= 1;
                        self.pos += 2;
                        if depth == 0 {
                            break;
                        }
                    } else {
                        self.pos += 1;
                    }
                }
                continue;
            }
            break;
        }
    }

    fn read(&mut self) -> Option<Sexp> {
        self.skip_trivia();
        match self.bytes.get(self.pos)? {
            b'(' => {
                self.pos += 1;
                let mut items = Vec::new();
                loop {
                    self.skip_trivia();
                    if self.bytes.get(self.pos) == Some(&b')') {
                        self.pos += 1;
                        return Some(Sexp::List(items));
                    }
                    items.push(self.read()?);
                }
            }
            b'"' => {
                self.pos += 1;
                let mut out = Vec::new();
                while let Some(&b) = self.bytes.get(self.pos) {
                    if b == b'"' {
                        self.pos += 1;
                        return Some(Sexp::Str(out));
                    }
                    if b == b'\\' {
                        self.pos += 1;
                        let esc = *self.bytes.get(self.pos)?;
                        match esc {
                            b'n' => out.push(b'\n'),
                            b't' => out.push(b'\t'),
                            b'r' => out.push(b'\r'),
                            b'\\' => out.push(b'\\'),
                            b'"' => out.push(b'"'),
                            b'\'' => out.push(b'\''),
                            _ => {
                                // two-digit hex escape
                                let hi = (esc as char).to_digit(16)?;
                                self.pos += 1;
                                let lo = (*self.bytes.get(self.pos)? as char).to_digit(16)?;
                                out.push((hi * 16 + lo) as u8);
                            }
                        }
                        self.pos += 1;
                    } else {
                        out.push(b);
                        self.pos += 1;
                    }
                }
                None
            }
            _ => {
                let start = self.pos;
                while let Some(&b) = self.bytes.get(self.pos) {
                    if b.is_ascii_whitespace() || b == b'(' || b == b')' || b == b'"' {
                        break;
                    }
                    self.pos += 1;
                }
                Some(Sexp::Atom(
                    String::from_utf8_lossy(&self.bytes[start..self.pos]).into_owned(),
                ))
            }
        }
    }
}

pub fn parse_wat_sexp(text: &str) -> Sexp {
    let mut reader = Reader {
        bytes: text.as_bytes(),
        pos: 0,
    };
    reader.read().expect("wat source parses as an s-expression")
}

fn atom(s: &Sexp) -> Option<&str> {
    match s {
        Sexp::Atom(a) => Some(a),
        _ => None,
    }
}

fn list(s: &Sexp) -> Option<&[Sexp]> {
    match s {
        Sexp::List(items) => Some(items),
        _ => None,
    }
}

fn is_clause(s: &Sexp, keyword: &str) -> bool {
    list(s)
        .and_then(|items| items.first())
        .and_then(atom)
        .is_some_and(|a| a == keyword)
}

/// Parses a WAT integer literal (decimal or hex, optional sign).
fn parse_int(text: &str) -> Option<i64> {
    let (neg, rest) = match text.strip_prefix('-') {
        Some(r) => (true, r),
        None => (false, text),
    };
    let value = if let Some(hex) = rest.strip_prefix("0x") {
        i64::from_str_radix(&hex.replace('_', ""), 16).ok()?
    } else {
        rest.replace('_', "").parse::<i64>().ok()?
    };
    Some(if neg { -value } else { value })
}

/// All data segments: (offset, bytes).
pub fn wat_data_segments(module: &Sexp) -> Vec<(u32, Vec<u8>)> {
    let mut out = Vec::new();
    for item in list(module).unwrap_or(&[]) {
        if !is_clause(item, "data") {
            continue;
        }
        let items = list(item).unwrap();
        let mut offset = None;
        let mut bytes = Vec::new();
        for child in &items[1..] {
            match child {
                Sexp::List(inner) if inner.first().and_then(atom) == Some("i32.const") => {
                    offset = inner.get(1).and_then(atom).and_then(parse_int);
                }
                Sexp::Str(raw) => bytes.extend_from_slice(raw),
                _ => {}
            }
        }
        if let Some(off) = offset {
            out.push((off as u32, bytes));
        }
    }
    out
}

/// The parameter types of a func clause, `$name` tokens ignored, and whether
/// it declares any result.
fn func_signature(func: &[Sexp]) -> (Vec<String>, bool) {
    let mut params = Vec::new();
    let mut has_result = false;
    for child in &func[1..] {
        if is_clause(child, "param") {
            for tok in &list(child).unwrap()[1..] {
                if let Some(a) = atom(tok) {
                    if !a.starts_with('$') {
                        params.push(a.to_string());
                    }
                }
            }
        } else if is_clause(child, "result") {
            has_result = true;
        } else if is_clause(child, "export") || is_clause(child, "type") {
            continue;
        } else if atom(child).map(|a| a.starts_with('$')) == Some(true) {
            continue; // the function's own name
        } else {
            break; // body begins
        }
    }
    (params, has_result)
}

/// Every `i32.const` immediate appearing anywhere in an expression.
fn collect_i32_consts(expr: &Sexp, out: &mut BTreeSet<u32>) {
    if let Sexp::List(items) = expr {
        for (i, item) in items.iter().enumerate() {
            if atom(item) == Some("i32.const") {
                if let Some(value) = items.get(i + 1).and_then(atom).and_then(parse_int) {
                    out.insert(value as u32);
                }
            }
            collect_i32_consts(item, out);
        }
    }
}

fn printable(b: u8) -> bool {
    (0x20..=0x7e).contains(&b)
}

/// The string at `offset` under the shared extraction rule: a NUL- or
/// segment-end-terminated run of printable ASCII at least two bytes long.
fn string_at(segments: &[(u32, Vec<u8>)], offset: u32) -> Option<String> {
    for (base, bytes) in segments {
        if offset < *base || (offset - base) as usize >= bytes.len() {
            continue;
        }
        let start = (offset - base) as usize;
        let mut end = start;
        while end < bytes.len() && bytes[end] != 0 {
            if !printable(bytes[end]) {
                return None;
            }
            end += 1;
        }
        if end - start >= 2 {
            return Some(String::from_utf8_lossy(&bytes[start..end]).into_owned());
        }
        return None;
    }
    None
}

/// The brute-force memo oracle: textually scans the WAT source for
/// `i32.const` immediates inside functions whose parameter list is exactly
/// (i32 i64 i64 i32 i32) with no result, and resolves them against the data
/// segments.
pub fn wat_scan_memo_strings(wat_text: &str) -> BTreeSet<String> {
    let module = parse_wat_sexp(wat_text);
    let segments = wat_data_segments(&module);
    let mut offsets = BTreeSet::new();
    for item in list(&module).unwrap_or(&[]) {
        if !is_clause(item, "func") {
            continue;
        }
        let func = list(item).unwrap();
        let (params, has_result) = func_signature(func);
        if has_result || params != ["i32", "i64", "i64", "i32", "i32"] {
            continue;
        }
        for child in &func[1..] {
            collect_i32_consts(child, &mut offsets);
        }
    }
    offsets
        .into_iter()
        .filter_map(|off| string_at(&segments, off))
        .collect()
}
