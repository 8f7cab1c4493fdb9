//! EOSIO account-name codec.
//!
//! Names are strings of up to 12 characters drawn from
//! `.12345abcdefghijklmnopqrstuvwxyz`, packed base-32 into a `u64`: the first
//! 12 characters occupy 5 bits each starting at the most significant end, and
//! an optional 13th character (restricted to the first 16 symbols of the
//! alphabet) occupies the low 4 bits.

use alloc::string::String;
use core::fmt;

/// The base-32 alphabet in symbol-value order.
pub const NAME_CHARS: &[u8; 32] = b".12345abcdefghijklmnopqrstuvwxyz";

/// A packed EOSIO account name.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct AccountName(pub u64);

impl AccountName {
    /// Packs a name string, rejecting invalid characters or lengths.
    pub fn new(s: &str) -> Result<Self, NameError> {
        name_to_u64(s).map(AccountName)
    }

    pub fn as_u64(self) -> u64 {
        self.0
    }

    /// The decoded string form, with trailing `.` stripped.
    pub fn to_string_repr(self) -> String {
        u64_to_name(self.0)
    }
}

impl fmt::Display for AccountName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&u64_to_name(self.0))
    }
}

impl fmt::Debug for AccountName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "AccountName({:?})", u64_to_name(self.0))
    }
}

impl From<AccountName> for u64 {
    fn from(n: AccountName) -> u64 {
        n.0
    }
}

impl core::str::FromStr for AccountName {
    type Err = NameError;

    fn from_str(s: &str) -> Result<Self, NameError> {
        AccountName::new(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NameError {
    /// Character outside the base-32 alphabet.
    InvalidChar { ch: char, pos: usize },
    /// More than 13 characters.
    TooLong { len: usize },
    /// The 13th character must come from the first 16 alphabet symbols.
    InvalidThirteenth { ch: char },
}

impl fmt::Display for NameError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NameError::InvalidChar { ch, pos } => {
                write!(f, "invalid name character {ch:?} at position {pos}")
            }
            NameError::TooLong { len } => write!(f, "name is {len} characters long, max is 13"),
            NameError::InvalidThirteenth { ch } => {
                write!(
                    f,
                    "13th name character {ch:?} must be one of `.12345abcdefghij`"
                )
            }
        }
    }
}

impl core::error::Error for NameError {}

fn symbol_value(ch: u8) -> Option<u64> {
    match ch {
        b'.' => Some(0),
        b'1'..=b'5' => Some((ch - b'1') as u64 + 1),
        b'a'..=b'z' => Some((ch - b'a') as u64 + 6),
        _ => None,
    }
}

/// Packs a valid name string into its `u64` representation.
pub fn name_to_u64(s: &str) -> Result<u64, NameError> {
    let bytes = s.as_bytes();
    if bytes.len() > 13 {
        return Err(NameError::TooLong { len: bytes.len() });
    }
    let mut value: u64 = 0;
    for (i, &ch) in bytes.iter().enumerate() {
        let sym = symbol_value(ch).ok_or(NameError::InvalidChar {
            ch: ch as char,
            pos: i,
        })?;
        if i < 12 {
            value |= sym << (64 - 5 * (i + 1));
        } else {
            // 13th character: only 4 bits available.
            if sym >= 16 {
                return Err(NameError::InvalidThirteenth { ch: ch as char });
            }
            value |= sym;
        }
    }
    Ok(value)
}

/// Decodes a packed value back to its string form, stripping trailing dots.
///
/// Total over `u64`: bit patterns not produced by [`name_to_u64`] still decode
/// through the alphabet table.
pub fn u64_to_name(value: u64) -> String {
    let mut out = [b'.'; 13];
    for (i, slot) in out.iter_mut().enumerate() {
        let sym = if i < 12 {
            (value >> (64 - 5 * (i + 1))) & 0x1f
        } else {
            value & 0x0f
        };
        *slot = NAME_CHARS[sym as usize];
    }
    let end = out
        .iter()
        .rposition(|&c| c != b'.')
        .map(|p| p + 1)
        .unwrap_or(0);
    String::from_utf8_lossy(&out[..end]).into_owned()
}
