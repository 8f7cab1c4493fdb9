//! EOSIO ABI parsing and type resolution.
//!
//! Supports the v1.1-compatible subset used by action dispatch: the `types`
//! (alias), `structs`, and `actions` sections. Parsing flattens every alias
//! and embeds struct definitions so the resulting [`AbiInterface`] is
//! self-contained.

use crate::name::{AccountName, NameError};
use crate::value::{Field, StructDef, TypeDesc};
use alloc::borrow::ToOwned;
use alloc::boxed::Box;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AbiError {
    /// Malformed JSON input.
    Parse(String),
    /// A type name did not resolve, or struct definitions are cyclic.
    TypeResolution(String),
    /// An action name is not a valid account-name string.
    InvalidActionName { name: String, source: NameError },
}

impl fmt::Display for AbiError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AbiError::Parse(msg) => write!(f, "malformed ABI JSON: {msg}"),
            AbiError::TypeResolution(msg) => write!(f, "type resolution failed: {msg}"),
            AbiError::InvalidActionName { name, source } => {
                write!(f, "invalid action name {name:?}: {source}")
            }
        }
    }
}

impl core::error::Error for AbiError {}

/// One dispatchable action: its name and the resolved parameter struct.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AbiAction {
    pub name: AccountName,
    /// The declared handler struct name.
    pub type_name: String,
    pub params: StructDef,
}

/// A fully resolved contract interface.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AbiInterface {
    pub actions: Vec<AbiAction>,
    /// Every declared struct, aliases flattened, in declaration order.
    pub structs: Vec<StructDef>,
}

impl AbiInterface {
    pub fn action(&self, name: AccountName) -> Option<&AbiAction> {
        self.actions.iter().find(|a| a.name == name)
    }

    /// Re-emits the resolved interface as ABI JSON. Aliases are gone, so the
    /// `types` section is empty; parsing the output reproduces `self`.
    pub fn to_json(&self) -> String {
        let raw = RawAbi {
            version: "eosio::abi/1.1".to_owned(),
            types: Vec::new(),
            structs: self
                .structs
                .iter()
                .map(|s| RawStruct {
                    name: s.name.clone(),
                    base: String::new(),
                    fields: s
                        .fields
                        .iter()
                        .map(|f| RawField {
                            name: f.name.clone(),
                            type_name: f.ty.type_name(),
                        })
                        .collect(),
                })
                .collect(),
            actions: self
                .actions
                .iter()
                .map(|a| RawAction {
                    name: a.name.to_string_repr(),
                    type_name: a.type_name.clone(),
                    ricardian_contract: String::new(),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&raw).expect("ABI JSON emission cannot fail")
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct RawTypeAlias {
    new_type_name: String,
    #[serde(rename = "type")]
    type_name: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct RawField {
    name: String,
    #[serde(rename = "type")]
    type_name: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct RawStruct {
    name: String,
    #[serde(default)]
    base: String,
    #[serde(default)]
    fields: Vec<RawField>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct RawAction {
    name: String,
    #[serde(rename = "type")]
    type_name: String,
    #[serde(default)]
    ricardian_contract: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct RawAbi {
    #[serde(default)]
    version: String,
    #[serde(default)]
    types: Vec<RawTypeAlias>,
    #[serde(default)]
    structs: Vec<RawStruct>,
    #[serde(default)]
    actions: Vec<RawAction>,
}

struct Resolver<'a> {
    aliases: BTreeMap<&'a str, &'a str>,
    structs: BTreeMap<&'a str, &'a RawStruct>,
}

impl<'a> Resolver<'a> {
    fn builtin(name: &str) -> Option<TypeDesc> {
        Some(match name {
            "int8" => TypeDesc::Int8,
            "int16" => TypeDesc::Int16,
            "int32" => TypeDesc::Int32,
            "int64" => TypeDesc::Int64,
            "uint8" => TypeDesc::Uint8,
            "uint16" => TypeDesc::Uint16,
            "uint32" => TypeDesc::Uint32,
            "uint64" => TypeDesc::Uint64,
            "float32" => TypeDesc::Float32,
            "float64" => TypeDesc::Float64,
            "bool" => TypeDesc::Bool,
            "string" => TypeDesc::String,
            "name" => TypeDesc::Name,
            "asset" => TypeDesc::Asset,
            "symbol" => TypeDesc::Symbol,
            "public_key" => TypeDesc::PublicKey,
            _ => return None,
        })
    }

    /// Follows aliases to a ground type name.
    fn unalias(&self, mut name: &'a str) -> Result<&'a str, AbiError> {
        let mut seen = BTreeSet::new();
        while let Some(&target) = self.aliases.get(name) {
            if !seen.insert(name) {
                return Err(AbiError::TypeResolution(alloc::format!(
                    "alias cycle through {name:?}"
                )));
            }
            name = target;
        }
        Ok(name)
    }

    fn resolve(&self, name: &'a str, visiting: &mut Vec<String>) -> Result<TypeDesc, AbiError> {
        if let Some(inner) = name.strip_suffix("[]") {
            return Ok(TypeDesc::Array(Box::new(self.resolve(inner, visiting)?)));
        }
        let ground = self.unalias(name)?;
        if let Some(builtin) = Self::builtin(ground) {
            return Ok(builtin);
        }
        if let Some(raw) = self.structs.get(ground) {
            return Ok(TypeDesc::Struct(Box::new(
                self.resolve_struct(raw, visiting)?,
            )));
        }
        Err(AbiError::TypeResolution(alloc::format!(
            "unknown type {name:?}"
        )))
    }

    fn resolve_struct(
        &self,
        raw: &'a RawStruct,
        visiting: &mut Vec<String>,
    ) -> Result<StructDef, AbiError> {
        if visiting.iter().any(|n| n == &raw.name) {
            return Err(AbiError::TypeResolution(alloc::format!(
                "struct cycle through {:?}",
                raw.name
            )));
        }
        visiting.push(raw.name.clone());
        let mut fields = Vec::new();
        if !raw.base.is_empty() {
            let base_name = self.unalias(&raw.base)?;
            let base = self.structs.get(base_name).ok_or_else(|| {
                AbiError::TypeResolution(alloc::format!("unknown base struct {:?}", raw.base))
            })?;
            fields.extend(self.resolve_struct(base, visiting)?.fields);
        }
        for f in &raw.fields {
            fields.push(Field {
                name: f.name.clone(),
                ty: self.resolve(&f.type_name, visiting)?,
            });
        }
        visiting.pop();
        Ok(StructDef {
            name: raw.name.clone(),
            fields,
        })
    }
}

/// Parses ABI JSON into a resolved interface. All aliases are flattened and
/// every action's handler struct is checked to resolve acyclically.
pub fn parse_abi(json_text: &str) -> Result<AbiInterface, AbiError> {
    let raw: RawAbi =
        serde_json::from_str(json_text).map_err(|e| AbiError::Parse(e.to_string()))?;

    let resolver = Resolver {
        aliases: raw
            .types
            .iter()
            .map(|t| (t.new_type_name.as_str(), t.type_name.as_str()))
            .collect(),
        structs: raw.structs.iter().map(|s| (s.name.as_str(), s)).collect(),
    };

    let mut structs = Vec::new();
    for raw_struct in &raw.structs {
        structs.push(resolver.resolve_struct(raw_struct, &mut Vec::new())?);
    }

    let mut actions = Vec::new();
    for raw_action in &raw.actions {
        let name =
            AccountName::new(&raw_action.name).map_err(|source| AbiError::InvalidActionName {
                name: raw_action.name.clone(),
                source,
            })?;
        let handler = resolver.unalias(&raw_action.type_name)?;
        let raw_struct = resolver.structs.get(handler).ok_or_else(|| {
            AbiError::TypeResolution(alloc::format!(
                "action {:?} handler type {:?} is not a declared struct",
                raw_action.name,
                raw_action.type_name
            ))
        })?;
        let params = resolver.resolve_struct(raw_struct, &mut Vec::new())?;
        actions.push(AbiAction {
            name,
            type_name: handler.to_owned(),
            params,
        });
    }

    Ok(AbiInterface { actions, structs })
}
