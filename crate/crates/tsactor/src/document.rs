//! JSON protocol documents.
//!
//! ```json
//! {
//!   "name": "buffer",
//!   "states": [{ "name": "EMPTY", "interface": ["insert"] },
//!              { "name": "FULL", "interface": ["remove"] }],
//!   "messages": [{ "name": "insert", "fields": [{ "name": "value", "type": "int" }] },
//!                { "name": "remove" }],
//!   "transitions": { "insert": "FULL", "remove": "EMPTY" },
//!   "initial": "EMPTY",
//!   "retained": ["insert", "remove"]
//! }
//! ```
//!
//! Optional keys: `client_tables` (role → kind → interface name),
//! `interfaces` (named kind sets with `parents`, for hierarchies shared by
//! several states or tables) and, per state, `interface_name` when the
//! state's interface is not named after the state.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use tsactor_core::spec::{InterfaceDraft, MessageDraft, StateDraft};
use tsactor_core::{ProtocolSpec, SpecDraft};

use crate::Error;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecDocument {
    pub name: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub interfaces: Vec<InterfaceDoc>,
    pub states: Vec<StateDoc>,
    pub messages: Vec<MessageDoc>,
    pub transitions: BTreeMap<String, Value>,
    pub initial: String,
    #[serde(default)]
    pub retained: Vec<String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub client_tables: BTreeMap<String, BTreeMap<String, String>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InterfaceDoc {
    pub name: String,
    #[serde(default)]
    pub kinds: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub parents: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateDoc {
    pub name: String,
    pub interface: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub interface_name: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MessageDoc {
    pub name: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub fields: Vec<FieldDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldDoc {
    pub name: String,
    #[serde(rename = "type")]
    pub ty: String,
}

impl SpecDocument {
    /// Fails with `SPEC_INVALID` when a transition is not a plain
    /// kind → state entry.
    pub fn into_draft(self) -> Result<SpecDraft, Error> {
        let mut transitions = Vec::with_capacity(self.transitions.len());
        for (kind, target) in self.transitions {
            match target {
                Value::String(state) => transitions.push((kind, state)),
                Value::Object(_) => {
                    return Err(invalid(format!(
                        "transition `{kind}` is keyed by state; transitions are keyed by message kind alone"
                    )))
                }
                other => {
                    return Err(invalid(format!(
                        "transition `{kind}` must name a state, found {other}"
                    )))
                }
            }
        }
        Ok(SpecDraft {
            name: self.name,
            interfaces: self
                .interfaces
                .into_iter()
                .map(|i| InterfaceDraft {
                    name: i.name,
                    kinds: i.kinds,
                    parents: i.parents,
                })
                .collect(),
            states: self
                .states
                .into_iter()
                .map(|s| StateDraft {
                    name: s.name,
                    interface: s.interface,
                    interface_name: s.interface_name,
                })
                .collect(),
            messages: self
                .messages
                .into_iter()
                .map(|m| MessageDraft {
                    name: m.name,
                    fields: m.fields.into_iter().map(|f| (f.name, f.ty)).collect(),
                })
                .collect(),
            transitions,
            initial: self.initial,
            retained: self.retained,
            client_tables: self
                .client_tables
                .into_iter()
                .map(|(role, entries)| (role, entries.into_iter().collect()))
                .collect(),
        })
    }

    pub fn from_draft(draft: SpecDraft) -> Self {
        SpecDocument {
            name: draft.name,
            interfaces: draft
                .interfaces
                .into_iter()
                .map(|i| InterfaceDoc {
                    name: i.name,
                    kinds: i.kinds,
                    parents: i.parents,
                })
                .collect(),
            states: draft
                .states
                .into_iter()
                .map(|s| StateDoc {
                    name: s.name,
                    interface: s.interface,
                    interface_name: s.interface_name,
                })
                .collect(),
            messages: draft
                .messages
                .into_iter()
                .map(|m| MessageDoc {
                    name: m.name,
                    fields: m
                        .fields
                        .into_iter()
                        .map(|(name, ty)| FieldDoc { name, ty })
                        .collect(),
                })
                .collect(),
            transitions: draft
                .transitions
                .into_iter()
                .map(|(k, s)| (k, Value::String(s)))
                .collect(),
            initial: draft.initial,
            retained: draft.retained,
            client_tables: draft
                .client_tables
                .into_iter()
                .map(|(role, entries)| (role, entries.into_iter().collect()))
                .collect(),
        }
    }
}

fn invalid(message: String) -> Error {
    Error::Core(tsactor_core::Error::SpecInvalid(message))
}

/// Parses and validates a protocol document.
pub fn parse_spec(text: &str) -> Result<ProtocolSpec, Error> {
    let doc: SpecDocument =
        serde_json::from_str(text).map_err(|e| Error::SpecParse(e.to_string()))?;
    Ok(doc.into_draft()?.validate()?)
}

pub fn load_spec(path: impl AsRef<Path>) -> Result<ProtocolSpec, Error> {
    parse_spec(&std::fs::read_to_string(path)?)
}

/// Pretty-printed document; [`parse_spec`] of the result is equal to `spec`.
pub fn serialize_spec(spec: &ProtocolSpec) -> String {
    let doc = SpecDocument::from_draft(spec.to_draft());
    serde_json::to_string_pretty(&doc).expect("documents always serialize")
}
