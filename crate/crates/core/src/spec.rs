//! Declarative protocol descriptions and trace conformance.
//!
//! A protocol lists its message kinds, its states with their interfaces, one
//! successor state per message kind, an initial state, the kinds retained by
//! a chemical actor, and optionally one [`ProtocolTable`] per client role.
//! [`SpecDraft`] is the unvalidated form, built by hand or by a document
//! loader; [`SpecDraft::validate`] turns it into a [`ProtocolSpec`].

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::chemical::RetainedSet;
use crate::protocol::ProtocolTable;
use crate::runtime::{Handling, Kind, Outcome};
use crate::typed_ref::{Interface, MessageDecl, Universe};
use crate::Error;

/// Role whose table is derived from the state machine when not declared.
pub const DEFAULT_ROLE: &str = "default";

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct InterfaceDraft {
    pub name: String,
    pub kinds: Vec<String>,
    pub parents: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct StateDraft {
    pub name: String,
    /// Kinds accepted in this state.
    pub interface: Vec<String>,
    /// Name of the interface; defaults to the state name.
    pub interface_name: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MessageDraft {
    pub name: String,
    /// `(field name, type)` pairs.
    pub fields: Vec<(String, String)>,
}

/// Unvalidated protocol description.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SpecDraft {
    pub name: String,
    pub interfaces: Vec<InterfaceDraft>,
    pub states: Vec<StateDraft>,
    pub messages: Vec<MessageDraft>,
    /// `(kind, target state)` pairs.
    pub transitions: Vec<(String, String)>,
    pub initial: String,
    pub retained: Vec<String>,
    /// `(role, [(kind, interface name)])`.
    pub client_tables: Vec<(String, Vec<(String, String)>)>,
}

fn invalid<T>(msg: String) -> Result<T, Error> {
    Err(Error::SpecInvalid(msg))
}

impl SpecDraft {
    /// Checks every well-formedness rule and materializes the protocol.
    pub fn validate(self) -> Result<ProtocolSpec, Error> {
        let explicit: BTreeSet<String> = self.interfaces.iter().map(|i| i.name.clone()).collect();

        let mut builder = Universe::builder();
        for m in &self.messages {
            let mut decl = MessageDecl::new(m.name.as_str());
            for (field, ty) in &m.fields {
                decl = decl.field(field, ty);
            }
            builder = builder.message(decl);
        }
        for i in &self.interfaces {
            let parents: Vec<&str> = i.parents.iter().map(String::as_str).collect();
            builder = builder.interface(i.name.as_str(), i.kinds.iter().map(String::as_str), &parents);
        }

        if self.states.is_empty() {
            return invalid("protocol declares no states".into());
        }
        let mut state_index = BTreeMap::new();
        let mut implicit: BTreeMap<&str, BTreeSet<&str>> = BTreeMap::new();
        for (i, s) in self.states.iter().enumerate() {
            if state_index.insert(s.name.clone(), i).is_some() {
                return invalid(format!("state `{}` declared twice", s.name));
            }
            let iface = s.interface_name.as_deref().unwrap_or(&s.name);
            if explicit.contains(iface) {
                continue;
            }
            let kinds: BTreeSet<&str> = s.interface.iter().map(String::as_str).collect();
            match implicit.get(iface) {
                Some(prev) if *prev != kinds => {
                    return invalid(format!(
                        "interface `{iface}` is given different kinds by different states"
                    ))
                }
                Some(_) => {}
                None => {
                    implicit.insert(iface, kinds);
                }
            }
        }
        for (name, kinds) in &implicit {
            builder = builder.interface(name, kinds.iter().copied(), &[]);
        }
        let universe = builder.build()?;

        let mut states = Vec::with_capacity(self.states.len());
        for s in &self.states {
            let iface_name = s.interface_name.as_deref().unwrap_or(&s.name);
            let interface = universe
                .interface(iface_name)
                .cloned()
                .expect("every state interface is registered");
            let listed: BTreeSet<Kind> = s.interface.iter().map(|k| Kind::new(k)).collect();
            if listed != *interface.kinds() {
                return invalid(format!(
                    "state `{}` lists kinds {:?} but interface `{}` has {:?}",
                    s.name,
                    listed,
                    iface_name,
                    interface.kinds()
                ));
            }
            states.push(State {
                name: s.name.clone(),
                interface,
            });
        }

        let mut transitions = BTreeMap::new();
        for (kind, target) in &self.transitions {
            let kind = Kind::new(kind);
            if !universe.is_declared(&kind) {
                return invalid(format!("transition for undeclared message `{kind}`"));
            }
            let Some(&to) = state_index.get(target) else {
                return invalid(format!("transition `{kind}` targets unknown state `{target}`"));
            };
            if transitions.insert(kind.clone(), to).is_some() {
                return invalid(format!("message `{kind}` has more than one transition"));
            }
        }
        for s in &states {
            for kind in s.interface.kinds() {
                if !transitions.contains_key(kind) {
                    return invalid(format!(
                        "state `{}` accepts `{kind}` but no transition is declared for it",
                        s.name
                    ));
                }
            }
        }

        let Some(&initial) = state_index.get(&self.initial) else {
            return invalid(format!("initial state `{}` is not declared", self.initial));
        };

        let mut retained = RetainedSet::new();
        for k in &self.retained {
            let kind = Kind::new(k);
            if !universe.is_declared(&kind) {
                return invalid(format!("retained message `{kind}` is not declared"));
            }
            retained.insert(kind);
        }

        let mut client_tables = BTreeMap::new();
        let mut declared_roles = BTreeSet::new();
        for (role, entries) in &self.client_tables {
            let mut map = BTreeMap::new();
            for (kind, iface) in entries {
                let kind = Kind::new(kind);
                if !universe.is_declared(&kind) {
                    return invalid(format!("table `{role}` maps undeclared message `{kind}`"));
                }
                let Some(interface) = universe.interface(iface) else {
                    return invalid(format!("table `{role}` names unknown interface `{iface}`"));
                };
                if map.insert(kind.clone(), interface.clone()).is_some() {
                    return invalid(format!("table `{role}` maps `{kind}` twice"));
                }
            }
            let table = ProtocolTable::new(role, map);
            for (_, iface) in table.entries() {
                if let Err(e) = table.check_total(iface) {
                    return invalid(format!("table `{role}` is not closed: {e}"));
                }
            }
            if !declared_roles.insert(role.clone()) {
                return invalid(format!("table `{role}` declared twice"));
            }
            client_tables.insert(role.clone(), table);
        }

        let spec_name = self.name;
        let mut spec = ProtocolSpec {
            name: spec_name,
            universe,
            explicit_interfaces: explicit,
            states,
            transitions,
            initial,
            retained,
            client_tables,
            declared_roles,
        };
        if !spec.client_tables.contains_key(DEFAULT_ROLE) {
            let derived = spec.successor_table(DEFAULT_ROLE);
            spec.client_tables.insert(DEFAULT_ROLE.into(), derived);
        }
        spec.check_default_agrees()?;
        Ok(spec)
    }
}

/// A protocol state and its interface.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct State {
    name: String,
    interface: Interface,
}

impl State {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn interface(&self) -> &Interface {
        &self.interface
    }

    /// No message is accepted: the session is over.
    pub fn is_terminal(&self) -> bool {
        self.interface.is_empty()
    }
}

/// A validated protocol.
#[derive(Debug, Clone)]
pub struct ProtocolSpec {
    name: String,
    universe: Universe,
    explicit_interfaces: BTreeSet<String>,
    states: Vec<State>,
    transitions: BTreeMap<Kind, usize>,
    initial: usize,
    retained: RetainedSet,
    client_tables: BTreeMap<String, ProtocolTable>,
    declared_roles: BTreeSet<String>,
}

impl PartialEq for ProtocolSpec {
    fn eq(&self, other: &Self) -> bool {
        self.to_draft() == other.to_draft()
    }
}

impl ProtocolSpec {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn universe(&self) -> &Universe {
        &self.universe
    }

    pub fn states(&self) -> &[State] {
        &self.states
    }

    pub fn state(&self, name: &str) -> Option<&State> {
        self.states.iter().find(|s| s.name == name)
    }

    pub fn initial(&self) -> &State {
        &self.states[self.initial]
    }

    pub fn retained(&self) -> &RetainedSet {
        &self.retained
    }

    /// Interface by name, as declared or implied by a state.
    pub fn interface(&self, name: &str) -> Option<&Interface> {
        self.universe.interface(name)
    }

    /// Target state of the transition for `kind`, regardless of source.
    pub fn transition(&self, kind: &Kind) -> Option<&State> {
        self.transitions.get(kind).map(|&i| &self.states[i])
    }

    /// The state reached from `state` by handling `kind`.
    pub fn successor(&self, state: &str, kind: &Kind) -> Result<&State, Error> {
        let from = self
            .state(state)
            .ok_or_else(|| Error::UnknownState(state.into()))?;
        if !from.interface.contains(kind) {
            return Err(Error::KindNotEnabled {
                state: state.into(),
                kind: kind.clone(),
            });
        }
        Ok(self
            .transition(kind)
            .expect("validated: every enabled kind has a transition"))
    }

    /// Replays `kinds` from the initial state.
    pub fn check_kinds<'k>(&self, kinds: impl IntoIterator<Item = &'k Kind>) -> Verdict {
        let mut current = self.initial();
        for (index, kind) in kinds.into_iter().enumerate() {
            match self.successor(&current.name, kind) {
                Ok(next) => current = next,
                Err(_) => {
                    return Verdict::Violation {
                        index,
                        state: current.name.clone(),
                        kind: kind.clone(),
                    }
                }
            }
        }
        Verdict::Ok {
            final_state: current.name.clone(),
        }
    }

    /// Replays the trace's kinds from the initial state. The recorded
    /// states are observations only and are not trusted.
    pub fn check_trace(&self, trace: &Trace) -> Verdict {
        self.check_kinds(trace.steps.iter().map(|s| &s.kind))
    }

    /// Checks each client's projection of the trace separately.
    pub fn check_per_client(&self, trace: &Trace) -> BTreeMap<String, Verdict> {
        trace
            .clients()
            .into_iter()
            .map(|c| {
                let verdict = self.check_trace(&trace.project(&c));
                (c, verdict)
            })
            .collect()
    }

    /// Roles with a table, including the derived default.
    pub fn roles(&self) -> impl Iterator<Item = &str> {
        self.client_tables.keys().map(String::as_str)
    }

    /// The protocol table a client in `role` uses for its references.
    pub fn client_table(&self, role: &str) -> Result<&ProtocolTable, Error> {
        self.client_tables
            .get(role)
            .ok_or_else(|| Error::UnknownRole(role.into()))
    }

    fn successor_table(&self, name: &str) -> ProtocolTable {
        ProtocolTable::new(
            name,
            self.transitions
                .iter()
                .map(|(k, &s)| (k.clone(), self.states[s].interface.clone())),
        )
    }

    fn check_default_agrees(&self) -> Result<(), Error> {
        let table = &self.client_tables[DEFAULT_ROLE];
        for s in &self.states {
            for kind in s.interface.kinds() {
                let expected = &self.transition(kind).expect("validated").interface;
                match table.next(kind) {
                    Some(got) if got == expected => {}
                    Some(got) => {
                        return invalid(format!(
                            "default table maps `{kind}` to `{}` but the transition reaches `{}`",
                            got.name(),
                            expected.name()
                        ))
                    }
                    None => return invalid(format!("default table has no entry for `{kind}`")),
                }
            }
        }
        Ok(())
    }

    /// The unvalidated form; validating it yields an equal protocol.
    pub fn to_draft(&self) -> SpecDraft {
        let u = &self.universe;
        let interfaces = self
            .explicit_interfaces
            .iter()
            .map(|name| InterfaceDraft {
                name: name.clone(),
                kinds: u.own_kinds(name).iter().map(|k| k.to_string()).collect(),
                parents: u.parents(name).to_vec(),
            })
            .collect();
        let states = self
            .states
            .iter()
            .map(|s| StateDraft {
                name: s.name.clone(),
                interface: s.interface.kinds().iter().map(|k| k.to_string()).collect(),
                interface_name: (s.interface.name() != s.name).then(|| s.interface.name().into()),
            })
            .collect();
        let messages = u
            .messages()
            .map(|m| MessageDraft {
                name: m.kind.to_string(),
                fields: m.fields.iter().map(|f| (f.name.clone(), f.ty.clone())).collect(),
            })
            .collect();
        let transitions = self
            .transitions
            .iter()
            .map(|(k, &s)| (k.to_string(), self.states[s].name.clone()))
            .collect();
        let client_tables = self
            .declared_roles
            .iter()
            .map(|role| {
                let entries = self.client_tables[role]
                    .entries()
                    .map(|(k, i)| (k.to_string(), i.name().into()))
                    .collect();
                (role.clone(), entries)
            })
            .collect();
        SpecDraft {
            name: self.name.clone(),
            interfaces,
            states,
            messages,
            transitions,
            initial: self.initial().name.clone(),
            retained: self.retained.iter().map(|k| k.to_string()).collect(),
            client_tables,
        }
    }
}

/// Result of replaying a trace against a protocol.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Ok { final_state: String },
    /// `kind` at position `index` is not enabled in `state`.
    Violation { index: usize, state: String, kind: Kind },
}

impl Verdict {
    pub fn is_ok(&self) -> bool {
        matches!(self, Verdict::Ok { .. })
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Ok { final_state } => write!(f, "OK (final state {final_state})"),
            Verdict::Violation { index, state, kind } => {
                write!(f, "VIOLATION at index {index}: `{kind}` in state {state}")
            }
        }
    }
}

/// One observed handling: state at handling, kind, and sending client.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceStep {
    pub state: Option<String>,
    pub kind: Kind,
    pub client: Option<String>,
}

/// Observed sequence of handled messages.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Trace {
    pub steps: Vec<TraceStep>,
}

impl Trace {
    pub fn from_kinds<K: Into<Kind>>(kinds: impl IntoIterator<Item = K>) -> Self {
        Trace {
            steps: kinds
                .into_iter()
                .map(|k| TraceStep {
                    state: None,
                    kind: k.into(),
                    client: None,
                })
                .collect(),
        }
    }

    /// Handled envelopes of `actor_name` (or of every actor when `None`).
    /// Stashed and dead-lettered envelopes are skipped.
    pub fn from_handlings<'h>(
        handlings: impl IntoIterator<Item = &'h Handling>,
        actor_name: Option<&str>,
    ) -> Self {
        Trace {
            steps: handlings
                .into_iter()
                .filter(|h| h.outcome == Outcome::Handled)
                .filter(|h| actor_name.is_none_or(|n| *h.actor_name == *n))
                .map(|h| TraceStep {
                    state: Some(h.state.to_string()),
                    kind: h.kind.clone(),
                    client: h.client.as_ref().map(|c| c.to_string()),
                })
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn kinds(&self) -> impl Iterator<Item = &Kind> {
        self.steps.iter().map(|s| &s.kind)
    }

    /// Distinct client ids, in order of first appearance.
    pub fn clients(&self) -> Vec<String> {
        let mut seen = Vec::new();
        for s in &self.steps {
            if let Some(c) = &s.client {
                if !seen.contains(c) {
                    seen.push(c.clone());
                }
            }
        }
        seen
    }

    /// The steps sent by `client`, in order.
    pub fn project(&self, client: &str) -> Trace {
        Trace {
            steps: self
                .steps
                .iter()
                .filter(|s| s.client.as_deref() == Some(client))
                .cloned()
                .collect(),
        }
    }
}
