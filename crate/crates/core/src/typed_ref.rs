//! Interfaces as materialized sets of message kinds, and references typed at
//! an interface.
//!
//! Interface order is set inclusion. A reference that accepts more kinds can
//! stand in for one that accepts fewer, which is the contravariance of a
//! typed actor reference in its interface parameter.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::rc::Rc;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::cell::Cell;
use core::fmt;

use crate::runtime::{ActorRef, Kind, Message};
use crate::Error;

/// One payload field of a declared message kind.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Field {
    pub name: String,
    pub ty: String,
}

/// A declared message kind and its payload signature.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MessageDecl {
    pub kind: Kind,
    pub fields: Vec<Field>,
}

impl MessageDecl {
    pub fn new(kind: impl Into<Kind>) -> Self {
        MessageDecl {
            kind: kind.into(),
            fields: Vec::new(),
        }
    }

    pub fn field(mut self, name: &str, ty: &str) -> Self {
        self.fields.push(Field {
            name: name.into(),
            ty: ty.into(),
        });
        self
    }
}

struct InterfaceDef {
    name: String,
    kinds: BTreeSet<Kind>,
}

/// A named set of message kinds. Cheap to clone.
#[derive(Clone)]
pub struct Interface(Rc<InterfaceDef>);

impl Interface {
    pub fn new<K: Into<Kind>>(name: &str, kinds: impl IntoIterator<Item = K>) -> Self {
        Interface(Rc::new(InterfaceDef {
            name: name.to_string(),
            kinds: kinds.into_iter().map(Into::into).collect(),
        }))
    }

    /// The interface that accepts no message at all.
    pub fn empty(name: &str) -> Self {
        Interface::new::<Kind>(name, [])
    }

    pub fn name(&self) -> &str {
        &self.0.name
    }

    pub fn kinds(&self) -> &BTreeSet<Kind> {
        &self.0.kinds
    }

    pub fn is_empty(&self) -> bool {
        self.0.kinds.is_empty()
    }

    pub fn contains(&self, kind: &Kind) -> bool {
        self.0.kinds.contains(kind)
    }

    /// `other ≤ self` in the inclusion order.
    pub fn includes(&self, other: &Interface) -> bool {
        other.0.kinds.is_subset(&self.0.kinds)
    }
}

impl PartialEq for Interface {
    fn eq(&self, other: &Self) -> bool {
        Rc::ptr_eq(&self.0, &other.0)
            || (self.0.name == other.0.name && self.0.kinds == other.0.kinds)
    }
}

impl Eq for Interface {}

impl fmt::Debug for Interface {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{:?}", self.0.name, self.0.kinds)
    }
}

impl fmt::Display for Interface {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0.name)
    }
}

/// True iff a reference at `actual` may be used where `expected` is
/// required, i.e. `kinds(expected) ⊆ kinds(actual)`.
pub fn substitutable(actual: &Interface, expected: &Interface) -> bool {
    actual.includes(expected)
}

/// The declared message kinds and interface hierarchy of one protocol.
#[derive(Debug, Clone, Default)]
pub struct Universe {
    messages: BTreeMap<Kind, MessageDecl>,
    interfaces: BTreeMap<String, Interface>,
    own: BTreeMap<String, Vec<Kind>>,
    parents: BTreeMap<String, Vec<String>>,
}

impl Universe {
    pub fn builder() -> UniverseBuilder {
        UniverseBuilder::default()
    }

    pub fn message(&self, kind: &Kind) -> Option<&MessageDecl> {
        self.messages.get(kind)
    }

    pub fn messages(&self) -> impl Iterator<Item = &MessageDecl> {
        self.messages.values()
    }

    pub fn is_declared(&self, kind: &Kind) -> bool {
        self.messages.contains_key(kind)
    }

    pub fn interface(&self, name: &str) -> Option<&Interface> {
        self.interfaces.get(name)
    }

    pub fn interfaces(&self) -> impl Iterator<Item = &Interface> {
        self.interfaces.values()
    }

    /// Kinds declared directly on the interface, before materialization.
    pub fn own_kinds(&self, name: &str) -> &[Kind] {
        self.own.get(name).map_or(&[], Vec::as_slice)
    }

    pub fn parents(&self, name: &str) -> &[String] {
        self.parents.get(name).map_or(&[], Vec::as_slice)
    }

    /// Same as [`substitutable`], by interface name.
    pub fn substitutable(&self, actual: &str, expected: &str) -> Result<bool, Error> {
        let a = self.lookup(actual)?;
        let e = self.lookup(expected)?;
        Ok(substitutable(a, e))
    }

    fn lookup(&self, name: &str) -> Result<&Interface, Error> {
        self.interface(name)
            .ok_or_else(|| Error::SpecInvalid(format!("unknown interface `{name}`")))
    }
}

#[derive(Debug, Default)]
pub struct UniverseBuilder {
    messages: Vec<MessageDecl>,
    interfaces: Vec<(String, Vec<Kind>, Vec<String>)>,
}

impl UniverseBuilder {
    pub fn message(mut self, decl: MessageDecl) -> Self {
        self.messages.push(decl);
        self
    }

    /// Declares an interface with its own kinds and the interfaces it
    /// extends. The materialized kind set of an interface also contains the
    /// kinds of every interface that extends it.
    pub fn interface<K: Into<Kind>>(
        mut self,
        name: &str,
        own: impl IntoIterator<Item = K>,
        parents: &[&str],
    ) -> Self {
        self.interfaces.push((
            name.into(),
            own.into_iter().map(Into::into).collect(),
            parents.iter().map(|p| String::from(*p)).collect(),
        ));
        self
    }

    pub fn build(self) -> Result<Universe, Error> {
        let invalid = |m: String| Err(Error::SpecInvalid(m));
        let mut messages = BTreeMap::new();
        for decl in self.messages {
            if decl.kind.is_raw() {
                return invalid(format!("`{}` is reserved", decl.kind));
            }
            if messages.insert(decl.kind.clone(), decl.clone()).is_some() {
                return invalid(format!("message `{}` declared twice", decl.kind));
            }
        }
        let mut own: BTreeMap<String, Vec<Kind>> = BTreeMap::new();
        let mut parents: BTreeMap<String, Vec<String>> = BTreeMap::new();
        for (name, kinds, ps) in &self.interfaces {
            if own.insert(name.clone(), kinds.clone()).is_some() {
                return invalid(format!("interface `{name}` declared twice"));
            }
            for k in kinds {
                if !messages.contains_key(k) {
                    return invalid(format!("interface `{name}` uses undeclared message `{k}`"));
                }
            }
            parents.insert(name.clone(), ps.clone());
        }
        let mut children: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
        for (name, ps) in &parents {
            for p in ps {
                if !own.contains_key(p) {
                    return invalid(format!("interface `{name}` extends unknown `{p}`"));
                }
                children.entry(p.as_str()).or_default().push(name.as_str());
            }
        }

        let mut materialized: BTreeMap<String, BTreeSet<Kind>> = BTreeMap::new();
        for name in own.keys() {
            let mut on_path = BTreeSet::new();
            collect(name, &own, &children, &mut on_path, &mut materialized)?;
        }
        let interfaces = materialized
            .into_iter()
            .map(|(name, kinds)| {
                let iface = Interface::new(&name, kinds);
                (name, iface)
            })
            .collect();
        Ok(Universe {
            messages,
            interfaces,
            own,
            parents,
        })
    }
}

fn collect(
    name: &str,
    own: &BTreeMap<String, Vec<Kind>>,
    children: &BTreeMap<&str, Vec<&str>>,
    on_path: &mut BTreeSet<String>,
    done: &mut BTreeMap<String, BTreeSet<Kind>>,
) -> Result<BTreeSet<Kind>, Error> {
    if let Some(kinds) = done.get(name) {
        return Ok(kinds.clone());
    }
    if !on_path.insert(name.into()) {
        return Err(Error::SpecInvalid(format!(
            "interface hierarchy has a cycle through `{name}`"
        )));
    }
    let mut kinds: BTreeSet<Kind> = own[name].iter().cloned().collect();
    for child in children.get(name).into_iter().flatten() {
        kinds.extend(collect(child, own, children, on_path, done)?);
    }
    on_path.remove(name);
    done.insert(name.into(), kinds.clone());
    Ok(kinds)
}

/// Shared at-most-once gate of an affine reference and its views.
#[derive(Clone, Default)]
pub(crate) struct Affinity(Option<Rc<Cell<bool>>>);

impl Affinity {
    pub(crate) fn new(affine: bool) -> Self {
        Affinity(affine.then(|| Rc::new(Cell::new(false))))
    }

    pub(crate) fn is_affine(&self) -> bool {
        self.0.is_some()
    }

    pub(crate) fn is_used(&self) -> bool {
        self.0.as_ref().is_some_and(|u| u.get())
    }

    /// Claims the single use. Fails if it was already claimed.
    pub(crate) fn claim(&self, interface: &Interface) -> Result<(), Error> {
        match &self.0 {
            Some(used) if used.replace(true) => Err(Error::AffinityViolation {
                interface: interface.name().into(),
            }),
            _ => Ok(()),
        }
    }
}

pub(crate) fn check_member(interface: &Interface, message: &Message) -> Result<(), Error> {
    if interface.contains(message.kind()) {
        Ok(())
    } else {
        Err(Error::MessageNotInInterface {
            kind: message.kind().clone(),
            interface: interface.name().into(),
        })
    }
}

/// Reference to an actor, typed at one of its interfaces.
///
/// Clones and narrowed views of an affine reference share its single use.
#[derive(Clone)]
pub struct TypedRef {
    target: ActorRef,
    interface: Interface,
    affinity: Affinity,
}

impl TypedRef {
    pub fn new(target: ActorRef, interface: Interface) -> Self {
        TypedRef {
            target,
            interface,
            affinity: Affinity::new(false),
        }
    }

    /// A reference that allows at most one successful send.
    pub fn affine(target: ActorRef, interface: Interface) -> Self {
        TypedRef {
            target,
            interface,
            affinity: Affinity::new(true),
        }
    }

    pub fn interface(&self) -> &Interface {
        &self.interface
    }

    pub fn target(&self) -> &ActorRef {
        &self.target
    }

    pub fn is_affine(&self) -> bool {
        self.affinity.is_affine()
    }

    pub fn is_used(&self) -> bool {
        self.affinity.is_used()
    }

    /// Sends `message` if its kind belongs to the interface.
    pub fn ty_tell(&self, message: Message) -> Result<(), Error> {
        check_member(&self.interface, &message)?;
        self.affinity.claim(&self.interface)?;
        self.target.tell(message);
        Ok(())
    }

    /// A view of the same actor at a smaller interface.
    pub fn narrow(&self, expected: &Interface) -> Result<TypedRef, Error> {
        if !substitutable(&self.interface, expected) {
            return Err(Error::SubstitutionUnsafe {
                actual: self.interface.name().into(),
                expected: expected.name().into(),
            });
        }
        Ok(TypedRef {
            target: self.target.clone(),
            interface: expected.clone(),
            affinity: self.affinity.clone(),
        })
    }
}

impl fmt::Debug for TypedRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TypedRef")
            .field("target", &self.target)
            .field("interface", &self.interface)
            .field("affine", &self.is_affine())
            .field("used", &self.is_used())
            .finish()
    }
}
