//! Protocol tables and continuation-typed references.
//!
//! A [`ProtocolTable`] maps each message kind to the interface a client holds
//! after sending it. Sending through a [`ProtRef`] looks the successor up at
//! send time and returns a [`Continuation`] immediately; the actor resolves
//! it while handling the message by supplying a fresh reference, which must
//! be typed at exactly that successor.

use alloc::collections::BTreeMap;
use alloc::rc::Rc;
use alloc::string::{String, ToString};
use core::fmt;

use crate::runtime::{ActorRef, Context, Deferred, Failure, Kind, Message};
use crate::typed_ref::{check_member, substitutable, Affinity, Interface};
use crate::Error;

struct TableDef {
    name: String,
    entries: BTreeMap<Kind, Interface>,
}

/// Message kind → successor interface.
#[derive(Clone)]
pub struct ProtocolTable(Rc<TableDef>);

impl ProtocolTable {
    pub fn new<K: Into<Kind>>(name: &str, entries: impl IntoIterator<Item = (K, Interface)>) -> Self {
        ProtocolTable(Rc::new(TableDef {
            name: name.to_string(),
            entries: entries.into_iter().map(|(k, i)| (k.into(), i)).collect(),
        }))
    }

    pub fn name(&self) -> &str {
        &self.0.name
    }

    /// Successor interface after sending `kind`.
    pub fn next(&self, kind: &Kind) -> Option<&Interface> {
        self.0.entries.get(kind)
    }

    pub fn entries(&self) -> impl Iterator<Item = (&Kind, &Interface)> {
        self.0.entries.iter()
    }

    pub fn len(&self) -> usize {
        self.0.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.entries.is_empty()
    }

    /// Fails unless every kind of `interface` has an entry.
    pub fn check_total(&self, interface: &Interface) -> Result<(), Error> {
        match interface.kinds().iter().find(|k| self.next(k).is_none()) {
            Some(kind) => Err(Error::TableNotTotal {
                table: self.name().into(),
                kind: kind.clone(),
            }),
            None => Ok(()),
        }
    }
}

impl PartialEq for ProtocolTable {
    fn eq(&self, other: &Self) -> bool {
        Rc::ptr_eq(&self.0, &other.0)
            || (self.0.name == other.0.name && self.0.entries == other.0.entries)
    }
}

impl Eq for ProtocolTable {}

impl fmt::Debug for ProtocolTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0.name)?;
        f.debug_map()
            .entries(self.0.entries.iter().map(|(k, i)| (k, i.name())))
            .finish()
    }
}

/// A reference to a stateful actor at one protocol state, carrying the
/// protocol table that determines its successors.
#[derive(Clone)]
pub struct ProtRef {
    target: ActorRef,
    interface: Interface,
    table: ProtocolTable,
    affinity: Affinity,
}

impl ProtRef {
    /// Fails with `TABLE_NOT_TOTAL` if the table lacks a kind of `interface`.
    pub fn new(target: ActorRef, interface: Interface, table: ProtocolTable) -> Result<Self, Error> {
        Self::build(target, interface, table, false)
    }

    /// An affine reference: at most one send.
    pub fn affine(target: ActorRef, interface: Interface, table: ProtocolTable) -> Result<Self, Error> {
        Self::build(target, interface, table, true)
    }

    fn build(
        target: ActorRef,
        interface: Interface,
        table: ProtocolTable,
        affine: bool,
    ) -> Result<Self, Error> {
        table.check_total(&interface)?;
        Ok(ProtRef {
            target,
            interface,
            table,
            affinity: Affinity::new(affine),
        })
    }

    pub fn interface(&self) -> &Interface {
        &self.interface
    }

    pub fn table(&self) -> &ProtocolTable {
        &self.table
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

    /// Sends `message` together with a fresh continuation cell and returns
    /// the continuation without waiting for the actor.
    pub fn tell(&self, message: Message) -> Result<Continuation, Error> {
        check_member(&self.interface, &message)?;
        let next = self
            .table
            .next(message.kind())
            .cloned()
            .ok_or_else(|| Error::TableNotTotal {
                table: self.table.name().into(),
                kind: message.kind().clone(),
            })?;
        self.affinity.claim(&self.interface)?;
        let cell = match self.target.system() {
            Some(system) => system.deferred(),
            None => Deferred::detached(),
        };
        let reply = Reply {
            cell: cell.clone(),
            next: next.clone(),
            table: self.table.clone(),
            affine: self.is_affine(),
        };
        self.target.post(message, Some(reply));
        Ok(Continuation {
            next: Some(next),
            cell,
        })
    }

    /// A view at a smaller interface. The table must cover it.
    pub fn narrow(&self, expected: &Interface) -> Result<ProtRef, Error> {
        if !substitutable(&self.interface, expected) {
            return Err(Error::SubstitutionUnsafe {
                actual: self.interface.name().into(),
                expected: expected.name().into(),
            });
        }
        self.table.check_total(expected)?;
        Ok(ProtRef {
            target: self.target.clone(),
            interface: expected.clone(),
            table: self.table.clone(),
            affinity: self.affinity.clone(),
        })
    }

    /// Certifies that the reference is at exactly `expected`.
    pub fn expect_state(self, expected: &Interface) -> Result<ProtRef, Error> {
        if self.interface == *expected {
            Ok(self)
        } else {
            Err(Error::StateMismatch {
                expected: expected.name().into(),
                actual: self.interface.name().into(),
            })
        }
    }
}

impl fmt::Debug for ProtRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProtRef")
            .field("target", &self.target)
            .field("interface", &self.interface.name())
            .field("table", &self.table.name())
            .field("affine", &self.is_affine())
            .field("used", &self.is_used())
            .finish()
    }
}

/// The continuation cell travelling with a protocol message.
pub struct Reply {
    cell: Deferred<ProtRef>,
    next: Interface,
    table: ProtocolTable,
    affine: bool,
}

impl Reply {
    /// Interface the actor must resolve the continuation at.
    pub fn next_interface(&self) -> &Interface {
        &self.next
    }

    /// Table of the reference the message was sent through.
    pub fn table(&self) -> &ProtocolTable {
        &self.table
    }

    pub fn is_affine(&self) -> bool {
        self.affine
    }

    pub fn is_resolved(&self) -> bool {
        self.cell.is_completed()
    }
}

impl fmt::Debug for Reply {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Reply")
            .field("next", &self.next.name())
            .field("table", &self.table.name())
            .field("cell", &self.cell)
            .finish()
    }
}

impl<S: 'static> Context<'_, S> {
    /// Completes the continuation carried by the envelope being handled.
    ///
    /// Fails with `PROTOCOL_BREACH` when `next` is not typed at the
    /// successor fixed at send time, and with `DOUBLE_COMPLETION` when the
    /// continuation was already resolved.
    pub fn resolve(&mut self, reply: &Reply, next: ProtRef) -> Result<(), Error> {
        if next.interface != reply.next {
            return Err(Error::ProtocolBreach {
                expected: reply.next.name().into(),
                actual: next.interface.name().into(),
            });
        }
        reply.cell.complete(next)
    }

    /// A reference to this actor at `interface`, using the table and
    /// affinity of the client that sent `reply`.
    pub fn continuation_ref(&self, reply: &Reply, interface: &Interface) -> Result<ProtRef, Error> {
        ProtRef::build(
            self.self_ref(),
            interface.clone(),
            reply.table.clone(),
            reply.affine,
        )
    }
}

/// A pending reference at the successor state of a sent message.
#[derive(Clone)]
pub struct Continuation {
    next: Option<Interface>,
    cell: Deferred<ProtRef>,
}

impl Continuation {
    /// Successor interface, when known at send time. Composites built with
    /// [`then`](Self::then) only learn it when they resolve.
    pub fn next_interface(&self) -> Option<&Interface> {
        self.next.as_ref()
    }

    pub fn deferred(&self) -> &Deferred<ProtRef> {
        &self.cell
    }

    pub fn is_resolved(&self) -> bool {
        self.cell.is_completed()
    }

    pub fn peek(&self) -> Option<Result<ProtRef, Failure>> {
        self.cell.peek()
    }

    /// `f` applied to the resolved reference.
    pub fn map<T: Clone + 'static>(&self, f: impl FnOnce(ProtRef) -> T + 'static) -> Deferred<T> {
        self.cell.map(f)
    }

    /// Sequencing: once this continuation resolves, `f` performs the next
    /// send. The composite resolves with the result of that send. An error
    /// from `f`, or an upstream failure, fails the composite.
    pub fn then(
        &self,
        f: impl FnOnce(ProtRef) -> Result<Continuation, Error> + 'static,
    ) -> Continuation {
        let out: Deferred<ProtRef> = self.cell.sibling();
        let sink = out.clone();
        self.cell.on_complete(move |r| match r {
            Ok(resolved) => match f(resolved) {
                Ok(inner) => {
                    let sink = sink.clone();
                    inner.cell.on_complete(move |r| {
                        let _ = sink.settle(r);
                    });
                }
                Err(e) => {
                    let _ = sink.fail(Failure::Error(e));
                }
            },
            Err(failure) => {
                let _ = sink.fail(failure);
            }
        });
        Continuation {
            next: None,
            cell: out,
        }
    }

    /// Resolves like `self` when `pred` holds, otherwise fails with
    /// [`Failure::Filtered`] and every later step is skipped.
    pub fn filter(&self, pred: impl FnOnce(&ProtRef) -> bool + 'static) -> Continuation {
        let out: Deferred<ProtRef> = self.cell.sibling();
        let sink = out.clone();
        self.cell.on_complete(move |r| {
            let r = match r {
                Ok(resolved) if pred(&resolved) => Ok(resolved),
                Ok(_) => Err(Failure::Filtered),
                Err(failure) => Err(failure),
            };
            let _ = sink.settle(r);
        });
        Continuation {
            next: self.next.clone(),
            cell: out,
        }
    }
}

impl fmt::Debug for Continuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Continuation")
            .field("next", &self.next.as_ref().map(Interface::name))
            .field("cell", &self.cell)
            .finish()
    }
}
