//! Typestate-oriented actors with a chemical mailbox.
//!
//! An actor exposes a different interface (set of accepted message kinds) in
//! each of its states. Clients talk to it through references typed at an
//! interface; with a [`ProtocolTable`] each send yields a [`Continuation`]
//! that resolves, once the actor has handled the message, to a fresh
//! reference typed at the successor interface. Actors that opt into the
//! chemical semantics keep protocol messages that arrive in the wrong state
//! and replay them when their state changes, so several concurrent clients
//! can share one stateful actor.
//!
//! The crate is `no_std` and only needs `alloc`. Everything runs on a
//! single-threaded, seeded scheduler ([`System`]), which makes every
//! interleaving reproducible from its seed.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

mod error;

pub mod chemical;
pub mod protocol;
pub mod runtime;
pub mod spec;
pub mod typed;
pub mod typed_ref;

pub use chemical::{ChemicalVariant, RetainedSet};
pub use error::Error;
pub use protocol::{Continuation, ProtRef, ProtocolTable, Reply};
pub use runtime::{
    ActorId, ActorRef, Behavior, Context, DeadLetter, Deferred, Envelope, Failure, Fault, Handling,
    Kind, Message, Outcome, RunReport, RunStatus, System, TraceEvent, Value,
};
pub use spec::{ProtocolSpec, SpecDraft, Trace, TraceStep, Verdict};
pub use typed_ref::{substitutable, Interface, MessageDecl, TypedRef, Universe};
