use alloc::boxed::Box;
use alloc::rc::Rc;
use alloc::string::String;
use alloc::vec::Vec;
use core::any::Any;
use core::fmt;

use super::{ActorId, ActorRef, Envelope, Kind, System};
use crate::chemical::RetainedSet;
use crate::Error;

/// Handler body of one case of a behavior.
pub type Handler<S> = dyn Fn(&mut S, &mut Context<'_, S>, Envelope) -> Result<(), Error>;

/// A partial function from messages to handler bodies, keyed by kind.
///
/// A behavior is defined exactly on the kinds it has a case for; any other
/// message is unhandled and never reaches a handler. The name is the
/// protocol state the behavior implements and shows up in traces.
pub struct Behavior<S> {
    name: Rc<str>,
    cases: Vec<(Kind, Rc<Handler<S>>)>,
    pub(crate) retained: Option<RetainedSet>,
}

impl<S> Clone for Behavior<S> {
    fn clone(&self) -> Self {
        Behavior {
            name: Rc::clone(&self.name),
            cases: self.cases.clone(),
            retained: self.retained.clone(),
        }
    }
}

impl<S> fmt::Debug for Behavior<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Behavior")
            .field("name", &self.name)
            .field("kinds", &self.cases.iter().map(|(k, _)| k).collect::<Vec<_>>())
            .field("retained", &self.retained)
            .finish()
    }
}

impl<S: 'static> Behavior<S> {
    /// A behavior with no cases: every message is unhandled.
    pub fn new(name: &str) -> Self {
        Behavior {
            name: Rc::from(name),
            cases: Vec::new(),
            retained: None,
        }
    }

    /// Adds a case for `kind`. If two cases share a kind the first one wins.
    pub fn on<F>(mut self, kind: impl Into<Kind>, handler: F) -> Self
    where
        F: Fn(&mut S, &mut Context<'_, S>, Envelope) -> Result<(), Error> + 'static,
    {
        self.cases.push((kind.into(), Rc::new(handler)));
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn handles(&self, kind: &Kind) -> bool {
        self.cases.iter().any(|(k, _)| k == kind)
    }

    pub fn kinds(&self) -> impl Iterator<Item = &Kind> {
        self.cases.iter().map(|(k, _)| k)
    }

    fn handler(&self, kind: &Kind) -> Option<Rc<Handler<S>>> {
        self.cases
            .iter()
            .find(|(k, _)| k == kind)
            .map(|(_, h)| Rc::clone(h))
    }
}

/// Handle given to a handler while it processes one envelope.
pub struct Context<'a, S> {
    system: &'a System,
    me: ActorId,
    sender: Option<ActorId>,
    pub(crate) next: Option<Behavior<S>>,
    pub(crate) flush: bool,
}

impl<'a, S: 'static> Context<'a, S> {
    pub fn system(&self) -> &System {
        self.system
    }

    pub fn id(&self) -> ActorId {
        self.me
    }

    pub fn self_ref(&self) -> ActorRef {
        self.system.actor_ref(self.me)
    }

    pub fn sender(&self) -> Option<ActorRef> {
        self.sender.map(|id| self.system.actor_ref(id))
    }

    /// Replaces the behavior from the next message on. The running handler
    /// completes first.
    pub fn become_behavior(&mut self, behavior: Behavior<S>) {
        self.next = Some(behavior);
    }

    /// Appends a line to the system's output log.
    pub fn emit(&self, line: impl Into<String>) {
        self.system.emit(line);
    }
}

pub(crate) enum Receipt {
    Handled { flush: bool, fault: Option<Error> },
    Stash(Envelope),
    DeadLetter(Envelope),
}

pub(crate) trait Cell {
    fn receive(&mut self, system: &System, me: ActorId, envelope: Envelope) -> Receipt;
    fn state_name(&self) -> Rc<str>;
    fn state(&self) -> &dyn Any;
}

pub(crate) struct ActorCell<S> {
    pub(crate) state: S,
    pub(crate) behavior: Behavior<S>,
}

impl<S: 'static> Cell for ActorCell<S> {
    fn receive(&mut self, system: &System, me: ActorId, envelope: Envelope) -> Receipt {
        let Some(handler) = self.behavior.handler(envelope.kind()) else {
            return if self.behavior.retains(envelope.kind()) {
                Receipt::Stash(envelope)
            } else {
                Receipt::DeadLetter(envelope)
            };
        };
        let mut ctx = Context {
            system,
            me,
            sender: envelope.sender,
            next: None,
            flush: false,
        };
        let result = handler(&mut self.state, &mut ctx, envelope);
        if let Some(next) = ctx.next {
            self.behavior = next;
        }
        Receipt::Handled {
            flush: ctx.flush,
            fault: result.err(),
        }
    }

    fn state_name(&self) -> Rc<str> {
        Rc::clone(&self.behavior.name)
    }

    fn state(&self) -> &dyn Any {
        &self.state
    }
}

pub(crate) fn boxed<S: 'static>(state: S, behavior: Behavior<S>) -> Box<dyn Cell> {
    Box::new(ActorCell { state, behavior })
}
