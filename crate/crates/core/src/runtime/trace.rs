use alloc::rc::Rc;
use alloc::string::String;
use core::fmt;

use super::{ActorId, Kind, Message};
use crate::Error;

/// What became of one delivered envelope.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Outcome {
    Handled,
    Stashed,
    DeadLetter,
}

impl Outcome {
    pub fn as_str(self) -> &'static str {
        match self {
            Outcome::Handled => "handled",
            Outcome::Stashed => "stashed",
            Outcome::DeadLetter => "dead-letter",
        }
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One envelope taken out of a mailbox and matched against a behavior.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Handling {
    pub step: u64,
    pub actor: ActorId,
    pub actor_name: Rc<str>,
    /// Behavior (protocol state) current when the envelope was matched.
    pub state: Rc<str>,
    pub kind: Kind,
    pub outcome: Outcome,
    /// Name of the sending actor, when the send happened in an actor context.
    pub client: Option<Rc<str>>,
    pub payload: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TraceEvent {
    Message(Handling),
    /// `count` stashed envelopes were returned to the mailbox.
    Flush {
        step: u64,
        actor: ActorId,
        actor_name: Rc<str>,
        count: usize,
    },
}

impl TraceEvent {
    pub fn step(&self) -> u64 {
        match self {
            TraceEvent::Message(h) => h.step,
            TraceEvent::Flush { step, .. } => *step,
        }
    }

    pub fn actor(&self) -> ActorId {
        match self {
            TraceEvent::Message(h) => h.actor,
            TraceEvent::Flush { actor, .. } => *actor,
        }
    }

    pub fn as_handling(&self) -> Option<&Handling> {
        match self {
            TraceEvent::Message(h) => Some(h),
            TraceEvent::Flush { .. } => None,
        }
    }
}

/// A message dropped because no behavior handled it and it was not retained.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeadLetter {
    pub actor: ActorId,
    pub message: Message,
}

/// An error returned by a handler body.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fault {
    pub step: u64,
    pub actor: ActorId,
    pub error: Error,
}
