use alloc::rc::Rc;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use super::ActorId;
use crate::protocol::Reply;

const RAW: &str = "<raw>";

/// Name of a message kind (`insert`, `remove`, `add`, ...).
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Kind(Rc<str>);

impl Kind {
    pub fn new(name: &str) -> Self {
        Kind(Rc::from(name))
    }

    /// The distinguished kind of untyped payloads sent with a bare `tell`.
    pub fn raw() -> Self {
        Kind(Rc::from(RAW))
    }

    pub fn is_raw(&self) -> bool {
        &*self.0 == RAW
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Kind {
    fn from(name: &str) -> Self {
        Kind::new(name)
    }
}

/// A payload value carried by a message.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Value {
    Int(i64),
    Text(String),
}

impl Value {
    pub fn as_int(&self) -> Option<i64> {
        match self {
            Value::Int(v) => Some(*v),
            Value::Text(_) => None,
        }
    }

    pub fn as_text(&self) -> Option<&str> {
        match self {
            Value::Text(s) => Some(s),
            Value::Int(_) => None,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(v) => write!(f, "{v}"),
            Value::Text(s) => f.write_str(s),
        }
    }
}

impl From<i64> for Value {
    fn from(v: i64) -> Self {
        Value::Int(v)
    }
}

impl From<&str> for Value {
    fn from(s: &str) -> Self {
        Value::Text(s.into())
    }
}

impl From<String> for Value {
    fn from(s: String) -> Self {
        Value::Text(s)
    }
}

/// A kind tag plus its payload values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Message {
    kind: Kind,
    args: Vec<Value>,
}

impl Message {
    pub fn new(kind: impl Into<Kind>) -> Self {
        Message {
            kind: kind.into(),
            args: Vec::new(),
        }
    }

    /// An untyped payload, like sending a bare `4` to an actor.
    pub fn raw(value: impl Into<Value>) -> Self {
        Message::new(Kind::raw()).arg(value)
    }

    pub fn arg(mut self, value: impl Into<Value>) -> Self {
        self.args.push(value.into());
        self
    }

    pub fn kind(&self) -> &Kind {
        &self.kind
    }

    pub fn args(&self) -> &[Value] {
        &self.args
    }

    pub fn int(&self, index: usize) -> Option<i64> {
        self.args.get(index).and_then(Value::as_int)
    }

    pub fn text(&self, index: usize) -> Option<&str> {
        self.args.get(index).and_then(Value::as_text)
    }

    /// Comma-separated payload, as shown in traces.
    pub fn summary(&self) -> String {
        use core::fmt::Write;
        let mut out = String::new();
        for (i, a) in self.args.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            let _ = write!(out, "{a}");
        }
        out
    }
}

impl fmt::Display for Message {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.kind.is_raw() {
            return write!(f, "{}", self.summary());
        }
        write!(f, "{}({})", self.kind, self.summary())
    }
}

/// A message bound for an actor, optionally carrying the continuation cell
/// the actor completes when it handles the message.
#[derive(Debug)]
pub struct Envelope {
    pub(crate) target: ActorId,
    pub(crate) sender: Option<ActorId>,
    pub(crate) message: Message,
    pub(crate) reply: Option<Reply>,
}

impl Envelope {
    pub fn target(&self) -> ActorId {
        self.target
    }

    pub fn sender(&self) -> Option<ActorId> {
        self.sender
    }

    pub fn message(&self) -> &Message {
        &self.message
    }

    pub fn kind(&self) -> &Kind {
        self.message.kind()
    }

    pub fn reply(&self) -> Option<&Reply> {
        self.reply.as_ref()
    }

    /// Splits the envelope into its message and continuation cell.
    pub fn into_parts(self) -> (Message, Option<Reply>) {
        (self.message, self.reply)
    }
}
