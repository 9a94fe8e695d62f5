//! Compile-time typestate layer.
//!
//! Interfaces become zero-sized types, message kinds become Rust types, and a
//! protocol maps each message type to the interface type reached after
//! sending it. A send through a [`Session`] consumes the session and yields
//! a [`Pending`] typed at the successor, so protocol order is checked by the
//! compiler and a session cannot be used twice. The dynamic checks of
//! [`TypedRef`] and [`ProtRef`] still run underneath.
//!
//! ```
//! use tsactor_core::typed::{Pending, Ref, Session, TypedMessage};
//! use tsactor_core::{includes, interface, protocol, Message, System};
//!
//! struct Insert(i64);
//! struct Remove;
//! impl TypedMessage for Insert {
//!     const KIND: &'static str = "insert";
//!     fn into_message(self) -> Message { Message::new("insert").arg(self.0) }
//! }
//! impl TypedMessage for Remove {
//!     const KIND: &'static str = "remove";
//!     fn into_message(self) -> Message { Message::new("remove") }
//! }
//! interface!(BufferInterf { Insert, Remove });
//! interface!(ProduceInt { Insert });
//! interface!(ConsumeInt { Remove });
//! includes!(BufferInterf => ProduceInt, ConsumeInt);
//! protocol!(SingleUser { Insert => ConsumeInt, Remove => ProduceInt });
//!
//! let system = System::new(7);
//! let buffer = system.spawn_client("buffer");
//! let all: Ref<BufferInterf> = Ref::new(buffer.clone());
//! all.tell(Insert(4)).unwrap();
//! let producer: Ref<ProduceInt> = all.narrow();
//! producer.tell(Insert(5)).unwrap();
//!
//! let session: Session<SingleUser, ProduceInt> = Session::new(buffer).unwrap();
//! let _chain: Pending<SingleUser, ProduceInt> = session
//!     .tell(Insert(0))
//!     .unwrap()
//!     .then(|o| o.tell(Remove));
//! ```
//!
//! Messages outside the interface do not compile:
//!
//! ```compile_fail
//! # use tsactor_core::typed::{Ref, TypedMessage};
//! # use tsactor_core::{interface, Message, System};
//! # struct Insert(i64);
//! # struct Remove;
//! # impl TypedMessage for Insert { const KIND: &'static str = "insert"; fn into_message(self) -> Message { Message::new("insert").arg(self.0) } }
//! # impl TypedMessage for Remove { const KIND: &'static str = "remove"; fn into_message(self) -> Message { Message::new("remove") } }
//! # interface!(BufferInterf { Insert, Remove });
//! # let system = System::new(0);
//! let buffer: Ref<BufferInterf> = Ref::new(system.spawn_client("buffer"));
//! buffer.tell(4);
//! ```
//!
//! ```compile_fail
//! # use tsactor_core::typed::{Ref, TypedMessage};
//! # use tsactor_core::{interface, Message, System};
//! # struct Insert(i64);
//! # struct Remove;
//! # impl TypedMessage for Insert { const KIND: &'static str = "insert"; fn into_message(self) -> Message { Message::new("insert").arg(self.0) } }
//! # impl TypedMessage for Remove { const KIND: &'static str = "remove"; fn into_message(self) -> Message { Message::new("remove") } }
//! # interface!(ConsumeInt { Remove });
//! # let system = System::new(0);
//! let o: Ref<ConsumeInt> = Ref::new(system.spawn_client("buffer"));
//! o.tell(Insert(9));
//! ```
//!
//! Two consecutive removes do not compile:
//!
//! ```compile_fail
//! # use tsactor_core::typed::{Session, TypedMessage};
//! # use tsactor_core::{interface, protocol, Message, System};
//! # struct Insert(i64);
//! # struct Remove;
//! # impl TypedMessage for Insert { const KIND: &'static str = "insert"; fn into_message(self) -> Message { Message::new("insert").arg(self.0) } }
//! # impl TypedMessage for Remove { const KIND: &'static str = "remove"; fn into_message(self) -> Message { Message::new("remove") } }
//! # interface!(ProduceInt { Insert });
//! # interface!(ConsumeInt { Remove });
//! # protocol!(SingleUser { Insert => ConsumeInt, Remove => ProduceInt });
//! # let system = System::new(0);
//! let s: Session<SingleUser, ConsumeInt> = Session::new(system.spawn_client("b")).unwrap();
//! s.tell(Remove).unwrap().then(|o| o.tell(Remove));
//! ```
//!
//! Nor does reusing a session after a send:
//!
//! ```compile_fail
//! # use tsactor_core::typed::{Session, TypedMessage};
//! # use tsactor_core::{interface, protocol, Message, System};
//! # struct Insert(i64);
//! # struct Remove;
//! # impl TypedMessage for Insert { const KIND: &'static str = "insert"; fn into_message(self) -> Message { Message::new("insert").arg(self.0) } }
//! # impl TypedMessage for Remove { const KIND: &'static str = "remove"; fn into_message(self) -> Message { Message::new("remove") } }
//! # interface!(ProduceInt { Insert });
//! # interface!(ConsumeInt { Remove });
//! # protocol!(SingleUser { Insert => ConsumeInt, Remove => ProduceInt });
//! # let system = System::new(0);
//! let s: Session<SingleUser, ProduceInt> = Session::new(system.spawn_client("b")).unwrap();
//! let _ = s.tell(Insert(1));
//! let _ = s.tell(Insert(2));
//! ```

use core::fmt;
use core::marker::PhantomData;

use crate::protocol::{Continuation, ProtRef, ProtocolTable};
use crate::runtime::{ActorRef, Deferred, Failure, Message};
use crate::typed_ref::{Interface, TypedRef};
use crate::Error;

/// Zero-sized tag naming a protocol and an interface without owning either.
type Marker<A, B> = PhantomData<(fn(A), fn(B))>;

/// A message type with a fixed kind.
pub trait TypedMessage {
    const KIND: &'static str;
    fn into_message(self) -> Message;
}

/// An interface type.
pub trait State: 'static {
    const NAME: &'static str;
    const KINDS: &'static [&'static str];

    fn interface() -> Interface {
        Interface::new(Self::NAME, Self::KINDS.iter().copied())
    }
}

/// The interface accepts messages of type `M`.
pub trait Accepts<M>: State {}

/// `Self` accepts every message `J` accepts, so a reference at `Self` can be
/// viewed at `J`.
pub trait Includes<J: State>: State {}

impl<I: State> Includes<I> for I {}

/// A protocol: its dynamic table plus one [`Step`] per message type.
pub trait Protocol: 'static {
    fn table() -> ProtocolTable;
}

/// Successor interface after sending `M`.
pub trait Step<M>: Protocol {
    type Next: State;
}

/// Declares a unit struct implementing [`State`] and [`Accepts`] for the
/// listed message types.
#[macro_export]
macro_rules! interface {
    ($(#[$meta:meta])* $vis:vis $name:ident { $($msg:ty),* $(,)? }) => {
        $(#[$meta])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq)]
        $vis struct $name;

        impl $crate::typed::State for $name {
            const NAME: &'static str = stringify!($name);
            const KINDS: &'static [&'static str] =
                &[$(<$msg as $crate::typed::TypedMessage>::KIND),*];
        }

        $(impl $crate::typed::Accepts<$msg> for $name {})*
    };
}

/// Declares that the first interface includes each of the others.
#[macro_export]
macro_rules! includes {
    ($sup:ty => $($sub:ty),+ $(,)?) => {
        $(impl $crate::typed::Includes<$sub> for $sup {})+
    };
}

/// Declares a protocol type mapping message types to successor interfaces.
#[macro_export]
macro_rules! protocol {
    ($(#[$meta:meta])* $vis:vis $name:ident { $($msg:ty => $next:ty),* $(,)? }) => {
        $(#[$meta])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq)]
        $vis struct $name;

        impl $crate::typed::Protocol for $name {
            fn table() -> $crate::ProtocolTable {
                $crate::ProtocolTable::new(
                    stringify!($name),
                    [$((
                        <$msg as $crate::typed::TypedMessage>::KIND,
                        <$next as $crate::typed::State>::interface(),
                    )),*],
                )
            }
        }

        $(impl $crate::typed::Step<$msg> for $name {
            type Next = $next;
        })*
    };
}

/// A [`TypedRef`] whose interface is known at compile time.
pub struct Ref<I> {
    inner: TypedRef,
    _state: PhantomData<fn(I)>,
}

impl<I> Clone for Ref<I> {
    fn clone(&self) -> Self {
        Ref {
            inner: self.inner.clone(),
            _state: PhantomData,
        }
    }
}

impl<I: State> Ref<I> {
    pub fn new(target: ActorRef) -> Self {
        Ref {
            inner: TypedRef::new(target, I::interface()),
            _state: PhantomData,
        }
    }

    /// Lifts a dynamic reference, checking its interface is exactly `I`.
    pub fn certify(inner: TypedRef) -> Result<Self, Error> {
        if *inner.interface() != I::interface() {
            return Err(Error::StateMismatch {
                expected: I::NAME.into(),
                actual: inner.interface().name().into(),
            });
        }
        Ok(Ref {
            inner,
            _state: PhantomData,
        })
    }

    pub fn tell<M: TypedMessage>(&self, message: M) -> Result<(), Error>
    where
        I: Accepts<M>,
    {
        self.inner.ty_tell(message.into_message())
    }

    /// # Panics
    ///
    /// If the `Includes` declaration contradicts the declared kinds.
    pub fn narrow<J: State>(&self) -> Ref<J>
    where
        I: Includes<J>,
    {
        let inner = self
            .inner
            .narrow(&J::interface())
            .expect("`Includes` impl contradicts the interfaces' kinds");
        Ref {
            inner,
            _state: PhantomData,
        }
    }

    pub fn dynamic(&self) -> &TypedRef {
        &self.inner
    }
}

impl<I: State> fmt::Debug for Ref<I> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Ref<{}>({:?})", I::NAME, self.inner.target())
    }
}

/// A protocol reference at compile-time state `I`. Sending consumes it.
pub struct Session<P, I> {
    inner: ProtRef,
    _marker: Marker<P, I>,
}

impl<P: Protocol, I: State> Session<P, I> {
    pub fn new(target: ActorRef) -> Result<Self, Error> {
        Self::certify(ProtRef::new(target, I::interface(), P::table())?)
    }

    pub fn certify(inner: ProtRef) -> Result<Self, Error> {
        let inner = inner.expect_state(&I::interface())?;
        Ok(Session {
            inner,
            _marker: PhantomData,
        })
    }

    pub fn tell<M: TypedMessage>(self, message: M) -> Result<Pending<P, P::Next>, Error>
    where
        I: Accepts<M>,
        P: Step<M>,
    {
        Ok(Pending {
            cont: self.inner.tell(message.into_message())?,
            _marker: PhantomData,
        })
    }

    pub fn into_inner(self) -> ProtRef {
        self.inner
    }
}

impl<P, I: State> fmt::Debug for Session<P, I> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Session<{}>({:?})", I::NAME, self.inner.target())
    }
}

/// A continuation whose successor state is known at compile time.
pub struct Pending<P, N> {
    cont: Continuation,
    _marker: Marker<P, N>,
}

impl<P: Protocol, N: State> Pending<P, N> {
    /// Next step of the chain, run once the actor has resolved this one.
    pub fn then<N2: State>(
        self,
        f: impl FnOnce(Session<P, N>) -> Result<Pending<P, N2>, Error> + 'static,
    ) -> Pending<P, N2> {
        let cont = self.cont.then(move |resolved| {
            let session = Session::certify(resolved)?;
            Ok(f(session)?.cont)
        });
        Pending {
            cont,
            _marker: PhantomData,
        }
    }

    /// `f` applied to the resolved session.
    pub fn map<T: Clone + 'static>(self, f: impl FnOnce(Session<P, N>) -> T + 'static) -> Deferred<T> {
        let out: Deferred<T> = self.cont.deferred().sibling();
        let sink = out.clone();
        self.cont.deferred().on_complete(move |r| {
            let r = r.and_then(|resolved| Session::certify(resolved).map_err(Failure::Error));
            let _ = sink.settle(r.map(f));
        });
        out
    }

    pub fn continuation(&self) -> &Continuation {
        &self.cont
    }
}
