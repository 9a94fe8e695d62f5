use alloc::boxed::Box;
use alloc::rc::{Rc, Weak};
use alloc::vec::Vec;
use core::cell::RefCell;
use core::fmt;
use core::mem;

use super::{Shared, Task};
use crate::Error;

/// Why a deferred value will never hold a success value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Failure {
    /// A continuation guard rejected the resolved reference.
    Filtered,
    /// A step of a continuation chain raised an error.
    Error(Error),
}

type Observer<T> = Box<dyn FnOnce(Result<T, Failure>)>;

enum Slot<T> {
    Pending(Vec<(Option<super::ActorId>, Observer<T>)>),
    Done(Result<T, Failure>),
}

/// A single-assignment cell with completion observers.
///
/// Observers never run inside `complete`; each one is queued on the owning
/// [`System`](super::System) as a task and executed in the context (actor)
/// that registered it.
pub struct Deferred<T> {
    slot: Rc<RefCell<Slot<T>>>,
    exec: Weak<Shared>,
}

impl<T> Clone for Deferred<T> {
    fn clone(&self) -> Self {
        Deferred {
            slot: Rc::clone(&self.slot),
            exec: Weak::clone(&self.exec),
        }
    }
}

impl<T> fmt::Debug for Deferred<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let state = match &*self.slot.borrow() {
            Slot::Pending(obs) => return write!(f, "Deferred(pending, {} observers)", obs.len()),
            Slot::Done(Ok(_)) => "completed",
            Slot::Done(Err(_)) => "failed",
        };
        write!(f, "Deferred({state})")
    }
}

impl<T: Clone + 'static> Deferred<T> {
    pub(crate) fn new(exec: &Rc<Shared>) -> Self {
        Deferred {
            slot: Rc::new(RefCell::new(Slot::Pending(Vec::new()))),
            exec: Rc::downgrade(exec),
        }
    }

    /// A pending cell on the same executor as `self`.
    pub(crate) fn sibling<U: Clone + 'static>(&self) -> Deferred<U> {
        Deferred {
            slot: Rc::new(RefCell::new(Slot::Pending(Vec::new()))),
            exec: Weak::clone(&self.exec),
        }
    }

    /// A cell with no executor; its observers never run.
    pub(crate) fn detached() -> Self {
        Deferred {
            slot: Rc::new(RefCell::new(Slot::Pending(Vec::new()))),
            exec: Weak::new(),
        }
    }

    /// Stores `value` and releases every observer.
    pub fn complete(&self, value: T) -> Result<(), Error> {
        self.settle(Ok(value))
    }

    pub(crate) fn fail(&self, failure: Failure) -> Result<(), Error> {
        self.settle(Err(failure))
    }

    pub(crate) fn settle(&self, result: Result<T, Failure>) -> Result<(), Error> {
        let observers = {
            let mut slot = self.slot.borrow_mut();
            match &mut *slot {
                Slot::Done(_) => return Err(Error::DoubleCompletion),
                Slot::Pending(obs) => {
                    let obs = mem::take(obs);
                    *slot = Slot::Done(result.clone());
                    obs
                }
            }
        };
        if let Some(exec) = self.exec.upgrade() {
            for (owner, observer) in observers {
                let result = result.clone();
                exec.schedule(Task::new(owner, move || observer(result)));
            }
        }
        Ok(())
    }

    /// Registers an observer. It fires exactly once, after completion, even
    /// when registered on an already completed cell.
    pub fn on_complete(&self, observer: impl FnOnce(Result<T, Failure>) + 'static) {
        let Some(exec) = self.exec.upgrade() else {
            return;
        };
        let owner = exec.current.get();
        let mut slot = self.slot.borrow_mut();
        match &mut *slot {
            Slot::Pending(obs) => obs.push((owner, Box::new(observer))),
            Slot::Done(result) => {
                let result = result.clone();
                drop(slot);
                exec.schedule(Task::new(owner, move || observer(result)));
            }
        }
    }

    pub fn is_completed(&self) -> bool {
        matches!(&*self.slot.borrow(), Slot::Done(_))
    }

    /// The settled result, if any.
    pub fn peek(&self) -> Option<Result<T, Failure>> {
        match &*self.slot.borrow() {
            Slot::Pending(_) => None,
            Slot::Done(r) => Some(r.clone()),
        }
    }

    /// A deferred value holding `f` applied to this cell's value. Failures
    /// propagate without calling `f`.
    pub fn map<U: Clone + 'static>(&self, f: impl FnOnce(T) -> U + 'static) -> Deferred<U> {
        let out = self.sibling();
        let sink = out.clone();
        self.on_complete(move |r| {
            let _ = sink.settle(r.map(f));
        });
        out
    }
}
