//! Minimal actor runtime.
//!
//! Actors own a FIFO mailbox and a current [`Behavior`]. The [`System`] is a
//! single-threaded executor: every step it picks, with a seeded generator,
//! either one actor with pending mail or one queued observer task, and runs
//! it to completion. Identical programs with identical seeds therefore
//! produce identical traces.

mod behavior;
mod deferred;
mod message;
mod trace;

use alloc::boxed::Box;
use alloc::collections::VecDeque;
use alloc::rc::{Rc, Weak};
use alloc::string::String;
use alloc::vec::Vec;
use core::cell::{Cell, RefCell};
use core::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub use behavior::{Behavior, Context, Handler};
pub use deferred::{Deferred, Failure};
pub use message::{Envelope, Kind, Message, Value};
pub use trace::{DeadLetter, Fault, Handling, Outcome, TraceEvent};

use crate::chemical::{self, ChemicalVariant};
use crate::protocol::Reply;
use behavior::Receipt;

/// Identifier of a spawned actor, unique within its system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ActorId(u32);

impl ActorId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for ActorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

pub(crate) struct Task {
    owner: Option<ActorId>,
    run: Box<dyn FnOnce()>,
}

impl Task {
    pub(crate) fn new(owner: Option<ActorId>, run: impl FnOnce() + 'static) -> Self {
        Task {
            owner,
            run: Box::new(run),
        }
    }
}

pub(crate) struct Slot {
    name: Rc<str>,
    pub(crate) mailbox: VecDeque<Envelope>,
    pub(crate) stash: Vec<Envelope>,
    pub(crate) variant: ChemicalVariant,
    cell: Option<Box<dyn behavior::Cell>>,
}

pub(crate) struct Shared {
    actors: RefCell<Vec<Slot>>,
    tasks: RefCell<VecDeque<Task>>,
    rng: RefCell<ChaCha8Rng>,
    pub(crate) current: Cell<Option<ActorId>>,
    step: Cell<u64>,
    trace: RefCell<Vec<TraceEvent>>,
    dead_letters: RefCell<Vec<DeadLetter>>,
    faults: RefCell<Vec<Fault>>,
    output: RefCell<Vec<String>>,
}

impl Shared {
    pub(crate) fn schedule(&self, task: Task) {
        self.tasks.borrow_mut().push_back(task);
    }
}

/// Why a run stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunStatus {
    /// No mail and no queued tasks remain. Stashed envelopes may remain.
    Quiescent,
    /// The step budget ran out with work still pending.
    BudgetExhausted,
}

#[derive(Debug, Clone)]
pub struct RunReport {
    /// Events recorded during this run, in order.
    pub trace: Vec<TraceEvent>,
    pub steps: u64,
    pub status: RunStatus,
}

/// The actor system and its deterministic scheduler.
#[derive(Clone)]
pub struct System {
    shared: Rc<Shared>,
}

impl fmt::Debug for System {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("System")
            .field("actors", &self.shared.actors.borrow().len())
            .field("tasks", &self.shared.tasks.borrow().len())
            .field("step", &self.shared.step.get())
            .finish()
    }
}

impl System {
    /// A system whose scheduling choices are drawn from `seed`.
    pub fn new(seed: u64) -> Self {
        System {
            shared: Rc::new(Shared {
                actors: RefCell::new(Vec::new()),
                tasks: RefCell::new(VecDeque::new()),
                rng: RefCell::new(ChaCha8Rng::seed_from_u64(seed)),
                current: Cell::new(None),
                step: Cell::new(0),
                trace: RefCell::new(Vec::new()),
                dead_letters: RefCell::new(Vec::new()),
                faults: RefCell::new(Vec::new()),
                output: RefCell::new(Vec::new()),
            }),
        }
    }

    /// Spawns an actor with the given local state and initial behavior.
    pub fn spawn<S: 'static>(&self, name: &str, state: S, behavior: Behavior<S>) -> ActorRef {
        self.spawn_chemical(name, ChemicalVariant::Stash, state, behavior)
    }

    /// Like [`spawn`](Self::spawn), choosing how stashed envelopes are
    /// replayed by `chem_become`.
    pub fn spawn_chemical<S: 'static>(
        &self,
        name: &str,
        variant: ChemicalVariant,
        state: S,
        behavior: Behavior<S>,
    ) -> ActorRef {
        let mut actors = self.shared.actors.borrow_mut();
        let id = ActorId(u32::try_from(actors.len()).expect("actor id space exhausted"));
        actors.push(Slot {
            name: Rc::from(name),
            mailbox: VecDeque::new(),
            stash: Vec::new(),
            variant,
            cell: Some(behavior::boxed(state, behavior)),
        });
        ActorRef {
            id,
            system: Rc::downgrade(&self.shared),
        }
    }

    /// Spawns an actor that handles nothing, used as the identity of a client.
    pub fn spawn_client(&self, name: &str) -> ActorRef {
        self.spawn(name, (), Behavior::new("idle"))
    }

    /// Runs `body` as if it were executing inside `actor`: sends are stamped
    /// with it as sender and observers registered by `body` run in its
    /// context. This is where a client's constructor logic goes.
    pub fn within<R>(&self, actor: &ActorRef, body: impl FnOnce() -> R) -> R {
        let prev = self.shared.current.replace(Some(actor.id));
        let out = body();
        self.shared.current.set(prev);
        out
    }

    /// A fresh, pending deferred cell.
    pub fn deferred<T: Clone + 'static>(&self) -> Deferred<T> {
        Deferred::new(&self.shared)
    }

    /// Asynchronous, untyped send.
    pub fn tell(&self, target: &ActorRef, message: Message) {
        self.post(target.id, message, None);
    }

    pub(crate) fn post(&self, target: ActorId, message: Message, reply: Option<Reply>) {
        let sender = self.shared.current.get();
        let mut actors = self.shared.actors.borrow_mut();
        match actors.get_mut(target.index()) {
            Some(slot) => slot.mailbox.push_back(Envelope {
                target,
                sender,
                message,
                reply,
            }),
            None => {
                drop(actors);
                self.shared
                    .dead_letters
                    .borrow_mut()
                    .push(DeadLetter { actor: target, message });
            }
        }
    }

    pub(crate) fn actor_ref(&self, id: ActorId) -> ActorRef {
        ActorRef {
            id,
            system: Rc::downgrade(&self.shared),
        }
    }

    pub fn name_of(&self, id: ActorId) -> Option<Rc<str>> {
        self.shared
            .actors
            .borrow()
            .get(id.index())
            .map(|s| Rc::clone(&s.name))
    }

    /// Name of the actor's current behavior.
    pub fn state_name(&self, actor: &ActorRef) -> Option<Rc<str>> {
        let actors = self.shared.actors.borrow();
        actors.get(actor.id.index())?.cell.as_ref().map(|c| c.state_name())
    }

    /// Reads the actor's local state, if it has type `S`. Returns `None`
    /// while the actor is running its own handler.
    pub fn with_state<S: 'static, R>(&self, actor: &ActorRef, f: impl FnOnce(&S) -> R) -> Option<R> {
        let actors = self.shared.actors.borrow();
        let cell = actors.get(actor.id.index())?.cell.as_ref()?;
        cell.state().downcast_ref::<S>().map(f)
    }

    pub fn mailbox_len(&self, actor: &ActorRef) -> usize {
        let actors = self.shared.actors.borrow();
        actors.get(actor.id.index()).map_or(0, |s| s.mailbox.len())
    }

    pub fn stash_len(&self, actor: &ActorRef) -> usize {
        let actors = self.shared.actors.borrow();
        actors.get(actor.id.index()).map_or(0, |s| s.stash.len())
    }

    /// Kinds of the stashed envelopes, in arrival order.
    pub fn stashed_kinds(&self, actor: &ActorRef) -> Vec<Kind> {
        let actors = self.shared.actors.borrow();
        actors.get(actor.id.index()).map_or_else(Vec::new, |s| {
            s.stash.iter().map(|e| e.kind().clone()).collect()
        })
    }

    /// Kinds waiting in the mailbox, front first.
    pub fn mailbox_kinds(&self, actor: &ActorRef) -> Vec<Kind> {
        let actors = self.shared.actors.borrow();
        actors.get(actor.id.index()).map_or_else(Vec::new, |s| {
            s.mailbox.iter().map(|e| e.kind().clone()).collect()
        })
    }

    /// The full trace since the system was created.
    pub fn trace(&self) -> Vec<TraceEvent> {
        self.shared.trace.borrow().clone()
    }

    pub fn dead_letters(&self) -> Vec<DeadLetter> {
        self.shared.dead_letters.borrow().clone()
    }

    pub fn faults(&self) -> Vec<Fault> {
        self.shared.faults.borrow().clone()
    }

    pub fn output(&self) -> Vec<String> {
        self.shared.output.borrow().clone()
    }

    /// Appends a line to the output log.
    pub fn emit(&self, line: impl Into<String>) {
        self.shared.output.borrow_mut().push(line.into());
    }

    pub fn steps(&self) -> u64 {
        self.shared.step.get()
    }

    /// True when some actor has mail or some observer task is queued.
    pub fn has_work(&self) -> bool {
        !self.shared.tasks.borrow().is_empty()
            || self.shared.actors.borrow().iter().any(|s| !s.mailbox.is_empty())
    }

    /// Runs one scheduling step. Returns false when there was nothing to do.
    pub fn step(&self) -> bool {
        let ready: Vec<usize> = self
            .shared
            .actors
            .borrow()
            .iter()
            .enumerate()
            .filter(|(_, s)| !s.mailbox.is_empty() && s.cell.is_some())
            .map(|(i, _)| i)
            .collect();
        let queued = self.shared.tasks.borrow().len();
        let choices = ready.len() + queued;
        if choices == 0 {
            return false;
        }
        let pick = self.shared.rng.borrow_mut().random_range(0..choices);
        self.shared.step.set(self.shared.step.get() + 1);
        if pick < ready.len() {
            self.process(ActorId(ready[pick] as u32));
        } else {
            let task = self
                .shared
                .tasks
                .borrow_mut()
                .remove(pick - ready.len())
                .expect("picked task index in range");
            let prev = self.shared.current.replace(task.owner);
            (task.run)();
            self.shared.current.set(prev);
        }
        true
    }

    /// Steps until nothing is pending or `max_steps` steps have run.
    pub fn run_until_quiescent(&self, max_steps: u64) -> RunReport {
        let first_event = self.shared.trace.borrow().len();
        let mut steps = 0;
        let status = loop {
            if !self.has_work() {
                break RunStatus::Quiescent;
            }
            if steps >= max_steps {
                break RunStatus::BudgetExhausted;
            }
            self.step();
            steps += 1;
        };
        RunReport {
            trace: self.shared.trace.borrow()[first_event..].to_vec(),
            steps,
            status,
        }
    }

    fn process(&self, id: ActorId) {
        let (envelope, mut cell, actor_name) = {
            let mut actors = self.shared.actors.borrow_mut();
            let slot = &mut actors[id.index()];
            let envelope = slot.mailbox.pop_front().expect("ready actor has mail");
            let cell = slot.cell.take().expect("actor is not already running");
            (envelope, cell, Rc::clone(&slot.name))
        };
        let step = self.shared.step.get();
        let mut record = Handling {
            step,
            actor: id,
            actor_name: Rc::clone(&actor_name),
            state: cell.state_name(),
            kind: envelope.kind().clone(),
            outcome: Outcome::Handled,
            client: envelope.sender.and_then(|s| self.name_of(s)),
            payload: envelope.message.summary(),
        };

        let prev = self.shared.current.replace(Some(id));
        let receipt = cell.receive(self, id, envelope);
        self.shared.current.set(prev);

        let mut actors = self.shared.actors.borrow_mut();
        let slot = &mut actors[id.index()];
        slot.cell = Some(cell);
        let mut flushed = 0;
        match receipt {
            Receipt::Handled { flush, fault } => {
                if flush {
                    flushed = chemical::flush(slot);
                }
                if let Some(error) = fault {
                    self.shared.faults.borrow_mut().push(Fault {
                        step,
                        actor: id,
                        error,
                    });
                }
            }
            Receipt::Stash(envelope) => {
                record.outcome = Outcome::Stashed;
                slot.stash.push(envelope);
            }
            Receipt::DeadLetter(envelope) => {
                record.outcome = Outcome::DeadLetter;
                self.shared.dead_letters.borrow_mut().push(DeadLetter {
                    actor: id,
                    message: envelope.message,
                });
            }
        }
        drop(actors);
        let mut trace = self.shared.trace.borrow_mut();
        trace.push(TraceEvent::Message(record));
        if flushed > 0 {
            trace.push(TraceEvent::Flush {
                step,
                actor: id,
                actor_name,
                count: flushed,
            });
        }
    }
}

/// Untyped reference to a spawned actor.
#[derive(Clone)]
pub struct ActorRef {
    id: ActorId,
    system: Weak<Shared>,
}

impl ActorRef {
    pub fn id(&self) -> ActorId {
        self.id
    }

    /// The system this actor lives in, while it is alive.
    pub fn system(&self) -> Option<System> {
        self.system.upgrade().map(|shared| System { shared })
    }

    /// Asynchronous, untyped send (Akka's `!`).
    pub fn tell(&self, message: Message) {
        self.post(message, None);
    }

    pub(crate) fn post(&self, message: Message, reply: Option<Reply>) {
        if let Some(system) = self.system() {
            system.post(self.id, message, reply);
        }
    }
}

impl PartialEq for ActorRef {
    fn eq(&self, other: &Self) -> bool {
        self.id == other.id && Weak::ptr_eq(&self.system, &other.system)
    }
}

impl Eq for ActorRef {}

impl fmt::Debug for ActorRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ActorRef({})", self.id)
    }
}
