//! Chemical mailbox semantics.
//!
//! A behavior wrapped with [`Behavior::chem_react`] keeps unmatched
//! envelopes whose kind is in its [`RetainedSet`] instead of dead-lettering
//! them. [`Context::chem_become`] returns the kept envelopes to the mailbox
//! before switching behavior, so each is matched again against the new state.
//!
//! Two replay strategies exist. [`ChemicalVariant::Stash`] puts the kept
//! envelopes back at the front of the mailbox, in arrival order, so they are
//! matched before anything that arrives later. [`ChemicalVariant::Resend`]
//! appends them at the back, as if the actor had re-sent them to itself;
//! envelopes already queued then overtake them.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use crate::runtime::{Behavior, Context, Kind, Slot};

/// Message kinds eligible for retention.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RetainedSet(BTreeSet<Kind>);

impl RetainedSet {
    pub fn new() -> Self {
        RetainedSet(BTreeSet::new())
    }

    pub fn contains(&self, kind: &Kind) -> bool {
        self.0.contains(kind)
    }

    pub fn insert(&mut self, kind: Kind) {
        self.0.insert(kind);
    }

    pub fn iter(&self) -> impl Iterator<Item = &Kind> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn union(&self, other: &RetainedSet) -> RetainedSet {
        RetainedSet(self.0.union(&other.0).cloned().collect())
    }
}

impl<K: Into<Kind>> FromIterator<K> for RetainedSet {
    fn from_iter<I: IntoIterator<Item = K>>(iter: I) -> Self {
        RetainedSet(iter.into_iter().map(Into::into).collect())
    }
}

/// Where replayed envelopes go on `chem_become`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub enum ChemicalVariant {
    /// Prepend to the mailbox, preserving arrival order.
    #[default]
    Stash,
    /// Append to the mailbox tail.
    Resend,
}

impl<S: 'static> Behavior<S> {
    /// The behavior extended with a retention fallback: matched messages are
    /// handled, unmatched ones with a retained kind are stashed, the rest go
    /// to dead letters. Wrapping again merges the retained sets.
    pub fn chem_react(mut self, retained: &RetainedSet) -> Self {
        self.retained = Some(match self.retained.take() {
            Some(existing) => existing.union(retained),
            None => retained.clone(),
        });
        self
    }

    pub(crate) fn retains(&self, kind: &Kind) -> bool {
        self.retained.as_ref().is_some_and(|r| r.contains(kind))
    }

    pub fn retained(&self) -> Option<&RetainedSet> {
        self.retained.as_ref()
    }
}

/// Free-function form of [`Behavior::chem_react`].
pub fn chem_react<S: 'static>(behavior: Behavior<S>, retained: &RetainedSet) -> Behavior<S> {
    behavior.chem_react(retained)
}

impl<S: 'static> Context<'_, S> {
    /// Replays every stashed envelope, then switches to `behavior`.
    ///
    /// Replayed envelopes are matched against `behavior`; one that is still
    /// unhandled is stashed again and waits for the next `chem_become`.
    pub fn chem_become(&mut self, behavior: Behavior<S>) {
        self.flush = true;
        self.become_behavior(behavior);
    }
}

/// Moves the stash back into the mailbox. Returns how many envelopes moved.
pub(crate) fn flush(slot: &mut Slot) -> usize {
    let stashed: Vec<_> = slot.stash.drain(..).collect();
    let count = stashed.len();
    match slot.variant {
        ChemicalVariant::Stash => {
            for envelope in stashed.into_iter().rev() {
                slot.mailbox.push_front(envelope);
            }
        }
        ChemicalVariant::Resend => slot.mailbox.extend(stashed),
    }
    count
}
