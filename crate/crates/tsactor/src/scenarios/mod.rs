//! Executable buffer and bookshop case studies.

mod bookshop;
mod buffer;
mod report;

use std::cell::RefCell;
use std::fmt;
use std::rc::Rc;
use std::str::FromStr;

use tsactor_core::{
    ActorRef, ChemicalVariant, Continuation, Failure, Interface, ProtRef, ProtocolSpec,
    ProtocolTable, System,
};

pub use bookshop::{run_bookshop, spawn_shop, user_info, UserInfo};
pub use buffer::{run_buffer_pc, run_buffer_single, run_buffer_untyped, spawn_buffer, BufferState};
pub use report::{ClientError, TraceReport};

use crate::Error;

pub const BUFFER_SPEC: &str = include_str!("../../specs/buffer.json");
pub const BUFFER_PC_SPEC: &str = include_str!("../../specs/buffer_pc.json");
pub const BOOKSHOP_SPEC: &str = include_str!("../../specs/bookshop.json");

/// One of the bundled protocol documents: `buffer`, `buffer_pc` or
/// `bookshop`.
pub fn builtin_spec(name: &str) -> Option<ProtocolSpec> {
    let text = match name {
        "buffer" => BUFFER_SPEC,
        "buffer_pc" => BUFFER_PC_SPEC,
        "bookshop" => BOOKSHOP_SPEC,
        _ => return None,
    };
    Some(crate::parse_spec(text).expect("bundled documents are valid"))
}

macro_rules! named_enum {
    ($(#[$meta:meta])* $name:ident { $($variant:ident => $text:literal),+ $(,)? }) => {
        $(#[$meta])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
        pub enum $name { $($variant),+ }

        impl $name {
            pub const ALL: &'static [$name] = &[$($name::$variant),+];

            pub fn as_str(self) -> &'static str {
                match self { $($name::$variant => $text),+ }
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.as_str())
            }
        }

        impl FromStr for $name {
            type Err = String;

            fn from_str(s: &str) -> Result<Self, String> {
                match s {
                    $($text => Ok($name::$variant),)+
                    _ => Err(format!(
                        "expected one of: {}",
                        [$($text),+].join(", ")
                    )),
                }
            }
        }
    };
}

named_enum!(Scenario {
    BufferUntyped => "buffer-untyped",
    BufferSingle => "buffer-single",
    BufferPc => "buffer-pc",
    Bookshop => "bookshop",
});

named_enum!(
    /// How the bookshop schedules concurrent customers.
    Policy {
        SerializeUsers => "serialize-users",
        InterleaveInit => "interleave-init",
    }
);

named_enum!(
    /// Deliberate client mistakes, for exercising the dynamic checks.
    Corruption {
        DoubleRemove => "double-remove",
        ReuseRef => "reuse-ref",
        SkipCard => "skip-card",
    }
);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScenarioConfig {
    pub scenario: Scenario,
    pub seed: u64,
    pub producers: usize,
    pub consumers: usize,
    /// Inserts per producer.
    pub items: usize,
    /// Removes per consumer; by default as many as leave one value behind.
    pub removes: Option<usize>,
    pub users: usize,
    pub policy: Option<Policy>,
    pub chemical: ChemicalVariant,
    pub affine: bool,
    pub max_steps: u64,
    pub corruption: Option<Corruption>,
    /// Length of the untyped send sequence to replay (at most 5).
    pub sends: Option<usize>,
}

impl ScenarioConfig {
    pub fn new(scenario: Scenario) -> Self {
        ScenarioConfig {
            scenario,
            seed: 0,
            producers: 1,
            consumers: 1,
            items: 5,
            removes: None,
            users: 3,
            policy: None,
            chemical: ChemicalVariant::Stash,
            affine: true,
            max_steps: 100_000,
            corruption: None,
            sends: None,
        }
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<(), Error> {
        let bad = |m: &str| Err(Error::Config(m.into()));
        if self.producers == 0 || self.consumers == 0 || self.items == 0 || self.users == 0 {
            return bad("counts must be positive");
        }
        if self.max_steps == 0 {
            return bad("max-steps must be positive");
        }
        if self.policy.is_some() && self.scenario != Scenario::Bookshop {
            return bad("policy applies to the bookshop only");
        }
        if self.sends.is_some_and(|n| n > buffer::UNTYPED_SENDS) {
            return bad("the untyped sequence has 5 sends");
        }
        let corruption_fits = match self.corruption {
            None => true,
            Some(Corruption::DoubleRemove | Corruption::ReuseRef) => {
                self.scenario == Scenario::BufferSingle
            }
            Some(Corruption::SkipCard) => self.scenario == Scenario::Bookshop,
        };
        if !corruption_fits {
            return bad("corruption does not apply to this scenario");
        }
        Ok(())
    }

    pub fn policy(&self) -> Policy {
        self.policy.unwrap_or(Policy::SerializeUsers)
    }

    pub fn removes_per_consumer(&self) -> usize {
        self.removes
            .unwrap_or((self.producers * self.items).saturating_sub(1) / self.consumers)
    }
}

/// Runs the configured scenario.
pub fn run(config: &ScenarioConfig) -> Result<TraceReport, Error> {
    config.validate()?;
    Ok(match config.scenario {
        Scenario::BufferUntyped => run_buffer_untyped(config),
        Scenario::BufferSingle => run_buffer_single(config),
        Scenario::BufferPc => run_buffer_pc(config),
        Scenario::Bookshop => run_bookshop(config),
    })
}

/// Completion flags and client-side errors, filled in by continuation
/// observers.
#[derive(Debug, Default)]
pub(crate) struct Journal {
    pub completions: Vec<(String, bool)>,
    pub errors: Vec<ClientError>,
    pub checks: Vec<(String, bool)>,
}

pub(crate) type SharedJournal = Rc<RefCell<Journal>>;

impl Journal {
    pub fn enroll(journal: &SharedJournal, client: &str) {
        journal.borrow_mut().completions.push((client.into(), false));
    }

    pub fn fail(journal: &SharedJournal, client: &str, error: tsactor_core::Error) {
        journal.borrow_mut().errors.push(ClientError {
            client: client.into(),
            error,
        });
    }

    fn complete(journal: &SharedJournal, client: &str) {
        let mut j = journal.borrow_mut();
        if let Some(entry) = j.completions.iter_mut().find(|(c, _)| c == client) {
            entry.1 = true;
        }
    }

    /// Marks `client` complete when `chain` resolves, then runs `on_end`
    /// with the final reference. A failed chain is recorded as an error.
    pub fn finish(
        journal: &SharedJournal,
        client: &str,
        chain: &Continuation,
        on_end: impl FnOnce(ProtRef) + 'static,
    ) {
        let journal = Rc::clone(journal);
        let client = client.to_string();
        chain.deferred().on_complete(move |r| match r {
            Ok(last) => {
                Journal::complete(&journal, &client);
                on_end(last);
            }
            Err(Failure::Error(e)) => Journal::fail(&journal, &client, e),
            Err(Failure::Filtered) => {}
        });
    }
}

pub(crate) fn prot_ref(
    target: ActorRef,
    interface: &Interface,
    table: &ProtocolTable,
    affine: bool,
) -> ProtRef {
    let r = if affine {
        ProtRef::affine(target, interface.clone(), table.clone())
    } else {
        ProtRef::new(target, interface.clone(), table.clone())
    };
    r.expect("bundled tables cover their interfaces")
}

pub(crate) fn new_system(config: &ScenarioConfig) -> System {
    System::new(config.seed)
}
