use std::rc::Rc;

use tsactor_core::{
    ActorRef, Behavior, ChemicalVariant, Context, Envelope, Error, Message, ProtocolSpec,
    ProtocolTable, RetainedSet, System, Trace, TraceEvent,
};

use super::report::TraceReport;
use super::{builtin_spec, new_system, prot_ref, Corruption, Journal, ScenarioConfig, SharedJournal};

pub(super) const UNTYPED_SENDS: usize = 5;

pub fn insert(x: i64) -> Message {
    Message::new("insert").arg(x)
}

pub fn remove() -> Message {
    Message::new("remove")
}

/// Local state of the one-place buffer actor.
#[derive(Debug, Clone, Default)]
pub struct BufferState {
    pub value: Option<i64>,
    /// `(client, value)` for every handled remove.
    pub removed: Vec<(String, i64)>,
}

impl BufferState {
    fn describe(&self) -> String {
        match self.value {
            Some(x) => format!("FULL({x})"),
            None => "EMPTY".into(),
        }
    }
}

fn sender_name<S: 'static>(ctx: &Context<'_, S>) -> String {
    ctx.sender()
        .and_then(|s| ctx.system().name_of(s.id()))
        .map_or_else(String::new, |n| n.to_string())
}

fn untyped_empty() -> Behavior<BufferState> {
    Behavior::new("EMPTY").on("insert", |s: &mut BufferState, ctx, env| {
        let x = env.message().int(0).unwrap_or_default();
        ctx.become_behavior(untyped_full());
        ctx.emit(format!("inserted {x}"));
        s.value = Some(x);
        Ok(())
    })
}

fn untyped_full() -> Behavior<BufferState> {
    Behavior::new("FULL").on("remove", |s: &mut BufferState, ctx, _| {
        ctx.become_behavior(untyped_empty());
        let x = s.value.take().unwrap_or_default();
        ctx.emit(format!("removed {x}"));
        s.removed.push((sender_name(ctx), x));
        Ok(())
    })
}

/// What the protocol buffer needs to answer a send.
struct Rules {
    /// Interface the buffer hands back after each kind.
    completion: ProtocolTable,
    retained: RetainedSet,
}

fn complete(
    rules: &Rules,
    ctx: &mut Context<'_, BufferState>,
    env: Envelope,
) -> Result<(), Error> {
    let (message, reply) = env.into_parts();
    let Some(reply) = reply else {
        return Ok(());
    };
    let next = rules
        .completion
        .next(message.kind())
        .expect("completion table covers the buffer's kinds");
    let next = ctx.continuation_ref(&reply, next)?;
    ctx.resolve(&reply, next)
}

fn empty(rules: Rc<Rules>) -> Behavior<BufferState> {
    let retained = rules.retained.clone();
    Behavior::new("EMPTY")
        .on("insert", move |s: &mut BufferState, ctx, env| {
            let x = env.message().int(0).unwrap_or_default();
            s.value = Some(x);
            ctx.chem_become(full(Rc::clone(&rules)));
            ctx.emit(format!("inserted {x}"));
            complete(&rules, ctx, env)
        })
        .chem_react(&retained)
}

fn full(rules: Rc<Rules>) -> Behavior<BufferState> {
    let retained = rules.retained.clone();
    Behavior::new("FULL")
        .on("remove", move |s: &mut BufferState, ctx, env| {
            let x = s.value.take().unwrap_or_default();
            s.removed.push((sender_name(ctx), x));
            ctx.chem_become(empty(Rc::clone(&rules)));
            ctx.emit(format!("removed {x}"));
            complete(&rules, ctx, env)
        })
        .chem_react(&retained)
}

/// Spawns the protocol buffer: it answers each send with a reference at
/// the interface `completion` assigns to the kind, and stashes unhandled
/// kinds in `retained`.
pub fn spawn_buffer(
    system: &System,
    variant: ChemicalVariant,
    completion: ProtocolTable,
    retained: RetainedSet,
) -> ActorRef {
    let rules = Rc::new(Rules {
        completion,
        retained,
    });
    system.spawn_chemical("buffer", variant, BufferState::default(), empty(rules))
}

fn finish_report(
    config: &ScenarioConfig,
    system: &System,
    buffer: &ActorRef,
    spec: &ProtocolSpec,
    journal: &SharedJournal,
) -> TraceReport {
    let run = system.run_until_quiescent(config.max_steps);
    let events = system.trace();
    let handlings: Vec<_> = events.iter().filter_map(TraceEvent::as_handling).cloned().collect();
    let trace = Trace::from_handlings(&handlings, Some("buffer"));
    let verdicts = vec![("buffer".to_string(), spec.check_trace(&trace))];
    let state = system
        .with_state(buffer, |b: &BufferState| b.clone())
        .expect("buffer state type");
    let dead = system.dead_letters();
    let retained_dead_letters = dead
        .iter()
        .filter(|d| spec.retained().contains(d.message.kind()))
        .count();
    let journal = journal.borrow();
    let mut checks = journal.checks.clone();
    if config.scenario == super::Scenario::BufferPc {
        checks.push(("no retained message dead-lettered".into(), retained_dead_letters == 0));
        let behavior = system.state_name(buffer).expect("buffer exists");
        let enabled = spec
            .state(&behavior)
            .map(|s| s.interface().clone())
            .expect("buffer behaviors are protocol states");
        let waiting = system
            .stashed_kinds(buffer)
            .into_iter()
            .chain(system.mailbox_kinds(buffer));
        let stuck = waiting.filter(|k| enabled.contains(k)).count();
        checks.push(("no enabled message left waiting".into(), stuck == 0));
    }
    TraceReport {
        config: config.clone(),
        status: run.status,
        steps: system.steps(),
        events,
        actor: "buffer".into(),
        dead_letters: dead.len(),
        retained_dead_letters,
        completions: journal.completions.clone(),
        verdicts,
        checks,
        errors: journal.errors.clone(),
        removed: state.removed.clone(),
        final_state: state.describe(),
        output: system.output(),
    }
}

/// A user sending insert(4), remove, insert(10), insert(20) and a raw 4
/// to a plain buffer through its untyped reference.
pub fn run_buffer_untyped(config: &ScenarioConfig) -> TraceReport {
    let system = new_system(config);
    let spec = builtin_spec("buffer").expect("bundled");
    let buffer = system.spawn("buffer", BufferState::default(), untyped_empty());
    let user = system.spawn_client("user");
    let sends = [insert(4), remove(), insert(10), insert(20), Message::raw(4)];
    system.within(&user, || {
        for m in sends.into_iter().take(config.sends.unwrap_or(UNTYPED_SENDS)) {
            system.tell(&buffer, m);
        }
    });
    finish_report(config, &system, &buffer, &spec, &SharedJournal::default())
}

/// One user alternating insert and remove six times through a monadic
/// chain of continuations, printing ` END ` at the end.
pub fn run_buffer_single(config: &ScenarioConfig) -> TraceReport {
    let system = new_system(config);
    let spec = builtin_spec("buffer").expect("bundled");
    let table = spec.client_table("default").expect("derived").clone();
    let buffer = spawn_buffer(&system, config.chemical, table.clone(), RetainedSet::new());
    let user = system.spawn_client("user");
    let journal = SharedJournal::default();
    Journal::enroll(&journal, "user");

    let produce = spec.interface("ProduceInt").expect("declared").clone();
    let consume = spec.interface("ConsumeInt").expect("declared").clone();
    let mut steps: Vec<Message> = vec![insert(0), remove(), insert(2), remove(), insert(4), remove()];
    if config.corruption == Some(Corruption::DoubleRemove) {
        steps[2] = remove();
    }
    system.within(&user, || {
        let start = prot_ref(buffer.clone(), &produce, &table, config.affine);
        let mut chain = match start.tell(steps[0].clone()) {
            Ok(c) => c,
            Err(e) => return Journal::fail(&journal, "user", e),
        };
        if config.corruption == Some(Corruption::ReuseRef) {
            if let Err(e) = start.tell(insert(1)) {
                Journal::fail(&journal, "user", e);
            }
        }
        for msg in steps.into_iter().skip(1) {
            let expected = if msg.kind().as_str() == "remove" { &consume } else { &produce }.clone();
            chain = chain.then(move |o| o.expect_state(&expected)?.tell(msg));
        }
        let sys = system.clone();
        Journal::finish(&journal, "user", &chain, move |_| sys.emit(" END "));
    });
    finish_report(config, &system, &buffer, &spec, &journal)
}

/// Producers and consumers sharing one chemical buffer, each through its
/// own role interface.
pub fn run_buffer_pc(config: &ScenarioConfig) -> TraceReport {
    let system = new_system(config);
    let spec = builtin_spec("buffer_pc").expect("bundled");
    let producer_table = spec.client_table("producer").expect("declared").clone();
    let consumer_table = spec.client_table("consumer").expect("declared").clone();
    let completion = ProtocolTable::new(
        "buffer",
        producer_table
            .entries()
            .chain(consumer_table.entries())
            .map(|(k, i)| (k.clone(), i.clone())),
    );
    let buffer = spawn_buffer(&system, config.chemical, completion, spec.retained().clone());
    let produce = spec.interface("ProduceInt").expect("declared").clone();
    let consume = spec.interface("ConsumeInt").expect("declared").clone();
    let journal = SharedJournal::default();

    for p in 0..config.producers {
        let name = format!("producer{}", p + 1);
        let client = system.spawn_client(&name);
        Journal::enroll(&journal, &name);
        let values: Vec<i64> = (0..config.items).map(|k| (10 * k + p) as i64).collect();
        system.within(&client, || {
            let start = prot_ref(buffer.clone(), &produce, &producer_table, config.affine);
            let mut chain = match start.tell(insert(values[0])) {
                Ok(c) => c,
                Err(e) => return Journal::fail(&journal, &name, e),
            };
            for &v in &values[1..] {
                let produce = produce.clone();
                chain = chain.then(move |o| o.expect_state(&produce)?.tell(insert(v)));
            }
            let sys = system.clone();
            Journal::finish(&journal, &name, &chain, move |_| sys.emit("End Producer"));
        });
    }

    let removes = config.removes_per_consumer();
    for q in 0..config.consumers {
        let name = format!("consumer{}", q + 1);
        let client = system.spawn_client(&name);
        Journal::enroll(&journal, &name);
        if removes == 0 {
            journal.borrow_mut().completions.last_mut().expect("enrolled").1 = true;
            continue;
        }
        system.within(&client, || {
            let start = prot_ref(buffer.clone(), &consume, &consumer_table, config.affine);
            let mut chain = match start.tell(remove()) {
                Ok(c) => c,
                Err(e) => return Journal::fail(&journal, &name, e),
            };
            for _ in 1..removes {
                let consume = consume.clone();
                chain = chain.then(move |o| o.expect_state(&consume)?.tell(remove()));
            }
            let sys = system.clone();
            Journal::finish(&journal, &name, &chain, move |_| sys.emit("End Consumer"));
        });
    }
    finish_report(config, &system, &buffer, &spec, &journal)
}
