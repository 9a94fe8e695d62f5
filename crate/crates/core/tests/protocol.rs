mod common;

use std::cell::RefCell;
use std::rc::Rc;

use common::*;
use tsactor_core::{
    Behavior, Continuation, Error, Failure, Interface, ProtRef, ProtocolTable, System,
};

fn setup(seed: u64) -> (System, tsactor_core::ActorRef, tsactor_core::ActorRef) {
    let system = System::new(seed);
    let buffer = spawn_chem(&system);
    let user = system.spawn_client("user");
    (system, buffer, user)
}

#[test]
fn single_user_insert_continues_at_consume() {
    let (system, buffer, _) = setup(0);
    let r = ProtRef::new(buffer, produce_int(), single_user_table()).unwrap();
    let c = r.tell(insert(0)).unwrap();
    assert_eq!(c.next_interface(), Some(&consume_int()));
    assert!(!c.is_resolved(), "tell returns before the actor handles it");
    system.run_until_quiescent(10);
    assert_eq!(*c.peek().unwrap().unwrap().interface(), consume_int());
}

#[test]
fn single_user_remove_continues_at_produce() {
    let (system, buffer, _) = setup(0);
    let r = ProtRef::new(buffer.clone(), buffer_interf(), single_user_table()).unwrap();
    r.tell(insert(3)).unwrap();
    let c = r.tell(remove()).unwrap();
    assert_eq!(c.next_interface(), Some(&produce_int()));
    system.run_until_quiescent(10);
    assert_eq!(*c.peek().unwrap().unwrap().interface(), produce_int());
}

#[test]
fn producer_consumer_insert_stays_at_produce() {
    let (_system, buffer, _) = setup(0);
    let r = ProtRef::new(buffer, produce_int(), producer_consumer_table()).unwrap();
    let c = r.tell(insert(0)).unwrap();
    assert_eq!(c.next_interface(), Some(&produce_int()));
}

#[test]
fn prot_tell_checks_membership_and_affinity() {
    let (system, buffer, _) = setup(0);
    let r = ProtRef::affine(buffer.clone(), consume_int(), single_user_table()).unwrap();
    assert_eq!(r.tell(insert(1)).unwrap_err().code(), "MESSAGE_NOT_IN_INTERFACE");
    r.tell(remove()).unwrap();
    assert_eq!(r.tell(remove()).unwrap_err().code(), "AFFINITY_VIOLATION");
    assert_eq!(system.mailbox_len(&buffer), 1);
}

#[test]
fn table_must_cover_the_interface() {
    let (_system, buffer, _) = setup(0);
    let partial = ProtocolTable::new("partial", [("insert", consume_int())]);
    let err = ProtRef::new(buffer.clone(), buffer_interf(), partial.clone()).unwrap_err();
    assert_eq!(err.code(), "TABLE_NOT_TOTAL");
    let r = ProtRef::new(buffer, produce_int(), partial).unwrap();
    assert_eq!(r.narrow(&consume_int()).unwrap_err().code(), "SUBSTITUTION_UNSAFE");
}

/// An actor that resolves each continuation with a reference at `at` and
/// then tries a second completion, recording both results.
fn spawn_resolver(system: &System, at: Interface) -> tsactor_core::ActorRef {
    type Log = Vec<Result<(), Error>>;
    system.spawn(
        "resolver",
        Vec::new(),
        Behavior::new("ANY").on("insert", move |log: &mut Log, ctx, env| {
            let (_, reply) = env.into_parts();
            let reply = reply.unwrap();
            let r = ctx.continuation_ref(&reply, &at)?;
            log.push(ctx.resolve(&reply, r.clone()));
            log.push(ctx.resolve(&reply, r));
            Ok(())
        }),
    )
}

fn resolver_log(system: &System, actor: &tsactor_core::ActorRef) -> Vec<Result<(), Error>> {
    system
        .with_state(actor, |l: &Vec<Result<(), Error>>| l.clone())
        .unwrap()
}

#[test]
fn resolving_at_wrong_interface_is_a_breach() {
    let system = System::new(0);
    let actor = spawn_resolver(&system, produce_int());
    let r = ProtRef::new(actor.clone(), produce_int(), single_user_table()).unwrap();
    let c = r.tell(insert(1)).unwrap();
    system.run_until_quiescent(10);
    let breach = Error::ProtocolBreach {
        expected: "ConsumeInt".into(),
        actual: "ProduceInt".into(),
    };
    assert_eq!(resolver_log(&system, &actor), [Err(breach.clone()), Err(breach)]);
    assert!(c.peek().is_none());
}

#[test]
fn resolving_twice_is_a_double_completion() {
    let system = System::new(0);
    let actor = spawn_resolver(&system, consume_int());
    let r = ProtRef::new(actor.clone(), produce_int(), single_user_table()).unwrap();
    let c = r.tell(insert(1)).unwrap();
    system.run_until_quiescent(10);
    assert_eq!(
        resolver_log(&system, &actor),
        [Ok(()), Err(Error::DoubleCompletion)]
    );
    let resolved = c.peek().unwrap().unwrap();
    assert_eq!(*resolved.interface(), consume_int());
    assert_eq!(resolved.target(), &actor);
}

#[test]
fn map_identity_yields_resolved_ref() {
    let (system, buffer, _) = setup(0);
    let r = ProtRef::new(buffer.clone(), produce_int(), single_user_table()).unwrap();
    let c = r.tell(insert(0)).unwrap();
    let mapped = c.map(|o| o);
    system.run_until_quiescent(10);
    let a = mapped.peek().unwrap().unwrap();
    let b = c.peek().unwrap().unwrap();
    assert_eq!(a.interface(), b.interface());
    assert_eq!(a.target(), b.target());
}

fn chain(r: ProtRef, out: Rc<RefCell<Vec<String>>>) -> tsactor_core::Deferred<()> {
    r.tell(insert(0))
        .unwrap()
        .then(|o| o.expect_state(&consume_int())?.tell(remove()))
        .then(|o| o.expect_state(&produce_int())?.tell(insert(2)))
        .then(|o| o.expect_state(&consume_int())?.tell(remove()))
        .then(|o| o.expect_state(&produce_int())?.tell(insert(4)))
        .then(|o| o.expect_state(&consume_int())?.tell(remove()))
        .map(move |_| out.borrow_mut().push(" END ".into()))
}

#[test]
fn six_step_chain_alternates_and_ends() {
    let (system, buffer, user) = setup(42);
    let out = Rc::new(RefCell::new(Vec::new()));
    let r = ProtRef::affine(buffer, produce_int(), single_user_table()).unwrap();
    let done = system.within(&user, || chain(r, Rc::clone(&out)));
    system.run_until_quiescent(1000);
    assert_eq!(
        handled_kinds(&system, "buffer"),
        ["insert", "remove", "insert", "remove", "insert", "remove"]
    );
    assert_eq!(*out.borrow(), [" END "]);
    assert_eq!(done.peek(), Some(Ok(())));
    assert!(system.faults().is_empty());
}

#[test]
fn end_is_printed_only_after_all_six_handlings() {
    let (system, buffer, user) = setup(5);
    let out = Rc::new(RefCell::new(Vec::new()));
    let r = ProtRef::new(buffer, produce_int(), single_user_table()).unwrap();
    system.within(&user, || chain(r, Rc::clone(&out)));
    while system.step() {
        if !out.borrow().is_empty() {
            assert_eq!(handled_kinds(&system, "buffer").len(), 6);
        }
    }
    assert_eq!(out.borrow().len(), 1);
}

#[test]
fn then_with_foreign_kind_fails_the_composite() {
    let (system, buffer, user) = setup(0);
    let r = ProtRef::new(buffer, produce_int(), single_user_table()).unwrap();
    let c = system.within(&user, || r.tell(insert(0)).unwrap().then(|o| o.tell(insert(1))));
    assert_eq!(c.next_interface(), None);
    system.run_until_quiescent(100);
    match c.peek() {
        Some(Err(Failure::Error(e))) => assert_eq!(e.code(), "MESSAGE_NOT_IN_INTERFACE"),
        other => panic!("unexpected {other:?}"),
    }
    assert_eq!(handled_kinds(&system, "buffer"), ["insert"]);
}

#[test]
fn two_consecutive_removes_fail_state_check() {
    let (system, buffer, user) = setup(0);
    let r = ProtRef::new(buffer.clone(), consume_int(), single_user_table()).unwrap();
    system.tell(&buffer, insert(7));
    let c = system.within(&user, || {
        r.tell(remove())
            .unwrap()
            .then(|o| o.expect_state(&consume_int())?.tell(remove()))
    });
    system.run_until_quiescent(100);
    assert_eq!(
        c.peek().and_then(Result::err),
        Some(Failure::Error(Error::StateMismatch {
            expected: "ConsumeInt".into(),
            actual: "ProduceInt".into()
        }))
    );
    assert_eq!(handled_kinds(&system, "buffer"), ["insert", "remove"]);
}

#[test]
fn expect_state_on_own_interface_is_identity() {
    let (_system, buffer, _) = setup(0);
    let r = ProtRef::new(buffer, consume_int(), single_user_table()).unwrap();
    let same = r.clone().expect_state(&consume_int()).unwrap();
    assert_eq!(same.interface(), r.interface());
}

fn three_steps(system: &System, left_nested: bool) -> Vec<String> {
    let buffer = spawn_chem(system);
    let user = system.spawn_client("user");
    let r = ProtRef::new(buffer, produce_int(), single_user_table()).unwrap();
    let a = || r.tell(insert(1)).unwrap();
    let b = |o: ProtRef| o.tell(remove());
    let c = |o: ProtRef| o.tell(insert(2));
    system.within(&user, || {
        if left_nested {
            a().then(b).then(c);
        } else {
            a().then(move |o| Ok(b(o)?.then(c)));
        }
    });
    system.run_until_quiescent(1000);
    handled_kinds(system, "buffer")
}

#[test]
fn then_is_associative_on_traces() {
    for seed in 0..10 {
        let left = three_steps(&System::new(seed), true);
        let right = three_steps(&System::new(seed), false);
        assert_eq!(left, ["insert", "remove", "insert"]);
        assert_eq!(left, right);
    }
}

#[test]
fn filter_true_passes_through() {
    let (system, buffer, user) = setup(0);
    let r = ProtRef::new(buffer, produce_int(), single_user_table()).unwrap();
    let c = system.within(&user, || {
        r.tell(insert(0))
            .unwrap()
            .filter(|_| true)
            .filter(|o| o.interface().name() == "ConsumeInt")
            .then(|o| o.tell(remove()))
    });
    system.run_until_quiescent(100);
    assert!(c.peek().unwrap().is_ok());
    assert_eq!(handled_kinds(&system, "buffer"), ["insert", "remove"]);
}

#[test]
fn filter_false_skips_downstream() {
    let (system, buffer, user) = setup(0);
    let r = ProtRef::new(buffer, produce_int(), single_user_table()).unwrap();
    let ran = Rc::new(RefCell::new(false));
    let flag = Rc::clone(&ran);
    let filtered: Continuation = system.within(&user, || r.tell(insert(0)).unwrap().filter(|_| false));
    let mapped = filtered.then(|o| o.tell(remove())).map(move |_| *flag.borrow_mut() = true);
    system.run_until_quiescent(100);
    assert_eq!(filtered.peek().map(|r| r.err()), Some(Some(Failure::Filtered)));
    assert_eq!(mapped.peek(), Some(Err(Failure::Filtered)));
    assert!(!*ran.borrow());
    assert_eq!(handled_kinds(&system, "buffer"), ["insert"]);
}

#[test]
fn resolved_refs_inherit_the_senders_table_and_affinity() {
    let (system, buffer, _) = setup(0);
    let r = ProtRef::affine(buffer, produce_int(), producer_consumer_table()).unwrap();
    let c = r.tell(insert(0)).unwrap();
    system.run_until_quiescent(10);
    let next = c.peek().unwrap().unwrap();
    assert_eq!(next.table(), r.table());
    assert!(next.is_affine());
    assert!(!next.is_used());
}
