mod common;

use std::cell::RefCell;
use std::rc::Rc;

use common::*;
use tsactor_core::typed::{Protocol, Ref, Session, State, TypedMessage};
use tsactor_core::{includes, interface, protocol, Message, ProtRef, System, TypedRef};

struct Insert(i64);
struct Remove;

impl TypedMessage for Insert {
    const KIND: &'static str = "insert";
    fn into_message(self) -> Message {
        insert(self.0)
    }
}

impl TypedMessage for Remove {
    const KIND: &'static str = "remove";
    fn into_message(self) -> Message {
        remove()
    }
}

interface!(BufferInterf { Insert, Remove });
interface!(ProduceInt { Insert });
interface!(ConsumeInt { Remove });
includes!(BufferInterf => ProduceInt, ConsumeInt);
protocol!(SingleUser { Insert => ConsumeInt, Remove => ProduceInt });

#[test]
fn static_interfaces_match_dynamic_ones() {
    assert_eq!(BufferInterf::interface(), buffer_interf());
    assert_eq!(ProduceInt::interface(), produce_int());
    assert_eq!(SingleUser::table().next(&"insert".into()), Some(&consume_int()));
}

#[test]
fn typed_chain_runs_the_session() {
    let system = System::new(17);
    let buffer = spawn_chem(&system);
    let user = system.spawn_client("user");
    let out = Rc::new(RefCell::new(Vec::new()));
    let sink = Rc::clone(&out);
    system.within(&user, || {
        let s: Session<SingleUser, ProduceInt> = Session::new(buffer.clone()).unwrap();
        s.tell(Insert(0))
            .unwrap()
            .then(|o| o.tell(Remove))
            .then(|o| o.tell(Insert(2)))
            .then(|o| o.tell(Remove))
            .map(move |_| sink.borrow_mut().push("END"));
    });
    system.run_until_quiescent(1000);
    assert_eq!(handled_kinds(&system, "buffer"), ["insert", "remove", "insert", "remove"]);
    assert_eq!(*out.borrow(), ["END"]);
}

#[test]
fn certify_checks_exact_interface() {
    let system = System::new(0);
    let buffer = spawn_chem(&system);
    let dynamic = TypedRef::new(buffer.clone(), buffer_interf());
    assert!(Ref::<BufferInterf>::certify(dynamic.clone()).is_ok());
    let err = Ref::<ProduceInt>::certify(dynamic).unwrap_err();
    assert_eq!(err.code(), "STATE_MISMATCH");

    let p = ProtRef::new(buffer, consume_int(), SingleUser::table()).unwrap();
    let err = Session::<SingleUser, ProduceInt>::certify(p).unwrap_err();
    assert_eq!(err.code(), "STATE_MISMATCH");
}

#[test]
fn narrowed_static_ref_delivers() {
    let system = System::new(0);
    let buffer = spawn_plain(&system);
    let all: Ref<BufferInterf> = Ref::new(buffer.clone());
    let consumer: Ref<ConsumeInt> = all.narrow();
    all.tell(Insert(1)).unwrap();
    consumer.tell(Remove).unwrap();
    system.run_until_quiescent(10);
    assert_eq!(handled_kinds(&system, "buffer"), ["insert", "remove"]);
    assert_eq!(*consumer.dynamic().interface(), consume_int());
}
