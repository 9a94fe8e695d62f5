#![allow(dead_code)]

use tsactor_core::{
    ActorRef, Behavior, ChemicalVariant, Error, Interface, Message, ProtocolTable, RetainedSet,
    System,
};

pub fn buffer_interf() -> Interface {
    Interface::new("BufferInterf", ["insert", "remove"])
}

pub fn produce_int() -> Interface {
    Interface::new("ProduceInt", ["insert"])
}

pub fn consume_int() -> Interface {
    Interface::new("ConsumeInt", ["remove"])
}

/// insert leads to ConsumeInt and remove to ProduceInt.
pub fn single_user_table() -> ProtocolTable {
    ProtocolTable::new("single", [("insert", consume_int()), ("remove", produce_int())])
}

/// Each role stays at its own interface.
pub fn producer_consumer_table() -> ProtocolTable {
    ProtocolTable::new("pc", [("insert", produce_int()), ("remove", consume_int())])
}

pub fn insert(x: i64) -> Message {
    Message::new("insert").arg(x)
}

pub fn remove() -> Message {
    Message::new("remove")
}

/// Local state of a one-place buffer: the held value and every removal.
#[derive(Debug, Default)]
pub struct Buf {
    pub value: Option<i64>,
    pub removed: Vec<i64>,
}

/// A plain (non-chemical) buffer with the EMPTY and FULL behaviors.
pub fn plain_empty() -> Behavior<Buf> {
    Behavior::new("EMPTY").on("insert", |s: &mut Buf, ctx, env| {
        let x = env.message().int(0).expect("insert carries a value");
        s.value = Some(x);
        ctx.become_behavior(plain_full());
        ctx.emit(format!("inserted {x}"));
        Ok(())
    })
}

pub fn plain_full() -> Behavior<Buf> {
    Behavior::new("FULL").on("remove", |s: &mut Buf, ctx, _env| {
        let x = s.value.take().expect("FULL holds a value");
        s.removed.push(x);
        ctx.become_behavior(plain_empty());
        ctx.emit(format!("removed {x}"));
        Ok(())
    })
}

pub fn spawn_plain(system: &System) -> ActorRef {
    system.spawn("buffer", Buf::default(), plain_empty())
}

fn retained() -> RetainedSet {
    ["insert", "remove"].into_iter().collect()
}

/// Chemical buffer that completes each continuation at the successor the
/// sender's table fixed.
pub fn chem_empty() -> Behavior<Buf> {
    Behavior::new("EMPTY")
        .on("insert", |s: &mut Buf, ctx, env| {
            let x = env.message().int(0).expect("insert carries a value");
            s.value = Some(x);
            ctx.chem_become(chem_full());
            resolve(ctx, env)
        })
        .chem_react(&retained())
}

pub fn chem_full() -> Behavior<Buf> {
    Behavior::new("FULL")
        .on("remove", |s: &mut Buf, ctx, env| {
            let x = s.value.take().expect("FULL holds a value");
            s.removed.push(x);
            ctx.chem_become(chem_empty());
            resolve(ctx, env)
        })
        .chem_react(&retained())
}

fn resolve(ctx: &mut tsactor_core::Context<'_, Buf>, env: tsactor_core::Envelope) -> Result<(), Error> {
    let (_, reply) = env.into_parts();
    if let Some(reply) = reply {
        let next = ctx.continuation_ref(&reply, reply.next_interface())?;
        ctx.resolve(&reply, next)?;
    }
    Ok(())
}

pub fn spawn_chem(system: &System) -> ActorRef {
    system.spawn_chemical("buffer", ChemicalVariant::Stash, Buf::default(), chem_empty())
}

/// Kinds of the envelopes `actor_name` handled, in order.
pub fn handled_kinds(system: &System, actor_name: &str) -> Vec<String> {
    system
        .trace()
        .iter()
        .filter_map(|e| e.as_handling())
        .filter(|h| h.outcome == tsactor_core::Outcome::Handled && &*h.actor_name == actor_name)
        .map(|h| h.kind.to_string())
        .collect()
}

fn strings(items: &[&str]) -> Vec<String> {
    items.iter().map(|s| s.to_string()).collect()
}

fn state(name: &str, kinds: &[&str], interface: Option<&str>) -> tsactor_core::spec::StateDraft {
    tsactor_core::spec::StateDraft {
        name: name.into(),
        interface: strings(kinds),
        interface_name: interface.map(Into::into),
    }
}

fn message(name: &str, fields: &[(&str, &str)]) -> tsactor_core::spec::MessageDraft {
    tsactor_core::spec::MessageDraft {
        name: name.into(),
        fields: fields.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect(),
    }
}

fn pairs(items: &[(&str, &str)]) -> Vec<(String, String)> {
    items.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect()
}

/// One-place buffer: EMPTY accepts insert, FULL accepts remove.
pub fn buffer_draft() -> tsactor_core::SpecDraft {
    use tsactor_core::spec::InterfaceDraft;
    tsactor_core::SpecDraft {
        name: "buffer".into(),
        interfaces: vec![
            InterfaceDraft {
                name: "BufferInterf".into(),
                kinds: vec![],
                parents: vec![],
            },
            InterfaceDraft {
                name: "ProduceInt".into(),
                kinds: strings(&["insert"]),
                parents: strings(&["BufferInterf"]),
            },
            InterfaceDraft {
                name: "ConsumeInt".into(),
                kinds: strings(&["remove"]),
                parents: strings(&["BufferInterf"]),
            },
        ],
        states: vec![
            state("EMPTY", &["insert"], Some("ProduceInt")),
            state("FULL", &["remove"], Some("ConsumeInt")),
        ],
        messages: vec![message("insert", &[("value", "int")]), message("remove", &[])],
        transitions: pairs(&[("insert", "FULL"), ("remove", "EMPTY")]),
        initial: "EMPTY".into(),
        retained: strings(&["insert", "remove"]),
        client_tables: vec![],
    }
}

/// The buffer with producer and consumer roles that keep their interface.
pub fn buffer_pc_draft() -> tsactor_core::SpecDraft {
    let mut d = buffer_draft();
    d.name = "buffer_pc".into();
    d.client_tables = vec![
        ("producer".into(), pairs(&[("insert", "ProduceInt")])),
        ("consumer".into(), pairs(&[("remove", "ConsumeInt")])),
    ];
    d
}

pub fn bookshop_draft() -> tsactor_core::SpecDraft {
    tsactor_core::SpecDraft {
        name: "bookshop".into(),
        interfaces: vec![],
        states: vec![
            state("INIT", &["add", "checkout"], Some("InitInterf")),
            state("WHICH", &["book"], Some("WhichInterf")),
            state("CINFO", &["card"], Some("CInfoInterf")),
            state("ADDINFO", &["address"], Some("AddInfoInterf")),
            state("END", &[], Some("EndInterf")),
        ],
        messages: vec![
            message("add", &[("name", "text")]),
            message("book", &[("name", "text"), ("title", "text")]),
            message("checkout", &[("name", "text")]),
            message("card", &[("name", "text"), ("number", "text")]),
            message("address", &[("name", "text"), ("address", "text")]),
        ],
        transitions: pairs(&[
            ("add", "WHICH"),
            ("book", "INIT"),
            ("checkout", "CINFO"),
            ("card", "ADDINFO"),
            ("address", "END"),
        ]),
        initial: "INIT".into(),
        retained: strings(&["add"]),
        client_tables: vec![],
    }
}
