mod common;

use common::*;
use tsactor_core::spec::{TraceStep, DEFAULT_ROLE};
use tsactor_core::{Error, Kind, ProtocolTable, SpecDraft, Trace, Verdict};

fn kinds(items: &[&str]) -> Vec<Kind> {
    items.iter().map(|k| Kind::new(k)).collect()
}

#[test]
fn buffer_spec_has_two_states() {
    let spec = buffer_draft().validate().unwrap();
    let names: Vec<_> = spec.states().iter().map(|s| s.name()).collect();
    assert_eq!(names, ["EMPTY", "FULL"]);
    assert_eq!(spec.initial().name(), "EMPTY");
    assert_eq!(*spec.state("EMPTY").unwrap().interface(), produce_int());
    assert_eq!(*spec.interface("BufferInterf").unwrap(), buffer_interf());
    assert!(spec.retained().contains(&Kind::new("insert")));
}

#[test]
fn bookshop_spec_has_five_states_and_terminal_end() {
    let spec = bookshop_draft().validate().unwrap();
    let names: Vec<_> = spec.states().iter().map(|s| s.name()).collect();
    assert_eq!(names, ["INIT", "WHICH", "CINFO", "ADDINFO", "END"]);
    let edges: Vec<_> = ["add", "book", "checkout", "card", "address"]
        .iter()
        .map(|k| spec.transition(&Kind::new(k)).unwrap().name())
        .collect();
    assert_eq!(edges, ["WHICH", "INIT", "CINFO", "ADDINFO", "END"]);
    assert!(spec.state("END").unwrap().is_terminal());
    assert!(spec.state("END").unwrap().interface().is_empty());
}

#[test]
fn every_required_transition_is_enforced() {
    for draft in [buffer_draft(), bookshop_draft()] {
        for i in 0..draft.transitions.len() {
            let mut d = draft.clone();
            let (kind, _) = d.transitions.remove(i);
            let err = d.validate().unwrap_err();
            assert_eq!(err.code(), "SPEC_INVALID");
            assert!(err.to_string().contains(&kind), "{err}");
        }
    }
}

#[test]
fn malformed_drafts_are_invalid() {
    let mut cases: Vec<SpecDraft> = Vec::new();
    let mut d = buffer_draft();
    d.initial = "NOWHERE".into();
    cases.push(d);
    let mut d = buffer_draft();
    d.retained.push("ghost".into());
    cases.push(d);
    let mut d = buffer_draft();
    d.transitions.push(("insert".into(), "EMPTY".into()));
    cases.push(d);
    let mut d = buffer_draft();
    d.transitions[0].1 = "LIMBO".into();
    cases.push(d);
    let mut d = buffer_draft();
    d.states.push(d.states[0].clone());
    cases.push(d);
    let mut d = buffer_draft();
    d.states[0].interface.push("remove".into());
    cases.push(d);
    let mut d = buffer_draft();
    d.states.clear();
    cases.push(d);
    let mut d = buffer_pc_draft();
    d.client_tables[0].1[0].1 = "Nope".into();
    cases.push(d);
    let mut d = buffer_pc_draft();
    d.client_tables[0].1[0].1 = "ConsumeInt".into();
    cases.push(d);
    let mut d = buffer_pc_draft();
    d.client_tables
        .push((DEFAULT_ROLE.into(), vec![("insert".into(), "ProduceInt".into()), ("remove".into(), "ProduceInt".into())]));
    cases.push(d);
    for (i, d) in cases.into_iter().enumerate() {
        let err = d.validate().unwrap_err();
        assert_eq!(err.code(), "SPEC_INVALID", "case {i}: {err}");
    }
}

#[test]
fn successor_follows_edges() {
    let buffer = buffer_draft().validate().unwrap();
    assert_eq!(buffer.successor("EMPTY", &Kind::new("insert")).unwrap().name(), "FULL");
    assert_eq!(
        buffer.successor("FULL", &Kind::new("insert")),
        Err(Error::KindNotEnabled {
            state: "FULL".into(),
            kind: Kind::new("insert")
        })
    );
    assert_eq!(buffer.successor("LIMBO", &Kind::new("insert")).unwrap_err().code(), "UNKNOWN_STATE");
    let shop = bookshop_draft().validate().unwrap();
    assert_eq!(shop.successor("INIT", &Kind::new("checkout")).unwrap().name(), "CINFO");
    assert!(shop.successor("END", &Kind::new("add")).is_err());
}

#[test]
fn check_trace_verdicts() {
    let spec = buffer_draft().validate().unwrap();
    assert_eq!(
        spec.check_trace(&Trace::from_kinds(["insert", "remove", "insert", "remove"])),
        Verdict::Ok {
            final_state: "EMPTY".into()
        }
    );
    assert_eq!(
        spec.check_trace(&Trace::from_kinds(["insert", "insert"])),
        Verdict::Violation {
            index: 1,
            state: "FULL".into(),
            kind: Kind::new("insert")
        }
    );
    assert!(spec.check_trace(&Trace::default()).is_ok());
    assert!(!spec.check_kinds(&kinds(&["remove"])).is_ok());
    assert!(!spec.check_kinds(&kinds(&["insert", "<raw>"])).is_ok());
}

#[test]
fn end_state_absorbs() {
    let shop = bookshop_draft().validate().unwrap();
    let session = ["add", "book", "add", "book", "checkout", "card", "address"];
    assert_eq!(
        shop.check_trace(&Trace::from_kinds(session)),
        Verdict::Ok {
            final_state: "END".into()
        }
    );
    let mut longer = session.to_vec();
    longer.push("add");
    assert!(matches!(
        shop.check_trace(&Trace::from_kinds(longer)),
        Verdict::Violation { index: 7, .. }
    ));
}

#[test]
fn per_client_check_projects_by_sender() {
    let shop = bookshop_draft().validate().unwrap();
    let step = |kind: &str, client: &str| TraceStep {
        state: None,
        kind: Kind::new(kind),
        client: Some(client.into()),
    };
    let trace = Trace {
        steps: vec![
            step("add", "Mary"),
            step("book", "Mary"),
            step("add", "Jane"),
            step("checkout", "Mary"),
            step("card", "Mary"),
            step("address", "Mary"),
        ],
    };
    assert!(!shop.check_trace(&trace).is_ok());
    let verdicts = shop.check_per_client(&trace);
    assert_eq!(verdicts.len(), 2);
    assert_eq!(verdicts["Mary"], Verdict::Ok { final_state: "END".into() });
    assert_eq!(verdicts["Jane"], Verdict::Ok { final_state: "WHICH".into() });
    assert_eq!(trace.clients(), ["Mary", "Jane"]);
}

#[test]
fn client_tables_per_role() {
    let pc = buffer_pc_draft().validate().unwrap();
    assert_eq!(
        *pc.client_table("producer").unwrap(),
        ProtocolTable::new("producer", [("insert", produce_int())])
    );
    assert_eq!(
        *pc.client_table("consumer").unwrap(),
        ProtocolTable::new("consumer", [("remove", consume_int())])
    );
    assert_eq!(pc.client_table("auditor").unwrap_err().code(), "UNKNOWN_ROLE");
    let single = buffer_draft().validate().unwrap();
    assert_eq!(
        *single.client_table(DEFAULT_ROLE).unwrap(),
        ProtocolTable::new(DEFAULT_ROLE, [("insert", consume_int()), ("remove", produce_int())])
    );
    let roles: Vec<_> = pc.roles().collect();
    assert_eq!(roles, ["consumer", "default", "producer"]);
}

#[test]
fn draft_round_trip() {
    for draft in [buffer_draft(), buffer_pc_draft(), bookshop_draft()] {
        let spec = draft.validate().unwrap();
        let again = spec.to_draft().validate().unwrap();
        assert_eq!(spec, again);
        assert_eq!(spec.to_draft(), again.to_draft());
    }
}
