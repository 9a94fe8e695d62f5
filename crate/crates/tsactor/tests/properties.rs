use std::io::Cursor;

use proptest::prelude::*;
use tsactor::core::ChemicalVariant;
use tsactor::scenarios::{self, Policy, Scenario, ScenarioConfig};
use tsactor::{read_trace, Record};

fn record() -> impl Strategy<Value = Record> {
    let outcome = prop_oneof![
        Just("handled".to_string()),
        Just("stashed".to_string()),
        Just("dead-letter".to_string()),
        (0usize..50).prop_map(|n| format!("flush({n})")),
    ];
    (
        any::<u64>(),
        "[a-z]{1,8}",
        proptest::option::of("[A-Z]{1,6}"),
        "[a-z]{1,8}",
        outcome,
        proptest::option::of("[A-Za-z0-9 ]{0,12}"),
        proptest::option::of(".{0,12}"),
    )
        .prop_map(|(step, actor, state, kind, outcome, client, payload)| {
            let flush = outcome.starts_with("flush");
            Record {
                step,
                actor,
                state: if flush { None } else { state },
                kind: if flush { None } else { Some(kind) },
                outcome,
                client,
                payload,
            }
        })
}

proptest! {
    #[test]
    fn records_survive_a_round_trip(records in proptest::collection::vec(record(), 0..20)) {
        let text: String = records
            .iter()
            .map(|r| serde_json::to_string(r).unwrap() + "\n")
            .collect();
        let back = read_trace(Cursor::new(text)).unwrap();
        prop_assert_eq!(back, records);
    }

    #[test]
    fn producers_and_consumers_conserve_values(
        seed in any::<u64>(),
        producers in 1usize..4,
        consumers in 1usize..4,
        items in 1usize..6,
        resend in any::<bool>(),
    ) {
        let mut config = ScenarioConfig::new(Scenario::BufferPc).seed(seed);
        config.producers = producers;
        config.consumers = consumers;
        config.items = items;
        config.removes = Some(1);
        if resend {
            config.chemical = ChemicalVariant::Resend;
        }
        let report = scenarios::run(&config).unwrap();
        prop_assert!(report.verdict("buffer").unwrap().is_ok());
        prop_assert_eq!(report.retained_dead_letters, 0);
        let inserts = report.handled().filter(|h| h.kind.as_str() == "insert").count();
        let removes = report.handled().filter(|h| h.kind.as_str() == "remove").count();
        prop_assert_eq!(report.removed.len(), removes);
        prop_assert!(inserts == removes || inserts == removes + 1);
        prop_assert_eq!(removes, consumers.min(producers * items));
    }

    #[test]
    fn bookshop_users_always_finish(seed in any::<u64>(), users in 1usize..6, interleave in any::<bool>()) {
        let mut config = ScenarioConfig::new(Scenario::Bookshop).seed(seed);
        config.users = users;
        config.policy = Some(if interleave { Policy::InterleaveInit } else { Policy::SerializeUsers });
        let report = scenarios::run(&config).unwrap();
        prop_assert!(report.is_ok(), "{}", report.render());
        prop_assert_eq!(report.completions.len(), users);
    }
}
