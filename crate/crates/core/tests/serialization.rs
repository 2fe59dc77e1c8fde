mod common;

use prbp::game::{GameConfig, Schedule};
use prbp::strategies::streaming_prbp;
use prbp::{ComputationDag, DagFile};
use proptest::prelude::*;

fn arb_dag() -> impl Strategy<Value = ComputationDag> {
    (2usize..12, any::<u64>()).prop_map(|(n, seed)| common::random_dag(&mut common::rng(seed), n))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn dag_json_round_trip(dag in arb_dag()) {
        let text = serde_json::to_string(&dag.to_file()).unwrap();
        let back: DagFile = serde_json::from_str(&text).unwrap();
        let rebuilt = back.build().unwrap();
        prop_assert_eq!(&rebuilt, &dag);
        prop_assert_eq!(serde_json::to_string(&rebuilt.to_file()).unwrap(), text);
    }

    #[test]
    fn streaming_is_complete_and_round_trips(dag in arb_dag(), r in 2usize..5) {
        let named = streaming_prbp(&dag, r);
        let rep = named.report(&dag);
        prop_assert!(rep.is_complete());
        prop_assert!(rep.io_cost >= dag.trivial_cost());
        prop_assert!(rep.peak_red <= r);
        let text = serde_json::to_string(&named.schedule).unwrap();
        let back: Schedule = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(back, named.schedule);
    }

    #[test]
    fn config_round_trip(r in 1usize..20, sliding in any::<bool>(), no_deletion in any::<bool>()) {
        let config = GameConfig { sliding, no_deletion, ..GameConfig::rbp(r) };
        let back: GameConfig = serde_json::from_str(&serde_json::to_string(&config).unwrap()).unwrap();
        prop_assert_eq!(back, config);
    }
}
