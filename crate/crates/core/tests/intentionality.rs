mod common;

use common::*;
use fabula::pocl::Algorithm;
use fabula::search::validate::validate;
use fabula::search::{plan_search, SearchConfig};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn intentional_solutions_explain_every_action(w in world()) {
        let (d, p) = w.parse();
        let mut config = SearchConfig::new(Algorithm::Ipocl);
        config.max_nodes = 3000;
        if let Ok(plan) = plan_search(&d, &p, &config).outcome {
            let v = intentionality_violations(&plan);
            prop_assert!(v.is_empty(), "{:?}\n{}\n{}", v, w.domain, w.problem);
            let report = validate(&plan, &p, Algorithm::Ipocl);
            prop_assert!(report.is_valid(), "{:?}", report.violations);
        }
    }

    #[test]
    fn searches_are_deterministic(w in world()) {
        let (d, p) = w.parse();
        let mut config = SearchConfig::new(Algorithm::Ipocl);
        config.max_nodes = 500;
        let a = plan_search(&d, &p, &config);
        let b = plan_search(&d, &p, &config);
        prop_assert_eq!(a.stats.nodes_generated, b.stats.nodes_generated);
        prop_assert_eq!(a.path, b.path);
        prop_assert_eq!(a.outcome.map(|p| step_multiset(&p)).ok(), b.outcome.map(|p| step_multiset(&p)).ok());
    }
}
