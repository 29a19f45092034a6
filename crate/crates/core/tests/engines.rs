mod common;

use common::*;
use fabula::pocl::Algorithm;
use fabula::search::oracle::{oracle_solve, plan_sequences};
use fabula::search::validate::validate;
use fabula::search::{plan_search, SearchConfig};
use proptest::prelude::*;

const BOTH: [Algorithm; 2] = [Algorithm::Pocl, Algorithm::Ipocl];

#[test]
fn micro_solutions_validate() {
    for m in MICRO {
        let (d, p) = micro(m);
        for alg in BOTH {
            let r = plan_search(&d, &p, &SearchConfig::new(alg));
            let plan = r.outcome.unwrap_or_else(|f| panic!("{m} {alg:?}: {f}"));
            let report = validate(&plan, &p, alg);
            assert!(report.is_valid(), "{m} {alg:?}: {:?}", report.violations);
            if alg == Algorithm::Ipocl {
                assert!(intentionality_violations(&plan).is_empty(), "{m}");
            }
        }
    }
}

#[test]
fn micro_solutions_agree_with_oracle() {
    for m in MICRO {
        let (d, p) = micro(m);
        for alg in BOTH {
            let plan = plan_search(&d, &p, &SearchConfig::new(alg)).outcome.unwrap();
            let oracle = oracle_solve(&d, &p, plan.ordinary_count());
            for seq in plan_sequences(&plan, 1000) {
                assert!(oracle.contains(&seq), "{m} {alg:?}: {seq:?}");
            }
        }
    }
}

#[test]
fn villain_adopts_coercion() {
    let (d, p) = micro("villain");
    let plan = plan_search(&d, &p, &SearchConfig::new(Algorithm::Ipocl)).outcome.unwrap();
    assert_eq!(step_multiset(&plan).len(), 3);
    assert!(step_multiset(&plan).iter().any(|s| s.starts_with("coerce")));
    let villain = plan.frames().iter().find(|f| f.character.as_str() == "villain").unwrap();
    assert!(villain.interval.len() >= 2);
}

#[test]
fn reference_solution_validates() {
    let (_, p) = aladdin();
    let plan = aladdin_plan();
    let report = validate(&plan, &p, Algorithm::Ipocl);
    assert!(report.is_valid(), "{:?}", report.violations);
    assert_eq!(plan.ordinary_count(), 13);
    assert_eq!(plan.frames().len(), 5);
    assert!(intentionality_violations(&plan).is_empty());
}

#[test]
fn pocl_reads_the_reference_solution_as_unexplained() {
    let (_, p) = aladdin();
    let report = validate(&aladdin_plan(), &p, Algorithm::Pocl);
    assert!(report.is_valid(), "{:?}", report.violations);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn solutions_are_sound(w in world()) {
        let (d, p) = w.parse();
        for alg in BOTH {
            let mut config = SearchConfig::new(alg);
            config.max_nodes = 2000;
            if let Ok(plan) = plan_search(&d, &p, &config).outcome {
                let report = validate(&plan, &p, alg);
                prop_assert!(report.is_valid(), "{:?}\n{}\n{}", report.violations, w.domain, w.problem);
                let oracle = oracle_solve(&d, &p, plan.ordinary_count());
                for seq in plan_sequences(&plan, 200) {
                    prop_assert!(oracle.contains(&seq), "{:?}", seq);
                }
            }
        }
    }
}
