mod common;

use common::*;
use fabula::export::{plan_from_json_str, plan_to_dot, plan_to_json_string};
use fabula::pocl::Algorithm;
use fabula::search::{plan_search, SearchConfig};

#[test]
fn fixture_plan_json_is_a_fixed_point() {
    let (d, p) = aladdin();
    let text = plan_to_json_string(&aladdin_plan(), &d, &p);
    let again = plan_to_json_string(&plan_from_json_str(&text, &d, &p).unwrap(), &d, &p);
    assert_eq!(text, again);
}

#[test]
fn micro_plans_round_trip() {
    for m in MICRO {
        let (d, p) = micro(m);
        for alg in [Algorithm::Pocl, Algorithm::Ipocl] {
            let plan = plan_search(&d, &p, &SearchConfig::new(alg)).outcome.unwrap();
            let text = plan_to_json_string(&plan, &d, &p);
            let back = plan_from_json_str(&text, &d, &p).unwrap();
            assert_eq!(step_multiset(&back), step_multiset(&plan));
            assert_eq!(back.frames().len(), plan.frames().len());
            assert_eq!(plan_to_json_string(&back, &d, &p), text);
        }
    }
}

#[test]
fn dot_lists_every_step() {
    let plan = aladdin_plan();
    let dot = plan_to_dot(&plan);
    assert!(dot.starts_with("digraph"));
    for s in plan.ordinary_steps() {
        assert!(dot.contains(s.name()), "{}", s.name());
    }
}

#[test]
fn malformed_json_is_rejected() {
    let (d, p) = aladdin();
    assert!(plan_from_json_str("{", &d, &p).is_err());
    let text = plan_to_json_string(&aladdin_plan(), &d, &p).replace("\"slay\"", "\"smite\"");
    assert!(plan_from_json_str(&text, &d, &p).is_err());
}
