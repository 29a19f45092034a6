mod common;

use fabula::dsl::{parse_domain, parse_problem};
use fabula::ipocl::create_frames;
use fabula::pocl::{Algorithm, Planner};
use proptest::prelude::*;

fn world(effects: usize, actors: usize) -> (String, String) {
    let params: Vec<String> = (0..actors).map(|i| format!("?x{i}")).collect();
    let types: Vec<String> = (0..actors).map(|i| format!("(t{i} ?x{i})")).collect();
    let eff: Vec<String> = (0..effects).map(|i| format!("(f{i} ?x0)")).collect();
    let domain = format!(
        "(domain w (action act :parameters ({p}) :actors ({p}) :constraints ({t}) :effect ({e})))",
        p = params.join(" "),
        t = types.join(" "),
        e = eff.join(" ")
    );
    let init: Vec<String> = (0..actors).map(|i| format!("(t{i} c{i})")).collect();
    let problem = format!("(problem w :init ({}) :goal ((f0 c0)))", init.join(" "));
    (domain, problem)
}

proptest! {
    #[test]
    fn new_step_yields_one_child_per_frame_combination(e in 1usize..7, a in 1usize..4) {
        let (d, p) = world(e, a);
        let (d, p) = (parse_domain(&d).unwrap(), parse_problem(&p).unwrap());
        let want = ((e + 1) as u32).pow(a as u32);
        let planner = Planner::new(&d, &p, Algorithm::Ipocl);
        prop_assert_eq!(planner.frame_combinations(&d.schemata[0]), want);
        let root = planner.initial_plan();
        let flaw = planner.select_flaw(&root).unwrap();
        let children = planner.children(&root, &flaw);
        prop_assert_eq!(children.len() as u32, want);
        let pocl = Planner::new(&d, &p, Algorithm::Pocl);
        prop_assert_eq!(pocl.children(&pocl.initial_plan(), &flaw).len(), 1);
    }

    #[test]
    fn choices_beyond_the_range_are_rejected(e in 0usize..7, a in 1usize..4) {
        let (d, p) = world(e.max(1), a);
        let (d, p) = (parse_domain(&d).unwrap(), parse_problem(&p).unwrap());
        let planner = Planner::new(&d, &p, Algorithm::Ipocl);
        let root = planner.initial_plan();
        let flaw = planner.select_flaw(&root).unwrap();
        let (_, child) = planner.children(&root, &flaw).swap_remove(0);
        let step = child.ordinary_steps().next().unwrap().id;
        let n = ((e.max(1) + 1) as u32).pow(a as u32);
        prop_assert!(create_frames(&mut child.clone(), step, n - 1).is_some());
        prop_assert!(create_frames(&mut child.clone(), step, n).is_none());
    }
}
