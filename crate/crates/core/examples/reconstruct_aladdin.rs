//! Rebuilds the reference Aladdin plan by depth-first search restricted to
//! refinements that only add the known steps and frames, then writes it as
//! plan JSON.
//!
//! cargo run --release -p fabula --example reconstruct_aladdin -- fixtures/aladdin-plan.json

use fabula::dsl::{parse_domain, parse_literal, parse_problem};
use fabula::export::plan_to_json_string;
use fabula::pocl::{Algorithm, Planner};
use fabula::{Plan, Term};

const STEPS: &[&str] = &[
    "fall-in-love jafar jasmine castle",
    "order jafar aladdin castle *",
    "travel aladdin castle mountain",
    "slay aladdin dragon mountain",
    "pillage aladdin dragon lamp mountain",
    "travel aladdin mountain castle",
    "give aladdin jafar lamp castle",
    "summon jafar genie lamp castle",
    "command jafar genie lamp *",
    "love-spell genie jasmine jafar",
    "appear-threatening genie aladdin castle",
    "slay aladdin genie castle",
    "marry jafar jasmine castle",
];

const FRAMES: &[(&str, &str)] = &[
    ("jasmine", "(married-to jasmine jafar)"),
    ("jafar", "(married-to jafar jasmine)"),
    ("genie", "(loves jasmine jafar)"),
    ("aladdin", "(has jafar lamp)"),
    ("aladdin", "(not (alive genie))"),
];

fn words(plan: &Plan, id: fabula::StepId) -> Vec<String> {
    let b = plan.bindings();
    let s = plan.step(id);
    let mut w = vec![s.name().to_string()];
    for a in s.args.iter() {
        w.push(match b.substitute_term(a) {
            Term::Sym(x) => x.to_string(),
            Term::Lit(_) => "*".into(),
            Term::Var(_) => "?".into(),
        });
    }
    w
}

fn fits(plan: &Plan) -> bool {
    let mut used = vec![false; STEPS.len()];
    for s in plan.ordinary_steps() {
        let w = words(plan, s.id);
        let hit = STEPS.iter().enumerate().position(|(i, t)| {
            let t: Vec<&str> = t.split(' ').collect();
            !used[i] && t.len() == w.len() && t.iter().zip(&w).all(|(a, x)| *a == "*" || x == "?" || a == x)
        });
        match hit {
            Some(i) => used[i] = true,
            None => return false,
        }
    }
    if plan.ordinary_steps().any(|s| s.name() == "marry" && plan.frame_of_final(s.id).count() != 2) {
        return false;
    }
    let b = plan.bindings();
    plan.frames().len() <= FRAMES.len()
        && plan.frames().iter().all(|f| {
            FRAMES
                .iter()
                .any(|(c, g)| f.character.as_str() == *c && b.substitute(&f.goal) == parse_literal(g).unwrap())
        })
}

fn main() {
    let out = std::env::args().nth(1);
    let d = parse_domain(include_str!("../fixtures/aladdin.domain")).unwrap();
    let p = parse_problem(include_str!("../fixtures/aladdin.problem")).unwrap();
    let planner = Planner::new(&d, &p, Algorithm::Ipocl);
    let mut stack = vec![(planner.initial_plan(), 0u32)];
    let mut visited = 0u64;
    while let Some((plan, depth)) = stack.pop() {
        visited += 1;
        if planner.is_complete(&plan) {
            eprintln!("complete at depth {depth} after {visited} visits");
            let json = plan_to_json_string(&plan, &d, &p);
            match &out {
                Some(path) => std::fs::write(path, json).unwrap(),
                None => print!("{json}"),
            }
            return;
        }
        let Some(f) = planner.select_flaw(&plan) else { continue };
        let kids: Vec<Plan> = planner.children(&plan, &f).into_iter().map(|(_, k)| k).filter(fits).collect();
        stack.extend(kids.into_iter().rev().map(|k| (k, depth + 1)));
    }
    eprintln!("not found after {visited} visits");
    std::process::exit(1);
}
