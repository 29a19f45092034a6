#![allow(dead_code)]

use std::path::PathBuf;

use fabula::dsl::{parse_domain, parse_heuristic_rules, parse_problem, parse_templates};
use fabula::export::plan_from_json_str;
use fabula::heuristics::RuleSet;
use fabula::model::unify;
use fabula::narrate::TemplateSet;
use fabula::{DomainTheory, Plan, Problem};
use proptest::prelude::*;

pub const MICRO: &[&str] = &["villain", "locked-tower", "courier"];

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures").join(name)
}

pub fn fixture(name: &str) -> String {
    std::fs::read_to_string(fixture_path(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

pub fn aladdin() -> (DomainTheory, Problem) {
    (parse_domain(&fixture("aladdin.domain")).unwrap(), parse_problem(&fixture("aladdin.problem")).unwrap())
}

pub fn aladdin_rules() -> RuleSet {
    parse_heuristic_rules(&fixture("aladdin.rules")).unwrap()
}

pub fn aladdin_templates() -> TemplateSet {
    parse_templates(&fixture("aladdin.tmpl")).unwrap()
}

/// The reference IPOCL solution for Aladdin, rebuilt by the
/// `reconstruct_aladdin` example.
pub fn aladdin_plan() -> Plan {
    let (d, p) = aladdin();
    plan_from_json_str(&fixture("aladdin-plan.json"), &d, &p).unwrap()
}

pub fn micro(name: &str) -> (DomainTheory, Problem) {
    (
        parse_domain(&fixture(&format!("micro/{name}.domain"))).unwrap(),
        parse_problem(&fixture(&format!("micro/{name}.problem"))).unwrap(),
    )
}

pub fn micro_templates(name: &str) -> TemplateSet {
    parse_templates(&fixture(&format!("micro/{name}.tmpl"))).unwrap()
}

/// Sorted `name arg ...` strings of a plan's ordinary steps.
pub fn step_multiset(plan: &Plan) -> Vec<String> {
    let b = plan.bindings();
    let mut v: Vec<String> = plan
        .ordinary_steps()
        .map(|s| {
            let r = s.rebound(b);
            let mut k = r.name().to_string();
            for a in r.args.iter() {
                k.push(' ');
                k.push_str(&a.to_string());
            }
            k
        })
        .collect();
    v.sort();
    v
}

/// Breaches of the intentionality conditions on a complete IPOCL plan.
pub fn intentionality_violations(plan: &Plan) -> Vec<String> {
    let b = plan.bindings();
    let o = plan.ordering();
    let mut out = Vec::new();
    for s in plan.ordinary_steps() {
        if !s.happening && plan.frames_containing(s.id).next().is_none() {
            out.push(format!("orphan {s}"));
        }
    }
    for f in plan.frames() {
        match f.motivating_step {
            None => out.push(format!("frame {} unmotivated", f.id)),
            Some(m) => {
                for &s in &f.interval {
                    if !o.precedes(m, s) {
                        out.push(format!("frame {}: motivation {m} not before {s}", f.id));
                    }
                }
            }
        }
        if !plan.step(f.final_step).effect.iter().any(|e| unify(e, &f.goal, b).is_some()) {
            out.push(format!("frame {}: final step lacks the goal", f.id));
        }
    }
    let frames = plan.frames();
    for (i, f) in frames.iter().enumerate() {
        for g in &frames[i + 1..] {
            if f.character != g.character || !b.substitute(&f.goal).negates(&b.substitute(&g.goal)) {
                continue;
            }
            let before =
                |x: &[fabula::StepId], y: &[fabula::StepId]| x.iter().all(|&a| y.iter().all(|&c| o.precedes(a, c)));
            if !before(&f.interval, &g.interval) && !before(&g.interval, &f.interval) {
                out.push(format!("frames {} and {} negate each other and overlap", f.id, g.id));
            }
        }
    }
    out
}

/// A small random world: two or three characters, unary facts, and up to
/// three schemata whose effects may plant intentions in other characters.
#[derive(Clone, Debug)]
pub struct World {
    pub domain: String,
    pub problem: String,
}

const PREDS: &[&str] = &["p", "q", "r"];

fn lit(neg: bool, pred: usize, var: &str) -> String {
    if neg {
        format!("(not ({} {var}))", PREDS[pred])
    } else {
        format!("({} {var})", PREDS[pred])
    }
}

fn schema_strategy(i: usize) -> impl Strategy<Value = String> {
    (
        any::<bool>(),
        prop::collection::vec((any::<bool>(), 0..PREDS.len(), any::<bool>()), 0..3),
        prop::collection::vec((any::<bool>(), 0..PREDS.len(), any::<bool>()), 1..3),
        prop::option::of((0..PREDS.len(), any::<bool>())),
        0u8..4,
    )
        .prop_map(move |(distinct, pre, eff, plant, mode)| {
            let var = |second: bool| if second { "?b" } else { "?a" };
            let mut pre: Vec<String> = pre.iter().map(|&(n, p, v)| lit(n, p, var(v))).collect();
            if distinct {
                pre.push("(neq ?a ?b)".into());
            }
            let mut eff: Vec<String> = eff.iter().map(|&(n, p, v)| lit(n, p, var(v))).collect();
            if let Some((p, v)) = plant {
                eff.push(format!("(intends ?b {})", lit(false, p, var(!v))));
            }
            eff.sort();
            eff.dedup();
            let (actors, happening) = match mode {
                0 => ("()", " :happening t"),
                1 => ("(?a ?b)", ""),
                _ => ("(?a)", ""),
            };
            format!(
                "(action act{i} :parameters (?a ?b) :actors {actors}{happening}\n  :constraints ((character ?a) (character ?b))\n  :precondition ({})\n  :effect ({}))",
                pre.join(" "),
                eff.join(" ")
            )
        })
}

pub fn world() -> impl Strategy<Value = World> {
    (
        2usize..4,
        prop::collection::vec(schema_strategy(0), 1..4),
        prop::collection::vec((0..PREDS.len(), 0usize..3), 0..4),
        prop::collection::vec((0usize..3, 0..PREDS.len(), 0usize..3), 0..3),
        prop::collection::vec((any::<bool>(), 0..PREDS.len(), 0usize..3), 1..3),
    )
        .prop_map(|(chars, schemata, facts, wants, goal)| {
            let names = ["c0", "c1", "c2"];
            let c = |i: usize| names[i % chars];
            let schemata: Vec<String> =
                schemata.iter().enumerate().map(|(i, s)| s.replacen("act0", &format!("act{i}"), 1)).collect();
            let mut init: Vec<String> = (0..chars).map(|i| format!("(character {})", names[i])).collect();
            init.extend(facts.iter().map(|&(p, x)| lit(false, p, c(x))));
            init.extend(wants.iter().map(|&(w, p, x)| format!("(intends {} {})", c(w), lit(false, p, c(x)))));
            init.sort();
            init.dedup();
            let mut goal: Vec<String> = goal.iter().map(|&(n, p, x)| lit(n, p, c(x))).collect();
            goal.sort();
            goal.dedup();
            if goal.iter().any(|g| goal.contains(&format!("(not {g})"))) {
                goal.retain(|g| !g.starts_with("(not"));
            }
            World {
                domain: format!("(domain gen\n{})", schemata.join("\n")),
                problem: format!("(problem gen :init ({}) :goal ({}))", init.join(" "), goal.join(" ")),
            }
        })
}

impl World {
    pub fn parse(&self) -> (DomainTheory, Problem) {
        (
            parse_domain(&self.domain).unwrap_or_else(|e| panic!("{e}\n{}", self.domain)),
            parse_problem(&self.problem).unwrap_or_else(|e| panic!("{e}\n{}", self.problem)),
        )
    }
}
