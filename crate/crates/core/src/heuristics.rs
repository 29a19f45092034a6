//! Plan evaluation functions for best-first search.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::model::{Literal, Plan, Symbol, Term};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Rule {
    /// Charged once per pair of steps with the same schema and arguments.
    RepeatAction { weight: u64 },
    /// Charged once per frame whose (character, goal) is not listed.
    FrameAllowlist { weight: u64, allowed: Vec<(Symbol, Literal)> },
    /// Charged once per step of `action` that belongs to fewer than `required`
    /// frames.
    ActionFrameCount { weight: u64, action: Symbol, required: usize },
    /// Charged once per step of `action`.
    ForbidAction { weight: u64, action: Symbol },
    /// Charged once per frame with this character and goal.
    ForbidFrame { weight: u64, character: Symbol, goal: Literal },
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuleSet {
    pub rules: Vec<Rule>,
}

impl RuleSet {
    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HeuristicKind {
    Classical,
    IpoclDi,
    Rules,
    /// `IpoclDi + Rules`.
    Combined,
}

impl std::str::FromStr for HeuristicKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "classical" => Ok(HeuristicKind::Classical),
            "ipocl-di" => Ok(HeuristicKind::IpoclDi),
            "rules" => Ok(HeuristicKind::Rules),
            "combined" => Ok(HeuristicKind::Combined),
            other => Err(format!("unknown heuristic {other}")),
        }
    }
}

pub fn evaluate(kind: HeuristicKind, plan: &Plan, rules: &RuleSet) -> u64 {
    match kind {
        HeuristicKind::Classical => h_classical(plan),
        HeuristicKind::IpoclDi => h_ipocl_di(plan),
        HeuristicKind::Rules => h_rules(plan, rules),
        HeuristicKind::Combined => h_ipocl_di(plan) + h_rules(plan, rules),
    }
}

/// Pending flaws plus ordinary steps.
pub fn h_classical(plan: &Plan) -> u64 {
    (plan.flaws().len() + plan.ordinary_count()) as u64
}

/// Steps, flaws, 10 per surplus frame of each character, and 1000 per orphan
/// with an actor that owns no frames.
pub fn h_ipocl_di(plan: &Plan) -> u64 {
    let mut per_character: BTreeMap<&Symbol, u64> = BTreeMap::new();
    for f in plan.frames() {
        *per_character.entry(&f.character).or_default() += 1;
    }
    let surplus: u64 = per_character.values().map(|&n| n.saturating_sub(1)).sum();
    let orphan_penalty: u64 = crate::ipocl::orphans(plan)
        .iter()
        .filter(|s| s.actors.iter().any(|a| !per_character.contains_key(a)))
        .count() as u64
        * 1000;
    (plan.ordinary_count() + plan.flaws().len()) as u64 + 10 * surplus + orphan_penalty
}

pub fn h_rules(plan: &Plan, rules: &RuleSet) -> u64 {
    rules.rules.iter().map(|r| rule_penalty(plan, r)).sum()
}

fn resolved_args(plan: &Plan, args: &[Term]) -> Vec<Term> {
    args.iter().map(|t| plan.bindings().substitute_term(t)).collect()
}

pub fn rule_penalty(plan: &Plan, rule: &Rule) -> u64 {
    match rule {
        Rule::RepeatAction { weight } => {
            let mut groups: BTreeMap<(&str, Vec<Term>), u64> = BTreeMap::new();
            for s in plan.ordinary_steps() {
                *groups.entry((s.name(), resolved_args(plan, &s.args))).or_default() += 1;
            }
            let pairs: u64 = groups.values().map(|&k| k * k.saturating_sub(1) / 2).sum();
            weight * pairs
        }
        Rule::FrameAllowlist { weight, allowed } => {
            let misses = plan
                .frames()
                .iter()
                .filter(|f| {
                    let goal = plan.bindings().substitute(&f.goal);
                    !allowed.iter().any(|(c, g)| *c == f.character && *g == goal)
                })
                .count() as u64;
            weight * misses
        }
        Rule::ActionFrameCount { weight, action, required } => {
            let short = plan
                .ordinary_steps()
                .filter(|s| s.name() == action.as_str())
                .filter(|s| plan.frames_containing(s.id).count() < *required)
                .count() as u64;
            weight * short
        }
        Rule::ForbidAction { weight, action } => {
            weight * plan.ordinary_steps().filter(|s| s.name() == action.as_str()).count() as u64
        }
        Rule::ForbidFrame { weight, character, goal } => {
            let hits = plan
                .frames()
                .iter()
                .filter(|f| f.character == *character && plan.bindings().substitute(&f.goal) == *goal)
                .count() as u64;
            weight * hits
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse_literal;
    use crate::model::{Flaw, Frame, FrameId, Step, StepId};
    use std::sync::Arc;

    fn schema(name: &str) -> Arc<crate::model::ActionSchema> {
        let d = crate::dsl::parse_domain(&format!(
            "(domain d (action {name} :parameters (?a ?b) :actors (?a) :precondition () :effect ((p ?a ?b))))"
        ))
        .unwrap();
        Arc::new(d.schemata[0].clone())
    }

    fn add(plan: &mut Plan, name: &str, a: &str, b: &str) -> StepId {
        let id = plan.next_step_id();
        plan.add_step(Step::instantiate(id, schema(name), vec![Term::sym(a), Term::sym(b)]))
    }

    fn frame(plan: &mut Plan, who: &str, goal: &str, step: StepId) {
        let id = plan.next_frame_id();
        plan.add_frame(Frame {
            id,
            character: Symbol::new(who),
            goal: parse_literal(goal).unwrap(),
            interval: vec![step],
            final_step: step,
            motivating_step: None,
        });
    }

    #[test]
    fn classical_counts_flaws_and_steps() {
        let mut p = Plan::skeleton(vec![], vec![]);
        assert_eq!(h_classical(&p), 0);
        for g in ["(a)", "(b)"] {
            p.push_flaw(Flaw::OpenCondition { step: StepId::GOAL, condition: parse_literal(g).unwrap() });
        }
        assert_eq!(h_classical(&p), 2);
    }

    #[test]
    fn ipocl_di_arithmetic() {
        // 3 actions, 2 flaws, a:1 frame, b:2 frames, no orphans -> 3 + 2 + 10
        let mut p = Plan::skeleton(vec![], vec![]);
        let s1 = add(&mut p, "x", "a", "b");
        let s2 = add(&mut p, "y", "b", "a");
        let s3 = add(&mut p, "z", "b", "b");
        frame(&mut p, "a", "(p a b)", s1);
        frame(&mut p, "b", "(p b a)", s2);
        frame(&mut p, "b", "(p b b)", s3);
        for g in ["(u)", "(v)"] {
            p.push_flaw(Flaw::OpenCondition { step: StepId::GOAL, condition: parse_literal(g).unwrap() });
        }
        assert_eq!(h_ipocl_di(&p), 15);
    }

    #[test]
    fn orphan_of_frameless_character_costs_1000() {
        let mut p = Plan::skeleton(vec![], vec![]);
        add(&mut p, "x", "a", "b");
        assert_eq!(h_ipocl_di(&p), 1 + 1000);
        assert_eq!(h_ipocl_di(&Plan::skeleton(vec![], vec![])), 0);
    }

    #[test]
    fn repeat_action_counts_pairs() {
        let mut p = Plan::skeleton(vec![], vec![]);
        add(&mut p, "x", "a", "b");
        add(&mut p, "x", "a", "b");
        add(&mut p, "x", "a", "c");
        let rules = RuleSet { rules: vec![Rule::RepeatAction { weight: 5000 }] };
        assert_eq!(h_rules(&p, &rules), 5000);
        assert_eq!(h_rules(&p, &RuleSet::default()), 0);
    }

    #[test]
    fn allowlist_and_frame_count() {
        let mut p = Plan::skeleton(vec![], vec![]);
        let s = add(&mut p, "marry", "jafar", "jasmine");
        frame(&mut p, "jafar", "(not (alive jasmine))", s);
        let allow = Rule::FrameAllowlist {
            weight: 5000,
            allowed: vec![(Symbol::new("jafar"), parse_literal("(married-to jafar jasmine)").unwrap())],
        };
        let count = Rule::ActionFrameCount { weight: 1000, action: Symbol::new("marry"), required: 2 };
        assert_eq!(rule_penalty(&p, &allow), 5000);
        assert_eq!(rule_penalty(&p, &count), 1000);
        let _ = FrameId(1);
    }
}
