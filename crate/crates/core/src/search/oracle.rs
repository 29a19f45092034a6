//! Brute-force forward search used as ground truth on small domains.
//!
//! Actions are keyed by name and entity arguments; literal-valued parameters
//! are dropped from keys since forward search cannot enumerate them.

use std::collections::{BTreeSet, HashSet};

use crate::model::{DomainTheory, Literal, Plan, Problem, StepId, Term};
use crate::pocl::ground_schema;

use super::validate::{apply_effects, holds};

struct GroundAction {
    key: String,
    precondition: Vec<Literal>,
    effect: Vec<Literal>,
}

fn key_of(name: &str, args: impl Iterator<Item = String>) -> String {
    let mut k = name.to_string();
    for a in args {
        k.push(' ');
        k.push_str(&a);
    }
    k
}

fn ground_actions(domain: &DomainTheory, problem: &Problem) -> Vec<GroundAction> {
    let universe = problem.symbols();
    let init: HashSet<Literal> = problem.initial.iter().cloned().collect();
    let mut out = Vec::new();
    for schema in &domain.schemata {
        for g in ground_schema(schema, &universe, &init) {
            let value = |v: &crate::model::Variable| schema.param_index(v).map(|i| g[i].clone());
            let subst = |lits: &[Literal]| -> Vec<Literal> { lits.iter().map(|l| l.map_vars(&mut |v| value(v))).collect() };
            let args = schema
                .params
                .iter()
                .zip(&g)
                .filter(|(p, _)| !schema.is_literal_param(p))
                .map(|(_, t)| t.to_string());
            out.push(GroundAction {
                key: key_of(schema.name.as_str(), args),
                precondition: subst(&schema.precondition),
                effect: subst(&schema.effect),
            });
        }
    }
    out
}

/// Every action sequence of length at most `max_len` that is executable from
/// the initial state and ends in a state satisfying the goal.
pub fn oracle_solve(domain: &DomainTheory, problem: &Problem, max_len: usize) -> BTreeSet<Vec<String>> {
    let actions = ground_actions(domain, problem);
    let init: HashSet<Literal> = problem.initial.iter().cloned().collect();
    let mut out = BTreeSet::new();
    let mut prefix = Vec::new();
    dfs(&actions, problem, &init, max_len, &mut prefix, &mut out);
    out
}

fn dfs(
    actions: &[GroundAction],
    problem: &Problem,
    state: &HashSet<Literal>,
    left: usize,
    prefix: &mut Vec<String>,
    out: &mut BTreeSet<Vec<String>>,
) {
    if problem.goal.iter().all(|g| holds(state, g)) {
        out.insert(prefix.clone());
    }
    if left == 0 {
        return;
    }
    for a in actions {
        if a.precondition.iter().all(|p| !p.is_ground() || holds(state, p)) {
            let mut next = state.clone();
            apply_effects(&mut next, &a.effect);
            prefix.push(a.key.clone());
            dfs(actions, problem, &next, left - 1, prefix, out);
            prefix.pop();
        }
    }
}

/// Oracle keys for plan steps in the given order.
pub fn plan_keys(plan: &Plan, order: &[StepId]) -> Vec<String> {
    let b = plan.bindings();
    order
        .iter()
        .map(|&id| {
            let s = plan.step(id);
            let args = match &s.schema {
                Some(schema) => schema
                    .params
                    .iter()
                    .zip(s.args.iter())
                    .filter(|(p, _)| !schema.is_literal_param(p))
                    .map(|(_, t)| b.substitute_term(t).to_string())
                    .collect::<Vec<_>>(),
                None => s.args.iter().map(|t: &Term| b.substitute_term(t).to_string()).collect(),
            };
            key_of(s.name(), args.into_iter())
        })
        .collect()
}

/// All linearizations of the plan's ordinary steps as oracle keys, capped at
/// `limit`.
pub fn plan_sequences(plan: &Plan, limit: usize) -> Vec<Vec<String>> {
    let ids: Vec<StepId> = plan.ordinary_steps().map(|s| s.id).collect();
    let mut out = Vec::new();
    plan.ordering().for_each_linearization(&ids, limit, &mut |order| out.push(plan_keys(plan, order)));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::{parse_domain, parse_problem};

    fn travel() -> (DomainTheory, Problem) {
        let d = parse_domain(
            "(domain t
               (action travel :parameters (?who ?from ?to) :actors (?who)
                 :constraints ((character ?who) (place ?from) (place ?to))
                 :precondition ((at ?who ?from) (neq ?from ?to))
                 :effect ((not (at ?who ?from)) (at ?who ?to))))",
        )
        .unwrap();
        let p = parse_problem("(problem p :init ((character al) (place a) (place b) (at al a)) :goal ((at al b)))")
            .unwrap();
        (d, p)
    }

    #[test]
    fn two_place_travel() {
        let (d, p) = travel();
        let got = oracle_solve(&d, &p, 3);
        let want: BTreeSet<Vec<String>> = [
            vec!["travel al a b"],
            vec!["travel al a b", "travel al b a", "travel al a b"],
        ]
        .into_iter()
        .map(|v| v.into_iter().map(String::from).collect())
        .collect();
        assert_eq!(got, want);
    }

    #[test]
    fn goal_already_true_gives_empty_sequence() {
        let (d, _) = travel();
        let p = parse_problem("(problem p :init ((character al) (place a) (at al a)) :goal ((at al a)))").unwrap();
        assert!(oracle_solve(&d, &p, 0).contains(&Vec::new()));
    }
}
