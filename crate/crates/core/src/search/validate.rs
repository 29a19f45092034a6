//! Independent plan checking: structural invariants, STRIPS execution of
//! linearizations, and the frame-of-commitment conditions.

use std::collections::HashSet;

use serde::Serialize;

use crate::ipocl;
use crate::model::{unify, Literal, Plan, Problem, StepId};
use crate::pocl::{detect_causal_threats, Algorithm};

/// Linearizations executed before switching from exhaustive checking to the
/// first-N sample.
pub const LINEARIZATION_LIMIT: usize = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ViolationKind {
    DanglingReference,
    CyclicOrdering,
    InconsistentBindings,
    Constraint,
    BadLink,
    OpenCondition,
    CausalThreat,
    Execution,
    GoalUnsatisfied,
    PendingFlaw,
    Frame,
    Orphan,
    IntentionalThreat,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub message: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    pub linearizations: usize,
    pub exhaustive: bool,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn has(&self, kind: ViolationKind) -> bool {
        self.violations.iter().any(|v| v.kind == kind)
    }

    fn add(&mut self, kind: ViolationKind, message: String) {
        self.violations.push(Violation { kind, message });
    }
}

/// Ground literals true in the initial state, with closed-world negation.
pub fn holds(state: &HashSet<Literal>, lit: &Literal) -> bool {
    if lit.positive {
        state.contains(lit)
    } else {
        !state.contains(&lit.negate())
    }
}

/// Applies STRIPS effects; non-ground effects are skipped.
pub fn apply_effects(state: &mut HashSet<Literal>, effects: &[Literal]) {
    for e in effects.iter().filter(|e| !e.positive && e.is_ground()) {
        state.remove(&e.negate());
    }
    for e in effects.iter().filter(|e| e.positive && e.is_ground()) {
        state.insert(e.clone());
    }
}

pub fn validate(plan: &Plan, problem: &Problem, mode: Algorithm) -> ValidationReport {
    let mut r = ValidationReport::default();
    let n = plan.steps().len();
    let known = |s: StepId| s.index() < n;
    for (i, s) in plan.steps().iter().enumerate() {
        if s.id.index() != i {
            r.add(ViolationKind::DanglingReference, format!("step at position {i} has id {}", s.id));
        }
    }
    for l in plan.links() {
        if !known(l.source) || !known(l.sink) {
            r.add(ViolationKind::DanglingReference, format!("link on {} names an unknown step", l.condition));
        }
    }
    for f in plan.frames() {
        let mut members = f.interval.clone();
        members.push(f.final_step);
        members.extend(f.motivating_step);
        if members.iter().any(|&s| !known(s)) {
            r.add(ViolationKind::DanglingReference, format!("frame {} names an unknown step", f.id));
        }
    }
    if !r.violations.is_empty() {
        return r;
    }
    let o = plan.ordering();
    if !o.is_acyclic() {
        let cycle = o.find_cycle().unwrap_or_default();
        let text: Vec<String> = cycle.iter().map(ToString::to_string).collect();
        r.add(ViolationKind::CyclicOrdering, format!("ordering cycle: {}", text.join(" < ")));
        return r;
    }
    for s in plan.ordinary_steps() {
        if !o.precedes(StepId::INIT, s.id) || !o.precedes(s.id, StepId::GOAL) {
            r.add(ViolationKind::CyclicOrdering, format!("step {} is not between init and goal", s.id));
        }
    }
    let b = plan.bindings();
    if !b.is_consistent() {
        r.add(ViolationKind::InconsistentBindings, "bindings are inconsistent".into());
        return r;
    }
    let init: HashSet<Literal> = problem.initial.iter().cloned().collect();
    for s in plan.ordinary_steps() {
        let Some(schema) = &s.schema else { continue };
        let value = |v: &crate::model::Variable| schema.param_index(v).map(|i| b.substitute_term(&s.args[i]));
        for c in &schema.constraints {
            let lit = c.map_vars(&mut |v| value(v));
            if !lit.is_ground() || !holds(&init, &lit) {
                r.add(ViolationKind::Constraint, format!("step {} {}: constraint {lit} fails", s.id, s));
            }
        }
        for (x, y) in &schema.inequalities {
            if value(x) == value(y) {
                r.add(ViolationKind::Constraint, format!("step {} {}: {x} and {y} must differ", s.id, s));
            }
        }
    }
    for l in plan.links() {
        let source = plan.step(l.source);
        let sink = plan.step(l.sink);
        let from_effect = source.effect.iter().any(|e| b.substitute(e) == b.substitute(&l.effect));
        let closed_world = l.source == StepId::INIT && !l.effect.positive && holds(&init, &b.substitute(&l.effect));
        if !from_effect && !closed_world {
            r.add(ViolationKind::BadLink, format!("{} is not an effect of step {}", l.effect, l.source));
        }
        if !sink.precondition.iter().any(|p| b.substitute(p) == b.substitute(&l.condition)) {
            r.add(ViolationKind::BadLink, format!("{} is not a precondition of step {}", l.condition, l.sink));
        }
        if unify(&l.effect, &l.condition, b).is_none() {
            r.add(ViolationKind::BadLink, format!("{} does not unify with {}", l.effect, l.condition));
        }
        if !o.precedes(l.source, l.sink) {
            r.add(ViolationKind::BadLink, format!("link on {}: {} is not before {}", l.condition, l.source, l.sink));
        }
    }
    for s in plan.steps() {
        for p in s.precondition.iter() {
            let supported = plan.links().iter().any(|l| l.sink == s.id && b.substitute(&l.condition) == b.substitute(p));
            if !supported {
                r.add(ViolationKind::OpenCondition, format!("{} of step {} has no causal link", b.substitute(p), s.id));
            }
        }
    }
    for t in detect_causal_threats(plan) {
        r.add(ViolationKind::CausalThreat, plan.describe_flaw(&t));
    }
    for f in plan.flaws() {
        r.add(ViolationKind::PendingFlaw, plan.describe_flaw(&f.flaw));
    }
    execute_linearizations(plan, problem, &mut r);
    if mode == Algorithm::Ipocl {
        check_frames(plan, &mut r);
    }
    r
}

fn execute_linearizations(plan: &Plan, problem: &Problem, r: &mut ValidationReport) {
    let b = plan.bindings();
    let ids: Vec<StepId> = plan.ordinary_steps().map(|s| s.id).collect();
    let steps: Vec<(Vec<Literal>, Vec<Literal>)> = plan
        .steps()
        .iter()
        .map(|s| {
            (
                s.precondition.iter().map(|l| b.substitute(l)).collect(),
                s.effect.iter().map(|l| b.substitute(l)).collect(),
            )
        })
        .collect();
    let init: HashSet<Literal> = problem.initial.iter().cloned().collect();
    let mut exec_failure: Option<String> = None;
    let mut goal_failure: Option<String> = None;
    let (count, exhaustive) = plan.ordering().for_each_linearization(&ids, LINEARIZATION_LIMIT, &mut |order| {
        let mut state = init.clone();
        for &id in order {
            let (pre, eff) = &steps[id.index()];
            if let Some(p) = pre.iter().find(|p| !holds(&state, p)) {
                if exec_failure.is_none() {
                    exec_failure = Some(format!("in order {}: {} fails before step {}", render(order), p, id));
                }
                return;
            }
            apply_effects(&mut state, eff);
        }
        if let Some(g) = problem.goal.iter().find(|g| !holds(&state, g)) {
            if goal_failure.is_none() {
                goal_failure = Some(format!("in order {}: goal {} does not hold", render(order), g));
            }
        }
    });
    r.linearizations = count;
    r.exhaustive = exhaustive;
    if let Some(m) = exec_failure {
        r.add(ViolationKind::Execution, m);
    }
    if let Some(m) = goal_failure {
        r.add(ViolationKind::GoalUnsatisfied, m);
    }
}

fn render(order: &[StepId]) -> String {
    order.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
}

fn check_frames(plan: &Plan, r: &mut ValidationReport) {
    let b = plan.bindings();
    let o = plan.ordering();
    for f in plan.frames() {
        let mut bad = |m: String| r.add(ViolationKind::Frame, format!("frame {} ({} intends {}): {m}", f.id, f.character, f.goal));
        if !f.contains(f.final_step) {
            bad("final step is not in the interval".into());
        }
        let fin = plan.step(f.final_step);
        if !fin.effect.iter().any(|e| unify(e, &f.goal, b).is_some()) {
            bad(format!("goal is not an effect of final step {}", f.final_step));
        }
        for &s in &f.interval {
            if s != f.final_step && !o.precedes(s, f.final_step) {
                bad(format!("step {s} is not before final step {}", f.final_step));
            }
            if !plan.step(s).has_actor(&f.character) {
                bad(format!("{} is not an actor of step {s}", f.character));
            }
        }
        match f.motivating_step {
            None => bad("no motivating step".into()),
            Some(m) => {
                let wanted = Literal::intends(f.character.clone(), b.substitute(&f.goal));
                if !plan.step(m).effect.iter().any(|e| unify(e, &wanted, b).is_some()) {
                    bad(format!("motivating step {m} does not assert {wanted}"));
                }
                for &s in &f.interval {
                    if !o.precedes(m, s) {
                        bad(format!("motivating step {m} is not before step {s}"));
                    }
                }
            }
        }
    }
    for s in ipocl::orphans(plan) {
        r.add(ViolationKind::Orphan, format!("step {} {} belongs to no frame", s.id, s));
    }
    for t in ipocl::detect_intentional_threats(plan) {
        let crate::model::Flaw::IntentionalThreat { first, second } = t else { continue };
        let (a, c) = (plan.frame(first), plan.frame(second));
        let before = |x: &crate::model::Frame, y: &crate::model::Frame| {
            x.interval.iter().all(|&i| y.interval.iter().all(|&j| o.precedes(i, j)))
        };
        if !before(a, c) && !before(c, a) {
            r.add(ViolationKind::IntentionalThreat, format!("frames {first} and {second} negate each other and are unordered"));
        }
    }
}
