//! Flaw repair for partial-order causal-link planning.
//!
//! [`Planner`] owns the grounded domain and produces child plans for any flaw.
//! Under [`Algorithm::Ipocl`] it also performs frame discovery, motivation
//! planning and intent planning (see [`crate::ipocl`]).

use std::collections::HashSet;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::ipocl;
use crate::model::{
    may_unify, unify, ActionSchema, Bindings, CausalLink, DomainTheory, Flaw, FlawKind, Literal, PendingFlaw, Plan,
    Problem, Reason, Step, StepId, Symbol, Term, Variable,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Pocl,
    Ipocl,
}

impl std::str::FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "pocl" => Ok(Algorithm::Pocl),
            "ipocl" => Ok(Algorithm::Ipocl),
            other => Err(format!("unknown algorithm {other}")),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FlawStrategy {
    /// Causal threats (newest first), intentional threats, open motivations (newest frame
    /// first), open conditions (newest first), intent flaws (oldest first).
    #[default]
    Default,
    /// As `Default` but open conditions oldest first.
    OpenConditionsFifo,
}

impl std::str::FromStr for FlawStrategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "default" => Ok(FlawStrategy::Default),
            "oc-fifo" => Ok(FlawStrategy::OpenConditionsFifo),
            other => Err(format!("unknown flaw strategy {other}")),
        }
    }
}

/// Effect index standing for the initial step's implicit negation of every
/// literal it does not assert.
pub const CLOSED_WORLD: u32 = u32::MAX;

/// How an open condition or open motivation gets its causal support.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Establisher {
    Reuse { step: StepId, effect: u32 },
    New { schema: u16, grounding: u32, effect: u16 },
}

/// A single refinement choice for the selected flaw. Applying the same
/// refinement to the same plan always yields the same child.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Refinement {
    /// `frames` encodes, in base (effects + 1), one digit per actor of a new
    /// step: 0 for no frame, k for a frame whose goal is effect k - 1.
    Establish { by: Establisher, frames: u32 },
    Promote,
    Demote,
    Separate { index: u16 },
    Adopt,
    Reject,
    OrderFrames { forward: bool },
}

pub struct Planner {
    algorithm: Algorithm,
    strategy: FlawStrategy,
    domain: DomainTheory,
    problem: Problem,
    schemata: Vec<Arc<ActionSchema>>,
    init: HashSet<Literal>,
    groundings: Vec<Vec<Vec<Term>>>,
}

impl Planner {
    pub fn new(domain: &DomainTheory, problem: &Problem, algorithm: Algorithm) -> Self {
        let init: HashSet<Literal> = problem.initial.iter().cloned().collect();
        let universe = problem.symbols();
        let schemata: Vec<Arc<ActionSchema>> = domain.schemata.iter().cloned().map(Arc::new).collect();
        let groundings = schemata.iter().map(|s| ground_schema(s, &universe, &init)).collect();
        Planner {
            algorithm,
            strategy: FlawStrategy::Default,
            domain: domain.clone(),
            problem: problem.clone(),
            schemata,
            init,
            groundings,
        }
    }

    pub fn with_strategy(mut self, strategy: FlawStrategy) -> Self {
        self.strategy = strategy;
        self
    }

    pub fn algorithm(&self) -> Algorithm {
        self.algorithm
    }

    pub fn domain(&self) -> &DomainTheory {
        &self.domain
    }

    pub fn problem(&self) -> &Problem {
        &self.problem
    }

    /// Legal entity-parameter assignments of schema `i`, in enumeration order.
    pub fn groundings(&self, schema: usize) -> &[Vec<Term>] {
        &self.groundings[schema]
    }

    /// Init and goal steps plus one open condition per goal literal. The first
    /// goal literal is the first one worked on.
    pub fn initial_plan(&self) -> Plan {
        let mut plan = Plan::skeleton(self.problem.initial.clone(), self.problem.goal.clone());
        for g in self.problem.goal.iter().rev() {
            plan.push_flaw(Flaw::OpenCondition { step: StepId::GOAL, condition: g.clone() });
        }
        plan
    }

    pub fn select_flaw(&self, plan: &Plan) -> Option<PendingFlaw> {
        select_flaw(plan, self.strategy)
    }

    pub fn is_complete(&self, plan: &Plan) -> bool {
        match self.algorithm {
            Algorithm::Pocl => pocl_complete(plan),
            Algorithm::Ipocl => ipocl::ipocl_complete(plan),
        }
    }

    /// Every refinement that may repair `flaw`. Some may still fail when
    /// applied; see [`Planner::children`].
    pub fn options(&self, plan: &Plan, flaw: &PendingFlaw) -> Vec<Refinement> {
        match &flaw.flaw {
            Flaw::OpenCondition { step, condition } => {
                self.establishers(plan, condition, |s| plan.ordering().possibly_precedes(s, *step) && s != *step)
            }
            Flaw::OpenMotivation { frame, condition } => {
                let f = plan.frame(*frame);
                self.establishers(plan, condition, |s| {
                    !f.contains(s) && f.interval.iter().all(|&i| plan.ordering().possibly_precedes(s, i))
                })
            }
            Flaw::CausalThreat { threat, link } => {
                let mut out = vec![Refinement::Promote, Refinement::Demote];
                let n = separations(plan, *threat, &plan.links()[*link]).len();
                out.extend((0..n).map(|i| Refinement::Separate { index: i as u16 }));
                out
            }
            Flaw::IntentFlaw { .. } => vec![Refinement::Adopt, Refinement::Reject],
            Flaw::IntentionalThreat { .. } => {
                vec![Refinement::OrderFrames { forward: true }, Refinement::OrderFrames { forward: false }]
            }
        }
    }

    fn establishers(&self, plan: &Plan, condition: &Literal, may_use: impl Fn(StepId) -> bool) -> Vec<Refinement> {
        let b = plan.bindings();
        let p = b.substitute(condition);
        let mut out = Vec::new();
        for s in plan.steps() {
            if s.id == StepId::GOAL || (s.id != StepId::INIT && !may_use(s.id)) {
                continue;
            }
            for (i, e) in s.effect.iter().enumerate() {
                if may_unify(e, &p) && unify(e, &p, b).is_some() {
                    out.push(Refinement::Establish { by: Establisher::Reuse { step: s.id, effect: i as u32 }, frames: 0 });
                }
            }
            if s.id == StepId::INIT && self.closed_world_holds(&p) {
                out.push(Refinement::Establish {
                    by: Establisher::Reuse { step: StepId::INIT, effect: CLOSED_WORLD },
                    frames: 0,
                });
            }
        }
        for (si, schema) in self.schemata.iter().enumerate() {
            for (ei, eff) in schema.effect.iter().enumerate() {
                if !may_unify(eff, &p) {
                    continue;
                }
                let Some(local) = unify(eff, &p, &Bindings::new()) else { continue };
                let combos = self.frame_combinations(schema);
                for (gi, g) in self.groundings[si].iter().enumerate() {
                    if !grounding_agrees(schema, g, &local) {
                        continue;
                    }
                    for frames in 0..combos {
                        out.push(Refinement::Establish {
                            by: Establisher::New { schema: si as u16, grounding: gi as u32, effect: ei as u16 },
                            frames,
                        });
                    }
                }
            }
        }
        out
    }

    /// (e+1)^a under IPOCL for non-happenings, otherwise 1.
    pub fn frame_combinations(&self, schema: &ActionSchema) -> u32 {
        if self.algorithm == Algorithm::Pocl || schema.happening {
            1
        } else {
            ((schema.effect.len() + 1) as u32).pow(schema.actors.len() as u32)
        }
    }

    fn closed_world_holds(&self, p: &Literal) -> bool {
        !p.positive && p.is_ground() && !p.is_intends() && !self.init.contains(&p.negate())
    }

    /// Applies one refinement, or returns `None` if the child is inconsistent.
    pub fn apply(&self, plan: &Plan, flaw: &PendingFlaw, r: &Refinement) -> Option<Plan> {
        let mut child = plan.clone();
        child.parent = None;
        child.remove_flaw(flaw.seq)?;
        match (&flaw.flaw, *r) {
            (Flaw::OpenCondition { .. } | Flaw::OpenMotivation { .. }, Refinement::Establish { by, frames }) => {
                self.establish(&mut child, &flaw.flaw, by, frames)?;
            }
            (Flaw::CausalThreat { threat, link }, r) => {
                let l = child.links()[*link].clone();
                match r {
                    Refinement::Promote => {
                        if !child.order(l.sink, *threat) {
                            return None;
                        }
                        child.reason = Reason::Promotion { threat: *threat, link: *link };
                    }
                    Refinement::Demote => {
                        if !child.order(*threat, l.source) {
                            return None;
                        }
                        child.reason = Reason::Demotion { threat: *threat, link: *link };
                    }
                    Refinement::Separate { index } => {
                        let (var, value) = separations(plan, *threat, &l).into_iter().nth(index as usize)?;
                        let mut b = child.bindings().clone();
                        b.forbid(var, value);
                        if !b.is_consistent() {
                            return None;
                        }
                        child.set_bindings(b);
                        if threatens(&child, *threat, &l) {
                            child.push_flaw(Flaw::CausalThreat { threat: *threat, link: *link });
                        }
                        child.reason = Reason::Separation { threat: *threat, link: *link };
                    }
                    _ => return None,
                }
            }
            (Flaw::IntentFlaw { step, frame }, Refinement::Adopt) => {
                ipocl::adopt(&mut child, *step, *frame)?;
                child.reason = Reason::Adoption { step: *step, frame: *frame };
            }
            (Flaw::IntentFlaw { step, frame }, Refinement::Reject) => {
                child.reason = Reason::NoAdoption { step: *step, frame: *frame };
            }
            (Flaw::IntentionalThreat { first, second }, Refinement::OrderFrames { forward }) => {
                let (a, b) = if forward { (*first, *second) } else { (*second, *first) };
                ipocl::order_frames(&mut child, a, b)?;
                child.reason = Reason::FrameOrder { first: a, second: b };
            }
            _ => return None,
        }
        if self.algorithm == Algorithm::Ipocl {
            ipocl::propose_adoptions(&mut child);
        }
        debug_assert!(child.is_consistent());
        Some(child)
    }

    fn establish(&self, child: &mut Plan, flaw: &Flaw, by: Establisher, frames: u32) -> Option<()> {
        let condition = match flaw {
            Flaw::OpenCondition { condition, .. } | Flaw::OpenMotivation { condition, .. } => condition.clone(),
            _ => return None,
        };
        let p = child.bindings().substitute(&condition);
        let mut new_step = None;
        let (source, effect) = match by {
            Establisher::Reuse { step, effect } if effect == CLOSED_WORLD => {
                if step != StepId::INIT || !self.closed_world_holds(&p) {
                    return None;
                }
                (step, p.clone())
            }
            Establisher::Reuse { step, effect } => (step, child.try_step(step)?.effect.get(effect as usize)?.clone()),
            Establisher::New { schema, grounding, effect } => {
                let schema_arc = self.schemata.get(schema as usize)?.clone();
                let eff = schema_arc.effect.get(effect as usize)?;
                let local = unify(eff, &p, &Bindings::new())?;
                let g = self.groundings[schema as usize].get(grounding as usize)?;
                if !grounding_agrees(&schema_arc, g, &local) {
                    return None;
                }
                let args: Vec<Term> = g
                    .iter()
                    .map(|t| match t {
                        Term::Var(v) => match local.value_of(v) {
                            Some(value) => value,
                            None => t.clone(),
                        },
                        other => other.clone(),
                    })
                    .collect();
                let id = child.next_step_id();
                let step = Step::instantiate(id, schema_arc, args);
                let eff = step.effect[effect as usize].clone();
                let preconditions = step.precondition.clone();
                child.add_step(step);
                for pre in preconditions.iter() {
                    child.push_flaw(Flaw::OpenCondition { step: id, condition: pre.clone() });
                }
                new_step = Some(id);
                (id, eff)
            }
        };
        let b = unify(&effect, &p, child.bindings())?;
        if b != *child.bindings() {
            child.set_bindings(b);
        }
        let mut new_links = Vec::new();
        match flaw {
            Flaw::OpenCondition { step: need, .. } => {
                if !child.order(source, *need) {
                    return None;
                }
                new_links.push(child.add_link(CausalLink { source, effect, condition: condition.clone(), sink: *need }));
            }
            Flaw::OpenMotivation { frame, .. } => {
                let interval = child.frame(*frame).interval.clone();
                for s in interval {
                    if !child.order(source, s) {
                        return None;
                    }
                }
                child.frame_mut(*frame).motivating_step = Some(source);
            }
            _ => unreachable!(),
        }
        if let Some(id) = new_step {
            if self.algorithm == Algorithm::Ipocl {
                ipocl::create_frames(child, id, frames)?;
            } else if frames != 0 {
                return None;
            }
        }
        add_threats(child, &new_links, new_step);
        child.reason = match new_step {
            Some(step) => Reason::NewStep { step, condition },
            None => Reason::ReuseStep { step: source, condition },
        };
        Some(())
    }

    /// Consistent children of `plan` for `flaw`, paired with the refinement
    /// that produced each.
    pub fn children(&self, plan: &Plan, flaw: &PendingFlaw) -> Vec<(Refinement, Plan)> {
        self.options(plan, flaw)
            .into_iter()
            .filter_map(|r| self.apply(plan, flaw, &r).map(|c| (r, c)))
            .collect()
    }

    pub fn resolve_open_condition(&self, plan: &Plan, flaw: &PendingFlaw) -> Vec<Plan> {
        debug_assert_eq!(flaw.flaw.kind(), FlawKind::OpenCondition);
        self.children(plan, flaw).into_iter().map(|(_, p)| p).collect()
    }

    pub fn resolve_causal_threat(&self, plan: &Plan, flaw: &PendingFlaw) -> Vec<Plan> {
        debug_assert_eq!(flaw.flaw.kind(), FlawKind::CausalThreat);
        self.children(plan, flaw).into_iter().map(|(_, p)| p).collect()
    }
}

/// Enumerates entity-parameter assignments over `universe` that satisfy the
/// schema's constraints (against `init`) and inequalities. Literal-valued
/// parameters are left as their schema variable.
pub fn ground_schema(schema: &ActionSchema, universe: &[Symbol], init: &HashSet<Literal>) -> Vec<Vec<Term>> {
    let n = schema.params.len();
    let mut out = Vec::new();
    let mut current: Vec<Term> = schema.params.iter().map(|p| Term::Var(p.clone())).collect();
    // Constraints and inequalities become checkable once their last entity
    // parameter is assigned.
    let last_index = |vars: &[Variable]| -> Option<usize> {
        let mut m = 0;
        for v in vars {
            let i = schema.param_index(v)?;
            if schema.is_literal_param(v) {
                return None;
            }
            m = m.max(i);
        }
        Some(m)
    };
    let mut checks: Vec<Vec<usize>> = vec![Vec::new(); n.max(1)];
    for (ci, c) in schema.constraints.iter().enumerate() {
        if let Some(i) = last_index(&c.vars()) {
            checks[i].push(ci);
        }
    }
    let mut neq: Vec<Vec<usize>> = vec![Vec::new(); n.max(1)];
    for (qi, (a, b)) in schema.inequalities.iter().enumerate() {
        if let Some(i) = last_index(&[a.clone(), b.clone()]) {
            neq[i].push(qi);
        }
    }
    let ground_constraints: Vec<usize> =
        schema.constraints.iter().enumerate().filter(|(_, c)| c.vars().is_empty()).map(|(i, _)| i).collect();
    let holds = |lit: &Literal| init.contains(&Literal { positive: true, ..lit.clone() }) == lit.positive;
    if !ground_constraints.iter().all(|&i| holds(&schema.constraints[i])) {
        return out;
    }
    fn rec(
        i: usize,
        schema: &ActionSchema,
        universe: &[Symbol],
        current: &mut Vec<Term>,
        checks: &[Vec<usize>],
        neq: &[Vec<usize>],
        holds: &dyn Fn(&Literal) -> bool,
        out: &mut Vec<Vec<Term>>,
    ) {
        if i == schema.params.len() {
            out.push(current.clone());
            return;
        }
        let param = &schema.params[i];
        if schema.is_literal_param(param) {
            rec(i + 1, schema, universe, current, checks, neq, holds, out);
            return;
        }
        for sym in universe {
            current[i] = Term::Sym(sym.clone());
            let value = |v: &Variable| schema.param_index(v).map(|j| current[j].clone());
            let ok = checks[i].iter().all(|&ci| {
                let lit = schema.constraints[ci].map_vars(&mut |v| value(v));
                holds(&lit)
            }) && neq[i].iter().all(|&qi| {
                let (a, b) = &schema.inequalities[qi];
                value(a) != value(b)
            });
            if ok {
                rec(i + 1, schema, universe, current, checks, neq, holds, out);
            }
        }
        current[i] = Term::Var(param.clone());
    }
    rec(0, schema, universe, &mut current, &checks, &neq, &holds, &mut out);
    out
}

fn grounding_agrees(schema: &ActionSchema, g: &[Term], local: &Bindings) -> bool {
    schema.params.iter().zip(g).all(|(param, t)| {
        if schema.is_literal_param(param) {
            return true;
        }
        match local.value_of(param) {
            None => true,
            Some(Term::Sym(s)) => t.as_symbol() == Some(&s),
            Some(_) => false,
        }
    })
}

/// Deterministic default flaw selection; see [`FlawStrategy`].
pub fn select_flaw(plan: &Plan, strategy: FlawStrategy) -> Option<PendingFlaw> {
    let flaws = plan.flaws();
    let oldest = |kind: FlawKind| flaws.iter().filter(|f| f.flaw.kind() == kind).min_by_key(|f| f.seq);
    let newest_threat = flaws.iter().filter(|f| f.flaw.kind() == FlawKind::CausalThreat).max_by_key(|f| f.seq);
    if let Some(f) = newest_threat.or_else(|| oldest(FlawKind::IntentionalThreat)) {
        return Some(f.clone());
    }
    let om = flaws
        .iter()
        .filter_map(|f| match f.flaw {
            Flaw::OpenMotivation { frame, .. } => Some((frame, f.seq, f)),
            _ => None,
        })
        .max_by_key(|(frame, seq, _)| (*frame, *seq));
    if let Some((_, _, f)) = om {
        return Some(f.clone());
    }
    let ocs = flaws.iter().filter(|f| f.flaw.kind() == FlawKind::OpenCondition);
    let oc = match strategy {
        FlawStrategy::Default => ocs.max_by_key(|f| f.seq),
        FlawStrategy::OpenConditionsFifo => ocs.min_by_key(|f| f.seq),
    };
    oc.or_else(|| oldest(FlawKind::IntentFlaw)).cloned()
}

/// Whether `t` can fall between the link's endpoints and has an effect that
/// may unify with the negated condition. A source that deletes and adds the
/// same atom threatens its own negative links, since adds win.
pub fn threatens(plan: &Plan, t: StepId, link: &CausalLink) -> bool {
    if t == link.source && t.is_ordinary() && !link.condition.positive {
        let neg = plan.bindings().substitute(&link.condition).negate();
        return plan.step(t).effect.iter().any(|e| e.positive && unify(e, &neg, plan.bindings()).is_some());
    }
    if t == link.source || t == link.sink || !t.is_ordinary() {
        return false;
    }
    let o = plan.ordering();
    if o.precedes(t, link.source) || o.precedes(link.sink, t) {
        return false;
    }
    let neg = plan.bindings().substitute(&link.condition).negate();
    plan.step(t).effect.iter().any(|e| may_unify(e, &neg) && unify(e, &neg, plan.bindings()).is_some())
}

/// Every (step, link) threat in `plan`.
pub fn detect_causal_threats(plan: &Plan) -> Vec<Flaw> {
    let mut out = Vec::new();
    for (li, l) in plan.links().iter().enumerate() {
        for s in plan.ordinary_steps() {
            if threatens(plan, s.id, l) {
                out.push(Flaw::CausalThreat { threat: s.id, link: li });
            }
        }
    }
    out
}

fn add_threats(plan: &mut Plan, new_links: &[usize], new_step: Option<StepId>) {
    let mut found = Vec::new();
    for (li, l) in plan.links().iter().enumerate() {
        let link_is_new = new_links.contains(&li);
        for s in plan.ordinary_steps() {
            if (link_is_new || Some(s.id) == new_step) && threatens(plan, s.id, l) {
                found.push(Flaw::CausalThreat { threat: s.id, link: li });
            }
        }
    }
    for f in found {
        if !plan.flaws().iter().any(|p| p.flaw == f) {
            plan.push_flaw(f);
        }
    }
}

/// Non-codesignations that would each stop some effect of `t` from unifying
/// with the negated link condition.
pub fn separations(plan: &Plan, t: StepId, link: &CausalLink) -> Vec<(Variable, Term)> {
    let b = plan.bindings();
    let neg = b.substitute(&link.condition).negate();
    let mut out = Vec::new();
    for e in plan.step(t).effect.iter() {
        if !may_unify(e, &neg) {
            continue;
        }
        let Some(ext) = unify(e, &neg, b) else { continue };
        let mut vars = b.substitute(e).vars();
        for v in neg.vars() {
            if !vars.contains(&v) {
                vars.push(v);
            }
        }
        for v in vars {
            if let Some(value) = ext.value_of(&v) {
                let pair = (v, value);
                if !out.contains(&pair) {
                    out.push(pair);
                }
            }
        }
    }
    out
}

pub fn pocl_complete(plan: &Plan) -> bool {
    plan.flaws().is_empty() && plan.is_consistent()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::{parse_domain, parse_literal, parse_problem};

    fn travel_domain() -> (DomainTheory, Problem) {
        let d = parse_domain(
            "(domain t
               (action travel :parameters (?who ?from ?to) :actors (?who)
                 :constraints ((character ?who) (place ?from) (place ?to))
                 :precondition ((at ?who ?from) (neq ?from ?to))
                 :effect ((not (at ?who ?from)) (at ?who ?to))))",
        )
        .unwrap();
        let p = parse_problem(
            "(problem p :init ((character al) (place a) (place b) (place c) (at al a)) :goal ((at al b)))",
        )
        .unwrap();
        (d, p)
    }

    #[test]
    fn grounding_respects_constraints_and_inequalities() {
        let (d, p) = travel_domain();
        let planner = Planner::new(&d, &p, Algorithm::Pocl);
        // 1 character x 3 x 2 ordered distinct place pairs
        assert_eq!(planner.groundings(0).len(), 6);
    }

    #[test]
    fn initial_plan_has_goal_flaws() {
        let (d, p) = travel_domain();
        let planner = Planner::new(&d, &p, Algorithm::Pocl);
        let plan = planner.initial_plan();
        assert_eq!(plan.steps().len(), 2);
        assert_eq!(plan.flaws().len(), 1);
        assert!(!pocl_complete(&plan));
    }

    #[test]
    fn new_step_children_bind_destination() {
        let (d, p) = travel_domain();
        let planner = Planner::new(&d, &p, Algorithm::Pocl);
        let plan = planner.initial_plan();
        let flaw = planner.select_flaw(&plan).unwrap();
        let kids = planner.resolve_open_condition(&plan, &flaw);
        let names: Vec<String> = kids.iter().map(|k| k.step(StepId(2)).to_string()).collect();
        assert_eq!(names, vec!["(travel al a b)", "(travel al c b)"]);
        assert!(kids.iter().all(|k| k.flaws().len() == 1 && k.links().len() == 1));
        assert_eq!(plan.flaws().len(), 1, "parent untouched");
    }

    #[test]
    fn closed_world_supports_negative_condition() {
        let (d, _) = travel_domain();
        let p = parse_problem("(problem p :init ((character al) (place a) (place b) (at al a)) :goal ((not (at al b))))")
            .unwrap();
        let planner = Planner::new(&d, &p, Algorithm::Pocl);
        let plan = planner.initial_plan();
        let flaw = planner.select_flaw(&plan).unwrap();
        let kids = planner.children(&plan, &flaw);
        assert!(kids.iter().any(|(r, k)| {
            matches!(r, Refinement::Establish { by: Establisher::Reuse { effect: CLOSED_WORLD, .. }, .. })
                && pocl_complete(k)
        }));
    }

    #[test]
    fn init_reuse_comes_first_and_completes() {
        let (d, p) = travel_domain();
        let planner = Planner::new(&d, &p, Algorithm::Pocl);
        let mut plan = planner.initial_plan();
        // expand: travel al a b, then support (at al a) from init
        let f = planner.select_flaw(&plan).unwrap();
        plan = planner.resolve_open_condition(&plan, &f).remove(0);
        let f = planner.select_flaw(&plan).unwrap();
        assert_eq!(f.flaw, Flaw::OpenCondition { step: StepId(2), condition: parse_literal("(at al a)").unwrap() });
        let kids = planner.resolve_open_condition(&plan, &f);
        let names: Vec<String> = kids.iter().skip(1).map(|k| k.step(StepId(3)).to_string()).collect();
        assert_eq!(names, vec!["(travel al b a)", "(travel al c a)"]);
        assert!(pocl_complete(&kids[0]));
        assert!(detect_causal_threats(&kids[0]).is_empty());
    }

    #[test]
    fn separation_never_applies_to_ground_steps() {
        let (d, p) = travel_domain();
        let planner = Planner::new(&d, &p, Algorithm::Pocl);
        let mut plan = Plan::skeleton(p.initial.clone(), p.goal.clone());
        let s = Step::instantiate(
            StepId(2),
            Arc::new(d.schemata[0].clone()),
            vec![Term::sym("al"), Term::sym("a"), Term::sym("b")],
        );
        plan.add_step(s);
        plan.add_link(CausalLink {
            source: StepId::INIT,
            effect: parse_literal("(at al a)").unwrap(),
            condition: parse_literal("(at al a)").unwrap(),
            sink: StepId::GOAL,
        });
        assert!(threatens(&plan, StepId(2), &plan.links()[0]));
        assert!(separations(&plan, StepId(2), &plan.links()[0]).is_empty());
        let _ = planner;
    }

    #[test]
    fn toggling_step_cannot_establish_its_own_delete() {
        let d = parse_domain(
            "(domain t (action flip :parameters (?a) :actors () :happening t
               :constraints ((character ?a)) :effect ((not (r ?a)) (r ?a))))",
        )
        .unwrap();
        let p = parse_problem("(problem p :init ((character c) (r c)) :goal ((not (r c))))").unwrap();
        let planner = Planner::new(&d, &p, Algorithm::Pocl);
        let plan = planner.initial_plan();
        let flaw = planner.select_flaw(&plan).unwrap();
        let (_, kid) = planner.children(&plan, &flaw).into_iter().next().unwrap();
        let threat = planner.select_flaw(&kid).unwrap();
        assert_eq!(threat.flaw.kind(), FlawKind::CausalThreat);
        assert!(planner.children(&kid, &threat).is_empty());
    }

}
