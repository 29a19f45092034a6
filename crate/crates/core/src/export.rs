//! Plan interchange: JSON documents and Graphviz DOT.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{
    Bindings, CausalLink, DomainTheory, Frame, FrameId, Literal, Ordering, PendingFlaw, Plan, Problem, Step, StepId,
    Term, Variable,
};

pub const PLAN_FORMAT: &str = "fabula-plan/1";

#[derive(Debug, Error)]
pub enum ExportError {
    #[error("invalid plan JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported plan format {0:?}")]
    Format(String),
    #[error("step {step}: unknown action {action}")]
    UnknownAction { step: u32, action: String },
    #[error("step {step}: {action} takes {expected} arguments, got {got}")]
    Arity { step: u32, action: String, expected: usize, got: usize },
    #[error("steps must be numbered 2, 3, ... in order; found {0}")]
    StepIds(u32),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepJson {
    /// Internal id: 0 is the initial step, 1 the goal step.
    pub id: u32,
    /// Display number as used in traces.
    #[serde(default)]
    pub number: String,
    pub action: String,
    pub args: Vec<Term>,
    #[serde(default)]
    pub text: String,
    #[serde(default)]
    pub happening: bool,
    #[serde(default)]
    pub actors: Vec<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct BindingsJson {
    pub codesignations: Vec<(Variable, Term)>,
    pub non_codesignations: Vec<(Variable, Term)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlanJson {
    pub format: String,
    pub domain: String,
    pub problem: String,
    pub steps: Vec<StepJson>,
    #[serde(default)]
    pub bindings: BindingsJson,
    /// Transitively closed.
    pub orderings: Vec<(StepId, StepId)>,
    pub links: Vec<CausalLink>,
    #[serde(default)]
    pub frames: Vec<Frame>,
    #[serde(default)]
    pub frame_orders: Vec<(FrameId, FrameId)>,
    #[serde(default)]
    pub flaws: Vec<PendingFlaw>,
    #[serde(default)]
    pub proposed_intent_flaws: Vec<(StepId, FrameId)>,
}

pub fn plan_to_json(plan: &Plan, domain: &DomainTheory, problem: &Problem) -> PlanJson {
    let b = plan.bindings();
    PlanJson {
        format: PLAN_FORMAT.into(),
        domain: domain.name.to_string(),
        problem: problem.name.to_string(),
        steps: plan
            .ordinary_steps()
            .map(|s| StepJson {
                id: s.id.0,
                number: s.id.to_string(),
                action: s.name().to_string(),
                args: s.args.to_vec(),
                text: s.rebound(b).to_string(),
                happening: s.happening,
                actors: s.actors.iter().map(ToString::to_string).collect(),
            })
            .collect(),
        bindings: BindingsJson {
            codesignations: b.codesignations().map(|(v, t)| (v.clone(), t.clone())).collect(),
            non_codesignations: b.non_codesignations().to_vec(),
        },
        orderings: plan.ordering().closed_pairs(),
        links: plan.links().to_vec(),
        frames: plan.frames().to_vec(),
        frame_orders: plan.frame_orders().to_vec(),
        flaws: plan.flaws().to_vec(),
        proposed_intent_flaws: plan.proposed_intent_flaws().to_vec(),
    }
}

/// Serialized with a trailing newline; field order is fixed so output is
/// byte-stable.
pub fn plan_to_json_string(plan: &Plan, domain: &DomainTheory, problem: &Problem) -> String {
    let mut s = serde_json::to_string_pretty(&plan_to_json(plan, domain, problem)).expect("plan JSON serializes");
    s.push('\n');
    s
}

/// Rebuilds a plan from JSON. Structural checks beyond what is needed to
/// construct the plan are left to the validator.
pub fn plan_from_json(doc: &PlanJson, domain: &DomainTheory, problem: &Problem) -> Result<Plan, ExportError> {
    if doc.format != PLAN_FORMAT {
        return Err(ExportError::Format(doc.format.clone()));
    }
    let mut plan = Plan::skeleton(problem.initial.clone(), problem.goal.clone());
    let mut steps: Vec<Step> = plan.steps().to_vec();
    for (i, s) in doc.steps.iter().enumerate() {
        if s.id as usize != i + 2 {
            return Err(ExportError::StepIds(s.id));
        }
        let schema = domain
            .schema(&s.action)
            .ok_or_else(|| ExportError::UnknownAction { step: s.id, action: s.action.clone() })?;
        if schema.params.len() != s.args.len() {
            return Err(ExportError::Arity {
                step: s.id,
                action: s.action.clone(),
                expected: schema.params.len(),
                got: s.args.len(),
            });
        }
        steps.push(Step::instantiate(StepId(s.id), Arc::new(schema.clone()), s.args.clone()));
    }
    let mut bindings = Bindings::new();
    for (v, t) in &doc.bindings.codesignations {
        bindings.insert(v.clone(), t.clone());
    }
    for (v, t) in &doc.bindings.non_codesignations {
        bindings.forbid(v.clone(), t.clone());
    }
    let n = steps.len();
    plan.steps = Arc::new(steps);
    plan.bindings = Arc::new(bindings);
    plan.ordering = Arc::new(Ordering::from_pairs(n, &doc.orderings));
    plan.links = Arc::new(doc.links.clone());
    plan.frames = Arc::new(doc.frames.clone());
    plan.frame_orders = Arc::new(doc.frame_orders.clone());
    plan.next_seq = doc.flaws.iter().map(|f| f.seq + 1).max().unwrap_or(0);
    plan.flaws = Arc::new(doc.flaws.clone());
    plan.proposed = Arc::new(doc.proposed_intent_flaws.clone());
    Ok(plan)
}

pub fn plan_from_json_str(text: &str, domain: &DomainTheory, problem: &Problem) -> Result<Plan, ExportError> {
    let doc: PlanJson = serde_json::from_str(text)?;
    plan_from_json(&doc, domain, problem)
}

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

fn node(id: StepId) -> String {
    format!("s{}", id.0)
}

/// Graphviz rendering: boxes for steps, labelled solid arrows for causal
/// links, dashed arrows for the remaining edges of the ordering's transitive
/// reduction, ellipses for frames
/// with dotted edges to their members.
pub fn plan_to_dot(plan: &Plan) -> String {
    let b = plan.bindings();
    let mut out = String::from("digraph plan {\n  rankdir=TB;\n  node [shape=box, fontname=\"Helvetica\"];\n");
    for s in plan.steps() {
        let label = match s.id {
            StepId::INIT => "initial state".to_string(),
            StepId::GOAL => "goal".to_string(),
            id => format!("{id}: {}", s.rebound(b)),
        };
        let _ = writeln!(out, "  {} [label={}];", node(s.id), quote(&label));
    }
    let mut linked = BTreeSet::new();
    for l in plan.links() {
        linked.insert((l.source, l.sink));
        let cond: Literal = b.substitute(&l.condition);
        let _ = writeln!(out, "  {} -> {} [label={}];", node(l.source), node(l.sink), quote(&cond.to_string()));
    }
    let mut dashed = BTreeSet::new();
    for (a, c) in plan.ordering().reduced_pairs() {
        if a == StepId::INIT || c == StepId::GOAL || linked.contains(&(a, c)) {
            continue;
        }
        dashed.insert((a, c));
    }
    for (a, c) in dashed {
        let _ = writeln!(out, "  {} -> {} [style=dashed];", node(a), node(c));
    }
    for f in plan.frames() {
        let label = format!("{} intends {}", f.character, b.substitute(&f.goal));
        let _ = writeln!(out, "  f{} [shape=ellipse, label={}];", f.id.0, quote(&label));
        let mut members = f.interval.clone();
        members.sort();
        for s in members {
            let _ = writeln!(out, "  f{} -> {} [style=dotted, arrowhead=none];", f.id.0, node(s));
        }
    }
    out.push_str("}\n");
    out
}
