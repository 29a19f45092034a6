//! QUEST knowledge structures built from plans, why-question arc search and
//! goodness-of-answer prediction.
//!
//! Mapping: one event node per ordinary step, one goal node per frame.
//! Consequence arcs follow causal links, Initiate arcs run from a motivating
//! event to the goal it motivates, Outcome arcs from a goal to its frame's
//! final event, and Reason arcs from a subordinate goal to the goal it serves.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::Serialize;
use thiserror::Error;

use crate::ipocl::{frames_in_service_of, ipocl_complete};
use crate::model::{FrameId, Literal, Plan, StepId, Symbol, Term};
use crate::narrate::TemplateSet;
use crate::pocl::{pocl_complete, Algorithm};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QuestError {
    #[error("plan is not complete")]
    Incomplete,
    #[error("no node {0}")]
    UnknownNode(usize),
    #[error("no event node for step {0}")]
    UnknownStep(String),
    #[error("csv output failed: {0}")]
    Csv(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum QuestNode {
    Event {
        step: StepId,
        description: String,
        /// Goal nodes whose interval contains this event.
        goals: Vec<usize>,
        happening: bool,
    },
    Goal { frame: FrameId, character: Symbol, goal: Literal, description: String },
}

impl QuestNode {
    pub fn is_goal(&self) -> bool {
        matches!(self, QuestNode::Goal { .. })
    }

    pub fn description(&self) -> &str {
        match self {
            QuestNode::Event { description, .. } | QuestNode::Goal { description, .. } => description,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ArcKind {
    Consequence,
    Reason,
    Initiate,
    Outcome,
    Implies,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct QuestArc {
    pub kind: ArcKind,
    pub from: usize,
    pub to: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct QuestGraph {
    pub nodes: Vec<QuestNode>,
    pub arcs: Vec<QuestArc>,
}

impl QuestGraph {
    pub fn event_node(&self, step: StepId) -> Option<usize> {
        self.nodes.iter().position(|n| matches!(n, QuestNode::Event { step: s, .. } if *s == step))
    }

    pub fn goal_node(&self, frame: FrameId) -> Option<usize> {
        self.nodes.iter().position(|n| matches!(n, QuestNode::Goal { frame: f, .. } if *f == frame))
    }

    /// First event node whose description equals `text`, e.g.
    /// `(slay aladdin dragon mountain)`.
    pub fn find_event(&self, text: &str) -> Option<usize> {
        self.nodes.iter().position(|n| !n.is_goal() && n.description() == text)
    }

    pub fn find_goal(&self, character: &str, goal: &str) -> Option<usize> {
        self.nodes.iter().position(|n| {
            matches!(n, QuestNode::Goal { character: c, goal: g, .. } if c.as_str() == character && g.to_string() == goal)
        })
    }

    pub fn arcs_of(&self, kind: ArcKind) -> impl Iterator<Item = &QuestArc> {
        self.arcs.iter().filter(move |a| a.kind == kind)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("graph serializes");
        s.push('\n');
        s
    }
}

/// Builds the knowledge structure for a plan complete under `mode`.
pub fn plan_to_quest(plan: &Plan, mode: Algorithm) -> Result<QuestGraph, QuestError> {
    let complete = match mode {
        Algorithm::Pocl => pocl_complete(plan),
        Algorithm::Ipocl => ipocl_complete(plan),
    };
    if !complete {
        return Err(QuestError::Incomplete);
    }
    Ok(build(plan))
}

fn build(plan: &Plan) -> QuestGraph {
    let b = plan.bindings();
    let mut g = QuestGraph::default();
    let mut event_of = BTreeMap::new();
    for s in plan.ordinary_steps() {
        event_of.insert(s.id, g.nodes.len());
        g.nodes.push(QuestNode::Event {
            step: s.id,
            description: s.rebound(b).to_string(),
            goals: Vec::new(),
            happening: s.happening,
        });
    }
    let mut goal_of = BTreeMap::new();
    for f in plan.frames() {
        goal_of.insert(f.id, g.nodes.len());
        let goal = b.substitute(&f.goal);
        g.nodes.push(QuestNode::Goal {
            frame: f.id,
            character: f.character.clone(),
            description: Literal::intends(f.character.clone(), goal.clone()).to_string(),
            goal,
        });
    }
    let mut arcs = BTreeSet::new();
    for l in plan.links() {
        if let (Some(&a), Some(&c)) = (event_of.get(&l.source), event_of.get(&l.sink)) {
            arcs.insert(QuestArc { kind: ArcKind::Consequence, from: a, to: c });
        }
    }
    for f in plan.frames() {
        let goal = goal_of[&f.id];
        if let Some(&e) = event_of.get(&f.final_step) {
            arcs.insert(QuestArc { kind: ArcKind::Outcome, from: goal, to: e });
        }
        if let Some(&m) = f.motivating_step.as_ref().and_then(|m| event_of.get(m)) {
            arcs.insert(QuestArc { kind: ArcKind::Initiate, from: m, to: goal });
        }
        for &s in &f.interval {
            if let Some(&e) = event_of.get(&s) {
                if let QuestNode::Event { goals, .. } = &mut g.nodes[e] {
                    if !goals.contains(&goal) {
                        goals.push(goal);
                    }
                }
            }
            for sub in frames_in_service_of(plan, s) {
                if sub != f.id {
                    arcs.insert(QuestArc { kind: ArcKind::Reason, from: goal_of[&sub], to: goal });
                }
            }
        }
    }
    for n in &mut g.nodes {
        if let QuestNode::Event { goals, .. } = n {
            goals.sort_unstable();
        }
    }
    g.arcs = arcs.into_iter().collect();
    g
}

/// Legal answers to "why" about `queried`: starting from the node's goal
/// context, the closure over forward Reason, backward Initiate and backward
/// Outcome arcs. The queried node itself is excluded.
pub fn why_arc_search(graph: &QuestGraph, queried: usize) -> Result<BTreeSet<usize>, QuestError> {
    let node = graph.nodes.get(queried).ok_or(QuestError::UnknownNode(queried))?;
    let mut seen = BTreeSet::new();
    let mut queue = VecDeque::new();
    match node {
        QuestNode::Event { goals, .. } => queue.extend(goals.iter().copied()),
        QuestNode::Goal { .. } => queue.push_back(queried),
    }
    for a in &graph.arcs {
        if a.kind == ArcKind::Outcome && a.to == queried {
            queue.push_back(a.from);
        }
    }
    while let Some(n) = queue.pop_front() {
        if !seen.insert(n) {
            continue;
        }
        for a in &graph.arcs {
            let next = match a.kind {
                ArcKind::Reason if a.from == n => a.to,
                ArcKind::Initiate | ArcKind::Outcome if a.to == n => a.from,
                _ => continue,
            };
            if !seen.contains(&next) {
                queue.push_back(next);
            }
        }
    }
    seen.remove(&queried);
    Ok(seen)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Goa {
    Good,
    Poor,
}

pub fn predict_goa(graph: &QuestGraph, question: usize, answer: usize) -> Result<Goa, QuestError> {
    if answer >= graph.nodes.len() {
        return Err(QuestError::UnknownNode(answer));
    }
    Ok(if why_arc_search(graph, question)?.contains(&answer) { Goa::Good } else { Goa::Poor })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct QaPair {
    pub question_node: usize,
    pub answer_node: usize,
    pub question: String,
    pub answer: String,
    pub prediction: Goa,
}

fn node_literal(node: &QuestNode) -> Literal {
    match node {
        QuestNode::Event { description, .. } => {
            crate::dsl::parse_pattern(description).unwrap_or_else(|_| Literal::new(description, Vec::<Term>::new()))
        }
        QuestNode::Goal { character, goal, .. } => Literal::intends(character.clone(), goal.clone()),
    }
}

fn strip_period(s: String) -> String {
    s.trim_end_matches('.').to_string()
}

fn question_text(node: &QuestNode, t: Option<&TemplateSet>) -> String {
    let lit = node_literal(node);
    t.and_then(|t| t.phrase(&t.questions, &lit))
        .or_else(|| t.and_then(|t| t.phrase(&t.actions, &lit)).map(|s| format!("Why: {}?", strip_period(s))))
        .unwrap_or_else(|| format!("Why {}?", node.description()))
}

fn answer_text(node: &QuestNode, t: Option<&TemplateSet>) -> String {
    let lit = node_literal(node);
    let phrase = t.and_then(|t| {
        t.phrase(&t.answers, &lit).or_else(|| match node {
            QuestNode::Goal { .. } => t.phrase(&t.intentions, &lit),
            QuestNode::Event { .. } => t.phrase(&t.actions, &lit),
        })
    });
    match phrase {
        Some(p) => format!("Because {}.", lower_article(&strip_period(p))),
        None => format!("Because {}.", node.description()),
    }
}

/// Lowercases a leading article so the phrase reads mid-sentence; names stay
/// capitalized.
fn lower_article(p: &str) -> String {
    for a in ["The ", "A ", "An "] {
        if let Some(rest) = p.strip_prefix(a) {
            return format!("{}{rest}", a.to_lowercase());
        }
    }
    p.to_string()
}

/// Why-questions about every intentional event (a non-happening event in some
/// frame), each paired with every goal node and every event that initiates a
/// goal, other than the question itself.
pub fn emit_questionnaire(graph: &QuestGraph, templates: Option<&TemplateSet>) -> Vec<QaPair> {
    let questions: Vec<usize> = graph
        .nodes
        .iter()
        .enumerate()
        .filter(|(_, n)| matches!(n, QuestNode::Event { goals, happening: false, .. } if !goals.is_empty()))
        .map(|(i, _)| i)
        .collect();
    let initiators: BTreeSet<usize> = graph.arcs_of(ArcKind::Initiate).map(|a| a.from).collect();
    let answers: Vec<usize> = (0..graph.nodes.len())
        .filter(|&i| graph.nodes[i].is_goal() || initiators.contains(&i))
        .collect();
    let mut out = Vec::new();
    for &q in &questions {
        let legal = why_arc_search(graph, q).expect("question node exists");
        let question = question_text(&graph.nodes[q], templates);
        for &a in answers.iter().filter(|&&a| a != q) {
            out.push(QaPair {
                question_node: q,
                answer_node: a,
                question: question.clone(),
                answer: answer_text(&graph.nodes[a], templates),
                prediction: if legal.contains(&a) { Goa::Good } else { Goa::Poor },
            });
        }
    }
    out
}

pub fn questionnaire_text(pairs: &[QaPair]) -> String {
    let mut out = String::new();
    for (i, p) in pairs.iter().enumerate() {
        out.push_str(&format!("{}. Q: {}\n   A: {}\n   predicted: {}\n", i + 1, p.question, p.answer, goa_word(p.prediction)));
    }
    out
}

fn goa_word(g: Goa) -> &'static str {
    match g {
        Goa::Good => "good",
        Goa::Poor => "poor",
    }
}

pub fn questionnaire_csv(pairs: &[QaPair]) -> Result<String, QuestError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let err = |e: csv::Error| QuestError::Csv(e.to_string());
    w.write_record(["question_node", "answer_node", "question", "answer", "prediction"]).map_err(err)?;
    for p in pairs {
        w.write_record([
            p.question_node.to_string().as_str(),
            p.answer_node.to_string().as_str(),
            &p.question,
            &p.answer,
            goa_word(p.prediction),
        ])
        .map_err(err)?;
    }
    let bytes = w.into_inner().map_err(|e| QuestError::Csv(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv writer emits utf-8"))
}

/// Looks up the event node for a step given by display number ("3") or by
/// its ground text ("(slay aladdin dragon mountain)").
pub fn resolve_event(graph: &QuestGraph, key: &str) -> Result<usize, QuestError> {
    let by_number = graph.nodes.iter().position(|n| matches!(n, QuestNode::Event { step, .. } if step.to_string() == key));
    by_number.or_else(|| graph.find_event(key)).ok_or_else(|| QuestError::UnknownStep(key.to_string()))
}
