use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::bindings::Bindings;
use super::ordering::{Ordering, StepId};
use super::schema::ActionSchema;
use super::term::{Literal, Symbol, Term, Variable};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StepRole {
    Initial,
    Goal,
    Ordinary,
}

/// A step: an instantiated schema, or one of the two dummy steps.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Step {
    pub id: StepId,
    pub role: StepRole,
    pub schema: Option<Arc<ActionSchema>>,
    pub args: Vec<Term>,
    pub precondition: Arc<[Literal]>,
    pub effect: Arc<[Literal]>,
    pub actors: Vec<Symbol>,
    pub happening: bool,
}

impl Step {
    pub fn initial(state: Vec<Literal>) -> Self {
        Step {
            id: StepId::INIT,
            role: StepRole::Initial,
            schema: None,
            args: Vec::new(),
            precondition: Arc::from(Vec::new()),
            effect: state.into(),
            actors: Vec::new(),
            happening: true,
        }
    }

    pub fn goal(goal: Vec<Literal>) -> Self {
        Step {
            id: StepId::GOAL,
            role: StepRole::Goal,
            schema: None,
            args: Vec::new(),
            precondition: goal.into(),
            effect: Arc::from(Vec::new()),
            actors: Vec::new(),
            happening: true,
        }
    }

    /// Instantiates `schema` with one term per parameter. Variables left in
    /// `args` are rescoped to `id`.
    pub fn instantiate(id: StepId, schema: Arc<ActionSchema>, args: Vec<Term>) -> Self {
        assert_eq!(args.len(), schema.params.len(), "arity of {}", schema.name);
        let args: Vec<Term> = args
            .into_iter()
            .map(|t| match t {
                Term::Var(v) if v.scope == 0 => Term::Var(v.scoped(id.0)),
                other => other,
            })
            .collect();
        let subst = |lit: &Literal| {
            lit.map_vars(&mut |v| schema.param_index(v).map(|i| args[i].clone()))
        };
        let precondition: Vec<Literal> = schema.precondition.iter().map(subst).collect();
        let effect: Vec<Literal> = schema.effect.iter().map(subst).collect();
        let actors = schema
            .actors
            .iter()
            .filter_map(|a| schema.param_index(a).and_then(|i| args[i].as_symbol().cloned()))
            .collect();
        Step {
            id,
            role: StepRole::Ordinary,
            happening: schema.happening,
            schema: Some(schema),
            args,
            precondition: precondition.into(),
            effect: effect.into(),
            actors,
        }
    }

    pub fn name(&self) -> &str {
        match self.role {
            StepRole::Initial => "init",
            StepRole::Goal => "goal",
            StepRole::Ordinary => self.schema.as_ref().map(|s| s.name.as_str()).unwrap_or("?"),
        }
    }

    pub fn is_ordinary(&self) -> bool {
        self.role == StepRole::Ordinary
    }

    pub fn has_actor(&self, who: &Symbol) -> bool {
        self.actors.iter().any(|a| a == who)
    }

    /// Re-applies `bindings` to the step's arguments and literals.
    pub fn rebound(&self, bindings: &Bindings) -> Step {
        let mut s = self.clone();
        s.args = self.args.iter().map(|t| bindings.substitute_term(t)).collect();
        s.precondition = self.precondition.iter().map(|l| bindings.substitute(l)).collect::<Vec<_>>().into();
        s.effect = self.effect.iter().map(|l| bindings.substitute(l)).collect::<Vec<_>>().into();
        s
    }

    pub fn unbound_vars(&self) -> Vec<Variable> {
        let mut out = Vec::new();
        for t in &self.args {
            if let Term::Var(v) = t {
                out.push(v.clone());
            }
        }
        out
    }
}

impl fmt::Display for Step {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.role {
            StepRole::Ordinary => {
                write!(f, "({}", self.name())?;
                for a in &self.args {
                    write!(f, " {a}")?;
                }
                f.write_str(")")
            }
            _ => f.write_str(self.name()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CausalLink {
    pub source: StepId,
    pub effect: Literal,
    pub condition: Literal,
    pub sink: StepId,
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FrameId(pub u32);

impl fmt::Debug for FrameId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "c{}", self.0)
    }
}

impl fmt::Display for FrameId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A character's commitment to a goal and the interval of steps performed in
/// pursuit of it.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Frame {
    pub id: FrameId,
    pub character: Symbol,
    pub goal: Literal,
    pub interval: Vec<StepId>,
    pub final_step: StepId,
    pub motivating_step: Option<StepId>,
}

impl Frame {
    pub fn motivation_condition(&self) -> Literal {
        Literal::intends(self.character.clone(), self.goal.clone())
    }

    pub fn contains(&self, s: StepId) -> bool {
        self.interval.contains(&s)
    }
}

impl fmt::Display for Frame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "frame {}: {} intends {}", self.id, self.character, self.goal)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Flaw {
    OpenCondition { step: StepId, condition: Literal },
    /// `link` indexes [`Plan::links`]; links are never removed.
    CausalThreat { threat: StepId, link: usize },
    OpenMotivation { frame: FrameId, condition: Literal },
    IntentFlaw { step: StepId, frame: FrameId },
    IntentionalThreat { first: FrameId, second: FrameId },
}

impl Flaw {
    pub fn kind(&self) -> FlawKind {
        match self {
            Flaw::OpenCondition { .. } => FlawKind::OpenCondition,
            Flaw::CausalThreat { .. } => FlawKind::CausalThreat,
            Flaw::OpenMotivation { .. } => FlawKind::OpenMotivation,
            Flaw::IntentFlaw { .. } => FlawKind::IntentFlaw,
            Flaw::IntentionalThreat { .. } => FlawKind::IntentionalThreat,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FlawKind {
    OpenCondition,
    CausalThreat,
    OpenMotivation,
    IntentFlaw,
    IntentionalThreat,
}

/// A flaw awaiting repair, tagged with its creation sequence number.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PendingFlaw {
    pub seq: u32,
    pub flaw: Flaw,
}

/// What refinement produced a plan. Rendered against the plan by
/// [`Plan::describe`].
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub enum Reason {
    #[default]
    Initial,
    NewStep { step: StepId, condition: Literal },
    ReuseStep { step: StepId, condition: Literal },
    Promotion { threat: StepId, link: usize },
    Demotion { threat: StepId, link: usize },
    Separation { threat: StepId, link: usize },
    Adoption { step: StepId, frame: FrameId },
    NoAdoption { step: StepId, frame: FrameId },
    FrameOrder { first: FrameId, second: FrameId },
}

/// A partial plan ⟨S, B, O, L, C⟩ plus its pending flaws.
///
/// Components sit behind `Arc`s so refinements copy only what they change.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Plan {
    pub(crate) steps: Arc<Vec<Step>>,
    pub(crate) bindings: Arc<Bindings>,
    pub(crate) ordering: Arc<Ordering>,
    pub(crate) links: Arc<Vec<CausalLink>>,
    pub(crate) frames: Arc<Vec<Frame>>,
    pub(crate) flaws: Arc<Vec<PendingFlaw>>,
    pub(crate) proposed: Arc<Vec<(StepId, FrameId)>>,
    pub(crate) frame_orders: Arc<Vec<(FrameId, FrameId)>>,
    pub(crate) next_seq: u32,
    pub reason: Reason,
    /// Search node this plan was refined from, when produced by a search.
    pub parent: Option<u32>,
}

impl Plan {
    /// Plan containing only the initial and goal steps, `init < goal`, and no
    /// flaws.
    pub fn skeleton(initial: Vec<Literal>, goal: Vec<Literal>) -> Self {
        let mut ordering = Ordering::new();
        ordering.ensure(2);
        ordering.add(StepId::INIT, StepId::GOAL);
        Plan {
            steps: Arc::new(vec![Step::initial(initial), Step::goal(goal)]),
            bindings: Arc::default(),
            ordering: Arc::new(ordering),
            links: Arc::default(),
            frames: Arc::default(),
            flaws: Arc::default(),
            proposed: Arc::default(),
            frame_orders: Arc::default(),
            next_seq: 0,
            reason: Reason::Initial,
            parent: None,
        }
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    pub fn step(&self, id: StepId) -> &Step {
        &self.steps[id.index()]
    }

    pub fn try_step(&self, id: StepId) -> Option<&Step> {
        self.steps.get(id.index())
    }

    pub fn ordinary_steps(&self) -> impl Iterator<Item = &Step> {
        self.steps.iter().filter(|s| s.is_ordinary())
    }

    pub fn ordinary_count(&self) -> usize {
        self.steps.len().saturating_sub(2)
    }

    pub fn bindings(&self) -> &Bindings {
        &self.bindings
    }

    pub fn ordering(&self) -> &Ordering {
        &self.ordering
    }

    pub fn links(&self) -> &[CausalLink] {
        &self.links
    }

    pub fn frames(&self) -> &[Frame] {
        &self.frames
    }

    pub fn frame(&self, id: FrameId) -> &Frame {
        self.frames.iter().find(|f| f.id == id).expect("unknown frame")
    }

    pub fn try_frame(&self, id: FrameId) -> Option<&Frame> {
        self.frames.iter().find(|f| f.id == id)
    }

    pub fn flaws(&self) -> &[PendingFlaw] {
        &self.flaws
    }

    pub fn proposed_intent_flaws(&self) -> &[(StepId, FrameId)] {
        &self.proposed
    }

    pub fn frame_orders(&self) -> &[(FrameId, FrameId)] {
        &self.frame_orders
    }

    pub fn frames_containing(&self, s: StepId) -> impl Iterator<Item = &Frame> {
        self.frames.iter().filter(move |f| f.contains(s))
    }

    pub fn frame_of_final(&self, s: StepId) -> impl Iterator<Item = &Frame> {
        self.frames.iter().filter(move |f| f.final_step == s)
    }

    pub fn next_step_id(&self) -> StepId {
        StepId(self.steps.len() as u32)
    }

    pub fn next_frame_id(&self) -> FrameId {
        FrameId(self.frames.iter().map(|f| f.id.0).max().unwrap_or(0) + 1)
    }

    /// O acyclic and B consistent.
    pub fn is_consistent(&self) -> bool {
        self.ordering.is_acyclic() && self.bindings.is_consistent()
    }

    // ---- construction helpers (used by the engines and by fixtures) ----

    /// Appends an ordinary step ordered between init and goal.
    pub fn add_step(&mut self, step: Step) -> StepId {
        let id = self.next_step_id();
        assert_eq!(step.id, id, "step ids are dense");
        let o = Arc::make_mut(&mut self.ordering);
        o.ensure(id.index() + 1);
        o.add(StepId::INIT, id);
        o.add(id, StepId::GOAL);
        Arc::make_mut(&mut self.steps).push(step);
        id
    }

    pub fn replace_step(&mut self, step: Step) {
        let i = step.id.index();
        Arc::make_mut(&mut self.steps)[i] = step;
    }

    /// Adds `a < b`; false when that would close a cycle.
    pub fn order(&mut self, a: StepId, b: StepId) -> bool {
        if self.ordering.precedes(a, b) {
            return true;
        }
        Arc::make_mut(&mut self.ordering).add(a, b)
    }

    pub fn set_ordering(&mut self, ordering: Ordering) {
        self.ordering = Arc::new(ordering);
    }

    pub fn set_bindings(&mut self, bindings: Bindings) {
        self.bindings = Arc::new(bindings);
    }

    pub fn add_link(&mut self, link: CausalLink) -> usize {
        let links = Arc::make_mut(&mut self.links);
        links.push(link);
        links.len() - 1
    }

    pub fn add_frame(&mut self, frame: Frame) {
        Arc::make_mut(&mut self.frames).push(frame);
    }

    pub fn frame_mut(&mut self, id: FrameId) -> &mut Frame {
        Arc::make_mut(&mut self.frames).iter_mut().find(|f| f.id == id).expect("unknown frame")
    }

    pub fn push_flaw(&mut self, flaw: Flaw) {
        let seq = self.next_seq;
        self.next_seq += 1;
        Arc::make_mut(&mut self.flaws).push(PendingFlaw { seq, flaw });
    }

    pub fn remove_flaw(&mut self, seq: u32) -> Option<Flaw> {
        let flaws = Arc::make_mut(&mut self.flaws);
        let pos = flaws.iter().position(|f| f.seq == seq)?;
        Some(flaws.remove(pos).flaw)
    }

    pub fn retain_flaws(&mut self, mut keep: impl FnMut(&Flaw) -> bool) {
        if self.flaws.iter().all(|f| keep(&f.flaw)) {
            return;
        }
        Arc::make_mut(&mut self.flaws).retain(|f| keep(&f.flaw));
    }

    pub fn is_proposed(&self, s: StepId, c: FrameId) -> bool {
        self.proposed.contains(&(s, c))
    }

    /// Records and queues an intent flaw unless the pair was ever proposed.
    pub fn propose_intent_flaw(&mut self, s: StepId, c: FrameId) -> bool {
        if self.is_proposed(s, c) {
            return false;
        }
        Arc::make_mut(&mut self.proposed).push((s, c));
        self.push_flaw(Flaw::IntentFlaw { step: s, frame: c });
        true
    }

    pub fn record_frame_order(&mut self, first: FrameId, second: FrameId) {
        Arc::make_mut(&mut self.frame_orders).push((first, second));
    }

    pub fn frames_ordered(&self, a: FrameId, b: FrameId) -> bool {
        self.frame_orders.iter().any(|&(x, y)| (x, y) == (a, b) || (x, y) == (b, a))
    }

    /// Human-readable text for the refinement that produced this plan.
    pub fn describe(&self, reason: &Reason) -> String {
        let link_text = |i: usize| {
            let l = &self.links[i];
            format!("{} between {} and {}", l.condition, l.source, l.sink)
        };
        match reason {
            Reason::Initial => "initial plan".to_string(),
            Reason::NewStep { step, condition } => {
                format!("created new step {}: {} to solve {}", step, self.step(*step), condition)
            }
            Reason::ReuseStep { step, condition } => {
                format!("reused step {}: {} to solve {}", step, self.step(*step), condition)
            }
            Reason::Promotion { threat, link } => {
                format!("promotion of step {} after the link on {}", threat, link_text(*link))
            }
            Reason::Demotion { threat, link } => {
                format!("demotion of step {} before the link on {}", threat, link_text(*link))
            }
            Reason::Separation { threat, link } => {
                format!("separation of step {} from the link on {}", threat, link_text(*link))
            }
            Reason::Adoption { step, frame } => {
                let f = self.frame(*frame);
                format!("adoption of step {} by frame {}: {} intends {}", step, f.id, f.character, f.goal)
            }
            Reason::NoAdoption { step, frame } => {
                let f = self.frame(*frame);
                format!("no adoption of step {} by frame {}: {} intends {}", step, f.id, f.character, f.goal)
            }
            Reason::FrameOrder { first, second } => format!("ordered frame {first} before frame {second}"),
        }
    }

    pub fn describe_flaw(&self, flaw: &Flaw) -> String {
        match flaw {
            Flaw::OpenCondition { step, condition } => {
                format!("open condition {} on step {}", condition, step)
            }
            Flaw::CausalThreat { threat, link } => {
                let l = &self.links[*link];
                format!(
                    "causal threat on {} between {} and {}, clobbered by step {}",
                    l.condition, l.source, l.sink, threat
                )
            }
            Flaw::OpenMotivation { frame, condition } => {
                format!("open motivation {condition} on frame {frame}")
            }
            Flaw::IntentFlaw { step, frame } => {
                let f = self.frame(*frame);
                format!(
                    "intent flaw for {}, to possibly link step {} to frame {}: {} intends {}",
                    f.character, step, f.id, f.character, f.goal
                )
            }
            Flaw::IntentionalThreat { first, second } => {
                format!("intentional threat between frame {first} and frame {second}")
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn skeleton_is_consistent() {
        let p = Plan::skeleton(vec![], vec![]);
        assert!(p.is_consistent());
        assert!(p.ordering().precedes(StepId::INIT, StepId::GOAL));
        assert_eq!(p.ordinary_count(), 0);
    }

    #[test]
    fn two_cycle_is_inconsistent() {
        let mut p = Plan::skeleton(vec![], vec![]);
        p.set_ordering(Ordering::from_pairs(2, &[(StepId::INIT, StepId::GOAL), (StepId::GOAL, StepId::INIT)]));
        assert!(!p.is_consistent());
    }

    #[test]
    fn bound_and_forbidden_is_inconsistent() {
        let mut p = Plan::skeleton(vec![], vec![]);
        let mut b = Bindings::new();
        b.insert(Variable::new("?x"), Term::sym("jafar"));
        b.forbid(Variable::new("?x"), Term::sym("jafar"));
        p.set_bindings(b);
        assert!(!p.is_consistent());
    }

    #[test]
    fn intent_flaw_proposals_are_recorded_once() {
        let mut p = Plan::skeleton(vec![], vec![]);
        assert!(p.propose_intent_flaw(StepId(2), FrameId(1)));
        assert!(!p.propose_intent_flaw(StepId(2), FrameId(1)));
        assert_eq!(p.flaws().len(), 1);
    }
}
