//! Template-based rendering of plans as story text.

use std::collections::BTreeSet;

use serde::Serialize;
use thiserror::Error;

use crate::model::{unify, Bindings, DomainTheory, Literal, Plan, Problem, StepId, Symbol, Term, Variable};

/// A pattern literal and the sentences rendered when it matches.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Template {
    pub pattern: Literal,
    /// Variables whose bindings are introduced before the sentences, in this
    /// order. Empty means slot order.
    pub introduce: Vec<Variable>,
    pub sentences: Vec<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TemplateSet {
    pub name: String,
    pub names: Vec<(Symbol, String)>,
    pub characters: Vec<(Symbol, String)>,
    pub setting_introduces: Vec<Symbol>,
    pub setting: Vec<String>,
    pub intros: Vec<Template>,
    pub actions: Vec<Template>,
    pub intentions: Vec<Template>,
    pub outros: Vec<Template>,
    pub closing: Vec<String>,
    /// Why-question phrasings for events.
    pub questions: Vec<Template>,
    /// Answer phrasings for events and `intends` goals.
    pub answers: Vec<Template>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NarrateError {
    #[error("no action template for {0}")]
    MissingAction(String),
    #[error("no template matches {0}")]
    NoMatch(String),
    #[error("template slot {slot} is unbound in \"{sentence}\"")]
    UnboundSlot { slot: String, sentence: String },
    #[error("ordering is cyclic")]
    Cyclic,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum UnitKind {
    Introduction,
    Intro,
    Setting,
    Event,
    Intention,
    Outro,
    Closing,
}

/// One rendered template application; `sentences` are already capitalized.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Unit {
    pub kind: UnitKind,
    /// The step an event unit narrates.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub step: Option<StepId>,
    pub sentences: Vec<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Narrative {
    pub paragraphs: Vec<Vec<Unit>>,
}

impl Narrative {
    pub fn units(&self) -> impl Iterator<Item = &Unit> {
        self.paragraphs.iter().flatten()
    }

    pub fn count(&self, kind: UnitKind) -> usize {
        self.units().filter(|u| u.kind == kind).count()
    }

    pub fn text(&self) -> String {
        let paras: Vec<String> = self
            .paragraphs
            .iter()
            .filter(|p| !p.is_empty())
            .map(|p| p.iter().flat_map(|u| u.sentences.iter().cloned()).collect::<Vec<_>>().join(" "))
            .collect();
        let mut out = paras.join("\n\n");
        out.push('\n');
        out
    }
}

impl TemplateSet {
    pub fn display(&self, s: &Symbol) -> String {
        self.names
            .iter()
            .find(|(k, _)| k == s)
            .map(|(_, v)| v.clone())
            .unwrap_or_else(|| s.to_string())
    }

    /// Schemata with no action template at all.
    pub fn missing_actions(&self, domain: &DomainTheory) -> Vec<Symbol> {
        domain
            .schemata
            .iter()
            .filter(|s| !self.actions.iter().any(|t| t.pattern.predicate == s.name))
            .map(|s| s.name.clone())
            .collect()
    }

    /// Sentences of the first template in `which` matching `lit`, joined.
    pub fn phrase(&self, which: &[Template], lit: &Literal) -> Option<String> {
        let (t, b) = find_match(which, lit)?;
        let parts = t.sentences.iter().map(|s| self.fill(s, &b)).collect::<Result<Vec<_>, _>>().ok()?;
        Some(parts.join(" "))
    }

    fn term_text(&self, t: &Term) -> String {
        match t {
            Term::Sym(s) => self.display(s),
            other => other.to_string(),
        }
    }

    fn fill(&self, sentence: &str, b: &Bindings) -> Result<String, NarrateError> {
        let mut out = String::with_capacity(sentence.len());
        let mut rest = sentence;
        while let Some(start) = rest.find('{') {
            out.push_str(&rest[..start]);
            let end = rest[start..].find('}').map(|e| start + e).ok_or_else(|| NarrateError::UnboundSlot {
                slot: rest[start..].to_string(),
                sentence: sentence.to_string(),
            })?;
            let slot = &rest[start + 1..end];
            let value = if slot.starts_with('?') { b.value_of(&Variable::new(slot)) } else { None };
            let value = value.ok_or_else(|| NarrateError::UnboundSlot {
                slot: slot.to_string(),
                sentence: sentence.to_string(),
            })?;
            out.push_str(&self.term_text(&value));
            rest = &rest[end + 1..];
        }
        out.push_str(rest);
        Ok(capitalize(&out))
    }
}

fn capitalize(s: &str) -> String {
    let mut c = s.chars();
    match c.next() {
        Some(f) => f.to_uppercase().chain(c).collect(),
        None => String::new(),
    }
}

fn find_match<'a>(templates: &'a [Template], lit: &Literal) -> Option<(&'a Template, Bindings)> {
    templates.iter().find_map(|t| unify(&t.pattern, lit, &Bindings::new()).map(|b| (t, b)))
}

struct Renderer<'a> {
    templates: &'a TemplateSet,
    introduced: BTreeSet<Symbol>,
}

impl Renderer<'_> {
    /// Character introductions owed before a unit mentioning `symbols`.
    fn introductions(&mut self, symbols: &[Symbol], into: &mut Vec<Unit>) {
        for s in symbols {
            if self.introduced.contains(s) {
                continue;
            }
            if let Some((_, text)) = self.templates.characters.iter().find(|(c, _)| c == s) {
                self.introduced.insert(s.clone());
                into.push(Unit { kind: UnitKind::Introduction, step: None, sentences: vec![capitalize(text)] });
            }
        }
    }

    fn apply(
        &mut self,
        kind: UnitKind,
        template: &Template,
        b: &Bindings,
        into: &mut Vec<Unit>,
    ) -> Result<(), NarrateError> {
        let order: Vec<Variable> = if template.introduce.is_empty() {
            template.pattern.vars()
        } else {
            template.introduce.clone()
        };
        let symbols: Vec<Symbol> = order
            .iter()
            .filter_map(|v| b.value_of(v))
            .filter_map(|t| t.as_symbol().cloned())
            .collect();
        self.introductions(&symbols, into);
        let sentences = template
            .sentences
            .iter()
            .map(|s| self.templates.fill(s, b))
            .collect::<Result<Vec<_>, _>>()?;
        into.push(Unit { kind, step: None, sentences });
        Ok(())
    }
}

/// Renders `plan` in a topological order that prefers lower step ids.
pub fn render(plan: &Plan, templates: &TemplateSet, problem: &Problem) -> Result<Narrative, NarrateError> {
    if let Some(missing) = plan
        .ordinary_steps()
        .find(|s| !templates.actions.iter().any(|t| t.pattern.predicate.as_str() == s.name()))
    {
        return Err(NarrateError::MissingAction(missing.name().to_string()));
    }
    if !plan.ordering().is_acyclic() {
        return Err(NarrateError::Cyclic);
    }
    let mut r = Renderer { templates, introduced: templates.setting_introduces.iter().cloned().collect() };
    let mut intro = Vec::new();
    for g in &problem.goal {
        let (t, b) = find_match(&templates.intros, g).ok_or_else(|| NarrateError::NoMatch(g.to_string()))?;
        r.apply(UnitKind::Intro, t, &b, &mut intro)?;
    }
    let setting = if templates.setting.is_empty() {
        Vec::new()
    } else {
        vec![Unit { kind: UnitKind::Setting, step: None, sentences: templates.setting.iter().map(|s| capitalize(s)).collect() }]
    };
    let mut events = Vec::new();
    let ids: Vec<_> = plan.ordinary_steps().map(|s| s.id).collect();
    for id in plan.ordering().topological(&ids) {
        let step = plan.step(id);
        let args: Vec<Term> = step.args.iter().map(|t| plan.bindings().substitute_term(t)).collect();
        let lit = Literal::new(step.name(), args);
        let (t, b) = find_match(&templates.actions, &lit).ok_or_else(|| NarrateError::NoMatch(lit.to_string()))?;
        r.apply(UnitKind::Event, t, &b, &mut events)?;
        if let Some(u) = events.last_mut() {
            u.step = Some(id);
        }
        let mut motivated: Vec<_> = plan.frames().iter().filter(|f| f.motivating_step == Some(id)).collect();
        motivated.sort_by_key(|f| f.id);
        for f in motivated {
            let goal = plan.bindings().substitute(&f.goal);
            let lit = Literal::intends(f.character.clone(), goal);
            let (t, b) =
                find_match(&templates.intentions, &lit).ok_or_else(|| NarrateError::NoMatch(lit.to_string()))?;
            r.apply(UnitKind::Intention, t, &b, &mut events)?;
        }
    }
    let mut outro = Vec::new();
    for g in &problem.goal {
        let (t, b) = find_match(&templates.outros, g).ok_or_else(|| NarrateError::NoMatch(g.to_string()))?;
        r.apply(UnitKind::Outro, t, &b, &mut outro)?;
    }
    if !templates.closing.is_empty() {
        outro.push(Unit { kind: UnitKind::Closing, step: None, sentences: templates.closing.iter().map(|s| capitalize(s)).collect() });
    }
    Ok(Narrative { paragraphs: vec![intro, setting, events, outro] })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse_templates;

    #[test]
    fn fill_capitalizes_and_uses_display_names() {
        let t = parse_templates(
            "(templates t (name genie \"the genie\") (name jafar \"King Jafar\")
               (action (summon ?c ?g ?l ?p) \"{?g} is summoned by {?c}.\"))",
        )
        .unwrap();
        let pattern = &t.actions[0].pattern;
        let b = unify(pattern, &crate::dsl::parse_literal("(summon jafar genie lamp castle)").unwrap(), &Bindings::new())
            .unwrap();
        assert_eq!(t.fill(&t.actions[0].sentences[0], &b).unwrap(), "The genie is summoned by King Jafar.");
    }

    #[test]
    fn unbound_slot_is_error() {
        let t = TemplateSet::default();
        assert!(matches!(t.fill("{?nope} x", &Bindings::new()), Err(NarrateError::UnboundSlot { .. })));
    }

    #[test]
    fn empty_plan_renders_intro_and_outro_only() {
        let t = parse_templates(
            "(templates t (intro (rich ?x) \"{?x} wants gold.\") (outro (rich ?x) \"{?x} is rich.\") (closing \"The end.\"))",
        )
        .unwrap();
        let problem = crate::dsl::parse_problem("(problem p :init ((character bob)) :goal ((rich bob)))").unwrap();
        let plan = Plan::skeleton(problem.initial.clone(), problem.goal.clone());
        let n = render(&plan, &t, &problem).unwrap();
        assert_eq!(n.text(), "Bob wants gold.\n\nBob is rich. The end.\n");
        assert_eq!(n.count(UnitKind::Event), 0);
    }
}
