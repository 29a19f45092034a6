use std::collections::BTreeSet;

use super::term::{Literal, Symbol, Term, Variable};

/// A STRIPS-style operator extended with intentional actors and the
/// happening flag.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ActionSchema {
    pub name: Symbol,
    pub params: Vec<Variable>,
    /// Parameters bound to literals rather than entity symbols; never
    /// enumerated by the grounder.
    pub literal_params: Vec<Variable>,
    pub actors: Vec<Variable>,
    pub happening: bool,
    pub constraints: Vec<Literal>,
    pub precondition: Vec<Literal>,
    pub effect: Vec<Literal>,
    /// Pairs that must bind to distinct values (`(neq ?a ?b)`).
    pub inequalities: Vec<(Variable, Variable)>,
}

impl ActionSchema {
    pub fn param_index(&self, v: &Variable) -> Option<usize> {
        self.params.iter().position(|p| p.name == v.name)
    }

    pub fn is_literal_param(&self, v: &Variable) -> bool {
        self.literal_params.iter().any(|p| p.name == v.name)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DomainTheory {
    pub name: Symbol,
    pub schemata: Vec<ActionSchema>,
}

impl DomainTheory {
    pub fn schema(&self, name: &str) -> Option<&ActionSchema> {
        self.schemata.iter().find(|s| s.name.as_str() == name)
    }

    pub fn schema_index(&self, name: &str) -> Option<usize> {
        self.schemata.iter().position(|s| s.name.as_str() == name)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Problem {
    pub name: Symbol,
    pub initial: Vec<Literal>,
    pub agents: Vec<Symbol>,
    pub goal: Vec<Literal>,
}

impl Problem {
    /// Every symbol mentioned in the initial state or goal, in order of first
    /// appearance.
    pub fn symbols(&self) -> Vec<Symbol> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for lit in self.initial.iter().chain(self.goal.iter()) {
            collect_symbols(lit, &mut |s| {
                if seen.insert(s.clone()) {
                    out.push(s.clone());
                }
            });
        }
        out
    }
}

pub(crate) fn collect_symbols(lit: &Literal, f: &mut impl FnMut(&Symbol)) {
    for t in lit.args.iter() {
        match t {
            Term::Sym(s) => f(s),
            Term::Lit(l) => collect_symbols(l, f),
            Term::Var(_) => {}
        }
    }
}
