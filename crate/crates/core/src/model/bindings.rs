use std::collections::BTreeMap;

use super::term::{Literal, Term, Variable};

/// Codesignation and non-codesignation constraints on step variables.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Bindings {
    codesignations: BTreeMap<Variable, Term>,
    non_codesignations: Vec<(Variable, Term)>,
}

impl Bindings {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn is_empty(&self) -> bool {
        self.codesignations.is_empty() && self.non_codesignations.is_empty()
    }

    pub fn codesignations(&self) -> impl Iterator<Item = (&Variable, &Term)> {
        self.codesignations.iter()
    }

    pub fn non_codesignations(&self) -> &[(Variable, Term)] {
        &self.non_codesignations
    }

    /// Records `var = value` without any checking. Use [`unify`] or
    /// [`Bindings::bind`] unless the caller has already established
    /// consistency.
    pub fn insert(&mut self, var: Variable, value: Term) {
        self.codesignations.insert(var, value);
    }

    pub fn bind(&self, var: &Variable, value: &Term) -> Option<Bindings> {
        let mut b = self.clone();
        if b.unify_terms(&Term::Var(var.clone()), value) && b.is_consistent() {
            Some(b)
        } else {
            None
        }
    }

    pub fn forbid(&mut self, var: Variable, value: Term) {
        let pair = (var, value);
        if !self.non_codesignations.contains(&pair) {
            self.non_codesignations.push(pair);
        }
    }

    /// Follows variable chains until reaching a non-variable or an unbound
    /// variable.
    pub fn resolve<'a>(&'a self, term: &'a Term) -> &'a Term {
        let mut t = term;
        while let Term::Var(v) = t {
            match self.codesignations.get(v) {
                Some(next) => t = next,
                None => break,
            }
        }
        t
    }

    pub fn value_of(&self, var: &Variable) -> Option<Term> {
        let t = Term::Var(var.clone());
        match self.resolve(&t) {
            Term::Var(v) if v == var => None,
            other => Some(self.substitute_term(other)),
        }
    }

    pub fn substitute_term(&self, term: &Term) -> Term {
        match self.resolve(term) {
            Term::Lit(l) => Term::Lit(self.substitute(l)),
            other => other.clone(),
        }
    }

    /// Replaces every bound variable in `lit` by its value.
    pub fn substitute(&self, lit: &Literal) -> Literal {
        if self.codesignations.is_empty() {
            return lit.clone();
        }
        lit.map_vars(&mut |v| {
            let t = Term::Var(v.clone());
            match self.resolve(&t) {
                Term::Var(w) if w == v => None,
                other => Some(self.substitute_term(other)),
            }
        })
    }

    pub fn is_consistent(&self) -> bool {
        self.non_codesignations.iter().all(|(v, t)| {
            let a = self.substitute_term(&Term::Var(v.clone()));
            let b = self.substitute_term(t);
            a != b
        })
    }

    fn unify_terms(&mut self, a: &Term, b: &Term) -> bool {
        let a = self.resolve(a).clone();
        let b = self.resolve(b).clone();
        match (&a, &b) {
            (Term::Var(x), Term::Var(y)) if x == y => true,
            (Term::Var(x), other) | (other, Term::Var(x)) => {
                if occurs(x, other, self) {
                    return false;
                }
                self.codesignations.insert(x.clone(), other.clone());
                true
            }
            (Term::Sym(x), Term::Sym(y)) => x == y,
            (Term::Lit(x), Term::Lit(y)) => self.unify_literals(x, y),
            _ => false,
        }
    }

    fn unify_literals(&mut self, a: &Literal, b: &Literal) -> bool {
        if a.predicate != b.predicate || a.positive != b.positive || a.args.len() != b.args.len() {
            return false;
        }
        a.args.iter().zip(b.args.iter()).all(|(x, y)| self.unify_terms(x, y))
    }
}

fn occurs(var: &Variable, term: &Term, b: &Bindings) -> bool {
    match b.resolve(term) {
        Term::Var(v) => v == var,
        Term::Sym(_) => false,
        Term::Lit(l) => l.args.iter().any(|t| occurs(var, t, b)),
    }
}

/// Most general extension of `bindings` making `a` and `b` identical, or
/// `None`. The input is never modified.
pub fn unify(a: &Literal, b: &Literal, bindings: &Bindings) -> Option<Bindings> {
    let mut out = bindings.clone();
    if out.unify_literals(a, b) && out.is_consistent() {
        Some(out)
    } else {
        None
    }
}

/// Cheap pre-filter: could `a` and `b` possibly unify?
pub fn may_unify(a: &Literal, b: &Literal) -> bool {
    a.predicate == b.predicate && a.positive == b.positive && a.args.len() == b.args.len()
}
