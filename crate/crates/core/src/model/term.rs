use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

/// Interned-by-refcount name of a symbol or predicate.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Symbol(Arc<str>);

impl Symbol {
    pub fn new(name: &str) -> Self {
        Symbol(Arc::from(name))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Symbol {
    fn from(s: &str) -> Self {
        Symbol::new(s)
    }
}

/// A variable. `scope` is 0 for schema-level variables and the owning step id
/// once a schema is instantiated, so two steps of the same schema never share
/// variables.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Variable {
    pub name: Symbol,
    pub scope: u32,
}

impl Variable {
    pub fn new(name: &str) -> Self {
        debug_assert!(name.starts_with('?'));
        Variable { name: Symbol::new(name), scope: 0 }
    }

    pub fn scoped(&self, scope: u32) -> Self {
        Variable { name: self.name.clone(), scope }
    }
}

impl fmt::Debug for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.scope == 0 {
            write!(f, "{}", self.name)
        } else {
            write!(f, "{}#{}", self.name, self.scope)
        }
    }
}

/// Argument of a literal. Nested literals only occur as the goal argument of
/// `intends`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(Variable),
    Sym(Symbol),
    Lit(Literal),
}

impl Term {
    pub fn var(name: &str) -> Self {
        Term::Var(Variable::new(name))
    }

    pub fn sym(name: &str) -> Self {
        Term::Sym(Symbol::new(name))
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::Sym(_) => true,
            Term::Lit(l) => l.is_ground(),
        }
    }

    pub fn as_symbol(&self) -> Option<&Symbol> {
        match self {
            Term::Sym(s) => Some(s),
            _ => None,
        }
    }

    fn collect_vars(&self, out: &mut Vec<Variable>) {
        match self {
            Term::Var(v) => {
                if !out.contains(v) {
                    out.push(v.clone())
                }
            }
            Term::Sym(_) => {}
            Term::Lit(l) => l.collect_vars(out),
        }
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => write!(f, "{v}"),
            Term::Sym(s) => write!(f, "{s}"),
            Term::Lit(l) => write!(f, "{l}"),
        }
    }
}

pub const INTENDS: &str = "intends";

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    pub predicate: Symbol,
    pub positive: bool,
    pub args: Arc<[Term]>,
}

impl Literal {
    pub fn new(predicate: &str, args: Vec<Term>) -> Self {
        Literal { predicate: Symbol::new(predicate), positive: true, args: args.into() }
    }

    /// Ground positive literal from symbol names.
    pub fn ground(predicate: &str, args: &[&str]) -> Self {
        Literal::new(predicate, args.iter().map(|a| Term::sym(a)).collect())
    }

    /// `(intends agent goal)`.
    pub fn intends(agent: Symbol, goal: Literal) -> Self {
        Literal {
            predicate: Symbol::new(INTENDS),
            positive: true,
            args: vec![Term::Sym(agent), Term::Lit(goal)].into(),
        }
    }

    pub fn negate(&self) -> Self {
        Literal { predicate: self.predicate.clone(), positive: !self.positive, args: self.args.clone() }
    }

    pub fn negated(mut self) -> Self {
        self.positive = !self.positive;
        self
    }

    pub fn arity(&self) -> usize {
        self.args.len()
    }

    pub fn is_intends(&self) -> bool {
        self.predicate.as_str() == INTENDS
    }

    pub fn is_ground(&self) -> bool {
        self.args.iter().all(Term::is_ground)
    }

    /// True when `other` is this literal with the opposite polarity.
    pub fn negates(&self, other: &Literal) -> bool {
        self.positive != other.positive && self.predicate == other.predicate && self.args == other.args
    }

    pub fn vars(&self) -> Vec<Variable> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut Vec<Variable>) {
        for a in self.args.iter() {
            a.collect_vars(out);
        }
    }

    /// Applies `f` to every variable, rebuilding only when something changes.
    pub fn map_vars(&self, f: &mut impl FnMut(&Variable) -> Option<Term>) -> Literal {
        let mut changed = false;
        let args: Vec<Term> = self
            .args
            .iter()
            .map(|a| {
                let n = map_term(a, f);
                if n.as_ref().is_some() {
                    changed = true;
                }
                n.unwrap_or_else(|| a.clone())
            })
            .collect();
        if changed {
            Literal { predicate: self.predicate.clone(), positive: self.positive, args: args.into() }
        } else {
            self.clone()
        }
    }

    /// For `(intends a g)`, returns `(a, g)`.
    pub fn as_intends(&self) -> Option<(&Term, &Term)> {
        if self.is_intends() && self.args.len() == 2 {
            Some((&self.args[0], &self.args[1]))
        } else {
            None
        }
    }
}

fn map_term(t: &Term, f: &mut impl FnMut(&Variable) -> Option<Term>) -> Option<Term> {
    match t {
        Term::Var(v) => f(v),
        Term::Sym(_) => None,
        Term::Lit(l) => {
            let n = l.map_vars(f);
            if &n == l {
                None
            } else {
                Some(Term::Lit(n))
            }
        }
    }
}

impl fmt::Debug for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.positive {
            f.write_str("(not ")?;
        }
        write!(f, "({}", self.predicate)?;
        for a in self.args.iter() {
            write!(f, " {a}")?;
        }
        f.write_str(")")?;
        if !self.positive {
            f.write_str(")")?;
        }
        Ok(())
    }
}

impl Serialize for Literal {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Literal {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        crate::dsl::parse_literal(&text).map_err(serde::de::Error::custom)
    }
}

impl Serialize for Variable {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Variable {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        match Term::deserialize(d)? {
            Term::Var(v) => Ok(v),
            other => Err(serde::de::Error::custom(format!("expected a variable, got {other}"))),
        }
    }
}

impl Serialize for Term {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Term {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        crate::dsl::parse_term(&text).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display_is_canonical() {
        let l = Literal::ground("at", &["aladdin", "castle"]);
        assert_eq!(l.to_string(), "(at aladdin castle)");
        assert_eq!(l.negate().to_string(), "(not (at aladdin castle))");
        let i = Literal::intends(Symbol::new("aladdin"), Literal::ground("has", &["jafar", "lamp"]));
        assert_eq!(i.to_string(), "(intends aladdin (has jafar lamp))");
    }

    #[test]
    fn groundness_looks_inside_nested_literals() {
        let nested = Literal::new("intends", vec![Term::sym("a"), Term::Lit(Literal::new("p", vec![Term::var("?x")]))]);
        assert!(!nested.is_ground());
        assert_eq!(nested.vars(), vec![Variable::new("?x")]);
    }

    #[test]
    fn negates_is_symmetric() {
        let a = Literal::ground("alive", &["genie"]);
        assert!(a.negates(&a.negate()));
        assert!(a.negate().negates(&a));
        assert!(!a.negates(&a));
    }
}
