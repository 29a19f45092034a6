//! Readers and printers for `.domain`, `.problem`, `.rules` and `.tmpl` files.

mod rules;
mod sexp;
mod templates;

use std::collections::BTreeSet;
use std::fmt::Write as _;

use thiserror::Error;

use crate::model::{ActionSchema, DomainTheory, Literal, Problem, Symbol, Term, Variable};

pub use rules::parse_heuristic_rules;
pub use sexp::{read_all, Pos, Sexp};
pub use templates::parse_templates;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("{line}:{col}: syntax error: {message}")]
    Syntax { line: usize, col: usize, message: String },
    #[error("schema {schema}: {message}")]
    Schema { schema: String, message: String },
    #[error("{0}")]
    Semantic(String),
    #[error("empty domain: no action schemata")]
    EmptyDomain,
}

pub fn parse_term(text: &str) -> Result<Term, ParseError> {
    let items = read_all(text)?;
    match items.as_slice() {
        [one] => term_from(one),
        _ => Err(ParseError::Semantic(format!("expected a single term, got {:?}", text))),
    }
}

pub fn parse_literal(text: &str) -> Result<Literal, ParseError> {
    let items = read_all(text)?;
    match items.as_slice() {
        [one] => literal_from(one),
        _ => Err(ParseError::Semantic(format!("expected a single literal, got {:?}", text))),
    }
}

/// A literal whose arguments may themselves be literals, as in a rendered
/// step with a literal-valued parameter.
pub fn parse_pattern(text: &str) -> Result<Literal, ParseError> {
    let items = read_all(text)?;
    match items.as_slice() {
        [one] => pattern_from(one),
        _ => Err(ParseError::Semantic(format!("expected a single literal, got {:?}", text))),
    }
}

pub(crate) fn term_from(s: &Sexp) -> Result<Term, ParseError> {
    term_in(s, false)
}

fn term_in(s: &Sexp, nested: bool) -> Result<Term, ParseError> {
    match s {
        Sexp::Atom(a, _) if a.starts_with('?') && a.len() > 1 => match a.split_once('#') {
            Some((name, scope)) => {
                let scope = scope.parse().map_err(|_| s.error(format!("bad variable scope in {a}")))?;
                Ok(Term::Var(Variable::new(name).scoped(scope)))
            }
            None => Ok(Term::Var(Variable::new(a))),
        },
        Sexp::Atom(a, _) => Ok(Term::Sym(Symbol::new(a))),
        Sexp::List(..) => literal_in(s, nested).map(Term::Lit),
        Sexp::Str(..) => Err(s.error("unexpected string")),
    }
}

pub(crate) fn literal_from(s: &Sexp) -> Result<Literal, ParseError> {
    literal_in(s, false)
}

/// Like `literal_from` but any argument may be a literal, for matching
/// literal-valued parameters.
pub(crate) fn pattern_from(s: &Sexp) -> Result<Literal, ParseError> {
    literal_in(s, true)
}

fn literal_in(s: &Sexp, nested: bool) -> Result<Literal, ParseError> {
    let items = s.expect_list("literal")?;
    let head = items.first().ok_or_else(|| s.error("empty literal"))?.expect_atom("predicate")?;
    if head == "not" {
        if items.len() != 2 {
            return Err(s.error("(not ...) takes exactly one literal"));
        }
        let inner = literal_in(&items[1], nested)?;
        if !inner.positive {
            return Err(s.error("double negation"));
        }
        return Ok(inner.negated());
    }
    if head.starts_with('?') {
        return Err(s.error("predicate cannot be a variable"));
    }
    let mut args = Vec::with_capacity(items.len() - 1);
    for (i, a) in items[1..].iter().enumerate() {
        let t = term_in(a, nested)?;
        if matches!(t, Term::Lit(_)) && !nested && !(head == crate::model::INTENDS && i == 1) {
            return Err(a.error("nested literals are only allowed as the goal of intends"));
        }
        args.push(t);
    }
    Ok(Literal::new(head, args))
}

fn literal_list(s: &Sexp) -> Result<Vec<Literal>, ParseError> {
    s.expect_list("literal list")?.iter().map(literal_from).collect()
}

fn variable_list(s: &Sexp) -> Result<Vec<Variable>, ParseError> {
    s.expect_list("variable list")?
        .iter()
        .map(|v| {
            let a = v.expect_atom("variable")?;
            if a.starts_with('?') && a.len() > 1 {
                Ok(Variable::new(a))
            } else {
                Err(v.error(format!("expected variable, got {a}")))
            }
        })
        .collect()
}

fn symbol_list(s: &Sexp) -> Result<Vec<Symbol>, ParseError> {
    s.expect_list("symbol list")?
        .iter()
        .map(|v| {
            let a = v.expect_atom("symbol")?;
            if a.starts_with('?') {
                Err(v.error("expected symbol, got variable"))
            } else {
                Ok(Symbol::new(a))
            }
        })
        .collect()
}

/// Splits `(head name :key value :key value ...)` into name and slots.
type Slots<'a> = Vec<(&'a str, &'a Sexp)>;

fn keyword_slots<'a>(s: &'a Sexp, head: &str) -> Result<(&'a Sexp, Slots<'a>), ParseError> {
    let items = s.expect_list(head)?;
    if items.first().and_then(Sexp::as_atom) != Some(head) {
        return Err(s.error(format!("expected ({head} ...)")));
    }
    let name = items.get(1).ok_or_else(|| s.error(format!("{head} needs a name")))?;
    name.expect_atom("name")?;
    let mut slots = Vec::new();
    let mut i = 2;
    while i < items.len() {
        let key = items[i].expect_atom("slot keyword")?;
        if !key.starts_with(':') {
            return Err(items[i].error(format!("expected slot keyword, got {key}")));
        }
        let value = items.get(i + 1).ok_or_else(|| items[i].error(format!("missing value for {key}")))?;
        if slots.iter().any(|(k, _)| *k == key) {
            return Err(items[i].error(format!("duplicate slot {key}")));
        }
        slots.push((key, value));
        i += 2;
    }
    Ok((name, slots))
}

fn schema_from(s: &Sexp) -> Result<ActionSchema, ParseError> {
    let (name, slots) = keyword_slots(s, "action")?;
    let name = name.expect_atom("action name")?;
    let mut schema = ActionSchema {
        name: Symbol::new(name),
        params: Vec::new(),
        literal_params: Vec::new(),
        actors: Vec::new(),
        happening: false,
        constraints: Vec::new(),
        precondition: Vec::new(),
        effect: Vec::new(),
        inequalities: Vec::new(),
    };
    let serr = |message: String| ParseError::Schema { schema: name.to_string(), message };
    for (key, value) in slots {
        match key {
            ":parameters" => schema.params = variable_list(value)?,
            ":literal-params" => schema.literal_params = variable_list(value)?,
            ":actors" => schema.actors = variable_list(value)?,
            ":happening" => {
                schema.happening = match value.expect_atom("t or nil")? {
                    "t" | "true" => true,
                    "nil" | "false" => false,
                    other => return Err(value.error(format!("expected t or nil, got {other}"))),
                }
            }
            ":constraints" => schema.constraints = literal_list(value)?,
            ":precondition" => {
                for l in literal_list(value)? {
                    if l.predicate.as_str() == "neq" {
                        match (l.positive, &l.args[..]) {
                            (true, [Term::Var(a), Term::Var(b)]) => schema.inequalities.push((a.clone(), b.clone())),
                            _ => return Err(serr(format!("malformed inequality {l}"))),
                        }
                    } else {
                        schema.precondition.push(l);
                    }
                }
            }
            ":effect" => schema.effect = literal_list(value)?,
            other => return Err(value.error(format!("unknown action slot {other}"))),
        }
    }
    check_schema(&schema).map_err(serr)?;
    Ok(schema)
}

fn check_schema(s: &ActionSchema) -> Result<(), String> {
    let mut seen = BTreeSet::new();
    for p in &s.params {
        if !seen.insert(p) {
            return Err(format!("duplicate parameter {p}"));
        }
    }
    for v in s.actors.iter().chain(s.literal_params.iter()) {
        if s.param_index(v).is_none() {
            return Err(format!("variable {v} is not a parameter"));
        }
    }
    if s.actors.is_empty() && !s.happening {
        return Err("an action with no actors must be a happening".into());
    }
    for (slot, lits) in [("constraints", &s.constraints), ("precondition", &s.precondition), ("effect", &s.effect)] {
        for l in lits.iter() {
            for v in l.vars() {
                if s.param_index(&v).is_none() {
                    return Err(format!("variable {v} in {slot} is not a parameter"));
                }
            }
            if slot != "effect" && l.is_intends() {
                return Err(format!("intends may only appear in effects, found in {slot}"));
            }
            if slot == "effect" && l.predicate.as_str() == "neq" {
                return Err("neq may not appear in effects".into());
            }
        }
    }
    for (a, b) in &s.inequalities {
        for v in [a, b] {
            if s.param_index(v).is_none() {
                return Err(format!("variable {v} in precondition is not a parameter"));
            }
        }
    }
    Ok(())
}

pub fn parse_domain(text: &str) -> Result<DomainTheory, ParseError> {
    let items = read_all(text)?;
    let top = match items.as_slice() {
        [] => return Err(ParseError::EmptyDomain),
        [one] => one,
        [_, extra, ..] => return Err(extra.error("unexpected expression after domain")),
    };
    let list = top.expect_list("(domain NAME ACTION...)")?;
    if top.head() != Some("domain") {
        return Err(top.error("expected (domain NAME ACTION...)"));
    }
    let name = list.get(1).ok_or_else(|| top.error("domain needs a name"))?.expect_atom("domain name")?;
    let mut schemata: Vec<ActionSchema> = Vec::new();
    for a in &list[2..] {
        let s = schema_from(a)?;
        if schemata.iter().any(|o| o.name == s.name) {
            return Err(ParseError::Schema { schema: s.name.to_string(), message: "duplicate schema name".into() });
        }
        schemata.push(s);
    }
    if schemata.is_empty() {
        return Err(ParseError::EmptyDomain);
    }
    Ok(DomainTheory { name: Symbol::new(name), schemata })
}

pub fn parse_problem(text: &str) -> Result<Problem, ParseError> {
    let items = read_all(text)?;
    let top = match items.as_slice() {
        [one] => one,
        [] => return Err(ParseError::Semantic("empty problem file".into())),
        [_, extra, ..] => return Err(extra.error("unexpected expression after problem")),
    };
    let (name, slots) = keyword_slots(top, "problem")?;
    let mut initial = Vec::new();
    let mut goal = Vec::new();
    let mut agents: Option<Vec<Symbol>> = None;
    for (key, value) in slots {
        match key {
            ":domain" => {
                value.expect_atom("domain name")?;
            }
            ":init" => {
                for (l, src) in literal_list(value)?.into_iter().zip(value.expect_list("literal list")?) {
                    if !l.positive {
                        return Err(src.error("initial state holds only positive literals"));
                    }
                    if !l.is_ground() {
                        return Err(src.error("initial state literals must be ground"));
                    }
                    initial.push(l);
                }
            }
            ":goal" => {
                for (l, src) in literal_list(value)?.into_iter().zip(value.expect_list("literal list")?) {
                    if !l.is_ground() {
                        return Err(src.error("goal literals must be ground"));
                    }
                    goal.push(l);
                }
            }
            ":agents" => agents = Some(symbol_list(value)?),
            other => return Err(value.error(format!("unknown problem slot {other}"))),
        }
    }
    let characters: Vec<Symbol> = initial
        .iter()
        .filter(|l| l.predicate.as_str() == "character" && l.arity() == 1)
        .filter_map(|l| l.args[0].as_symbol().cloned())
        .collect();
    let agents = match agents {
        Some(a) => {
            for x in &a {
                if !characters.contains(x) {
                    return Err(ParseError::Semantic(format!("agent {x} has no (character {x}) literal in :init")));
                }
            }
            a
        }
        None => characters,
    };
    let mut problem = Problem { name: Symbol::new(name.expect_atom("name")?), initial, agents, goal };
    let known: BTreeSet<Symbol> = {
        let init_only = Problem { goal: Vec::new(), ..problem.clone() };
        init_only.symbols().into_iter().collect()
    };
    for g in &problem.goal {
        let mut missing = None;
        crate::model::schema::collect_symbols(g, &mut |s| {
            if !known.contains(s) && missing.is_none() {
                missing = Some(s.clone());
            }
        });
        if let Some(s) = missing {
            return Err(ParseError::Semantic(format!("goal {g} mentions {s}, which does not occur in :init")));
        }
    }
    problem.initial.dedup();
    Ok(problem)
}

fn write_list<T: std::fmt::Display>(out: &mut String, items: &[T]) {
    out.push('(');
    for (i, x) in items.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        let _ = write!(out, "{x}");
    }
    out.push(')');
}

pub fn print_schema(s: &ActionSchema) -> String {
    let mut out = String::new();
    let _ = write!(out, "  (action {}\n    :parameters ", s.name);
    write_list(&mut out, &s.params);
    if !s.literal_params.is_empty() {
        out.push_str("\n    :literal-params ");
        write_list(&mut out, &s.literal_params);
    }
    out.push_str("\n    :actors ");
    write_list(&mut out, &s.actors);
    if s.happening {
        out.push_str("\n    :happening t");
    }
    out.push_str("\n    :constraints ");
    write_list(&mut out, &s.constraints);
    out.push_str("\n    :precondition ");
    let mut pre: Vec<String> = s.precondition.iter().map(ToString::to_string).collect();
    pre.extend(s.inequalities.iter().map(|(a, b)| format!("(neq {a} {b})")));
    write_list(&mut out, &pre);
    out.push_str("\n    :effect ");
    write_list(&mut out, &s.effect);
    out.push(')');
    out
}

pub fn print_domain(d: &DomainTheory) -> String {
    let mut out = format!("(domain {}\n", d.name);
    for (i, s) in d.schemata.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        out.push_str(&print_schema(s));
    }
    out.push_str(")\n");
    out
}

pub fn print_problem(p: &Problem) -> String {
    let mut out = format!("(problem {}\n  :init (", p.name);
    for (i, l) in p.initial.iter().enumerate() {
        out.push_str(if i == 0 { "" } else { "\n         " });
        let _ = write!(out, "{l}");
    }
    out.push_str(")\n  :agents ");
    write_list(&mut out, &p.agents);
    out.push_str("\n  :goal ");
    write_list(&mut out, &p.goal);
    out.push_str(")\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const SLAY: &str = "(domain d (action slay
        :parameters (?slayer ?monster ?place)
        :actors (?slayer)
        :constraints ((knight ?slayer) (monster ?monster) (place ?place))
        :precondition ((at ?slayer ?place) (at ?monster ?place) (alive ?slayer) (alive ?monster))
        :effect ((not (alive ?monster)))))";

    #[test]
    fn slay_schema_slots() {
        let d = parse_domain(SLAY).unwrap();
        let s = &d.schemata[0];
        assert_eq!(s.actors, vec![Variable::new("?slayer")]);
        assert_eq!(s.precondition.len(), 4);
        assert_eq!(s.effect.len(), 1);
        assert!(!s.happening);
    }

    #[test]
    fn happening_flag() {
        let d = parse_domain(
            "(domain d (action appear-threatening :parameters (?monster ?char ?place) :actors (?monster)
              :happening t :constraints () :precondition ((scary ?monster) (neq ?monster ?char))
              :effect ((intends ?char (not (alive ?monster))))))",
        )
        .unwrap();
        assert!(d.schemata[0].happening);
        assert_eq!(d.schemata[0].inequalities.len(), 1);
        assert_eq!(d.schemata[0].precondition.len(), 1);
    }

    #[test]
    fn empty_input_is_empty_domain() {
        assert_eq!(parse_domain("  ; nothing\n"), Err(ParseError::EmptyDomain));
    }

    #[test]
    fn unknown_variable_names_schema() {
        let e = parse_domain("(domain d (action a :parameters (?x) :actors (?x) :precondition ((p ?y)) :effect ()))")
            .unwrap_err();
        assert_eq!(e.to_string(), "schema a: variable ?y in precondition is not a parameter");
    }

    #[test]
    fn intends_precondition_rejected() {
        let e = parse_domain(
            "(domain d (action a :parameters (?x ?g) :actors (?x) :precondition ((intends ?x ?g)) :effect ()))",
        )
        .unwrap_err();
        assert!(matches!(e, ParseError::Schema { .. }));
    }

    #[test]
    fn scoped_variable_round_trips() {
        let l = parse_literal("(intends ?k#7 ?objective#7)").unwrap();
        assert_eq!(l.to_string(), "(intends ?k#7 ?objective#7)");
        assert!(parse_literal("(at ?x#y)").is_err());
    }

    #[test]
    fn syntax_error_has_position() {
        let e = parse_domain("(domain d\n  (action a :parameters (?x)").unwrap_err();
        assert!(matches!(e, ParseError::Syntax { line: 2, col: 3, .. }), "{e}");
    }

    #[test]
    fn problem_goal_must_be_ground() {
        let e = parse_problem("(problem p :init ((character a)) :goal ((at ?x)))").unwrap_err();
        assert!(e.to_string().contains("ground"));
    }

    #[test]
    fn empty_goal_is_valid() {
        let p = parse_problem("(problem p :init ((character a)) :goal ())").unwrap();
        assert!(p.goal.is_empty());
        assert_eq!(p.agents, vec![Symbol::new("a")]);
    }

    #[test]
    fn goal_symbol_must_occur_in_init() {
        assert!(parse_problem("(problem p :init ((character a)) :goal ((at a nowhere)))").is_err());
    }

    #[test]
    fn literal_round_trip() {
        for t in ["(at aladdin castle)", "(not (alive genie))", "(intends aladdin (not (alive genie)))", "(p)"] {
            assert_eq!(parse_literal(t).unwrap().to_string(), t);
        }
    }

    #[test]
    fn nested_literal_outside_intends_rejected() {
        assert!(parse_literal("(p (q a))").is_err());
        assert!(parse_literal("(intends (q a) b)").is_err());
    }

    #[test]
    fn domain_round_trip() {
        let d = parse_domain(SLAY).unwrap();
        assert_eq!(parse_domain(&print_domain(&d)).unwrap(), d);
    }
}
