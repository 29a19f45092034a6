use super::{literal_from, read_all, ParseError, Sexp};
use crate::heuristics::{Rule, RuleSet};
use crate::model::Symbol;

fn weight(s: Option<&Sexp>, form: &Sexp) -> Result<u64, ParseError> {
    let s = s.ok_or_else(|| form.error("missing weight"))?;
    s.expect_atom("weight")?.parse().map_err(|_| s.error("weight must be a non-negative integer"))
}

fn symbol(s: Option<&Sexp>, form: &Sexp, what: &str) -> Result<Symbol, ParseError> {
    let s = s.ok_or_else(|| form.error(format!("missing {what}")))?;
    Ok(Symbol::new(s.expect_atom(what)?))
}

fn rule_from(form: &Sexp) -> Result<Rule, ParseError> {
    let items = form.expect_list("(penalty KIND WEIGHT ...)")?;
    if form.head() != Some("penalty") {
        return Err(form.error("expected (penalty KIND WEIGHT ...)"));
    }
    let kind = items.get(1).ok_or_else(|| form.error("missing rule kind"))?;
    let w = weight(items.get(2), form)?;
    let rest = items.get(3..).unwrap_or(&[]);
    let arity = |n: usize| {
        if rest.len() == n {
            Ok(())
        } else {
            Err(form.error(format!("{} takes {n} argument(s) after the weight", kind.as_atom().unwrap_or("?"))))
        }
    };
    match kind.expect_atom("rule kind")? {
        "repeat-action" => {
            arity(0)?;
            Ok(Rule::RepeatAction { weight: w })
        }
        "frame-allowlist" => {
            let mut allowed = Vec::new();
            for entry in rest {
                let pair = entry.expect_list("(CHARACTER GOAL...)")?;
                let who = symbol(pair.first(), entry, "character")?;
                if pair.len() < 2 {
                    return Err(entry.error("allowlist entry needs at least one goal"));
                }
                for g in &pair[1..] {
                    allowed.push((who.clone(), literal_from(g)?));
                }
            }
            Ok(Rule::FrameAllowlist { weight: w, allowed })
        }
        "action-frame-count" => {
            arity(2)?;
            let action = symbol(rest.first(), form, "action name")?;
            let required = rest[1]
                .expect_atom("frame count")?
                .parse()
                .map_err(|_| rest[1].error("frame count must be a non-negative integer"))?;
            Ok(Rule::ActionFrameCount { weight: w, action, required })
        }
        "forbid-action" => {
            arity(1)?;
            Ok(Rule::ForbidAction { weight: w, action: symbol(rest.first(), form, "action name")? })
        }
        "forbid-frame" => {
            arity(2)?;
            Ok(Rule::ForbidFrame {
                weight: w,
                character: symbol(rest.first(), form, "character")?,
                goal: literal_from(&rest[1])?,
            })
        }
        other => Err(kind.error(format!("unknown rule kind {other}"))),
    }
}

pub fn parse_heuristic_rules(text: &str) -> Result<RuleSet, ParseError> {
    let rules = read_all(text)?.iter().map(rule_from).collect::<Result<_, _>>()?;
    Ok(RuleSet { rules })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse_literal;

    #[test]
    fn repeat_action() {
        let r = parse_heuristic_rules("(penalty repeat-action 5000)").unwrap();
        assert_eq!(r.rules, vec![Rule::RepeatAction { weight: 5000 }]);
    }

    #[test]
    fn empty_file() {
        assert!(parse_heuristic_rules("; nothing here\n").unwrap().is_empty());
    }

    #[test]
    fn allowlist_entry() {
        let r = parse_heuristic_rules("(penalty frame-allowlist 5000 (aladdin (not (alive genie))))").unwrap();
        assert_eq!(
            r.rules,
            vec![Rule::FrameAllowlist {
                weight: 5000,
                allowed: vec![(Symbol::new("aladdin"), parse_literal("(not (alive genie))").unwrap())],
            }]
        );
    }

    #[test]
    fn unknown_kind_is_error() {
        let e = parse_heuristic_rules("(penalty prefer-drama 10)").unwrap_err();
        assert!(e.to_string().contains("unknown rule kind prefer-drama"));
    }

    #[test]
    fn negative_weight_is_error() {
        assert!(parse_heuristic_rules("(penalty repeat-action -5)").is_err());
    }
}
