use super::{pattern_from, read_all, ParseError, Sexp};
use crate::model::{Symbol, Variable};
use crate::narrate::{Template, TemplateSet};

fn strings(items: &[Sexp]) -> Result<Vec<String>, ParseError> {
    items.iter().map(|s| s.expect_str("sentence string").map(str::to_string)).collect()
}

fn template_from(form: &Sexp, items: &[Sexp]) -> Result<Template, ParseError> {
    let pattern = pattern_from(items.get(1).ok_or_else(|| form.error("template needs a pattern"))?)?;
    let mut rest = &items[2..];
    let mut introduce = Vec::new();
    if let Some(first) = rest.first() {
        if first.head() == Some("introduce") {
            for v in &first.expect_list("introduce")?[1..] {
                let a = v.expect_atom("variable")?;
                if !a.starts_with('?') {
                    return Err(v.error("introduce lists pattern variables"));
                }
                let var = Variable::new(a);
                if !pattern.vars().contains(&var) {
                    return Err(v.error(format!("{a} does not occur in the pattern")));
                }
                introduce.push(var);
            }
            rest = &rest[1..];
        }
    }
    let sentences = strings(rest)?;
    if sentences.is_empty() {
        return Err(form.error("template needs at least one sentence"));
    }
    Ok(Template { pattern, introduce, sentences })
}

fn pair(form: &Sexp, items: &[Sexp]) -> Result<(Symbol, String), ParseError> {
    match items {
        [_, sym, text] => Ok((Symbol::new(sym.expect_atom("symbol")?), text.expect_str("string")?.to_string())),
        _ => Err(form.error("expected (KEYWORD SYMBOL \"text\")")),
    }
}

pub fn parse_templates(text: &str) -> Result<TemplateSet, ParseError> {
    let top = read_all(text)?;
    let top = match top.as_slice() {
        [one] => one,
        [] => return Err(ParseError::Semantic("empty template file".into())),
        [_, extra, ..] => return Err(extra.error("unexpected expression after templates")),
    };
    let items = top.expect_list("(templates NAME ...)")?;
    if top.head() != Some("templates") {
        return Err(top.error("expected (templates NAME ...)"));
    }
    let mut set = TemplateSet {
        name: items.get(1).ok_or_else(|| top.error("templates need a name"))?.expect_atom("name")?.to_string(),
        ..TemplateSet::default()
    };
    for form in &items[2..] {
        let parts = form.expect_list("template form")?;
        match form.head().unwrap_or("") {
            "name" => set.names.push(pair(form, parts)?),
            "character" => set.characters.push(pair(form, parts)?),
            "setting" => {
                let mut rest = &parts[1..];
                if let Some(first) = rest.first() {
                    if first.head() == Some("introduces") {
                        for s in &first.expect_list("introduces")?[1..] {
                            set.setting_introduces.push(Symbol::new(s.expect_atom("symbol")?));
                        }
                        rest = &rest[1..];
                    }
                }
                set.setting.extend(strings(rest)?);
            }
            "intro" => set.intros.push(template_from(form, parts)?),
            "action" => set.actions.push(template_from(form, parts)?),
            "intention" => set.intentions.push(template_from(form, parts)?),
            "outro" => set.outros.push(template_from(form, parts)?),
            "question" => set.questions.push(template_from(form, parts)?),
            "answer" => set.answers.push(template_from(form, parts)?),
            "closing" => set.closing.extend(strings(&parts[1..])?),
            other => return Err(form.error(format!("unknown template form {other:?}"))),
        }
    }
    Ok(set)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_forms() {
        let t = parse_templates(
            r#"(templates demo
                 (name jafar "King Jafar")
                 (character jafar "There is a king named Jafar.")
                 (setting (introduces lamp) "There is a magic lamp.")
                 (intro (married-to ?a ?b) (introduce ?b ?a) "This is a story about how {?a} marries {?b}.")
                 (action (marry ?g ?b ?p) "{?g} and {?b} wed.")
                 (intention (intends ?a (married-to ?a ?b)) "{?a} wants to marry {?b}.")
                 (outro (married-to ?a ?b) "{?a} and {?b} are married.")
                 (closing "The end.")
                 (question (marry ?g ?b ?p) "Why did {?g} marry {?b}?")
                 (answer (intends ?a (married-to ?a ?b)) "{?a} wanted to marry {?b}")
                 (answer (order ?k ?n ?p (has ?k ?t)) "{?k} ordered {?n} to get {?t}"))"#,
        )
        .unwrap();
        assert_eq!(t.names.len(), 1);
        assert_eq!(t.intros[0].introduce, vec![Variable::new("?b"), Variable::new("?a")]);
        assert_eq!(t.setting_introduces, vec![Symbol::new("lamp")]);
        assert_eq!(t.closing, vec!["The end.".to_string()]);
        assert_eq!((t.questions.len(), t.answers.len()), (1, 2));
    }

    #[test]
    fn introduce_must_name_pattern_variables() {
        assert!(parse_templates(r#"(templates t (intro (p ?a) (introduce ?z) "x"))"#).is_err());
    }

    #[test]
    fn unknown_form() {
        assert!(parse_templates(r#"(templates t (chapter "x"))"#).is_err());
    }
}
