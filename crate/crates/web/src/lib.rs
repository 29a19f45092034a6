//! Browser bindings: plan search, narration and why-questions over the
//! bundled example worlds.

use fabula::dsl::{parse_domain, parse_heuristic_rules, parse_problem, parse_templates};
use fabula::export::{plan_from_json_str, plan_to_json, plan_to_json_string};
use fabula::narrate::render;
use fabula::pocl::Algorithm;
use fabula::quest::{emit_questionnaire, plan_to_quest, resolve_event};
use fabula::search::{plan_search, SearchConfig};
use fabula::{DomainTheory, Problem};
use serde_json::json;
use wasm_bindgen::prelude::*;

/// Search budget for the browser; larger worlds should use the CLI.
pub const MAX_NODES: u64 = 200_000;

struct Example {
    name: &'static str,
    domain: &'static str,
    problem: &'static str,
    templates: &'static str,
    rules: &'static str,
    plan: Option<&'static str>,
}

const EXAMPLES: &[Example] = &[
    Example {
        name: "villain",
        domain: include_str!("../../core/fixtures/micro/villain.domain"),
        problem: include_str!("../../core/fixtures/micro/villain.problem"),
        templates: include_str!("../../core/fixtures/micro/villain.tmpl"),
        rules: "",
        plan: None,
    },
    Example {
        name: "locked-tower",
        domain: include_str!("../../core/fixtures/micro/locked-tower.domain"),
        problem: include_str!("../../core/fixtures/micro/locked-tower.problem"),
        templates: include_str!("../../core/fixtures/micro/locked-tower.tmpl"),
        rules: "",
        plan: None,
    },
    Example {
        name: "courier",
        domain: include_str!("../../core/fixtures/micro/courier.domain"),
        problem: include_str!("../../core/fixtures/micro/courier.problem"),
        templates: include_str!("../../core/fixtures/micro/courier.tmpl"),
        rules: "",
        plan: None,
    },
    Example {
        name: "aladdin",
        domain: include_str!("../../core/fixtures/aladdin.domain"),
        problem: include_str!("../../core/fixtures/aladdin.problem"),
        templates: include_str!("../../core/fixtures/aladdin.tmpl"),
        rules: include_str!("../../core/fixtures/aladdin.rules"),
        plan: Some(include_str!("../../core/fixtures/aladdin-plan.json")),
    },
];

fn load(domain: &str, problem: &str) -> Result<(DomainTheory, Problem), String> {
    let d = parse_domain(domain).map_err(|e| format!("domain: {e}"))?;
    let p = parse_problem(problem).map_err(|e| format!("problem: {e}"))?;
    Ok((d, p))
}

fn algorithm(name: &str) -> Result<Algorithm, String> {
    name.parse()
}

/// The bundled worlds as a JSON array of
/// `{name, domain, problem, templates, rules, plan}`.
pub fn examples_json() -> String {
    let list: Vec<_> = EXAMPLES
        .iter()
        .map(|e| {
            json!({
                "name": e.name,
                "domain": e.domain,
                "problem": e.problem,
                "templates": e.templates,
                "rules": e.rules,
                "plan": e.plan,
            })
        })
        .collect();
    serde_json::Value::Array(list).to_string()
}

/// Runs the planner. The result carries the plan JSON, a readable step list
/// and search statistics.
pub fn plan_json(domain: &str, problem: &str, rules: &str, algorithm_name: &str) -> Result<String, String> {
    let (d, p) = load(domain, problem)?;
    let mut config = SearchConfig::new(algorithm(algorithm_name)?);
    if !rules.trim().is_empty() {
        config.rules = parse_heuristic_rules(rules).map_err(|e| format!("rules: {e}"))?;
    }
    config.max_nodes = MAX_NODES;
    let result = plan_search(&d, &p, &config);
    let stats = json!({
        "generated": result.stats.nodes_generated,
        "visited": result.stats.nodes_visited,
        "depth": result.stats.solution_depth,
    });
    let plan = result.outcome.map_err(|f| format!("no plan: {f} ({} nodes generated)", result.stats.nodes_generated))?;
    let doc = plan_to_json(&plan, &d, &p);
    Ok(json!({
        "plan": plan_to_json_string(&plan, &d, &p),
        "steps": doc.steps.iter().map(|s| format!("{}. {}", s.number, s.text)).collect::<Vec<_>>(),
        "frames": plan.frames().iter().map(|f| format!("{} intends {}", f.character, plan.bindings().substitute(&f.goal))).collect::<Vec<_>>(),
        "stats": stats,
    })
    .to_string())
}

/// Story text for a plan JSON document.
pub fn narrate_text(domain: &str, problem: &str, plan: &str, templates: &str) -> Result<String, String> {
    let (d, p) = load(domain, problem)?;
    let plan = plan_from_json_str(plan, &d, &p).map_err(|e| e.to_string())?;
    let t = parse_templates(templates).map_err(|e| format!("templates: {e}"))?;
    Ok(render(&plan, &t, &p).map_err(|e| e.to_string())?.text())
}

/// Candidate answers to "why did step N happen?" with their predicted
/// goodness, as a JSON object `{question, answers: [{answer, prediction}]}`.
pub fn why_json(
    domain: &str,
    problem: &str,
    plan: &str,
    templates: &str,
    algorithm_name: &str,
    step: &str,
) -> Result<String, String> {
    let (d, p) = load(domain, problem)?;
    let plan = plan_from_json_str(plan, &d, &p).map_err(|e| e.to_string())?;
    let t = parse_templates(templates).map_err(|e| format!("templates: {e}"))?;
    let graph = plan_to_quest(&plan, algorithm(algorithm_name)?).map_err(|e| e.to_string())?;
    let node = resolve_event(&graph, step).map_err(|e| e.to_string())?;
    let pairs: Vec<_> = emit_questionnaire(&graph, Some(&t)).into_iter().filter(|q| q.question_node == node).collect();
    let question = pairs.first().map(|q| q.question.clone()).unwrap_or_default();
    let answers: Vec<_> = pairs.iter().map(|q| json!({"answer": q.answer, "prediction": q.prediction})).collect();
    Ok(json!({"question": question, "answers": answers}).to_string())
}

#[wasm_bindgen]
pub fn examples() -> String {
    examples_json()
}

#[wasm_bindgen]
pub fn plan(domain: &str, problem: &str, rules: &str, algorithm: &str) -> Result<String, JsError> {
    plan_json(domain, problem, rules, algorithm).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn narrate(domain: &str, problem: &str, plan: &str, templates: &str) -> Result<String, JsError> {
    narrate_text(domain, problem, plan, templates).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn why(
    domain: &str,
    problem: &str,
    plan: &str,
    templates: &str,
    algorithm: &str,
    step: &str,
) -> Result<String, JsError> {
    why_json(domain, problem, plan, templates, algorithm, step).map_err(|e| JsError::new(&e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example(name: &str) -> &'static Example {
        EXAMPLES.iter().find(|e| e.name == name).unwrap()
    }

    #[test]
    fn every_example_parses() {
        for e in EXAMPLES {
            load(e.domain, e.problem).unwrap();
            parse_templates(e.templates).unwrap();
        }
        let v: serde_json::Value = serde_json::from_str(&examples_json()).unwrap();
        assert_eq!(v.as_array().unwrap().len(), EXAMPLES.len());
    }

    #[test]
    fn plan_then_narrate_then_why() {
        let e = example("villain");
        let out: serde_json::Value = serde_json::from_str(&plan_json(e.domain, e.problem, e.rules, "ipocl").unwrap()).unwrap();
        assert_eq!(out["steps"].as_array().unwrap().len(), 3);
        let plan = out["plan"].as_str().unwrap();
        let story = narrate_text(e.domain, e.problem, plan, e.templates).unwrap();
        assert!(story.contains("bribes"), "{story}");
        let why: serde_json::Value =
            serde_json::from_str(&why_json(e.domain, e.problem, plan, e.templates, "ipocl", "1").unwrap()).unwrap();
        assert!(!why["answers"].as_array().unwrap().is_empty());
    }

    #[test]
    fn aladdin_plan_answers_the_dragon_question() {
        let e = example("aladdin");
        let why: serde_json::Value = serde_json::from_str(
            &why_json(e.domain, e.problem, e.plan.unwrap(), e.templates, "ipocl", "(slay aladdin dragon mountain)")
                .unwrap(),
        )
        .unwrap();
        assert_eq!(why["question"], "Why did Aladdin slay the dragon?");
        let good = why["answers"]
            .as_array()
            .unwrap()
            .iter()
            .any(|a| a["answer"] == "Because King Jafar ordered Aladdin to get the magic lamp." && a["prediction"] == "good");
        assert!(good, "{why}");
    }

    #[test]
    fn bad_input_is_an_error() {
        assert!(plan_json("(domain", "", "", "pocl").is_err());
        let e = example("courier");
        assert!(plan_json(e.domain, e.problem, "", "strips").is_err());
    }
}
