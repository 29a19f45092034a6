use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures").join(name).to_string_lossy().into_owned()
}

fn fabula(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fabula")).args(args).output().unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("fabula-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn plans_the_villain_world() {
    let out = fabula(&[
        "plan",
        "--domain",
        &fixture("micro/villain.domain"),
        "--problem",
        &fixture("micro/villain.problem"),
        "--format",
        "text",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("bribe"));
    assert!(text.contains("coerce"));
}

#[test]
fn parse_errors_exit_2() {
    let bad = scratch("bad.domain");
    std::fs::write(&bad, "(domain broken (action").unwrap();
    let out = fabula(&["plan", "--domain", bad.to_str().unwrap(), "--problem", &fixture("micro/villain.problem")]);
    assert_eq!(out.status.code(), Some(2));
    let out = fabula(&["plan", "--domain", "/nonexistent.domain", "--problem", &fixture("micro/villain.problem")]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unsolvable_problem_exits_3() {
    let p = scratch("stuck.problem");
    std::fs::write(&p, "(problem stuck :init ((character ann) (place north) (at ann north)) :goal ((not (at ann north))))")
        .unwrap();
    let out = fabula(&["plan", "--domain", &fixture("micro/courier.domain"), "--problem", p.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn node_limit_exits_4() {
    let out = fabula(&[
        "plan",
        "--domain",
        &fixture("aladdin.domain"),
        "--problem",
        &fixture("aladdin.problem"),
        "--max-nodes",
        "50",
    ]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn reference_plan_validates() {
    let out = fabula(&[
        "validate",
        &fixture("aladdin-plan.json"),
        "--domain",
        &fixture("aladdin.domain"),
        "--problem",
        &fixture("aladdin.problem"),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
}

#[test]
fn cyclic_plan_fails_validation() {
    let text = std::fs::read_to_string(fixture("aladdin-plan.json")).unwrap();
    let mut doc: serde_json::Value = serde_json::from_str(&text).unwrap();
    let orderings = doc["orderings"].as_array_mut().unwrap();
    let first = orderings[0].clone();
    orderings.push(serde_json::json!([first[1], first[0]]));
    let path = scratch("cyclic.json");
    std::fs::write(&path, serde_json::to_string(&doc).unwrap()).unwrap();
    let out = fabula(&[
        "validate",
        path.to_str().unwrap(),
        "--domain",
        &fixture("aladdin.domain"),
        "--problem",
        &fixture("aladdin.problem"),
    ]);
    assert_eq!(out.status.code(), Some(5));
    let msg = String::from_utf8_lossy(&out.stdout).to_string() + &String::from_utf8_lossy(&out.stderr);
    assert!(msg.contains("cycl"), "{msg}");
}

#[test]
fn narrate_and_quest_on_reference_plan() {
    let common = ["--domain", &fixture("aladdin.domain"), "--problem", &fixture("aladdin.problem")].map(String::from);
    let plan = fixture("aladdin-plan.json");
    let tmpl = fixture("aladdin.tmpl");
    let mut args = vec!["narrate", &plan, "--templates", &tmpl];
    args.extend(common.iter().map(String::as_str));
    let out = fabula(&args);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("Aladdin slays the dragon."));
    let mut args = vec!["quest", &plan];
    args.extend(common.iter().map(String::as_str));
    let out = fabula(&args);
    assert_eq!(out.status.code(), Some(0));
    let graph: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(graph["nodes"].as_array().is_some_and(|n| !n.is_empty()));
}

#[test]
fn oracle_lists_sequences() {
    let out = fabula(&[
        "oracle",
        "--domain",
        &fixture("micro/courier.domain"),
        "--problem",
        &fixture("micro/courier.problem"),
        "--max-depth",
        "4",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("pick-up"));
}
