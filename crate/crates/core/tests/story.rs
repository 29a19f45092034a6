mod common;

use common::*;
use fabula::narrate::{render, UnitKind};
use fabula::pocl::Algorithm;
use fabula::quest::{emit_questionnaire, plan_to_quest, predict_goa, questionnaire_csv, Goa};

#[test]
fn aladdin_story_reads_in_plan_order() {
    let (_, p) = aladdin();
    let plan = aladdin_plan();
    let story = render(&plan, &aladdin_templates(), &p).unwrap();
    assert_eq!(story.count(UnitKind::Event), 13);
    let text = story.text();
    for s in [
        "King Jafar orders Aladdin to get the magic lamp for him.",
        "Aladdin slays the dragon.",
        "The genie casts a spell on Jasmine making her fall in love with King Jafar.",
        "King Jafar and Jasmine wed in an extravagant ceremony.",
    ] {
        assert!(text.contains(s), "{s}");
    }
    let slay = text.find("Aladdin slays the dragon.").unwrap();
    let give = text.find("Aladdin hands the magic lamp to King Jafar.").unwrap();
    assert!(slay < give);
}

#[test]
fn micro_stories_render() {
    for m in MICRO {
        let (d, p) = micro(m);
        let plan = fabula::search::plan_search(&d, &p, &fabula::search::SearchConfig::new(Algorithm::Ipocl))
            .outcome
            .unwrap();
        let story = render(&plan, &micro_templates(m), &p).unwrap();
        assert_eq!(story.count(UnitKind::Event), plan.ordinary_count(), "{m}");
    }
}

#[test]
fn dragon_question_predictions() {
    let graph = plan_to_quest(&aladdin_plan(), Algorithm::Ipocl).unwrap();
    let q = graph.find_event("(slay aladdin dragon mountain)").unwrap();
    let order = graph.find_event("(order jafar aladdin castle (has jafar lamp))").unwrap();
    let lamp = graph.find_goal("aladdin", "(has jafar lamp)").unwrap();
    let love = graph.find_goal("genie", "(loves jasmine jafar)").unwrap();
    assert_eq!(predict_goa(&graph, q, order).unwrap(), Goa::Good);
    assert_eq!(predict_goa(&graph, q, lamp).unwrap(), Goa::Good);
    assert_eq!(predict_goa(&graph, q, love).unwrap(), Goa::Poor);
}

#[test]
fn questionnaire_is_stable() {
    let plan = aladdin_plan();
    let graph = plan_to_quest(&plan, Algorithm::Ipocl).unwrap();
    let t = aladdin_templates();
    let pairs = emit_questionnaire(&graph, Some(&t));
    assert_eq!(pairs.len(), 107);
    let csv = questionnaire_csv(&pairs).unwrap();
    assert_eq!(csv.lines().count(), 108);
    assert_eq!(csv, questionnaire_csv(&emit_questionnaire(&graph, Some(&t))).unwrap());
    let (d, p) = micro("villain");
    let causal = fabula::search::plan_search(&d, &p, &fabula::search::SearchConfig::new(Algorithm::Pocl))
        .outcome
        .unwrap();
    assert!(emit_questionnaire(&plan_to_quest(&causal, Algorithm::Pocl).unwrap(), None).is_empty());
}
