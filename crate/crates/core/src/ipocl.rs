//! Intentionality: frames of commitment, motivation and intent planning.
//!
//! The refinement entry points live on [`crate::pocl::Planner`]; this module
//! holds the frame-specific operations it calls and the completeness test.

use crate::model::{Flaw, Frame, FrameId, Plan, Step, StepId};
use crate::pocl::detect_causal_threats;

/// Creates the frames encoded by `choice` for the new step `id` (see
/// [`crate::pocl::Refinement::Establish`]) and queues their open motivations
/// and any intentional threats. Returns `None` for an out-of-range choice.
pub fn create_frames(plan: &mut Plan, id: StepId, choice: u32) -> Option<()> {
    let step = plan.step(id).clone();
    let Some(schema) = step.schema.clone() else { return Some(()) };
    if step.happening {
        return (choice == 0).then_some(());
    }
    let base = step.effect.len() as u32 + 1;
    let actors = schema.actors.len() as u32;
    if choice >= base.pow(actors) {
        return None;
    }
    let digits: Vec<u32> = (0..actors).map(|i| (choice / base.pow(i)) % base).collect();
    for (i, &d) in digits.iter().enumerate().rev() {
        if d == 0 {
            continue;
        }
        let param = &schema.actors[i];
        let character = step.args[schema.param_index(param)?].as_symbol()?.clone();
        let frame = Frame {
            id: plan.next_frame_id(),
            character,
            goal: step.effect[(d - 1) as usize].clone(),
            interval: vec![id],
            final_step: id,
            motivating_step: None,
        };
        add_frame(plan, frame);
    }
    Some(())
}

/// Adds a frame with its open motivation and intentional-threat flaws.
pub fn add_frame(plan: &mut Plan, frame: Frame) {
    let id = frame.id;
    let condition = frame.motivation_condition();
    let goal = plan.bindings().substitute(&frame.goal);
    let rivals: Vec<FrameId> = plan
        .frames()
        .iter()
        .filter(|f| f.character == frame.character && plan.bindings().substitute(&f.goal).negates(&goal))
        .map(|f| f.id)
        .collect();
    plan.add_frame(frame);
    plan.push_flaw(Flaw::OpenMotivation { frame: id, condition });
    for r in rivals {
        plan.push_flaw(Flaw::IntentionalThreat { first: r, second: id });
    }
}

/// Frames in service of step `s`: those whose final step has a causal link
/// into `s`.
pub fn frames_in_service_of(plan: &Plan, s: StepId) -> Vec<FrameId> {
    let mut out = Vec::new();
    for l in plan.links().iter().filter(|l| l.sink == s) {
        for f in plan.frame_of_final(l.source) {
            if !out.contains(&f.id) {
                out.push(f.id);
            }
        }
    }
    out
}

/// Frames that `s` could join: a frame holding a step that `s` causally
/// supports and whose character performs `s`, or a frame holding a step
/// served by a frame that `s` motivates, again sharing a character with `s`.
pub fn find_adoptable_frames(plan: &Plan, s: StepId) -> Vec<FrameId> {
    let step = plan.step(s);
    if !step.is_ordinary() {
        return Vec::new();
    }
    let mut out = Vec::new();
    let consider = |c: &Frame, out: &mut Vec<FrameId>| {
        if !c.contains(s) && step.has_actor(&c.character) && !out.contains(&c.id) {
            out.push(c.id);
        }
    };
    for l in plan.links().iter().filter(|l| l.source == s) {
        for c in plan.frames_containing(l.sink) {
            consider(c, &mut out);
        }
    }
    for ci in plan.frames().iter().filter(|f| f.motivating_step == Some(s)) {
        for l in plan.links().iter().filter(|l| l.source == ci.final_step) {
            for c in plan.frames_containing(l.sink) {
                if c.id != ci.id {
                    consider(c, &mut out);
                }
            }
        }
    }
    out
}

/// Queues an intent flaw for every adoptable (step, frame) pair not
/// proposed before.
pub fn propose_adoptions(plan: &mut Plan) {
    if plan.frames().is_empty() {
        return;
    }
    let mut pairs = Vec::new();
    for s in plan.ordinary_steps() {
        for c in find_adoptable_frames(plan, s.id) {
            if !plan.is_proposed(s.id, c) {
                pairs.push((s.id, c));
            }
        }
    }
    for (s, c) in pairs {
        plan.propose_intent_flaw(s, c);
    }
}

/// Makes `s` part of frame `c`, ordering it after the frame's motivating
/// step, before its final step, and consistently with frames ordered
/// relative to `c`.
pub fn adopt(plan: &mut Plan, s: StepId, c: FrameId) -> Option<()> {
    let frame = plan.try_frame(c)?.clone();
    if frame.contains(s) {
        return Some(());
    }
    if let Some(m) = frame.motivating_step {
        if !plan.order(m, s) {
            return None;
        }
    }
    if !plan.order(s, frame.final_step) {
        return None;
    }
    let orders: Vec<(FrameId, FrameId)> = plan.frame_orders().to_vec();
    for (a, b) in orders {
        if a == c {
            for t in plan.frame(b).interval.clone() {
                if t != s && !plan.order(s, t) {
                    return None;
                }
            }
        } else if b == c {
            for t in plan.frame(a).interval.clone() {
                if t != s && !plan.order(t, s) {
                    return None;
                }
            }
        }
    }
    plan.frame_mut(c).interval.push(s);
    Some(())
}

/// Orders every step of frame `a` before every step of frame `b`.
pub fn order_frames(plan: &mut Plan, a: FrameId, b: FrameId) -> Option<()> {
    let first = plan.try_frame(a)?.interval.clone();
    let second = plan.try_frame(b)?.interval.clone();
    for &x in &first {
        for &y in &second {
            if x == y || !plan.order(x, y) {
                return None;
            }
        }
    }
    plan.record_frame_order(a, b);
    Some(())
}

/// Same-character frame pairs with negating goals.
pub fn detect_intentional_threats(plan: &Plan) -> Vec<Flaw> {
    let frames = plan.frames();
    let mut out = Vec::new();
    for (i, a) in frames.iter().enumerate() {
        for b in &frames[i + 1..] {
            if a.character == b.character
                && plan.bindings().substitute(&a.goal).negates(&plan.bindings().substitute(&b.goal))
            {
                out.push(Flaw::IntentionalThreat { first: a.id, second: b.id });
            }
        }
    }
    out
}

/// Non-happening ordinary steps outside every frame interval.
pub fn orphans(plan: &Plan) -> Vec<&Step> {
    plan.ordinary_steps()
        .filter(|s| !s.happening && !plan.frames().iter().any(|f| f.contains(s.id)))
        .collect()
}

/// No pending flaws, consistent, no causal threats and no orphans.
pub fn ipocl_complete(plan: &Plan) -> bool {
    plan.flaws().is_empty() && plan.is_consistent() && orphans(plan).is_empty() && detect_causal_threats(plan).is_empty()
}
