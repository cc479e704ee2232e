use std::collections::BTreeSet;

use super::BtNode;
use crate::graph::ActionUnit;
use crate::pddl::{GroundedPredicate, Phase, Polarity};

fn condition(parts: &[&BTreeSet<GroundedPredicate>], polarity: Polarity) -> Option<BtNode> {
    let predicates: BTreeSet<_> = parts.iter().flat_map(|s| s.iter().cloned()).collect();
    (!predicates.is_empty()).then_some(BtNode::Condition {
        predicates,
        polarity,
    })
}

/// The subtree that runs one action unit:
///
/// ```text
/// Sequence(
///     Condition(at start ∪ over all, +), Condition(at start ∪ over all, -),
///     ApplyEffects(at start),
///     Execute,
///     Condition(at end, +), Condition(at end, -),
///     ApplyEffects(at end))
/// ```
///
/// Conditions and effect nodes with nothing to check or apply are left out;
/// an action with neither expands to a bare `Execute`.
pub fn expand_action(unit: &ActionUnit) -> BtNode {
    let a = &unit.action;
    let id = unit.id;
    let has_effects = |phase| !a.additions(phase).is_empty() || !a.deletions(phase).is_empty();

    let mut children = Vec::new();
    children.extend(condition(
        &[&a.req_at_start, &a.req_over_all],
        Polarity::Positive,
    ));
    children.extend(condition(
        &[&a.neg_at_start, &a.neg_over_all],
        Polarity::Negative,
    ));
    if has_effects(Phase::AtStart) {
        children.push(BtNode::ApplyEffects {
            unit: id,
            phase: Phase::AtStart,
        });
    }
    children.push(BtNode::Execute(id));
    children.extend(condition(&[&a.req_at_end], Polarity::Positive));
    children.extend(condition(&[&a.neg_at_end], Polarity::Negative));
    if has_effects(Phase::AtEnd) {
        children.push(BtNode::ApplyEffects {
            unit: id,
            phase: Phase::AtEnd,
        });
    }
    if children.len() == 1 {
        children.pop().expect("one child")
    } else {
        BtNode::Sequence(children)
    }
}
