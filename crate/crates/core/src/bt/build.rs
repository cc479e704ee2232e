use std::collections::{BTreeMap, BTreeSet};

use super::{ActionInstance, BehaviorTree, BtError, BtNode};
use crate::graph::{PlanGraph, UnitId};

/// Compiles a verified planning graph into a behavior tree.
///
/// Each unit without requirements starts an execution flow; several flows
/// run under a `Parallel` root. Units reached from more than one flow appear
/// once per path but share one registry instance.
pub fn build_tree(graph: &PlanGraph) -> Result<BehaviorTree, BtError> {
    let flows: Vec<UnitId> = graph.roots().iter().map(|u| u.id).collect();
    let root = match flows.as_slice() {
        [] if graph.is_empty() => None,
        [] => return Err(BtError::Internal("non-empty graph without a root".into())),
        [only] => Some(get_tree(graph, *only, &BTreeSet::new())?),
        _ => Some(BtNode::Parallel(
            flows
                .iter()
                .map(|&a| get_tree(graph, a, &BTreeSet::new()))
                .collect::<Result<_, _>>()?,
        )),
    };

    let mut registry = BTreeMap::new();
    if let Some(root) = &root {
        root.walk(&mut |node| {
            if let BtNode::Action(id) = node {
                registry
                    .entry(*id)
                    .or_insert_with(|| ActionInstance::new(graph.units()[id.0].clone()));
            }
        });
    }
    if registry.len() != graph.units().len() {
        return Err(BtError::Internal(format!(
            "{} of {} units reachable from the flows",
            registry.len(),
            graph.units().len()
        )));
    }
    BehaviorTree::from_parts(root, registry)
}

/// The subtree rooted at unit `a`, given the units `us` already executed
/// earlier on the same path.
///
/// Predecessors of `a` outside `us` become `WaitFor` nodes in front of the
/// action. `us` is extended only for the recursive calls below `a`, so
/// sibling branches never rely on each other's progress.
pub fn get_tree(graph: &PlanGraph, a: UnitId, us: &BTreeSet<UnitId>) -> Result<BtNode, BtError> {
    if us.contains(&a) {
        return Err(BtError::Internal(format!("{a} revisited on its own path")));
    }
    let mut children: Vec<BtNode> = graph
        .predecessors(a)?
        .iter()
        .filter(|p| !us.contains(p))
        .map(|&p| BtNode::WaitFor(p))
        .collect();
    children.push(BtNode::Action(a));

    let succs = graph.successors(a)?;
    if succs.is_empty() && children.len() == 1 {
        return Ok(BtNode::Action(a));
    }
    let mut below = us.clone();
    below.insert(a);
    match succs.len() {
        0 => {}
        1 => {
            let only = *succs.iter().next().expect("one successor");
            children.push(get_tree(graph, only, &below)?);
        }
        _ => children.push(BtNode::Parallel(
            succs
                .iter()
                .map(|&s| get_tree(graph, s, &below))
                .collect::<Result<_, _>>()?,
        )),
    }
    Ok(BtNode::Sequence(children))
}
