//! The planning graph: one action unit per plan step, linked by causal arcs
//! from the step that produces a fact to the later steps that require it.
//!
//! Construction follows six steps:
//!
//! 1. create one [`ActionUnit`] per plan step, carrying its start time;
//! 2. fill its requirements from the grounded conditions of every phase;
//! 3. fill its effects from the grounded *positive* effects;
//! 4. for every requirement, link the unit to an earlier unit (strictly
//!    smaller start time) that produces it;
//! 5. drop from every requirement set the initial facts that no action ever
//!    produces (the set `I`);
//! 6. verify that every remaining requirement is linked.
//!
//! When several earlier units produce the same fact, the one with the latest
//! start time wins (latest plan line on ties). A requirement that has no
//! earlier producer but holds in the initial state is satisfied by the
//! initial state and dropped as well; this covers facts such as a robot's
//! starting position that the plan later re-establishes.

mod dot;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;

use crate::pddl::{
    ground_action, Domain, GroundedAction, GroundedPredicate, PddlError, Phase, PlanStep, Problem,
};
use crate::time::Time;

pub use dot::to_dot;

/// Index of an action unit in [`PlanGraph::units`]; printed as `a<index>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct UnitId(pub usize);

impl fmt::Display for UnitId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "a{}", self.0)
    }
}

impl std::str::FromStr for UnitId {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.strip_prefix('a')
            .and_then(|n| n.parse().ok())
            .map(UnitId)
            .ok_or_else(|| format!("invalid action unit id `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GraphError {
    #[error(transparent)]
    Pddl(#[from] PddlError),
    #[error("{unit} {action} requires {predicate}, which no earlier action produces and the initial state does not provide")]
    UnsupportedRequirement {
        unit: UnitId,
        action: String,
        predicate: GroundedPredicate,
    },
    #[error("no action unit {0}")]
    UnknownUnit(UnitId),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActionUnit {
    pub id: UnitId,
    /// Start time according to the plan.
    pub t: Time,
    /// Source line of the plan step.
    pub line: usize,
    pub action: GroundedAction,
    /// Requirements still to be provided by other units.
    pub requirements: BTreeSet<GroundedPredicate>,
    /// Positive effects and the phase in which each is added.
    pub effects: BTreeMap<GroundedPredicate, Phase>,
    /// Requirements satisfied by the initial state because no earlier unit
    /// produces them, although a later one does.
    pub initially_supported: BTreeSet<GroundedPredicate>,
}

impl ActionUnit {
    pub fn produces(&self, fact: &GroundedPredicate) -> bool {
        self.effects.contains_key(fact)
    }

    pub fn label(&self) -> String {
        self.action.label()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CausalArc {
    pub producer: UnitId,
    pub consumer: UnitId,
    pub predicate: GroundedPredicate,
}

/// Steps 1 to 3: ground every plan step into an action unit.
///
/// `plan` is expected in the order produced by
/// [`parse_plan`](crate::pddl::parse_plan), i.e. sorted by start time.
pub fn build_action_units(
    plan: &[PlanStep],
    domain: &Domain,
    problem: &Problem,
) -> Result<Vec<ActionUnit>, GraphError> {
    let mut order: Vec<&PlanStep> = plan.iter().collect();
    order.sort_by(|a, b| a.t.cmp(&b.t).then(a.line.cmp(&b.line)));
    order
        .into_iter()
        .enumerate()
        .map(|(index, step)| {
            let at_line = |e: PddlError| PddlError::AtLine {
                line: step.line,
                source: Box::new(e),
            };
            let schema = domain
                .action(&step.action_name)
                .ok_or_else(|| at_line(PddlError::UnknownAction(step.action_name.clone())))?;
            let action = ground_action(domain, problem, schema, &step.args, Some(step.duration))
                .map_err(at_line)?;
            let mut effects = BTreeMap::new();
            for fact in &action.add_at_start {
                effects.insert(fact.clone(), Phase::AtStart);
            }
            for fact in &action.add_at_end {
                effects.entry(fact.clone()).or_insert(Phase::AtEnd);
            }
            Ok(ActionUnit {
                id: UnitId(index),
                t: step.t,
                line: step.line,
                requirements: action.requirements(),
                effects,
                initially_supported: BTreeSet::new(),
                action,
            })
        })
        .collect()
}

/// The planning graph `<A, C>` plus the pruned initial facts `I`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlanGraph {
    units: Vec<ActionUnit>,
    arcs: BTreeSet<CausalArc>,
    initial_only: BTreeSet<GroundedPredicate>,
    preds: Vec<BTreeSet<UnitId>>,
    succs: Vec<BTreeSet<UnitId>>,
}

/// Steps 4 to 6: link requirements to producers, prune `I`, verify.
pub fn link_graph(mut units: Vec<ActionUnit>, problem: &Problem) -> Result<PlanGraph, GraphError> {
    for (index, unit) in units.iter().enumerate() {
        debug_assert_eq!(unit.id, UnitId(index), "units must be numbered in order");
    }
    let produced: BTreeSet<&GroundedPredicate> =
        units.iter().flat_map(|u| u.effects.keys()).collect();
    let initial_only: BTreeSet<GroundedPredicate> = problem
        .init
        .iter()
        .filter(|f| !produced.contains(f))
        .cloned()
        .collect();

    let mut arcs = BTreeSet::new();
    for i in 0..units.len() {
        let t_i = units[i].t;
        let mut linked = BTreeSet::new();
        let mut from_init = BTreeSet::new();
        for fact in &units[i].requirements {
            if initial_only.contains(fact) {
                continue;
            }
            let producer = (0..i)
                .rev()
                .find(|&j| units[j].t < t_i && units[j].produces(fact));
            match producer {
                Some(j) => {
                    arcs.insert(CausalArc {
                        producer: UnitId(j),
                        consumer: UnitId(i),
                        predicate: fact.clone(),
                    });
                    linked.insert(fact.clone());
                }
                None if problem.init.contains(fact) => {
                    from_init.insert(fact.clone());
                }
                None => {
                    return Err(GraphError::UnsupportedRequirement {
                        unit: UnitId(i),
                        action: units[i].label(),
                        predicate: fact.clone(),
                    })
                }
            }
        }
        let unit = &mut units[i];
        unit.requirements = linked;
        unit.initially_supported = from_init;
    }

    let mut preds = vec![BTreeSet::new(); units.len()];
    let mut succs = vec![BTreeSet::new(); units.len()];
    for arc in &arcs {
        preds[arc.consumer.0].insert(arc.producer);
        succs[arc.producer.0].insert(arc.consumer);
    }
    let graph = PlanGraph {
        units,
        arcs,
        initial_only,
        preds,
        succs,
    };
    graph.verify()?;
    Ok(graph)
}

/// Runs all six steps.
pub fn build_graph(
    plan: &[PlanStep],
    domain: &Domain,
    problem: &Problem,
) -> Result<PlanGraph, GraphError> {
    link_graph(build_action_units(plan, domain, problem)?, problem)
}

impl PlanGraph {
    pub fn units(&self) -> &[ActionUnit] {
        &self.units
    }

    pub fn unit(&self, id: UnitId) -> Result<&ActionUnit, GraphError> {
        self.units.get(id.0).ok_or(GraphError::UnknownUnit(id))
    }

    pub fn arcs(&self) -> &BTreeSet<CausalArc> {
        &self.arcs
    }

    /// Initial facts that no action produces (`I`).
    pub fn initial_only(&self) -> &BTreeSet<GroundedPredicate> {
        &self.initial_only
    }

    pub fn is_empty(&self) -> bool {
        self.units.is_empty()
    }

    /// Distinct units with an arc into `id`.
    pub fn predecessors(&self, id: UnitId) -> Result<&BTreeSet<UnitId>, GraphError> {
        self.preds.get(id.0).ok_or(GraphError::UnknownUnit(id))
    }

    /// Distinct units with an arc out of `id`.
    pub fn successors(&self, id: UnitId) -> Result<&BTreeSet<UnitId>, GraphError> {
        self.succs.get(id.0).ok_or(GraphError::UnknownUnit(id))
    }

    /// `|→a|`: number of distinct producers feeding `id`.
    pub fn in_cardinality(&self, id: UnitId) -> Result<usize, GraphError> {
        self.predecessors(id).map(BTreeSet::len)
    }

    /// `|a→|`: number of distinct consumers fed by `id`.
    pub fn out_cardinality(&self, id: UnitId) -> Result<usize, GraphError> {
        self.successors(id).map(BTreeSet::len)
    }

    /// Units with no remaining requirements; each one starts an execution
    /// flow.
    pub fn roots(&self) -> Vec<&ActionUnit> {
        self.units
            .iter()
            .filter(|u| u.requirements.is_empty())
            .collect()
    }

    /// Arcs arriving at `id`, in predicate order.
    pub fn arcs_into(&self, id: UnitId) -> impl Iterator<Item = &CausalArc> {
        self.arcs.iter().filter(move |a| a.consumer == id)
    }

    /// Step 6 plus the structural invariants the rest of the pipeline relies
    /// on: arcs go strictly forward in time, every requirement is covered by
    /// an incoming arc, and `I` is disjoint from every effect set.
    pub fn verify(&self) -> Result<(), GraphError> {
        for arc in &self.arcs {
            let p = self.unit(arc.producer)?;
            let c = self.unit(arc.consumer)?;
            debug_assert!(p.t < c.t);
            debug_assert!(p.produces(&arc.predicate));
        }
        for unit in &self.units {
            for fact in &unit.requirements {
                let covered = self.arcs_into(unit.id).any(|a| &a.predicate == fact);
                if !covered {
                    return Err(GraphError::UnsupportedRequirement {
                        unit: unit.id,
                        action: unit.label(),
                        predicate: fact.clone(),
                    });
                }
            }
            debug_assert!(unit.effects.keys().all(|f| !self.initial_only.contains(f)));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests;
