//! Behavior trees compiled from a planning graph.
//!
//! A tree holds two things: the control structure (`root`), whose leaves are
//! [`BtNode::Action`] and [`BtNode::WaitFor`] references to action units, and
//! a registry with exactly one [`ActionInstance`] per unit. Every `Action`
//! leaf naming the same unit refers to the same instance, so an action runs
//! at most once however many branches reach it.

mod build;
mod expand;
mod xml;

use std::collections::{BTreeMap, BTreeSet};

use crate::graph::{ActionUnit, GraphError, UnitId};
use crate::pddl::{GroundedPredicate, Phase, Polarity};
use crate::time::Time;

pub use build::{build_tree, get_tree};
pub use expand::expand_action;
pub use xml::{from_xml, to_xml};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BtNode {
    /// Ticks one child per tick, left to right, remembering progress.
    Sequence(Vec<BtNode>),
    /// Ticks every child that has not yet succeeded.
    Parallel(Vec<BtNode>),
    /// Conjunction over the world state: every predicate holds (positive) or
    /// none does (negative).
    Condition {
        predicates: BTreeSet<GroundedPredicate>,
        polarity: Polarity,
    },
    /// RUNNING until the unit has succeeded.
    WaitFor(UnitId),
    /// Reference to the unit's singleton instance.
    Action(UnitId),
    ApplyEffects {
        unit: UnitId,
        phase: Phase,
    },
    /// Runs the unit on the action backend and guards its `over all`
    /// conditions while it runs.
    Execute(UnitId),
}

impl BtNode {
    pub fn kind(&self) -> &'static str {
        match self {
            BtNode::Sequence(_) => "Sequence",
            BtNode::Parallel(_) => "Parallel",
            BtNode::Condition { .. } => "Condition",
            BtNode::WaitFor(_) => "WaitFor",
            BtNode::Action(_) => "Action",
            BtNode::ApplyEffects { .. } => "ApplyEffects",
            BtNode::Execute(_) => "Execute",
        }
    }

    pub fn children(&self) -> &[BtNode] {
        match self {
            BtNode::Sequence(c) | BtNode::Parallel(c) => c,
            _ => &[],
        }
    }

    /// Pre-order traversal.
    pub fn walk<'a>(&'a self, visit: &mut impl FnMut(&'a BtNode)) {
        visit(self);
        for child in self.children() {
            child.walk(visit);
        }
    }

    /// Number of nodes in the subtree.
    pub fn size(&self) -> usize {
        let mut n = 0;
        self.walk(&mut |_| n += 1);
        n
    }

    /// The unit a leaf refers to, if any.
    pub fn unit(&self) -> Option<UnitId> {
        match self {
            BtNode::WaitFor(u)
            | BtNode::Action(u)
            | BtNode::ApplyEffects { unit: u, .. }
            | BtNode::Execute(u) => Some(*u),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ActionStatus {
    Idle,
    Running,
    Succeeded,
    Failed,
}

impl ActionStatus {
    pub fn is_terminal(self) -> bool {
        matches!(self, ActionStatus::Succeeded | ActionStatus::Failed)
    }
}

/// The singleton `S(a)` of one action unit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActionInstance {
    pub unit: ActionUnit,
    /// The per-action subtree ticked in place of every `Action` leaf.
    pub expansion: BtNode,
    status: ActionStatus,
    start_time: Option<Time>,
    end_time: Option<Time>,
}

impl ActionInstance {
    pub fn new(unit: ActionUnit) -> ActionInstance {
        ActionInstance {
            expansion: expand_action(&unit),
            unit,
            status: ActionStatus::Idle,
            start_time: None,
            end_time: None,
        }
    }

    pub fn id(&self) -> UnitId {
        self.unit.id
    }

    pub fn status(&self) -> ActionStatus {
        self.status
    }

    pub fn start_time(&self) -> Option<Time> {
        self.start_time
    }

    pub fn end_time(&self) -> Option<Time> {
        self.end_time
    }

    /// Moves along `Idle → Running → Succeeded | Failed`; `Idle → Failed` is
    /// allowed for actions whose start conditions fail. Returns whether the
    /// status changed.
    ///
    /// # Panics
    /// On any other transition.
    pub fn transition(&mut self, next: ActionStatus) -> bool {
        use ActionStatus::*;
        let legal = matches!(
            (self.status, next),
            (Idle, Running) | (Idle, Failed) | (Running, Succeeded) | (Running, Failed)
        );
        if self.status == next {
            return false;
        }
        assert!(
            legal,
            "illegal transition {:?} -> {next:?} for {}",
            self.status, self.unit.id
        );
        self.status = next;
        true
    }

    pub(crate) fn mark_started(&mut self, now: Time) {
        debug_assert!(self.start_time.is_none());
        self.start_time = Some(now);
    }

    pub(crate) fn mark_ended(&mut self, now: Time) {
        debug_assert!(self.end_time.is_none());
        self.end_time = Some(now);
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum BtError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("internal error: {0}")]
    Internal(String),
    #[error("malformed tree XML: {0}")]
    Syntax(String),
    #[error("unknown node kind <{0}>")]
    UnknownNodeKind(String),
    #[error("tree refers to unknown action unit `{0}`")]
    DanglingActionId(String),
    #[error("invalid tree: {0}")]
    Invalid(String),
}

/// Control structure plus singleton registry.
///
/// `root` is `None` for an empty plan; such a tree succeeds on its first
/// tick.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BehaviorTree {
    pub root: Option<BtNode>,
    registry: BTreeMap<UnitId, ActionInstance>,
}

impl BehaviorTree {
    /// Assembles a tree from a hand-built control structure. Every unit gets
    /// a fresh instance with its standard expansion.
    pub fn new(
        root: Option<BtNode>,
        units: impl IntoIterator<Item = ActionUnit>,
    ) -> Result<BehaviorTree, BtError> {
        let registry = units
            .into_iter()
            .map(|u| (u.id, ActionInstance::new(u)))
            .collect();
        BehaviorTree::from_parts(root, registry)
    }

    pub(crate) fn from_parts(
        root: Option<BtNode>,
        registry: BTreeMap<UnitId, ActionInstance>,
    ) -> Result<BehaviorTree, BtError> {
        let tree = BehaviorTree { root, registry };
        tree.validate()?;
        Ok(tree)
    }

    pub fn registry(&self) -> &BTreeMap<UnitId, ActionInstance> {
        &self.registry
    }

    pub fn instance(&self, id: UnitId) -> Option<&ActionInstance> {
        self.registry.get(&id)
    }

    pub(crate) fn instance_mut(&mut self, id: UnitId) -> Option<&mut ActionInstance> {
        self.registry.get_mut(&id)
    }

    pub fn is_empty(&self) -> bool {
        self.root.is_none()
    }

    /// Number of `Action` leaves in the control structure.
    pub fn action_refs(&self) -> usize {
        self.count(|n| matches!(n, BtNode::Action(_)))
    }

    /// Number of `WaitFor` leaves in the control structure.
    pub fn waits(&self) -> usize {
        self.count(|n| matches!(n, BtNode::WaitFor(_)))
    }

    fn count(&self, pred: impl Fn(&BtNode) -> bool) -> usize {
        let mut n = 0;
        if let Some(root) = &self.root {
            root.walk(&mut |node| n += usize::from(pred(node)));
        }
        n
    }

    /// Checks the structural invariants: control nodes have children, every
    /// referenced unit is registered, expansions only refer to their own
    /// unit and contain no control references to other units.
    pub fn validate(&self) -> Result<(), BtError> {
        let check = |node: &BtNode, owner: Option<UnitId>| -> Result<(), BtError> {
            let mut result = Ok(());
            node.walk(&mut |n| {
                if result.is_err() {
                    return;
                }
                if matches!(n, BtNode::Sequence(c) | BtNode::Parallel(c) if c.is_empty()) {
                    result = Err(BtError::Invalid(format!("empty {}", n.kind())));
                } else if let Some(u) = n.unit() {
                    if !self.registry.contains_key(&u) {
                        result = Err(BtError::DanglingActionId(u.to_string()));
                    } else if let Some(owner) = owner {
                        if u != owner || matches!(n, BtNode::Action(_) | BtNode::WaitFor(_)) {
                            result = Err(BtError::Invalid(format!(
                                "expansion of {owner} contains {} {u}",
                                n.kind()
                            )));
                        }
                    } else if matches!(n, BtNode::ApplyEffects { .. } | BtNode::Execute(_)) {
                        result = Err(BtError::Invalid(format!(
                            "{} {u} outside an action expansion",
                            n.kind()
                        )));
                    }
                }
            });
            result
        };
        if let Some(root) = &self.root {
            check(root, None)?;
        }
        for (id, inst) in &self.registry {
            if inst.unit.id != *id {
                return Err(BtError::Invalid(format!(
                    "registry key {id} holds {}",
                    inst.unit.id
                )));
            }
            check(&inst.expansion, Some(*id))?;
        }
        Ok(())
    }
}
