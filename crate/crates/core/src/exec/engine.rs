use std::collections::{BTreeMap, BTreeSet};

use super::{ActionBackend, EventKind, ExecutionTrace, Progress, TickStatus, WorldState};
use crate::bt::{ActionStatus, BehaviorTree, BtNode};
use crate::graph::UnitId;
use crate::pddl::{GroundedPredicate, Phase, Polarity};
use crate::time::Time;

/// Generous enough for plans with tens of thousands of actions.
pub const DEFAULT_TICK_BUDGET: u64 = 10_000_000;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ExecError {
    #[error("deadlock at t={}: no action can progress; unfinished: {}", clock.fixed3(), list(waiting))]
    Deadlock {
        clock: Time,
        waiting: Vec<UnitId>,
        trace: Box<ExecutionTrace>,
    },
    #[error("tick budget of {0} exhausted")]
    BudgetExhausted(u64),
}

fn list(ids: &[UnitId]) -> String {
    ids.iter()
        .map(UnitId::to_string)
        .collect::<Vec<_>>()
        .join(", ")
}

enum Flat {
    Sequence(Vec<usize>),
    Parallel(Vec<usize>),
    Condition {
        predicates: BTreeSet<GroundedPredicate>,
        polarity: Polarity,
        owner: Option<UnitId>,
    },
    Wait(UnitId),
    Action(UnitId),
    Apply(UnitId, Phase),
    Execute(UnitId),
}

struct Slot {
    node: Flat,
    cursor: usize,
    succeeded: bool,
}

struct Runtime {
    expansion: usize,
    last_tick: u64,
    cached: TickStatus,
    dispatched: bool,
}

/// Ticks one behavior tree against one world state and one backend.
///
/// Control nodes keep their progress between ticks: a `Sequence` resumes at
/// its current child and a `Parallel` skips children that have succeeded.
/// Each singleton instance is ticked at most once per tick; further
/// references within the same tick observe the cached status.
pub struct Engine<B> {
    tree: BehaviorTree,
    world: WorldState,
    backend: B,
    trace: ExecutionTrace,
    slots: Vec<Slot>,
    root: Option<usize>,
    runtime: BTreeMap<UnitId, Runtime>,
    ticks: u64,
    progress: bool,
    failed: bool,
    outcome: Option<TickStatus>,
}

impl<B: ActionBackend> Engine<B> {
    pub fn new(tree: BehaviorTree, world: WorldState, backend: B) -> Engine<B> {
        let mut slots = Vec::new();
        let root = tree.root.as_ref().map(|r| flatten(&mut slots, r, None));
        let runtime = tree
            .registry()
            .iter()
            .map(|(id, inst)| {
                let expansion = flatten(&mut slots, &inst.expansion, Some(*id));
                (
                    *id,
                    Runtime {
                        expansion,
                        last_tick: 0,
                        cached: TickStatus::Running,
                        dispatched: false,
                    },
                )
            })
            .collect();
        Engine {
            tree,
            world,
            backend,
            trace: ExecutionTrace::default(),
            slots,
            root,
            runtime,
            ticks: 0,
            progress: false,
            failed: false,
            outcome: None,
        }
    }

    pub fn tree(&self) -> &BehaviorTree {
        &self.tree
    }

    pub fn world(&self) -> &WorldState {
        &self.world
    }

    pub fn world_mut(&mut self) -> &mut WorldState {
        &mut self.world
    }

    pub fn backend(&self) -> &B {
        &self.backend
    }

    pub fn backend_mut(&mut self) -> &mut B {
        &mut self.backend
    }

    pub fn trace(&self) -> &ExecutionTrace {
        &self.trace
    }

    pub fn clock(&self) -> Time {
        self.world.clock
    }

    pub fn ticks(&self) -> u64 {
        self.ticks
    }

    /// Whether the last tick changed any node, instance or fact.
    pub fn made_progress(&self) -> bool {
        self.progress
    }

    pub fn status(&self, unit: UnitId) -> Option<ActionStatus> {
        self.tree.instance(unit).map(|i| i.status())
    }

    /// Moves the clock forward. Used by step-by-step drivers.
    pub fn advance_to(&mut self, time: Time) {
        assert!(time >= self.world.clock, "clock moves forward only");
        self.world.clock = time;
    }

    /// Propagates one tick from the root. After the tree has returned
    /// SUCCESS or FAILURE further ticks return the same status.
    pub fn tick(&mut self) -> TickStatus {
        if let Some(done) = self.outcome {
            self.progress = false;
            return done;
        }
        self.ticks += 1;
        self.progress = false;
        let status = match self.root {
            None => TickStatus::Success,
            Some(root) => self.tick_node(root),
        };
        let status = if self.failed {
            TickStatus::Failure
        } else {
            status
        };
        if status != TickStatus::Running {
            self.outcome = Some(status);
            self.trace.final_status = status;
        }
        status
    }

    /// Ticks until the tree finishes. Between ticks that change nothing the
    /// clock jumps to the backend's next completion.
    pub fn run_to_completion(&mut self, tick_budget: u64) -> Result<ExecutionTrace, ExecError> {
        assert!(tick_budget > 0, "tick budget must be positive");
        for _ in 0..tick_budget {
            if self.tick() != TickStatus::Running {
                return Ok(self.trace.clone());
            }
            if self.progress {
                continue;
            }
            match self.backend.next_completion() {
                Some(t) if t > self.world.clock => self.world.clock = t,
                _ => {
                    let waiting = self
                        .tree
                        .registry()
                        .values()
                        .filter(|i| !i.status().is_terminal())
                        .map(|i| i.id())
                        .collect();
                    return Err(ExecError::Deadlock {
                        clock: self.world.clock,
                        waiting,
                        trace: Box::new(self.trace.clone()),
                    });
                }
            }
        }
        Err(ExecError::BudgetExhausted(tick_budget))
    }

    pub fn into_parts(self) -> (BehaviorTree, WorldState, B, ExecutionTrace) {
        (self.tree, self.world, self.backend, self.trace)
    }

    fn tick_node(&mut self, index: usize) -> TickStatus {
        let status = match &self.slots[index].node {
            Flat::Sequence(children) => {
                let children = children.clone();
                let cursor = self.slots[index].cursor;
                match self.tick_node(children[cursor]) {
                    TickStatus::Success => {
                        self.slots[index].cursor += 1;
                        self.progress = true;
                        if cursor + 1 == children.len() {
                            TickStatus::Success
                        } else {
                            TickStatus::Running
                        }
                    }
                    other => other,
                }
            }
            Flat::Parallel(children) => {
                let children = children.clone();
                let mut failed = false;
                let mut all_done = true;
                for child in children {
                    if self.slots[child].succeeded {
                        continue;
                    }
                    match self.tick_node(child) {
                        TickStatus::Success => self.progress = true,
                        TickStatus::Failure => failed = true,
                        TickStatus::Running => all_done = false,
                    }
                }
                if failed {
                    TickStatus::Failure
                } else if all_done {
                    TickStatus::Success
                } else {
                    TickStatus::Running
                }
            }
            Flat::Condition {
                predicates,
                polarity,
                owner,
            } => {
                if self.world.check(predicates, *polarity) {
                    TickStatus::Success
                } else {
                    let msg = violated(&self.world, predicates, *polarity);
                    let who = owner.map(|o| format!("{o} ")).unwrap_or_default();
                    self.diagnose(format!("{who}condition failed: {msg}"));
                    TickStatus::Failure
                }
            }
            Flat::Wait(unit) => match self.tree.instance(*unit).map(|i| i.status()) {
                Some(ActionStatus::Succeeded) => TickStatus::Success,
                Some(ActionStatus::Failed) => TickStatus::Failure,
                _ => TickStatus::Running,
            },
            Flat::Action(unit) => self.tick_instance(*unit),
            Flat::Apply(unit, phase) => {
                let (unit, phase) = (*unit, *phase);
                let action = &self
                    .tree
                    .instance(unit)
                    .expect("validated tree")
                    .unit
                    .action;
                self.world
                    .apply(action.additions(phase), action.deletions(phase));
                self.progress = true;
                TickStatus::Success
            }
            Flat::Execute(unit) => self.tick_execute(*unit),
        };
        if status == TickStatus::Success {
            self.slots[index].succeeded = true;
        }
        status
    }

    fn tick_instance(&mut self, unit: UnitId) -> TickStatus {
        let status = self.tree.instance(unit).expect("validated tree").status();
        match status {
            ActionStatus::Succeeded => return TickStatus::Success,
            ActionStatus::Failed => return TickStatus::Failure,
            _ => {}
        }
        let rt = &self.runtime[&unit];
        if rt.last_tick == self.ticks {
            return rt.cached;
        }
        let expansion = rt.expansion;
        if status == ActionStatus::Idle {
            self.instance(unit).transition(ActionStatus::Running);
            self.progress = true;
        }
        let result = self.tick_node(expansion);
        let clock = self.world.clock;
        match result {
            TickStatus::Success => {
                let inst = self.instance(unit);
                inst.transition(ActionStatus::Succeeded);
                inst.mark_ended(clock);
                let label = inst.unit.label();
                self.trace.push(clock, unit, label, EventKind::End);
                self.progress = true;
            }
            TickStatus::Failure => {
                let inst = self.instance(unit);
                inst.transition(ActionStatus::Failed);
                let label = inst.unit.label();
                self.trace.push(clock, unit, label, EventKind::Fail);
                self.failed = true;
                self.progress = true;
            }
            TickStatus::Running => {}
        }
        let rt = self.runtime.get_mut(&unit).expect("runtime per instance");
        rt.last_tick = self.ticks;
        rt.cached = result;
        result
    }

    fn tick_execute(&mut self, unit: UnitId) -> TickStatus {
        let clock = self.world.clock;
        let rt = self.runtime.get_mut(&unit).expect("runtime per instance");
        if !rt.dispatched {
            rt.dispatched = true;
            self.progress = true;
            let inst = self.tree.instance_mut(unit).expect("validated tree");
            if let Err(e) = self.backend.start(&inst.unit, clock) {
                self.diagnose(format!("{unit} backend error: {e}"));
                return TickStatus::Failure;
            }
            inst.mark_started(clock);
            let label = inst.unit.label();
            self.trace.push(clock, unit, label, EventKind::Start);
            return self.guard_over_all(unit).unwrap_or(TickStatus::Running);
        }
        if let Some(fail) = self.guard_over_all(unit) {
            return fail;
        }
        let inst = self.tree.instance(unit).expect("validated tree");
        match self.backend.poll(&inst.unit, clock) {
            Ok(Progress::Finished) => {
                self.progress = true;
                TickStatus::Success
            }
            Ok(Progress::Running) => TickStatus::Running,
            Err(e) => {
                self.diagnose(format!("{unit} backend error: {e}"));
                TickStatus::Failure
            }
        }
    }

    /// `Some(FAILURE)` when an `over all` condition of a running action no
    /// longer holds.
    fn guard_over_all(&mut self, unit: UnitId) -> Option<TickStatus> {
        let action = &self
            .tree
            .instance(unit)
            .expect("validated tree")
            .unit
            .action;
        let msg = [
            (&action.req_over_all, Polarity::Positive),
            (&action.neg_over_all, Polarity::Negative),
        ]
        .into_iter()
        .find(|(set, polarity)| !self.world.check(*set, *polarity))
        .map(|(set, polarity)| violated(&self.world, set, polarity))?;
        self.diagnose(format!("{unit} over all condition violated: {msg}"));
        Some(TickStatus::Failure)
    }

    fn instance(&mut self, unit: UnitId) -> &mut crate::bt::ActionInstance {
        self.tree.instance_mut(unit).expect("validated tree")
    }

    fn diagnose(&mut self, message: String) {
        log::debug!("t={}: {message}", self.world.clock.fixed3());
        self.trace
            .diagnostics
            .push(format!("t={}: {message}", self.world.clock.fixed3()));
    }
}

fn violated(
    world: &WorldState,
    predicates: &BTreeSet<GroundedPredicate>,
    polarity: Polarity,
) -> String {
    let want = polarity == Polarity::Positive;
    predicates
        .iter()
        .filter(|p| world.facts.contains(*p) != want)
        .map(|p| {
            if want {
                format!("{p} is false")
            } else {
                format!("{p} is true")
            }
        })
        .collect::<Vec<_>>()
        .join(", ")
}

fn flatten(slots: &mut Vec<Slot>, node: &BtNode, owner: Option<UnitId>) -> usize {
    let flat = match node {
        BtNode::Sequence(children) | BtNode::Parallel(children) => {
            let ids = children.iter().map(|c| flatten(slots, c, owner)).collect();
            if matches!(node, BtNode::Sequence(_)) {
                Flat::Sequence(ids)
            } else {
                Flat::Parallel(ids)
            }
        }
        BtNode::Condition {
            predicates,
            polarity,
        } => Flat::Condition {
            predicates: predicates.clone(),
            polarity: *polarity,
            owner,
        },
        BtNode::WaitFor(u) => Flat::Wait(*u),
        BtNode::Action(u) => Flat::Action(*u),
        BtNode::ApplyEffects { unit, phase } => Flat::Apply(*unit, *phase),
        BtNode::Execute(u) => Flat::Execute(*u),
    };
    slots.push(Slot {
        node: flat,
        cursor: 0,
        succeeded: false,
    });
    slots.len() - 1
}
