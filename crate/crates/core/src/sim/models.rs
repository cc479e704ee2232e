use std::collections::BTreeMap;

use super::SimError;
use crate::bt::BehaviorTree;
use crate::exec::{Engine, ExecutionTrace, SimulatedBackend, TickStatus, WorldState};
use crate::graph::UnitId;
use crate::pddl::{PlanStep, Problem};
use crate::scenario::Scenario;
use crate::time::Time;

fn check_lengths(plan: &[PlanStep], durations: &[Time]) {
    assert_eq!(plan.len(), durations.len(), "one duration per plan step");
}

/// Every action starts at its plan timestamp.
///
/// Fails if a duration exceeds the step's maximum, since the plan's
/// timestamps would then no longer be a valid schedule.
pub fn run_planner_model(
    plan: &[PlanStep],
    durations: &[Time],
) -> Result<ExecutionTrace, SimError> {
    check_lengths(plan, durations);
    let mut intervals = Vec::with_capacity(plan.len());
    for (i, (step, &d)) in plan.iter().zip(durations).enumerate() {
        if d > step.duration {
            return Err(SimError::DurationExceedsMax {
                unit: UnitId(i),
                duration: d,
                max: step.duration,
            });
        }
        intervals.push((UnitId(i), step.label(), step.t, step.t + d));
    }
    Ok(ExecutionTrace::from_intervals(intervals))
}

/// Actions run one after another in plan order, starting at zero.
pub fn run_sequential_model(plan: &[PlanStep], durations: &[Time]) -> ExecutionTrace {
    check_lengths(plan, durations);
    let mut now = Time::ZERO;
    let intervals: Vec<_> = plan
        .iter()
        .zip(durations)
        .enumerate()
        .map(|(i, (step, &d))| {
            let start = now;
            now += d;
            (UnitId(i), step.label(), start, now)
        })
        .collect();
    ExecutionTrace::from_intervals(intervals)
}

/// Runs a compiled tree with the given durations, indexed by unit id.
pub fn run_bt_tree(
    tree: &BehaviorTree,
    problem: &Problem,
    durations: &[Time],
    tick_budget: u64,
) -> Result<ExecutionTrace, SimError> {
    assert_eq!(
        tree.registry().len(),
        durations.len(),
        "one duration per unit"
    );
    let map: BTreeMap<UnitId, Time> = durations
        .iter()
        .enumerate()
        .map(|(i, &d)| (UnitId(i), d))
        .collect();
    let mut engine = Engine::new(
        tree.clone(),
        WorldState::from_problem(problem),
        SimulatedBackend::new(map),
    );
    let trace = engine.run_to_completion(tick_budget)?;
    if trace.final_status == TickStatus::Failure {
        return Err(SimError::ExecutionFailed {
            diagnostics: trace.diagnostics.clone(),
        });
    }
    Ok(trace)
}

/// Compiles the scenario and runs the resulting tree.
pub fn run_bt_model(scenario: &Scenario, durations: &[Time]) -> Result<ExecutionTrace, SimError> {
    let tree = scenario.tree()?;
    run_bt_tree(
        &tree,
        &scenario.problem,
        durations,
        crate::exec::DEFAULT_TICK_BUDGET,
    )
}
