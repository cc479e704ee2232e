//! Repeated seeded runs of three execution models on shared sampled
//! durations:
//!
//! * **planner**: every action starts at its plan timestamp;
//! * **sequential**: actions run back to back in plan order;
//! * **bt**: the compiled behavior tree starts each action as soon as its
//!   producers have finished.
//!
//! Makespan is measured from the first start to the last end. Occupancy is
//! the share of that span with exactly `k` actions running.

mod experiment;
mod metrics;
mod models;
mod sampling;

use crate::bt::BtError;
use crate::exec::ExecError;
use crate::graph::{GraphError, UnitId};
use crate::time::Time;

pub use experiment::{
    run_experiment, Compiled, Executor, ExecutorSummary, ExperimentConfig, IterationResult,
    RunReport,
};
pub use metrics::{occupancy, Occupancy};
pub use models::{run_bt_model, run_bt_tree, run_planner_model, run_sequential_model};
pub use sampling::{
    iteration_rng, iteration_seed, sample_duration, sample_durations, DurationModel, EPSILON,
};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SimError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Bt(#[from] BtError),
    #[error(transparent)]
    Exec(#[from] ExecError),
    #[error("behavior tree execution failed: {}", diagnostics.join("; "))]
    ExecutionFailed { diagnostics: Vec<String> },
    #[error("{unit} sampled duration {duration} exceeds its maximum {max}")]
    DurationExceedsMax {
        unit: UnitId,
        duration: Time,
        max: Time,
    },
    #[error("occupancy of an empty trace is undefined")]
    EmptyTrace,
    #[error("at least one iteration is required")]
    NoIterations,
}
