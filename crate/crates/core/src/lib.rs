//! Compile timestamped temporal plans into behavior trees that run every
//! causally independent action in parallel, and measure the result.
//!
//! The pipeline has four stages:
//!
//! 1. [`pddl`] parses a durative-action domain, a problem and a plan.
//! 2. [`graph`] turns the plan into a causal graph of action units.
//! 3. [`bt`] compiles that graph into a behavior tree with shared
//!    (singleton) action nodes and wait nodes.
//! 4. [`exec`] ticks the tree over simulated time, and [`sim`] compares it
//!    against timestamp-driven and sequential dispatching.
//!
//! ```
//! use plan2bt::{fixtures, Scenario};
//!
//! let scenario = Scenario::from_texts(
//!     fixtures::SIMPLE_DOMAIN,
//!     fixtures::SIMPLE_PROBLEM,
//!     fixtures::SIMPLE_PLAN,
//! )?;
//! let graph = scenario.graph()?;
//! assert_eq!(graph.units().len(), 2);
//! assert_eq!(graph.arcs().len(), 1);
//! # Ok::<(), Box<dyn std::error::Error>>(())
//! ```

pub mod bt;
pub mod exec;
pub mod fixtures;
pub mod graph;
pub mod pddl;
pub mod sexpr;
pub mod sim;
pub mod time;

mod scenario;

pub use scenario::Scenario;
pub use time::Time;

// Runs the Rust snippets of the guide under `cargo test --doc`.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    pub struct Introduction;
    #[doc = include_str!("../../../book/src/pddl.md")]
    pub struct Pddl;
    #[doc = include_str!("../../../book/src/planning-graph.md")]
    pub struct PlanningGraph;
    #[doc = include_str!("../../../book/src/behavior-trees.md")]
    pub struct BehaviorTrees;
    #[doc = include_str!("../../../book/src/execution.md")]
    pub struct Execution;
    #[doc = include_str!("../../../book/src/simulation.md")]
    pub struct Simulation;
    #[doc = include_str!("../../../book/src/cli.md")]
    pub struct Cli;
}
