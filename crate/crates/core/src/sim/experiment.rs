use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use super::{
    occupancy, run_bt_tree, run_planner_model, run_sequential_model, sample_durations,
    DurationModel, Occupancy, SimError,
};
use crate::bt::{build_tree, BehaviorTree};
use crate::exec::{ExecutionTrace, DEFAULT_TICK_BUDGET};
use crate::graph::PlanGraph;
use crate::scenario::Scenario;
use crate::sim::iteration_rng;
use crate::time::Time;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Executor {
    Planner,
    Sequential,
    Bt,
}

impl Executor {
    pub const ALL: [Executor; 3] = [Executor::Planner, Executor::Sequential, Executor::Bt];

    pub fn name(self) -> &'static str {
        match self {
            Executor::Planner => "planner",
            Executor::Sequential => "sequential",
            Executor::Bt => "bt",
        }
    }
}

impl fmt::Display for Executor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Executor {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Executor::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| format!("unknown executor `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExperimentConfig {
    /// Executors to compare; each iteration runs all of them on the same
    /// sampled durations.
    pub executors: Vec<Executor>,
    pub iterations: usize,
    pub seed: u64,
    /// Label for the `robots` report column.
    pub robots: String,
    pub model: DurationModel,
    pub tick_budget: u64,
}

impl ExperimentConfig {
    pub fn new(
        executors: Vec<Executor>,
        iterations: usize,
        seed: u64,
        robots: impl Into<String>,
    ) -> Self {
        ExperimentConfig {
            executors,
            iterations,
            seed,
            robots: robots.into(),
            model: DurationModel::Stochastic,
            tick_budget: DEFAULT_TICK_BUDGET,
        }
    }

    pub fn deterministic(mut self) -> Self {
        self.model = DurationModel::Deterministic;
        self
    }
}

/// A scenario with its graph and tree built once for repeated runs.
#[derive(Debug, Clone)]
pub struct Compiled<'s> {
    pub scenario: &'s Scenario,
    pub graph: PlanGraph,
    pub tree: BehaviorTree,
}

impl<'s> Compiled<'s> {
    pub fn new(scenario: &'s Scenario) -> Result<Compiled<'s>, SimError> {
        let graph = scenario.graph()?;
        let tree = build_tree(&graph)?;
        Ok(Compiled {
            scenario,
            graph,
            tree,
        })
    }

    /// Maximum duration of every step, indexed by unit id.
    pub fn maximums(&self) -> Vec<Time> {
        self.scenario.plan.iter().map(|s| s.duration).collect()
    }

    /// Durations of iteration `k`.
    pub fn durations(&self, model: DurationModel, seed: u64, k: u64) -> Vec<Time> {
        sample_durations(&self.maximums(), model, &mut iteration_rng(seed, k))
    }

    pub fn run(
        &self,
        executor: Executor,
        durations: &[Time],
        tick_budget: u64,
    ) -> Result<ExecutionTrace, SimError> {
        let plan = &self.scenario.plan;
        match executor {
            Executor::Planner => run_planner_model(plan, durations),
            Executor::Sequential => Ok(run_sequential_model(plan, durations)),
            Executor::Bt => run_bt_tree(&self.tree, &self.scenario.problem, durations, tick_budget),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IterationResult {
    pub executor: Executor,
    pub iteration: usize,
    pub makespan: Time,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExecutorSummary {
    pub executor: Executor,
    /// Per-iteration makespans, by iteration.
    pub makespans: Vec<Time>,
    pub mean_makespan: Time,
    /// Pooled over all iterations, weighted by makespan.
    pub occupancy: Occupancy,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RunReport {
    pub robots: String,
    pub seed: u64,
    pub iterations: usize,
    pub model: DurationModel,
    pub runs: Vec<IterationResult>,
    pub summaries: Vec<ExecutorSummary>,
}

/// Runs every configured executor `iterations` times. Iteration `k` samples
/// one duration per step from [`iteration_rng`]`(seed, k)` and shares it
/// across executors.
pub fn run_experiment(
    scenario: &Scenario,
    config: &ExperimentConfig,
) -> Result<RunReport, SimError> {
    if config.iterations == 0 {
        return Err(SimError::NoIterations);
    }
    let compiled = Compiled::new(scenario)?;
    let mut executors = config.executors.clone();
    executors.sort();
    executors.dedup();

    let mut runs = Vec::new();
    let mut summaries: Vec<ExecutorSummary> = executors
        .iter()
        .map(|&executor| ExecutorSummary {
            executor,
            makespans: Vec::with_capacity(config.iterations),
            mean_makespan: Time::ZERO,
            occupancy: Occupancy::default(),
        })
        .collect();
    for k in 0..config.iterations {
        let durations = compiled.durations(config.model, config.seed, k as u64);
        for summary in &mut summaries {
            let trace = compiled.run(summary.executor, &durations, config.tick_budget)?;
            let makespan = trace.makespan();
            if !trace.events.is_empty() {
                summary.occupancy.merge(&occupancy(&trace)?);
            }
            summary.makespans.push(makespan);
            runs.push(IterationResult {
                executor: summary.executor,
                iteration: k,
                makespan,
            });
        }
    }
    for summary in &mut summaries {
        summary.mean_makespan =
            summary.makespans.iter().copied().sum::<Time>() / summary.makespans.len() as i64;
    }
    runs.sort_by(|a, b| {
        a.executor
            .cmp(&b.executor)
            .then(a.iteration.cmp(&b.iteration))
    });
    Ok(RunReport {
        robots: config.robots.clone(),
        seed: config.seed,
        iterations: config.iterations,
        model: config.model,
        runs,
        summaries,
    })
}

impl RunReport {
    pub fn summary(&self, executor: Executor) -> Option<&ExecutorSummary> {
        self.summaries.iter().find(|s| s.executor == executor)
    }

    pub fn mean(&self, executor: Executor) -> Option<Time> {
        self.summary(executor).map(|s| s.mean_makespan)
    }

    /// `executor,robots,iteration,seed,makespan`, one row per run.
    pub fn makespan_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["executor", "robots", "iteration", "seed", "makespan"])
            .expect("in-memory write");
        for r in &self.runs {
            w.write_record([
                r.executor.name().to_owned(),
                self.robots.clone(),
                r.iteration.to_string(),
                self.seed.to_string(),
                r.makespan.fixed3(),
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 input")
    }

    /// `executor,robots,k,fraction`, pooled over iterations.
    pub fn occupancy_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["executor", "robots", "k", "fraction"])
            .expect("in-memory write");
        for s in &self.summaries {
            for (k, f) in s.occupancy.fractions() {
                w.write_record([
                    s.executor.name().to_owned(),
                    self.robots.clone(),
                    k.to_string(),
                    format!("{f:.6}"),
                ])
                .expect("in-memory write");
            }
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 input")
    }

    /// Both tables plus means, as one JSON document.
    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Row<'a> {
            executor: &'a str,
            robots: &'a str,
            iteration: usize,
            seed: u64,
            makespan: String,
        }
        #[derive(Serialize)]
        struct OccRow<'a> {
            executor: &'a str,
            robots: &'a str,
            k: usize,
            fraction: f64,
        }
        #[derive(Serialize)]
        struct Mean<'a> {
            executor: &'a str,
            mean_makespan: String,
        }
        #[derive(Serialize)]
        struct Doc<'a> {
            robots: &'a str,
            seed: u64,
            iterations: usize,
            model: DurationModel,
            means: Vec<Mean<'a>>,
            makespans: Vec<Row<'a>>,
            occupancy: Vec<OccRow<'a>>,
        }
        let doc = Doc {
            robots: &self.robots,
            seed: self.seed,
            iterations: self.iterations,
            model: self.model,
            means: self
                .summaries
                .iter()
                .map(|s| Mean {
                    executor: s.executor.name(),
                    mean_makespan: s.mean_makespan.fixed3(),
                })
                .collect(),
            makespans: self
                .runs
                .iter()
                .map(|r| Row {
                    executor: r.executor.name(),
                    robots: &self.robots,
                    iteration: r.iteration,
                    seed: self.seed,
                    makespan: r.makespan.fixed3(),
                })
                .collect(),
            occupancy: self
                .summaries
                .iter()
                .flat_map(|s| {
                    s.occupancy
                        .fractions()
                        .into_iter()
                        .map(move |(k, fraction)| OccRow {
                            executor: s.executor.name(),
                            robots: &self.robots,
                            k,
                            fraction,
                        })
                })
                .collect(),
        };
        let mut out = serde_json::to_string_pretty(&doc).expect("serializable report");
        out.push('\n');
        out
    }
}
