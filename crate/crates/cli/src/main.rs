//! `plan2bt`: compile temporal PDDL plans into behavior trees and simulate
//! their execution.
//!
//! Exit codes:
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | success |
//! | 1 | an input could not be read or parsed, or an output could not be written |
//! | 2 | planning graph or behavior tree construction failed |
//! | 3 | execution failed or deadlocked |
//! | 4 | invalid command line |

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::{debug, info};
use plan2bt::bt::to_xml;
use plan2bt::graph::to_dot;
use plan2bt::sim::{
    occupancy, run_experiment, Compiled, DurationModel, Executor, ExperimentConfig, SimError,
};
use plan2bt::Scenario;

#[derive(Parser)]
#[command(
    name = "plan2bt",
    version,
    about = "Compile temporal PDDL plans into behavior trees"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the planning graph and print its size.
    Graph {
        #[command(flatten)]
        inputs: Inputs,
        /// Write the graph in DOT format.
        #[arg(long)]
        out_dot: Option<PathBuf>,
    },
    /// Build the behavior tree and write it as XML.
    Compile {
        #[command(flatten)]
        inputs: Inputs,
        /// Output file; standard output if omitted.
        #[arg(long)]
        out_xml: Option<PathBuf>,
    },
    /// Simulate the plan under one or all execution models.
    Run {
        #[command(flatten)]
        inputs: Inputs,
        #[command(flatten)]
        sampling: Sampling,
        #[arg(long, value_enum, default_value_t = ExecutorArg::All)]
        executor: ExecutorArg,
        #[arg(long, default_value_t = 10)]
        iterations: usize,
        /// Label for the robots column; defaults to the plan file stem.
        #[arg(long)]
        robots: Option<String>,
        /// Per-iteration makespans.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Pooled occupancy fractions.
        #[arg(long)]
        occupancy_csv: Option<PathBuf>,
        /// Full report as JSON.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Run a single iteration of one model and write its event trace.
    Report {
        #[command(flatten)]
        inputs: Inputs,
        #[command(flatten)]
        sampling: Sampling,
        #[arg(long, value_enum, default_value_t = SingleExecutor::Bt)]
        executor: SingleExecutor,
        /// Iteration index whose durations are used.
        #[arg(long, default_value_t = 0)]
        iteration: u64,
        #[arg(long)]
        trace_csv: Option<PathBuf>,
        #[arg(long)]
        trace_jsonl: Option<PathBuf>,
    },
    /// Parse the inputs, verify the graph and build the tree.
    Validate {
        #[command(flatten)]
        inputs: Inputs,
    },
}

#[derive(Args)]
struct Inputs {
    #[arg(long)]
    domain: PathBuf,
    #[arg(long)]
    problem: PathBuf,
    #[arg(long)]
    plan: PathBuf,
}

#[derive(Args)]
struct Sampling {
    /// Base seed for duration sampling. Required unless `--deterministic`.
    #[arg(long)]
    seed: Option<u64>,
    /// Use every action's planned duration instead of sampling.
    #[arg(long)]
    deterministic: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum ExecutorArg {
    Planner,
    Sequential,
    Bt,
    All,
}

#[derive(Clone, Copy, ValueEnum)]
enum SingleExecutor {
    Planner,
    Sequential,
    Bt,
}

impl From<SingleExecutor> for Executor {
    fn from(e: SingleExecutor) -> Executor {
        match e {
            SingleExecutor::Planner => Executor::Planner,
            SingleExecutor::Sequential => Executor::Sequential,
            SingleExecutor::Bt => Executor::Bt,
        }
    }
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl ToString) -> Failure {
        Failure {
            code,
            message: message.to_string(),
        }
    }
}

impl From<SimError> for Failure {
    fn from(e: SimError) -> Failure {
        let code = match e {
            SimError::Graph(_) | SimError::Bt(_) => 2,
            _ => 3,
        };
        Failure::new(code, e)
    }
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("PLAN2BT_LOG", "warn"))
        .format_timestamp(None)
        .init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 4 } else { 0 });
        }
    };
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn dispatch(command: Command) -> Outcome {
    match command {
        Command::Graph { inputs, out_dot } => cmd_graph(&inputs, out_dot.as_deref()),
        Command::Compile { inputs, out_xml } => cmd_compile(&inputs, out_xml.as_deref()),
        Command::Run {
            inputs,
            sampling,
            executor,
            iterations,
            robots,
            csv,
            occupancy_csv,
            json,
        } => {
            let executors = match executor {
                ExecutorArg::Planner => vec![Executor::Planner],
                ExecutorArg::Sequential => vec![Executor::Sequential],
                ExecutorArg::Bt => vec![Executor::Bt],
                ExecutorArg::All => Executor::ALL.to_vec(),
            };
            let robots = robots.unwrap_or_else(|| {
                inputs
                    .plan
                    .file_stem()
                    .map(|s| s.to_string_lossy().into_owned())
                    .unwrap_or_default()
            });
            let scenario = load(&inputs)?;
            let mut config = ExperimentConfig::new(executors, iterations, seed(&sampling)?, robots);
            if sampling.deterministic {
                config = config.deterministic();
            }
            info!(
                "running {} iteration(s) with seed {}",
                config.iterations, config.seed
            );
            let report = run_experiment(&scenario, &config)?;
            for summary in &report.summaries {
                println!(
                    "{} mean makespan {}",
                    summary.executor,
                    summary.mean_makespan.fixed3()
                );
            }
            write_opt(csv.as_deref(), &report.makespan_csv())?;
            write_opt(occupancy_csv.as_deref(), &report.occupancy_csv())?;
            write_opt(json.as_deref(), &report.to_json())
        }
        Command::Report {
            inputs,
            sampling,
            executor,
            iteration,
            trace_csv,
            trace_jsonl,
        } => {
            let scenario = load(&inputs)?;
            let seed = seed(&sampling)?;
            let compiled = Compiled::new(&scenario)?;
            let model = if sampling.deterministic {
                DurationModel::Deterministic
            } else {
                DurationModel::Stochastic
            };
            let durations = compiled.durations(model, seed, iteration);
            let executor = Executor::from(executor);
            let trace = compiled.run(executor, &durations, plan2bt::exec::DEFAULT_TICK_BUDGET)?;
            println!("{executor} makespan {}", trace.makespan().fixed3());
            if !trace.events.is_empty() {
                for (k, fraction) in occupancy(&trace)?.fractions() {
                    println!("{k} running: {:.2}%", fraction * 100.0);
                }
            }
            write_opt(trace_csv.as_deref(), &trace.to_csv())?;
            write_opt(trace_jsonl.as_deref(), &trace.to_jsonl())
        }
        Command::Validate { inputs } => {
            let scenario = load(&inputs)?;
            let graph = scenario.graph().map_err(|e| Failure::new(2, e))?;
            let tree = plan2bt::bt::build_tree(&graph).map_err(|e| Failure::new(2, e))?;
            println!(
                "ok: {}, {} action reference(s), {} wait(s)",
                counts(graph.units().len(), graph.arcs().len()),
                tree.action_refs(),
                tree.waits()
            );
            Ok(())
        }
    }
}

fn cmd_graph(inputs: &Inputs, out_dot: Option<&Path>) -> Outcome {
    let scenario = load(inputs)?;
    let graph = scenario.graph().map_err(|e| Failure::new(2, e))?;
    println!("{}", counts(graph.units().len(), graph.arcs().len()));
    write_opt(out_dot, &to_dot(&graph))
}

fn cmd_compile(inputs: &Inputs, out_xml: Option<&Path>) -> Outcome {
    let scenario = load(inputs)?;
    let tree = scenario.tree().map_err(|e| Failure::new(2, e))?;
    let xml = to_xml(&tree);
    match out_xml {
        Some(path) => write(path, &xml),
        None => {
            use std::io::Write;
            let mut out = std::io::stdout().lock();
            match out.write_all(xml.as_bytes()).and_then(|()| out.flush()) {
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(Failure::new(
                    1,
                    format!("cannot write to standard output: {e}"),
                )),
                _ => Ok(()),
            }
        }
    }
}

fn counts(units: usize, arcs: usize) -> String {
    let plural = |n: usize, word: &str| format!("{n} {word}{}", if n == 1 { "" } else { "s" });
    format!("{}, {}", plural(units, "unit"), plural(arcs, "arc"))
}

fn load(inputs: &Inputs) -> Result<Scenario, Failure> {
    debug!("loading {}", inputs.plan.display());
    Scenario::load(&inputs.domain, &inputs.problem, &inputs.plan).map_err(|e| Failure::new(1, e))
}

fn seed(sampling: &Sampling) -> Result<u64, Failure> {
    if sampling.deterministic {
        return Ok(sampling.seed.unwrap_or(0));
    }
    sampling
        .seed
        .ok_or_else(|| Failure::new(4, "--seed is required; every run must be reproducible"))
}

fn write(path: &Path, contents: &str) -> Outcome {
    fs::write(path, contents)
        .map_err(|e| Failure::new(1, format!("cannot write {}: {e}", path.display())))?;
    info!("wrote {}", path.display());
    Ok(())
}

fn write_opt(path: Option<&Path>, contents: &str) -> Outcome {
    path.map_or(Ok(()), |p| write(p, contents))
}
