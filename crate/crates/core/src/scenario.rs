use std::fmt;
use std::path::{Path, PathBuf};

use crate::bt::{build_tree, BehaviorTree, BtError};
use crate::graph::{build_graph, GraphError, PlanGraph};
use crate::pddl::{parse_domain, parse_plan, parse_problem, Domain, PddlError, PlanStep, Problem};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InputKind {
    Domain,
    Problem,
    Plan,
}

impl fmt::Display for InputKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            InputKind::Domain => "domain",
            InputKind::Problem => "problem",
            InputKind::Plan => "plan",
        })
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ScenarioError {
    #[error("cannot read {kind} file {}: {source}", path.display())]
    Io {
        kind: InputKind,
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{kind}{}: {source}", origin.as_ref().map(|p| format!(" {}", p.display())).unwrap_or_default())]
    Parse {
        kind: InputKind,
        origin: Option<PathBuf>,
        source: PddlError,
    },
}

/// A parsed domain, problem and plan.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Scenario {
    pub domain: Domain,
    pub problem: Problem,
    /// Steps sorted by start time.
    pub plan: Vec<PlanStep>,
}

impl Scenario {
    pub fn from_texts(domain: &str, problem: &str, plan: &str) -> Result<Scenario, ScenarioError> {
        Scenario::parse([domain, problem, plan], [None, None, None])
    }

    pub fn load(
        domain: impl AsRef<Path>,
        problem: impl AsRef<Path>,
        plan: impl AsRef<Path>,
    ) -> Result<Scenario, ScenarioError> {
        let paths = [domain.as_ref(), problem.as_ref(), plan.as_ref()];
        let kinds = [InputKind::Domain, InputKind::Problem, InputKind::Plan];
        let mut texts = Vec::with_capacity(3);
        for (path, kind) in paths.iter().zip(kinds) {
            texts.push(
                std::fs::read_to_string(path).map_err(|source| ScenarioError::Io {
                    kind,
                    path: path.to_path_buf(),
                    source,
                })?,
            );
        }
        Scenario::parse(
            [&texts[0], &texts[1], &texts[2]],
            paths.map(|p| Some(p.to_path_buf())),
        )
    }

    fn parse(texts: [&str; 3], origins: [Option<PathBuf>; 3]) -> Result<Scenario, ScenarioError> {
        let [d, p, s] = origins;
        let fail = |kind, origin: Option<PathBuf>| {
            move |source| ScenarioError::Parse {
                kind,
                origin,
                source,
            }
        };
        let domain = parse_domain(texts[0]).map_err(fail(InputKind::Domain, d))?;
        let problem = parse_problem(texts[1], &domain).map_err(fail(InputKind::Problem, p))?;
        let plan = parse_plan(texts[2], &domain).map_err(fail(InputKind::Plan, s))?;
        Ok(Scenario {
            domain,
            problem,
            plan,
        })
    }

    pub fn graph(&self) -> Result<PlanGraph, GraphError> {
        build_graph(&self.plan, &self.domain, &self.problem)
    }

    pub fn tree(&self) -> Result<BehaviorTree, BtError> {
        build_tree(&self.graph()?)
    }
}
