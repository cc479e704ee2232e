//! Tick-driven execution of behavior trees over simulated time.

mod backend;
mod engine;
mod trace;

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use crate::pddl::{GroundedPredicate, Polarity, Problem};
use crate::time::Time;

pub use backend::{ActionBackend, BackendError, Progress, ScriptedBackend, SimulatedBackend};
pub use engine::{Engine, ExecError, DEFAULT_TICK_BUDGET};
pub use trace::{EventKind, ExecutionTrace, TraceEvent};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum TickStatus {
    Success,
    Failure,
    Running,
}

impl fmt::Display for TickStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TickStatus::Success => "SUCCESS",
            TickStatus::Failure => "FAILURE",
            TickStatus::Running => "RUNNING",
        })
    }
}

/// The knowledge base: facts currently true, plus the simulated clock.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct WorldState {
    pub facts: BTreeSet<GroundedPredicate>,
    pub clock: Time,
}

impl WorldState {
    pub fn from_problem(problem: &Problem) -> WorldState {
        WorldState {
            facts: problem.init.clone(),
            clock: Time::ZERO,
        }
    }

    /// True iff every predicate is present (positive) or every predicate is
    /// absent (negative). Vacuously true for an empty set.
    pub fn check<'a>(
        &self,
        predicates: impl IntoIterator<Item = &'a GroundedPredicate>,
        polarity: Polarity,
    ) -> bool {
        let want = polarity == Polarity::Positive;
        predicates
            .into_iter()
            .all(|p| self.facts.contains(p) == want)
    }

    /// Removes `del`, then inserts `add`. Returns whether the fact set
    /// changed.
    pub fn apply<'a>(
        &mut self,
        add: impl IntoIterator<Item = &'a GroundedPredicate>,
        del: impl IntoIterator<Item = &'a GroundedPredicate>,
    ) -> bool {
        let before = self.facts.clone();
        for fact in del {
            self.facts.remove(fact);
        }
        for fact in add {
            self.facts.insert(fact.clone());
        }
        before != self.facts
    }
}

#[cfg(test)]
mod tests;
