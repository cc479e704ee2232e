use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::graph::{ActionUnit, UnitId};
use crate::time::Time;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Progress {
    Running,
    Finished,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{0}")]
pub struct BackendError(pub String);

/// Carries out the actions the engine dispatches.
///
/// The engine calls `start` once per action, then `poll` on later ticks
/// until it reports `Finished`. Between ticks without progress it advances
/// its clock to `next_completion`.
pub trait ActionBackend {
    fn start(&mut self, unit: &ActionUnit, now: Time) -> Result<(), BackendError>;
    fn poll(&mut self, unit: &ActionUnit, now: Time) -> Result<Progress, BackendError>;
    /// Earliest time at which a started action will finish, if any.
    fn next_completion(&self) -> Option<Time>;
}

/// Every action takes a fixed duration, with no limit on concurrency.
#[derive(Debug, Clone, Default)]
pub struct SimulatedBackend {
    durations: BTreeMap<UnitId, Time>,
    pending: BTreeMap<UnitId, Time>,
}

impl SimulatedBackend {
    /// Durations per unit; units not listed take their plan duration.
    pub fn new(durations: BTreeMap<UnitId, Time>) -> SimulatedBackend {
        SimulatedBackend {
            durations,
            pending: BTreeMap::new(),
        }
    }

    pub fn duration(&self, unit: &ActionUnit) -> Time {
        self.durations
            .get(&unit.id)
            .copied()
            .unwrap_or(unit.action.duration)
    }
}

impl ActionBackend for SimulatedBackend {
    fn start(&mut self, unit: &ActionUnit, now: Time) -> Result<(), BackendError> {
        let end = now + self.duration(unit);
        if self.pending.insert(unit.id, end).is_some() {
            return Err(BackendError(format!("{} started twice", unit.id)));
        }
        Ok(())
    }

    fn poll(&mut self, unit: &ActionUnit, now: Time) -> Result<Progress, BackendError> {
        match self.pending.get(&unit.id) {
            None => Err(BackendError(format!("{} polled before start", unit.id))),
            Some(&end) if end <= now => {
                self.pending.remove(&unit.id);
                Ok(Progress::Finished)
            }
            Some(_) => Ok(Progress::Running),
        }
    }

    fn next_completion(&self) -> Option<Time> {
        self.pending.values().copied().min()
    }
}

/// Replays a fixed sequence of poll answers per unit and logs every call.
/// Meant for tick-by-tick tests; it never reports a completion time.
#[derive(Debug, Clone, Default)]
pub struct ScriptedBackend {
    scripts: BTreeMap<UnitId, VecDeque<Progress>>,
    refuse: BTreeSet<UnitId>,
    /// `(unit, call)` in call order, `call` being `"start"` or `"poll"`.
    pub log: Vec<(UnitId, &'static str)>,
}

impl ScriptedBackend {
    pub fn new() -> ScriptedBackend {
        ScriptedBackend::default()
    }

    /// Answers for successive polls of `unit`; once exhausted, polls answer
    /// `Running`.
    pub fn script(mut self, unit: UnitId, polls: impl IntoIterator<Item = Progress>) -> Self {
        self.scripts.insert(unit, polls.into_iter().collect());
        self
    }

    /// Makes `start` fail for `unit`.
    pub fn refuse(mut self, unit: UnitId) -> Self {
        self.refuse.insert(unit);
        self
    }

    /// Queues one more poll answer for `unit`.
    pub fn push(&mut self, unit: UnitId, progress: Progress) {
        self.scripts.entry(unit).or_default().push_back(progress);
    }

    pub fn polls_since(&self, mark: usize) -> Vec<UnitId> {
        self.log[mark..]
            .iter()
            .filter(|(_, call)| *call == "poll")
            .map(|(u, _)| *u)
            .collect()
    }
}

impl ActionBackend for ScriptedBackend {
    fn start(&mut self, unit: &ActionUnit, _now: Time) -> Result<(), BackendError> {
        self.log.push((unit.id, "start"));
        if self.refuse.contains(&unit.id) {
            return Err(BackendError(format!("{} refused to start", unit.id)));
        }
        Ok(())
    }

    fn poll(&mut self, unit: &ActionUnit, _now: Time) -> Result<Progress, BackendError> {
        self.log.push((unit.id, "poll"));
        Ok(self
            .scripts
            .get_mut(&unit.id)
            .and_then(VecDeque::pop_front)
            .unwrap_or(Progress::Running))
    }

    fn next_completion(&self) -> Option<Time> {
        None
    }
}
