use std::collections::BTreeMap;

use serde::Serialize;

use super::TickStatus;
use crate::graph::UnitId;
use crate::time::Time;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EventKind {
    Start,
    End,
    Fail,
}

impl EventKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EventKind::Start => "start",
            EventKind::End => "end",
            EventKind::Fail => "fail",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceEvent {
    pub time: Time,
    pub unit: UnitId,
    /// `(name arg ...)`.
    pub action: String,
    pub kind: EventKind,
}

/// Time-ordered action events of one run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExecutionTrace {
    pub events: Vec<TraceEvent>,
    pub final_status: TickStatus,
    /// Human-readable reasons for failures, in order of occurrence.
    pub diagnostics: Vec<String>,
}

impl Default for ExecutionTrace {
    fn default() -> Self {
        ExecutionTrace {
            events: Vec::new(),
            final_status: TickStatus::Running,
            diagnostics: Vec::new(),
        }
    }
}

impl ExecutionTrace {
    /// Builds a successful trace from `(unit, label, start, end)` intervals.
    pub fn from_intervals(
        intervals: impl IntoIterator<Item = (UnitId, String, Time, Time)>,
    ) -> Self {
        let mut events = Vec::new();
        for (unit, action, start, end) in intervals {
            debug_assert!(start <= end);
            events.push(TraceEvent {
                time: start,
                unit,
                action: action.clone(),
                kind: EventKind::Start,
            });
            events.push(TraceEvent {
                time: end,
                unit,
                action,
                kind: EventKind::End,
            });
        }
        // ends sort before starts at equal times so back-to-back actions
        // never overlap
        events.sort_by(|a, b| {
            a.time
                .cmp(&b.time)
                .then_with(|| (a.kind == EventKind::Start).cmp(&(b.kind == EventKind::Start)))
                .then(a.unit.cmp(&b.unit))
        });
        ExecutionTrace {
            events,
            final_status: TickStatus::Success,
            diagnostics: Vec::new(),
        }
    }

    pub fn push(&mut self, time: Time, unit: UnitId, action: String, kind: EventKind) {
        debug_assert!(self.events.last().is_none_or(|e| e.time <= time));
        self.events.push(TraceEvent {
            time,
            unit,
            action,
            kind,
        });
    }

    fn time_of(&self, unit: UnitId, kind: EventKind) -> Option<Time> {
        self.events
            .iter()
            .find(|e| e.unit == unit && e.kind == kind)
            .map(|e| e.time)
    }

    pub fn start_of(&self, unit: UnitId) -> Option<Time> {
        self.time_of(unit, EventKind::Start)
    }

    pub fn end_of(&self, unit: UnitId) -> Option<Time> {
        self.time_of(unit, EventKind::End)
    }

    /// `(unit, start, end)` of every completed action, by start time.
    pub fn intervals(&self) -> Vec<(UnitId, Time, Time)> {
        let mut starts = BTreeMap::new();
        let mut out = Vec::new();
        for e in &self.events {
            match e.kind {
                EventKind::Start => {
                    starts.insert(e.unit, e.time);
                }
                EventKind::End => {
                    if let Some(s) = starts.get(&e.unit) {
                        out.push((e.unit, *s, e.time));
                    }
                }
                EventKind::Fail => {}
            }
        }
        out.sort_by(|a, b| a.1.cmp(&b.1).then(a.0.cmp(&b.0)));
        out
    }

    /// Last event time minus first start time; zero for an empty trace.
    pub fn makespan(&self) -> Time {
        let first = self
            .events
            .iter()
            .filter(|e| e.kind == EventKind::Start)
            .map(|e| e.time)
            .min();
        let last = self.events.iter().map(|e| e.time).max();
        match (first, last) {
            (Some(f), Some(l)) => l - f,
            _ => Time::ZERO,
        }
    }

    /// `time,action_id,action,event`, times with three decimals.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["time", "action_id", "action", "event"])
            .expect("in-memory write");
        for e in &self.events {
            w.write_record([
                e.time.fixed3(),
                e.unit.to_string(),
                e.action.clone(),
                e.kind.as_str().to_owned(),
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 input")
    }

    /// One JSON object per event, with the same fields as the CSV form.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for e in &self.events {
            out.push_str(&format!(
                "{{\"time\":{},\"action_id\":\"{}\",\"action\":{},\"event\":\"{}\"}}\n",
                e.time.fixed3(),
                e.unit,
                serde_json::Value::String(e.action.clone()),
                e.kind.as_str()
            ));
        }
        out
    }
}
