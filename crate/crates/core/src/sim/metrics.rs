use std::collections::BTreeMap;

use num_rational::Ratio;
use serde::Serialize;

use super::SimError;
use crate::exec::ExecutionTrace;
use crate::time::Time;

/// Time spent with exactly `k` actions running, over one or more runs.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct Occupancy {
    /// Total observed time.
    pub total: Time,
    /// `k` to time spent with `k` actions running; every `k` from 0 to the
    /// peak concurrency is present.
    pub time_at: BTreeMap<usize, Time>,
}

impl Occupancy {
    /// Exact fraction of the observed time with `k` actions running.
    pub fn fraction(&self, k: usize) -> Ratio<i64> {
        if self.total.is_zero() {
            return Ratio::from_integer(0);
        }
        self.time_at.get(&k).copied().unwrap_or(Time::ZERO) / self.total
    }

    pub fn fractions(&self) -> BTreeMap<usize, f64> {
        self.time_at
            .keys()
            .map(|&k| {
                let r = self.fraction(k);
                (k, *r.numer() as f64 / *r.denom() as f64)
            })
            .collect()
    }

    pub fn idle(&self) -> Ratio<i64> {
        self.fraction(0)
    }

    pub fn max_concurrency(&self) -> usize {
        self.time_at.keys().next_back().copied().unwrap_or(0)
    }

    /// Pools two observations, weighting each by its observed time.
    pub fn merge(&mut self, other: &Occupancy) {
        self.total += other.total;
        for (&k, &t) in &other.time_at {
            *self.time_at.entry(k).or_insert(Time::ZERO) += t;
        }
        let peak = self.max_concurrency();
        for k in 0..=peak {
            self.time_at.entry(k).or_insert(Time::ZERO);
        }
    }
}

/// Sweeps the completed actions of `trace` over `[first start, last end]`.
pub fn occupancy(trace: &ExecutionTrace) -> Result<Occupancy, SimError> {
    let intervals = trace.intervals();
    if intervals.is_empty() {
        return Err(SimError::EmptyTrace);
    }
    let mut deltas: BTreeMap<Time, i64> = BTreeMap::new();
    for &(_, start, end) in &intervals {
        *deltas.entry(start).or_insert(0) += 1;
        *deltas.entry(end).or_insert(0) -= 1;
    }
    let first = *deltas.keys().next().expect("non-empty");
    let last = *deltas.keys().next_back().expect("non-empty");
    let mut time_at: BTreeMap<usize, Time> = BTreeMap::new();
    let mut running = 0i64;
    let mut prev = first;
    for (&t, &delta) in &deltas {
        if t > prev {
            *time_at.entry(running as usize).or_insert(Time::ZERO) += t - prev;
        }
        running += delta;
        debug_assert!(running >= 0);
        prev = t;
    }
    debug_assert_eq!(running, 0);
    let peak = time_at.keys().next_back().copied().unwrap_or(0);
    for k in 0..=peak {
        time_at.entry(k).or_insert(Time::ZERO);
    }
    Ok(Occupancy {
        total: last - first,
        time_at,
    })
}
