//! Random plans over zero-arity actions, with oracles computed from the
//! generator's own data rather than from the parsed structures.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use plan2bt::graph::{PlanGraph, UnitId};
use plan2bt::Scenario;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone)]
pub struct Step {
    pub t: i64,
    pub duration: i64,
    /// Fact index and phase keyword (`at start`, `over all`, `at end`).
    pub requires: Vec<(usize, &'static str)>,
    /// Fact index and whether it is added at start.
    pub adds: Vec<(usize, bool)>,
}

/// A plan in line order; step `i` runs action `s<i>`.
#[derive(Debug, Clone)]
pub struct RandomPlan {
    pub facts: usize,
    pub init: BTreeSet<usize>,
    pub steps: Vec<Step>,
}

const PHASES: [&str; 3] = ["at start", "over all", "at end"];

impl RandomPlan {
    /// At most `max_steps` steps. Requirements without an earlier producer
    /// or an initial fact are dropped, so the plan always links.
    pub fn generate(seed: u64, max_steps: usize) -> RandomPlan {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.random_range(1..=max_steps);
        let facts = rng.random_range(1..=6);
        let init: BTreeSet<usize> = (0..facts).filter(|_| rng.random_bool(0.2)).collect();
        let mut steps = Vec::with_capacity(n);
        for _ in 0..n {
            let t = rng.random_range(0..8);
            let duration = rng.random_range(1..=4);
            let mut requires = Vec::new();
            for f in 0..facts {
                if rng.random_bool(0.35) {
                    requires.push((f, PHASES[rng.random_range(0..3)]));
                }
            }
            let mut adds = Vec::new();
            for f in 0..facts {
                if rng.random_bool(0.35) {
                    adds.push((f, rng.random_bool(0.3)));
                }
            }
            steps.push(Step {
                t,
                duration,
                requires,
                adds,
            });
        }
        let snapshot = steps.clone();
        for (i, step) in steps.iter_mut().enumerate() {
            step.requires.retain(|&(f, _)| {
                init.contains(&f)
                    || snapshot
                        .iter()
                        .enumerate()
                        .any(|(j, s)| j != i && s.t < step.t && s.adds.iter().any(|a| a.0 == f))
            });
        }
        RandomPlan { facts, init, steps }
    }

    pub fn domain_text(&self) -> String {
        let mut text = String::from("(define (domain random) (:predicates");
        for f in 0..self.facts {
            text.push_str(&format!(" (f{f})"));
        }
        text.push(')');
        for (i, s) in self.steps.iter().enumerate() {
            let conds: String = s
                .requires
                .iter()
                .map(|(f, phase)| format!(" ({phase} (f{f}))"))
                .collect();
            let effects: String = s
                .adds
                .iter()
                .map(|&(f, at_start)| {
                    format!(" ({} (f{f}))", if at_start { "at start" } else { "at end" })
                })
                .collect();
            text.push_str(&format!(
                "\n(:durative-action s{i} :parameters () :duration (= ?duration {}) \
                 :condition (and{conds}) :effect (and{effects}))",
                s.duration
            ));
        }
        text.push(')');
        text
    }

    pub fn problem_text(&self) -> String {
        let init: String = self.init.iter().map(|f| format!(" (f{f})")).collect();
        format!("(define (problem p) (:domain random) (:init{init}) (:goal (and)))")
    }

    pub fn plan_text(&self) -> String {
        self.steps
            .iter()
            .enumerate()
            .map(|(i, s)| format!("{}: (s{i}) [{}]\n", s.t, s.duration))
            .collect()
    }

    pub fn scenario(&self) -> Scenario {
        Scenario::from_texts(&self.domain_text(), &self.problem_text(), &self.plan_text())
            .expect("generated plans parse")
    }

    /// Line indices in (t, line) order; position `k` holds the step that
    /// becomes unit `a<k>`.
    pub fn unit_order(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.steps.len()).collect();
        order.sort_by_key(|&i| (self.steps[i].t, i));
        order
    }

    /// Causal arcs `(producer, consumer, fact)` by brute-force scan: for each
    /// requirement not in the pruned initial set, every strictly earlier
    /// producer is a candidate and the latest `(t, line)` wins.
    pub fn oracle_arcs(&self) -> BTreeSet<(UnitId, UnitId, String)> {
        let order = self.unit_order();
        let unit_of: BTreeMap<usize, UnitId> = order
            .iter()
            .enumerate()
            .map(|(k, &i)| (i, UnitId(k)))
            .collect();
        let produced: BTreeSet<usize> = self
            .steps
            .iter()
            .flat_map(|s| s.adds.iter().map(|a| a.0))
            .collect();
        let mut arcs = BTreeSet::new();
        for (i, consumer) in self.steps.iter().enumerate() {
            let required: BTreeSet<usize> = consumer.requires.iter().map(|r| r.0).collect();
            for f in required {
                if self.init.contains(&f) && !produced.contains(&f) {
                    continue;
                }
                let best = self
                    .steps
                    .iter()
                    .enumerate()
                    .filter(|(_, p)| p.t < consumer.t && p.adds.iter().any(|a| a.0 == f))
                    .max_by_key(|(j, p)| (p.t, *j));
                if let Some((j, _)) = best {
                    arcs.insert((unit_of[&j], unit_of[&i], format!("(f{f})")));
                }
            }
        }
        arcs
    }

    /// Finish time of the last action when every action starts the moment
    /// its producers (per [`Self::oracle_arcs`]) have finished.
    pub fn oracle_longest_path(&self) -> i64 {
        let order = self.unit_order();
        let arcs = self.oracle_arcs();
        let mut finish = vec![0i64; order.len()];
        for (k, &i) in order.iter().enumerate() {
            let start = arcs
                .iter()
                .filter(|(_, c, _)| c.0 == k)
                .map(|(p, _, _)| finish[p.0])
                .max()
                .unwrap_or(0);
            finish[k] = start + self.steps[i].duration;
        }
        finish.into_iter().max().unwrap_or(0)
    }
}

pub fn graph_arcs(graph: &PlanGraph) -> BTreeSet<(UnitId, UnitId, String)> {
    graph
        .arcs()
        .iter()
        .map(|a| (a.producer, a.consumer, a.predicate.to_string()))
        .collect()
}

/// Longest path through `graph` weighted by unit durations, by relaxation
/// in topological (id) order.
pub fn graph_longest_path(graph: &PlanGraph, durations: &[plan2bt::Time]) -> plan2bt::Time {
    let mut finish: Vec<plan2bt::Time> = Vec::with_capacity(graph.units().len());
    for unit in graph.units() {
        let start = graph
            .predecessors(unit.id)
            .unwrap()
            .iter()
            .map(|p| finish[p.0])
            .max()
            .unwrap_or(plan2bt::Time::ZERO);
        finish.push(start + durations[unit.id.0]);
    }
    finish.into_iter().max().unwrap_or(plan2bt::Time::ZERO)
}

pub fn restaurant(robots: usize) -> Scenario {
    let (problem, plan) = plan2bt::fixtures::restaurant(robots).unwrap();
    Scenario::from_texts(plan2bt::fixtures::RESTAURANT_DOMAIN, problem, plan).unwrap()
}

pub fn simple() -> Scenario {
    Scenario::from_texts(
        plan2bt::fixtures::SIMPLE_DOMAIN,
        plan2bt::fixtures::SIMPLE_PROBLEM,
        plan2bt::fixtures::SIMPLE_PLAN,
    )
    .unwrap()
}
