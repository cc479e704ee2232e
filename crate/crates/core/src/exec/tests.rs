use std::collections::{BTreeMap, BTreeSet};

use super::*;
use crate::bt::{ActionStatus, BehaviorTree, BtNode};
use crate::fixtures;
use crate::graph::UnitId;
use crate::pddl::GroundedPredicate;
use crate::Scenario;

use BtNode::{Action, Parallel, Sequence, WaitFor};
use Progress::{Finished, Running};
use TickStatus as S;

fn a(i: usize) -> UnitId {
    UnitId(i)
}

fn gp(name: &str, args: &[&str]) -> GroundedPredicate {
    GroundedPredicate::new(name, args.iter().copied())
}

fn simple() -> Scenario {
    Scenario::from_texts(
        fixtures::SIMPLE_DOMAIN,
        fixtures::SIMPLE_PROBLEM,
        fixtures::SIMPLE_PLAN,
    )
    .unwrap()
}

/// Actions `act0`, `act1`, ... with no conditions and no effects, so each expands to
/// a bare `Execute` and every tick reaches the backend directly.
fn plain_units(n: usize) -> Vec<crate::graph::ActionUnit> {
    let names: Vec<String> = (0..n).map(|i| format!("act{i}")).collect();
    let mut domain = String::from("(define (domain plain) (:predicates (p))");
    for name in &names {
        domain.push_str(&format!(
            " (:durative-action {name} :parameters () :duration (= ?duration 1) \
             :condition (and) :effect (and))"
        ));
    }
    domain.push(')');
    let plan: String = names.iter().map(|n| format!("0: ({n})\n")).collect();
    Scenario::from_texts(
        &domain,
        "(define (problem p) (:domain plain) (:init) (:goal (and)))",
        &plan,
    )
    .unwrap()
    .graph()
    .unwrap()
    .units()
    .to_vec()
}

fn scripted(root: BtNode, units: usize, backend: ScriptedBackend) -> Engine<ScriptedBackend> {
    let tree = BehaviorTree::new(Some(root), plain_units(units)).unwrap();
    Engine::new(tree, WorldState::default(), backend)
}

#[test]
fn sequence_progresses_one_child_per_tick() {
    let backend = ScriptedBackend::new()
        .script(a(0), [Running, Finished])
        .script(a(1), [Finished])
        .script(a(2), [Finished]);
    let mut e = scripted(
        Sequence(vec![Action(a(0)), Action(a(1)), Action(a(2))]),
        3,
        backend,
    );

    // A is dispatched, then polled twice
    assert_eq!(e.tick(), S::Running);
    assert_eq!(e.status(a(0)), Some(ActionStatus::Running));
    assert_eq!(e.status(a(1)), Some(ActionStatus::Idle));
    assert_eq!(e.tick(), S::Running);
    // A succeeds; children remain, so the sequence keeps running
    assert_eq!(e.tick(), S::Running);
    assert_eq!(e.status(a(0)), Some(ActionStatus::Succeeded));
    assert_eq!(e.status(a(1)), Some(ActionStatus::Idle));
    // the next tick goes to B
    assert_eq!(e.tick(), S::Running);
    assert_eq!(e.status(a(1)), Some(ActionStatus::Running));
    assert_eq!(e.tick(), S::Running);
    assert_eq!(e.status(a(1)), Some(ActionStatus::Succeeded));
    assert_eq!(e.tick(), S::Running);
    // C is the last child: its success is the sequence's success
    assert_eq!(e.tick(), S::Success);
    assert_eq!(e.status(a(2)), Some(ActionStatus::Succeeded));
    assert_eq!(e.tick(), S::Success);

    let calls: Vec<_> = e.backend().log.clone();
    assert_eq!(
        calls,
        [
            (a(0), "start"),
            (a(0), "poll"),
            (a(0), "poll"),
            (a(1), "start"),
            (a(1), "poll"),
            (a(2), "start"),
            (a(2), "poll"),
        ]
    );
}

#[test]
fn parallel_ticks_every_child() {
    let backend = ScriptedBackend::new()
        .script(a(0), [Finished])
        .script(a(1), [Running, Finished]);
    let mut e = scripted(Parallel(vec![Action(a(0)), Action(a(1))]), 2, backend);

    assert_eq!(e.tick(), S::Running);
    assert_eq!(e.backend().log, [(a(0), "start"), (a(1), "start")]);

    let mark = e.backend().log.len();
    assert_eq!(e.tick(), S::Running);
    assert_eq!(e.backend().polls_since(mark), [a(0), a(1)]);
    assert_eq!(e.status(a(0)), Some(ActionStatus::Succeeded));

    // D has succeeded and is skipped; only E is ticked
    let mark = e.backend().log.len();
    assert_eq!(e.tick(), S::Success);
    assert_eq!(e.backend().polls_since(mark), [a(1)]);
}

#[test]
fn failed_condition_fails_the_tree() {
    let missing = BtNode::Condition {
        predicates: BTreeSet::from([gp("p", &[])]),
        polarity: crate::pddl::Polarity::Positive,
    };
    let backend = ScriptedBackend::new().script(a(0), [Finished]);
    let root = Sequence(vec![
        Sequence(vec![Action(a(0)), missing]),
        Sequence(vec![Action(a(1))]),
    ]);
    let mut e = scripted(root, 2, backend);
    assert_eq!(e.tick(), S::Running);
    assert_eq!(e.tick(), S::Running);
    assert_eq!(e.status(a(0)), Some(ActionStatus::Succeeded));
    // F is false: the inner sequence, then the root, fail
    assert_eq!(e.tick(), S::Failure);
    assert_eq!(e.status(a(1)), Some(ActionStatus::Idle));
    assert_eq!(e.tick(), S::Failure);
    assert_eq!(e.trace().final_status, S::Failure);
    assert!(e.trace().diagnostics[0].contains("(p) is false"));
    assert!(e.backend().log.iter().all(|(u, _)| *u == a(0)));
}

#[test]
fn condition_polarity() {
    let neg = BtNode::Condition {
        predicates: BTreeSet::from([gp("p", &[])]),
        polarity: crate::pddl::Polarity::Negative,
    };
    let mut e = scripted(neg.clone(), 0, ScriptedBackend::new());
    assert_eq!(e.tick(), S::Success);
    let mut e = scripted(neg, 0, ScriptedBackend::new());
    e.world_mut().facts.insert(gp("p", &[]));
    assert_eq!(e.tick(), S::Failure);
}

#[test]
fn wait_follows_the_awaited_instance() {
    let backend = ScriptedBackend::new()
        .script(a(0), [Running, Running, Finished])
        .script(a(1), [Finished]);
    let root = Parallel(vec![
        Action(a(0)),
        Sequence(vec![WaitFor(a(0)), Action(a(1))]),
    ]);
    let mut e = scripted(root, 2, backend);
    assert_eq!(e.tick(), S::Running);
    assert_eq!(e.tick(), S::Running);
    assert_eq!(e.tick(), S::Running);
    assert_eq!(e.status(a(1)), Some(ActionStatus::Idle));
    // a0 succeeds; the later branch sees it within the same tick
    assert_eq!(e.tick(), S::Running);
    assert_eq!(e.status(a(1)), Some(ActionStatus::Idle));
    assert_eq!(e.tick(), S::Running);
    assert_eq!(e.status(a(1)), Some(ActionStatus::Running));
    assert_eq!(e.tick(), S::Success);
}

#[test]
fn shared_instance_is_ticked_once_per_tick_and_runs_once() {
    let backend = ScriptedBackend::new()
        .script(a(0), [Finished])
        .script(a(1), [Finished])
        .script(a(2), [Running, Running, Finished]);
    let root = Parallel(vec![
        Sequence(vec![Action(a(0)), Action(a(2))]),
        Sequence(vec![Action(a(1)), Action(a(2))]),
    ]);
    let mut e = scripted(root, 3, backend);
    let mut ticks = 0;
    while e.tick() == S::Running {
        ticks += 1;
        assert!(ticks < 20);
    }
    assert_eq!(e.tick(), S::Success);
    let log = &e.backend().log;
    assert_eq!(log.iter().filter(|c| *c == &(a(2), "start")).count(), 1);
    assert_eq!(log.iter().filter(|c| *c == &(a(2), "poll")).count(), 3);
    assert_eq!(
        e.trace().events.iter().filter(|ev| ev.unit == a(2)).count(),
        2
    );
}

#[test]
fn backend_errors_fail_the_action() {
    let backend = ScriptedBackend::new().refuse(a(0));
    let mut e = scripted(Action(a(0)), 1, backend);
    assert_eq!(e.tick(), S::Failure);
    assert_eq!(e.status(a(0)), Some(ActionStatus::Failed));
    assert_eq!(e.trace().events.last().unwrap().kind, EventKind::Fail);
    assert!(e.trace().diagnostics[0].contains("refused"));
}

#[test]
fn instance_failure_fails_every_branch() {
    let backend = ScriptedBackend::new()
        .refuse(a(1))
        .script(a(0), [Running; 5]);
    let root = Parallel(vec![Action(a(0)), Action(a(1))]);
    let mut e = scripted(root, 2, backend);
    assert_eq!(e.tick(), S::Failure);
    // the in-flight action is left running
    assert_eq!(e.status(a(0)), Some(ActionStatus::Running));
    assert_eq!(e.tick(), S::Failure);
}

#[test]
fn simple_plan_runs_in_ten_time_units() {
    let s = simple();
    let tree = s.tree().unwrap();
    let mut e = Engine::new(
        tree,
        WorldState::from_problem(&s.problem),
        SimulatedBackend::default(),
    );
    let trace = e.run_to_completion(DEFAULT_TICK_BUDGET).unwrap();
    assert_eq!(trace.final_status, S::Success);
    let events: Vec<_> = trace
        .events
        .iter()
        .map(|ev| (ev.time, ev.unit, ev.kind))
        .collect();
    let t = Time::from_int;
    assert_eq!(
        events,
        [
            (t(0), a(0), EventKind::Start),
            (t(5), a(0), EventKind::End),
            (t(5), a(1), EventKind::Start),
            (t(10), a(1), EventKind::End),
        ]
    );
    assert_eq!(trace.makespan(), t(10));
    assert!(e
        .world()
        .facts
        .contains(&gp("robot_at", &["r2d2", "kitchen"])));
    assert!(!e
        .world()
        .facts
        .contains(&gp("robot_at", &["r2d2", "bedroom"])));
    assert!(!e
        .world()
        .facts
        .contains(&gp("robot_at", &["r2d2", "living"])));
    assert_eq!(
        trace.to_csv(),
        "time,action_id,action,event\n\
         0.000,a0,(move r2d2 bedroom living),start\n\
         5.000,a0,(move r2d2 bedroom living),end\n\
         5.000,a1,(move r2d2 living kitchen),start\n\
         10.000,a1,(move r2d2 living kitchen),end\n"
    );
    assert_eq!(
        trace.to_jsonl().lines().next().unwrap(),
        r#"{"time":0.000,"action_id":"a0","action":"(move r2d2 bedroom living)","event":"start"}"#
    );
    for line in trace.to_jsonl().lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert!(v["time"].is_number());
    }
}

#[test]
fn empty_tree_succeeds_immediately() {
    let s = Scenario::from_texts(fixtures::SIMPLE_DOMAIN, fixtures::SIMPLE_PROBLEM, "").unwrap();
    let mut e = Engine::new(
        s.tree().unwrap(),
        WorldState::from_problem(&s.problem),
        SimulatedBackend::default(),
    );
    let trace = e.run_to_completion(1).unwrap();
    assert_eq!(trace.final_status, S::Success);
    assert!(trace.events.is_empty());
    assert_eq!(trace.makespan(), Time::ZERO);
}

#[test]
fn predecessors_finishing_early_dispatch_early() {
    let s = simple();
    let durations = BTreeMap::from([(a(0), Time::from_int(3))]);
    let mut e = Engine::new(
        s.tree().unwrap(),
        WorldState::from_problem(&s.problem),
        SimulatedBackend::new(durations),
    );
    let trace = e.run_to_completion(DEFAULT_TICK_BUDGET).unwrap();
    // planned at t=5
    assert_eq!(trace.start_of(a(1)), Some(Time::from_int(3)));
    assert_eq!(trace.makespan(), Time::from_int(8));
}

#[test]
fn over_all_violation_fails_the_running_action() {
    let domain = "(define (domain power) (:predicates (power) (ready))
      (:durative-action work :parameters () :duration (= ?duration 5)
        :condition (over all (power)) :effect (and))
      (:durative-action prep :parameters () :duration (= ?duration 2)
        :condition (and) :effect (at end (ready)))
      (:durative-action cut :parameters () :duration (= ?duration 1)
        :condition (at start (ready)) :effect (at start (not (power)))))";
    let s = Scenario::from_texts(
        domain,
        "(define (problem p) (:domain power) (:init (power)) (:goal (and)))",
        "0: (work)\n0: (prep)\n2: (cut)",
    )
    .unwrap();
    let mut e = Engine::new(
        s.tree().unwrap(),
        WorldState::from_problem(&s.problem),
        SimulatedBackend::default(),
    );
    let trace = e.run_to_completion(DEFAULT_TICK_BUDGET).unwrap();
    assert_eq!(trace.final_status, S::Failure);
    let fail = trace
        .events
        .iter()
        .find(|ev| ev.kind == EventKind::Fail)
        .unwrap();
    assert_eq!((fail.unit, fail.time), (a(0), Time::from_int(2)));
    assert_eq!(trace.end_of(a(0)), None);
    assert!(trace.diagnostics.iter().any(|d| d.contains("over all")));
}

#[test]
fn unreachable_wait_is_a_deadlock() {
    let s = simple();
    let units = s.graph().unwrap().units().to_vec();
    // a1 is registered but never placed in the tree
    let tree = BehaviorTree::new(Some(Sequence(vec![WaitFor(a(1)), Action(a(0))])), units).unwrap();
    let mut e = Engine::new(
        tree,
        WorldState::from_problem(&s.problem),
        SimulatedBackend::default(),
    );
    match e.run_to_completion(DEFAULT_TICK_BUDGET) {
        Err(ExecError::Deadlock { clock, waiting, .. }) => {
            assert_eq!(clock, Time::ZERO);
            assert_eq!(waiting, [a(0), a(1)]);
        }
        other => panic!("expected a deadlock, got {other:?}"),
    }
}

#[test]
fn mutual_waits_deadlock_after_progress_stops() {
    let units = plain_units(3);
    let root = Sequence(vec![
        Action(a(2)),
        Parallel(vec![
            Sequence(vec![WaitFor(a(1)), Action(a(0))]),
            Sequence(vec![WaitFor(a(0)), Action(a(1))]),
        ]),
    ]);
    let tree = BehaviorTree::new(Some(root), units).unwrap();
    let mut e = Engine::new(tree, WorldState::default(), SimulatedBackend::default());
    match e.run_to_completion(DEFAULT_TICK_BUDGET) {
        Err(ExecError::Deadlock {
            clock,
            waiting,
            trace,
        }) => {
            assert_eq!(clock, Time::from_int(1));
            assert_eq!(waiting, [a(0), a(1)]);
            assert_eq!(trace.end_of(a(2)), Some(Time::from_int(1)));
        }
        other => panic!("expected a deadlock, got {other:?}"),
    }
}

#[test]
fn tick_budget_is_enforced() {
    let s = simple();
    let mut e = Engine::new(
        s.tree().unwrap(),
        WorldState::from_problem(&s.problem),
        SimulatedBackend::default(),
    );
    assert_eq!(e.run_to_completion(3), Err(ExecError::BudgetExhausted(3)));
}

#[test]
fn world_state_check_and_apply() {
    let s = simple();
    let mut w = WorldState::from_problem(&s.problem);
    let at_bedroom = gp("robot_at", &["r2d2", "bedroom"]);
    let at_living = gp("robot_at", &["r2d2", "living"]);
    assert!(w.check([&at_bedroom], crate::pddl::Polarity::Positive));
    assert!(!w.check([&at_bedroom], crate::pddl::Polarity::Negative));
    assert!(w.check([], crate::pddl::Polarity::Positive));

    let before = w.clone();
    assert!(!w.apply([], []));
    assert_eq!(w, before);

    assert!(w.apply([], [&at_bedroom]));
    assert!(w.apply([&at_living], []));
    assert!(!w.facts.contains(&at_bedroom));
    assert!(w.facts.contains(&at_living));
    // set semantics
    assert!(!w.apply([&at_living], [&at_bedroom]));
    // add wins over delete of the same fact
    w.apply([&at_living], [&at_living]);
    assert!(w.facts.contains(&at_living));
}

#[test]
fn trace_from_intervals_orders_ends_before_starts() {
    let t = Time::from_int;
    let trace = ExecutionTrace::from_intervals([
        (a(1), "(b)".to_string(), t(2), t(3)),
        (a(0), "(a)".to_string(), t(0), t(2)),
    ]);
    let kinds: Vec<_> = trace.events.iter().map(|e| (e.unit, e.kind)).collect();
    assert_eq!(
        kinds,
        [
            (a(0), EventKind::Start),
            (a(0), EventKind::End),
            (a(1), EventKind::Start),
            (a(1), EventKind::End)
        ]
    );
    assert_eq!(trace.makespan(), t(3));
    assert_eq!(trace.intervals(), [(a(0), t(0), t(2)), (a(1), t(2), t(3))]);
}
