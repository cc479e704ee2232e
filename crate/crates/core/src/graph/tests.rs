use std::collections::BTreeSet;

use super::*;
use crate::fixtures;
use crate::pddl::{parse_domain, parse_plan, parse_problem};

fn gp(name: &str, args: &[&str]) -> GroundedPredicate {
    GroundedPredicate::new(name, args.iter().copied())
}

fn simple_graph() -> PlanGraph {
    let d = parse_domain(fixtures::SIMPLE_DOMAIN).unwrap();
    let p = parse_problem(fixtures::SIMPLE_PROBLEM, &d).unwrap();
    let plan = parse_plan(fixtures::SIMPLE_PLAN, &d).unwrap();
    build_graph(&plan, &d, &p).unwrap()
}

fn restaurant_graph(robots: usize) -> PlanGraph {
    let (problem, plan) = fixtures::restaurant(robots).unwrap();
    let d = parse_domain(fixtures::RESTAURANT_DOMAIN).unwrap();
    let p = parse_problem(problem, &d).unwrap();
    let plan = parse_plan(plan, &d).unwrap();
    build_graph(&plan, &d, &p).unwrap()
}

#[test]
fn simple_units_before_linking() {
    let d = parse_domain(fixtures::SIMPLE_DOMAIN).unwrap();
    let p = parse_problem(fixtures::SIMPLE_PROBLEM, &d).unwrap();
    let plan = parse_plan(fixtures::SIMPLE_PLAN, &d).unwrap();
    let units = build_action_units(&plan, &d, &p).unwrap();
    assert_eq!(units.len(), 2);
    assert_eq!(units[0].t, Time::ZERO);
    assert_eq!(
        units[0].requirements,
        BTreeSet::from([
            gp("connected", &["bedroom", "living"]),
            gp("robot_at", &["r2d2", "bedroom"])
        ])
    );
    assert_eq!(
        units[0].effects.keys().cloned().collect::<Vec<_>>(),
        [gp("robot_at", &["r2d2", "living"])]
    );
    assert_eq!(units[1].t, Time::from_int(5));
    assert_eq!(
        units[1].requirements,
        BTreeSet::from([
            gp("connected", &["living", "kitchen"]),
            gp("robot_at", &["r2d2", "living"])
        ])
    );
    assert_eq!(
        units[1].effects.keys().cloned().collect::<Vec<_>>(),
        [gp("robot_at", &["r2d2", "kitchen"])]
    );
}

#[test]
fn simple_graph_links_one_arc() {
    let g = simple_graph();
    assert_eq!(
        g.initial_only(),
        &BTreeSet::from([
            gp("connected", &["living", "bedroom"]),
            gp("connected", &["bedroom", "living"]),
            gp("connected", &["living", "kitchen"]),
            gp("connected", &["kitchen", "living"]),
            gp("robot_at", &["r2d2", "bedroom"]),
        ])
    );
    assert!(g.units()[0].requirements.is_empty());
    assert_eq!(
        g.units()[1].requirements,
        BTreeSet::from([gp("robot_at", &["r2d2", "living"])])
    );
    let arcs: Vec<_> = g.arcs().iter().cloned().collect();
    assert_eq!(
        arcs,
        [CausalArc {
            producer: UnitId(0),
            consumer: UnitId(1),
            predicate: gp("robot_at", &["r2d2", "living"]),
        }]
    );
    assert_eq!(g.out_cardinality(UnitId(0)).unwrap(), 1);
    assert_eq!(g.in_cardinality(UnitId(1)).unwrap(), 1);
    assert_eq!(g.in_cardinality(UnitId(0)).unwrap(), 0);
    let roots: Vec<_> = g.roots().iter().map(|u| u.id).collect();
    assert_eq!(roots, [UnitId(0)]);
    assert_eq!(
        g.in_cardinality(UnitId(7)),
        Err(GraphError::UnknownUnit(UnitId(7)))
    );
}

#[test]
fn empty_plan_gives_empty_graph() {
    let d = parse_domain(fixtures::SIMPLE_DOMAIN).unwrap();
    let p = parse_problem(fixtures::SIMPLE_PROBLEM, &d).unwrap();
    assert!(build_action_units(&[], &d, &p).unwrap().is_empty());
    let g = build_graph(&[], &d, &p).unwrap();
    assert!(g.is_empty());
    assert!(g.roots().is_empty());
    assert!(g.arcs().is_empty());
}

#[test]
fn single_action_satisfied_by_init() {
    let d = parse_domain(fixtures::SIMPLE_DOMAIN).unwrap();
    let p = parse_problem(fixtures::SIMPLE_PROBLEM, &d).unwrap();
    let plan = parse_plan("0: (move r2d2 bedroom living)", &d).unwrap();
    let g = build_graph(&plan, &d, &p).unwrap();
    assert_eq!(g.units().len(), 1);
    assert!(g.arcs().is_empty());
    assert!(g.units()[0].requirements.is_empty());
    assert_eq!(g.in_cardinality(UnitId(0)).unwrap(), 0);
    assert_eq!(g.out_cardinality(UnitId(0)).unwrap(), 0);
}

#[test]
fn unlinkable_requirement_fails_verification() {
    let d = parse_domain(fixtures::SIMPLE_DOMAIN).unwrap();
    let p = parse_problem(fixtures::SIMPLE_PROBLEM, &d).unwrap();
    // the robot is never in the kitchen before this step
    let plan = parse_plan("0: (move r2d2 kitchen living)", &d).unwrap();
    let err = build_graph(&plan, &d, &p).unwrap_err();
    assert_eq!(
        err,
        GraphError::UnsupportedRequirement {
            unit: UnitId(0),
            action: "(move r2d2 kitchen living)".into(),
            predicate: gp("robot_at", &["r2d2", "kitchen"]),
        }
    );
}

#[test]
fn equal_time_actions_never_link() {
    let d = parse_domain(fixtures::SIMPLE_DOMAIN).unwrap();
    let p = parse_problem(fixtures::SIMPLE_PROBLEM, &d).unwrap();
    let plan = parse_plan(
        "0: (move r2d2 bedroom living)\n0: (move r2d2 living kitchen)",
        &d,
    )
    .unwrap();
    assert!(matches!(
        build_graph(&plan, &d, &p),
        Err(GraphError::UnsupportedRequirement {
            unit: UnitId(1),
            ..
        })
    ));
}

#[test]
fn two_predicates_between_one_pair_count_once() {
    let d = parse_domain(
        "(define (domain d) (:predicates (p) (q) (r))
         (:durative-action make :parameters () :duration (= ?duration 1)
           :condition (and) :effect (and (at end (p)) (at end (q))))
         (:durative-action use :parameters () :duration (= ?duration 1)
           :condition (and (at start (p)) (at end (q))) :effect (at end (r))))",
    )
    .unwrap();
    let p = parse_problem("(define (problem x) (:domain d) (:init) (:goal (r)))", &d).unwrap();
    let plan = parse_plan("0: (make)\n1: (use)", &d).unwrap();
    let g = build_graph(&plan, &d, &p).unwrap();
    assert_eq!(g.arcs().len(), 2);
    assert_eq!(g.out_cardinality(UnitId(0)).unwrap(), 1);
    assert_eq!(g.in_cardinality(UnitId(1)).unwrap(), 1);
}

#[test]
fn latest_earlier_producer_wins() {
    let d = parse_domain(
        "(define (domain d) (:predicates (p) (r))
         (:durative-action make :parameters () :duration (= ?duration 1)
           :condition (and) :effect (at end (p)))
         (:durative-action remake :parameters () :duration (= ?duration 1)
           :condition (and) :effect (at end (p)))
         (:durative-action use :parameters () :duration (= ?duration 1)
           :condition (at start (p)) :effect (at end (r))))",
    )
    .unwrap();
    let p = parse_problem("(define (problem x) (:domain d) (:init) (:goal (r)))", &d).unwrap();
    // two producers at t=1 (ties go to the later line), one at t=0, and one
    // at the consumer's own start time that must be ignored
    let plan = parse_plan(
        "0: (make)\n1: (make)\n1: (remake)\n3: (use)\n3: (remake)",
        &d,
    )
    .unwrap();
    let g = build_graph(&plan, &d, &p).unwrap();
    let into_use: Vec<_> = g.arcs_into(UnitId(3)).map(|a| a.producer).collect();
    assert_eq!(into_use, [UnitId(2)]);
}

#[test]
fn initial_fact_reproduced_later_supports_early_requirement() {
    let g = restaurant_graph(3);
    let first = &g.units()[0];
    assert_eq!(first.label(), "(move robot1 kitchen table_a)");
    assert!(first.requirements.is_empty());
    assert_eq!(
        first.initially_supported,
        BTreeSet::from([
            gp("robot_at", &["robot1", "kitchen"]),
            gp("robot_available", &["robot1"]),
        ])
    );
    assert!(g
        .initial_only()
        .contains(&gp("connected", &["kitchen", "table_a"])));
    assert!(!g
        .initial_only()
        .contains(&gp("robot_at", &["robot1", "kitchen"])));
}

/// Predecessor sets for the three-robot restaurant plan, traced by hand from
/// the domain's conditions and effects, one row per unit in (t, line) order.
const RESTAURANT_3_PREDECESSORS: [(&str, &[usize]); 26] = [
    ("(move robot1 kitchen table_a)", &[]),
    ("(move robot2 kitchen table_b)", &[]),
    ("(move robot3 kitchen table_c)", &[]),
    ("(ask_order robot2 table_b)", &[1]),
    ("(ask_order robot3 table_c)", &[2]),
    ("(ask_order robot1 table_a)", &[0]),
    ("(move robot1 table_a kitchen)", &[0, 5]),
    ("(move robot2 table_b kitchen)", &[1, 3]),
    ("(move robot3 table_c kitchen)", &[2, 4]),
    ("(prepare_order robot1 kitchen table_a)", &[5, 6]),
    ("(move robot1 kitchen table_a)", &[6, 9]),
    ("(prepare_order robot2 kitchen table_b)", &[3, 7, 9]),
    ("(serve robot1 table_a)", &[9, 10]),
    ("(wait_table table_a)", &[12]),
    ("(move robot2 kitchen table_b)", &[7, 11]),
    ("(prepare_order robot3 kitchen table_c)", &[4, 8, 11]),
    ("(serve robot2 table_b)", &[11, 14]),
    ("(wait_table table_b)", &[16]),
    ("(move robot3 kitchen table_c)", &[8, 15]),
    ("(serve robot3 table_c)", &[15, 18]),
    ("(collect_payment robot1 table_a)", &[10, 12, 13]),
    ("(wait_table table_c)", &[19]),
    ("(move robot1 table_a table_b)", &[10, 20]),
    ("(move robot1 table_b table_c)", &[22]),
    ("(collect_payment robot2 table_b)", &[14, 16, 17]),
    ("(collect_payment robot1 table_c)", &[21, 23]),
];

#[test]
fn restaurant_three_robot_adjacency() {
    let g = restaurant_graph(3);
    assert_eq!(g.units().len(), 26);
    for (unit, (label, preds)) in g.units().iter().zip(RESTAURANT_3_PREDECESSORS) {
        assert_eq!(unit.label(), label);
        let expected: BTreeSet<UnitId> = preds.iter().map(|&i| UnitId(i)).collect();
        assert_eq!(g.predecessors(unit.id).unwrap(), &expected, "{label}");
    }
    let roots: Vec<_> = g.roots().iter().map(|u| u.id.0).collect();
    assert_eq!(roots, [0, 1, 2]);
}

#[test]
fn every_serve_depends_on_its_prepare_and_move() {
    let g = restaurant_graph(3);
    for serve in g.units().iter().filter(|u| u.action.name == "serve") {
        let (robot, table) = (&serve.action.args[0], &serve.action.args[1]);
        let preds = g.predecessors(serve.id).unwrap();
        let has = |name: &str, pred: &dyn Fn(&ActionUnit) -> bool| {
            preds.iter().any(|&p| {
                let u = &g.units()[p.0];
                u.action.name == name && pred(u)
            })
        };
        assert!(has("prepare_order", &|u| &u.action.args[2] == table));
        assert!(has("move", &|u| &u.action.args[0] == robot
            && &u.action.args[2] == table));
    }
}

#[test]
fn all_restaurant_fixtures_verify() {
    for robots in 1..=4 {
        let g = restaurant_graph(robots);
        for arc in g.arcs() {
            let p = &g.units()[arc.producer.0];
            let c = &g.units()[arc.consumer.0];
            assert!(p.t < c.t);
            // the plan timestamps leave room for every producer to finish
            assert!(p.t + p.action.duration <= c.t, "{robots} robots: {arc:?}");
        }
        assert!(g
            .initial_only()
            .iter()
            .all(|f| g.units().iter().all(|u| !u.produces(f))));
    }
}

#[test]
fn dot_output() {
    let dot = to_dot(&simple_graph());
    assert_eq!(
        dot,
        "digraph plan {\n  rankdir=LR;\n  node [shape=box];\n  \
         a0 [label=\"0: move(r2d2, bedroom, living)\"];\n  \
         a1 [label=\"5: move(r2d2, living, kitchen)\"];\n  \
         a0 -> a1 [label=\"robot_at(r2d2, living)\"];\n}\n"
    );
    let d = parse_domain(fixtures::SIMPLE_DOMAIN).unwrap();
    let p = parse_problem(fixtures::SIMPLE_PROBLEM, &d).unwrap();
    let empty = to_dot(&build_graph(&[], &d, &p).unwrap());
    assert_eq!(
        empty,
        "digraph plan {\n  rankdir=LR;\n  node [shape=box];\n}\n"
    );
}

#[test]
fn dot_is_deterministic_and_golden() {
    let first = to_dot(&restaurant_graph(3));
    let second = to_dot(&restaurant_graph(3));
    assert_eq!(first, second);
    assert_eq!(
        first.matches("[label=").count() - restaurant_graph(3).arcs().len(),
        26
    );
    assert_eq!(
        first,
        include_str!("../../tests/golden/restaurant_3robots.dot")
    );
}

#[test]
fn unit_id_text_form() {
    assert_eq!(UnitId(12).to_string(), "a12");
    assert_eq!("a12".parse::<UnitId>(), Ok(UnitId(12)));
    assert!("12".parse::<UnitId>().is_err());
}
