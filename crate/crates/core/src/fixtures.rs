//! Bundled example inputs.
//!
//! The `simple` domain, problem and two-step plan describe one robot crossing
//! three rooms. The restaurant domain models waiter robots serving three
//! tables. The three-robot plan is the reference scenario; the one-, two- and
//! four-robot plans solve the same task with a different fleet.

pub const SIMPLE_DOMAIN: &str = include_str!("../fixtures/simple_domain.pddl");
pub const SIMPLE_PROBLEM: &str = include_str!("../fixtures/simple_problem.pddl");
pub const SIMPLE_PLAN: &str = include_str!("../fixtures/simple.plan");

pub const RESTAURANT_DOMAIN: &str = include_str!("../fixtures/restaurant_domain.pddl");
pub const RESTAURANT_1_PROBLEM: &str = include_str!("../fixtures/restaurant_1robots_problem.pddl");
pub const RESTAURANT_2_PROBLEM: &str = include_str!("../fixtures/restaurant_2robots_problem.pddl");
pub const RESTAURANT_3_PROBLEM: &str = include_str!("../fixtures/restaurant_3robots_problem.pddl");
pub const RESTAURANT_4_PROBLEM: &str = include_str!("../fixtures/restaurant_4robots_problem.pddl");
pub const RESTAURANT_1_PLAN: &str = include_str!("../fixtures/restaurant_1robots.plan");
pub const RESTAURANT_2_PLAN: &str = include_str!("../fixtures/restaurant_2robots.plan");
pub const RESTAURANT_3_PLAN: &str = include_str!("../fixtures/restaurant_3robots.plan");
pub const RESTAURANT_4_PLAN: &str = include_str!("../fixtures/restaurant_4robots.plan");

/// `(problem, plan)` for the restaurant scenario with `robots` robots
/// (1 to 4).
pub fn restaurant(robots: usize) -> Option<(&'static str, &'static str)> {
    Some(match robots {
        1 => (RESTAURANT_1_PROBLEM, RESTAURANT_1_PLAN),
        2 => (RESTAURANT_2_PROBLEM, RESTAURANT_2_PLAN),
        3 => (RESTAURANT_3_PROBLEM, RESTAURANT_3_PLAN),
        4 => (RESTAURANT_4_PROBLEM, RESTAURANT_4_PLAN),
        _ => return None,
    })
}
