use std::fmt::Write;

use super::PlanGraph;
use crate::pddl::GroundedPredicate;

fn call_form(name: &str, args: &[String]) -> String {
    format!("{}({})", name, args.join(", "))
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Graphviz rendering. Nodes are `a<index>` labelled `t: name(args)`; one
/// edge per causal arc, labelled with the linking predicate. The output is a
/// pure function of the graph.
pub fn to_dot(graph: &PlanGraph) -> String {
    let mut out = String::from("digraph plan {\n  rankdir=LR;\n  node [shape=box];\n");
    for unit in graph.units() {
        let label = format!(
            "{}: {}",
            unit.t,
            call_form(&unit.action.name, &unit.action.args)
        );
        let _ = writeln!(out, "  {} [label=\"{}\"];", unit.id, escape(&label));
    }
    for arc in graph.arcs() {
        let GroundedPredicate { name, args } = &arc.predicate;
        let _ = writeln!(
            out,
            "  {} -> {} [label=\"{}\"];",
            arc.producer,
            arc.consumer,
            escape(&call_form(name, args))
        );
    }
    out.push_str("}\n");
    out
}
