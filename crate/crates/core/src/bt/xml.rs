//! Text form of a [`BehaviorTree`].
//!
//! ```xml
//! <BehaviorTree>
//!   <Sequence>
//!     <Action id="a0" name="(move r2d2 bedroom living)"/>
//!     <Action id="a1" name="(move r2d2 living kitchen)"/>
//!   </Sequence>
//!   <Singletons>
//!     <Singleton id="a0" name="(move r2d2 bedroom living)">
//!       <Sequence>
//!         <Condition polarity="positive">
//!           <Predicate>(connected bedroom living)</Predicate>
//!           ...
//!         </Condition>
//!         <ApplyEffects id="a0" phase="at-start"/>
//!         <Execute id="a0"/>
//!         <ApplyEffects id="a0" phase="at-end"/>
//!       </Sequence>
//!     </Singleton>
//!     ...
//!   </Singletons>
//! </BehaviorTree>
//! ```
//!
//! The control structure is the first child of `BehaviorTree` and is absent
//! for the empty tree. `name` attributes are informative; units are resolved
//! through the planning graph on reading.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write;

use roxmltree::{Document, Node};

use super::{ActionInstance, BehaviorTree, BtError, BtNode};
use crate::graph::{PlanGraph, UnitId};
use crate::pddl::{GroundedPredicate, Phase, Polarity};

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            _ => out.push(c),
        }
    }
    out
}

fn phase_name(phase: Phase) -> &'static str {
    match phase {
        Phase::AtStart => "at-start",
        Phase::OverAll => "over-all",
        Phase::AtEnd => "at-end",
    }
}

fn polarity_name(polarity: Polarity) -> &'static str {
    match polarity {
        Polarity::Positive => "positive",
        Polarity::Negative => "negative",
    }
}

fn write_node(out: &mut String, tree: &BehaviorTree, node: &BtNode, depth: usize) {
    let pad = "  ".repeat(depth);
    match node {
        BtNode::Sequence(children) | BtNode::Parallel(children) => {
            let _ = writeln!(out, "{pad}<{}>", node.kind());
            for child in children {
                write_node(out, tree, child, depth + 1);
            }
            let _ = writeln!(out, "{pad}</{}>", node.kind());
        }
        BtNode::Condition {
            predicates,
            polarity,
        } => {
            let _ = writeln!(
                out,
                "{pad}<Condition polarity=\"{}\">",
                polarity_name(*polarity)
            );
            for p in predicates {
                let _ = writeln!(
                    out,
                    "{pad}  <Predicate>{}</Predicate>",
                    escape(&p.to_string())
                );
            }
            let _ = writeln!(out, "{pad}</Condition>");
        }
        BtNode::WaitFor(id) => {
            let _ = writeln!(out, "{pad}<WaitFor id=\"{id}\"/>");
        }
        BtNode::Action(id) => {
            let name = tree
                .instance(*id)
                .map(|i| i.unit.label())
                .unwrap_or_default();
            let _ = writeln!(out, "{pad}<Action id=\"{id}\" name=\"{}\"/>", escape(&name));
        }
        BtNode::ApplyEffects { unit, phase } => {
            let _ = writeln!(
                out,
                "{pad}<ApplyEffects id=\"{unit}\" phase=\"{}\"/>",
                phase_name(*phase)
            );
        }
        BtNode::Execute(id) => {
            let _ = writeln!(out, "{pad}<Execute id=\"{id}\"/>");
        }
    }
}

/// Serializes the tree. The output depends only on the tree's structure.
pub fn to_xml(tree: &BehaviorTree) -> String {
    let mut out = String::from("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<BehaviorTree>\n");
    if let Some(root) = &tree.root {
        write_node(&mut out, tree, root, 1);
    }
    out.push_str("  <Singletons>\n");
    for (id, inst) in tree.registry() {
        let _ = writeln!(
            out,
            "    <Singleton id=\"{id}\" name=\"{}\">",
            escape(&inst.unit.label())
        );
        write_node(&mut out, tree, &inst.expansion, 3);
        out.push_str("    </Singleton>\n");
    }
    out.push_str("  </Singletons>\n</BehaviorTree>\n");
    out
}

struct Reader<'g> {
    graph: &'g PlanGraph,
}

impl Reader<'_> {
    fn attr<'a>(&self, node: Node<'a, '_>, name: &str) -> Result<&'a str, BtError> {
        node.attribute(name).ok_or_else(|| {
            BtError::Syntax(format!(
                "<{}> without `{name}` attribute",
                node.tag_name().name()
            ))
        })
    }

    fn unit(&self, node: Node<'_, '_>) -> Result<UnitId, BtError> {
        let text = self.attr(node, "id")?;
        let id: UnitId = text
            .parse()
            .map_err(|_| BtError::DanglingActionId(text.to_owned()))?;
        self.graph
            .unit(id)
            .map(|_| id)
            .map_err(|_| BtError::DanglingActionId(text.to_owned()))
    }

    fn children<'a, 'i>(node: Node<'a, 'i>) -> impl Iterator<Item = Node<'a, 'i>> {
        node.children().filter(Node::is_element)
    }

    fn node(&self, node: Node<'_, '_>) -> Result<BtNode, BtError> {
        let kind = node.tag_name().name();
        Ok(match kind {
            "Sequence" | "Parallel" => {
                let children = Self::children(node)
                    .map(|c| self.node(c))
                    .collect::<Result<Vec<_>, _>>()?;
                if children.is_empty() {
                    return Err(BtError::Invalid(format!("empty {kind}")));
                }
                if kind == "Sequence" {
                    BtNode::Sequence(children)
                } else {
                    BtNode::Parallel(children)
                }
            }
            "Condition" => {
                let polarity = match self.attr(node, "polarity")? {
                    "positive" => Polarity::Positive,
                    "negative" => Polarity::Negative,
                    other => return Err(BtError::Syntax(format!("unknown polarity `{other}`"))),
                };
                let mut predicates = BTreeSet::new();
                for p in Self::children(node) {
                    if p.tag_name().name() != "Predicate" {
                        return Err(BtError::UnknownNodeKind(p.tag_name().name().to_owned()));
                    }
                    let text = p.text().unwrap_or_default();
                    let fact = GroundedPredicate::parse(text)
                        .map_err(|e| BtError::Syntax(format!("predicate `{text}`: {e}")))?;
                    predicates.insert(fact);
                }
                if predicates.is_empty() {
                    return Err(BtError::Invalid("empty Condition".into()));
                }
                BtNode::Condition {
                    predicates,
                    polarity,
                }
            }
            "WaitFor" => BtNode::WaitFor(self.unit(node)?),
            "Action" => BtNode::Action(self.unit(node)?),
            "Execute" => BtNode::Execute(self.unit(node)?),
            "ApplyEffects" => {
                let phase = match self.attr(node, "phase")? {
                    "at-start" => Phase::AtStart,
                    "at-end" => Phase::AtEnd,
                    other => return Err(BtError::Syntax(format!("unknown phase `{other}`"))),
                };
                BtNode::ApplyEffects {
                    unit: self.unit(node)?,
                    phase,
                }
            }
            other => return Err(BtError::UnknownNodeKind(other.to_owned())),
        })
    }
}

/// Reads a tree written by [`to_xml`], resolving unit ids against `graph`.
/// Every instance starts idle.
pub fn from_xml(text: &str, graph: &PlanGraph) -> Result<BehaviorTree, BtError> {
    let doc = Document::parse(text).map_err(|e| BtError::Syntax(e.to_string()))?;
    let top = doc.root_element();
    if top.tag_name().name() != "BehaviorTree" {
        return Err(BtError::UnknownNodeKind(top.tag_name().name().to_owned()));
    }
    let reader = Reader { graph };
    let mut root = None;
    let mut registry = BTreeMap::new();
    for child in Reader::children(top) {
        if child.tag_name().name() == "Singletons" {
            for s in Reader::children(child) {
                if s.tag_name().name() != "Singleton" {
                    return Err(BtError::UnknownNodeKind(s.tag_name().name().to_owned()));
                }
                let id = reader.unit(s)?;
                let mut body = Reader::children(s);
                let expansion = match (body.next(), body.next()) {
                    (Some(n), None) => reader.node(n)?,
                    _ => {
                        return Err(BtError::Syntax(format!(
                            "singleton {id} must hold exactly one node"
                        )))
                    }
                };
                let mut inst = ActionInstance::new(graph.units()[id.0].clone());
                inst.expansion = expansion;
                if registry.insert(id, inst).is_some() {
                    return Err(BtError::Invalid(format!("singleton {id} declared twice")));
                }
            }
        } else if root.is_none() {
            root = Some(reader.node(child)?);
        } else {
            return Err(BtError::Invalid("more than one root node".into()));
        }
    }
    BehaviorTree::from_parts(root, registry)
}
