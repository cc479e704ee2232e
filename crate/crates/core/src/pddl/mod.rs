//! The supported PDDL subset: typed durative-action domains, conjunctive
//! problems and timestamped plans.
//!
//! Identifiers are case-insensitive and normalized to lower case on read.
//! Anything outside the subset (classical `:action`, numeric fluents,
//! disjunctions, quantifiers, conditional effects, `:constants`) is rejected
//! with [`PddlError::Unsupported`].

mod domain;
mod ground;
mod plan;
mod problem;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;

use crate::sexpr::{self, Pos, SExpr, SyntaxError};
use crate::time::Time;

pub use domain::parse_domain;
pub use ground::ground_action;
pub use plan::parse_plan;
pub use problem::parse_problem;

/// The implicit root of every type hierarchy.
pub const OBJECT_TYPE: &str = "object";

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PddlError {
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error("unsupported PDDL feature at {pos}: {feature}")]
    Unsupported { feature: String, pos: Pos },
    #[error("unknown type `{0}`")]
    UnknownType(String),
    #[error("cyclic type hierarchy through `{0}`")]
    CyclicType(String),
    #[error("unknown predicate `{0}`")]
    UnknownPredicate(String),
    #[error("unknown action `{0}`")]
    UnknownAction(String),
    #[error("unknown object `{0}`")]
    UnknownObject(String),
    #[error("variable `{variable}` is not a parameter of `{action}`")]
    UndeclaredVariable { variable: String, action: String },
    #[error("duplicate {kind} `{name}`")]
    Duplicate { kind: &'static str, name: String },
    #[error("`{name}` expects {expected} argument(s), found {found}")]
    ArityMismatch {
        name: String,
        expected: usize,
        found: usize,
    },
    #[error("`{object}` has type `{found}` but `{context}` expects `{expected}`")]
    TypeMismatch {
        object: String,
        expected: String,
        found: String,
        context: String,
    },
    #[error("problem is for domain `{found}` but domain `{expected}` was given")]
    DomainMismatch { expected: String, found: String },
    #[error("invalid duration `{value}` for `{action}`")]
    InvalidDuration { action: String, value: String },
    #[error("line {line}: {source}")]
    AtLine {
        line: usize,
        #[source]
        source: Box<PddlError>,
    },
}

impl PddlError {
    pub(crate) fn syntax(pos: Pos, message: impl Into<String>) -> PddlError {
        PddlError::Syntax(SyntaxError {
            pos,
            message: message.into(),
        })
    }

    pub(crate) fn unsupported(pos: Pos, feature: impl Into<String>) -> PddlError {
        PddlError::Unsupported {
            feature: feature.into(),
            pos,
        }
    }

    /// Line number in the source file, when the error carries one.
    pub fn line(&self) -> Option<usize> {
        match self {
            PddlError::Syntax(e) => Some(e.pos.line),
            PddlError::Unsupported { pos, .. } => Some(pos.line),
            PddlError::AtLine { line, .. } => Some(*line),
            _ => None,
        }
    }
}

pub type Result<T, E = PddlError> = std::result::Result<T, E>;

/// A predicate applied to concrete objects.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct GroundedPredicate {
    pub name: String,
    pub args: Vec<String>,
}

impl GroundedPredicate {
    pub fn new<N, A, S>(name: N, args: A) -> GroundedPredicate
    where
        N: Into<String>,
        A: IntoIterator<Item = S>,
        S: Into<String>,
    {
        GroundedPredicate {
            name: name.into().to_lowercase(),
            args: args.into_iter().map(|a| a.into().to_lowercase()).collect(),
        }
    }

    /// Parses the `(name arg ...)` form produced by `Display`.
    pub fn parse(text: &str) -> Result<GroundedPredicate> {
        let expr = sexpr::parse_one(text)?;
        let items = expr
            .as_list()
            .ok_or_else(|| PddlError::syntax(expr.pos(), "expected a predicate list"))?;
        let mut atoms = items.iter().map(|i| {
            i.as_atom()
                .map(str::to_owned)
                .ok_or_else(|| PddlError::syntax(i.pos(), "expected an identifier"))
        });
        let name = atoms
            .next()
            .ok_or_else(|| PddlError::syntax(expr.pos(), "empty predicate"))??;
        let args = atoms.collect::<Result<Vec<_>>>()?;
        Ok(GroundedPredicate { name, args })
    }
}

impl fmt::Display for GroundedPredicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}", self.name)?;
        for a in &self.args {
            write!(f, " {a}")?;
        }
        f.write_str(")")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Phase {
    AtStart,
    OverAll,
    AtEnd,
}

impl Phase {
    pub fn keyword(self) -> &'static str {
        match self {
            Phase::AtStart => "at start",
            Phase::OverAll => "over all",
            Phase::AtEnd => "at end",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Polarity {
    Positive,
    Negative,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum EffectKind {
    Add,
    Delete,
}

/// A predicate applied to action parameters (`?r`, `?from`, ...).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Atom {
    pub predicate: String,
    pub args: Vec<String>,
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}", self.predicate)?;
        for a in &self.args {
            write!(f, " {a}")?;
        }
        f.write_str(")")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Condition {
    pub phase: Phase,
    pub atom: Atom,
    pub polarity: Polarity,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Effect {
    pub phase: Phase,
    pub atom: Atom,
    pub kind: EffectKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypedName {
    pub name: String,
    pub ty: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypeDecl {
    pub name: String,
    /// `None` means the type derives directly from `object`.
    pub parent: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PredicateSchema {
    pub name: String,
    pub params: Vec<TypedName>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DurativeActionSchema {
    pub name: String,
    pub params: Vec<TypedName>,
    pub duration: Time,
    pub conditions: Vec<Condition>,
    pub effects: Vec<Effect>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Domain {
    pub name: String,
    pub requirements: Vec<String>,
    pub types: Vec<TypeDecl>,
    pub predicates: Vec<PredicateSchema>,
    pub actions: Vec<DurativeActionSchema>,
}

impl Domain {
    pub fn action(&self, name: &str) -> Option<&DurativeActionSchema> {
        self.actions.iter().find(|a| a.name == name)
    }

    pub fn predicate(&self, name: &str) -> Option<&PredicateSchema> {
        self.predicates.iter().find(|p| p.name == name)
    }

    pub fn has_type(&self, name: &str) -> bool {
        name == OBJECT_TYPE || self.types.iter().any(|t| t.name == name)
    }

    fn parent_of(&self, name: &str) -> Option<&str> {
        self.types
            .iter()
            .find(|t| t.name == name)
            .and_then(|t| t.parent.as_deref())
    }

    /// True when `ty` is `ancestor` or transitively derives from it.
    pub fn is_subtype(&self, ty: &str, ancestor: &str) -> bool {
        if ancestor == OBJECT_TYPE {
            return true;
        }
        let mut current = Some(ty);
        let mut hops = 0;
        while let Some(t) = current {
            if t == ancestor {
                return true;
            }
            hops += 1;
            if hops > self.types.len() {
                // cyclic hierarchy; rejected at parse time
                return false;
            }
            current = self.parent_of(t);
        }
        false
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Problem {
    pub name: String,
    pub domain_name: String,
    /// Object name to declared type.
    pub objects: BTreeMap<String, String>,
    pub init: BTreeSet<GroundedPredicate>,
    pub goal: BTreeSet<GroundedPredicate>,
}

/// One line of a timestamped plan, with its duration resolved.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlanStep {
    pub t: Time,
    pub action_name: String,
    pub args: Vec<String>,
    pub duration: Time,
    /// 1-based source line.
    pub line: usize,
}

impl PlanStep {
    /// `(name arg ...)` as written in the plan.
    pub fn label(&self) -> String {
        let mut s = format!("({}", self.action_name);
        for a in &self.args {
            s.push(' ');
            s.push_str(a);
        }
        s.push(')');
        s
    }
}

/// A durative action with every parameter replaced by an object.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct GroundedAction {
    pub name: String,
    pub args: Vec<String>,
    pub duration: Time,
    pub req_at_start: BTreeSet<GroundedPredicate>,
    pub req_over_all: BTreeSet<GroundedPredicate>,
    pub req_at_end: BTreeSet<GroundedPredicate>,
    /// Negative conditions. Checked at run time, never linked in the graph.
    pub neg_at_start: BTreeSet<GroundedPredicate>,
    pub neg_over_all: BTreeSet<GroundedPredicate>,
    pub neg_at_end: BTreeSet<GroundedPredicate>,
    pub add_at_start: BTreeSet<GroundedPredicate>,
    pub add_at_end: BTreeSet<GroundedPredicate>,
    pub del_at_start: BTreeSet<GroundedPredicate>,
    pub del_at_end: BTreeSet<GroundedPredicate>,
}

impl GroundedAction {
    pub fn label(&self) -> String {
        let mut s = format!("({}", self.name);
        for a in &self.args {
            s.push(' ');
            s.push_str(a);
        }
        s.push(')');
        s
    }

    /// Positive requirements of every phase.
    pub fn requirements(&self) -> BTreeSet<GroundedPredicate> {
        self.req_at_start
            .iter()
            .chain(&self.req_over_all)
            .chain(&self.req_at_end)
            .cloned()
            .collect()
    }

    pub fn additions(&self, phase: Phase) -> &BTreeSet<GroundedPredicate> {
        match phase {
            Phase::AtEnd => &self.add_at_end,
            _ => &self.add_at_start,
        }
    }

    pub fn deletions(&self, phase: Phase) -> &BTreeSet<GroundedPredicate> {
        match phase {
            Phase::AtEnd => &self.del_at_end,
            _ => &self.del_at_start,
        }
    }
}

pub(crate) fn expect_atom<'a>(expr: &'a SExpr, what: &str) -> Result<&'a str> {
    expr.as_atom()
        .ok_or_else(|| PddlError::syntax(expr.pos(), format!("expected {what}")))
}

pub(crate) fn expect_list<'a>(expr: &'a SExpr, what: &str) -> Result<&'a [SExpr]> {
    expr.as_list()
        .ok_or_else(|| PddlError::syntax(expr.pos(), format!("expected {what}")))
}

/// Parses `a b - t1 c - t2 d` into `[(a,t1), (b,t1), (c,t2), (d,object)]`.
pub(crate) fn parse_typed_list(items: &[SExpr]) -> Result<Vec<TypedName>> {
    let mut out = Vec::new();
    let mut pending: Vec<String> = Vec::new();
    let mut iter = items.iter();
    while let Some(item) = iter.next() {
        if let Some(list) = item.as_list() {
            let feature = match list.first().and_then(SExpr::as_atom) {
                Some("either") => "`either` types",
                _ => "nested list in typed list",
            };
            return Err(PddlError::unsupported(item.pos(), feature));
        }
        let name = expect_atom(item, "a name")?;
        if name == "-" {
            let ty_expr = iter
                .next()
                .ok_or_else(|| PddlError::syntax(item.pos(), "missing type after `-`"))?;
            if ty_expr.head() == Some("either") {
                return Err(PddlError::unsupported(ty_expr.pos(), "`either` types"));
            }
            let ty = expect_atom(ty_expr, "a type name")?;
            if pending.is_empty() {
                return Err(PddlError::syntax(item.pos(), "`-` without preceding names"));
            }
            out.extend(pending.drain(..).map(|name| TypedName {
                name,
                ty: ty.to_owned(),
            }));
        } else {
            pending.push(name.to_owned());
        }
    }
    out.extend(pending.into_iter().map(|name| TypedName {
        name,
        ty: OBJECT_TYPE.to_owned(),
    }));
    Ok(out)
}

/// Heads that mark constructs outside the supported subset.
pub(crate) fn unsupported_head(head: &str) -> Option<&'static str> {
    Some(match head {
        "or" => "disjunctive conditions",
        "imply" => "implications",
        "forall" => "universal quantification",
        "exists" => "existential quantification",
        "when" => "conditional effects",
        "=" | "<" | ">" | "<=" | ">=" => "numeric comparisons",
        "increase" | "decrease" | "assign" | "scale-up" | "scale-down" => "numeric effects",
        _ => return None,
    })
}

pub(crate) fn write_typed_list(f: &mut fmt::Formatter<'_>, items: &[TypedName]) -> fmt::Result {
    for (i, item) in items.iter().enumerate() {
        if i > 0 {
            f.write_str(" ")?;
        }
        write!(f, "{} - {}", item.name, item.ty)?;
    }
    Ok(())
}
