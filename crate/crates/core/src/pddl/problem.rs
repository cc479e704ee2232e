use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::{
    expect_atom, expect_list, parse_typed_list, unsupported_head, Domain, GroundedPredicate,
    PddlError, Problem, Result,
};
use crate::sexpr::{self, SExpr};

/// Parses a `(define (problem ...))` document against an already parsed
/// domain. Objects are type-checked and every init/goal fact is checked
/// against its predicate schema.
pub fn parse_problem(text: &str, domain: &Domain) -> Result<Problem> {
    let root = sexpr::parse_one(text)?;
    let items = expect_list(&root, "(define ...)")?;
    if items.first().and_then(SExpr::as_atom) != Some("define") {
        return Err(PddlError::syntax(root.pos(), "expected `define`"));
    }
    let header = items
        .get(1)
        .ok_or_else(|| PddlError::syntax(root.pos(), "missing (problem <name>)"))?;
    let name = match header.as_list() {
        Some([kw, name]) if kw.as_atom() == Some("problem") => expect_atom(name, "problem name")?,
        _ => return Err(PddlError::syntax(header.pos(), "expected (problem <name>)")),
    };

    let mut problem = Problem {
        name: name.to_owned(),
        domain_name: String::new(),
        objects: BTreeMap::new(),
        init: BTreeSet::new(),
        goal: BTreeSet::new(),
    };
    let mut init_exprs = Vec::new();
    let mut goal_expr = None;

    for section in &items[2..] {
        let list = expect_list(section, "a problem section")?;
        let head = section
            .head()
            .ok_or_else(|| PddlError::syntax(section.pos(), "empty section"))?;
        let body = &list[1..];
        match head {
            ":domain" => match body {
                [d] => problem.domain_name = expect_atom(d, "a domain name")?.to_owned(),
                _ => {
                    return Err(PddlError::syntax(
                        section.pos(),
                        "expected (:domain <name>)",
                    ))
                }
            },
            ":requirements" => {}
            ":objects" => {
                for obj in parse_typed_list(body)? {
                    if problem.objects.insert(obj.name.clone(), obj.ty).is_some() {
                        return Err(PddlError::Duplicate {
                            kind: "object",
                            name: obj.name,
                        });
                    }
                }
            }
            ":init" => init_exprs.extend(body.iter()),
            ":goal" => match body {
                [g] => goal_expr = Some(g),
                _ => {
                    return Err(PddlError::syntax(
                        section.pos(),
                        "expected (:goal <formula>)",
                    ))
                }
            },
            ":metric" => return Err(PddlError::unsupported(section.pos(), "metrics")),
            other => {
                return Err(PddlError::unsupported(
                    section.pos(),
                    format!("problem section `{other}`"),
                ))
            }
        }
    }

    if problem.domain_name != domain.name {
        return Err(PddlError::DomainMismatch {
            expected: domain.name.clone(),
            found: problem.domain_name,
        });
    }
    for ty in problem.objects.values() {
        if !domain.has_type(ty) {
            return Err(PddlError::UnknownType(ty.clone()));
        }
    }
    for expr in init_exprs {
        if expr.head() == Some("not") {
            return Err(PddlError::unsupported(expr.pos(), "negative initial facts"));
        }
        let fact = ground_fact(expr)?;
        check_fact(&fact, domain, &problem)?;
        problem.init.insert(fact);
    }
    if let Some(goal) = goal_expr {
        collect_goal(goal, &mut problem.goal)?;
        for fact in &problem.goal {
            check_fact(fact, domain, &problem)?;
        }
    }
    Ok(problem)
}

fn ground_fact(expr: &SExpr) -> Result<GroundedPredicate> {
    let list = expect_list(expr, "a fact")?;
    let (head, args) = list
        .split_first()
        .ok_or_else(|| PddlError::syntax(expr.pos(), "empty fact"))?;
    let name = expect_atom(head, "a predicate name")?;
    if let Some(feature) = unsupported_head(name) {
        return Err(PddlError::unsupported(expr.pos(), feature));
    }
    let args = args
        .iter()
        .map(|a| {
            let a = expect_atom(a, "an object")?;
            if a.starts_with('?') {
                Err(PddlError::syntax(
                    expr.pos(),
                    format!("variable `{a}` in a ground fact"),
                ))
            } else {
                Ok(a.to_owned())
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(GroundedPredicate {
        name: name.to_owned(),
        args,
    })
}

fn collect_goal(expr: &SExpr, out: &mut BTreeSet<GroundedPredicate>) -> Result<()> {
    match expr.head() {
        Some("and") => {
            for g in &expr.as_list().unwrap_or_default()[1..] {
                collect_goal(g, out)?;
            }
            Ok(())
        }
        Some("not") => Err(PddlError::unsupported(expr.pos(), "negative goals")),
        _ => {
            out.insert(ground_fact(expr)?);
            Ok(())
        }
    }
}

/// Checks a fact's arity and argument types against the domain.
pub(crate) fn check_fact(
    fact: &GroundedPredicate,
    domain: &Domain,
    problem: &Problem,
) -> Result<()> {
    let schema = domain
        .predicate(&fact.name)
        .ok_or_else(|| PddlError::UnknownPredicate(fact.name.clone()))?;
    if schema.params.len() != fact.args.len() {
        return Err(PddlError::ArityMismatch {
            name: fact.name.clone(),
            expected: schema.params.len(),
            found: fact.args.len(),
        });
    }
    for (obj, slot) in fact.args.iter().zip(&schema.params) {
        let ty = problem
            .objects
            .get(obj)
            .ok_or_else(|| PddlError::UnknownObject(obj.clone()))?;
        if !domain.is_subtype(ty, &slot.ty) {
            return Err(PddlError::TypeMismatch {
                object: obj.clone(),
                expected: slot.ty.clone(),
                found: ty.clone(),
                context: fact.to_string(),
            });
        }
    }
    Ok(())
}

impl fmt::Display for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "(define (problem {})", self.name)?;
        writeln!(f, "(:domain {})", self.domain_name)?;
        f.write_str("(:objects")?;
        for (obj, ty) in &self.objects {
            write!(f, "\n  {obj} - {ty}")?;
        }
        f.write_str(")\n(:init")?;
        for fact in &self.init {
            write!(f, "\n  {fact}")?;
        }
        f.write_str(")\n(:goal (and")?;
        for fact in &self.goal {
            write!(f, " {fact}")?;
        }
        f.write_str("))\n)\n")
    }
}
