use std::collections::BTreeSet;
use std::fmt;

use super::{
    expect_atom, expect_list, parse_typed_list, unsupported_head, write_typed_list, Atom,
    Condition, Domain, DurativeActionSchema, Effect, EffectKind, PddlError, Phase, Polarity,
    PredicateSchema, Result, TypeDecl, TypedName, OBJECT_TYPE,
};
use crate::sexpr::{self, SExpr};
use crate::time::Time;

/// Parses a `(define (domain ...))` document.
pub fn parse_domain(text: &str) -> Result<Domain> {
    let root = sexpr::parse_one(text)?;
    let items = expect_list(&root, "(define ...)")?;
    if items.first().and_then(SExpr::as_atom) != Some("define") {
        return Err(PddlError::syntax(root.pos(), "expected `define`"));
    }
    let header = items
        .get(1)
        .ok_or_else(|| PddlError::syntax(root.pos(), "missing (domain <name>)"))?;
    let name = match header.as_list() {
        Some([kw, name]) if kw.as_atom() == Some("domain") => expect_atom(name, "domain name")?,
        _ => return Err(PddlError::syntax(header.pos(), "expected (domain <name>)")),
    };

    let mut domain = Domain {
        name: name.to_owned(),
        requirements: Vec::new(),
        types: Vec::new(),
        predicates: Vec::new(),
        actions: Vec::new(),
    };

    for section in &items[2..] {
        let list = expect_list(section, "a domain section")?;
        let head = section
            .head()
            .ok_or_else(|| PddlError::syntax(section.pos(), "empty section"))?;
        let body = &list[1..];
        match head {
            ":requirements" => {
                for r in body {
                    domain
                        .requirements
                        .push(expect_atom(r, "a requirement flag")?.to_owned());
                }
            }
            ":types" => {
                for t in parse_typed_list(body)? {
                    if t.name == OBJECT_TYPE {
                        continue;
                    }
                    let parent = (t.ty != OBJECT_TYPE).then_some(t.ty);
                    domain.types.push(TypeDecl {
                        name: t.name,
                        parent,
                    });
                }
            }
            ":predicates" => {
                for p in body {
                    domain.predicates.push(parse_predicate_schema(p)?);
                }
            }
            ":durative-action" => domain.actions.push(parse_action(section.pos(), body)?),
            ":action" => {
                return Err(PddlError::unsupported(
                    section.pos(),
                    "non-durative `:action`",
                ))
            }
            ":functions" => return Err(PddlError::unsupported(section.pos(), "numeric fluents")),
            ":constants" => return Err(PddlError::unsupported(section.pos(), "`:constants`")),
            other => {
                return Err(PddlError::unsupported(
                    section.pos(),
                    format!("domain section `{other}`"),
                ))
            }
        }
    }

    validate(&domain)?;
    Ok(domain)
}

fn parse_predicate_schema(expr: &SExpr) -> Result<PredicateSchema> {
    let list = expect_list(expr, "a predicate declaration")?;
    let (name, params) = list
        .split_first()
        .ok_or_else(|| PddlError::syntax(expr.pos(), "empty predicate declaration"))?;
    Ok(PredicateSchema {
        name: expect_atom(name, "a predicate name")?.to_owned(),
        params: parse_typed_list(params)?,
    })
}

fn parse_action(pos: sexpr::Pos, body: &[SExpr]) -> Result<DurativeActionSchema> {
    let (name, rest) = body
        .split_first()
        .ok_or_else(|| PddlError::syntax(pos, "durative action without a name"))?;
    let name = expect_atom(name, "an action name")?.to_owned();
    if rest.len() % 2 != 0 {
        return Err(PddlError::syntax(
            pos,
            format!("`{name}`: expected keyword/value pairs"),
        ));
    }
    let mut action = DurativeActionSchema {
        name,
        params: Vec::new(),
        duration: Time::ZERO,
        conditions: Vec::new(),
        effects: Vec::new(),
    };
    let mut seen_duration = false;
    for pair in rest.chunks(2) {
        let key = expect_atom(&pair[0], "an action keyword")?;
        let value = &pair[1];
        match key {
            ":parameters" => {
                action.params = parse_typed_list(expect_list(value, "a parameter list")?)?;
            }
            ":duration" => {
                action.duration = parse_duration(&action.name, value)?;
                seen_duration = true;
            }
            ":condition" => parse_conditions(value, None, &mut action.conditions)?,
            ":effect" => parse_effects(value, None, &mut action.effects)?,
            other => {
                return Err(PddlError::unsupported(
                    pair[0].pos(),
                    format!("action keyword `{other}`"),
                ))
            }
        }
    }
    if !seen_duration {
        return Err(PddlError::syntax(
            pos,
            format!("`{}` has no `:duration`", action.name),
        ));
    }
    Ok(action)
}

fn parse_duration(action: &str, expr: &SExpr) -> Result<Time> {
    match expr.as_list() {
        Some([eq, var, value])
            if eq.as_atom() == Some("=") && var.as_atom() == Some("?duration") =>
        {
            let text = value
                .as_atom()
                .ok_or_else(|| PddlError::unsupported(value.pos(), "non-constant durations"))?;
            let duration = Time::parse_decimal(text).ok_or_else(|| PddlError::InvalidDuration {
                action: action.to_owned(),
                value: text.to_owned(),
            })?;
            if duration.is_negative() {
                return Err(PddlError::InvalidDuration {
                    action: action.to_owned(),
                    value: text.to_owned(),
                });
            }
            Ok(duration)
        }
        _ => Err(PddlError::unsupported(
            expr.pos(),
            "duration constraints other than (= ?duration <number>)",
        )),
    }
}

fn timed_phase(expr: &SExpr) -> Option<(Phase, &SExpr)> {
    match expr.as_list()? {
        [a, b, inner] => match (a.as_atom()?, b.as_atom()?) {
            ("at", "start") => Some((Phase::AtStart, inner)),
            ("at", "end") => Some((Phase::AtEnd, inner)),
            ("over", "all") => Some((Phase::OverAll, inner)),
            _ => None,
        },
        _ => None,
    }
}

fn parse_atom(expr: &SExpr) -> Result<Atom> {
    let list = expect_list(expr, "a predicate")?;
    let (head, args) = list
        .split_first()
        .ok_or_else(|| PddlError::syntax(expr.pos(), "empty predicate"))?;
    let predicate = expect_atom(head, "a predicate name")?;
    if let Some(feature) = unsupported_head(predicate) {
        return Err(PddlError::unsupported(expr.pos(), feature));
    }
    let args = args
        .iter()
        .map(|a| {
            let a = expect_atom(a, "a parameter")?;
            if a.starts_with('?') {
                Ok(a.to_owned())
            } else {
                Err(PddlError::unsupported(
                    expr.pos(),
                    format!("constant `{a}` in an action template"),
                ))
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Atom {
        predicate: predicate.to_owned(),
        args,
    })
}

/// Splits an optional `(not ...)` wrapper off a literal.
fn literal(expr: &SExpr) -> Result<(Atom, bool)> {
    if expr.head() == Some("not") {
        match expr.as_list() {
            Some([_, inner]) => Ok((parse_atom(inner)?, false)),
            _ => Err(PddlError::syntax(expr.pos(), "`not` takes one argument")),
        }
    } else {
        Ok((parse_atom(expr)?, true))
    }
}

fn parse_conditions(expr: &SExpr, phase: Option<Phase>, out: &mut Vec<Condition>) -> Result<()> {
    let list = expect_list(expr, "a condition")?;
    if expr.head() == Some("and") {
        for c in &list[1..] {
            parse_conditions(c, phase, out)?;
        }
        return Ok(());
    }
    if let Some((p, inner)) = timed_phase(expr) {
        if phase.is_some() {
            return Err(PddlError::syntax(expr.pos(), "nested time specifiers"));
        }
        return parse_conditions(inner, Some(p), out);
    }
    let phase = phase.ok_or_else(|| {
        PddlError::syntax(
            expr.pos(),
            "durative conditions need `at start`, `over all` or `at end`",
        )
    })?;
    let (atom, positive) = literal(expr)?;
    out.push(Condition {
        phase,
        atom,
        polarity: if positive {
            Polarity::Positive
        } else {
            Polarity::Negative
        },
    });
    Ok(())
}

fn parse_effects(expr: &SExpr, phase: Option<Phase>, out: &mut Vec<Effect>) -> Result<()> {
    let list = expect_list(expr, "an effect")?;
    if expr.head() == Some("and") {
        for e in &list[1..] {
            parse_effects(e, phase, out)?;
        }
        return Ok(());
    }
    if let Some((p, inner)) = timed_phase(expr) {
        if p == Phase::OverAll {
            return Err(PddlError::unsupported(expr.pos(), "`over all` effects"));
        }
        if phase.is_some() {
            return Err(PddlError::syntax(expr.pos(), "nested time specifiers"));
        }
        return parse_effects(inner, Some(p), out);
    }
    let phase = phase.ok_or_else(|| {
        PddlError::syntax(expr.pos(), "durative effects need `at start` or `at end`")
    })?;
    let (atom, positive) = literal(expr)?;
    out.push(Effect {
        phase,
        atom,
        kind: if positive {
            EffectKind::Add
        } else {
            EffectKind::Delete
        },
    });
    Ok(())
}

fn check_unique<'a>(kind: &'static str, names: impl Iterator<Item = &'a str>) -> Result<()> {
    let mut seen = BTreeSet::new();
    for n in names {
        if !seen.insert(n) {
            return Err(PddlError::Duplicate {
                kind,
                name: n.to_owned(),
            });
        }
    }
    Ok(())
}

fn check_params(domain: &Domain, params: &[TypedName]) -> Result<()> {
    for p in params {
        if !domain.has_type(&p.ty) {
            return Err(PddlError::UnknownType(p.ty.clone()));
        }
    }
    Ok(())
}

fn validate(domain: &Domain) -> Result<()> {
    check_unique("type", domain.types.iter().map(|t| t.name.as_str()))?;
    for t in &domain.types {
        if let Some(parent) = &t.parent {
            if !domain.has_type(parent) {
                return Err(PddlError::UnknownType(parent.clone()));
            }
        }
        // a type that never reaches `object` sits on a cycle
        let mut current = t.parent.as_deref();
        let mut hops = 0;
        while let Some(p) = current {
            hops += 1;
            if hops > domain.types.len() {
                return Err(PddlError::CyclicType(t.name.clone()));
            }
            current = domain
                .types
                .iter()
                .find(|d| d.name == p)
                .and_then(|d| d.parent.as_deref());
        }
    }
    check_unique(
        "predicate",
        domain.predicates.iter().map(|p| p.name.as_str()),
    )?;
    check_unique("action", domain.actions.iter().map(|a| a.name.as_str()))?;
    for p in &domain.predicates {
        check_params(domain, &p.params)?;
    }
    for action in &domain.actions {
        check_params(domain, &action.params)?;
        check_unique("parameter", action.params.iter().map(|p| p.name.as_str()))?;
        let atoms = action
            .conditions
            .iter()
            .map(|c| &c.atom)
            .chain(action.effects.iter().map(|e| &e.atom));
        for atom in atoms {
            let schema = domain
                .predicate(&atom.predicate)
                .ok_or_else(|| PddlError::UnknownPredicate(atom.predicate.clone()))?;
            if schema.params.len() != atom.args.len() {
                return Err(PddlError::ArityMismatch {
                    name: atom.predicate.clone(),
                    expected: schema.params.len(),
                    found: atom.args.len(),
                });
            }
            for (var, slot) in atom.args.iter().zip(&schema.params) {
                let param = action
                    .params
                    .iter()
                    .find(|p| &p.name == var)
                    .ok_or_else(|| PddlError::UndeclaredVariable {
                        variable: var.clone(),
                        action: action.name.clone(),
                    })?;
                if !domain.is_subtype(&param.ty, &slot.ty) {
                    return Err(PddlError::TypeMismatch {
                        object: var.clone(),
                        expected: slot.ty.clone(),
                        found: param.ty.clone(),
                        context: format!("{} in {}", atom, action.name),
                    });
                }
            }
        }
    }
    Ok(())
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "(define (domain {})", self.name)?;
        if !self.requirements.is_empty() {
            writeln!(f, "(:requirements {})", self.requirements.join(" "))?;
        }
        if !self.types.is_empty() {
            f.write_str("(:types")?;
            for t in &self.types {
                match &t.parent {
                    Some(p) => write!(f, "\n  {} - {}", t.name, p)?,
                    None => write!(f, "\n  {}", t.name)?,
                }
            }
            f.write_str(")\n")?;
        }
        f.write_str("(:predicates")?;
        for p in &self.predicates {
            write!(f, "\n  ({}", p.name)?;
            if !p.params.is_empty() {
                f.write_str(" ")?;
                write_typed_list(f, &p.params)?;
            }
            f.write_str(")")?;
        }
        f.write_str(")\n")?;
        for a in &self.actions {
            writeln!(f, "(:durative-action {}", a.name)?;
            f.write_str("  :parameters (")?;
            write_typed_list(f, &a.params)?;
            f.write_str(")\n")?;
            writeln!(f, "  :duration (= ?duration {})", a.duration)?;
            f.write_str("  :condition (and")?;
            for c in &a.conditions {
                match c.polarity {
                    Polarity::Positive => write!(f, "\n    ({} {})", c.phase.keyword(), c.atom)?,
                    Polarity::Negative => {
                        write!(f, "\n    ({} (not {}))", c.phase.keyword(), c.atom)?
                    }
                }
            }
            f.write_str(")\n  :effect (and")?;
            for e in &a.effects {
                match e.kind {
                    EffectKind::Add => write!(f, "\n    ({} {})", e.phase.keyword(), e.atom)?,
                    EffectKind::Delete => {
                        write!(f, "\n    ({} (not {}))", e.phase.keyword(), e.atom)?
                    }
                }
            }
            f.write_str("))\n")?;
        }
        f.write_str(")\n")
    }
}
