use std::collections::{BTreeMap, BTreeSet};

use super::{
    Atom, Domain, DurativeActionSchema, EffectKind, GroundedAction, GroundedPredicate, PddlError,
    Phase, Polarity, Problem, Result,
};
use crate::time::Time;

/// Substitutes `args` for the schema's parameters.
///
/// Arguments are type-checked against the problem's object declarations. The
/// duration defaults to the schema's constant duration.
pub fn ground_action(
    domain: &Domain,
    problem: &Problem,
    schema: &DurativeActionSchema,
    args: &[String],
    duration: Option<Time>,
) -> Result<GroundedAction> {
    if args.len() != schema.params.len() {
        return Err(PddlError::ArityMismatch {
            name: schema.name.clone(),
            expected: schema.params.len(),
            found: args.len(),
        });
    }
    let mut binding = BTreeMap::new();
    for (param, arg) in schema.params.iter().zip(args) {
        let ty = problem
            .objects
            .get(arg)
            .ok_or_else(|| PddlError::UnknownObject(arg.clone()))?;
        if !domain.is_subtype(ty, &param.ty) {
            return Err(PddlError::TypeMismatch {
                object: arg.clone(),
                expected: param.ty.clone(),
                found: ty.clone(),
                context: format!("{} {}", schema.name, param.name),
            });
        }
        binding.insert(param.name.as_str(), arg.as_str());
    }

    let subst = |atom: &Atom| -> Result<GroundedPredicate> {
        let args = atom
            .args
            .iter()
            .map(|v| {
                binding
                    .get(v.as_str())
                    .map(|o| (*o).to_owned())
                    .ok_or_else(|| PddlError::UndeclaredVariable {
                        variable: v.clone(),
                        action: schema.name.clone(),
                    })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(GroundedPredicate {
            name: atom.predicate.clone(),
            args,
        })
    };

    let mut g = GroundedAction {
        name: schema.name.clone(),
        args: args.to_vec(),
        duration: duration.unwrap_or(schema.duration),
        ..GroundedAction::default()
    };
    for c in &schema.conditions {
        let fact = subst(&c.atom)?;
        let set: &mut BTreeSet<_> = match (c.polarity, c.phase) {
            (Polarity::Positive, Phase::AtStart) => &mut g.req_at_start,
            (Polarity::Positive, Phase::OverAll) => &mut g.req_over_all,
            (Polarity::Positive, Phase::AtEnd) => &mut g.req_at_end,
            (Polarity::Negative, Phase::AtStart) => &mut g.neg_at_start,
            (Polarity::Negative, Phase::OverAll) => &mut g.neg_over_all,
            (Polarity::Negative, Phase::AtEnd) => &mut g.neg_at_end,
        };
        set.insert(fact);
    }
    for e in &schema.effects {
        let fact = subst(&e.atom)?;
        let set: &mut BTreeSet<_> = match (e.kind, e.phase) {
            (EffectKind::Add, Phase::AtEnd) => &mut g.add_at_end,
            (EffectKind::Add, _) => &mut g.add_at_start,
            (EffectKind::Delete, Phase::AtEnd) => &mut g.del_at_end,
            (EffectKind::Delete, _) => &mut g.del_at_start,
        };
        set.insert(fact);
    }
    Ok(g)
}
