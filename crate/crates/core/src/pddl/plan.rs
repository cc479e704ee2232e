use super::{Domain, PddlError, PlanStep, Result};
use crate::sexpr::{self, Pos};
use crate::time::Time;

/// Parses a timestamped plan.
///
/// Each non-blank line has the form `<t>[:] (<name> <arg>*) [<duration>]`.
/// The colon after the timestamp is optional and so is the duration column,
/// which may also be written in brackets (`[5.000]`). A missing duration is
/// taken from the action schema. The result is sorted by start time; steps
/// with equal start times keep their input order.
pub fn parse_plan(text: &str, domain: &Domain) -> Result<Vec<PlanStep>> {
    let mut steps = Vec::new();
    for (index, raw) in text.lines().enumerate() {
        let line = index + 1;
        let content = raw.split(';').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let step = parse_line(content, line, domain).map_err(|e| match e {
            PddlError::Syntax(mut s) => {
                s.pos.line = line;
                PddlError::Syntax(s)
            }
            other => PddlError::AtLine {
                line,
                source: Box::new(other),
            },
        })?;
        steps.push(step);
    }
    steps.sort_by(|a, b| a.t.cmp(&b.t).then(a.line.cmp(&b.line)));
    Ok(steps)
}

fn syntax(col: usize, message: impl Into<String>) -> PddlError {
    PddlError::syntax(Pos { line: 0, col }, message)
}

fn parse_line(content: &str, line: usize, domain: &Domain) -> Result<PlanStep> {
    let open = content
        .find('(')
        .ok_or_else(|| syntax(1, "expected `(action ...)`"))?;
    let close = content[open..]
        .find(')')
        .map(|i| open + i)
        .ok_or_else(|| syntax(open + 1, "unclosed `(`"))?;

    let stamp = content[..open].trim();
    let stamp = stamp.strip_suffix(':').unwrap_or(stamp).trim();
    let t = Time::parse_decimal(stamp)
        .ok_or_else(|| syntax(1, format!("invalid start time `{stamp}`")))?;
    if t.is_negative() {
        return Err(syntax(1, format!("negative start time `{stamp}`")));
    }

    let call = sexpr::parse_one(&content[open..=close])
        .map_err(|e| syntax(open + e.pos.col, e.message))?;
    let items = call.as_list().unwrap_or_default();
    let mut words = items.iter().map(|i| i.as_atom());
    let action_name = match words.next() {
        Some(Some(name)) => name.to_owned(),
        _ => return Err(syntax(open + 1, "expected an action name")),
    };
    let args = words
        .map(|w| {
            w.map(str::to_owned)
                .ok_or_else(|| syntax(open + 1, "nested list in action call"))
        })
        .collect::<Result<Vec<_>>>()?;

    let schema = domain
        .action(&action_name)
        .ok_or_else(|| PddlError::UnknownAction(action_name.clone()))?;
    if schema.params.len() != args.len() {
        return Err(PddlError::ArityMismatch {
            name: action_name,
            expected: schema.params.len(),
            found: args.len(),
        });
    }

    let tail = content[close + 1..].trim();
    let duration = if tail.is_empty() {
        schema.duration
    } else {
        let body = tail
            .strip_prefix('[')
            .and_then(|s| s.strip_suffix(']'))
            .unwrap_or(tail)
            .trim();
        Time::parse_decimal(body)
            .ok_or_else(|| syntax(close + 2, format!("invalid duration `{tail}`")))?
    };
    if duration.is_negative() || duration.is_zero() {
        return Err(PddlError::InvalidDuration {
            action: action_name,
            value: duration.to_string(),
        });
    }

    Ok(PlanStep {
        t,
        action_name,
        args,
        duration,
        line,
    })
}
