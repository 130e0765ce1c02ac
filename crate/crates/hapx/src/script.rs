//! Event scripts for the simulated world.
//!
//! One event per line:
//!
//! ```text
//! at 0 abnormal ab_doOpen(d1) true
//! at 5 exo exoClosed(d3)
//! ```
//!
//! Blank lines and lines starting with `#` or `;` are ignored.

use anyhow::{anyhow, bail, Context, Result};
use hapx_core::sim::{EventKind, ScriptedEvent};
use hapx_core::GroundDomain;

pub fn parse_script(text: &str, domain: &GroundDomain) -> Result<Vec<ScriptedEvent>> {
    let mut events = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with(';') {
            continue;
        }
        let event = parse_line(line, domain).with_context(|| format!("script line {}", i + 1))?;
        events.push(event);
    }
    events.sort_by_key(|e| e.step);
    Ok(events)
}

fn parse_line(line: &str, domain: &GroundDomain) -> Result<ScriptedEvent> {
    let words: Vec<&str> = line.split_whitespace().collect();
    let ["at", step, kind, rest @ ..] = words.as_slice() else {
        bail!("expected `at <step> exo|abnormal ...`, found `{line}`");
    };
    let step: usize = step.parse().with_context(|| format!("bad step `{step}`"))?;
    let kind = match (*kind, rest) {
        ("exo", [action]) => {
            let a = domain
                .find_action(action)
                .ok_or_else(|| anyhow!("unknown action `{action}`"))?;
            if !domain.action(a).exogenous {
                bail!("`{action}` is not an exogenous action");
            }
            EventKind::Exogenous(a)
        }
        ("abnormal", [fluent, value]) => EventKind::Abnormality {
            fluent: domain
                .find_fluent(fluent)
                .ok_or_else(|| anyhow!("unknown fluent `{fluent}`"))?,
            value: value
                .parse()
                .map_err(|_| anyhow!("expected true or false, found `{value}`"))?,
        },
        _ => bail!("malformed event `{line}`"),
    };
    Ok(ScriptedEvent { step, kind })
}

/// Renders events back into script lines.
pub fn render_script(events: &[ScriptedEvent], domain: &GroundDomain) -> String {
    let mut s = String::new();
    for e in events {
        match e.kind {
            EventKind::Exogenous(a) => {
                s += &format!("at {} exo {}\n", e.step, domain.action_name(a));
            }
            EventKind::Abnormality { fluent, value } => {
                s += &format!("at {} abnormal {} {value}\n", e.step, domain.fluent(fluent));
            }
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use hapx_core::lang::{ground, parse};

    fn baall() -> GroundDomain {
        ground(&parse(include_str!("../data/baall.pddl")).unwrap()).unwrap()
    }

    #[test]
    fn shipped_script_round_trips() {
        let domain = baall();
        let events = parse_script(include_str!("../data/baall.script"), &domain).unwrap();
        assert_eq!(events.len(), 2);
        let text = render_script(&events, &domain);
        assert_eq!(text, "at 0 abnormal ab_doOpen(d1) true\nat 5 exo exoClosed(d3)\n");
        assert_eq!(parse_script(&text, &domain).unwrap(), events);
    }

    #[test]
    fn events_are_sorted_by_step() {
        let domain = baall();
        let events = parse_script("at 4 exo exoOpened(d2)\n; note\nat 1 exo exoClosed(d1)\n", &domain).unwrap();
        assert_eq!(events.iter().map(|e| e.step).collect::<Vec<_>>(), [1, 4]);
    }

    #[test]
    fn errors_name_the_line() {
        let domain = baall();
        for (text, needle) in [
            ("at x exo exoClosed(d1)", "bad step"),
            ("at 1 exo doOpen(d1)", "not an exogenous action"),
            ("at 1 exo teleport(d1)", "unknown action"),
            ("at 1 abnormal ab_doOpen(d9) true", "unknown fluent"),
            ("at 1 abnormal ab_doOpen(d1) maybe", "true or false"),
            ("\nsoon exo exoClosed(d1)", "expected `at"),
        ] {
            let err = format!("{:#}", parse_script(text, &domain).unwrap_err());
            assert!(err.contains(needle), "{err}");
            assert!(err.contains("script line"), "{err}");
        }
    }
}
