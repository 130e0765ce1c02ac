//! Session events and their line format.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use super::ControlDecision;
use crate::kernel::NodeId;
use crate::lang::{ActionId, GroundDomain, Lit};
use crate::planner::ConditionalPlan;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Event {
    Goal { lit: Lit, maintenance: bool },
    Exec { action: ActionId, node: NodeId },
    Sensed { lit: Lit, step: usize },
    Plan(ConditionalPlan),
    Decision(ControlDecision),
    /// An exogenous occurrence adopted to explain an observation.
    Explained { action: ActionId, node: NodeId },
    /// An observation no exogenous action could explain.
    Unexplained { lit: Lit, step: usize },
}

impl Event {
    pub fn render(&self, d: &GroundDomain) -> String {
        match self {
            Event::Goal { lit, maintenance } => format!(
                "goal({},{})",
                if *maintenance { "maintenance" } else { "weak" },
                d.lit_name(*lit)
            ),
            Event::Exec { action, node } => format!(
                "exec({},{},{})",
                d.action_name(*action),
                node.step,
                node.branch
            ),
            Event::Sensed { lit, step } => format!("sensed({},{step})", d.lit_name(*lit)),
            Event::Plan(plan) => {
                let mut s = format!("plan{{horizon={}", plan.horizon);
                for (n, a) in plan.occurrences() {
                    s.push_str(&format!(" occ({},{},{})", d.action_name(a), n.step, n.branch));
                }
                s.push('}');
                s
            }
            Event::Decision(dec) => format!("decision({})", dec.render(d)),
            Event::Explained { action, node } => format!(
                "explained(occ({},{},{}))",
                d.action_name(*action),
                node.step,
                node.branch
            ),
            Event::Unexplained { lit, step } => {
                format!("unexplained({},{step})", d.lit_name(*lit))
            }
        }
    }

    /// Parses one rendered line back into an event.
    pub fn parse(line: &str, d: &GroundDomain) -> Result<Event, LogError> {
        let line = line.trim();
        let err = || LogError(line.to_string());
        if let Some(body) = line.strip_prefix("plan{").and_then(|r| r.strip_suffix('}')) {
            let mut parts = body.split_whitespace();
            let horizon = parts
                .next()
                .and_then(|h| h.strip_prefix("horizon="))
                .and_then(|h| h.parse().ok())
                .ok_or_else(err)?;
            let mut assignments: BTreeMap<NodeId, Vec<ActionId>> = BTreeMap::new();
            for p in parts {
                let (a, n) = parse_occ(p.strip_prefix("occ(").ok_or_else(err)?, d).ok_or_else(err)?;
                assignments.entry(n).or_default().push(a);
            }
            return Ok(Event::Plan(ConditionalPlan {
                assignments,
                horizon,
            }));
        }
        let (head, rest) = line.split_once('(').ok_or_else(err)?;
        let inner = rest.strip_suffix(')').ok_or_else(err)?;
        match head {
            "goal" => {
                let (kind, l) = inner.split_once(',').ok_or_else(err)?;
                Ok(Event::Goal {
                    lit: d.parse_lit(l).ok_or_else(err)?,
                    maintenance: kind == "maintenance",
                })
            }
            "exec" => {
                let (action, node) = parse_occ(rest, d).ok_or_else(err)?;
                Ok(Event::Exec { action, node })
            }
            "sensed" => {
                let (l, t) = inner.rsplit_once(',').ok_or_else(err)?;
                Ok(Event::Sensed {
                    lit: d.parse_lit(l).ok_or_else(err)?,
                    step: t.parse().map_err(|_| err())?,
                })
            }
            "unexplained" => {
                let (l, t) = inner.rsplit_once(',').ok_or_else(err)?;
                Ok(Event::Unexplained {
                    lit: d.parse_lit(l).ok_or_else(err)?,
                    step: t.parse().map_err(|_| err())?,
                })
            }
            "explained" => {
                let (action, node) =
                    parse_occ(inner.strip_prefix("occ(").ok_or_else(err)?, d).ok_or_else(err)?;
                Ok(Event::Explained { action, node })
            }
            "decision" => ControlDecision::parse(inner, d)
                .map(Event::Decision)
                .ok_or_else(err),
            _ => Err(err()),
        }
    }
}

/// Parses `name(args),t,b)`: the tail of an `occ(...)` or `exec(...)` term.
fn parse_occ(text: &str, d: &GroundDomain) -> Option<(ActionId, NodeId)> {
    let body = text.strip_suffix(')')?;
    let (rest, b) = body.rsplit_once(',')?;
    let (action, t) = rest.rsplit_once(',')?;
    Some((
        d.find_action(action)?,
        NodeId::new(t.parse().ok()?, b.parse().ok()?),
    ))
}

impl ControlDecision {
    pub fn render(&self, d: &GroundDomain) -> String {
        match self {
            ControlDecision::Execute { action, node } => format!(
                "execute({},{},{})",
                d.action_name(*action),
                node.step,
                node.branch
            ),
            ControlDecision::WaitForHorizon { horizon } => format!("wait_for_horizon({horizon})"),
            ControlDecision::Replan { horizon } => format!("replan({horizon})"),
            ControlDecision::GoalAchieved => "goal_achieved".into(),
            ControlDecision::Unsolvable => "unsolvable".into(),
        }
    }

    fn parse(text: &str, d: &GroundDomain) -> Option<Self> {
        match text {
            "goal_achieved" => return Some(ControlDecision::GoalAchieved),
            "unsolvable" => return Some(ControlDecision::Unsolvable),
            _ => {}
        }
        let (head, rest) = text.split_once('(')?;
        let num = || rest.strip_suffix(')')?.parse().ok();
        match head {
            "execute" => {
                let (action, node) = parse_occ(rest, d)?;
                Some(ControlDecision::Execute { action, node })
            }
            "wait_for_horizon" => Some(ControlDecision::WaitForHorizon { horizon: num()? }),
            "replan" => Some(ControlDecision::Replan { horizon: num()? }),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LogError(pub String);

impl fmt::Display for LogError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "malformed session log line: {}", self.0)
    }
}

impl core::error::Error for LogError {}
