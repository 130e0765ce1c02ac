//! Weak conditional planning over the epistemic tree.

mod quality;
mod search;

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::kernel::{EpistemicTree, NodeId, Result as KernelResult};
use crate::lang::{ActionId, GroundDomain};

pub use quality::{assess, compare_candidates, select_best, PlanQuality, QualityError};
pub use search::{find_weak_plan, PlannerSession, SearchOutcome};

/// How the exogenous-action allowance grows with the horizon.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum BudgetMode {
    /// `t mod n`.
    #[default]
    Modulo,
    /// `t / n`, rounded down.
    Division,
}

impl fmt::Display for BudgetMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BudgetMode::Modulo => "modulo",
            BudgetMode::Division => "division",
        })
    }
}

impl core::str::FromStr for BudgetMode {
    type Err = String;

    fn from_str(s: &str) -> core::result::Result<Self, String> {
        match s {
            "modulo" => Ok(BudgetMode::Modulo),
            "division" => Ok(BudgetMode::Division),
            other => Err(format!("unknown budget mode `{other}`")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchConfig {
    /// Budget constant; at least 1.
    pub exo_n: usize,
    pub mode: BudgetMode,
    pub max_horizon: usize,
    /// Upper bound on expanded search nodes per search call.
    pub node_limit: Option<u64>,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            exo_n: 1,
            mode: BudgetMode::Modulo,
            max_horizon: 20,
            node_limit: None,
        }
    }
}

/// Number of exogenous actions a plan of horizon `t` may contain.
pub fn exo_budget(t: usize, config: &SearchConfig) -> usize {
    let n = config.exo_n.max(1);
    match config.mode {
        BudgetMode::Modulo => t % n,
        BudgetMode::Division => t / n,
    }
}

/// Actions assigned to tree nodes, including the already executed prefix.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ConditionalPlan {
    pub assignments: BTreeMap<NodeId, Vec<ActionId>>,
    pub horizon: usize,
}

impl ConditionalPlan {
    pub fn num_actions(&self) -> usize {
        self.assignments.values().map(Vec::len).sum()
    }

    pub fn num_exo(&self, domain: &GroundDomain) -> usize {
        self.occurrences()
            .filter(|(_, a)| domain.action(*a).exogenous)
            .count()
    }

    pub fn occurrences(&self) -> impl Iterator<Item = (NodeId, ActionId)> + '_ {
        self.assignments
            .iter()
            .flat_map(|(n, acts)| acts.iter().map(move |a| (*n, *a)))
    }

    /// The endogenous action planned at `node`, if any.
    pub fn endogenous_at(&self, node: NodeId, domain: &GroundDomain) -> Option<ActionId> {
        self.assignments
            .get(&node)?
            .iter()
            .copied()
            .find(|a| !domain.action(*a).exogenous)
    }

    /// One `occ(a,t,b)` line per occurrence, in node order.
    pub fn serialize(&self, domain: &GroundDomain) -> String {
        let mut s = String::new();
        for (n, a) in self.occurrences() {
            s.push_str(&format!(
                "occ({},{},{})\n",
                domain.action_name(a),
                n.step,
                n.branch
            ));
        }
        s
    }

    /// Replays the assignments at steps `>= from` that `base` does not
    /// already contain, then projects to the plan horizon.
    pub fn induce(&self, base: &EpistemicTree, from: usize) -> KernelResult<EpistemicTree> {
        let mut tree = base.clone();
        for (node, a) in self.occurrences() {
            if node.step < from
                || base
                    .occurrences()
                    .get(&node)
                    .is_some_and(|acts| acts.contains(&a))
            {
                continue;
            }
            tree = tree.extend_to(node.step)?.apply_action(a, node)?;
        }
        tree.extend_to(self.horizon)
    }
}
