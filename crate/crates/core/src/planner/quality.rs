use alloc::string::String;
use core::cmp::{Ordering, Reverse};
use core::fmt;

use super::ConditionalPlan;
use crate::kernel::{EpistemicTree, NodeId};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct PlanQuality {
    pub num_exo: usize,
    /// Percentage of leaves at the horizon that know the goal.
    pub strength: usize,
    /// Maintenance-goal satisfactions per node, as a percentage.
    pub m_value: usize,
    pub num_actions: usize,
}

impl fmt::Display for PlanQuality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "quality({},{},{},{})",
            self.num_exo, self.strength, self.m_value, self.num_actions
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QualityError {
    NoValidBranch { step: usize },
}

impl fmt::Display for QualityError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QualityError::NoValidBranch { step } => write!(f, "no valid branch at step {step}"),
        }
    }
}

impl core::error::Error for QualityError {}

/// Scores `plan` on its induced tree at the plan horizon.
///
/// With several maintenance goals a node can contribute more than once to
/// the numerator, so `m_value` may exceed 100.
pub fn assess(plan: &ConditionalPlan, induced: &EpistemicTree) -> Result<PlanQuality, QualityError> {
    let t = plan.horizon;
    let domain = induced.domain();
    let leaves = induced.leaves(t);
    if leaves.is_empty() {
        return Err(QualityError::NoValidBranch { step: t });
    }
    let reached = leaves
        .iter()
        .filter(|&&b| induced.weak_goal_known(NodeId::new(t, b)))
        .count();
    let maintenance = &domain.maintenance_goals;
    let m_value = if maintenance.is_empty() {
        100
    } else {
        let mut nodes = 0;
        let mut held = 0;
        for step in 0..=t {
            for b in induced.leaves(step) {
                nodes += 1;
                let node = NodeId::new(step, b);
                held += maintenance
                    .iter()
                    .filter(|m| induced.known_now(**m, node))
                    .count();
            }
        }
        100 * held / nodes
    };
    Ok(PlanQuality {
        num_exo: plan.num_exo(domain),
        strength: 100 * reached / leaves.len(),
        m_value,
        num_actions: plan.num_actions(),
    })
}

/// Preference order: fewer exogenous actions, then higher strength, then
/// higher m-value, then fewer actions, then the serialization text.
pub fn compare_candidates(a: (&PlanQuality, &str), b: (&PlanQuality, &str)) -> Ordering {
    let key = |(q, s): (&PlanQuality, &str)| {
        (
            q.num_exo,
            Reverse(q.strength),
            Reverse(q.m_value),
            q.num_actions,
            String::from(s),
        )
    };
    key(a).cmp(&key(b))
}

/// Index of the preferred candidate; `None` for an empty slice.
/// Each candidate carries its quality and serialized text.
pub fn select_best(candidates: &[(PlanQuality, String)]) -> Option<usize> {
    (0..candidates.len()).min_by(|&i, &j| {
        compare_candidates(
            (&candidates[i].0, &candidates[i].1),
            (&candidates[j].0, &candidates[j].1),
        )
    })
}
