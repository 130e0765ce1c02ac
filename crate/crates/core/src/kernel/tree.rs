use alloc::collections::{BTreeMap, BTreeSet};
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use super::closure::saturate;
use super::{KernelError, NodeId, Result};
use crate::lang::{ActionId, FluentId, GroundDomain, GroundEp, Lit};
use crate::litset::LitSet;

/// Knowledge at one epistemic step: entry `t` holds what is known about step `t`.
type Layer = Vec<LitSet>;

#[derive(Clone, Debug, PartialEq, Eq)]
struct Branch {
    parent: Option<usize>,
    /// Step of the sensing occurrence that created this branch (0 for the root).
    fork: usize,
    /// Fluent whose negative sensing outcome this branch follows.
    fluent: Option<FluentId>,
    layers: Vec<Arc<Layer>>,
}

/// A branching point created by sensing an unknown fluent.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Fork {
    pub step: usize,
    pub parent: usize,
    pub child: usize,
    pub fluent: FluentId,
}

/// The transition tree with its saturated knowledge.
///
/// Operations are persistent: they return a new tree and leave `self`
/// untouched. Layers are shared between versions, so clones are cheap.
#[derive(Clone, Debug)]
pub struct EpistemicTree {
    domain: Arc<GroundDomain>,
    horizon: usize,
    branches: Vec<Branch>,
    occurrences: BTreeMap<NodeId, Vec<ActionId>>,
    sensed: BTreeMap<(usize, FluentId), bool>,
    invalid: BTreeSet<NodeId>,
}

impl PartialEq for EpistemicTree {
    fn eq(&self, other: &Self) -> bool {
        self.horizon == other.horizon
            && self.branches == other.branches
            && self.occurrences == other.occurrences
            && self.sensed == other.sensed
            && self.invalid == other.invalid
    }
}

impl Eq for EpistemicTree {}

impl EpistemicTree {
    /// Root node `(0,0)` knowing the initial literals.
    pub fn new(domain: Arc<GroundDomain>) -> Result<Self> {
        let mut init = LitSet::with_fluents(domain.num_fluents());
        for l in &domain.init {
            init.insert(*l);
        }
        if let Some(l) = init.first_conflict() {
            return Err(KernelError::ContradictoryInit(domain.lit_name(l)));
        }
        let mut tree = EpistemicTree {
            domain,
            horizon: 0,
            branches: vec![Branch {
                parent: None,
                fork: 0,
                fluent: None,
                layers: Vec::new(),
            }],
            occurrences: BTreeMap::new(),
            sensed: BTreeMap::new(),
            invalid: BTreeSet::new(),
        };
        tree.rebuild(0, 0)?;
        Ok(tree)
    }

    pub fn domain(&self) -> &Arc<GroundDomain> {
        &self.domain
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn branch_count(&self) -> usize {
        self.branches.len()
    }

    pub fn parent(&self, branch: usize) -> Option<usize> {
        self.branches[branch].parent
    }

    pub fn forks(&self) -> impl Iterator<Item = Fork> + '_ {
        self.branches.iter().enumerate().filter_map(|(child, b)| {
            Some(Fork {
                step: b.fork,
                parent: b.parent?,
                child,
                fluent: b.fluent?,
            })
        })
    }

    pub fn occurrences(&self) -> &BTreeMap<NodeId, Vec<ActionId>> {
        &self.occurrences
    }

    pub fn sensed(&self) -> &BTreeMap<(usize, FluentId), bool> {
        &self.sensed
    }

    pub fn invalidations(&self) -> &BTreeSet<NodeId> {
        &self.invalid
    }

    fn first_invalid(&self, branch: usize) -> Option<usize> {
        self.invalid
            .iter()
            .filter(|n| n.branch == branch)
            .map(|n| n.step)
            .min()
    }

    /// Branch validity: the root from step 0, a child from the step after
    /// its fork, in both cases up to and including its first invalidation.
    pub fn is_valid(&self, node: NodeId) -> bool {
        let Some(b) = self.branches.get(node.branch) else {
            return false;
        };
        if node.step > self.horizon || (b.parent.is_some() && node.step <= b.fork) {
            return false;
        }
        self.first_invalid(node.branch).is_none_or(|s| node.step <= s)
    }

    pub fn is_invalidated(&self, node: NodeId) -> bool {
        self.invalid.contains(&node)
    }

    /// Branches valid at step `t`.
    pub fn leaves(&self, t: usize) -> Vec<usize> {
        (0..self.branches.len())
            .filter(|&b| self.is_valid(NodeId::new(t, b)))
            .collect()
    }

    /// Whether `knows(lit, t, t1, b)` holds.
    pub fn holds_known(&self, lit: Lit, t: usize, t1: usize, branch: usize) -> bool {
        t <= t1
            && self
                .branches
                .get(branch)
                .and_then(|b| b.layers.get(t1))
                .is_some_and(|layer| layer[t].contains(lit))
    }

    /// Everything branch `b` knows at epistemic step `t1`, indexed by step.
    pub fn layer(&self, branch: usize, t1: usize) -> Option<&[LitSet]> {
        self.branches.get(branch)?.layers.get(t1).map(|l| l.as_slice())
    }

    /// What branch `b` knows at step `t` about step `t`.
    pub fn present(&self, node: NodeId) -> Option<&LitSet> {
        self.branches
            .get(node.branch)?
            .layers
            .get(node.step)
            .map(|layer| &layer[node.step])
    }

    pub fn known_now(&self, lit: Lit, node: NodeId) -> bool {
        self.present(node).is_some_and(|k| k.contains(lit))
    }

    /// All weak goals are known at the node.
    pub fn weak_goal_known(&self, node: NodeId) -> bool {
        let goals = &self.domain.weak_goals;
        self.present(node)
            .is_some_and(|k| goals.iter().all(|g| k.contains(*g)))
    }

    /// The branch whose occurrences drive the transition at `node`. A child
    /// shares its ancestors' occurrences up to and including its fork step.
    pub fn owner(&self, node: NodeId) -> usize {
        let mut b = node.branch;
        while let Some(p) = self.branches[b].parent {
            if node.step > self.branches[b].fork {
                break;
            }
            b = p;
        }
        b
    }

    /// Occurrences driving the transition at `node`.
    pub fn occurrences_at(&self, node: NodeId) -> &[ActionId] {
        let owner = NodeId::new(node.step, self.owner(node));
        self.occurrences.get(&owner).map_or(&[], Vec::as_slice)
    }

    /// Projected sensing results `sRes(l, t, b)` at `node`.
    pub fn sensing_results(&self, node: NodeId) -> Vec<Lit> {
        let t = node.step;
        let mut out = Vec::new();
        for f in self.forks().filter(|f| f.step == t) {
            let seen = self.sensed.get(&(t, f.fluent)).copied();
            if f.parent == node.branch && seen != Some(false) {
                out.push(Lit::pos(f.fluent));
            }
            if f.child == node.branch && seen != Some(true) {
                out.push(Lit::neg(f.fluent));
            }
        }
        out
    }

    /// Checks every precondition of [`EpistemicTree::apply_action`].
    pub fn check_applicable(&self, action: ActionId, node: NodeId) -> Result<()> {
        if !self.is_valid(node) {
            return Err(KernelError::InvalidNode(node));
        }
        let a = self.domain.action(action);
        let name = || self.domain.action_name(action);
        let known = self.present(node).ok_or(KernelError::InvalidNode(node))?;
        if !a.executable.iter().all(|l| known.contains(*l)) {
            return Err(KernelError::NotExecutable {
                action: name(),
                node,
            });
        }
        for other in self.occurrences_at(node) {
            let o = self.domain.action(*other);
            if !a.exogenous && !o.exogenous {
                return Err(KernelError::SecondEndogenous {
                    action: name(),
                    node,
                });
            }
            if *other == action || a.eps.iter().any(|ep| o.has_effect(ep.effect)) {
                return Err(KernelError::EffectClash {
                    action: name(),
                    node,
                });
            }
        }
        Ok(())
    }

    pub fn is_applicable(&self, action: ActionId, node: NodeId) -> bool {
        let Some(known) = self.present(node) else {
            return false;
        };
        let a = self.domain.action(action);
        self.is_valid(node)
            && a.executable.iter().all(|l| known.contains(*l))
            && self.occurrences_at(node).iter().all(|other| {
                let o = self.domain.action(*other);
                (a.exogenous || o.exogenous)
                    && *other != action
                    && !a.eps.iter().any(|ep| o.has_effect(ep.effect))
            })
    }

    /// Records `occ(action, node)`, branches on every sensed fluent whose
    /// value is not yet known, and re-saturates the affected layers.
    ///
    /// Effects show up at `t + 1` only once the horizon reaches it; see
    /// [`EpistemicTree::extend_to`].
    pub fn apply_action(&self, action: ActionId, node: NodeId) -> Result<Self> {
        self.check_applicable(action, node)?;
        let mut next = self.clone();
        let t = node.step;
        let b = node.branch;
        next.occurrences.entry(node).or_default().push(action);
        let first_new = next.branches.len();
        for &f in &self.domain.action(action).observes {
            let known = &self.branches[b].layers[t][t];
            if known.contains(Lit::pos(f)) || known.contains(Lit::neg(f)) {
                continue;
            }
            next.branches.push(Branch {
                parent: Some(b),
                fork: t,
                fluent: Some(f),
                layers: Vec::new(),
            });
        }
        let mut affected = BTreeSet::from([b]);
        for c in 0..next.branches.len() {
            let br = &next.branches[c];
            if let Some(p) = br.parent {
                let direct = p == b && (br.fork >= t || c >= first_new);
                if direct || (p != b && affected.contains(&p)) {
                    affected.insert(c);
                }
            }
        }
        // Without a new fork, layer `t` is untouched: the occurrence only
        // changes what is known from step `t + 1` on.
        let from = if next.branches.len() == first_new { t + 1 } else { t };
        for c in affected {
            next.rebuild(c, from)?;
        }
        Ok(next)
    }

    /// Raises the horizon, projecting knowledge forward.
    pub fn extend_to(&self, horizon: usize) -> Result<Self> {
        let mut next = self.clone();
        if horizon > self.horizon {
            next.horizon = horizon;
            next.rebuild_all(self.horizon + 1)?;
        }
        Ok(next)
    }

    /// Folds in a real sensing result `sensed(lit, t)`.
    ///
    /// Where the sensing created a branch pair, the pair member that
    /// projected the other outcome is invalidated at `t`. Every branch valid
    /// at `t` learns the literal. An atom unrelated to any sensing
    /// occurrence or monitored fluent is ignored with a warning.
    pub fn integrate_sensed(&self, lit: Lit, t: usize) -> Result<Self> {
        let key = (t, lit.fluent);
        match self.sensed.get(&key) {
            Some(&v) if v == lit.positive => return Ok(self.clone()),
            Some(_) => {
                return Err(KernelError::ConflictingSensed {
                    literal: self.domain.lit_name(lit),
                    step: t,
                })
            }
            None => {}
        }
        let forks: Vec<Fork> = self
            .forks()
            .filter(|f| f.step == t && f.fluent == lit.fluent)
            .collect();
        let observed_here = self.occurrences.iter().any(|(n, acts)| {
            n.step == t
                && acts
                    .iter()
                    .any(|a| self.domain.action(*a).observes.contains(&lit.fluent))
        });
        if forks.is_empty() && !observed_here && self.domain.monitor_of(lit.fluent).is_none() {
            log::warn!(
                "ignoring sensed({},{t}): no sensing occurrence or monitor",
                self.domain.lit_name(lit)
            );
            return Ok(self.clone());
        }
        let mut next = self.clone();
        next.sensed.insert(key, lit.positive);
        for f in forks {
            let loser = if lit.positive { f.child } else { f.parent };
            next.invalid.insert(NodeId::new(t, loser));
        }
        next.horizon = next.horizon.max(t);
        next.rebuild_all(t)?;
        Ok(next)
    }

    /// Marks `brInvalid(node)` directly.
    pub fn mark_invalid(&self, node: NodeId) -> Result<Self> {
        if node.branch >= self.branches.len() {
            return Err(KernelError::InvalidNode(node));
        }
        let mut next = self.clone();
        if next.invalid.insert(node) {
            next.rebuild_all(node.step)?;
        }
        Ok(next)
    }

    /// Index of the last layer branch `b` carries.
    fn last_layer(&self, b: usize) -> usize {
        self.first_invalid(b)
            .map_or(self.horizon, |s| s.min(self.horizon))
    }

    fn rebuild_all(&mut self, from: usize) -> Result<()> {
        for b in 0..self.branches.len() {
            self.rebuild(b, from)?;
        }
        Ok(())
    }

    /// Recomputes layers `from..` of branch `b`. Ancestors must be current.
    fn rebuild(&mut self, b: usize, from: usize) -> Result<()> {
        let last = self.last_layer(b);
        let keep = from.min(last + 1);
        self.branches[b].layers.truncate(keep);
        while self.branches[b].layers.len() <= last {
            let t1 = self.branches[b].layers.len();
            let layer = match self.branches[b].parent {
                Some(p) if t1 < self.branches[b].fork => self.branches[p].layers[t1].clone(),
                _ => Arc::new(self.compute_layer(b, t1)?),
            };
            self.branches[b].layers.push(layer);
        }
        Ok(())
    }

    fn compute_layer(&self, b: usize, t1: usize) -> Result<Layer> {
        let n = self.domain.num_fluents();
        let mut steps: Layer = if t1 == 0 {
            let mut init = LitSet::with_fluents(n);
            for l in &self.domain.init {
                init.insert(*l);
            }
            vec![init]
        } else {
            let mut prev = (*self.branches[b].layers[t1 - 1]).clone();
            prev.push(LitSet::with_fluents(n));
            prev
        };
        let node = NodeId::new(t1, b);
        for l in self.sensing_results(node) {
            steps[t1].insert(l);
        }
        if self.is_valid(node) {
            for (&(_, f), &v) in self.sensed.range((t1, FluentId(0))..=(t1, FluentId(u32::MAX))) {
                steps[t1].insert(Lit::new(f, v));
            }
        }
        let eps: Vec<Vec<&GroundEp>> = (0..t1)
            .map(|s| {
                self.occurrences_at(NodeId::new(s, b))
                    .iter()
                    .flat_map(|a| self.domain.action(*a).eps.iter())
                    .collect()
            })
            .collect();
        saturate(&mut steps, &eps, &self.domain.oneof);
        for (t, known) in steps.iter().enumerate() {
            if let Some(l) = known.first_conflict() {
                return Err(KernelError::Inconsistent {
                    literal: self.domain.lit_name(l),
                    step: t,
                    epistemic_step: t1,
                    branch: b,
                });
            }
        }
        Ok(steps)
    }

    pub(super) fn layers(&self, b: usize) -> impl Iterator<Item = (usize, &Layer)> + '_ {
        self.branches[b]
            .layers
            .iter()
            .enumerate()
            .map(|(t1, l)| (t1, &**l))
    }
}
