use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec;
use alloc::vec::Vec;

use super::{exo_budget, ConditionalPlan, SearchConfig};
use crate::kernel::{EpistemicTree, NodeId};
use crate::lang::{ActionId, GroundEp, Lit};
use crate::litset::LitSet;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SearchOutcome {
    Found(ConditionalPlan),
    /// No plan exists at the searched horizon(s).
    Exhausted,
    /// The node limit cut the search short.
    LimitReached,
}

/// Search state that determines what a path can still achieve.
///
/// Past knowledge only matters through effects whose outcome is still
/// open: later observations can postdict their conditions and feed facts
/// forward again. The key keeps the present plus, from the earliest step
/// with an open effect, the knowledge about the fluents such effects
/// mention and every effect on those fluents that was not ruled out.
/// An undecided `oneof` group adds its fluents and reaches back to step 0.
/// Steps are kept only where such an effect sits.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct MemoKey {
    present: LitSet,
    past: Vec<PastStep>,
    exo_left: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct PastStep {
    known: Vec<Lit>,
    /// `(effect, open conditions)`; fired effects carry no conditions.
    effects: Vec<(Lit, Option<Vec<Lit>>)>,
}

fn memo_key(tree: &EpistemicTree, node: NodeId, exo_left: usize) -> MemoKey {
    let layer = tree
        .layer(node.branch, node.step)
        .expect("search nodes are valid");
    let domain = tree.domain();
    let eps_at = |s: usize| {
        tree.occurrences_at(NodeId::new(s, node.branch))
            .iter()
            .flat_map(|a| domain.action(*a).eps.iter())
    };
    let is_open = |s: usize, ep: &GroundEp| {
        !ep.conditions.iter().all(|c| layer[s].contains(*c))
    };
    let is_blocked = |s: usize, ep: &GroundEp| {
        ep.conditions
            .iter()
            .any(|c| layer[s].contains(c.complement()))
    };

    let mut relevant = BTreeSet::new();
    let mut from = node.step;
    for s in 0..node.step {
        for ep in eps_at(s).filter(|ep| !is_blocked(s, ep) && is_open(s, ep)) {
            from = from.min(s);
            relevant.insert(ep.effect.fluent);
            relevant.extend(ep.conditions.iter().map(|c| c.fluent));
        }
    }
    for group in &domain.oneof {
        let undecided = group
            .iter()
            .any(|l| !layer[0].contains(*l) && !layer[0].contains(l.complement()));
        if undecided {
            from = 0;
            relevant.extend(group.iter().map(|l| l.fluent));
        }
    }

    let past = (from..node.step)
        .map(|s| {
            let known = relevant
                .iter()
                .flat_map(|&f| [Lit::pos(f), Lit::neg(f)])
                .filter(|l| layer[s].contains(*l))
                .collect();
            let mut effects: Vec<_> = eps_at(s)
                .filter(|ep| relevant.contains(&ep.effect.fluent) && !is_blocked(s, ep))
                .map(|ep| {
                    let open = is_open(s, ep).then(|| ep.conditions.clone());
                    (ep.effect, open)
                })
                .collect();
            effects.sort();
            PastStep { known, effects }
        })
        // Without effects on relevant fluents, inertia makes a step's
        // relevant knowledge equal to its successor's.
        .filter(|step| !step.effects.is_empty())
        .collect();
    MemoKey {
        present: layer[node.step].clone(),
        past,
        exo_left,
    }
}

enum Flow {
    Found,
    Failed,
    Stop,
}

struct Dfs<'a> {
    horizon: usize,
    memo: &'a mut BTreeMap<MemoKey, usize>,
    endogenous: Vec<ActionId>,
    exogenous: Vec<ActionId>,
    nodes: u64,
    node_limit: Option<u64>,
    limited: bool,
    want: usize,
    found: Vec<ConditionalPlan>,
}

impl Dfs<'_> {
    fn record(&mut self, tree: &EpistemicTree) -> Flow {
        let plan = ConditionalPlan {
            assignments: tree.occurrences().clone(),
            horizon: self.horizon,
        };
        if !self.found.contains(&plan) {
            self.found.push(plan);
        }
        if self.found.len() >= self.want {
            Flow::Stop
        } else {
            Flow::Found
        }
    }

    /// Candidate occurrence sets at `node`: one endogenous action, one
    /// exogenous action, or one of each.
    fn options(&self, tree: &EpistemicTree, node: NodeId, exo_left: usize) -> Vec<Vec<ActionId>> {
        let last_step = node.step == self.horizon;
        let useful = |a: &ActionId| !last_step || tree.domain().action(*a).is_sensing();
        let endo: Vec<ActionId> = self
            .endogenous
            .iter()
            .copied()
            .filter(|a| useful(a) && tree.is_applicable(*a, node))
            .collect();
        let mut out: Vec<Vec<ActionId>> = endo.iter().map(|a| vec![*a]).collect();
        if exo_left > 0 {
            let exo: Vec<ActionId> = self
                .exogenous
                .iter()
                .copied()
                .filter(|a| tree.is_applicable(*a, node))
                .collect();
            out.extend(exo.iter().filter(|a| useful(a)).map(|a| vec![*a]));
            for e in &endo {
                for x in &exo {
                    let clash = tree.domain().action(*e).eps.iter().any(|ep| {
                        tree.domain().action(*x).has_effect(ep.effect)
                    });
                    if !clash {
                        out.push(vec![*e, *x]);
                    }
                }
            }
        }
        out
    }

    fn visit(&mut self, tree: &EpistemicTree, node: NodeId, exo_left: usize) -> Flow {
        if tree.weak_goal_known(node) {
            return self.record(tree);
        }
        if self.node_limit.is_some_and(|l| self.nodes >= l) {
            self.limited = true;
            return Flow::Stop;
        }
        self.nodes += 1;
        let remaining = self.horizon - node.step;
        let key = memo_key(tree, node, exo_left);
        if self.memo.get(&key).is_some_and(|&d| d >= remaining) {
            return Flow::Failed;
        }
        let mut idle: Option<Option<EpistemicTree>> = None;

        let mut any = false;
        for option in self.options(tree, node, exo_left) {
            let mut next = tree.clone();
            let mut ok = true;
            for a in &option {
                match next.apply_action(*a, node) {
                    Ok(t) => next = t,
                    Err(_) => {
                        ok = false;
                        break;
                    }
                }
            }
            if !ok {
                continue;
            }
            if next.weak_goal_known(node) {
                match self.record(&next) {
                    Flow::Stop => return Flow::Stop,
                    _ => {
                        any = true;
                        continue;
                    }
                }
            }
            if remaining == 0 {
                continue;
            }
            let Ok(next) = next.extend_to(node.step + 1) else {
                continue;
            };
            let children: Vec<usize> = next
                .forks()
                .filter(|f| f.step == node.step && f.parent == node.branch)
                .map(|f| f.child)
                .collect();
            if children.is_empty() {
                let idle = idle.get_or_insert_with(|| tree.extend_to(node.step + 1).ok());
                if self.is_idle(&next, idle.as_ref(), node, &option) {
                    continue;
                }
            }
            let used = option
                .iter()
                .filter(|a| next.domain().action(**a).exogenous)
                .count();
            let succ = core::iter::once(node.branch).chain(children);
            for b in succ {
                let s = NodeId::new(node.step + 1, b);
                if !next.is_valid(s) {
                    continue;
                }
                match self.visit(&next, s, exo_left - used) {
                    Flow::Stop => return Flow::Stop,
                    Flow::Found => any = true,
                    Flow::Failed => {}
                }
            }
        }
        if any {
            Flow::Found
        } else {
            let d = self.memo.entry(key).or_insert(0);
            *d = (*d).max(remaining);
            Flow::Failed
        }
    }

    /// The option changed nothing an idle step would not and left no
    /// effect whose outcome is still undetermined.
    fn is_idle(
        &self,
        next: &EpistemicTree,
        idle: Option<&EpistemicTree>,
        node: NodeId,
        option: &[ActionId],
    ) -> bool {
        let Some(idle) = idle else {
            return false;
        };
        let t1 = node.step + 1;
        if next.layer(node.branch, t1) != idle.layer(node.branch, t1) {
            return false;
        }
        let Some(layer) = next.layer(node.branch, t1) else {
            return false;
        };
        let before = &layer[node.step];
        option.iter().all(|a| {
            next.domain().action(*a).eps.iter().all(|ep| {
                ep.conditions.iter().any(|c| before.contains(c.complement()))
                    || ep.conditions.iter().all(|c| before.contains(*c))
            })
        })
    }
}

/// Iterative-deepening weak planner anchored at one node of a narrative.
///
/// Failed search states are remembered across horizon increments and
/// forgotten when the narrative changes.
#[derive(Clone, Debug)]
pub struct PlannerSession {
    config: SearchConfig,
    base: EpistemicTree,
    start: NodeId,
    horizon: usize,
    memo: BTreeMap<MemoKey, usize>,
    expanded: u64,
}

impl PlannerSession {
    /// Starts at horizon `start.step`.
    pub fn new(base: EpistemicTree, start: NodeId, config: SearchConfig) -> Self {
        PlannerSession {
            config,
            base,
            start,
            horizon: start.step,
            memo: BTreeMap::new(),
            expanded: 0,
        }
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn config(&self) -> &SearchConfig {
        &self.config
    }

    pub fn start(&self) -> NodeId {
        self.start
    }

    pub fn base(&self) -> &EpistemicTree {
        &self.base
    }

    /// Total search nodes expanded so far.
    pub fn expanded(&self) -> u64 {
        self.expanded
    }

    /// Replaces the narrative. The horizon never drops below the new start.
    pub fn set_narrative(&mut self, base: EpistemicTree, start: NodeId) {
        self.base = base;
        self.start = start;
        self.horizon = self.horizon.max(start.step);
        self.memo.clear();
    }

    /// Moves to the next horizon; false once the maximum is exceeded.
    pub fn extend_horizon(&mut self) -> bool {
        if self.horizon >= self.config.max_horizon {
            return false;
        }
        self.horizon += 1;
        true
    }

    pub fn set_horizon(&mut self, horizon: usize) {
        self.horizon = horizon.max(self.start.step);
    }

    /// Up to `limit` distinct plans at the current horizon.
    pub fn enumerate(&mut self, limit: usize) -> (Vec<ConditionalPlan>, bool) {
        let domain = self.base.domain().clone();
        let (endogenous, exogenous): (Vec<ActionId>, Vec<ActionId>) =
            domain.action_ids().partition(|a| !domain.action(*a).exogenous);
        let mut dfs = Dfs {
            horizon: self.horizon,
            memo: &mut self.memo,
            endogenous,
            exogenous,
            nodes: 0,
            node_limit: self.config.node_limit,
            limited: false,
            want: limit.max(1),
            found: Vec::new(),
        };
        let exo_left = exo_budget(self.horizon, &self.config);
        if self.base.is_valid(self.start) {
            if let Ok(root) = self.base.extend_to(self.start.step) {
                dfs.visit(&root, self.start, exo_left);
            }
        }
        self.expanded += dfs.nodes;
        let limited = dfs.limited;
        (dfs.found, limited)
    }

    /// Searches the current horizon only.
    pub fn search(&mut self) -> SearchOutcome {
        let (mut plans, limited) = self.enumerate(1);
        match plans.pop() {
            Some(p) => SearchOutcome::Found(p),
            None if limited => SearchOutcome::LimitReached,
            None => SearchOutcome::Exhausted,
        }
    }

    /// Deepens from the current horizon until a plan appears or the
    /// maximum horizon is exhausted. The first plan has minimal horizon.
    pub fn find_first(&mut self) -> SearchOutcome {
        loop {
            match self.search() {
                SearchOutcome::Exhausted => {
                    if !self.extend_horizon() {
                        return SearchOutcome::Exhausted;
                    }
                }
                other => return other,
            }
        }
    }
}

/// A weak plan of horizon exactly `horizon` from `start`, if one exists.
pub fn find_weak_plan(
    tree: &EpistemicTree,
    start: NodeId,
    horizon: usize,
    config: &SearchConfig,
) -> Option<ConditionalPlan> {
    let mut session = PlannerSession::new(tree.clone(), start, config.clone());
    session.set_horizon(horizon);
    match session.search() {
        SearchOutcome::Found(p) => Some(p),
        _ => None,
    }
}
