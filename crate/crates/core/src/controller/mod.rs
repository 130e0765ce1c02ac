//! The plan, execute, sense and replan loop.

mod events;

use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use crate::kernel::{EpistemicTree, KernelError, NodeId};
use crate::lang::{ActionId, GroundDomain, Lit};
use crate::planner::{
    assess, ConditionalPlan, PlanQuality, PlannerSession, SearchConfig, SearchOutcome,
};

pub use events::{Event, LogError};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ControlDecision {
    Execute { action: ActionId, node: NodeId },
    /// No plan up to the current horizon; the next tick searches `horizon`.
    WaitForHorizon { horizon: usize },
    /// A fresh plan of this horizon replaced the previous one.
    Replan { horizon: usize },
    GoalAchieved,
    Unsolvable,
}

/// What actually happened, as opposed to what was planned.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ExecutionNarrative {
    pub executed: Vec<(ActionId, NodeId)>,
    pub sensed: Vec<(Lit, usize)>,
    pub explanations: Vec<(ActionId, NodeId)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ControlError {
    Kernel(KernelError),
    NotInPlan { action: String, node: NodeId },
    AlreadyExecuted(NodeId),
    NotCurrent(NodeId),
    World(String),
    Log(LogError),
    /// A replayed decision differs from the logged one.
    Diverged { expected: String, found: String },
}

impl fmt::Display for ControlError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ControlError::Kernel(e) => e.fmt(f),
            ControlError::NotInPlan { action, node } => {
                write!(f, "{action} is not the planned action at ({node})")
            }
            ControlError::AlreadyExecuted(n) => write!(f, "an action was already executed at ({n})"),
            ControlError::NotCurrent(n) => write!(f, "({n}) is not the current node"),
            ControlError::World(e) => write!(f, "world: {e}"),
            ControlError::Log(e) => e.fmt(f),
            ControlError::Diverged { expected, found } => {
                write!(f, "replay diverged: logged {expected}, got {found}")
            }
        }
    }
}

impl core::error::Error for ControlError {}

impl From<KernelError> for ControlError {
    fn from(e: KernelError) -> Self {
        ControlError::Kernel(e)
    }
}

impl From<LogError> for ControlError {
    fn from(e: LogError) -> Self {
        ControlError::Log(e)
    }
}

/// The environment the controller acts in.
pub trait World {
    /// Performs `action` at the current step and advances one step.
    /// Returns the sensing results, each tagged with its step.
    fn execute(&mut self, action: ActionId) -> Result<Vec<(Lit, usize)>, String>;
    /// Current values of every monitored fluent.
    fn observe_monitored(&self) -> Vec<(Lit, usize)>;
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RunOutcome {
    GoalAchieved,
    Unsolvable,
    /// Iteration or search-node limit reached.
    Limit,
}

/// A plan adopted during a run and its quality when adopted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QualityRecord {
    pub step: usize,
    pub horizon: usize,
    pub quality: PlanQuality,
}

/// One online control session over a growing narrative.
#[derive(Clone, Debug)]
pub struct Session {
    tree: EpistemicTree,
    now: usize,
    planner: PlannerSession,
    stale: bool,
    plan: Option<ConditionalPlan>,
    narrative: ExecutionNarrative,
    log: Vec<Event>,
    quality: Vec<QualityRecord>,
    limit_hit: bool,
}

impl Session {
    pub fn new(domain: Arc<GroundDomain>, config: SearchConfig) -> Result<Self, ControlError> {
        let tree = EpistemicTree::new(domain.clone())?;
        let mut log = Vec::new();
        for g in &domain.weak_goals {
            log.push(Event::Goal {
                lit: *g,
                maintenance: false,
            });
        }
        for g in &domain.maintenance_goals {
            log.push(Event::Goal {
                lit: *g,
                maintenance: true,
            });
        }
        Ok(Session {
            planner: PlannerSession::new(tree.clone(), NodeId::ROOT, config),
            tree,
            now: 0,
            stale: false,
            plan: None,
            narrative: ExecutionNarrative::default(),
            log,
            quality: Vec::new(),
            limit_hit: false,
        })
    }

    pub fn domain(&self) -> &Arc<GroundDomain> {
        self.tree.domain()
    }

    pub fn tree(&self) -> &EpistemicTree {
        &self.tree
    }

    pub fn now(&self) -> usize {
        self.now
    }

    /// The horizon the planner is currently working on.
    pub fn horizon(&self) -> usize {
        self.planner.horizon()
    }

    pub fn plan(&self) -> Option<&ConditionalPlan> {
        self.plan.as_ref()
    }

    pub fn narrative(&self) -> &ExecutionNarrative {
        &self.narrative
    }

    pub fn log(&self) -> &[Event] {
        &self.log
    }

    pub fn quality_history(&self) -> &[QualityRecord] {
        &self.quality
    }

    /// The real node: the current step on the lowest-numbered valid branch.
    pub fn current_node(&self) -> Option<NodeId> {
        self.tree
            .leaves(self.now)
            .first()
            .map(|&b| NodeId::new(self.now, b))
    }

    fn decide(&mut self, d: ControlDecision) -> ControlDecision {
        self.log.push(Event::Decision(d));
        d
    }

    /// Whether `plan`, replayed on the current narrative, still reaches the
    /// goal somewhere and has an action for the current node.
    fn live_action(&self, plan: &ConditionalPlan, node: NodeId) -> Option<ActionId> {
        let action = plan.endogenous_at(node, self.domain())?;
        let induced = plan.induce(&self.tree, self.now).ok()?;
        let reachable = (self.now..=plan.horizon).any(|t| {
            induced
                .leaves(t)
                .into_iter()
                .any(|b| induced.weak_goal_known(NodeId::new(t, b)))
        });
        reachable.then_some(action)
    }

    /// Decides the next move of the loop.
    pub fn step(&mut self) -> ControlDecision {
        let Some(node) = self.current_node() else {
            return self.decide(ControlDecision::Unsolvable);
        };
        if self.tree.weak_goal_known(node) {
            return self.decide(ControlDecision::GoalAchieved);
        }
        if let Some(plan) = &self.plan {
            if let Some(action) = self.live_action(plan, node) {
                return self.decide(ControlDecision::Execute { action, node });
            }
        }
        self.plan = None;

        // Planner tick: search every horizon from the present up to the one
        // reached so far, so the adopted plan is as short as possible.
        let target = self.planner.horizon();
        if self.stale {
            self.planner.set_narrative(self.tree.clone(), node);
            self.stale = false;
        }
        self.planner.set_horizon(self.now);
        loop {
            match self.planner.search() {
                SearchOutcome::Found(plan) => {
                    let h = plan.horizon;
                    if let Ok(induced) = plan.induce(&self.tree, self.now) {
                        if let Ok(quality) = assess(&plan, &induced) {
                            self.quality.push(QualityRecord {
                                step: self.now,
                                horizon: h,
                                quality,
                            });
                        }
                    }
                    self.log.push(Event::Plan(plan.clone()));
                    self.plan = Some(plan);
                    return self.decide(ControlDecision::Replan { horizon: h });
                }
                SearchOutcome::LimitReached => {
                    self.limit_hit = true;
                    return self.decide(ControlDecision::Unsolvable);
                }
                SearchOutcome::Exhausted => {
                    if self.planner.horizon() >= target {
                        break;
                    }
                    self.planner.extend_horizon();
                }
            }
        }
        if !self.planner.extend_horizon() {
            return self.decide(ControlDecision::Unsolvable);
        }
        let horizon = self.planner.horizon();
        self.decide(ControlDecision::WaitForHorizon { horizon })
    }

    /// Records that `action` was carried out at `node` and moves to the
    /// next step. The planner horizon advances by one in the background.
    pub fn commit_execution(&mut self, action: ActionId, node: NodeId) -> Result<(), ControlError> {
        if Some(node) != self.current_node() {
            return Err(ControlError::NotCurrent(node));
        }
        if self.narrative.executed.iter().any(|(_, n)| *n == node) {
            return Err(ControlError::AlreadyExecuted(node));
        }
        let planned = self
            .plan
            .as_ref()
            .and_then(|p| p.endogenous_at(node, self.domain()));
        if planned != Some(action) {
            return Err(ControlError::NotInPlan {
                action: self.domain().action_name(action),
                node,
            });
        }
        let tree = self.tree.apply_action(action, node)?;
        self.tree = tree.extend_to(self.now + 1)?;
        self.now += 1;
        self.narrative.executed.push((action, node));
        self.log.push(Event::Exec { action, node });
        self.stale = true;
        self.planner.extend_horizon();
        Ok(())
    }

    /// Folds a real observation into the narrative, explaining it by an
    /// exogenous action where the previous step knew the opposite.
    pub fn submit_sensed(&mut self, lit: Lit, t: usize) -> Result<(), ControlError> {
        if self.tree.sensed().get(&(t, lit.fluent)) == Some(&lit.positive) {
            return Ok(());
        }
        self.log.push(Event::Sensed { lit, step: t });
        self.narrative.sensed.push((lit, t));
        self.stale = true;

        if let Some((action, node, tree)) = self.explain(lit, t) {
            self.tree = tree;
            self.narrative.explanations.push((action, node));
            self.log.push(Event::Explained { action, node });
            return Ok(());
        }
        match self.tree.integrate_sensed(lit, t) {
            Ok(tree) => {
                self.tree = tree;
                Ok(())
            }
            Err(KernelError::Inconsistent { .. }) => {
                self.record_unexplained(lit, t);
                Ok(())
            }
            Err(e) => Err(e.into()),
        }
    }

    /// Candidate exogenous explanations for `sensed(lit, t)`, in name order.
    pub fn explanation_candidates(&self, lit: Lit, t: usize, branch: usize) -> Vec<ActionId> {
        let d = self.domain();
        if t == 0 {
            return Vec::new();
        }
        let at = NodeId::new(t - 1, branch);
        let endogenous_sets_it = self.narrative.executed.iter().any(|(a, n)| {
            *n == at && d.action(*a).has_effect(lit)
        });
        if endogenous_sets_it {
            return Vec::new();
        }
        let mut out: Vec<ActionId> = d
            .action_ids()
            .filter(|a| d.action(*a).exogenous && d.action(*a).has_effect(lit))
            .collect();
        out.sort_by_key(|a| d.action_name(*a));
        out
    }

    fn explain(&self, lit: Lit, t: usize) -> Option<(ActionId, NodeId, EpistemicTree)> {
        if t == 0 {
            return None;
        }
        let branches = self.tree.leaves(t - 1);
        for b in branches {
            let prev = NodeId::new(t - 1, b);
            if !self.tree.is_valid(NodeId::new(t, b))
                || !self.tree.known_now(lit.complement(), prev)
            {
                continue;
            }
            for action in self.explanation_candidates(lit, t, b) {
                let adopted = self
                    .tree
                    .apply_action(action, prev)
                    .and_then(|tree| tree.integrate_sensed(lit, t));
                match adopted {
                    Ok(tree) => return Some((action, prev, tree)),
                    Err(e) => log::debug!("explanation rejected: {e}"),
                }
            }
        }
        None
    }

    /// Invalidates every branch that contradicts `sensed(lit, t)` from
    /// `t - 1` on, then integrates the observation.
    fn record_unexplained(&mut self, lit: Lit, t: usize) {
        log::warn!(
            "unexplained change: sensed({},{t}) contradicts every explanation",
            self.domain().lit_name(lit)
        );
        self.log.push(Event::Unexplained { lit, step: t });
        let mark = t.saturating_sub(1);
        for _ in 0..=self.tree.branch_count() {
            match self.tree.integrate_sensed(lit, t) {
                Ok(tree) => {
                    self.tree = tree;
                    return;
                }
                Err(KernelError::Inconsistent { branch, .. }) => {
                    match self.tree.mark_invalid(NodeId::new(mark, branch)) {
                        Ok(tree) => self.tree = tree,
                        Err(_) => return,
                    }
                }
                Err(_) => return,
            }
        }
    }

    /// Runs the closed loop until the goal is reached, the problem is
    /// unsolvable, or `max_iterations` decisions were made.
    pub fn run(
        &mut self,
        world: &mut dyn World,
        max_iterations: usize,
    ) -> Result<RunOutcome, ControlError> {
        for (lit, t) in world.observe_monitored() {
            self.submit_sensed(lit, t)?;
        }
        for _ in 0..max_iterations {
            match self.step() {
                ControlDecision::GoalAchieved => return Ok(RunOutcome::GoalAchieved),
                ControlDecision::Unsolvable if self.limit_hit => return Ok(RunOutcome::Limit),
                ControlDecision::Unsolvable => return Ok(RunOutcome::Unsolvable),
                ControlDecision::Execute { action, node } => {
                    let sensed = world.execute(action).map_err(ControlError::World)?;
                    self.commit_execution(action, node)?;
                    for (lit, t) in sensed {
                        self.submit_sensed(lit, t)?;
                    }
                    for (lit, t) in world.observe_monitored() {
                        self.submit_sensed(lit, t)?;
                    }
                }
                ControlDecision::WaitForHorizon { .. } | ControlDecision::Replan { .. } => {}
            }
        }
        Ok(RunOutcome::Limit)
    }

    /// The session log as text, one event per line.
    pub fn render_log(&self) -> String {
        let mut s = String::new();
        for e in &self.log {
            s.push_str(&e.render(self.domain()));
            s.push('\n');
        }
        s
    }

    /// Rebuilds a session from a logged run by re-submitting its
    /// executions and observations and re-deciding at every logged
    /// decision. Fails on the first decision that differs.
    pub fn replay(
        domain: Arc<GroundDomain>,
        config: SearchConfig,
        log_text: &str,
    ) -> Result<Session, ControlError> {
        let mut session = Session::new(domain.clone(), config)?;
        for line in log_text.lines().filter(|l| !l.trim().is_empty()) {
            match Event::parse(line, &domain)? {
                Event::Exec { action, node } => session.commit_execution(action, node)?,
                Event::Sensed { lit, step } => session.submit_sensed(lit, step)?,
                Event::Decision(expected) => {
                    let found = session.step();
                    if found != expected {
                        return Err(ControlError::Diverged {
                            expected: expected.render(&domain),
                            found: found.render(&domain),
                        });
                    }
                }
                Event::Goal { .. }
                | Event::Plan(_)
                | Event::Explained { .. }
                | Event::Unexplained { .. } => {}
            }
        }
        Ok(session)
    }
}

impl fmt::Display for RunOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RunOutcome::GoalAchieved => "goal-achieved",
            RunOutcome::Unsolvable => "unsolvable",
            RunOutcome::Limit => "limit",
        })
    }
}
