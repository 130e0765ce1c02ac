//! Deterministic ground-truth world for closed-loop runs.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::controller::World;
use crate::lang::{ActionId, FluentId, GroundDomain, Lit};

/// A total truth assignment at one step.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WorldState {
    pub values: Vec<bool>,
    pub step: usize,
}

impl WorldState {
    /// Initial literals hold, the first member of each exclusive-or group
    /// is true, and every other fluent is false.
    pub fn initial(domain: &GroundDomain) -> Self {
        let mut values = vec![false; domain.num_fluents()];
        for group in &domain.oneof {
            for (i, l) in group.iter().enumerate() {
                values[l.fluent.0 as usize] = (i == 0) == l.positive;
            }
        }
        for l in &domain.init {
            values[l.fluent.0 as usize] = l.positive;
        }
        WorldState { values, step: 0 }
    }

    pub fn holds(&self, lit: Lit) -> bool {
        self.values[lit.fluent.0 as usize] == lit.positive
    }

    pub fn set(&mut self, lit: Lit) {
        self.values[lit.fluent.0 as usize] = lit.positive;
    }

    /// Sorted `fluent=value` lines.
    pub fn dump(&self, domain: &GroundDomain) -> String {
        let mut lines: Vec<String> = domain
            .fluents()
            .iter()
            .zip(&self.values)
            .map(|(f, v)| format!("{f}={v}"))
            .collect();
        lines.sort();
        let mut s = lines.join("\n");
        s.push('\n');
        s
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EventKind {
    Exogenous(ActionId),
    Abnormality { fluent: FluentId, value: bool },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ScriptedEvent {
    pub step: usize,
    pub kind: EventKind,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimConfig {
    pub initial: WorldState,
    pub script: Vec<ScriptedEvent>,
    pub report_monitored: bool,
}

impl SimConfig {
    pub fn new(domain: &GroundDomain, mut script: Vec<ScriptedEvent>) -> Self {
        script.sort_by_key(|e| e.step);
        SimConfig {
            initial: WorldState::initial(domain),
            script,
            report_monitored: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SimError {
    /// The action's executability literals are false in the real world.
    NotExecutable { action: String, step: usize },
    /// A scripted exogenous occurrence names an endogenous action.
    NotExogenous(String),
    WrongStep { event: usize, current: usize },
}

impl fmt::Display for SimError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SimError::NotExecutable { action, step } => {
                write!(f, "{action} is physically inexecutable at step {step}")
            }
            SimError::NotExogenous(a) => write!(f, "scripted action {a} is not exogenous"),
            SimError::WrongStep { event, current } => {
                write!(f, "event for step {event} injected at step {current}")
            }
        }
    }
}

impl core::error::Error for SimError {}

#[derive(Clone, Debug)]
pub struct SimWorld {
    domain: Arc<GroundDomain>,
    state: WorldState,
    script: Vec<ScriptedEvent>,
    report_monitored: bool,
}

impl SimWorld {
    pub fn new(domain: Arc<GroundDomain>, config: SimConfig) -> Result<Self, SimError> {
        for e in &config.script {
            if let EventKind::Exogenous(a) = e.kind {
                if !domain.action(a).exogenous {
                    return Err(SimError::NotExogenous(domain.action_name(a)));
                }
            }
        }
        let mut world = SimWorld {
            domain,
            state: config.initial,
            script: config.script,
            report_monitored: config.report_monitored,
        };
        world.apply_abnormalities();
        Ok(world)
    }

    pub fn state(&self) -> &WorldState {
        &self.state
    }

    pub fn step(&self) -> usize {
        self.state.step
    }

    fn apply_abnormalities(&mut self) {
        let step = self.state.step;
        for e in &self.script {
            if let (true, EventKind::Abnormality { fluent, value }) = (e.step == step, e.kind) {
                self.state.values[fluent.0 as usize] = value;
            }
        }
    }

    /// Effects `action`'s effect propositions would have in the current state.
    fn effects_of(&self, action: ActionId) -> Vec<Lit> {
        self.domain
            .action(action)
            .eps
            .iter()
            .filter(|ep| ep.conditions.iter().all(|c| self.state.holds(*c)))
            .map(|ep| ep.effect)
            .collect()
    }

    /// Applies a scripted event immediately, without advancing the step.
    pub fn inject(&mut self, event: ScriptedEvent) -> Result<(), SimError> {
        if event.step != self.state.step {
            return Err(SimError::WrongStep {
                event: event.step,
                current: self.state.step,
            });
        }
        match event.kind {
            EventKind::Exogenous(a) => {
                for l in self.effects_of(a) {
                    self.state.set(l);
                }
            }
            EventKind::Abnormality { fluent, value } => {
                self.state.values[fluent.0 as usize] = value;
            }
        }
        Ok(())
    }

    /// Runs `action` at the current step. Sensing happens before any
    /// effect; the action and this step's scripted exogenous occurrences
    /// then take effect together and the world moves to the next step.
    pub fn execute(&mut self, action: ActionId) -> Result<Vec<(Lit, usize)>, SimError> {
        let a = self.domain.action(action);
        let step = self.state.step;
        if !a.executable.iter().all(|l| self.state.holds(*l)) {
            return Err(SimError::NotExecutable {
                action: self.domain.action_name(action),
                step,
            });
        }
        let sensed = a
            .observes
            .iter()
            .map(|f| (Lit::new(*f, self.state.values[f.0 as usize]), step))
            .collect();
        let mut effects = self.effects_of(action);
        for e in &self.script {
            if let (true, EventKind::Exogenous(x)) = (e.step == step, e.kind) {
                effects.extend(self.effects_of(x));
            }
        }
        for l in effects {
            self.state.set(l);
        }
        self.state.step += 1;
        self.apply_abnormalities();
        Ok(sensed)
    }

    /// One observation per fluent whose monitor is on.
    pub fn observe_monitored(&self) -> Vec<(Lit, usize)> {
        if !self.report_monitored {
            return Vec::new();
        }
        self.domain
            .monitors()
            .iter()
            .filter(|(_, mon)| self.state.values[mon.0 as usize])
            .map(|(f, _)| (Lit::new(*f, self.state.values[f.0 as usize]), self.state.step))
            .collect()
    }
}

impl World for SimWorld {
    fn execute(&mut self, action: ActionId) -> Result<Vec<(Lit, usize)>, String> {
        SimWorld::execute(self, action).map_err(|e| e.to_string())
    }

    fn observe_monitored(&self) -> Vec<(Lit, usize)> {
        SimWorld::observe_monitored(self)
    }
}

#[cfg(test)]
mod tests;
