//! The branching epistemic tree and its knowledge closure.

mod closure;
mod trace;
mod tree;

use alloc::string::String;
use core::fmt;

pub use tree::{EpistemicTree, Fork};

/// A point in the transition tree: step `t` in branch `b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId {
    pub step: usize,
    pub branch: usize,
}

impl NodeId {
    pub const ROOT: NodeId = NodeId { step: 0, branch: 0 };

    pub fn new(step: usize, branch: usize) -> Self {
        NodeId { step, branch }
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.step, self.branch)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum KernelError {
    /// A literal and its complement are both known about `step` at
    /// `epistemic_step` in `branch`.
    Inconsistent {
        literal: String,
        step: usize,
        epistemic_step: usize,
        branch: usize,
    },
    ContradictoryInit(String),
    InvalidNode(NodeId),
    NotExecutable { action: String, node: NodeId },
    EffectClash { action: String, node: NodeId },
    SecondEndogenous { action: String, node: NodeId },
    ConflictingSensed { literal: String, step: usize },
}

impl fmt::Display for KernelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KernelError::Inconsistent {
                literal,
                step,
                epistemic_step,
                branch,
            } => write!(
                f,
                "inconsistent knowledge: {literal} and its complement at ({step},{epistemic_step},{branch})"
            ),
            KernelError::ContradictoryInit(l) => {
                write!(f, "initial state contains {l} and its complement")
            }
            KernelError::InvalidNode(n) => write!(f, "node ({n}) is not valid"),
            KernelError::NotExecutable { action, node } => {
                write!(f, "{action} is not known to be executable at ({node})")
            }
            KernelError::EffectClash { action, node } => {
                write!(f, "{action} shares an effect literal with another occurrence at ({node})")
            }
            KernelError::SecondEndogenous { action, node } => {
                write!(f, "{action}: node ({node}) already has an endogenous action")
            }
            KernelError::ConflictingSensed { literal, step } => {
                write!(f, "conflicting sensing results for {literal} at step {step}")
            }
        }
    }
}

impl core::error::Error for KernelError {}

pub type Result<T> = core::result::Result<T, KernelError>;
