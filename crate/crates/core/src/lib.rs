//! Online epistemic planning under incomplete knowledge.
//!
//! The crate implements an approximate (sound, incomplete) temporal
//! knowledge semantics with sensing, postdiction and branching, a weak
//! conditional planner on top of it, an online controller that folds real
//! execution results back into the knowledge state, and a deterministic
//! simulated world for closed-loop tests.
//!
//! Everything here is `no_std` + `alloc`; file IO and the command line live
//! in the companion `hapx` crate.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod controller;
pub mod kernel;
pub mod lang;
mod litset;
pub mod planner;
pub mod sim;

pub use kernel::{EpistemicTree, KernelError, NodeId};
pub use lang::{ActionId, FluentId, GroundDomain, Lit};
pub use litset::LitSet;
