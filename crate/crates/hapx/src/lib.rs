//! File formats and command implementations behind the `hapx` binary.

pub mod commands;
pub mod script;

use std::path::Path;
use std::sync::Arc;

use anyhow::{Context, Result};
use hapx_core::lang::{ground, parse, Source};
use hapx_core::GroundDomain;

/// Exit statuses shared by every command.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    /// Clean report, plan found, or goal achieved.
    Success = 0,
    /// Violations, no plan, unsolvable, or a limit was hit.
    Failure = 1,
    /// IO, parse or usage error.
    Error = 2,
}

pub fn read_source(path: &Path) -> Result<Source> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse(&text).with_context(|| format!("parsing {}", path.display()))
}

/// Parses and grounds a domain file, dropping actions that static facts
/// rule out.
pub fn load_domain(path: &Path) -> Result<Arc<GroundDomain>> {
    let src = read_source(path)?;
    let domain = ground(&src).with_context(|| format!("grounding {}", path.display()))?;
    Ok(Arc::new(domain.prune_static()))
}
