use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use hapx_core::controller::{RunOutcome, Session};
use hapx_core::lang::{validate, ValidateOptions};
use hapx_core::planner::{
    assess, select_best, BudgetMode, ConditionalPlan, PlanQuality, PlannerSession, SearchConfig,
    SearchOutcome,
};
use hapx_core::sim::{SimConfig, SimWorld};
use hapx_core::{EpistemicTree, GroundDomain, NodeId};

use crate::script::parse_script;
use crate::{load_domain, read_source, Status};

pub fn validate_cmd(path: &Path, strict: bool, out: &mut dyn Write) -> Result<Status> {
    let src = read_source(path)?;
    let report = validate(
        &src,
        &ValidateOptions {
            strict_exogenous: strict,
        },
    );
    for v in &report.violations {
        writeln!(out, "violation: {v}")?;
    }
    if report.is_clean() {
        writeln!(out, "ok")?;
        Ok(Status::Success)
    } else {
        Ok(Status::Failure)
    }
}

#[derive(Clone, Debug)]
pub struct PlanOptions {
    pub max_horizon: usize,
    pub exo_n: usize,
    pub exo_mode: BudgetMode,
    pub workers: usize,
    /// How many plans of the minimal horizon compete in selection.
    pub candidates: usize,
    pub node_limit: Option<u64>,
}

impl Default for PlanOptions {
    fn default() -> Self {
        PlanOptions {
            max_horizon: 20,
            exo_n: 1,
            exo_mode: BudgetMode::Modulo,
            workers: 1,
            candidates: 32,
            node_limit: None,
        }
    }
}

impl PlanOptions {
    fn search_config(&self) -> SearchConfig {
        SearchConfig {
            exo_n: self.exo_n.max(1),
            mode: self.exo_mode,
            max_horizon: self.max_horizon,
            node_limit: self.node_limit,
        }
    }
}

/// The selected plan with its quality.
#[derive(Clone, Debug)]
pub struct PlanResult {
    pub plan: ConditionalPlan,
    pub quality: PlanQuality,
    pub candidates: usize,
}

/// Scores candidates, spreading the work over `workers` threads.
pub fn assess_all(
    plans: &[ConditionalPlan],
    base: &EpistemicTree,
    workers: usize,
) -> Vec<Option<PlanQuality>> {
    let score = |p: &ConditionalPlan| {
        p.induce(base, 0)
            .ok()
            .and_then(|tree| assess(p, &tree).ok())
    };
    let chunk = plans.len().div_ceil(workers.max(1)).max(1);
    std::thread::scope(|s| {
        let handles: Vec<_> = plans
            .chunks(chunk)
            .map(|part| s.spawn(move || part.iter().map(score).collect::<Vec<_>>()))
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("assessment worker panicked"))
            .collect()
    })
}

/// Finds the minimal horizon, collects candidate plans there and selects
/// the best one.
pub fn plan_offline(domain: &std::sync::Arc<GroundDomain>, opts: &PlanOptions) -> Result<Option<PlanResult>> {
    let tree = EpistemicTree::new(domain.clone())?;
    let mut session = PlannerSession::new(tree.clone(), NodeId::ROOT, opts.search_config());
    match session.find_first() {
        SearchOutcome::Found(_) => {}
        SearchOutcome::Exhausted => return Ok(None),
        SearchOutcome::LimitReached => {
            log::warn!("search node limit reached");
            return Ok(None);
        }
    }
    let (plans, _) = session.enumerate(opts.candidates.max(1));
    let qualities = assess_all(&plans, &tree, opts.workers);
    let scored: Vec<(ConditionalPlan, PlanQuality, String)> = plans
        .into_iter()
        .zip(qualities)
        .filter_map(|(p, q)| {
            let text = p.serialize(domain);
            Some((p, q?, text))
        })
        .collect();
    let keys: Vec<(PlanQuality, String)> =
        scored.iter().map(|(_, q, s)| (*q, s.clone())).collect();
    let Some(best) = select_best(&keys) else {
        return Ok(None);
    };
    let (plan, quality, _) = scored[best].clone();
    Ok(Some(PlanResult {
        plan,
        quality,
        candidates: scored.len(),
    }))
}

pub fn plan_cmd(path: &Path, opts: &PlanOptions, out: &mut dyn Write) -> Result<Status> {
    let domain = load_domain(path)?;
    writeln!(
        out,
        "; exo-n={} exo-mode={} max-horizon={}",
        opts.exo_n, opts.exo_mode, opts.max_horizon
    )?;
    match plan_offline(&domain, opts)? {
        Some(r) => {
            writeln!(out, "; horizon={} candidates={}", r.plan.horizon, r.candidates)?;
            write!(out, "{}", r.plan.serialize(&domain))?;
            writeln!(out, "{}", r.quality)?;
            Ok(Status::Success)
        }
        None => {
            writeln!(out, "; no plan within horizon {}", opts.max_horizon)?;
            Ok(Status::Failure)
        }
    }
}

#[derive(Clone, Debug)]
pub struct RunOptions {
    pub plan: PlanOptions,
    pub max_iterations: usize,
    pub trace_dir: PathBuf,
}

#[derive(Clone, Debug)]
pub struct RunReport {
    pub outcome: RunOutcome,
    pub final_horizon: usize,
    pub steps: usize,
    pub trace: PathBuf,
    pub log: PathBuf,
    pub quality_history: PathBuf,
    pub world: PathBuf,
}

/// Closed-loop run against the simulated world. Writes the fact trace,
/// session log, quality history and final world snapshot.
pub fn run_closed_loop(domain_path: &Path, script_path: &Path, opts: &RunOptions) -> Result<RunReport> {
    let domain = load_domain(domain_path)?;
    let script_text = std::fs::read_to_string(script_path)
        .with_context(|| format!("reading {}", script_path.display()))?;
    let script = parse_script(&script_text, &domain)
        .with_context(|| format!("in {}", script_path.display()))?;
    let mut world = SimWorld::new(domain.clone(), SimConfig::new(&domain, script))?;
    let mut session = Session::new(domain.clone(), opts.plan.search_config())?;
    let outcome = session.run(&mut world, opts.max_iterations)?;

    let dir = &opts.trace_dir;
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let report = RunReport {
        outcome,
        final_horizon: session.horizon(),
        steps: session.now(),
        trace: dir.join("trace.txt"),
        log: dir.join("session.log"),
        quality_history: dir.join("quality.csv"),
        world: dir.join("world.txt"),
    };
    std::fs::write(&report.trace, session.tree().trace())?;
    std::fs::write(&report.log, session.render_log())?;
    let mut csv = String::from("step,horizon,num_exo,strength,m_value,num_actions\n");
    for r in session.quality_history() {
        let q = r.quality;
        writeln!(
            csv,
            "{},{},{},{},{},{}",
            r.step, r.horizon, q.num_exo, q.strength, q.m_value, q.num_actions
        )?;
    }
    std::fs::write(&report.quality_history, csv)?;
    std::fs::write(&report.world, world.state().dump(&domain))?;
    Ok(report)
}

pub fn run_cmd(domain: &Path, script: &Path, opts: &RunOptions, out: &mut dyn Write) -> Result<Status> {
    let r = run_closed_loop(domain, script, opts)?;
    writeln!(out, "outcome={}", r.outcome)?;
    writeln!(out, "final_horizon={}", r.final_horizon)?;
    writeln!(out, "steps={}", r.steps)?;
    writeln!(out, "trace={}", r.trace.display())?;
    writeln!(out, "log={}", r.log.display())?;
    writeln!(out, "quality_history={}", r.quality_history.display())?;
    writeln!(out, "world={}", r.world.display())?;
    Ok(match r.outcome {
        RunOutcome::GoalAchieved => Status::Success,
        RunOutcome::Unsolvable | RunOutcome::Limit => Status::Failure,
    })
}
