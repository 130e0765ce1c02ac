use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hapx::commands::{plan_cmd, run_cmd, validate_cmd, PlanOptions, RunOptions};
use hapx::Status;
use hapx_core::planner::BudgetMode;

/// Online epistemic planning with sensing, postdiction and replanning.
#[derive(Parser)]
#[command(name = "hapx", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a domain/problem file. Exit 0 clean, 1 violations, 2 error.
    Validate {
        /// Domain and problem file.
        file: PathBuf,
        /// Require exogenous actions to have one unconditional effect.
        #[arg(long)]
        strict_exogenous: bool,
    },
    /// Plan offline. Exit 0 plan found, 1 none, 2 error.
    Plan {
        /// Domain and problem file.
        file: PathBuf,
        #[command(flatten)]
        search: SearchArgs,
        /// Largest plan horizon tried.
        #[arg(long, default_value_t = 20)]
        horizon: usize,
        /// Plans of the minimal horizon compared during selection.
        #[arg(long, default_value_t = 32)]
        candidates: usize,
        /// Threads used to score candidate plans.
        #[arg(long, default_value_t = 1)]
        workers: usize,
    },
    /// Closed-loop run against the simulator. Exit 0 goal achieved,
    /// 1 unsolvable or limit, 2 error.
    Run {
        /// Domain and problem file.
        domain: PathBuf,
        /// Event script driving the simulated world.
        script: PathBuf,
        #[command(flatten)]
        search: SearchArgs,
        /// Largest plan horizon before the run gives up.
        #[arg(long, default_value_t = 20)]
        max_horizon: usize,
        /// Accepted for compatibility: branch ids are always deterministic.
        #[arg(long)]
        seedless: bool,
        /// Controller decisions before the run stops with outcome `limit`.
        #[arg(long, default_value_t = 10_000)]
        max_iterations: usize,
        /// Where trace, session log and quality history are written.
        #[arg(long, env = "HAPX_TRACE_DIR", default_value = "hapx-out")]
        trace_dir: PathBuf,
    },
}

#[derive(Args)]
struct SearchArgs {
    /// Exogenous budget constant.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    exo_n: u64,
    /// Budget mode: modulo or division.
    #[arg(long, default_value = "modulo")]
    exo_mode: BudgetMode,
    /// Stop a search after expanding this many nodes.
    #[arg(long)]
    node_limit: Option<u64>,
}

impl SearchArgs {
    fn options(&self, max_horizon: usize) -> PlanOptions {
        PlanOptions {
            max_horizon,
            exo_n: self.exo_n as usize,
            exo_mode: self.exo_mode,
            node_limit: self.node_limit,
            ..PlanOptions::default()
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { Status::Error as u8 } else { 0 });
        }
    };
    let mut out = std::io::stdout().lock();
    let result = match cli.command {
        Command::Validate {
            file,
            strict_exogenous,
        } => validate_cmd(&file, strict_exogenous, &mut out),
        Command::Plan {
            file,
            search,
            horizon,
            candidates,
            workers,
        } => {
            let opts = PlanOptions {
                candidates,
                workers: workers.max(1),
                ..search.options(horizon)
            };
            plan_cmd(&file, &opts, &mut out)
        }
        Command::Run {
            domain,
            script,
            search,
            max_horizon,
            seedless: _,
            max_iterations,
            trace_dir,
        } => {
            let opts = RunOptions {
                plan: search.options(max_horizon),
                max_iterations,
                trace_dir,
            };
            run_cmd(&domain, &script, &opts, &mut out)
        }
    };
    let _ = out.flush();
    match result {
        Ok(status) => ExitCode::from(status as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(Status::Error as u8)
        }
    }
}
