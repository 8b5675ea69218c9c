//! Scenario-driven front end: parse a scenario, run the requested tasks in
//! order and write one set of files per task.
//!
//! ```text
//! sheetlift run --config scenarios/standard.toml --out out/standard
//! sheetlift ly --config scenarios/ly.toml
//! sheetlift sweep --parallel
//! ```
//!
//! Without `--config` the built-in standard scenario is used. Exit status
//! is 0 when every task met its tolerance, 1 when some task failed or
//! missed it, and 2 when the scenario could not be read.

pub mod export;
pub mod scenario;
mod tasks;

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

pub use export::{export_profiles, Format, Part, Profiles};
pub use scenario::{Scenario, Setup, Task, DEFAULT_SEED};
pub use tasks::{random_polyline, short_arc, TaskOutcome};

use crate::Result;

/// Command-line overrides of a scenario.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunOptions {
    pub out: Option<PathBuf>,
    pub parallel: bool,
    pub seed: Option<u64>,
    /// Run only these tasks instead of the scenario's list.
    pub tasks: Option<Vec<Task>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub scenario: String,
    pub out_dir: PathBuf,
    pub seed: u64,
    pub outcomes: Vec<TaskOutcome>,
}

impl RunSummary {
    pub fn ok(&self) -> bool {
        self.outcomes.iter().all(|o| o.ok)
    }

    pub fn exit_code(&self) -> i32 {
        if self.ok() {
            0
        } else {
            1
        }
    }
}

/// Read the scenario at `path` and run it.
pub fn run_scenario(path: &Path, opts: &RunOptions) -> Result<RunSummary> {
    run(&Scenario::from_path(path)?, opts)
}

/// Run the tasks of `scenario` sequentially. A task that fails records its
/// error in the summary; the files of earlier tasks are kept.
pub fn run(scenario: &Scenario, opts: &RunOptions) -> Result<RunSummary> {
    scenario.validate()?;
    let setup = scenario.setup()?;
    let dir = opts
        .out
        .clone()
        .or_else(|| scenario.out.clone())
        .unwrap_or_else(|| PathBuf::from("out").join(&scenario.name));
    std::fs::create_dir_all(&dir)?;
    let seed = opts.seed.unwrap_or(scenario.seed);
    let ctx = tasks::Context {
        scenario,
        setup,
        dir: &dir,
        parallel: opts.parallel,
        seed,
    };
    let list = opts.tasks.as_deref().unwrap_or(&scenario.tasks);
    let outcomes = list
        .iter()
        .map(|&task| {
            tasks::run_task(task, &ctx).unwrap_or_else(|e| TaskOutcome {
                task,
                ok: false,
                files: Vec::new(),
                message: format!("failed: {e}"),
            })
        })
        .collect();
    let summary = RunSummary {
        scenario: scenario.name.clone(),
        out_dir: dir.clone(),
        seed,
        outcomes,
    };
    let mut text = serde_json::to_string_pretty(&summary)?;
    text.push('\n');
    std::fs::write(dir.join("summary.json"), text)?;
    Ok(summary)
}

#[derive(Debug, Parser)]
#[command(name = "sheetlift", version, about = "Floating elastic sheet lifted at one end")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Scenario file (TOML, or JSON by extension). Defaults to the standard scenario.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory. Defaults to the scenario's `out`, then `out/<name>`.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Solve the h values of a sweep on separate threads.
    #[arg(long)]
    pub parallel: bool,
    /// Seed for the random batteries.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run every task listed in the scenario.
    Run(Common),
    /// Semi-analytic limit solution with profile exports.
    SolveLimit(Common),
    /// Minimize the thickness-h energy at the scenario's working thickness.
    SolveH(Common),
    /// Minimizers over the h sweep against the limit solution.
    Sweep(Common),
    /// Recovery sequence of the limit solution.
    GammaCheck(Common),
    /// Critical Laplace–Young meniscus.
    Ly(Common),
    /// Fillet crossover and gravity expansion at a kink.
    Kink(Common),
    /// Monotone rearrangement and isometrization on random curves.
    RearrangeDemo(Common),
}

impl Command {
    fn split(&self) -> (Option<Task>, &Common) {
        match self {
            Command::Run(c) => (None, c),
            Command::SolveLimit(c) => (Some(Task::SolveLimit), c),
            Command::SolveH(c) => (Some(Task::SolveH), c),
            Command::Sweep(c) => (Some(Task::Sweep), c),
            Command::GammaCheck(c) => (Some(Task::GammaCheck), c),
            Command::Ly(c) => (Some(Task::Ly), c),
            Command::Kink(c) => (Some(Task::Kink), c),
            Command::RearrangeDemo(c) => (Some(Task::RearrangeDemo), c),
        }
    }
}

/// Parse `args` (program name first), run, print one line per task and
/// return the exit status.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let (task, common) = cli.command.split();
    let scenario = match &common.config {
        Some(path) => Scenario::from_path(path),
        None => Ok(Scenario::standard()),
    };
    let scenario = match scenario {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    let opts = RunOptions {
        out: common.out.clone(),
        parallel: common.parallel,
        seed: common.seed,
        tasks: task.map(|t| vec![t]),
    };
    match run(&scenario, &opts) {
        Ok(summary) => {
            for o in &summary.outcomes {
                println!("{:<15} {}  {}", o.task.name(), if o.ok { "ok  " } else { "FAIL" }, o.message);
            }
            println!("wrote {}", summary.out_dir.display());
            summary.exit_code()
        }
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}
