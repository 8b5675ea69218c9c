//! Run a scenario from code, the way the command-line tool does.
//!
//! cargo run --release --example scenario -- scenarios/standard.toml

use std::path::PathBuf;

use sheetlift::cli::{run, run_scenario, RunOptions, Scenario, Task};

fn main() -> sheetlift::Result<()> {
    let summary = match std::env::args().nth(1) {
        Some(path) => run_scenario(PathBuf::from(path).as_path(), &RunOptions::default())?,
        None => {
            let opts = RunOptions {
                out: Some("out/scenario-example".into()),
                tasks: Some(vec![Task::SolveLimit, Task::Ly, Task::Kink]),
                ..RunOptions::default()
            };
            run(&Scenario::standard(), &opts)?
        }
    };
    for o in &summary.outcomes {
        println!("{:<15} {:<5} {}", o.task, o.ok, o.message);
        for f in &o.files {
            println!("    {}", summary.out_dir.join(f).display());
        }
    }
    std::process::exit(summary.exit_code());
}
