use std::path::Path;

use sheetlift::cli::export::{read_csv, read_json, render_svg};
use sheetlift::cli::{export_profiles, main_with, run, run_scenario, Format, Profiles, RunOptions, Scenario, Task};
use sheetlift::energy::energy_h;
use sheetlift::solver::solve_limit_problem;
use sheetlift::Error;

const STANDARD: &str = r#"
name = "standard"
anchor = [0.0, 0.5]

[dimensionless]
a_lg_star = 1.0
a_sg_star = 0.3
a_sl_star = 0.3
b_star = 0.01
c_star = 1.0
"#;

fn only(tasks: &[Task], dir: &Path) -> RunOptions {
    RunOptions {
        out: Some(dir.to_path_buf()),
        tasks: Some(tasks.to_vec()),
        ..RunOptions::default()
    }
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn ly_task_reports_critical_height() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("ly.toml");
    std::fs::write(&cfg, STANDARD.replacen("anchor", "tasks = [\"ly\"]\nanchor", 1)).unwrap();
    let out = dir.path().join("out");
    let summary = run_scenario(&cfg, &RunOptions { out: Some(out.clone()), ..Default::default() }).unwrap();
    assert!(summary.ok());
    assert_eq!(summary.outcomes.len(), 1);
    let v = json(&out.join("ly.json"));
    let y_star = v["y_star"].as_f64().unwrap();
    assert_eq!(format!("{y_star:.7}"), "1.4142136");
    assert!((y_star - 2f64.sqrt()).abs() < 1e-15);
    let csv = std::fs::read_to_string(out.join("ly_profile.csv")).unwrap();
    assert!(csv.starts_with("s,x,y\n"));
    assert!(csv.lines().count() > 100);
}

#[test]
fn missing_anchor_is_named() {
    let text = STANDARD.replace("anchor = [0.0, 0.5]\n", "");
    let err = Scenario::from_toml_str(&text).unwrap_err();
    assert!(matches!(err, Error::Scenario(_)));
    assert!(err.to_string().contains("anchor"), "{err}");
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, text).unwrap();
    let code = main_with(["sheetlift", "ly", "--config", cfg.to_str().unwrap()]);
    assert_ne!(code, 0);
}

#[test]
fn scenario_validation() {
    let both = format!("{STANDARD}\n[physical]\ngamma_lg = 0.07\ngamma_sg = 0.03\ngamma_sl = 0.03\nrho_l = 1e3\nrho_s = 1e3\ng = 9.8\ne_mod = 1e6\nh = 1e-4\nl = 0.05\n");
    assert!(Scenario::from_toml_str(&both).unwrap_err().to_string().contains("exactly one"));
    let few = STANDARD.replacen("anchor", "solver = { nodes = 8 }\nanchor", 1);
    assert!(Scenario::from_toml_str(&few).unwrap_err().to_string().contains("solver.nodes"));
    let big_h = STANDARD.replacen("anchor", "h_sweep = [0.5, 1.5, 0.1]\nanchor", 1);
    assert!(Scenario::from_toml_str(&big_h).unwrap_err().to_string().contains("h_sweep"));
    let typo = STANDARD.replace("c_star", "cstar");
    assert!(Scenario::from_toml_str(&typo).is_err());
    // TOML diagnostics carry the line
    let broken = STANDARD.replace("a_lg_star = 1.0", "a_lg_star = ");
    let msg = Scenario::from_toml_str(&broken).unwrap_err().to_string();
    assert!(msg.contains("line"), "{msg}");
}

#[test]
fn json_scenarios_are_accepted() {
    let s = Scenario::standard();
    let text = serde_json::to_string(&s).unwrap();
    assert_eq!(Scenario::from_json_str(&text).unwrap(), s);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.json");
    std::fs::write(&path, text).unwrap();
    assert_eq!(Scenario::from_path(&path).unwrap(), s);
}

#[test]
fn full_standard_run_writes_every_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("standard.toml");
    std::fs::write(&cfg, STANDARD).unwrap();
    let out = dir.path().join("out");
    let code = main_with(["sheetlift", "run", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(code, 0);
    for f in [
        "limit_solution.json",
        "profile_limit.csv",
        "profile_limit.svg",
        "solve_h.json",
        "profile_h.csv",
        "profile_h.svg",
        "sweep.json",
        "gamma_check.json",
        "ly.json",
        "ly_profile.csv",
        "kink.json",
        "rearrange.json",
        "summary.json",
    ] {
        assert!(out.join(f).is_file(), "{f} missing");
    }
    // schema spot checks
    let lim = json(&out.join("limit_solution.json"));
    for key in ["regime", "l", "lambda", "energy", "checks", "contact_left", "contact_right"] {
        assert!(lim.get(key).is_some(), "limit_solution.json lacks {key}");
    }
    assert!(lim["energy"]["total"].is_f64());
    let sweep = json(&out.join("sweep.json"));
    assert_eq!(sweep["rows"].as_array().unwrap().len(), 3);
    assert!(sweep["rows"][2]["distance"].as_f64().unwrap() <= 1e-2);
    let solve = json(&out.join("solve_h.json"));
    assert_eq!(solve["solve"]["converged"], true);
    let summary = json(&out.join("summary.json"));
    let outcomes = summary["outcomes"].as_array().unwrap();
    assert_eq!(outcomes.len(), 7);
    assert!(outcomes.iter().all(|o| o["ok"] == true));
}

#[test]
fn flat_solution_renders_on_the_waterline() {
    let s = Scenario::standard();
    let sol = solve_limit_problem(&s.setup().unwrap().family.limit, [0.0, 0.0]).unwrap();
    let svg = render_svg(&Profiles::from_limit(&sol, 64).unwrap());
    assert!(svg.contains("viewBox=\"-4 -2.5 6 3\""));
    assert_eq!(svg.matches("<polyline").count(), 4);
    for line in svg.lines().filter(|l| l.starts_with("<polyline")) {
        let pts = line.split("points=\"").nth(1).unwrap().split('"').next().unwrap();
        for pair in pts.split_whitespace() {
            let y: f64 = pair.split(',').nth(1).unwrap().parse().unwrap();
            assert_eq!(y, 0.0, "{line}");
        }
    }
    assert!(svg.contains("class=\"waterline\""));
}

#[test]
fn csv_round_trip() {
    let s = Scenario::standard();
    let sol = solve_limit_problem(&s.setup().unwrap().family.limit, [0.0, 0.5]).unwrap();
    let prof = Profiles::from_limit(&sol, 200).unwrap();
    // fully wet: 201 sheet nodes, with the contact at the anchor
    assert_eq!(prof.wet.len(), 201);
    assert_eq!(prof.dry.len(), 1);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("p.csv");
    export_profiles(&prof, Format::Csv, &path).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("part,s,x,y\n"));
    let rows = text.lines().count() - 1;
    assert_eq!(rows, prof.parts().iter().map(|(_, p)| p.len()).sum::<usize>());
    let back = read_csv(text.as_bytes()).unwrap();
    for ((_, a), (_, b)) in prof.parts().iter().zip(back.parts().iter()) {
        assert_eq!(a, b);
    }
    assert!(read_csv("part,s,x,y\nbogus,0,0,0\n".as_bytes()).is_err());
}

#[test]
fn json_round_trip_keeps_energies_bit_identical() {
    let s = Scenario::standard();
    let setup = s.setup().unwrap();
    let sol = solve_limit_problem(&setup.family.limit, [0.3, 0.8]).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("p.json");
    let prof = Profiles::from_limit(&sol, 300).unwrap();
    export_profiles(&prof, Format::Json, &path).unwrap();
    let back = read_json(&path).unwrap();
    assert_eq!(back, prof);
    assert_eq!(back.energy.total.to_bits(), prof.energy.total.to_bits());
    // the same for a thickness-h configuration
    let cfg = sol.sheet(100).unwrap();
    let p = setup.params;
    let prof = Profiles::from_configuration(&cfg, &p).unwrap();
    assert_eq!(prof.energy, energy_h(&cfg, &p).unwrap());
    export_profiles(&prof, Format::Json, &path).unwrap();
    assert_eq!(read_json(&path).unwrap(), prof);
}

#[test]
fn unwritable_path_is_an_error() {
    let s = Scenario::standard();
    let sol = solve_limit_problem(&s.setup().unwrap().family.limit, [0.0, 0.5]).unwrap();
    let prof = Profiles::from_limit(&sol, 16).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("missing").join("p.csv");
    assert!(matches!(export_profiles(&prof, Format::Csv, &bad), Err(Error::Io(_))));
}

#[test]
fn outputs_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let s = Scenario::standard();
    let tasks = [Task::SolveLimit, Task::SolveH, Task::RearrangeDemo, Task::Kink];
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    run(&s, &only(&tasks, &a)).unwrap();
    run(&s, &only(&tasks, &b)).unwrap();
    for f in ["limit_solution.json", "profile_limit.csv", "solve_h.json", "profile_h.csv", "rearrange.json", "kink.json"] {
        assert_eq!(std::fs::read(a.join(f)).unwrap(), std::fs::read(b.join(f)).unwrap(), "{f}");
    }
    // a different seed changes the random battery only
    let c = dir.path().join("c");
    run(&s, &RunOptions { seed: Some(1), ..only(&[Task::RearrangeDemo], &c) }).unwrap();
    assert_ne!(std::fs::read(a.join("rearrange.json")).unwrap(), std::fs::read(c.join("rearrange.json")).unwrap());
}

#[test]
fn parallel_flag_gives_the_same_sweep() {
    let dir = tempfile::tempdir().unwrap();
    let s = Scenario::standard();
    let (a, b) = (dir.path().join("serial"), dir.path().join("parallel"));
    run(&s, &only(&[Task::Sweep], &a)).unwrap();
    run(&s, &RunOptions { parallel: true, ..only(&[Task::Sweep], &b) }).unwrap();
    assert_eq!(std::fs::read(a.join("sweep.json")).unwrap(), std::fs::read(b.join("sweep.json")).unwrap());
}

#[test]
fn failing_task_gives_nonzero_exit_and_keeps_earlier_files() {
    let dir = tempfile::tempdir().unwrap();
    // anchor far above the reachable range: the limit solve fails, ly still runs
    let text = STANDARD
        .replace("anchor = [0.0, 0.5]", "anchor = [0.0, 5.0]")
        .replacen("anchor", "tasks = [\"ly\", \"solve-limit\"]\nanchor", 1);
    let cfg = dir.path().join("far.toml");
    std::fs::write(&cfg, text).unwrap();
    let out = dir.path().join("out");
    let summary = run_scenario(&cfg, &RunOptions { out: Some(out.clone()), ..Default::default() }).unwrap();
    assert_eq!(summary.exit_code(), 1);
    assert!(summary.outcomes[0].ok);
    assert!(!summary.outcomes[1].ok);
    assert!(summary.outcomes[1].message.contains("unreachable"), "{}", summary.outcomes[1].message);
    assert!(out.join("ly.json").is_file());
    assert!(out.join("summary.json").is_file());
}
