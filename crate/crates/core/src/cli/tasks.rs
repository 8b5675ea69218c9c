//! One runner per task. Each writes its own files and reports whether the
//! task met its tolerance.

use std::path::Path;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::Serialize;

use super::export::{export_profiles, Format, Part, Profiles, LIMIT_EXPORT_NODES, MENISCUS_EXPORT_SAMPLES};
use super::scenario::{Scenario, Setup, Task};
use crate::curve::{fmt17, isometrize, monotone_rearrange, scale, ParamCurve, Point};
use crate::energy::{fillet_crossover, fillet_curve, kink_analysis_with, Configuration, FilletCrossover, KinkPhysics, KinkReport};
use crate::gamma::{gamma_convergence_experiment, recovery_sequence, RecoveryOptions, SweepOptions};
use crate::laplace_young::{capillary_length, critical_height, parametric_objective, solve_graph};
use crate::solver::{
    contact_conditions, minimize_energy_h, profile_distance, smoothed_start, solve_limit_problem, symmetry_distance,
    ContactReport, ContactRegime, NewtonReport, SolveReport,
};
use crate::energy::EnergyBreakdown;
use crate::model::{DimensionlessParams, LimitConstants};
use crate::Result;

/// Pass/fail of one task with the files it wrote.
#[derive(Debug, Clone, PartialEq, Serialize, serde::Deserialize)]
pub struct TaskOutcome {
    pub task: Task,
    pub ok: bool,
    pub files: Vec<String>,
    pub message: String,
}

/// Tolerance on the limit checks (symmetry, length, chord, contact).
pub const LIMIT_TOL: f64 = 1e-9;
/// Tolerance on the force balances at the contact points.
pub const CONTACT_TOL: f64 = 1e-8;
/// Laplace–Young residual tolerance.
pub const LY_TOL: f64 = 1e-8;
/// Final recovery gap allowed by `gamma-check`.
pub const RECOVERY_GAP_TOL: f64 = 5e-2;
/// Smallest acceptable exponent of the gravity expansion remainder.
pub const GRAVITY_EXPONENT_MIN: f64 = 1.9;
/// Allowed factor between the fillet crossover and the kink scale.
pub const KINK_FACTOR: f64 = 3.0;
/// Largest error ratio between successive isometrization counts.
pub const ISOMETRIZE_RATIO_MAX: f64 = 0.75;

pub(crate) struct Context<'a> {
    pub scenario: &'a Scenario,
    pub setup: Setup,
    pub dir: &'a Path,
    pub parallel: bool,
    pub seed: u64,
}

impl Context<'_> {
    fn json<T: Serialize>(&self, name: &str, value: &T, files: &mut Vec<String>) -> Result<()> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        std::fs::write(self.dir.join(name), text)?;
        files.push(name.to_string());
        Ok(())
    }

    fn profiles(&self, stem: &str, prof: &Profiles, files: &mut Vec<String>) -> Result<()> {
        for (fmt, ext) in [(Format::Csv, "csv"), (Format::Svg, "svg")] {
            let name = format!("{stem}.{ext}");
            export_profiles(prof, fmt, &self.dir.join(&name))?;
            files.push(name);
        }
        Ok(())
    }
}

fn outcome(task: Task, ok: bool, files: Vec<String>, message: String) -> TaskOutcome {
    TaskOutcome {
        task,
        ok,
        files,
        message,
    }
}

pub(crate) fn run_task(task: Task, ctx: &Context) -> Result<TaskOutcome> {
    match task {
        Task::SolveLimit => solve_limit(ctx),
        Task::SolveH => solve_h(ctx),
        Task::Sweep => sweep(ctx),
        Task::GammaCheck => gamma_check(ctx),
        Task::Ly => ly(ctx),
        Task::Kink => kink(ctx),
        Task::RearrangeDemo => rearrange_demo(ctx),
    }
}

#[derive(Debug, Serialize)]
struct LimitChecks {
    symmetry_residual: f64,
    length_error: f64,
    dry_chord_deviation: f64,
    contact_residual: f64,
    y_star: f64,
    below_critical_height: bool,
}

#[derive(Debug, Serialize)]
struct LimitReport<'a> {
    scenario: &'a str,
    constants: LimitConstants,
    anchor: Point,
    regime: ContactRegime,
    contact_left: Point,
    contact_right: Point,
    l: f64,
    lambda: f64,
    contact_angle: f64,
    energy: EnergyBreakdown,
    contact: ContactReport,
    checks: LimitChecks,
    newton: NewtonReport,
}

fn solve_limit(ctx: &Context) -> Result<TaskOutcome> {
    let sol = solve_limit_problem(&ctx.setup.family.limit, ctx.setup.anchor)?;
    let contact = contact_conditions(&sol);
    let y_star = sol.y_star();
    let checks = LimitChecks {
        symmetry_residual: sol.symmetry_residual()?,
        length_error: (sol.sheet_length(20_000)? - 1.0).abs(),
        dry_chord_deviation: sol.dry_chord_deviation(4000)?,
        contact_residual: contact.max_residual(),
        y_star,
        below_critical_height: sol.contact_right[1] <= y_star + LIMIT_TOL,
    };
    let ok = checks.symmetry_residual <= LIMIT_TOL
        && checks.length_error <= LIMIT_TOL
        && checks.dry_chord_deviation <= LIMIT_TOL
        && checks.contact_residual <= CONTACT_TOL
        && checks.below_critical_height;
    let message = format!(
        "{:?}, l = {:.6}, λ = {:.6}, symmetry {:.1e}, length error {:.1e}",
        sol.regime, sol.l, sol.lambda, checks.symmetry_residual, checks.length_error
    );
    let report = LimitReport {
        scenario: &ctx.scenario.name,
        constants: sol.constants,
        anchor: sol.anchor,
        regime: sol.regime,
        contact_left: sol.contact_left,
        contact_right: sol.contact_right,
        l: sol.l,
        lambda: sol.lambda,
        contact_angle: sol.contact_angle,
        energy: sol.energy,
        contact,
        checks,
        newton: sol.newton.clone(),
    };
    let mut files = Vec::new();
    ctx.json("limit_solution.json", &report, &mut files)?;
    ctx.profiles("profile_limit", &Profiles::from_limit(&sol, LIMIT_EXPORT_NODES)?, &mut files)?;
    Ok(outcome(Task::SolveLimit, ok, files, message))
}

#[derive(Debug, Serialize)]
struct SolveHReport<'a> {
    scenario: &'a str,
    params: DimensionlessParams,
    nodes: usize,
    contact_parameter: f64,
    lambda_limit: f64,
    symmetry_distance: f64,
    distance_to_limit: f64,
    energy: EnergyBreakdown,
    solve: SolveReport,
}

fn solve_h(ctx: &Context) -> Result<TaskOutcome> {
    let p = ctx.setup.params;
    let lim = ctx.setup.family.limit;
    let nodes = ctx.scenario.solver.nodes;
    let sol = solve_limit_problem(&lim, ctx.setup.anchor)?;
    let init = smoothed_start(&sol, &p, nodes)?;
    let (cfg, solve) = minimize_energy_h(&p, &init, &ctx.scenario.solver.minimize_options())?;
    let prof = Profiles::from_configuration(&cfg, &p)?;
    let report = SolveHReport {
        scenario: &ctx.scenario.name,
        params: p,
        nodes,
        contact_parameter: cfg.l,
        lambda_limit: lim.lambda_pred(),
        symmetry_distance: symmetry_distance(&cfg, &lim)?,
        distance_to_limit: profile_distance(&cfg, &sol.sheet(4 * nodes)?, &lim)?,
        energy: prof.energy,
        solve,
    };
    let ok = report.solve.converged;
    let message = format!(
        "h = {}, {} iterations, converged {}, symmetry distance {:.2e}",
        p.h_hat, report.solve.iterations, ok, report.symmetry_distance
    );
    let mut files = Vec::new();
    ctx.json("solve_h.json", &report, &mut files)?;
    ctx.profiles("profile_h", &prof, &mut files)?;
    Ok(outcome(Task::SolveH, ok, files, message))
}

fn sweep(ctx: &Context) -> Result<TaskOutcome> {
    let opts = SweepOptions {
        nodes: ctx.scenario.solver.nodes,
        minimize: ctx.scenario.solver.minimize_options(),
        parallel: ctx.parallel,
    };
    let rep = gamma_convergence_experiment(&ctx.setup.family, ctx.setup.anchor, &ctx.scenario.h_sweep, &opts)?;
    let ok = !rep.partial && rep.distances_decrease && rep.rows.iter().all(|r| r.converged);
    let message = format!(
        "{} thicknesses, final distance {:.2e}, distance rate {:.2}",
        rep.rows.len(),
        rep.final_distance(),
        rep.distance_rate
    );
    let mut files = Vec::new();
    ctx.json("sweep.json", &rep, &mut files)?;
    Ok(outcome(Task::Sweep, ok, files, message))
}

#[derive(Debug, Serialize)]
struct MemberSummary {
    h: f64,
    sigma: usize,
    energy_h: f64,
    bending: f64,
    thinning_ok: bool,
    gap: f64,
    sup_distance: f64,
    length_error: f64,
    weak_pairings: [f64; 8],
}

#[derive(Debug, Serialize)]
struct GammaCheckReport {
    alpha: f64,
    limit_energy: f64,
    members: Vec<MemberSummary>,
    thinning_holds: bool,
    gap_decreasing_at_tail: bool,
}

fn gamma_check(ctx: &Context) -> Result<TaskOutcome> {
    let sol = solve_limit_problem(&ctx.setup.family.limit, ctx.setup.anchor)?;
    let target = sol.sheet(2000)?;
    let seq = recovery_sequence(&target, &ctx.setup.family, &ctx.scenario.recovery_h, &RecoveryOptions::default())?;
    let report = GammaCheckReport {
        alpha: seq.alpha,
        limit_energy: seq.limit_energy,
        thinning_holds: seq.thinning_holds(),
        gap_decreasing_at_tail: seq.gap_decreasing_at_tail(),
        members: seq
            .members
            .iter()
            .map(|m| MemberSummary {
                h: m.h,
                sigma: m.sigma,
                energy_h: m.energy_h,
                bending: m.bending,
                thinning_ok: m.thinning_ok,
                gap: m.gap,
                sup_distance: m.sup_distance,
                length_error: m.length_error,
                weak_pairings: m.weak_pairings,
            })
            .collect(),
    };
    let final_gap = seq.members.last().map_or(f64::NAN, |m| m.gap.abs());
    let tail_ok = seq.members.len() < 3 || report.gap_decreasing_at_tail;
    let ok = report.thinning_holds && tail_ok && final_gap <= RECOVERY_GAP_TOL;
    let message = format!(
        "σ = {:?}, final gap {:.2e}, thinning {}",
        seq.sigma(),
        final_gap,
        report.thinning_holds
    );
    let mut files = Vec::new();
    ctx.json("gamma_check.json", &report, &mut files)?;
    Ok(outcome(Task::GammaCheck, ok, files, message))
}

#[derive(Debug, Serialize)]
struct LyReport {
    a_lg: f64,
    c: f64,
    y_star: f64,
    capillary_length: f64,
    profile_height: f64,
    first_integral_residual: f64,
    ode_residual: f64,
    energy: f64,
}

fn ly(ctx: &Context) -> Result<TaskOutcome> {
    let lim = ctx.setup.family.limit;
    let (a, c) = (lim.a_lg_star, lim.c_star);
    let y_star = critical_height(a, c)?;
    let prof = solve_graph(y_star, a, c)?;
    let report = LyReport {
        a_lg: a,
        c,
        y_star,
        capillary_length: capillary_length(a, c),
        profile_height: y_star,
        first_integral_residual: prof.first_integral_residual(),
        ode_residual: prof.ode_residual(),
        energy: prof.energy(),
    };
    let ok = report.first_integral_residual <= LY_TOL && report.ode_residual <= LY_TOL;
    let message = format!("y* = {:.7}, ODE residual {:.1e}", y_star, report.ode_residual);
    let mut files = Vec::new();
    ctx.json("ly.json", &report, &mut files)?;
    let mut out = csv::Writer::from_path(ctx.dir.join("ly_profile.csv"))?;
    out.write_record(["s", "x", "y"])?;
    let thin = Part::thinned(&prof.sigma, &prof.samples, MENISCUS_EXPORT_SAMPLES);
    for (s, p) in thin.s.iter().zip(&thin.points) {
        out.write_record([fmt17(*s), fmt17(p[0]), fmt17(p[1])])?;
    }
    out.flush()?;
    files.push("ly_profile.csv".into());
    Ok(outcome(Task::Ly, ok, files, message))
}

#[derive(Debug, Serialize)]
struct KinkTaskReport {
    crossovers: Vec<FilletCrossover>,
    gravity: KinkReport,
}

fn kink(ctx: &Context) -> Result<TaskOutcome> {
    let k = &ctx.scenario.kink;
    let physics = |h: f64| KinkPhysics {
        h,
        e_mod: k.e_mod,
        gamma: k.gamma,
        rho_g: k.rho_g,
    };
    let crossovers = k
        .h_values
        .iter()
        .map(|&h| fillet_crossover(&physics(h), k.turning))
        .collect::<Result<Vec<_>>>()?;
    // a fillet at the kink scale of the thickest sheet, lifted to y0
    let h0 = k.h_values.first().copied().unwrap_or(1e-2);
    let phys = physics(h0);
    let curve = fillet_curve(phys.kink_scale(), k.turning, 2.0 * k.window, k.y0, 400)?;
    let anchor = curve.end();
    let cfg = Configuration::new(curve, 0.5, anchor)?;
    let gravity = kink_analysis_with(&cfg, &phys, k.window)?;
    let ratios_ok = crossovers
        .iter()
        .all(|x| x.ratio >= 1.0 / KINK_FACTOR && x.ratio <= KINK_FACTOR);
    let ok = ratios_ok && gravity.gravity_exponent >= GRAVITY_EXPONENT_MIN;
    let ratios: Vec<String> = crossovers.iter().map(|x| format!("{:.3}", x.ratio)).collect();
    let message = format!(
        "crossover/kink-scale ratios [{}], gravity exponent {:.3}",
        ratios.join(", "),
        gravity.gravity_exponent
    );
    let mut files = Vec::new();
    ctx.json("kink.json", &KinkTaskReport { crossovers, gravity }, &mut files)?;
    Ok(outcome(Task::Kink, ok, files, message))
}

/// A random polyline from `(0, 0.8)` to `(3, 0)` with up to `max_nodes`
/// interior nodes in `[-0.5, 1.5] × [-0.3, 1.2]`.
pub fn random_polyline(rng: &mut impl Rng, max_nodes: usize) -> Vec<Point> {
    let k = rng.gen_range(2..=max_nodes.max(2));
    let mut pts = vec![[0.0, 0.8]];
    pts.extend((0..k).map(|_| [rng.gen_range(-0.5..1.5), rng.gen_range(-0.3..1.2)]));
    pts.push([3.0, 0.0]);
    pts
}

/// Half circle of length `0.9` traversed on `[0, 1]`: a short curve.
pub fn short_arc(nodes: usize) -> Result<ParamCurve> {
    let r = 1.0 / std::f64::consts::PI;
    let pts = (0..=nodes)
        .map(|i| {
            let a = std::f64::consts::PI * (1.0 - i as f64 / nodes as f64);
            scale([r * a.cos(), r * a.sin()], 0.9)
        })
        .collect();
    ParamCurve::uniform(pts)
}

#[derive(Debug, Serialize)]
struct IsometrizeRow {
    n: usize,
    sup_error: f64,
    length_error: f64,
    embedded: bool,
}

#[derive(Debug, Serialize)]
struct RearrangeReport {
    seed: u64,
    curves: usize,
    /// Largest `objective(rearranged) − objective(input)`.
    worst_increase: f64,
    mean_decrease: f64,
    isometrize: Vec<IsometrizeRow>,
    error_ratios: Vec<f64>,
}

fn rearrange_demo(ctx: &Context) -> Result<TaskOutcome> {
    let lim = ctx.setup.family.limit;
    let r = &ctx.scenario.rearrange;
    let mut rng = StdRng::seed_from_u64(ctx.seed);
    let mut worst = f64::NEG_INFINITY;
    let mut total_decrease = 0.0;
    for _ in 0..r.curves {
        let c = ParamCurve::by_chord_length(random_polyline(&mut rng, r.max_nodes))?;
        let out = monotone_rearrange(&c)?;
        let before = parametric_objective(c.points(), lim.a_lg_star, lim.c_star);
        let after = parametric_objective(out.points(), lim.a_lg_star, lim.c_star);
        worst = worst.max(after - before);
        total_decrease += before - after;
    }
    let arc = short_arc(4000)?;
    let isometrize = r
        .isometrize_n
        .iter()
        .map(|&n| {
            let out = isometrize(&arc, n)?;
            Ok(IsometrizeRow {
                n,
                sup_error: out.sup_error,
                length_error: (out.curve.length() - 1.0).abs(),
                embedded: out.all_embedded(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let error_ratios: Vec<f64> = isometrize.windows(2).map(|w| w[1].sup_error / w[0].sup_error).collect();
    let report = RearrangeReport {
        seed: ctx.seed,
        curves: r.curves,
        worst_increase: worst,
        mean_decrease: total_decrease / r.curves.max(1) as f64,
        isometrize,
        error_ratios,
    };
    let ok = report.worst_increase <= 1e-12
        && report.isometrize.iter().all(|row| row.length_error <= 1e-10)
        && report.error_ratios.iter().all(|q| *q <= ISOMETRIZE_RATIO_MAX);
    let message = format!(
        "{} curves, worst increase {:.1e}, isometrize ratios {:?}",
        r.curves,
        report.worst_increase,
        report.error_ratios.iter().map(|q| format!("{q:.3}")).collect::<Vec<_>>()
    );
    let mut files = Vec::new();
    ctx.json("rearrange.json", &report, &mut files)?;
    Ok(outcome(Task::RearrangeDemo, ok, files, message))
}
