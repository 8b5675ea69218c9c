//! Acceptance suite: ten criteria at their pinned tolerances. Every
//! criterion runs even if an earlier one fails; each prints one line and the
//! process exits nonzero if any failed.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use sheetlift::cli::{random_polyline, short_arc};
use sheetlift::curve::{isometrize, monotone_rearrange, ParamCurve, Point};
use sheetlift::energy::{
    energy_h, energy_h_with_gradient, energy_limit, fillet_crossover, fillet_curve, kink_analysis_with,
    Configuration, KinkPhysics,
};
use sheetlift::gamma::{gamma_convergence_experiment, recovery_sequence, PowerLaw, RecoveryOptions, SweepOptions};
use sheetlift::laplace_young::{
    critical_height, parametric_objective, phi, psi_derivative, shoot_graph, solve_graph, Side,
};
use sheetlift::model::{DimensionlessParams, LimitConstants};
use sheetlift::solver::{
    minimize_energy_h, smoothed_start, solve_limit_problem, symmetry_distance, MinimizeOptions,
};

const SEED: u64 = 20_240_611;

fn standard() -> LimitConstants {
    LimitConstants {
        a_lg_star: 1.0,
        a_sg_star: 0.3,
        a_sl_star: 0.3,
        b_star: 0.01,
        c_star: 1.0,
    }
}

fn family() -> PowerLaw {
    PowerLaw {
        limit: standard(),
        alpha: 0.5,
        eps_exp: 1.0,
    }
}

fn sweep_opts() -> SweepOptions {
    SweepOptions {
        nodes: 400,
        minimize: MinimizeOptions::default(),
        parallel: true,
    }
}

const SWEEP_H: [f64; 3] = [0.2, 0.1, 0.05];

/// Result of one criterion: pass flag and a one-line summary.
struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: String) -> Verdict {
    Verdict { pass, detail }
}

fn strictly_decreasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] < w[0])
}

/// Reflected meniscus against the wet sheet, limit and `E_h` (h = 0.05, N = 400).
fn symmetry() -> Verdict {
    let t = Instant::now();
    let lim = standard();
    let sol = solve_limit_problem(&lim, [0.0, 0.5]).unwrap();
    let limit_res = sol.symmetry_residual().unwrap();
    let p = family().params(0.05);
    let init = smoothed_start(&sol, &p, 400).unwrap();
    let (cfg, rep) = minimize_energy_h(&p, &init, &MinimizeOptions::default()).unwrap();
    let eh_res = symmetry_distance(&cfg, &lim).unwrap();
    let elapsed = t.elapsed();
    verdict(
        limit_res <= 1e-9 && eh_res <= 1e-2 && rep.converged && elapsed <= Duration::from_secs(60),
        format!(
            "limit {limit_res:.2e} <= 1e-9, E_h {eh_res:.2e} <= 1e-2 (converged {}), {:.1} s <= 60 s",
            rep.converged,
            elapsed.as_secs_f64()
        ),
    )
}

/// Multiplier from the dry sheet's stretch against `A_LG − A_SG − A_SL`.
fn fictitious_tension() -> Verdict {
    let fam = family();
    let want = fam.limit.a_lg_star - fam.limit.a_sg_star - fam.limit.a_sl_star;
    let rep = gamma_convergence_experiment(&fam, [0.0, 1.1], &SWEEP_H, &sweep_opts()).unwrap();
    let errs: Vec<f64> = rep
        .rows
        .iter()
        .map(|r| r.lambda_estimate.map_or(f64::INFINITY, |l| (l - want).abs() / want))
        .collect();
    let last = *errs.last().unwrap();
    let converged = rep.rows.iter().all(|r| r.converged);
    verdict(
        converged && last <= 0.02 && strictly_decreasing(&errs),
        format!(
            "relative errors {} at h = 0.2, 0.1, 0.05; final <= 2% and decreasing",
            errs.iter().map(|e| format!("{:.2}%", 100.0 * e)).collect::<Vec<_>>().join(", ")
        ),
    )
}

/// `y*` against an independent bisection of the first integral, and contact
/// heights of converged solves below it.
fn critical_height_check() -> Verdict {
    // vertical tangent where A(1 − cos θ) = C y²/2 reaches θ = π/2
    let (a, c) = (1.0, 1.0);
    let cos_theta = |y: f64| 1.0 - c * y * y / (2.0 * a);
    let (mut lo, mut hi) = (0.0f64, 10.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if cos_theta(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let oracle = 0.5 * (lo + hi);
    let y_star = critical_height(a, c).unwrap();
    let oracle_err = (y_star - oracle).abs().max((y_star - 2f64.sqrt()).abs());

    let lim = standard();
    let mut rng = StdRng::seed_from_u64(SEED);
    let mut worst = f64::NEG_INFINITY;
    let mut solves = 0;
    for _ in 0..60 {
        let anchor = [rng.gen_range(-0.5..0.5), rng.gen_range(0.0..1.0 + y_star)];
        // the limit solver returns an error unless its Newton iteration converged
        if let Ok(sol) = solve_limit_problem(&lim, anchor) {
            solves += 1;
            worst = worst.max(sol.contact_right[1].max(sol.contact_left[1]) - y_star);
        }
    }
    // thickness-h minimizers: fully wet, partly wet and a hanging sheet
    for anchor in [[0.0, 0.5], [0.0, 1.1], [0.0, 1.8]] {
        let sol = solve_limit_problem(&lim, anchor).unwrap();
        let p = family().params(0.05);
        let init = smoothed_start(&sol, &p, 200).unwrap();
        let (cfg, rep) = minimize_energy_h(&p, &init, &MinimizeOptions::default()).unwrap();
        if rep.converged {
            solves += 1;
            worst = worst.max(cfg.contact_point()[1].max(cfg.curve.start()[1]) - y_star);
        }
    }
    verdict(
        oracle_err <= 1e-12 && worst <= 1e-9 && solves >= 40,
        format!("|y* − oracle| {oracle_err:.1e} <= 1e-12; max(y0 − y*) {worst:.3} over {solves} converged solves"),
    )
}

/// ODE residuals, shooting against quadrature, translation identity and `dφ/dy0`.
fn laplace_young_fidelity() -> Verdict {
    let ys = 2f64.sqrt();
    let mut ode = 0.0f64;
    for &y0 in &[0.05, 0.2, 0.5, 0.8, 1.0, 1.2, 1.3, 1.4, ys] {
        let p = solve_graph(y0, 1.0, 1.0).unwrap();
        ode = ode.max(p.ode_residual()).max(p.first_integral_residual());
    }
    let mut shoot = 0.0f64;
    for &y0 in &[0.2, 0.6, 1.0] {
        let p = solve_graph(y0, 1.0, 1.0).unwrap();
        let s = shoot_graph(y0, 1.0, 1.0, 0.01).unwrap();
        for (x, y) in s.xs.iter().zip(&s.ys) {
            shoot = shoot.max((p.y_at(*x) - y).abs());
        }
    }
    let master = solve_graph(ys, 1.0, 1.0).unwrap();
    let mut translation = 0.0f64;
    for &rho in &[0.1, 0.2, 0.5, 0.9, 1.2] {
        let lhs = phi(Side::Plus, 0.0, rho, 1.0, 1.0).unwrap();
        translation = translation.max((lhs - master.energy_below_height(rho).unwrap()).abs());
    }
    let mut deriv = 0.0f64;
    for k in 1..=19 {
        let y = 0.05 * k as f64 * ys;
        let d = 1e-4 * ys;
        let fd = (phi(Side::Plus, 0.0, y + d, 1.0, 1.0).unwrap() - phi(Side::Plus, 0.0, y - d, 1.0, 1.0).unwrap())
            / (2.0 * d);
        let an = psi_derivative(y, 1.0, 1.0);
        deriv = deriv.max((fd - an).abs() / an.abs());
    }
    verdict(
        ode <= 1e-8 && shoot <= 1e-7 && translation <= 1e-6 && deriv <= 1e-5,
        format!(
            "ODE {ode:.1e} <= 1e-8, shooting {shoot:.1e} <= 1e-7, translation {translation:.1e} <= 1e-6, dφ/dy0 {deriv:.1e} <= 1e-5"
        ),
    )
}

/// Straight dry part, unit length, and decreasing strain of the minimizers.
fn straight_and_inextensible() -> Verdict {
    let lim = standard();
    let mut chord = 0.0f64;
    let mut length = 0.0f64;
    for anchor in [[0.0, 0.5], [0.3, 0.8], [0.0, 1.1], [0.0, 1.8]] {
        let sol = solve_limit_problem(&lim, anchor).unwrap();
        chord = chord.max(sol.dry_chord_deviation(4000).unwrap());
        length = length.max((sol.sheet_length(20_000).unwrap() - 1.0).abs());
    }
    let rep = gamma_convergence_experiment(&family(), [0.0, 0.5], &SWEEP_H, &sweep_opts()).unwrap();
    let strain: Vec<f64> = rep.rows.iter().map(|r| r.sup_strain).collect();
    verdict(
        chord <= 1e-9 && length <= 1e-9 && strictly_decreasing(&strain),
        format!(
            "chord {chord:.1e} <= 1e-9, |length − 1| {length:.1e} <= 1e-9, sup strain {} strictly decreasing",
            strain.iter().map(|s| format!("{s:.4}")).collect::<Vec<_>>().join(" > ")
        ),
    )
}

/// Recovery sequence of the limit solution and the minimizer sweep.
fn gamma_convergence() -> Verdict {
    let t = Instant::now();
    let fam = family();
    let sol = solve_limit_problem(&fam.limit, [0.0, 0.5]).unwrap();
    let target = sol.sheet(2000).unwrap();
    let seq = recovery_sequence(&target, &fam, &[0.05, 0.025, 0.0125, 0.00625], &RecoveryOptions::default()).unwrap();
    let gaps = seq.gaps();
    let final_gap = *gaps.last().unwrap();
    let normalized = final_gap / seq.limit_energy.abs().max(1.0);
    let rep = gamma_convergence_experiment(&fam, [0.0, 0.5], &SWEEP_H, &sweep_opts()).unwrap();
    let dists: Vec<f64> = rep.rows.iter().map(|r| r.distance).collect();
    let elapsed = t.elapsed();
    verdict(
        seq.gap_decreasing_at_tail()
            && normalized <= 5e-2
            && seq.thinning_holds()
            && strictly_decreasing(&dists)
            && rep.final_distance() <= 1e-2
            && elapsed <= Duration::from_secs(300),
        format!(
            "gaps {} (final {normalized:.2e} <= 5e-2), thinning {}, distances {} (final <= 1e-2), {:.1} s <= 300 s",
            gaps.iter().map(|g| format!("{g:.3e}")).collect::<Vec<_>>().join(", "),
            seq.thinning_holds(),
            dists.iter().map(|d| format!("{d:.2e}")).collect::<Vec<_>>().join(" > "),
            elapsed.as_secs_f64()
        ),
    )
}

/// Monotone rearrangement on random curves and isometrization rates.
fn appendix_constructions() -> Verdict {
    let mut rng = StdRng::seed_from_u64(SEED);
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..100 {
        let c = ParamCurve::by_chord_length(random_polyline(&mut rng, 12)).unwrap();
        let r = monotone_rearrange(&c).unwrap();
        worst = worst.max(parametric_objective(r.points(), 1.0, 1.0) - parametric_objective(c.points(), 1.0, 1.0));
    }
    let arc = short_arc(4000).unwrap();
    let mut length = 0.0f64;
    let mut errs = Vec::new();
    for n in [4, 8, 16, 32] {
        let out = isometrize(&arc, n).unwrap();
        length = length.max((out.curve.length() - 1.0).abs());
        errs.push(out.sup_error);
    }
    let ratios: Vec<f64> = errs.windows(2).map(|w| w[1] / w[0]).collect();
    let worst_ratio = ratios.iter().copied().fold(0.0, f64::max);
    verdict(
        worst <= 1e-12 && length <= 1e-10 && worst_ratio <= 0.75,
        format!(
            "objective change max {worst:.2e} <= 1e-12 over 100 curves, |length − 1| {length:.1e} <= 1e-10, error ratios {} <= 0.75",
            ratios.iter().map(|q| format!("{q:.3}")).collect::<Vec<_>>().join(", ")
        ),
    )
}

/// Fillet crossover against `h^{3/2}√(E/γ)` and the gravity expansion.
fn kink_scale() -> Verdict {
    let turning = std::f64::consts::FRAC_PI_3;
    let mut ratios = Vec::new();
    for h in [1e-2, 1e-3] {
        for (e_mod, gamma) in [(1.0, 1.0), (4.0, 0.5)] {
            let phys = KinkPhysics {
                h,
                e_mod,
                gamma,
                rho_g: 1.0,
            };
            ratios.push(fillet_crossover(&phys, turning).unwrap().ratio);
        }
    }
    let phys = KinkPhysics {
        h: 1e-2,
        e_mod: 1.0,
        gamma: 1.0,
        rho_g: 1.0,
    };
    let curve = fillet_curve(phys.kink_scale(), turning, 0.2, 0.5, 400).unwrap();
    let anchor = curve.end();
    let cfg = Configuration::new(curve, 0.5, anchor).unwrap();
    let exponent = kink_analysis_with(&cfg, &phys, 0.1).unwrap().gravity_exponent;
    let in_band = ratios.iter().all(|r| *r >= 1.0 / 3.0 && *r <= 3.0);
    verdict(
        in_band && exponent >= 1.9,
        format!(
            "crossover / kink scale {} within [1/3, 3], gravity exponent {exponent:.3} >= 1.9",
            ratios.iter().map(|r| format!("{r:.3}")).collect::<Vec<_>>().join(", ")
        ),
    )
}

fn random_smooth_configuration(rng: &mut StdRng) -> Configuration {
    let n = rng.gen_range(20..=60);
    // heights stay in [0.05, 0.65], below the critical height, so φ is defined
    let (c0, c1, c2) = (rng.gen_range(0.25..0.45), rng.gen_range(-0.1..0.1), rng.gen_range(-0.1..0.1));
    let (amp, freq) = (rng.gen_range(-0.03..0.03), rng.gen_range(1.0..4.0));
    let pts: Vec<Point> = (0..=n)
        .map(|i| {
            let s = i as f64 / n as f64;
            [0.85 * s + amp * (freq * s).sin(), c0 + c1 * s + c2 * s * s]
        })
        .collect();
    // l strictly between nodes, where E_h is differentiable in l
    let k = rng.gen_range(1..n - 1);
    let l = (k as f64 + rng.gen_range(0.2..0.8)) / n as f64;
    let anchor = pts[n];
    Configuration::new(ParamCurve::uniform(pts).unwrap(), l, anchor).unwrap()
}

/// Analytic gradient of `E_h` against central differences.
fn gradient_correctness() -> Verdict {
    let mut rng = StdRng::seed_from_u64(SEED);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let cfg = random_smooth_configuration(&mut rng);
        let h = rng.gen_range(0.02..0.2);
        let p: DimensionlessParams = family().params(h);
        let (_, g) = energy_h_with_gradient(&cfg, &p).unwrap();
        let gnorm = g.nodes.iter().map(|q| q[0] * q[0] + q[1] * q[1]).sum::<f64>().sqrt();
        let d = 1e-6;
        for i in 0..cfg.curve.len() {
            for c in 0..2 {
                let eval = |delta: f64| {
                    let mut pts = cfg.curve.points().to_vec();
                    pts[i][c] += delta;
                    let mut moved = cfg.clone();
                    moved.curve = ParamCurve::new(cfg.curve.s().to_vec(), pts).unwrap();
                    energy_h(&moved, &p).unwrap().total
                };
                let fd = (eval(d) - eval(-d)) / (2.0 * d);
                worst = worst.max((fd - g.nodes[i][c]).abs() / gnorm);
            }
        }
        let el = |delta: f64| {
            let mut moved = cfg.clone();
            moved.l += delta;
            energy_h(&moved, &p).unwrap().total
        };
        let fd = (el(d) - el(-d)) / (2.0 * d);
        worst = worst.max((fd - g.dl_plus).abs() / gnorm.max(g.dl_plus.abs()));
    }
    verdict(worst <= 1e-6, format!("max relative deviation {worst:.2e} <= 1e-6 over 20 configurations"))
}

/// Limit energy under diffeomorphisms of `[0, 1]` fixing `0`, `l` and `1`.
fn reparametrization_invariance() -> Verdict {
    let mut rng = StdRng::seed_from_u64(SEED);
    let lim = standard();
    let mut worst = 0.0f64;
    for _ in 0..10 {
        let n = rng.gen_range(20..=60);
        let (c1, c2) = (rng.gen_range(-0.15..0.15), rng.gen_range(-0.15..0.15));
        let pts: Vec<Point> = (0..=n)
            .map(|i| {
                let s = i as f64 / n as f64;
                [0.5 * s, 0.3 + c1 * s + c2 * s * s]
            })
            .collect();
        let l = rng.gen_range(1..n) as f64 / n as f64;
        let anchor = pts[n];
        let cfg = Configuration::new(ParamCurve::uniform(pts).unwrap(), l, anchor).unwrap();
        let e0 = energy_limit(&cfg, &lim).total;
        let (w1, w2) = (rng.gen_range(-0.3..0.3), rng.gen_range(-0.3..0.3));
        // increasing on [0, 1] with derivative in [0.7, 1.3]
        let warp = move |t: f64| t + w1 * t * (1.0 - t) / 2.0 + w2 * t * (1.0 - t) * (t - 0.5);
        let tau = |s: f64| {
            if s <= l {
                l * warp(s / l)
            } else {
                l + (1.0 - l) * warp((s - l) / (1.0 - l))
            }
        };
        let mut moved = cfg.clone();
        moved.curve = cfg.curve.reparametrize(tau).unwrap();
        let e1 = energy_limit(&moved, &lim).total;
        worst = worst.max((e1 - e0).abs() / e0.abs().max(f64::MIN_POSITIVE));
    }
    verdict(worst <= 1e-10, format!("max relative change {worst:.2e} <= 1e-10 over 10 diffeomorphisms"))
}

fn main() {
    let criteria: [(&str, fn() -> Verdict); 10] = [
        ("symmetry of profiles", symmetry),
        ("fictitious tension", fictitious_tension),
        ("critical height", critical_height_check),
        ("Laplace-Young fidelity", laplace_young_fidelity),
        ("straight dry part and unit length", straight_and_inextensible),
        ("Gamma-convergence at desk scale", gamma_convergence),
        ("rearrangement and isometrization", appendix_constructions),
        ("kink scale", kink_scale),
        ("gradient correctness", gradient_correctness),
        ("reparametrization invariance", reparametrization_invariance),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let v = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            verdict(false, format!("panicked: {msg}"))
        });
        if !v.pass {
            failed += 1;
        }
        println!(
            "criterion {:>2} {:<36} {}  {} [{:.1} s]",
            i + 1,
            name,
            if v.pass { "PASS" } else { "FAIL" },
            v.detail,
            t.elapsed().as_secs_f64()
        );
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
