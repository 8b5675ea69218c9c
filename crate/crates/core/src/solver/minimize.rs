//! Direct minimization of the thickness-`h` functional over nodal
//! configurations.
//!
//! Unknowns are all nodes except the last, which sits on the anchor, plus
//! the contact parameter `l`. Each step builds a banded Hessian by
//! coloured central differences of the analytic gradient, bordered by the
//! `l` row, and takes a shifted Newton step with Armijo backtracking. `l`
//! moves at most one grid interval per step, since the energy has kinks in
//! `l` at the nodes.

use serde::{Deserialize, Serialize};

use crate::curve::{dist, hausdorff, lerp, mollify, norm, scale, sub, Point, ParamCurve};
use crate::energy::{energy_h, energy_h_with_gradient, Configuration, Gradient};
use crate::error::{Error, Result};
use crate::laplace_young::{inclination, polyline_length, solve_graph, ExactProfile};
use crate::model::{DimensionlessParams, LimitConstants};

use super::banded::{bordered_solve, SymBand};
use super::conditions::euler_lagrange_residual;
use super::limit::{LimitSolution, WetArc};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MinimizeOptions {
    /// Projected-gradient tolerance.
    pub tol: f64,
    pub max_iter: usize,
    /// Finite-difference step as a fraction of the shortest grid interval.
    pub fd_fraction: f64,
    /// Rounds of moving `l` to nearby nodes and re-solving, keeping any
    /// lower minimum. The wet/dry split makes every node a possible local
    /// minimum in `l`.
    pub l_hops: usize,
}

impl Default for MinimizeOptions {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            max_iter: 1000,
            fd_fraction: 1e-4,
            l_hops: 8,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstraintResiduals {
    /// Deformed length minus one.
    pub length: f64,
    /// Distance from the last node to the anchor.
    pub anchor: f64,
    /// Mirror mismatch between the right meniscus and the wet sheet at the contact.
    pub junction_tangent: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub iterations: usize,
    pub converged: bool,
    pub initial_energy: f64,
    pub final_energy: f64,
    pub gradient_norm: f64,
    pub constraint_residuals: ConstraintResiduals,
    pub el_residual_norm: f64,
    pub lambda_estimate: Option<f64>,
    pub sup_strain: f64,
}

struct Problem<'a> {
    p: &'a DimensionlessParams,
    s: Vec<f64>,
    anchor: Point,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum LMove {
    Free,
    Right,
    Left,
    Frozen,
}

impl Problem<'_> {
    fn config(&self, pts: &[Point], l: f64) -> Option<Configuration> {
        let curve = ParamCurve::new(self.s.clone(), pts.to_vec()).ok()?;
        Configuration::new(curve, l, self.anchor).ok()
    }

    fn energy(&self, pts: &[Point], l: f64) -> Option<f64> {
        let e = energy_h(&self.config(pts, l)?, self.p).ok()?;
        e.is_finite().then_some(e.total)
    }

    fn gradient(&self, pts: &[Point], l: f64) -> Option<(f64, Gradient)> {
        let (e, g) = energy_h_with_gradient(&self.config(pts, l)?, self.p).ok()?;
        e.is_finite().then_some((e.total, g))
    }

    /// Interval `[s_k, s_{k+1}]` that `l` may move in, given the direction.
    fn l_interval(&self, l: f64, mv: LMove) -> (f64, f64) {
        let s = &self.s;
        let k = s.partition_point(|&t| t <= l).clamp(1, s.len() - 1) - 1;
        match mv {
            LMove::Left if l == s[k] && k > 0 => (s[k - 1], s[k]),
            _ if l == 1.0 => (s[s.len() - 2], 1.0),
            _ => (s[k], s[k + 1]),
        }
    }

    fn l_move(&self, l: f64, g: &Gradient) -> LMove {
        let at_node = self.s.iter().any(|&t| t == l);
        if !at_node {
            return LMove::Free;
        }
        let right = l < 1.0 && g.dl_plus < 0.0;
        let left = l > 0.0 && g.dl_minus > 0.0;
        match (left, right) {
            (true, true) if g.dl_minus > -g.dl_plus => LMove::Left,
            (_, true) => LMove::Right,
            (true, false) => LMove::Left,
            _ => LMove::Frozen,
        }
    }

    fn dl(g: &Gradient, mv: LMove) -> f64 {
        match mv {
            LMove::Left => g.dl_minus,
            LMove::Frozen => 0.0,
            _ => g.dl_plus,
        }
    }
}

fn flatten(g: &Gradient, n: usize) -> Vec<f64> {
    g.nodes[..n].iter().flat_map(|q| [q[0], q[1]]).collect()
}

/// Stationarity measure: free nodal gradient plus the one-sided `l` test.
fn projected_norm(g: &Gradient, n: usize, y0_active: bool, l: f64, at_node: bool) -> f64 {
    let mut m: f64 = 0.0;
    for (i, q) in g.nodes[..n].iter().enumerate() {
        m = m.max(q[0].abs());
        if !(i == 0 && y0_active) {
            m = m.max(q[1].abs());
        }
    }
    let dl = if at_node {
        let right = if l < 1.0 { (-g.dl_plus).max(0.0) } else { 0.0 };
        let left = if l > 0.0 { g.dl_minus.max(0.0) } else { 0.0 };
        right.max(left)
    } else {
        g.dl_plus.abs()
    };
    m.max(dl)
}

/// Minimize the thickness-`h` energy starting from `init`.
///
/// Returns the best iterate; `report.converged` is false if the tolerance
/// was not met within `opts.max_iter` steps.
pub fn minimize_energy_h(
    p: &DimensionlessParams,
    init: &Configuration,
    opts: &MinimizeOptions,
) -> Result<(Configuration, SolveReport)> {
    p.validate()?;
    init.validate()?;
    let (mut cfg, mut rep) = newton(p, init, opts)?;
    let initial_energy = rep.initial_energy;
    let mut iterations = rep.iterations;
    for _ in 0..opts.l_hops {
        if !rep.converged {
            break;
        }
        let s = cfg.curve.s();
        let k = s.partition_point(|&t| t < cfg.l);
        let mut best: Option<(Configuration, SolveReport)> = None;
        for j in [k.saturating_sub(2), k.saturating_sub(1), k + 1, k + 2] {
            if j >= s.len() || s[j] == cfg.l {
                continue;
            }
            let trial = Configuration::new(cfg.curve.clone(), s[j], cfg.anchor)?;
            let Ok((c, r)) = newton(p, &trial, opts) else { continue };
            iterations += r.iterations;
            let floor = best.as_ref().map_or(rep.final_energy, |b| b.1.final_energy);
            if r.converged && r.final_energy < floor - 1e-13 * floor.abs().max(1.0) {
                best = Some((c, r));
            }
        }
        match best {
            Some(b) => (cfg, rep) = b,
            None => break,
        }
    }
    rep.iterations = iterations;
    rep.initial_energy = initial_energy;
    Ok((cfg, rep))
}

fn newton(p: &DimensionlessParams, init: &Configuration, opts: &MinimizeOptions) -> Result<(Configuration, SolveReport)> {
    let prob = Problem {
        p,
        s: init.curve.s().to_vec(),
        anchor: init.anchor,
    };
    let n = prob.s.len() - 1;
    let mut pts = init.curve.points().to_vec();
    let mut l = init.l;
    let (mut e, mut g) = prob.gradient(&pts, l).ok_or_else(|| {
        Error::InvalidParameter("initial configuration lies outside the energy domain".into())
    })?;
    let initial_energy = e;
    let ds_min = prob.s.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
    let delta = opts.fd_fraction * ds_min;
    let mut iterations = 0;
    let mut converged = false;
    let mut gnorm;
    loop {
        let at_node = prob.s.iter().any(|&t| t == l);
        let y0_active = pts[0][1] <= 0.0 && g.nodes[0][1] > 0.0;
        gnorm = projected_norm(&g, n, y0_active, l, at_node);
        if gnorm <= opts.tol {
            converged = true;
            break;
        }
        if iterations == opts.max_iter {
            break;
        }
        iterations += 1;
        let mv = prob.l_move(l, &g);
        let (lo, hi) = prob.l_interval(l, mv);
        let hess = hessian(&prob, &pts, l, &g, mv, (lo, hi), delta)?;
        let mut grad = flatten(&g, n);
        let gl = Problem::dl(&g, mv);
        if y0_active {
            grad[1] = 0.0;
        }
        let mut tau = 0.0;
        let scale_diag = hess.band.max_abs_diagonal().max(1e-300);
        let mut accepted = false;
        for _ in 0..60 {
            let Some((dz, dl)) = newton_direction(&hess, &grad, gl, mv, y0_active, tau) else {
                tau = (2.0 * tau).max(1e-12 * scale_diag);
                continue;
            };
            let dl = dl.clamp(-l, 1.0 - l);
            let slope: f64 = dz.iter().zip(&grad).map(|(a, b)| a * b).sum::<f64>() + dl * gl;
            if !(slope < 0.0) {
                tau = (4.0 * tau).max(1e-8 * scale_diag);
                continue;
            }
            let mut t = 1.0;
            while t > 1e-10 {
                let mut trial = pts.clone();
                for i in 0..n {
                    trial[i][0] += t * dz[2 * i];
                    trial[i][1] += t * dz[2 * i + 1];
                }
                trial[0][1] = trial[0][1].max(0.0);
                // a full step may cross nodes; shorter ones stay in the current
                // interval so that l can land exactly on a node
                let lt = if t == 1.0 { l + dl } else { (l + t * dl).clamp(lo, hi) };
                if let Some(et) = prob.energy(&trial, lt) {
                    let slack = 1e-14 * e.abs().max(1.0);
                    if et <= e + 1e-4 * t * slope + slack {
                        if let Some((e2, g2)) = prob.gradient(&trial, lt) {
                            pts = trial;
                            l = lt;
                            e = e2;
                            g = g2;
                            accepted = true;
                            break;
                        }
                    }
                }
                t *= 0.5;
            }
            if accepted {
                break;
            }
            tau = (4.0 * tau).max(1e-6 * scale_diag);
        }
        if !accepted {
            break;
        }
    }
    let cfg = prob.config(&pts, l).expect("accepted iterates are valid");
    let report = report_for(&cfg, p, iterations, converged, initial_energy, e, gnorm);
    Ok((cfg, report))
}

/// `(−3g₀ + 4g₁ − g₂) / 2δ` for samples at `0, δ, 2δ`.
fn one_sided(g0: Point, g1: Point, g2: Point, delta: f64) -> Point {
    let f = |k: usize| (-3.0 * g0[k] + 4.0 * g1[k] - g2[k]) / (2.0 * delta);
    [f(0), f(1)]
}

struct Hessian {
    band: SymBand,
    /// `∂²E/∂z∂l` and `∂²E/∂l²`, absent when `l` is frozen.
    border: Option<(Vec<f64>, f64)>,
}

fn hessian(
    prob: &Problem,
    pts: &[Point],
    l: f64,
    base: &Gradient,
    mv: LMove,
    (lo, hi): (f64, f64),
    delta: f64,
) -> Result<Hessian> {
    let n = prob.s.len() - 1;
    let nv = 2 * n;
    let mut band = SymBand::zeros(nv, 5);
    let fail = || Error::NoConvergence {
        method: "finite-difference Hessian",
        iterations: 0,
        residual: f64::NAN,
    };
    for colour in 0..5 {
        for d in 0..2 {
            let mut plus = pts.to_vec();
            let mut minus = pts.to_vec();
            let mut any = false;
            for j in (colour..n).step_by(5) {
                plus[j][d] += delta;
                minus[j][d] -= delta;
                any = true;
            }
            if !any {
                continue;
            }
            // second-order one-sided stencil where the other side leaves the
            // domain (heights below zero); first order is far too crude here
            let shifted = |k: f64| {
                let mut q = pts.to_vec();
                for j in (colour..n).step_by(5) {
                    q[j][d] += k * delta;
                }
                prob.gradient(&q, l).map(|(_, g)| g)
            };
            let diff: Vec<Point> = match (prob.gradient(&plus, l), prob.gradient(&minus, l)) {
                (Some((_, gp)), Some((_, gm))) => (0..n)
                    .map(|i| scale(sub(gp.nodes[i], gm.nodes[i]), 0.5 / delta))
                    .collect(),
                (Some((_, g1)), None) => {
                    let g2 = shifted(2.0).ok_or_else(fail)?;
                    (0..n).map(|i| one_sided(base.nodes[i], g1.nodes[i], g2.nodes[i], delta)).collect()
                }
                (None, Some((_, g1))) => {
                    let g2 = shifted(-2.0).ok_or_else(fail)?;
                    (0..n).map(|i| one_sided(base.nodes[i], g1.nodes[i], g2.nodes[i], -delta)).collect()
                }
                (None, None) => return Err(fail()),
            };
            for i in 0..n {
                // the unique perturbed node within two of node i
                let j = match (colour + 5 - i % 5) % 5 {
                    0 => i as isize,
                    1 => i as isize + 1,
                    2 => i as isize + 2,
                    3 => i as isize - 2,
                    _ => i as isize - 1,
                };
                if j < 0 || j as usize >= n {
                    continue;
                }
                let j = j as usize;
                let col = 2 * j + d;
                for e in 0..2 {
                    let row = 2 * i + e;
                    let v = diff[i][e];
                    if row >= col {
                        let prev = band.get(row, col);
                        band.set(row, col, if row == col { v } else { prev + 0.5 * v });
                    } else {
                        let prev = band.get(col, row);
                        band.set(col, row, prev + 0.5 * v);
                    }
                }
            }
        }
    }
    let border = if mv == LMove::Frozen {
        None
    } else {
        let dl = 1e-4 * (hi - lo);
        let (a, b) = if l - dl >= lo && l + dl <= hi {
            (l - dl, l + dl)
        } else if mv == LMove::Left || l + dl > hi {
            (l - dl, l)
        } else {
            (l, l + dl)
        };
        let (_, ga) = prob.gradient(pts, a).ok_or_else(fail)?;
        let (_, gb) = prob.gradient(pts, b).ok_or_else(fail)?;
        let c: Vec<f64> = (0..nv)
            .map(|k| (gb.nodes[k / 2][k % 2] - ga.nodes[k / 2][k % 2]) / (b - a))
            .collect();
        // inside one interval both one-sided derivatives agree except at its ends
        let side = |g: &Gradient, at: f64| if at == hi { g.dl_minus } else { g.dl_plus };
        let dll = (side(&gb, b) - side(&ga, a)) / (b - a);
        Some((c, dll))
    };
    Ok(Hessian { band, border })
}

fn newton_direction(
    h: &Hessian,
    grad: &[f64],
    gl: f64,
    mv: LMove,
    y0_active: bool,
    tau: f64,
) -> Option<(Vec<f64>, f64)> {
    let mut band = h.band.clone();
    band.add_diagonal(tau);
    if y0_active {
        for j in 0..band.n().min(1 + band.bandwidth() + 1) {
            if j != 1 {
                band.set(1, j, 0.0);
            }
        }
        band.set(1, 1, 1.0);
    }
    let factor = band.cholesky()?;
    let neg: Vec<f64> = grad.iter().map(|v| -v).collect();
    match (&h.border, mv) {
        (Some((c, dll)), m) if m != LMove::Frozen => {
            let mut c = c.clone();
            if y0_active {
                c[1] = 0.0;
            }
            let dll = dll.max(0.0) + tau.max(1e-12 * dll.abs().max(1.0));
            bordered_solve(&factor, &c, dll, &neg, -gl)
        }
        _ => Some((factor.cholesky_solve(&neg), 0.0)),
    }
}

fn report_for(
    cfg: &Configuration,
    p: &DimensionlessParams,
    iterations: usize,
    converged: bool,
    initial_energy: f64,
    final_energy: f64,
    gradient_norm: f64,
) -> SolveReport {
    let lim = p.rescaled();
    let lambda_estimate = lambda_estimate(cfg, p);
    SolveReport {
        iterations,
        converged,
        initial_energy,
        final_energy,
        gradient_norm,
        constraint_residuals: ConstraintResiduals {
            length: polyline_length(cfg.curve.points()) - 1.0,
            anchor: dist(cfg.curve.end(), cfg.anchor),
            junction_tangent: junction_mirror_residual(cfg, p),
        },
        el_residual_norm: euler_lagrange_residual(cfg, &lim, lim.lambda_pred()).norm(),
        lambda_estimate,
        sup_strain: cfg.curve.stats().sup_strain,
    }
}

/// Mirror mismatch between the sheet tangent just before the contact and
/// the right meniscus leaving it.
pub fn junction_mirror_residual(cfg: &Configuration, p: &DimensionlessParams) -> f64 {
    if cfg.l <= 0.0 {
        return 0.0;
    }
    let s = cfg.curve.s();
    let pts = cfg.curve.points();
    let k = s.partition_point(|&t| t < cfg.l).clamp(1, s.len() - 1) - 1;
    let d = sub(pts[k + 1], pts[k]);
    let t = [d[0] / norm(d), d[1] / norm(d)];
    let y = cfg.contact_point()[1].max(0.0);
    let lim = p.rescaled();
    let (cos, sin) = inclination(y, lim.a_lg_star, lim.c_star);
    norm(sub([cos, -sin], [t[0], -t[1]]))
}

/// Multiplier from the membrane tension `2(|ṗ| − 1)/h^α` on the dry part,
/// averaged over the half farthest from the contact (the other half sits in
/// the bending layer around the corner) minus a short stretch at the anchor.
pub fn lambda_estimate(cfg: &Configuration, p: &DimensionlessParams) -> Option<f64> {
    let (l, s) = (cfg.l, cfg.curve.s());
    let (a, b) = (l + 0.5 * (1.0 - l), 1.0 - 0.05 * (1.0 - l));
    let speeds = cfg.curve.speeds();
    let k = p.h_hat.powf(-p.alpha);
    let (mut sum, mut weight) = (0.0, 0.0);
    for (i, v) in speeds.iter().enumerate() {
        if s[i] >= a && s[i + 1] <= b {
            let ds = s[i + 1] - s[i];
            sum += 2.0 * (v - 1.0) * k * ds;
            weight += ds;
        }
    }
    (weight > 0.0).then(|| sum / weight)
}

/// The sheet preceded by its left meniscus, cut at abscissa `x_cut`.
fn extended_profile(sheet: &[Point], a_lg: f64, c: f64, x_cut: f64) -> Result<Vec<Point>> {
    let p0 = sheet[0];
    let m = solve_graph(p0[1].max(0.0), a_lg, c)?;
    let mut out: Vec<Point> = m
        .samples
        .iter()
        .rev()
        .map(|q| [p0[0] - q[0], q[1]])
        .filter(|q| q[0] >= x_cut)
        .collect();
    out.extend_from_slice(sheet);
    Ok(out)
}

/// Hausdorff distance between two sheets, each continued to the left by
/// its meniscus so that the comparison is insensitive to stretching along
/// the wet arc.
pub fn profile_distance(a: &Configuration, b: &Configuration, lim: &LimitConstants) -> Result<f64> {
    let ell = (lim.a_lg_star / lim.c_star).sqrt();
    let x_cut = a.curve.start()[0].min(b.curve.start()[0]) - 3.0 * ell;
    let pa = extended_profile(a.curve.points(), lim.a_lg_star, lim.c_star, x_cut)?;
    let pb = extended_profile(b.curve.points(), lim.a_lg_star, lim.c_star, x_cut)?;
    Ok(hausdorff(&pa, &pb))
}

/// Hausdorff distance between the wet sheet and the right meniscus from
/// its contact point mirrored across the vertical through it, cut at the
/// height of the free end.
pub fn symmetry_distance(cfg: &Configuration, lim: &LimitConstants) -> Result<f64> {
    if cfg.l <= 0.0 {
        return Ok(0.0);
    }
    let pl = cfg.contact_point();
    let mut wet: Vec<Point> = cfg
        .curve
        .s()
        .iter()
        .zip(cfg.curve.points())
        .filter(|(s, _)| **s < cfg.l)
        .map(|(_, p)| *p)
        .collect();
    wet.push(pl);
    let arc = WetArc::new(pl, lim.a_lg_star, lim.c_star)?;
    let y_end = wet[0][1];
    let sigma_end = match ExactProfile::new(pl[0], pl[1], lim.a_lg_star, lim.c_star) {
        Ok(e) if y_end > 0.0 && y_end < pl[1] => e.arclength_to(y_end),
        _ => (pl[0] - wet[0][0]).max(0.0),
    };
    let m = 4000;
    let mirror: Vec<Point> = (0..=m).map(|k| arc.point(sigma_end * (m - k) as f64 / m as f64)).collect();
    Ok(hausdorff(&wet, &mirror))
}

/// The limit solution with its contact corner smoothed at the bending
/// length of the given thickness; a starting point for [`minimize_energy_h`].
pub fn smoothed_start(sol: &LimitSolution, p: &DimensionlessParams, n: usize) -> Result<Configuration> {
    let raw = sol.sheet(n)?;
    let lim = p.rescaled();
    let tension = 2.0 * lim.a_sg_star + lim.lambda_pred();
    let width = (2.0 * p.h_hat.powf(2.0 - p.alpha) / tension).sqrt();
    let k = ((1.0 / width).floor() as usize).max(1);
    let curve = mollify(&raw.curve, k)?;
    Configuration::new(curve, raw.l, raw.anchor)
}

/// A straight unit-length ramp from the waterline to the anchor with `n`
/// intervals and contact parameter `l`.
pub fn straight_ramp(anchor: Point, l: f64, n: usize) -> Result<Configuration> {
    let h = anchor[1].clamp(0.0, 1.0);
    let start = [anchor[0] - (1.0 - h * h).sqrt(), 0.0];
    let pts: Vec<Point> = (0..=n)
        .map(|k| if k == n { anchor } else { lerp(start, anchor, k as f64 / n as f64) })
        .collect();
    Configuration::new(ParamCurve::uniform(pts)?, l, anchor)
}
