//! Numerical shadows of the Γ-convergence argument: recovery sequences
//! built by mollifying and isometrizing a limit candidate, and h-sweeps of
//! the thickness-`h` minimizers against the limit solution.

use serde::{Deserialize, Serialize};

use crate::curve::{dist, isometrize, mollify, ParamCurve, Point};
use crate::energy::{energy_h, energy_limit, loglog_slope, Configuration, SPEED_TOL};
use crate::model::{DimensionlessParams, LimitConstants};
use crate::solver::{
    minimize_energy_h, profile_distance, smoothed_start, solve_limit_problem, symmetry_distance, MinimizeOptions,
};
use crate::{Error, Result};

/// The power-law family `A_i = A_i* h^α`, `C = C* h^α`, `B = B* h^{α+ε}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerLaw {
    pub limit: LimitConstants,
    pub alpha: f64,
    #[serde(default = "one")]
    pub eps_exp: f64,
}

fn one() -> f64 {
    1.0
}

impl PowerLaw {
    pub fn params(&self, h: f64) -> DimensionlessParams {
        DimensionlessParams::on_power_law(&self.limit, h, self.alpha, self.eps_exp)
    }
}

/// Test functions of the weak-convergence battery: cubic monomials and
/// four low sinusoids. Each entry is `φ'`, which is what the pairing needs
/// after integrating by parts.
const TEST_DERIVATIVES: [fn(f64) -> f64; 8] = [
    |_| 0.0,
    |_| 1.0,
    |s| 2.0 * s,
    |s| 3.0 * s * s,
    |s| std::f64::consts::PI * (std::f64::consts::PI * s).cos(),
    |s| -std::f64::consts::PI * (std::f64::consts::PI * s).sin(),
    |s| std::f64::consts::TAU * (std::f64::consts::TAU * s).cos(),
    |s| -std::f64::consts::TAU * (std::f64::consts::TAU * s).sin(),
];

/// Quadrature nodes for the pairings and the sup distance.
const PAIRING_NODES: usize = 8192;

/// `|∫ φ (g′ − f′) ds|` for each test function. Endpoints agree, so the
/// pairing equals `−∫ φ′ (g − f) ds`.
pub fn weak_pairings(member: &ParamCurve, target: &ParamCurve) -> [f64; 8] {
    let mut acc = [[0.0f64; 2]; 8];
    let ds = 1.0 / PAIRING_NODES as f64;
    for k in 0..PAIRING_NODES {
        let s = (k as f64 + 0.5) * ds;
        let (g, f) = (member.eval(s), target.eval(s));
        for (a, dphi) in acc.iter_mut().zip(TEST_DERIVATIVES) {
            let w = dphi(s) * ds;
            a[0] -= w * (g[0] - f[0]);
            a[1] -= w * (g[1] - f[1]);
        }
    }
    acc.map(|a| a[0].hypot(a[1]))
}

/// `sup_s |g(s) − f(s)|` sampled on both grids and a fine uniform grid.
pub fn sup_distance(a: &ParamCurve, b: &ParamCurve) -> f64 {
    let grid = (0..=PAIRING_NODES).map(|k| k as f64 / PAIRING_NODES as f64);
    grid.chain(a.s().iter().copied())
        .chain(b.s().iter().copied())
        .map(|s| dist(a.eval(s), b.eval(s)))
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecoveryOptions {
    /// Candidate smoothing indices, increasing.
    pub ladder: Vec<usize>,
    /// Isometrize into `subdivision · m` pieces for smoothing index `m`.
    pub subdivision: usize,
}

impl Default for RecoveryOptions {
    fn default() -> Self {
        Self {
            ladder: (1..=9).map(|k| 1usize << k).collect(),
            subdivision: 4,
        }
    }
}

/// One member of a recovery sequence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecoveryMember {
    pub h: f64,
    /// Smoothing index chosen by the thinning rule.
    pub sigma: usize,
    pub config: Configuration,
    pub energy_h: f64,
    /// `h^{2−α}∫κ²` of the member.
    pub bending: f64,
    /// `bending ≤ 1/σ`.
    pub thinning_ok: bool,
    /// `E_h(member) − E(target)`.
    pub gap: f64,
    pub sup_distance: f64,
    pub length_error: f64,
    pub weak_pairings: [f64; 8],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecoverySequence {
    pub target: Configuration,
    pub alpha: f64,
    pub limit_energy: f64,
    pub members: Vec<RecoveryMember>,
}

impl RecoverySequence {
    pub fn sigma(&self) -> Vec<usize> {
        self.members.iter().map(|m| m.sigma).collect()
    }

    pub fn gaps(&self) -> Vec<f64> {
        self.members.iter().map(|m| m.gap.abs()).collect()
    }

    /// `|gap|` strictly decreasing over the last three members.
    pub fn gap_decreasing_at_tail(&self) -> bool {
        let g = self.gaps();
        g.len() >= 3 && g[g.len() - 3..].windows(2).all(|w| w[1] < w[0])
    }

    pub fn thinning_holds(&self) -> bool {
        self.members.iter().all(|m| m.thinning_ok)
    }
}

/// Smoothed and isometrized copy of `target` at smoothing index `m`.
struct Candidate {
    m: usize,
    config: Configuration,
    /// `∫κ²` before the `h^{2−α}` factor.
    curvature: f64,
    length_error: f64,
}

fn candidate(target: &Configuration, m: usize, subdivision: usize, probe: &DimensionlessParams) -> Result<Candidate> {
    let smooth = mollify(&target.curve, m)?;
    let iso = isometrize(&smooth, subdivision * m)?;
    let length_error = (iso.curve.length() - 1.0).abs();
    let config = Configuration::new(iso.curve, target.l, target.anchor)?;
    let e = energy_h(&config, probe)?;
    if !e.is_finite() {
        return Err(Error::InvalidCurve(format!("member at smoothing index {m} has a corner")));
    }
    let curvature = e.bending / probe.h_hat.powf(2.0 - probe.alpha);
    Ok(Candidate {
        m,
        config,
        curvature,
        length_error,
    })
}

/// Build the recovery sequence of `target` along the decreasing `h_seq`.
///
/// For each `h` the smoothing index is the largest ladder entry `m`, no
/// smaller than the previous choice, with `h^{2−α}∫κ² ≤ 1/(m+1)`. When no
/// entry qualifies the previous index is kept and the member is flagged.
pub fn recovery_sequence(
    target: &Configuration,
    family: &PowerLaw,
    h_seq: &[f64],
    opts: &RecoveryOptions,
) -> Result<RecoverySequence> {
    if let Some((i, v)) = target
        .curve
        .speeds()
        .into_iter()
        .enumerate()
        .find(|(_, v)| *v > 1.0 + SPEED_TOL)
    {
        return Err(Error::InvalidCurve(format!(
            "target is stretched (speed {v} on segment {i}); its limit energy is infinite and no recovery sequence exists"
        )));
    }
    if h_seq.is_empty() || h_seq.windows(2).any(|w| !(w[1] < w[0])) || h_seq.iter().any(|h| !(*h > 0.0)) {
        return Err(Error::InvalidParameter("h sequence must be positive and strictly decreasing".into()));
    }
    if opts.ladder.is_empty() || opts.ladder.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter("smoothing ladder must be strictly increasing".into()));
    }
    let limit_energy = energy_limit(target, &family.limit).total;
    let probe = family.params(h_seq[0]);
    let cands = opts
        .ladder
        .iter()
        .map(|&m| candidate(target, m, opts.subdivision, &probe))
        .collect::<Result<Vec<_>>>()?;
    let mut members = Vec::with_capacity(h_seq.len());
    let mut floor = 0;
    for &h in h_seq {
        let weight = h.powf(2.0 - family.alpha);
        let pick = (floor..cands.len())
            .rev()
            .find(|&j| weight * cands[j].curvature <= 1.0 / (cands[j].m as f64 + 1.0))
            .unwrap_or(floor);
        floor = pick;
        let c = &cands[pick];
        let p = family.params(h);
        let e = energy_h(&c.config, &p)?;
        let bending = weight * c.curvature;
        members.push(RecoveryMember {
            h,
            sigma: c.m,
            config: c.config.clone(),
            energy_h: e.total,
            bending,
            thinning_ok: bending <= 1.0 / c.m as f64,
            gap: e.total - limit_energy,
            sup_distance: sup_distance(&c.config.curve, &target.curve),
            length_error: c.length_error,
            weak_pairings: weak_pairings(&c.config.curve, &target.curve),
        });
    }
    Ok(RecoverySequence {
        target: target.clone(),
        alpha: family.alpha,
        limit_energy,
        members,
    })
}

/// One row of an h-sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub h: f64,
    pub converged: bool,
    pub iterations: usize,
    /// Hausdorff distance between the minimizer and the limit solution,
    /// both extended by their left menisci.
    pub distance: f64,
    pub symmetry: f64,
    pub energy_h: f64,
    /// `E_h(minimizer) − E(limit solution)`.
    pub gap: f64,
    pub lambda_estimate: Option<f64>,
    pub sup_strain: f64,
    pub contact_parameter: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub anchor: Point,
    pub limit_energy: f64,
    pub lambda_limit: f64,
    pub rows: Vec<SweepRow>,
    /// Fitted exponents of distance and `|gap|` against `h`.
    pub distance_rate: f64,
    pub gap_rate: f64,
    /// Distances decrease, allowing one non-monotone step.
    pub distances_decrease: bool,
    /// Some inner solve failed.
    pub partial: bool,
}

impl ConvergenceReport {
    pub fn final_distance(&self) -> f64 {
        self.rows.last().map_or(f64::NAN, |r| r.distance)
    }
}

/// At most one step of `v` fails to decrease.
pub fn nearly_decreasing(v: &[f64]) -> bool {
    v.windows(2).filter(|w| !(w[1] < w[0])).count() <= 1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepOptions {
    pub nodes: usize,
    #[serde(default)]
    pub minimize: MinimizeOptions,
    /// Solve the h values on separate threads.
    #[serde(default)]
    pub parallel: bool,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self {
            nodes: 400,
            minimize: MinimizeOptions::default(),
            parallel: false,
        }
    }
}

fn sweep_row(
    family: &PowerLaw,
    sol: &crate::solver::LimitSolution,
    reference: &Configuration,
    limit_energy: f64,
    h: f64,
    opts: &SweepOptions,
) -> SweepRow {
    let run = || -> Result<SweepRow> {
        let p = family.params(h);
        let init = smoothed_start(sol, &p, opts.nodes)?;
        let (cfg, rep) = minimize_energy_h(&p, &init, &opts.minimize)?;
        Ok(SweepRow {
            h,
            converged: rep.converged,
            iterations: rep.iterations,
            distance: profile_distance(&cfg, reference, &family.limit)?,
            symmetry: symmetry_distance(&cfg, &family.limit)?,
            energy_h: rep.final_energy,
            gap: rep.final_energy - limit_energy,
            lambda_estimate: rep.lambda_estimate,
            sup_strain: rep.sup_strain,
            contact_parameter: cfg.l,
            error: None,
        })
    };
    run().unwrap_or_else(|e| SweepRow {
        h,
        converged: false,
        iterations: 0,
        distance: f64::NAN,
        symmetry: f64::NAN,
        energy_h: f64::NAN,
        gap: f64::NAN,
        lambda_estimate: None,
        sup_strain: f64::NAN,
        contact_parameter: f64::NAN,
        error: Some(e.to_string()),
    })
}

/// Minimize `E_h` for each `h` and compare with the limit solution.
pub fn gamma_convergence_experiment(
    family: &PowerLaw,
    anchor: Point,
    h_seq: &[f64],
    opts: &SweepOptions,
) -> Result<ConvergenceReport> {
    if h_seq.len() < 3 || h_seq.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::InvalidParameter("a sweep needs at least three decreasing h values".into()));
    }
    for &h in h_seq {
        family.params(h).validate()?;
    }
    let sol = solve_limit_problem(&family.limit, anchor)?;
    let reference = sol.sheet(4 * opts.nodes)?;
    let limit_energy = energy_limit(&reference, &family.limit).total;
    let rows: Vec<SweepRow> = if opts.parallel {
        std::thread::scope(|scope| {
            let handles: Vec<_> = h_seq
                .iter()
                .map(|&h| {
                    let (sol, reference) = (&sol, &reference);
                    scope.spawn(move || sweep_row(family, sol, reference, limit_energy, h, opts))
                })
                .collect();
            handles.into_iter().map(|t| t.join().expect("sweep worker panicked")).collect()
        })
    } else {
        h_seq
            .iter()
            .map(|&h| sweep_row(family, &sol, &reference, limit_energy, h, opts))
            .collect()
    };
    let partial = rows.iter().any(|r| r.error.is_some());
    let dists: Vec<f64> = rows.iter().map(|r| r.distance).collect();
    let rate = |f: fn(&SweepRow) -> f64| loglog_slope(&rows.iter().map(|r| (r.h, f(r))).collect::<Vec<_>>());
    Ok(ConvergenceReport {
        anchor,
        limit_energy,
        lambda_limit: family.limit.lambda_pred(),
        distance_rate: rate(|r| r.distance),
        gap_rate: rate(|r| r.gap.abs()),
        distances_decrease: !partial && nearly_decreasing(&dists),
        partial,
        rows,
    })
}
