//! First-order conditions: the Euler–Lagrange conservation laws along the
//! sheet and the force balances where sheet and menisci meet.
//!
//! Tangent orientation, which the force balances depend on:
//! - the sheet tangent points towards increasing `s`;
//! - the left-meniscus tangent points along the direction of travel towards the free end;
//! - the right-meniscus and dry-sheet tangents point away from the junction.
//!
//! With these choices the junction balance forces a vertical dry part.

use serde::{Deserialize, Serialize};

use crate::curve::{norm, scale, sub, Point, ParamCurve};
use crate::energy::Configuration;
use crate::laplace_young::LYProfile;
use crate::model::LimitConstants;

use super::limit::LimitSolution;

/// Residual norms of the four conservation laws.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ElResidual {
    /// `d/ds[(λ + A_SL + A_SG) ẋ/|ṗ| + C y²/2]` on the wet part.
    pub wet_x: f64,
    /// `d/ds[(λ + A_SL + A_SG) ẏ/|ṗ|] − C y ẋ` on the wet part.
    pub wet_y: f64,
    /// Change of the unit tangent along the dry part.
    pub dry_x: f64,
    pub dry_y: f64,
}

impl ElResidual {
    pub fn norm(&self) -> f64 {
        self.wet_x.max(self.wet_y).max(self.dry_x).max(self.dry_y)
    }
}

fn unit(d: Point) -> Option<Point> {
    let n = norm(d);
    (n > 0.0).then(|| scale(d, 1.0 / n))
}

/// Sup norms of the conservation-law residuals, by differencing the
/// conserved quantities between consecutive segments. Segments crossing
/// `s = l` are skipped; a degenerate segment makes the residual infinite.
pub fn euler_lagrange_residual(cfg: &Configuration, lim: &LimitConstants, lambda: f64) -> ElResidual {
    let s = cfg.curve.s();
    let p = cfg.curve.points();
    let l = cfg.l;
    let tension = lambda + lim.a_sl_star + lim.a_sg_star;
    let c = lim.c_star;
    let mut r = ElResidual {
        wet_x: 0.0,
        wet_y: 0.0,
        dry_x: 0.0,
        dry_y: 0.0,
    };
    let n = p.len();
    for i in 0..n.saturating_sub(2) {
        let wet = s[i + 2] <= l;
        let dry = s[i] >= l;
        if !wet && !dry {
            continue;
        }
        let (Some(u0), Some(u1)) = (unit(sub(p[i + 1], p[i])), unit(sub(p[i + 2], p[i + 1]))) else {
            r = ElResidual {
                wet_x: f64::INFINITY,
                wet_y: f64::INFINITY,
                dry_x: f64::INFINITY,
                dry_y: f64::INFINITY,
            };
            return r;
        };
        let hm = 0.5 * (s[i + 2] - s[i]);
        if wet {
            let y2 = |a: Point, b: Point| (a[1] * a[1] + a[1] * b[1] + b[1] * b[1]) / 3.0;
            let q0 = tension * u0[0] + 0.5 * c * y2(p[i], p[i + 1]);
            let q1 = tension * u1[0] + 0.5 * c * y2(p[i + 1], p[i + 2]);
            r.wet_x = r.wet_x.max(((q1 - q0) / hm).abs());
            let xdot = (p[i + 2][0] - p[i][0]) / (2.0 * hm);
            let dy = tension * (u1[1] - u0[1]) / hm;
            r.wet_y = r.wet_y.max((dy - c * p[i + 1][1] * xdot).abs());
        } else {
            r.dry_x = r.dry_x.max(((u1[0] - u0[0]) / hm).abs());
            r.dry_y = r.dry_y.max(((u1[1] - u0[1]) / hm).abs());
        }
    }
    r
}

/// Unit tangents entering the force balances.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContactTangents {
    /// Left meniscus at the free end, pointing towards the sheet.
    pub left_meniscus: Point,
    /// Sheet at `s = 0`; absent when nothing is wet.
    pub sheet_start: Option<Point>,
    /// Wet sheet arriving at the junction.
    pub wet_end: Option<Point>,
    /// Dry sheet leaving the junction; absent when nothing is dry.
    pub dry: Option<Point>,
    /// Right meniscus leaving the junction.
    pub right_meniscus: Point,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContactReport {
    pub tangents: ContactTangents,
    /// `|A t_meniscus − (A_SG + A_SL + λ) t_sheet|` at the free end.
    pub left_interface: Option<f64>,
    /// `|A t_w − A t_wet + (2A_SG + λ) t_dry|` at the junction.
    pub force_balance: Option<f64>,
    /// `|t_w − (t_wet,x, −t_wet,y)|`.
    pub mirror: Option<f64>,
    /// `|A_SG + A_SL + λ − A_LG|`.
    pub tension_identity: f64,
}

impl ContactReport {
    /// Largest residual present.
    pub fn max_residual(&self) -> f64 {
        [self.left_interface, self.force_balance, self.mirror]
            .into_iter()
            .flatten()
            .fold(self.tension_identity, f64::max)
    }
}

/// Evaluate the three force balances for the given tangents.
pub fn contact_residuals(t: &ContactTangents, lim: &LimitConstants, lambda: f64) -> ContactReport {
    let a = lim.a_lg_star;
    let wet_tension = lim.a_sg_star + lim.a_sl_star + lambda;
    let dry_tension = 2.0 * lim.a_sg_star + lambda;
    let left_interface = t
        .sheet_start
        .map(|ts| norm(sub(scale(t.left_meniscus, a), scale(ts, wet_tension))));
    let force_balance = match (t.wet_end, t.dry) {
        (Some(tw), Some(td)) => {
            let f = [
                a * t.right_meniscus[0] - a * tw[0] + dry_tension * td[0],
                a * t.right_meniscus[1] - a * tw[1] + dry_tension * td[1],
            ];
            Some(norm(f))
        }
        _ => None,
    };
    let mirror = t.wet_end.map(|tw| norm(sub(t.right_meniscus, [tw[0], -tw[1]])));
    ContactReport {
        tangents: *t,
        left_interface,
        force_balance,
        mirror,
        tension_identity: (wet_tension - a).abs(),
    }
}

/// Dry direction that the junction balance predicts under either
/// orientation of the right-meniscus tangent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeniscusOrientation {
    AwayFromJunction,
    TowardJunction,
}

/// Solve the junction balance for the dry tangent; `None` if the forces
/// cancel.
pub fn predicted_dry_direction(
    wet_end: Point,
    orientation: MeniscusOrientation,
    lim: &LimitConstants,
    lambda: f64,
) -> Option<Point> {
    let a = lim.a_lg_star;
    let away = [wet_end[0], -wet_end[1]];
    let tw = match orientation {
        MeniscusOrientation::AwayFromJunction => away,
        MeniscusOrientation::TowardJunction => scale(away, -1.0),
    };
    let f = scale(sub(wet_end, tw), a / (2.0 * lim.a_sg_star + lambda));
    unit(f)
}

/// One-sided fifth-order derivative direction at the start of a uniformly
/// sampled sequence; falls back to the chord for short sequences.
fn start_direction(p: &[Point]) -> Option<Point> {
    if p.len() < 5 {
        return unit(sub(*p.get(1)?, p[0]));
    }
    let d = |k: usize| -25.0 * p[0][k] + 48.0 * p[1][k] - 36.0 * p[2][k] + 16.0 * p[3][k] - 3.0 * p[4][k];
    unit([d(0), d(1)])
}

fn end_direction(p: &[Point]) -> Option<Point> {
    let rev: Vec<Point> = p.iter().rev().take(5).copied().collect();
    start_direction(&rev).map(|d| scale(d, -1.0))
}

fn meniscus_start(m: &LYProfile) -> Point {
    start_direction(&m.samples).unwrap_or([1.0, 0.0])
}

impl LimitSolution {
    /// Tangents measured from the sampled curves.
    pub fn tangents(&self) -> ContactTangents {
        let wet = self.wet_profile.as_ref().map(ParamCurve::points);
        let left = meniscus_start(&self.menisci[0]);
        ContactTangents {
            // the left meniscus runs to −x; reversing it points towards the sheet
            left_meniscus: [left[0], -left[1]],
            sheet_start: wet.and_then(start_direction),
            wet_end: wet.and_then(end_direction),
            dry: unit(sub(self.dry_segment[1], self.dry_segment[0])),
            right_meniscus: meniscus_start(&self.menisci[1]),
        }
    }
}

/// Force-balance report for a limit solution.
pub fn contact_conditions(sol: &LimitSolution) -> ContactReport {
    contact_residuals(&sol.tangents(), &sol.constants, sol.lambda)
}
