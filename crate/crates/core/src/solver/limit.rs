//! Semi-analytic solution of the limit problem.
//!
//! The minimizer is a Laplace–Young arc (the wet sheet) followed by a
//! straight chord (the dry sheet) up to the anchor. Three unknowns fix it:
//! the contact height `y₀`, the wet length `l` and the abscissa `x₊` of the
//! free end. They solve a small damped Newton system built from the force
//! balance at the contact point, the unit total length and the placement
//! of the arc.

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::curve::{dist, lerp, Point, ParamCurve};
use crate::energy::{energy_limit, Configuration, EnergyBreakdown};
use crate::error::{Error, Result};
use crate::laplace_young::{critical_height, inclination, polyline_length, solve_graph, ExactProfile, LYProfile};
use crate::model::LimitConstants;

/// Wet-profile nodes per unit arclength.
pub const WET_NODES_PER_UNIT: usize = 4000;
/// Sup-norm target for the Newton residuals.
pub const NEWTON_TOL: f64 = 1e-13;
const NEWTON_MAX_ITER: usize = 200;

/// Which constraint fixes the contact height.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ContactRegime {
    /// Wet arc and dry chord; the height comes from the force balance.
    PartlyWet,
    /// The whole sheet is wet and the right meniscus leaves from the anchor.
    FullyWet,
    /// The sheet hangs dry from the anchor; both menisci meet its lower end.
    FullyDry,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NewtonReport {
    pub iterations: usize,
    /// Final residuals (height condition, length, placement).
    pub residuals: [f64; 3],
}

/// The wet arc seen from the contact point: a Laplace–Young profile run
/// backwards, i.e. the right meniscus from the same point mirrored across
/// the vertical through it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WetArc {
    pub contact: Point,
    exact: Option<ExactProfile>,
}

impl WetArc {
    pub fn new(contact: Point, a_lg: f64, c: f64) -> Result<Self> {
        let exact = if contact[1] > 0.0 {
            Some(ExactProfile::new(contact[0], contact[1], a_lg, c)?)
        } else {
            None
        };
        Ok(Self { contact, exact })
    }

    /// Point at arclength `sigma` from the contact, towards the free end.
    pub fn point(&self, sigma: f64) -> Point {
        match &self.exact {
            Some(e) => {
                let q = e.point(sigma);
                [2.0 * self.contact[0] - q[0], q[1]]
            }
            None => [self.contact[0] - sigma, 0.0],
        }
    }

    /// Horizontal extent of the first `sigma` of arc.
    pub fn extent(&self, sigma: f64) -> f64 {
        self.contact[0] - self.point(sigma)[0]
    }

    /// `d extent / d sigma`.
    fn extent_rate(&self, sigma: f64) -> f64 {
        match &self.exact {
            Some(e) => e.tangent(sigma)[0],
            None => 1.0,
        }
    }

    /// `∂ extent / ∂ y₀` at fixed arclength.
    fn extent_height_rate(&self, sigma: f64) -> f64 {
        match &self.exact {
            Some(e) => {
                let gp = |t: f64| {
                    let s = 1.0 / t.cosh();
                    1.0 - 2.0 * s * s
                };
                let r = 2.0 * e.ell / e.y0;
                let dt0 = -(2.0 * e.ell / (e.y0 * e.y0)) / (r * r - 1.0).sqrt();
                e.ell * (gp(e.t0 + sigma / e.ell) - gp(e.t0)) * dt0
            }
            None => 0.0,
        }
    }
}

/// The solved limit configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitSolution {
    pub constants: LimitConstants,
    pub anchor: Point,
    pub regime: ContactRegime,
    /// Free end of the sheet `(x₊, y₊)`.
    pub contact_left: Point,
    /// Wet/dry junction `(x₀, y₀)`.
    pub contact_right: Point,
    pub l: f64,
    pub lambda: f64,
    /// Inclination of the wet sheet at the junction, in radians.
    pub contact_angle: f64,
    /// Wet sheet from the free end to the junction, parametrized by `s/l`.
    pub wet_profile: Option<ParamCurve>,
    pub dry_segment: [Point; 2],
    /// Left and right menisci in local coordinates, each starting at `x = 0`
    /// and running away from the sheet.
    pub menisci: [LYProfile; 2],
    pub energy: EnergyBreakdown,
    pub newton: NewtonReport,
}

/// Height at which the force balance holds: `2A sin θ = A + A_SG − A_SL`.
pub fn balance_height(lim: &LimitConstants) -> f64 {
    let a = lim.a_lg_star;
    let sin = ((a + lim.a_sg_star - lim.a_sl_star) / (2.0 * a)).clamp(0.0, 1.0);
    let cos = (1.0 - sin * sin).sqrt();
    (2.0 * a * (1.0 - cos) / lim.c_star).sqrt()
}

/// Classify the anchor height against the balance height.
pub fn contact_regime(lim: &LimitConstants, anchor: Point) -> Result<ContactRegime> {
    let y_star = critical_height(lim.a_lg_star, lim.c_star)?;
    let yb = anchor[1];
    if !yb.is_finite() || !anchor[0].is_finite() {
        return Err(Error::InvalidParameter("anchor must be finite".into()));
    }
    if yb < 0.0 {
        return Err(Error::Unreachable(format!("anchor height {yb} is below the waterline")));
    }
    if yb - 1.0 > y_star {
        return Err(Error::Unreachable(format!(
            "anchor height {yb} exceeds sheet length plus critical height {}",
            1.0 + y_star
        )));
    }
    let yc = balance_height(lim);
    Ok(if yb < yc {
        ContactRegime::FullyWet
    } else if yb - 1.0 > yc {
        ContactRegime::FullyDry
    } else {
        ContactRegime::PartlyWet
    })
}

struct System<'a> {
    lim: &'a LimitConstants,
    anchor: Point,
    regime: ContactRegime,
    y_star: f64,
}

impl System<'_> {
    fn arc(&self, y0: f64) -> Result<WetArc> {
        WetArc::new([self.anchor[0], y0], self.lim.a_lg_star, self.lim.c_star)
    }

    fn residual(&self, v: &Vector3<f64>) -> Result<Vector3<f64>> {
        let (y0, l, xp) = (v[0], v[1], v[2]);
        let (a, yb) = (self.lim.a_lg_star, self.anchor[1]);
        let r1 = match self.regime {
            ContactRegime::PartlyWet => {
                let (_, sin) = inclination(y0, a, self.lim.c_star);
                2.0 * a * sin - (a + self.lim.a_sg_star - self.lim.a_sl_star)
            }
            ContactRegime::FullyWet => y0 - yb,
            ContactRegime::FullyDry => y0 - (yb - 1.0),
        };
        let r2 = l - (1.0 - (yb - y0).abs());
        let r3 = xp - self.anchor[0] + self.arc(y0)?.extent(l);
        Ok(Vector3::new(r1, r2, r3))
    }

    fn jacobian(&self, v: &Vector3<f64>) -> Result<Matrix3<f64>> {
        let (y0, l) = (v[0], v[1]);
        let (a, c) = (self.lim.a_lg_star, self.lim.c_star);
        let d1 = match self.regime {
            ContactRegime::PartlyWet => {
                let (cos, sin) = inclination(y0, a, c);
                2.0 * c * y0 * cos / sin.max(1e-300)
            }
            _ => 1.0,
        };
        let arc = self.arc(y0)?;
        let sgn = (self.anchor[1] - y0).signum();
        Ok(Matrix3::new(
            d1, 0.0, 0.0,
            -sgn, 1.0, 0.0,
            arc.extent_height_rate(l), arc.extent_rate(l), 1.0,
        ))
    }

    fn clamp(&self, v: Vector3<f64>) -> Vector3<f64> {
        Vector3::new(v[0].clamp(0.0, self.y_star), v[1].clamp(0.0, 1.0), v[2])
    }
}

fn sup(v: &Vector3<f64>) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

/// Solve the limit problem for the anchor `(x̄, ȳ)`.
pub fn solve_limit_problem(lim: &LimitConstants, anchor: Point) -> Result<LimitSolution> {
    lim.validate()?;
    let regime = contact_regime(lim, anchor)?;
    let (a, c) = (lim.a_lg_star, lim.c_star);
    let y_star = critical_height(a, c)?;
    let sys = System {
        lim,
        anchor,
        regime,
        y_star,
    };
    let y_init = match regime {
        ContactRegime::PartlyWet => anchor[1].min(0.5 * y_star).max(1e-3 * y_star),
        ContactRegime::FullyWet => anchor[1],
        ContactRegime::FullyDry => anchor[1] - 1.0,
    };
    let l_init = 1.0 - (anchor[1] - y_init).abs();
    let mut v = Vector3::new(y_init, l_init, anchor[0] - l_init);
    let mut r = sys.residual(&v)?;
    let mut it = 0;
    while sup(&r) > NEWTON_TOL {
        if it == NEWTON_MAX_ITER {
            return Err(Error::NoConvergence {
                method: "limit Newton",
                iterations: it,
                residual: sup(&r),
            });
        }
        it += 1;
        let step = sys
            .jacobian(&v)?
            .lu()
            .solve(&(-r))
            .ok_or_else(|| Error::NoConvergence {
                method: "limit Newton (singular Jacobian)",
                iterations: it,
                residual: sup(&r),
            })?;
        let mut t = 1.0;
        loop {
            let trial = sys.clamp(v + step * t);
            let rt = sys.residual(&trial)?;
            if sup(&rt) <= sup(&r) || t < 1e-12 {
                v = trial;
                r = rt;
                break;
            }
            t *= 0.5;
        }
    }
    assemble(lim, anchor, regime, v[0], v[1], NewtonReport {
        iterations: it,
        residuals: [r[0], r[1], r[2]],
    })
}

fn assemble(
    lim: &LimitConstants,
    anchor: Point,
    regime: ContactRegime,
    y0: f64,
    l: f64,
    newton: NewtonReport,
) -> Result<LimitSolution> {
    let (a, c) = (lim.a_lg_star, lim.c_star);
    let junction = [anchor[0], y0];
    let arc = WetArc::new(junction, a, c)?;
    let contact_left = arc.point(l);
    let wet_profile = if l > 0.0 {
        let n = ((WET_NODES_PER_UNIT as f64 * l).ceil() as usize).max(16);
        let pts = (0..=n).map(|k| arc.point(l * (1.0 - k as f64 / n as f64))).collect();
        Some(ParamCurve::uniform(pts)?)
    } else {
        None
    };
    let (cos, sin) = inclination(y0, a, c);
    let mut sol = LimitSolution {
        constants: *lim,
        anchor,
        regime,
        contact_left,
        contact_right: junction,
        l,
        lambda: lim.lambda_pred(),
        contact_angle: sin.atan2(cos),
        wet_profile,
        dry_segment: [junction, anchor],
        menisci: [solve_graph(contact_left[1], a, c)?, solve_graph(y0, a, c)?],
        energy: EnergyBreakdown::default(),
        newton,
    };
    sol.energy = energy_limit(&sol.sheet(WET_NODES_PER_UNIT)?, lim);
    Ok(sol)
}

/// Sheet nodes: about `n` intervals per unit, uniform on `[0, l]` and on `[l, 1]`.
fn grid_with(n: usize, l: f64) -> Vec<f64> {
    let nw = if l > 0.0 { ((n as f64 * l).ceil() as usize).max(1) } else { 0 };
    let nd = if l < 1.0 { ((n as f64 * (1.0 - l)).ceil() as usize).max(1) } else { 0 };
    let mut s: Vec<f64> = (0..nw).map(|k| l * k as f64 / nw as f64).collect();
    s.push(l);
    s.extend((1..=nd).map(|k| if k == nd { 1.0 } else { l + (1.0 - l) * k as f64 / nd as f64 }));
    s
}

/// A limit-admissible competitor: a wet Laplace–Young arc of length `l`
/// ending at `junction`, then a straight chord to the anchor traversed at
/// constant speed `|anchor − junction| / (1 − l) ≤ 1`.
pub fn candidate_configuration(
    lim: &LimitConstants,
    anchor: Point,
    junction: Point,
    l: f64,
    n: usize,
) -> Result<Configuration> {
    if !(0.0..=1.0).contains(&l) {
        return Err(Error::InvalidParameter(format!("wet length {l} outside [0, 1]")));
    }
    let chord = dist(junction, anchor);
    if chord > (1.0 - l) * (1.0 + 1e-12) {
        return Err(Error::InvalidParameter(format!(
            "dry chord {chord} longer than the dry length {}",
            1.0 - l
        )));
    }
    let arc = WetArc::new(junction, lim.a_lg_star, lim.c_star)?;
    let s = grid_with(n.max(2), l);
    let mut pts: Vec<Point> = s
        .iter()
        .map(|&t| {
            if t <= l {
                arc.point(l - t)
            } else {
                lerp(junction, anchor, (t - l) / (1.0 - l))
            }
        })
        .collect();
    *pts.last_mut().unwrap() = anchor;
    Configuration::new(ParamCurve::new(s, pts)?, l, anchor)
}

impl LimitSolution {
    /// The sheet on a grid of `n` intervals (plus the junction node).
    pub fn sheet(&self, n: usize) -> Result<Configuration> {
        candidate_configuration(&self.constants, self.anchor, self.contact_right, self.l, n)
    }

    /// The wet arc as seen from the junction.
    pub fn wet_arc(&self) -> Result<WetArc> {
        WetArc::new(self.contact_right, self.constants.a_lg_star, self.constants.c_star)
    }

    /// Sup-distance between the wet sheet and the right meniscus mirrored
    /// across the vertical through the junction, matched by arclength.
    pub fn symmetry_residual(&self) -> Result<f64> {
        let arc = self.wet_arc()?;
        let m = &self.menisci[1];
        let x0 = self.contact_right[0];
        let mut worst: f64 = 0.0;
        for (sig, q) in m.sigma.iter().zip(&m.samples) {
            if *sig > self.l {
                break;
            }
            worst = worst.max(dist(arc.point(*sig), [x0 - q[0], q[1]]));
        }
        Ok(worst)
    }

    /// Polyline length of the sheet sampled with `n` intervals.
    pub fn sheet_length(&self, n: usize) -> Result<f64> {
        Ok(polyline_length(self.sheet(n)?.curve.points()))
    }

    /// Largest distance of a sampled dry node from the dry chord.
    pub fn dry_chord_deviation(&self, n: usize) -> Result<f64> {
        let cfg = self.sheet(n)?;
        let [p, q] = self.dry_segment;
        let d = crate::curve::sub(q, p);
        let len = crate::curve::norm(d);
        if len == 0.0 {
            return Ok(0.0);
        }
        Ok(cfg
            .curve
            .s()
            .iter()
            .zip(cfg.curve.points())
            .filter(|(s, _)| **s >= self.l)
            .map(|(_, x)| crate::curve::cross(d, crate::curve::sub(*x, p)).abs() / len)
            .fold(0.0, f64::max))
    }

    /// Contact height against the critical height.
    pub fn y_star(&self) -> f64 {
        (2.0 * self.constants.a_lg_star / self.constants.c_star).sqrt()
    }

    /// Left meniscus in world coordinates, running left from the free end.
    pub fn left_meniscus_world(&self) -> Vec<Point> {
        let p = self.contact_left;
        self.menisci[0].samples.iter().map(|q| [p[0] - q[0], q[1]]).collect()
    }

    /// Right meniscus in world coordinates, running right from the junction.
    pub fn right_meniscus_world(&self) -> Vec<Point> {
        let p = self.contact_right;
        self.menisci[1].samples.iter().map(|q| [p[0] + q[0], q[1]]).collect()
    }
}
