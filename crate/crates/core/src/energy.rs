//! Energies of discrete sheet configurations: the full functional with
//! explicit menisci, the thickness-`h` functional `E_h` with its gradient, the
//! limit functional `E`, and the energy balance in a window around the contact
//! point.
//!
//! Conventions: the sheet is a [`ParamCurve`] on `[0, 1]`; `[0, l]` is wet, the
//! left meniscus leaves from `s = 0`, the right one from `s = l`, and `s = 1`
//! sits at the anchor. Integrals over a segment that straddles `l` are split
//! pro rata in the parameter.

use serde::{Deserialize, Serialize};

use crate::curve::{add, cross, dist, norm, scale, sub, ParamCurve, Point};
use crate::error::{Error, Result};
use crate::laplace_young::{critical_height, psi, psi_derivative};
use crate::model::{DimensionlessParams, LimitConstants};

/// Distance tolerance for the anchor and junction conditions.
pub const JUNCTION_TOL: f64 = 1e-10;
/// Speeds above `1 + SPEED_TOL` make the limit energy infinite.
pub const SPEED_TOL: f64 = 1e-9;

/// A sheet shape with its contact parameter and anchor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Configuration {
    pub curve: ParamCurve,
    /// Wet parameter length in `[0, 1]`.
    pub l: f64,
    pub anchor: Point,
    /// Left and right menisci, each starting at its contact point.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub menisci: Option<[ParamCurve; 2]>,
}

impl Configuration {
    pub fn new(curve: ParamCurve, l: f64, anchor: Point) -> Result<Self> {
        let cfg = Self {
            curve,
            l,
            anchor,
            menisci: None,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_menisci(mut self, left: ParamCurve, right: ParamCurve) -> Result<Self> {
        self.menisci = Some([left, right]);
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.l) {
            return Err(Error::InvalidParameter(format!("contact parameter {} outside [0, 1]", self.l)));
        }
        let end = self.curve.end();
        if dist(end, self.anchor) > JUNCTION_TOL {
            return Err(Error::Junction(format!(
                "sheet ends at ({}, {}) instead of the anchor ({}, {})",
                end[0], end[1], self.anchor[0], self.anchor[1]
            )));
        }
        if let Some([left, right]) = &self.menisci {
            if dist(left.start(), self.curve.start()) > JUNCTION_TOL {
                return Err(Error::Junction("left meniscus does not start at the sheet's free end".into()));
            }
            if dist(right.start(), self.contact_point()) > JUNCTION_TOL {
                return Err(Error::Junction("right meniscus does not start at the contact point".into()));
            }
        }
        Ok(())
    }

    /// The sheet point at `s = l`.
    pub fn contact_point(&self) -> Point {
        self.curve.eval(self.l)
    }
}

/// Term-by-term energy values; unpopulated terms are zero.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct EnergyBreakdown {
    pub surface_wet: f64,
    pub surface_dry: f64,
    pub gravity_liquid: f64,
    pub weight: f64,
    pub membrane: f64,
    pub bending: f64,
    pub phi_minus: f64,
    pub phi_plus: f64,
    pub meniscus_left: f64,
    pub meniscus_right: f64,
    pub total: f64,
    /// Set when the configuration lies outside the domain of the functional.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub infinite: Option<InfiniteBranch>,
}

/// Why a functional takes the value `+∞`, with the first offending node.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InfiniteBranch {
    /// Discrete speed above one on the segment starting at `node`.
    Stretched { node: usize, speed: f64 },
    /// Curvature undefined or unbounded at `node`.
    Corner { node: usize },
}

impl EnergyBreakdown {
    fn finish(mut self) -> Self {
        self.total = self.surface_wet
            + self.surface_dry
            + self.gravity_liquid
            + self.weight
            + self.membrane
            + self.bending
            + self.phi_minus
            + self.phi_plus
            + self.meniscus_left
            + self.meniscus_right;
        self
    }

    fn infinite(branch: InfiniteBranch) -> Self {
        Self {
            total: f64::INFINITY,
            infinite: Some(branch),
            ..Self::default()
        }
    }

    pub fn is_finite(&self) -> bool {
        self.infinite.is_none() && self.total.is_finite()
    }
}

/// Coefficients of the sheet integrand.
#[derive(Debug, Clone, Copy)]
struct SheetCoefficients {
    wet: f64,
    dry: f64,
    gravity: f64,
    weight: f64,
    membrane: f64,
    bending: f64,
}

impl SheetCoefficients {
    /// `E_h`: everything divided by `h^α`.
    fn for_h(p: &DimensionlessParams) -> Self {
        let k = p.h_hat.powf(-p.alpha);
        Self {
            wet: (p.a_sl + p.a_sg) * k,
            dry: 2.0 * p.a_sg * k,
            gravity: p.c * k,
            weight: p.b * k,
            membrane: k,
            bending: p.h_hat * p.h_hat * k,
        }
    }

    fn for_full(p: &DimensionlessParams) -> Self {
        Self {
            wet: p.a_sl + p.a_sg,
            dry: 2.0 * p.a_sg,
            gravity: p.c,
            weight: p.b,
            membrane: 1.0,
            bending: p.h_hat * p.h_hat,
        }
    }
}

/// Fraction of segment `[s_i, s_{i+1}]` lying in `[0, l]`.
#[inline]
fn wet_fraction(s0: f64, s1: f64, l: f64) -> f64 {
    ((l - s0) / (s1 - s0)).clamp(0.0, 1.0)
}

/// `∫ y² dx` over an affine segment, signed by `Δx`.
#[inline]
fn y2dx(a: Point, b: Point) -> f64 {
    (b[0] - a[0]) * (a[1] * a[1] + a[1] * b[1] + b[1] * b[1]) / 3.0
}

/// Signed Menger curvature with its gradient with respect to the three points.
pub fn menger_with_gradient(a: Point, b: Point, c: Point) -> Option<(f64, [Point; 3])> {
    let u = sub(b, a);
    let v = sub(c, b);
    let w = sub(c, a);
    let (nu, nv, nw) = (norm(u), norm(v), norm(w));
    let den = nu * nv * nw;
    if !(den > 0.0) {
        return None;
    }
    let num = 2.0 * cross(u, v);
    let k = num / den;
    // d num
    let dn_a = [-2.0 * v[1], 2.0 * v[0]];
    let dn_c = [-2.0 * u[1], 2.0 * u[0]];
    // d ln den
    let du = scale(u, 1.0 / (nu * nu));
    let dv = scale(v, 1.0 / (nv * nv));
    let dw = scale(w, 1.0 / (nw * nw));
    let dl_a = scale(add(du, dw), -1.0);
    let dl_b = sub(du, dv);
    let dl_c = add(dv, dw);
    let ga = sub(scale(dn_a, 1.0 / den), scale(dl_a, k));
    let gc = sub(scale(dn_c, 1.0 / den), scale(dl_c, k));
    let gb = sub(scale(add(dn_a, dn_c), -1.0 / den), scale(dl_b, k));
    Some((k, [ga, gb, gc]))
}

/// Quadrature weights for the nodal curvatures: half the adjacent parameter
/// lengths, with the end segments credited to the nearest interior node.
fn bending_weights(s: &[f64]) -> Vec<f64> {
    let n = s.len();
    let mut w = vec![0.0; n];
    for i in 1..n - 1 {
        w[i] = 0.5 * (s[i + 1] - s[i - 1]);
    }
    if n >= 3 {
        w[1] += 0.5 * (s[1] - s[0]);
        w[n - 2] += 0.5 * (s[n - 1] - s[n - 2]);
    }
    w
}

/// Gradient of [`energy_h`] with respect to the nodes and to `l`.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradient {
    pub nodes: Vec<Point>,
    /// One-sided derivatives in `l`; they differ only when `l` is a node.
    pub dl_minus: f64,
    pub dl_plus: f64,
}

/// Sheet terms (everything except menisci and `φ`) with optional gradient.
fn sheet_terms(
    cfg: &Configuration,
    k: &SheetCoefficients,
    grad: Option<&mut Gradient>,
) -> std::result::Result<EnergyBreakdown, InfiniteBranch> {
    let s = cfg.curve.s();
    let pts = cfg.curve.points();
    let n = pts.len();
    if n < 3 {
        return Err(InfiniteBranch::Corner { node: 0 });
    }
    let l = cfg.l;
    let mut e = EnergyBreakdown::default();
    let mut g = grad;
    for i in 0..n - 1 {
        let (a, b) = (pts[i], pts[i + 1]);
        let ds = s[i + 1] - s[i];
        let d = sub(b, a);
        let len = norm(d);
        let f = wet_fraction(s[i], s[i + 1], l);
        e.surface_wet += f * k.wet * len;
        e.surface_dry += (1.0 - f) * k.dry * len;
        let y2 = y2dx(a, b);
        e.gravity_liquid += f * k.gravity / 2.0 * y2;
        e.weight += k.weight * ds * (a[1] + b[1]) / 2.0;
        e.membrane += k.membrane * (len - ds) * (len - ds) / ds;
        if let Some(g) = g.as_deref_mut() {
            let unit = if len > 0.0 { scale(d, 1.0 / len) } else { [0.0, 0.0] };
            let coef = f * k.wet + (1.0 - f) * k.dry + 2.0 * k.membrane * (len - ds) / ds;
            let q = a[1] * a[1] + a[1] * b[1] + b[1] * b[1];
            let gk = f * k.gravity / 6.0;
            let ga = [
                -coef * unit[0] - gk * q,
                -coef * unit[1] + gk * d[0] * (2.0 * a[1] + b[1]) + k.weight * ds / 2.0,
            ];
            let gb = [
                coef * unit[0] + gk * q,
                coef * unit[1] + gk * d[0] * (a[1] + 2.0 * b[1]) + k.weight * ds / 2.0,
            ];
            g.nodes[i] = add(g.nodes[i], ga);
            g.nodes[i + 1] = add(g.nodes[i + 1], gb);
            // l-derivative of the pro-rata split on the straddling segments
            let per_l = ((k.wet - k.dry) * len + k.gravity / 2.0 * y2) / ds;
            if s[i] <= l && l < s[i + 1] {
                g.dl_plus += per_l;
            }
            if s[i] < l && l <= s[i + 1] {
                g.dl_minus += per_l;
            }
        }
    }
    let w = bending_weights(s);
    for i in 1..n - 1 {
        let Some((kap, gk)) = menger_with_gradient(pts[i - 1], pts[i], pts[i + 1]) else {
            return Err(InfiniteBranch::Corner { node: i });
        };
        if !kap.is_finite() {
            return Err(InfiniteBranch::Corner { node: i });
        }
        e.bending += k.bending * w[i] * kap * kap;
        if let Some(g) = g.as_deref_mut() {
            let c = 2.0 * k.bending * w[i] * kap;
            for (j, gj) in gk.iter().enumerate() {
                g.nodes[i - 1 + j] = add(g.nodes[i - 1 + j], scale(*gj, c));
            }
        }
    }
    Ok(e)
}

/// `φ−(x(0), y(0)) + φ+(x(l), y(l))` with the given constants, plus gradient.
fn phi_terms(
    cfg: &Configuration,
    a_lg: f64,
    c: f64,
    grad: Option<&mut Gradient>,
) -> Result<(f64, f64)> {
    let y_star = critical_height(a_lg, c)?;
    let p0 = cfg.curve.start();
    let pl = cfg.contact_point();
    for y in [p0[1], pl[1]] {
        if y < 0.0 {
            return Err(Error::NegativeHeight(y));
        }
        if y > y_star {
            return Err(Error::AboveCriticalHeight { height: y, y_star });
        }
    }
    let minus = psi(p0[1], a_lg, c) + a_lg * p0[0];
    let plus = psi(pl[1], a_lg, c) - a_lg * pl[0];
    if let Some(g) = grad {
        g.nodes[0] = add(g.nodes[0], [a_lg, psi_derivative(p0[1], a_lg, c)]);
        let dpl = [-a_lg, psi_derivative(pl[1], a_lg, c)];
        let s = cfg.curve.s();
        let pts = cfg.curve.points();
        let k = cfg.curve.segment_index(cfg.l);
        let t = (cfg.l - s[k]) / (s[k + 1] - s[k]);
        g.nodes[k] = add(g.nodes[k], scale(dpl, 1.0 - t));
        g.nodes[k + 1] = add(g.nodes[k + 1], scale(dpl, t));
        let slope = |j: usize| {
            let d = scale(sub(pts[j + 1], pts[j]), 1.0 / (s[j + 1] - s[j]));
            dpl[0] * d[0] + dpl[1] * d[1]
        };
        let last = s.len() - 2;
        let right = k;
        let left = if cfg.l == s[k] && k > 0 { k - 1 } else { k };
        g.dl_plus += if cfg.l >= 1.0 { slope(last) } else { slope(right) };
        g.dl_minus += if cfg.l <= 0.0 { slope(0) } else { slope(left) };
    }
    Ok((minus, plus))
}

/// The thickness-`h` functional
/// `h^{−α}[∫ surface + C/2·1_wet y²ẋ + B y + (|ṗ| − 1)² + h²κ² ds + φ− + φ+]`,
/// with `φ±` built from `A_LG` and `C`.
///
/// Since the meniscus constants scale like `h^α`, the bracketed `φ` terms
/// equal `φ±` evaluated with the rescaled constants.
pub fn energy_h(cfg: &Configuration, p: &DimensionlessParams) -> Result<EnergyBreakdown> {
    energy_h_impl(cfg, p, None)
}

/// [`energy_h`] together with its gradient.
pub fn energy_h_with_gradient(cfg: &Configuration, p: &DimensionlessParams) -> Result<(EnergyBreakdown, Gradient)> {
    let mut g = Gradient {
        nodes: vec![[0.0, 0.0]; cfg.curve.len()],
        dl_minus: 0.0,
        dl_plus: 0.0,
    };
    let e = energy_h_impl(cfg, p, Some(&mut g))?;
    Ok((e, g))
}

fn energy_h_impl(cfg: &Configuration, p: &DimensionlessParams, mut grad: Option<&mut Gradient>) -> Result<EnergyBreakdown> {
    let k = SheetCoefficients::for_h(p);
    let mut e = match sheet_terms(cfg, &k, grad.as_deref_mut()) {
        Ok(e) => e,
        Err(branch) => return Ok(EnergyBreakdown::infinite(branch)),
    };
    let scale_h = p.h_hat.powf(-p.alpha);
    let (minus, plus) = phi_terms(cfg, p.a_lg * scale_h, p.c * scale_h, grad)?;
    e.phi_minus = minus;
    e.phi_plus = plus;
    Ok(e.finish())
}

/// Renormalized meniscus energy `Σ A(|Δq| − dir·Δw) + C/2 z²|Δw|`.
fn meniscus_energy(m: &ParamCurve, a_lg: f64, c: f64, dir: f64) -> f64 {
    crate::laplace_young::parametric_objective_toward(m.points(), a_lg, c, dir)
}

/// Terminal height above which a truncated meniscus is rejected.
pub const MENISCUS_END_TOL: f64 = 1e-8;

/// The full functional with explicit menisci, including the boundary terms
/// `+A w₁(0)` and `−A w₂(0)` of the renormalization.
pub fn energy_full(cfg: &Configuration, p: &DimensionlessParams) -> Result<EnergyBreakdown> {
    cfg.validate()?;
    let Some([left, right]) = &cfg.menisci else {
        return Err(Error::InvalidParameter("energy_full needs both menisci".into()));
    };
    for (name, m) in [("left", left), ("right", right)] {
        if m.end()[1].abs() > MENISCUS_END_TOL {
            return Err(Error::InvalidCurve(format!(
                "{name} meniscus ends at height {} above the waterline",
                m.end()[1]
            )));
        }
    }
    let k = SheetCoefficients::for_full(p);
    let mut e = match sheet_terms(cfg, &k, None) {
        Ok(e) => e,
        Err(branch) => return Ok(EnergyBreakdown::infinite(branch)),
    };
    e.meniscus_left = meniscus_energy(left, p.a_lg, p.c, -1.0) + p.a_lg * left.start()[0];
    e.meniscus_right = meniscus_energy(right, p.a_lg, p.c, 1.0) - p.a_lg * right.start()[0];
    Ok(e.finish())
}

/// Minimal energy of a meniscus from height `y0`, extended above `y*` by
/// the vertical drop that the parametric problem prefers there.
pub fn phi_extended(y0: f64, a_lg: f64, c: f64) -> f64 {
    let y_star = (2.0 * a_lg / c).sqrt();
    if y0 <= y_star {
        psi(y0, a_lg, c)
    } else {
        psi(y_star, a_lg, c) + a_lg * (y0 - y_star)
    }
}

/// The limit functional
/// `∫ 1_wet(A_SL* + A_SG*) + 1_dry 2A_SG* + C*/2·1_wet y²ẋ ds + φ− + φ+`,
/// infinite unless every discrete speed is at most one.
pub fn energy_limit(cfg: &Configuration, lim: &LimitConstants) -> EnergyBreakdown {
    let s = cfg.curve.s();
    let pts = cfg.curve.points();
    for (i, v) in cfg.curve.speeds().into_iter().enumerate() {
        if v > 1.0 + SPEED_TOL {
            return EnergyBreakdown::infinite(InfiniteBranch::Stretched { node: i, speed: v });
        }
    }
    let l = cfg.l;
    let mut e = EnergyBreakdown {
        surface_wet: l * (lim.a_sl_star + lim.a_sg_star),
        surface_dry: (1.0 - l) * 2.0 * lim.a_sg_star,
        ..EnergyBreakdown::default()
    };
    for i in 0..pts.len() - 1 {
        let f = wet_fraction(s[i], s[i + 1], l);
        e.gravity_liquid += f * lim.c_star / 2.0 * y2dx(pts[i], pts[i + 1]);
    }
    let p0 = cfg.curve.start();
    let pl = cfg.contact_point();
    e.phi_minus = phi_extended(p0[1].max(0.0), lim.a_lg_star, lim.c_star) + lim.a_lg_star * p0[0];
    e.phi_plus = phi_extended(pl[1].max(0.0), lim.a_lg_star, lim.c_star) - lim.a_lg_star * pl[0];
    e.finish()
}

/// Physical constants entering the contact-window energy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KinkPhysics {
    pub h: f64,
    pub e_mod: f64,
    pub gamma: f64,
    pub rho_g: f64,
}

impl KinkPhysics {
    /// Units with `L = E = 1`: `γ = A_LG ĥ` and `ρ_L g = C ĥ`.
    pub fn from_dimensionless(p: &DimensionlessParams) -> Self {
        Self {
            h: p.h_hat,
            e_mod: 1.0,
            gamma: p.a_lg * p.h_hat,
            rho_g: p.c * p.h_hat,
        }
    }

    /// Length scale where bending balances surface tension, `h^{3/2}√(E/γ)`.
    pub fn kink_scale(&self) -> f64 {
        kink_scale(self.h, self.e_mod, self.gamma)
    }
}

/// `ε* = h^{3/2} √(E/γ)`.
pub fn kink_scale(h: f64, e_mod: f64, gamma: f64) -> f64 {
    h.powf(1.5) * (e_mod / gamma).sqrt()
}

/// Window energies `∫ h³Eκ² + γ dσ + ρ_L g ∫ y² dx` over `|x − x_c| ≤ ε`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowEnergy {
    pub eps: f64,
    pub bending: f64,
    pub surface: f64,
    pub gravity: f64,
}

/// Restrict a polyline to the vertical strip `|x − xc| ≤ eps`; the curve
/// must be a graph with strictly increasing `x` there.
fn clip_to_strip(pts: &[Point], xc: f64, eps: f64) -> Result<Vec<Point>> {
    let (lo, hi) = (xc - eps, xc + eps);
    let mut out: Vec<Point> = Vec::new();
    for w in pts.windows(2) {
        let (a, b) = (w[0], w[1]);
        let (x0, x1) = (a[0].min(b[0]), a[0].max(b[0]));
        if x1 < lo || x0 > hi {
            continue;
        }
        if !(b[0] > a[0]) {
            return Err(Error::InvalidCurve(
                "vertical tangent or backtrack inside the contact window".into(),
            ));
        }
        let at = |x: f64| -> Point { [x, a[1] + (b[1] - a[1]) * (x - a[0]) / (b[0] - a[0])] };
        let start = if a[0] < lo { at(lo) } else { a };
        let end = if b[0] > hi { at(hi) } else { b };
        if out.last() != Some(&start) {
            out.push(start);
        }
        out.push(end);
    }
    if out.len() < 2 {
        return Err(Error::InvalidCurve("contact window contains no segment".into()));
    }
    Ok(out)
}

/// Energies of the sheet inside the strip of half-width `eps` around `xc`.
pub fn window_energy(pts: &[Point], xc: f64, eps: f64, phys: &KinkPhysics) -> Result<WindowEnergy> {
    let w = clip_to_strip(pts, xc, eps)?;
    let lens: Vec<f64> = w.windows(2).map(|q| dist(q[0], q[1])).collect();
    let surface = phys.gamma * lens.iter().sum::<f64>();
    let gravity = phys.rho_g * w.windows(2).map(|q| y2dx(q[0], q[1])).sum::<f64>();
    let mut bending = 0.0;
    for i in 1..w.len() - 1 {
        if lens[i - 1] < 1e-14 * eps || lens[i] < 1e-14 * eps {
            continue;
        }
        let k = crate::curve::menger(w[i - 1], w[i], w[i + 1]);
        bending += k * k * 0.5 * (lens[i - 1] + lens[i]);
    }
    bending *= phys.h.powi(3) * phys.e_mod;
    Ok(WindowEnergy {
        eps,
        bending,
        surface,
        gravity,
    })
}

/// Contact-window analysis of a configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KinkReport {
    pub physics: KinkPhysics,
    pub contact: Point,
    pub window: WindowEnergy,
    /// `ε* = h^{3/2}√(E/γ)`.
    pub eps_star: f64,
    /// Leading gravity term `2ε ρ_L g y₀²` for the window `[−ε, ε]`.
    pub gravity_leading: f64,
    /// Fitted exponent `p` of `|gravity − 2ερ_L g y₀²| ∝ ε^p` over a decade
    /// of windows ending at `eps_window`.
    pub gravity_exponent: f64,
    /// `(ε, |gravity − leading|)` samples used for the fit.
    pub gravity_samples: Vec<(f64, f64)>,
}

/// Least-squares slope of `ln y` against `ln x`, skipping zeros.
pub fn loglog_slope(samples: &[(f64, f64)]) -> f64 {
    let pts: Vec<(f64, f64)> = samples
        .iter()
        .filter(|(x, y)| *x > 0.0 && *y > 0.0)
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    let n = pts.len() as f64;
    if pts.len() < 2 {
        return f64::NAN;
    }
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}

/// Number of windows in the gravity-expansion fit.
const GRAVITY_FIT_POINTS: usize = 9;

/// Window energies around the contact point `x = x(l)` with the physical
/// constants implied by `p`, and the check of the gravity expansion.
pub fn kink_analysis(cfg: &Configuration, p: &DimensionlessParams, eps_window: f64) -> Result<KinkReport> {
    kink_analysis_with(cfg, &KinkPhysics::from_dimensionless(p), eps_window)
}

/// [`kink_analysis`] with explicit physical constants.
pub fn kink_analysis_with(cfg: &Configuration, phys: &KinkPhysics, eps_window: f64) -> Result<KinkReport> {
    if !(eps_window > 0.0) {
        return Err(Error::InvalidParameter("window half-width must be positive".into()));
    }
    let contact = cfg.contact_point();
    let pts = cfg.curve.points();
    let window = window_energy(pts, contact[0], eps_window, phys)?;
    let leading = |eps: f64| 2.0 * eps * phys.rho_g * contact[1] * contact[1];
    let gravity_samples: Vec<(f64, f64)> = (0..GRAVITY_FIT_POINTS)
        .map(|i| {
            let eps = eps_window * 10f64.powf(-(i as f64) / (GRAVITY_FIT_POINTS - 1) as f64);
            let w = window_energy(pts, contact[0], eps, phys)?;
            Ok((eps, (w.gravity - leading(eps)).abs()))
        })
        .collect::<Result<_>>()?;
    Ok(KinkReport {
        physics: *phys,
        contact,
        window,
        eps_star: phys.kink_scale(),
        gravity_leading: leading(eps_window),
        gravity_exponent: loglog_slope(&gravity_samples),
        gravity_samples,
    })
}

/// Two straight arms joined by a circular arc of radius `r` that turns by
/// `turning` radians, symmetric about `x = 0`, lowest point at `(0, y0)`.
pub fn fillet_curve(r: f64, turning: f64, arm: f64, y0: f64, nodes_per_arc: usize) -> Result<ParamCurve> {
    if !(r > 0.0 && turning > 0.0 && turning < std::f64::consts::PI && arm > 0.0) {
        return Err(Error::InvalidParameter("fillet needs r > 0, 0 < turning < π, arm > 0".into()));
    }
    let half = turning / 2.0;
    let center = [0.0, y0 + r];
    let arc_point = |phi: f64| [center[0] + r * phi.sin(), center[1] - r * phi.cos()];
    let m = nodes_per_arc.max(4);
    let start = arc_point(-half);
    let end = arc_point(half);
    // arms leave tangentially: directions (−cos, sin) and (cos, sin) of the half angle
    let arm_nodes = m;
    let mut pts = Vec::with_capacity(2 * arm_nodes + m + 1);
    for i in 0..arm_nodes {
        let t = arm * (1.0 - i as f64 / arm_nodes as f64);
        pts.push([start[0] - t * half.cos(), start[1] + t * half.sin()]);
    }
    for i in 0..=m {
        pts.push(arc_point(-half + turning * i as f64 / m as f64));
    }
    for i in 1..=arm_nodes {
        let t = arm * i as f64 / arm_nodes as f64;
        pts.push([end[0] + t * half.cos(), end[1] + t * half.sin()]);
    }
    ParamCurve::by_chord_length(pts)
}

/// Crossover of bending and surface energy on the fillet family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FilletCrossover {
    pub physics: KinkPhysics,
    pub turning: f64,
    /// Radius at which bending equals surface energy in the window `|x| ≤ r`.
    pub radius: f64,
    pub eps_star: f64,
    /// `radius / eps_star`.
    pub ratio: f64,
}

/// Bending/surface ratio in the window `|x| ≤ r` for the fillet of radius `r`.
pub fn fillet_ratio(r: f64, turning: f64, phys: &KinkPhysics) -> Result<f64> {
    let c = fillet_curve(r, turning, 4.0 * r, 0.0, 400)?;
    let w = window_energy(c.points(), 0.0, r, phys)?;
    Ok(w.bending / w.surface)
}

/// Bisect (in `ln r`) the radius where bending equals surface energy.
pub fn fillet_crossover(phys: &KinkPhysics, turning: f64) -> Result<FilletCrossover> {
    let eps_star = phys.kink_scale();
    let (mut lo, mut hi) = ((eps_star * 1e-3).ln(), (eps_star * 1e3).ln());
    // bending/surface decreases like 1/r²
    if fillet_ratio(lo.exp(), turning, phys)? < 1.0 || fillet_ratio(hi.exp(), turning, phys)? > 1.0 {
        return Err(Error::NoConvergence {
            method: "fillet crossover bracket",
            iterations: 0,
            residual: f64::NAN,
        });
    }
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if fillet_ratio(mid.exp(), turning, phys)? > 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-12 {
            break;
        }
    }
    let radius = (0.5 * (lo + hi)).exp();
    Ok(FilletCrossover {
        physics: *phys,
        turning,
        radius,
        eps_star,
        ratio: radius / eps_star,
    })
}
