//! The liquid–gas interface: decaying Laplace–Young profiles, the critical
//! height `y*`, and the meniscus energies `φ±`.
//!
//! All profiles here start at `(0, y0)` and decay as `x → ∞`. Left menisci are
//! obtained by reflection.

use serde::{Deserialize, Serialize};

use crate::curve::{cumulative_length, dist, ParamCurve, Point};
use crate::error::{Error, Result};
use crate::ode::{dp45_step, integrate, Dp45Options};

/// Default arclength step, in units of the capillary length `√(A/C)`.
pub const DEFAULT_STEP: f64 = 1e-3;
/// Integration stops once `y ≤ TRUNCATION · y0`.
pub const TRUNCATION: f64 = 1e-10;

fn check_constants(a_lg: f64, c: f64) -> Result<()> {
    if !(a_lg > 0.0 && a_lg.is_finite()) {
        return Err(Error::InvalidParameter(format!("A_LG must be positive, got {a_lg}")));
    }
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::InvalidParameter(format!("C must be positive, got {c}")));
    }
    Ok(())
}

/// `y* = √(2 A_LG / C)`, the largest height reachable by a decaying graph.
pub fn critical_height(a_lg: f64, c: f64) -> Result<f64> {
    check_constants(a_lg, c)?;
    Ok((2.0 * a_lg / c).sqrt())
}

/// Capillary length `√(A_LG / C)`.
pub fn capillary_length(a_lg: f64, c: f64) -> f64 {
    (a_lg / c).sqrt()
}

/// `1 − cos θ = C y² / (2 A)` along a decaying profile.
#[inline]
fn one_minus_cos(y: f64, a_lg: f64, c: f64) -> f64 {
    c * y * y / (2.0 * a_lg)
}

/// Inclination `(cos θ, sin θ)` of a decaying profile at height `y ≥ 0`,
/// with `θ` measured downward from the direction of travel.
#[inline]
pub fn inclination(y: f64, a_lg: f64, c: f64) -> (f64, f64) {
    let e = one_minus_cos(y, a_lg, c);
    let s2 = (e * (2.0 - e)).max(0.0);
    (1.0 - e, s2.sqrt())
}

/// Minimal meniscus energy `φ(0, y0)` from the first integral.
///
/// Valid up to `y0 = 2√(A/C)`; the graph infimum only makes sense up to `y*`.
pub fn psi(y0: f64, a_lg: f64, c: f64) -> f64 {
    let l = capillary_length(a_lg, c);
    let z = (1.0 - c * y0 * y0 / (4.0 * a_lg)).max(0.0);
    4.0 / 3.0 * a_lg * l * (1.0 - z * z.sqrt())
}

/// `dψ/dy0 = A sin θ(y0)`, odd in `y0`.
pub fn psi_derivative(y0: f64, a_lg: f64, c: f64) -> f64 {
    let (_, s) = inclination(y0.abs(), a_lg, c);
    a_lg * s * y0.signum()
}

/// Which meniscus a boundary energy refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    /// `φ+`, the meniscus leaving to the right (`− A x0`).
    Plus,
    /// `φ−`, the meniscus leaving to the left (`+ A x0`).
    Minus,
}

impl Side {
    fn linear_sign(self) -> f64 {
        match self {
            Side::Plus => -1.0,
            Side::Minus => 1.0,
        }
    }
}

/// `φ±(x0, y0) = ψ(y0) ∓ A x0` in closed form.
pub fn phi_closed(side: Side, x0: f64, y0: f64, a_lg: f64, c: f64) -> f64 {
    psi(y0, a_lg, c) + side.linear_sign() * a_lg * x0
}

/// The exact arclength parametrization of a decaying profile.
///
/// With `ℓ = √(A/C)` and `t = t0 + σ/ℓ`, the profile is
/// `y = 2ℓ sech t`, `x = x0 + ℓ[(t − 2 tanh t) − (t0 − 2 tanh t0)]`.
/// Heights above `y*` give the overhanging branch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactProfile {
    pub x0: f64,
    pub y0: f64,
    pub ell: f64,
    pub t0: f64,
}

impl ExactProfile {
    pub fn new(x0: f64, y0: f64, a_lg: f64, c: f64) -> Result<Self> {
        check_constants(a_lg, c)?;
        let ell = capillary_length(a_lg, c);
        if !(y0 > 0.0) || y0 >= 2.0 * ell {
            return Err(Error::InvalidParameter(format!(
                "exact profile needs 0 < y0 < 2√(A/C), got {y0}"
            )));
        }
        let t0 = (2.0 * ell / y0).acosh();
        Ok(Self { x0, y0, ell, t0 })
    }

    fn g(t: f64) -> f64 {
        t - 2.0 * t.tanh()
    }

    pub fn point(&self, sigma: f64) -> Point {
        let t = self.t0 + sigma / self.ell;
        [
            self.x0 + self.ell * (Self::g(t) - Self::g(self.t0)),
            2.0 * self.ell / t.cosh(),
        ]
    }

    /// Unit tangent in the direction of travel.
    pub fn tangent(&self, sigma: f64) -> Point {
        let t = self.t0 + sigma / self.ell;
        let sech = 1.0 / t.cosh();
        [1.0 - 2.0 * sech * sech, -2.0 * sech * t.tanh()]
    }

    /// Arclength from the start down to height `y ∈ (0, y0]`.
    pub fn arclength_to(&self, y: f64) -> f64 {
        self.ell * ((2.0 * self.ell / y).acosh() - self.t0)
    }

    /// Abscissa where the profile passes height `y ∈ (0, y0]`.
    pub fn x_at_height(&self, y: f64) -> f64 {
        self.point(self.arclength_to(y))[0]
    }
}

/// A decaying graph solution sampled at uniform arclength.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LYProfile {
    pub y0: f64,
    pub a_lg: f64,
    pub c: f64,
    /// Arclength of every sample.
    pub sigma: Vec<f64>,
    /// `(x, y)` samples with `x ∈ [0, x_max]`.
    pub samples: Vec<Point>,
    pub x_max: f64,
    /// Linearized decay rate `√(C/A)`.
    pub tail_rate: f64,
    /// Abscissa beyond which `y ≤ y0 e^{−tail_rate·x/2}` holds at every sample.
    pub decay_from: f64,
}

/// `(dx/dσ, dy/dσ)` from the first integral.
fn first_integral_field(a_lg: f64, c: f64) -> impl Fn(f64, &[f64; 2]) -> [f64; 2] {
    move |_, s| {
        let (co, si) = inclination(s[1].max(0.0), a_lg, c);
        [co, -si]
    }
}

/// Integrate a decaying profile from height `y0 ≤ y*` with arclength step
/// `step·√(A/C)` until `y ≤ 1e-10·y0`.
pub fn solve_graph_with_step(y0: f64, a_lg: f64, c: f64, step: f64) -> Result<LYProfile> {
    let y_star = critical_height(a_lg, c)?;
    if y0 < 0.0 || !y0.is_finite() {
        return Err(Error::NegativeHeight(y0));
    }
    if y0 > y_star * (1.0 + 1e-12) {
        return Err(Error::AboveCriticalHeight { height: y0, y_star });
    }
    let y0 = y0.min(y_star);
    let ell = capillary_length(a_lg, c);
    let tail_rate = 1.0 / ell;
    if y0 == 0.0 {
        return Ok(LYProfile {
            y0,
            a_lg,
            c,
            sigma: vec![0.0, ell],
            samples: vec![[0.0, 0.0], [ell, 0.0]],
            x_max: ell,
            tail_rate,
            decay_from: 0.0,
        });
    }
    let h = step * ell;
    let f = first_integral_field(a_lg, c);
    let opts = Dp45Options {
        max_step: h,
        ..Dp45Options::default()
    };
    let mut sigma = vec![0.0];
    let mut samples = vec![[0.0, y0]];
    let mut state = [0.0, y0];
    let mut k = 0usize;
    // keep an even number of intervals for Simpson's rule
    while state[1] > TRUNCATION * y0 || k % 2 == 1 {
        let (next, err) = dp45_step(&f, k as f64 * h, &state, h);
        let sc = opts.atol + opts.rtol * state[1].abs().max(1.0);
        state = if err.iter().all(|e| e.abs() <= sc) {
            next
        } else {
            integrate(&f, k as f64 * h, state, (k + 1) as f64 * h, &opts)?
        };
        k += 1;
        sigma.push(k as f64 * h);
        samples.push(state);
        if k > 100_000_000 {
            return Err(Error::NoConvergence {
                method: "profile integration",
                iterations: k,
                residual: state[1],
            });
        }
    }
    let x_max = samples[samples.len() - 1][0];
    let decay_from = decay_onset(&samples, y0, tail_rate);
    Ok(LYProfile {
        y0,
        a_lg,
        c,
        sigma,
        samples,
        x_max,
        tail_rate,
        decay_from,
    })
}

/// Decaying graph solution from `(0, y0)` for `0 ≤ y0 ≤ y*`.
pub fn solve_graph(y0: f64, a_lg: f64, c: f64) -> Result<LYProfile> {
    solve_graph_with_step(y0, a_lg, c, DEFAULT_STEP)
}

fn decay_onset(samples: &[Point], y0: f64, rate: f64) -> f64 {
    let mut onset = 0.0;
    for p in samples.iter().rev() {
        if p[1] > y0 * (-rate * p[0] / 2.0).exp() {
            onset = p[0];
            break;
        }
    }
    onset
}

/// Five-point first and second derivatives at interior index `i` of a
/// uniformly spaced sequence.
fn stencil(v: &[f64], i: usize, h: f64) -> (f64, f64) {
    let (m2, m1, c0, p1, p2) = (v[i - 2], v[i - 1], v[i], v[i + 1], v[i + 2]);
    let d1 = (m2 - 8.0 * m1 + 8.0 * p1 - p2) / (12.0 * h);
    let d2 = (-m2 + 16.0 * m1 - 30.0 * c0 + 16.0 * p1 - p2) / (12.0 * h * h);
    (d1, d2)
}

impl LYProfile {
    pub fn y_star(&self) -> f64 {
        (2.0 * self.a_lg / self.c).sqrt()
    }

    fn step(&self) -> f64 {
        self.sigma[1] - self.sigma[0]
    }

    fn coords(&self) -> (Vec<f64>, Vec<f64>) {
        (
            self.samples.iter().map(|p| p[0]).collect(),
            self.samples.iter().map(|p| p[1]).collect(),
        )
    }

    /// `sup |A(1 − (1+y'²)^{−1/2}) − C y²/2|` with `y'` from centered differences.
    pub fn first_integral_residual(&self) -> f64 {
        if self.samples.len() < 5 {
            return 0.0;
        }
        let (x, y) = self.coords();
        let h = self.step();
        (2..x.len() - 2)
            .map(|i| {
                let (dx, _) = stencil(&x, i, h);
                let (dy, _) = stencil(&y, i, h);
                let cos = dx / dx.hypot(dy);
                (self.a_lg * (1.0 - cos) - self.c * y[i] * y[i] / 2.0).abs()
            })
            .fold(0.0, f64::max)
    }

    /// `sup |A κ − C y|`: the Laplace–Young equation in curvature form, with
    /// curvature from centered differences in arclength.
    pub fn ode_residual(&self) -> f64 {
        if self.samples.len() < 5 {
            return 0.0;
        }
        let (x, y) = self.coords();
        let h = self.step();
        (2..x.len() - 2)
            .map(|i| {
                let (dx, ddx) = stencil(&x, i, h);
                let (dy, ddy) = stencil(&y, i, h);
                let kappa = (dx * ddy - dy * ddx) / dx.hypot(dy).powi(3);
                (self.a_lg * kappa - self.c * y[i]).abs()
            })
            .fold(0.0, f64::max)
    }

    fn integrand(&self, y: f64) -> f64 {
        let (co, _) = inclination(y, self.a_lg, self.c);
        self.a_lg * (1.0 - co) + self.c * y * y / 2.0 * co
    }

    /// `∫ A(√(1+y'²) − 1) + C y²/2 dx` by composite Simpson in arclength.
    pub fn energy(&self) -> f64 {
        self.energy_from_index(0)
    }

    fn energy_from_index(&self, j: usize) -> f64 {
        let n = self.samples.len() - 1;
        if n < 2 || j >= n {
            return 0.0;
        }
        debug_assert!((n - j) % 2 == 0);
        let h = self.step();
        let f: Vec<f64> = self.samples[j..].iter().map(|p| self.integrand(p[1])).collect();
        let m = f.len() - 1;
        let mut acc = f[0] + f[m];
        for (i, v) in f.iter().enumerate().take(m).skip(1) {
            acc += if i % 2 == 1 { 4.0 * v } else { 2.0 * v };
        }
        acc * h / 3.0
    }

    /// Analytic bound on the energy of the truncated tail.
    pub fn tail_bound(&self) -> f64 {
        let y_end = self.samples[self.samples.len() - 1][1];
        psi(y_end, self.a_lg, self.c)
    }

    /// Hermite state `(x, y)` at arclength `σ` inside the sampled range.
    fn hermite(&self, sigma: f64) -> Point {
        let h = self.step();
        let n = self.samples.len() - 1;
        let k = ((sigma / h).floor() as usize).min(n - 1);
        let (a, b) = (self.samples[k], self.samples[k + 1]);
        let (ca, sa) = inclination(a[1], self.a_lg, self.c);
        let (cb, sb) = inclination(b[1], self.a_lg, self.c);
        let da = [ca, -sa];
        let db = [cb, -sb];
        let t = (sigma - self.sigma[k]) / h;
        let (t2, t3) = (t * t, t * t * t);
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        [
            h00 * a[0] + h10 * h * da[0] + h01 * b[0] + h11 * h * db[0],
            h00 * a[1] + h10 * h * da[1] + h01 * b[1] + h11 * h * db[1],
        ]
    }

    /// Arclength at which the profile passes height `rho` (bisection on the
    /// Hermite interpolant).
    pub fn arclength_at_height(&self, rho: f64) -> Result<f64> {
        let n = self.samples.len() - 1;
        if !(rho > self.samples[n][1] && rho <= self.y0) {
            return Err(Error::InvalidParameter(format!(
                "height {rho} outside the sampled range"
            )));
        }
        let k = self.samples.iter().position(|p| p[1] <= rho).unwrap_or(n).max(1) - 1;
        let (mut lo, mut hi) = (self.sigma[k], self.sigma[k + 1]);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid == lo || mid == hi {
                break;
            }
            if self.hermite(mid)[1] > rho {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    /// `∫_{Y^{-1}(rho)}^∞ E(Y, Y') dx` along this profile.
    pub fn energy_below_height(&self, rho: f64) -> Result<f64> {
        let s_star = self.arclength_at_height(rho)?;
        let n = self.samples.len() - 1;
        let h = self.step();
        let k = ((s_star / h).floor() as usize).min(n - 1);
        let mut j0 = k + 1;
        if (n - j0) % 2 == 1 {
            j0 += 1;
        }
        let j0 = j0.min(n);
        // five-point Gauss–Legendre on each Hermite piece up to the Simpson block
        const GL: [(f64, f64); 5] = [
            (0.0, 0.568_888_888_888_888_9),
            (-0.538_469_310_105_683_1, 0.478_628_670_499_366_5),
            (0.538_469_310_105_683_1, 0.478_628_670_499_366_5),
            (-0.906_179_845_938_664, 0.236_926_885_056_189_1),
            (0.906_179_845_938_664, 0.236_926_885_056_189_1),
        ];
        let mut head = 0.0;
        let mut a = s_star;
        for idx in k + 1..=j0 {
            let b = self.sigma[idx];
            if b > a {
                let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
                for (z, w) in GL {
                    let y = self.hermite(mid + half * z)[1];
                    head += w * half * self.integrand(y);
                }
            }
            a = b;
        }
        Ok(head + self.energy_from_index(j0))
    }

    /// `y(x)` by cubic Hermite interpolation in `x` (valid where `cos θ > 0`).
    pub fn y_at(&self, x: f64) -> f64 {
        let n = self.samples.len() - 1;
        if x <= 0.0 {
            return self.y0;
        }
        if x >= self.x_max {
            return self.samples[n][1];
        }
        let k = self.samples.partition_point(|p| p[0] <= x).clamp(1, n) - 1;
        let (a, b) = (self.samples[k], self.samples[k + 1]);
        let slope = |y: f64| {
            let (co, si) = inclination(y, self.a_lg, self.c);
            -si / co
        };
        let h = b[0] - a[0];
        let t = (x - a[0]) / h;
        let (t2, t3) = (t * t, t * t * t);
        (2.0 * t3 - 3.0 * t2 + 1.0) * a[1]
            + (t3 - 2.0 * t2 + t) * h * slope(a[1])
            + (-2.0 * t3 + 3.0 * t2) * b[1]
            + (t3 - t2) * h * slope(b[1])
    }

    /// The profile translated to start at `(x_start, y0)`, parametrized
    /// proportionally to arclength.
    pub fn to_param_curve(&self, x_start: f64) -> Result<ParamCurve> {
        let total = self.sigma[self.sigma.len() - 1];
        let mut s: Vec<f64> = self.sigma.iter().map(|v| v / total).collect();
        let n = s.len();
        s[n - 1] = 1.0;
        ParamCurve::new(
            s,
            self.samples.iter().map(|p| [p[0] + x_start, p[1]]).collect(),
        )
    }
}

/// `φ±(x0, y0)` by quadrature along [`solve_graph`].
pub fn phi(side: Side, x0: f64, y0: f64, a_lg: f64, c: f64) -> Result<f64> {
    let prof = solve_graph(y0, a_lg, c)?;
    Ok(prof.energy() + side.linear_sign() * a_lg * x0)
}

/// Result of shooting on the raw second-order equation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShootingSolution {
    pub slope: f64,
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
}

fn raw_field(a_lg: f64, c: f64) -> impl Fn(f64, &[f64; 2]) -> [f64; 2] {
    move |_, s| {
        let q = 1.0 + s[1] * s[1];
        [s[1], c / a_lg * s[0] * q * q.sqrt()]
    }
}

/// Outcome of one shot: `-1` dives below zero, `+1` turns back up, `0` neither.
fn classify(p: f64, y0: f64, a_lg: f64, c: f64, x_end: f64, dx: f64) -> Result<(i8, Vec<[f64; 2]>)> {
    let f = raw_field(a_lg, c);
    let opts = Dp45Options {
        max_step: dx,
        ..Dp45Options::default()
    };
    let mut state = [y0, p];
    let mut traj = vec![state];
    let steps = (x_end / dx).ceil() as usize;
    for k in 0..steps {
        state = integrate(&f, k as f64 * dx, state, (k + 1) as f64 * dx, &opts)?;
        traj.push(state);
        if state[0] < 0.0 {
            return Ok((-1, traj));
        }
        if state[1] > 0.0 {
            return Ok((1, traj));
        }
    }
    Ok((0, traj))
}

/// Shoot on `A y''/(1+y'²)^{3/2} = C y` from `y(0) = y0`, bisecting `y'(0)`
/// between diving and rebounding trajectories. The returned samples on the
/// grid `k·dx` stop where the two bracketing trajectories separate by more
/// than `1e-11`.
pub fn shoot_graph(y0: f64, a_lg: f64, c: f64, dx: f64) -> Result<ShootingSolution> {
    let y_star = critical_height(a_lg, c)?;
    if !(y0 > 0.0 && y0 < y_star) {
        return Err(Error::InvalidParameter(format!(
            "shooting needs 0 < y0 < y*, got {y0}"
        )));
    }
    let x_end = 40.0 * capillary_length(a_lg, c);
    let mut lo = -1.0;
    let mut hi = 0.0;
    while classify(lo, y0, a_lg, c, x_end, dx)?.0 >= 0 {
        lo *= 2.0;
        if lo < -1e12 {
            return Err(Error::NoConvergence {
                method: "shooting bracket",
                iterations: 40,
                residual: lo,
            });
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        match classify(mid, y0, a_lg, c, x_end, dx)?.0 {
            -1 => lo = mid,
            1 => hi = mid,
            _ => {
                lo = mid;
                hi = mid;
                break;
            }
        }
    }
    let (_, t_lo) = classify(lo, y0, a_lg, c, x_end, dx)?;
    let (_, t_hi) = classify(hi, y0, a_lg, c, x_end, dx)?;
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (k, (a, b)) in t_lo.iter().zip(&t_hi).enumerate() {
        if (a[0] - b[0]).abs() > 1e-11 || a[0] < 0.0 || b[0] < 0.0 {
            break;
        }
        xs.push(k as f64 * dx);
        ys.push(0.5 * (a[0] + b[0]));
    }
    Ok(ShootingSolution {
        slope: 0.5 * (lo + hi),
        xs,
        ys,
    })
}

/// `φ` tabulated on Chebyshev-spaced heights in `[0, 0.999 y*]` with exact
/// derivatives, interpolated by cubic Hermite pieces.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhiTable {
    pub a_lg: f64,
    pub c: f64,
    pub grid: Vec<f64>,
    pub vals_plus: Vec<f64>,
    pub vals_minus: Vec<f64>,
    pub derivs: Vec<f64>,
}

pub const PHI_TABLE_POINTS: usize = 256;

impl PhiTable {
    /// Values from the closed form `ψ`; see [`PhiTable::by_quadrature`] for the
    /// profile-integrated variant.
    pub fn build(a_lg: f64, c: f64) -> Result<Self> {
        Self::with_values(a_lg, c, PHI_TABLE_POINTS, |y| Ok(psi(y, a_lg, c)))
    }

    /// Values from [`phi`] quadrature at `n` nodes.
    pub fn by_quadrature(a_lg: f64, c: f64, n: usize) -> Result<Self> {
        Self::with_values(a_lg, c, n, |y| phi(Side::Plus, 0.0, y, a_lg, c))
    }

    fn with_values(a_lg: f64, c: f64, n: usize, f: impl Fn(f64) -> Result<f64>) -> Result<Self> {
        let top = 0.999 * critical_height(a_lg, c)?;
        if n < 2 {
            return Err(Error::InvalidParameter("table needs at least two nodes".into()));
        }
        let grid: Vec<f64> = (0..n)
            .map(|k| {
                let th = std::f64::consts::PI * (n - 1 - k) as f64 / (n - 1) as f64;
                0.5 * top * (1.0 + th.cos())
            })
            .collect();
        let vals: Vec<f64> = grid.iter().map(|&y| f(y)).collect::<Result<_>>()?;
        let derivs = grid.iter().map(|&y| psi_derivative(y, a_lg, c)).collect();
        Ok(Self {
            a_lg,
            c,
            grid,
            vals_plus: vals.clone(),
            vals_minus: vals,
            derivs,
        })
    }

    /// Interpolated `φ±(x0, y0)` for `y0` within the table.
    pub fn eval(&self, side: Side, x0: f64, y0: f64) -> Result<f64> {
        let n = self.grid.len();
        if y0 < 0.0 || y0 > self.grid[n - 1] {
            return Err(Error::InvalidParameter(format!("height {y0} outside the table")));
        }
        let k = self.grid.partition_point(|g| *g <= y0).clamp(1, n - 1) - 1;
        let vals = match side {
            Side::Plus => &self.vals_plus,
            Side::Minus => &self.vals_minus,
        };
        let h = self.grid[k + 1] - self.grid[k];
        let t = (y0 - self.grid[k]) / h;
        let (t2, t3) = (t * t, t * t * t);
        let v = (2.0 * t3 - 3.0 * t2 + 1.0) * vals[k]
            + (t3 - 2.0 * t2 + t) * h * self.derivs[k]
            + (-2.0 * t3 + 3.0 * t2) * vals[k + 1]
            + (t3 - t2) * h * self.derivs[k + 1];
        Ok(v + side.linear_sign() * self.a_lg * x0)
    }
}

/// Decaying meniscus from `(x_start, y_start)` as a parametrized curve.
///
/// Up to `y*` this is the graph solution; above it, a vertical drop of length
/// `y_start − y*` precedes the graph solution from `y*`.
pub fn solve_parametric(x_start: f64, y_start: f64, a_lg: f64, c: f64) -> Result<ParamCurve> {
    let y_star = critical_height(a_lg, c)?;
    if y_start < 0.0 || !y_start.is_finite() {
        return Err(Error::NegativeHeight(y_start));
    }
    if y_start == 0.0 {
        let ell = capillary_length(a_lg, c);
        return ParamCurve::uniform(vec![[x_start, 0.0], [x_start + 40.0 * ell, 0.0]]);
    }
    if y_start <= y_star {
        return solve_graph(y_start, a_lg, c)?.to_param_curve(x_start);
    }
    let prof = solve_graph(y_star, a_lg, c)?;
    let h = prof.step();
    let drop = y_start - y_star;
    let m = ((drop / h).ceil() as usize).max(1);
    let mut pts: Vec<Point> = (0..m)
        .map(|i| [x_start, y_start - drop * i as f64 / m as f64])
        .collect();
    pts.extend(prof.samples.iter().map(|p| [p[0] + x_start, p[1]]));
    ParamCurve::by_chord_length(pts)
}

/// Objective of the meniscus problem for a polyline heading in direction
/// `dir = ±1` along the x axis: `Σ C/2·|Δx|·(y_a² + y_a y_b + y_b²)/3 + A(|Δp| − dir·Δx)`.
pub fn parametric_objective_toward(pts: &[Point], a_lg: f64, c: f64, dir: f64) -> f64 {
    pts.windows(2)
        .map(|w| {
            let (p, q) = (w[0], w[1]);
            let dx = q[0] - p[0];
            let grav = c / 2.0 * dx.abs() * (p[1] * p[1] + p[1] * q[1] + q[1] * q[1]) / 3.0;
            grav + a_lg * (dist(p, q) - dir * dx)
        })
        .sum()
}

/// [`parametric_objective_toward`] for a meniscus heading to `x → +∞`.
pub fn parametric_objective(pts: &[Point], a_lg: f64, c: f64) -> f64 {
    parametric_objective_toward(pts, a_lg, c, 1.0)
}

/// Length of a polyline.
pub fn polyline_length(pts: &[Point]) -> f64 {
    cumulative_length(pts).last().copied().unwrap_or(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::{hausdorff, monotone_rearrange, resample_arclength};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn critical_height_examples() {
        assert!((critical_height(1.0, 1.0).unwrap() - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(critical_height(2.0, 1.0).unwrap(), 2.0);
        assert!((critical_height(3.0, 3.0).unwrap() - critical_height(1.0, 1.0).unwrap()).abs() < 1e-15);
        assert!(critical_height(0.0, 1.0).is_err());
        assert!(critical_height(1.0, -1.0).is_err());
        // vertical tangent: cos θ = 0 at y*
        let (co, si) = inclination(2f64.sqrt(), 1.0, 1.0);
        assert!(co.abs() < 1e-15 && (si - 1.0).abs() < 1e-15);
    }

    #[test]
    fn exact_profile_matches_first_integral() {
        let e = ExactProfile::new(0.3, 0.7, 1.3, 0.8).unwrap();
        assert!(dist(e.point(0.0), [0.3, 0.7]) < 1e-15);
        for k in 0..50 {
            let s = 0.1 * k as f64;
            let p = e.point(s);
            let t = e.tangent(s);
            let (co, si) = inclination(p[1], 1.3, 0.8);
            assert!((t[0] - co).abs() < 1e-13 && (t[1] + si).abs() < 1e-13);
            let d = 1e-6;
            let fd = crate::curve::scale(crate::curve::sub(e.point(s + d), e.point(s - d)), 0.5 / d);
            assert!(dist(fd, t) < 1e-8);
        }
        assert!((e.arclength_to(e.point(2.0)[1]) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn ode_residuals_and_truncation() {
        for &y0 in &[0.1, 0.5, 1.0, 1.3, 2f64.sqrt()] {
            let p = solve_graph(y0, 1.0, 1.0).unwrap();
            assert!(p.first_integral_residual() <= 1e-8, "{y0}: {}", p.first_integral_residual());
            assert!(p.ode_residual() <= 1e-8, "{y0}: {}", p.ode_residual());
            let last = p.samples[p.samples.len() - 1];
            assert!(last[1] <= 1e-10 * y0);
            assert!(p.samples.windows(2).all(|w| w[1][1] < w[0][1]));
            assert!(p.samples[..p.samples.len() - 1].iter().all(|q| q[1] > 0.0));
            assert!(p.decay_from < p.x_max);
        }
    }

    #[test]
    fn ode_matches_closed_form() {
        let p = solve_graph(0.9, 1.0, 2.0).unwrap();
        let e = ExactProfile::new(0.0, 0.9, 1.0, 2.0).unwrap();
        for (s, q) in p.sigma.iter().zip(&p.samples).step_by(97) {
            assert!(dist(e.point(*s), *q) < 1e-10);
        }
    }

    #[test]
    fn graph_errors() {
        assert!(matches!(solve_graph(1.5, 1.0, 1.0), Err(Error::AboveCriticalHeight { .. })));
        assert!(matches!(solve_graph(-0.1, 1.0, 1.0), Err(Error::NegativeHeight(_))));
        let z = solve_graph(0.0, 1.0, 1.0).unwrap();
        assert!(z.samples.iter().all(|p| p[1] == 0.0));
    }

    #[test]
    fn vertical_start_at_critical_height() {
        let p = solve_graph(2f64.sqrt(), 1.0, 1.0).unwrap();
        let (a, b) = (p.samples[0], p.samples[1]);
        let slope = (b[1] - a[1]) / (b[0] - a[0]);
        assert!(slope.abs() > 1e3);
        let fine = solve_graph_with_step(2f64.sqrt(), 1.0, 1.0, 1e-4).unwrap();
        let (a, b) = (fine.samples[0], fine.samples[1]);
        assert!(((b[1] - a[1]) / (b[0] - a[0])).abs() > slope.abs());
    }

    #[test]
    fn small_height_is_exponential() {
        let p = solve_graph(0.1, 1.0, 1.0).unwrap();
        for k in 0..=30 {
            let x = 0.1 * k as f64;
            let y = p.y_at(x);
            assert!((y / (0.1 * (-x).exp()) - 1.0).abs() < 0.02, "{x} {y}");
        }
    }

    #[test]
    fn shooting_agrees_with_quadrature() {
        for &y0 in &[0.2, 0.6, 1.0] {
            let p = solve_graph(y0, 1.0, 1.0).unwrap();
            let s = shoot_graph(y0, 1.0, 1.0, 0.01).unwrap();
            assert!(s.xs.len() > 500, "{}", s.xs.len());
            let err = s.xs.iter().zip(&s.ys).map(|(x, y)| (p.y_at(*x) - y).abs()).fold(0.0, f64::max);
            assert!(err <= 1e-7, "{y0}: {err}");
        }
    }

    #[test]
    fn phi_linear_law_and_small_heights() {
        for &x0 in &[-1.0, 0.0, 2.5] {
            assert!((phi(Side::Minus, x0, 0.0, 1.0, 1.0).unwrap() - x0).abs() < 1e-15);
            assert!((phi(Side::Plus, x0, 0.0, 1.0, 1.0).unwrap() + x0).abs() < 1e-15);
        }
        let y0 = 0.01;
        let v = phi(Side::Plus, 0.0, y0, 1.0, 1.0).unwrap();
        assert!((v / (y0 * y0 / 2.0) - 1.0).abs() < 1e-3);
        assert!((phi(Side::Plus, 0.0, 0.01, 2.0, 0.5).unwrap() / (y0 * y0 / 2.0) - 1.0).abs() < 1e-3);
    }

    #[test]
    fn phi_quadrature_matches_closed_form() {
        for &y0 in &[0.05, 0.4, 1.0, 1.41] {
            let q = phi(Side::Plus, 0.0, y0, 1.0, 1.0).unwrap();
            assert!((q - psi(y0, 1.0, 1.0)).abs() < 1e-10);
        }
    }

    #[test]
    fn translation_identity() {
        let master = solve_graph(2f64.sqrt(), 1.0, 1.0).unwrap();
        for &rho in &[0.2, 0.5] {
            let lhs = phi(Side::Plus, 0.0, rho, 1.0, 1.0).unwrap();
            let rhs = master.energy_below_height(rho).unwrap();
            assert!((lhs - rhs).abs() <= 1e-6, "{rho}: {lhs} vs {rhs}");
        }
    }

    #[test]
    fn phi_derivative_matches_differences() {
        let ys = 2f64.sqrt();
        for k in 1..=9 {
            let y = 0.1 * k as f64 * ys;
            let d = 1e-4 * ys;
            let fd = (phi(Side::Plus, 0.0, y + d, 1.0, 1.0).unwrap() - phi(Side::Plus, 0.0, y - d, 1.0, 1.0).unwrap()) / (2.0 * d);
            let an = psi_derivative(y, 1.0, 1.0);
            assert!((fd - an).abs() <= 1e-5 * an.abs(), "{y}: {fd} vs {an}");
            assert!(an > 0.0);
        }
    }

    #[test]
    fn wedge_competitor_bound() {
        for &y0 in &[0.1, 0.7, 1.4] {
            let wedge = (2f64.sqrt() - 1.0) * y0 + y0.powi(3) / 6.0;
            assert!(psi(y0, 1.0, 1.0) <= wedge);
        }
    }

    #[test]
    fn phi_table_interpolates() {
        let t = PhiTable::build(1.0, 1.0).unwrap();
        assert_eq!(t.grid.len(), 256);
        assert!(t.vals_plus.windows(2).all(|w| w[1] > w[0]));
        for k in 0..100 {
            let y = 1.4 * k as f64 / 100.0;
            let v = t.eval(Side::Minus, 0.7, y).unwrap();
            assert!((v - phi_closed(Side::Minus, 0.7, y, 1.0, 1.0)).abs() < 1e-10);
        }
        assert!(t.eval(Side::Plus, 0.0, 1.414).is_err());
        let q = PhiTable::by_quadrature(1.0, 1.0, 6).unwrap();
        for (a, b) in q.vals_plus.iter().zip(PhiTable::with_values(1.0, 1.0, 6, |y| Ok(psi(y, 1.0, 1.0))).unwrap().vals_plus) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn parametric_cases() {
        let zero = solve_parametric(1.0, 0.0, 1.0, 1.0).unwrap();
        assert!(zero.points().iter().all(|p| p[1] == 0.0));

        let ys = 2f64.sqrt();
        let high = solve_parametric(0.0, 1.5 * ys, 1.0, 1.0).unwrap();
        let pts = high.points();
        let k = pts.iter().position(|p| p[1] <= ys + 1e-15).unwrap();
        assert!(pts[..=k].iter().all(|p| p[0] == 0.0));
        assert!((pts[0][1] - pts[k][1] - 0.5 * ys).abs() < 1e-12);
        // C¹ junction: the graph leaves y* vertically
        let t = crate::curve::sub(pts[k + 1], pts[k]);
        assert!(t[0].abs() / norm2(t) < 1e-2);

        let low = solve_parametric(0.0, 0.3, 1.0, 1.0).unwrap();
        let g = solve_graph(0.3, 1.0, 1.0).unwrap().to_param_curve(0.0).unwrap();
        let a = resample_arclength(&low, 500).unwrap();
        let b = resample_arclength(&g, 500).unwrap();
        assert!(hausdorff(a.points(), b.points()) < 1e-9);
    }

    fn norm2(p: Point) -> f64 {
        p[0].hypot(p[1])
    }

    #[test]
    fn mirror_reflection_preserves_objective() {
        let c = solve_parametric(0.0, 0.8, 1.0, 1.0).unwrap();
        let right = parametric_objective(c.points(), 1.0, 1.0);
        let mirrored: Vec<Point> = c.points().iter().map(|p| [2.0 * 0.0 - p[0], p[1]]).collect();
        let left = parametric_objective_toward(&mirrored, 1.0, 1.0, -1.0);
        assert!((right - left).abs() < 1e-14);
        // and it reproduces φ(0, y0) up to the polyline quadrature
        assert!((right - psi(0.8, 1.0, 1.0)).abs() < 1e-5);
    }

    #[test]
    fn parametric_beats_rearranged_competitors() {
        let y0 = 0.8;
        let c = solve_parametric(0.0, y0, 1.0, 1.0).unwrap();
        let best = parametric_objective(c.points(), 1.0, 1.0);
        let x_end = c.end()[0];
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        for _ in 0..50 {
            let m = rng.gen_range(3..12);
            let mut pts = vec![[0.0, y0]];
            for _ in 0..m {
                pts.push([rng.gen_range(-0.5..4.0), rng.gen_range(-0.2..1.2)]);
            }
            pts.push([x_end, 0.0]);
            let comp = ParamCurve::by_chord_length(pts).unwrap();
            let r = monotone_rearrange(&comp).unwrap();
            assert!(best <= parametric_objective(r.points(), 1.0, 1.0) + 1e-9);
        }
    }

    proptest! {
        #[test]
        fn psi_is_increasing(a in 0.1f64..5.0, c in 0.1f64..5.0, u in 0.0f64..0.99, v in 0.0f64..0.99) {
            let ys = critical_height(a, c).unwrap();
            let (lo, hi) = if u < v { (u, v) } else { (v, u) };
            prop_assume!(hi - lo > 1e-6);
            prop_assert!(psi(lo * ys, a, c) < psi(hi * ys, a, c));
        }
    }
}
