//! Discretized plane curves `s ↦ (x(s), y(s))` on `[0, 1]` and the curve
//! transforms used by the recovery-sequence construction: reparametrization,
//! mollification, isometrization and monotone rearrangement.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Point = [f64; 2];

#[inline]
pub(crate) fn sub(a: Point, b: Point) -> Point {
    [a[0] - b[0], a[1] - b[1]]
}

#[inline]
pub(crate) fn add(a: Point, b: Point) -> Point {
    [a[0] + b[0], a[1] + b[1]]
}

#[inline]
pub(crate) fn scale(a: Point, k: f64) -> Point {
    [a[0] * k, a[1] * k]
}

#[inline]
pub(crate) fn norm(a: Point) -> f64 {
    a[0].hypot(a[1])
}

#[inline]
pub(crate) fn cross(a: Point, b: Point) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

#[inline]
pub(crate) fn dist(a: Point, b: Point) -> f64 {
    norm(sub(a, b))
}

#[inline]
pub(crate) fn lerp(a: Point, b: Point, t: f64) -> Point {
    [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]
}

/// Distance from `p` to the segment `[a, b]`.
pub(crate) fn point_segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let ab = sub(b, a);
    let len2 = ab[0] * ab[0] + ab[1] * ab[1];
    if len2 == 0.0 {
        return dist(p, a);
    }
    let t = (((p[0] - a[0]) * ab[0] + (p[1] - a[1]) * ab[1]) / len2).clamp(0.0, 1.0);
    dist(p, lerp(a, b, t))
}

/// Distance from `p` to a polyline.
pub fn point_polyline_distance(p: Point, pts: &[Point]) -> f64 {
    if pts.len() == 1 {
        return dist(p, pts[0]);
    }
    pts.windows(2)
        .map(|w| point_segment_distance(p, w[0], w[1]))
        .fold(f64::INFINITY, f64::min)
}

/// Symmetric Hausdorff distance between two polylines (vertex to polyline).
pub fn hausdorff(a: &[Point], b: &[Point]) -> f64 {
    let ab = a
        .iter()
        .map(|&p| point_polyline_distance(p, b))
        .fold(0.0, f64::max);
    let ba = b
        .iter()
        .map(|&p| point_polyline_distance(p, a))
        .fold(0.0, f64::max);
    ab.max(ba)
}

/// A piecewise-affine parametrized plane curve on `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamCurve {
    s: Vec<f64>,
    pts: Vec<Point>,
}

/// Summary statistics of a [`ParamCurve`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurveStats {
    pub length: f64,
    pub max_speed: f64,
    pub min_speed: f64,
    /// `max |v_i − 1|` over segments.
    pub sup_strain: f64,
}

impl ParamCurve {
    /// Build a curve; `s` must start at 0, end at 1 and increase strictly.
    pub fn new(s: Vec<f64>, pts: Vec<Point>) -> Result<Self> {
        if s.len() != pts.len() {
            return Err(Error::InvalidCurve(format!(
                "{} parameters for {} points",
                s.len(),
                pts.len()
            )));
        }
        if s.len() < 2 {
            return Err(Error::InvalidCurve("need at least two nodes".into()));
        }
        if s[0] != 0.0 || s[s.len() - 1] != 1.0 {
            return Err(Error::InvalidCurve(format!(
                "parameter must span [0, 1], got [{}, {}]",
                s[0],
                s[s.len() - 1]
            )));
        }
        if let Some(i) = s.windows(2).position(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidCurve(format!(
                "parameter not strictly increasing at index {}",
                i + 1
            )));
        }
        if pts.iter().any(|p| !p[0].is_finite() || !p[1].is_finite()) {
            return Err(Error::InvalidCurve("non-finite point".into()));
        }
        Ok(Self { s, pts })
    }

    /// Nodes at uniform parameter spacing.
    pub fn uniform(pts: Vec<Point>) -> Result<Self> {
        let n = pts.len();
        if n < 2 {
            return Err(Error::InvalidCurve("need at least two nodes".into()));
        }
        let mut s: Vec<f64> = (0..n).map(|i| i as f64 / (n - 1) as f64).collect();
        s[n - 1] = 1.0;
        Self::new(s, pts)
    }

    /// Parameter proportional to cumulative chord length (unit-speed up to scale).
    pub fn by_chord_length(pts: Vec<Point>) -> Result<Self> {
        let cum = cumulative_length(&pts);
        let total = *cum.last().unwrap_or(&0.0);
        if !(total > 0.0) {
            return Err(Error::InvalidCurve("zero-length curve".into()));
        }
        let mut s: Vec<f64> = cum.iter().map(|c| c / total).collect();
        let n = s.len();
        s[n - 1] = 1.0;
        Self::new(s, pts)
    }

    pub fn s(&self) -> &[f64] {
        &self.s
    }

    pub fn points(&self) -> &[Point] {
        &self.pts
    }

    pub fn len(&self) -> usize {
        self.pts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pts.is_empty()
    }

    pub fn start(&self) -> Point {
        self.pts[0]
    }

    pub fn end(&self) -> Point {
        self.pts[self.pts.len() - 1]
    }

    pub fn segment_lengths(&self) -> Vec<f64> {
        self.pts.windows(2).map(|w| dist(w[0], w[1])).collect()
    }

    /// Discrete speeds `|p_{i+1} − p_i| / (s_{i+1} − s_i)`.
    pub fn speeds(&self) -> Vec<f64> {
        self.pts
            .windows(2)
            .zip(self.s.windows(2))
            .map(|(p, s)| dist(p[0], p[1]) / (s[1] - s[0]))
            .collect()
    }

    pub fn length(&self) -> f64 {
        self.segment_lengths().iter().sum()
    }

    pub fn stats(&self) -> CurveStats {
        let v = self.speeds();
        CurveStats {
            length: self.length(),
            max_speed: v.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
            min_speed: v.iter().cloned().fold(f64::INFINITY, f64::min),
            sup_strain: v.iter().map(|v| (v - 1.0).abs()).fold(0.0, f64::max),
        }
    }

    /// Index `i` of the segment `[s_i, s_{i+1}]` containing `t` (clamped).
    pub fn segment_index(&self, t: f64) -> usize {
        let n = self.s.len();
        match self.s.binary_search_by(|v| v.partial_cmp(&t).unwrap()) {
            Ok(i) => i.min(n - 2),
            Err(0) => 0,
            Err(i) => (i - 1).min(n - 2),
        }
    }

    /// Linear interpolation at parameter `t`, clamped to `[0, 1]`.
    pub fn eval(&self, t: f64) -> Point {
        let t = t.clamp(0.0, 1.0);
        let i = self.segment_index(t);
        let (a, b) = (self.s[i], self.s[i + 1]);
        lerp(self.pts[i], self.pts[i + 1], (t - a) / (b - a))
    }

    /// Evaluation of the odd extension through the endpoints, defined on `[-1, 2]`.
    pub fn eval_odd_extension(&self, t: f64) -> Point {
        if t < 0.0 {
            let p0 = self.start();
            sub(scale(p0, 2.0), self.eval(-t))
        } else if t > 1.0 {
            let p1 = self.end();
            sub(scale(p1, 2.0), self.eval(2.0 - t))
        } else {
            self.eval(t)
        }
    }

    /// Piecewise-constant derivative on the segment containing `t`.
    pub fn derivative_at(&self, t: f64) -> Point {
        let i = self.segment_index(t.clamp(0.0, 1.0));
        scale(sub(self.pts[i + 1], self.pts[i]), 1.0 / (self.s[i + 1] - self.s[i]))
    }

    /// Map every point through `f`, keeping the parametrization.
    pub fn map_points(&self, f: impl Fn(Point) -> Point) -> Self {
        Self {
            s: self.s.clone(),
            pts: self.pts.iter().map(|&p| f(p)).collect(),
        }
    }

    /// Same image, new parameter values `tau(s_i)`; `tau` must be increasing with
    /// `tau(0) = 0`, `tau(1) = 1`.
    pub fn reparametrize(&self, tau: impl Fn(f64) -> f64) -> Result<Self> {
        let mut s: Vec<f64> = self.s.iter().map(|&v| tau(v)).collect();
        let n = s.len();
        s[0] = 0.0;
        s[n - 1] = 1.0;
        Self::new(s, self.pts.clone())
    }

    /// Write as CSV with columns `s,x,y`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        wtr.write_record(["s", "x", "y"])?;
        for (s, p) in self.s.iter().zip(&self.pts) {
            wtr.write_record([fmt17(*s), fmt17(p[0]), fmt17(p[1])])?;
        }
        wtr.flush()?;
        Ok(())
    }

    /// Read the CSV written by [`ParamCurve::write_csv`]; non-monotone `s` is rejected.
    pub fn read_csv<R: Read>(r: R) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(r);
        let mut s = Vec::new();
        let mut pts = Vec::new();
        for rec in rdr.deserialize() {
            let row: CsvRow = rec?;
            s.push(row.s);
            pts.push([row.x, row.y]);
        }
        Self::new(s, pts)
    }
}

#[derive(Deserialize)]
struct CsvRow {
    s: f64,
    x: f64,
    y: f64,
}

/// Floating-point formatting with 17 significant digits.
pub fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}

pub(crate) fn cumulative_length(pts: &[Point]) -> Vec<f64> {
    let mut cum = Vec::with_capacity(pts.len());
    let mut acc = 0.0;
    cum.push(0.0);
    for w in pts.windows(2) {
        acc += dist(w[0], w[1]);
        cum.push(acc);
    }
    cum
}

/// Point at arclength `target` along a polyline with cumulative lengths `cum`.
fn point_at_arclength(pts: &[Point], cum: &[f64], target: f64) -> Point {
    let n = pts.len();
    let j = match cum.binary_search_by(|v| v.partial_cmp(&target).unwrap()) {
        Ok(j) => return pts[j],
        Err(0) => return pts[0],
        Err(j) if j >= n => return pts[n - 1],
        Err(j) => j,
    };
    let seg = cum[j] - cum[j - 1];
    if seg == 0.0 {
        return pts[j];
    }
    lerp(pts[j - 1], pts[j], (target - cum[j - 1]) / seg)
}

/// Resample to `n + 1` nodes equally spaced in arclength, at uniform parameter.
///
/// Endpoints are kept exactly. The output speed equals the input length except
/// on segments that straddle a corner of the input polyline.
pub fn resample_arclength(c: &ParamCurve, n: usize) -> Result<ParamCurve> {
    if n < 1 {
        return Err(Error::InvalidParameter("node count must be at least 1".into()));
    }
    let cum = cumulative_length(&c.pts);
    let total = cum[cum.len() - 1];
    if !(total > 0.0) {
        return Err(Error::InvalidCurve("zero-length curve".into()));
    }
    let mut pts: Vec<Point> = (0..=n)
        .map(|i| point_at_arclength(&c.pts, &cum, total * i as f64 / n as f64))
        .collect();
    pts[0] = c.start();
    pts[n] = c.end();
    ParamCurve::uniform(pts)
}

/// Signed Menger curvature of three points.
#[inline]
pub fn menger(a: Point, b: Point, c: Point) -> f64 {
    let u = sub(b, a);
    let v = sub(c, b);
    let w = sub(c, a);
    2.0 * cross(u, v) / (norm(u) * norm(v) * norm(w))
}

/// Signed curvature per node from the circumscribed circle of each triple of
/// consecutive nodes; endpoints copy their neighbor.
pub fn discrete_curvature(c: &ParamCurve) -> Result<Vec<f64>> {
    let n = c.len();
    if n < 3 {
        return Err(Error::InvalidCurve("curvature needs at least three nodes".into()));
    }
    if let Some(i) = c.pts.windows(2).position(|w| w[0] == w[1]) {
        return Err(Error::InvalidCurve(format!("coincident nodes at {i} and {}", i + 1)));
    }
    let mut k = vec![0.0; n];
    for i in 1..n - 1 {
        let (a, b, d) = (c.pts[i - 1], c.pts[i], c.pts[i + 1]);
        k[i] = if sub(d, a) == [0.0, 0.0] {
            f64::INFINITY
        } else {
            menger(a, b, d)
        };
    }
    k[0] = k[1];
    k[n - 1] = k[n - 2];
    Ok(k)
}

/// Standard compactly supported bump `exp(−1/(1−t²))` on `(−1, 1)`, unnormalized.
#[inline]
pub fn bump(t: f64) -> f64 {
    if t.abs() >= 1.0 {
        0.0
    } else {
        (-1.0 / (1.0 - t * t)).exp()
    }
}

/// Number of kernel nodes on each side of zero.
const KERNEL_HALF_NODES: usize = 128;

/// Convolve with `μ_{1/n}(t) = n μ(n t)` after odd reflection about both
/// endpoints; the output lives on the input's parameter grid.
///
/// The kernel is discretized with symmetric nodes and weights normalized to
/// unit sum, so endpoint values and affine curves are reproduced exactly and
/// chord speeds never exceed the input's maximum speed.
pub fn mollify(c: &ParamCurve, n: usize) -> Result<ParamCurve> {
    if n < 1 {
        return Err(Error::InvalidParameter("smoothing index must be at least 1".into()));
    }
    let eps = 1.0 / n as f64;
    let q = KERNEL_HALF_NODES as i64;
    let nodes: Vec<(f64, f64)> = (-q..=q)
        .map(|k| {
            let u = k as f64 / (q + 1) as f64;
            (u * eps, bump(u))
        })
        .collect();
    let wsum: f64 = nodes.iter().map(|(_, w)| w).sum();
    let pts: Vec<Point> = c
        .s
        .iter()
        .map(|&s| {
            // pair symmetric nodes so that the reflection identity holds exactly
            let mut acc = [0.0, 0.0];
            for k in 0..=KERNEL_HALF_NODES {
                let (t, w) = nodes[KERNEL_HALF_NODES + k];
                if k == 0 {
                    acc = add(acc, scale(c.eval_odd_extension(s), w));
                } else {
                    let pair = add(c.eval_odd_extension(s - t), c.eval_odd_extension(s + t));
                    acc = add(acc, scale(pair, w));
                }
            }
            scale(acc, 1.0 / wsum)
        })
        .collect();
    let mut out = ParamCurve::new(c.s.clone(), pts)?;
    let last = out.pts.len() - 1;
    out.pts[0] = c.start();
    out.pts[last] = c.end();
    Ok(out)
}

/// Tolerance above unit speed still accepted as short.
pub const SHORT_TOL: f64 = 1e-12;

/// Per-subinterval diagnostics of [`isometrize`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubintervalReport {
    pub index: usize,
    pub input_length: f64,
    /// Bump amplitude solving the length equation (0 when already isometric).
    pub amplitude: f64,
    /// No two non-adjacent segments of the subinterval intersect.
    pub embedded: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Isometrized {
    pub curve: ParamCurve,
    /// `sup_s |g(s) − f(s)|` sampled at all nodes of both curves.
    pub sup_error: f64,
    pub subintervals: Vec<SubintervalReport>,
}

impl Isometrized {
    pub fn all_embedded(&self) -> bool {
        self.subintervals.iter().all(|r| r.embedded)
    }
}

/// Minimum number of nodes used to carry the normal bump inside a subinterval.
const MIN_SUBINTERVAL_NODES: usize = 32;

/// Turn a short curve into a unit-speed curve that agrees with it at the
/// subinterval endpoints `j/n`.
///
/// On each subinterval the arclength-parametrized piece is pushed along its
/// left normal by `C μ`, where `μ` is the smooth bump vanishing to all orders at
/// the ends, and `C` is found by bisection so that the piece has length `1/n`.
/// The piece is then reparametrized by arclength.
pub fn isometrize(c: &ParamCurve, n: usize) -> Result<Isometrized> {
    if n < 1 {
        return Err(Error::InvalidParameter("subdivision count must be at least 1".into()));
    }
    for (i, v) in c.speeds().into_iter().enumerate() {
        if v > 1.0 + SHORT_TOL {
            return Err(Error::NotShort { segment: i, speed: v });
        }
    }
    let tau = 1.0 / n as f64;
    let mut s_out: Vec<f64> = vec![0.0];
    let mut p_out: Vec<Point> = vec![c.start()];
    let mut reports = Vec::with_capacity(n);
    for j in 0..n {
        let a = j as f64 * tau;
        let b = if j + 1 == n { 1.0 } else { (j + 1) as f64 * tau };
        let piece = subinterval_polyline(c, a, b);
        let (pts, amplitude) = lengthen_piece(&piece, b - a);
        let embedded = is_embedded(&pts);
        reports.push(SubintervalReport {
            index: j,
            input_length: cumulative_length(&piece).last().copied().unwrap_or(0.0),
            amplitude,
            embedded,
        });
        let cum = cumulative_length(&pts);
        let total = cum[cum.len() - 1];
        for k in 1..pts.len() {
            let s = if k + 1 == pts.len() {
                b
            } else {
                a + (b - a) * cum[k] / total
            };
            if s > *s_out.last().unwrap() {
                s_out.push(s);
                p_out.push(pts[k]);
            }
        }
    }
    let last = p_out.len() - 1;
    s_out[last] = 1.0;
    p_out[last] = c.end();
    let curve = ParamCurve::new(s_out, p_out)?;
    let sup_error = curve
        .s
        .iter()
        .chain(c.s.iter())
        .map(|&s| dist(curve.eval(s), c.eval(s)))
        .fold(0.0, f64::max);
    Ok(Isometrized {
        curve,
        sup_error,
        subintervals: reports,
    })
}

/// The input restricted to `[a, b]`, with segments subdivided so the piece
/// carries enough nodes for the bump. The image is unchanged.
fn subinterval_polyline(c: &ParamCurve, a: f64, b: f64) -> Vec<Point> {
    let mut raw = vec![c.eval(a)];
    for (s, p) in c.s.iter().zip(&c.pts) {
        if *s > a && *s < b {
            raw.push(*p);
        }
    }
    raw.push(c.eval(b));
    raw.dedup();
    if raw.len() < 2 {
        return vec![c.eval(a), c.eval(b)];
    }
    let total = cumulative_length(&raw).last().copied().unwrap_or(0.0);
    if total == 0.0 {
        return raw;
    }
    let m = (4 * raw.len()).max(MIN_SUBINTERVAL_NODES) as f64;
    let mut out = vec![raw[0]];
    for w in raw.windows(2) {
        let k = ((dist(w[0], w[1]) / total * m).ceil() as usize).max(1);
        for i in 1..=k {
            out.push(if i == k { w[1] } else { lerp(w[0], w[1], i as f64 / k as f64) });
        }
    }
    out
}

/// Push the piece along its left normal until its length reaches `target`.
/// Relative length deficit below which a piece counts as isometric already.
/// The bump amplitude grows like the square root of the deficit, so round-off
/// deficits would otherwise produce visible bumps.
const ISOMETRIC_TOL: f64 = 1e-12;

fn lengthen_piece(piece: &[Point], target: f64) -> (Vec<Point>, f64) {
    let cum = cumulative_length(piece);
    let len0 = cum[cum.len() - 1];
    if len0 >= target * (1.0 - ISOMETRIC_TOL) || piece.len() < 3 || len0 == 0.0 {
        return (piece.to_vec(), 0.0);
    }
    let m = piece.len();
    let normals: Vec<Point> = (0..m)
        .map(|k| {
            let t = if k == 0 {
                sub(piece[1], piece[0])
            } else if k == m - 1 {
                sub(piece[m - 1], piece[m - 2])
            } else {
                let t0 = sub(piece[k], piece[k - 1]);
                let t1 = sub(piece[k + 1], piece[k]);
                add(scale(t0, 1.0 / norm(t0)), scale(t1, 1.0 / norm(t1)))
            };
            let l = norm(t);
            if l == 0.0 {
                [0.0, 0.0]
            } else {
                [-t[1] / l, t[0] / l]
            }
        })
        .collect();
    let profile: Vec<f64> = cum.iter().map(|&c| bump(2.0 * c / len0 - 1.0)).collect();
    let displaced = |amp: f64| -> Vec<Point> {
        piece
            .iter()
            .zip(&normals)
            .zip(&profile)
            .map(|((&p, &nv), &mu)| add(p, scale(nv, amp * mu)))
            .collect()
    };
    let length_of = |amp: f64| -> f64 { cumulative_length(&displaced(amp)).last().copied().unwrap() };
    let mut lo = 0.0;
    let mut hi = target;
    let mut tries = 0;
    while length_of(hi) < target {
        hi *= 2.0;
        tries += 1;
        if tries > 60 {
            return (piece.to_vec(), 0.0);
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if length_of(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let amp = 0.5 * (lo + hi);
    let mut pts = displaced(amp);
    pts[0] = piece[0];
    pts[m - 1] = piece[m - 1];
    (pts, amp)
}

fn segments_intersect(a: Point, b: Point, c: Point, d: Point) -> bool {
    let d1 = cross(sub(b, a), sub(c, a));
    let d2 = cross(sub(b, a), sub(d, a));
    let d3 = cross(sub(d, c), sub(a, c));
    let d4 = cross(sub(d, c), sub(b, c));
    (d1 * d2 < 0.0) && (d3 * d4 < 0.0)
}

/// Whether no two non-adjacent segments cross.
pub fn is_embedded(pts: &[Point]) -> bool {
    let m = pts.len();
    for i in 0..m.saturating_sub(1) {
        for j in i + 2..m - 1 {
            if segments_intersect(pts[i], pts[i + 1], pts[j], pts[j + 1]) {
                return false;
            }
        }
    }
    true
}

/// Rearrange a piecewise-affine curve heading to `x → ∞`, `y → 0` so that
/// `x` is non-decreasing, `y` is non-negative and non-increasing, and the
/// slopes `Δy/Δx` are non-decreasing.
///
/// The corrections are applied in that order. Backtracks in `x` and rises in
/// `y` are replaced by chords to the first later point at the same level;
/// negative heights are clipped to zero; finally the segments are sorted by
/// slope, which keeps the set of segment vectors. None of the steps increases
/// the objective of [`crate::laplace_young::parametric_objective`].
///
/// The last node stands in for the point at infinity, so it must have the
/// largest `x` and (after clipping) the smallest `y`.
pub fn monotone_rearrange(c: &ParamCurve) -> Result<ParamCurve> {
    let pts = c.points();
    let last = pts[pts.len() - 1];
    if pts.iter().any(|p| p[0] > last[0]) {
        return Err(Error::InvalidCurve(
            "last node must have the largest abscissa".into(),
        ));
    }
    if pts.iter().any(|p| p[1].max(0.0) < last[1].max(0.0)) {
        return Err(Error::InvalidCurve(
            "last node must have the smallest clipped height".into(),
        ));
    }
    let start = pts[0];
    let mut work = chord_out_backtracks(pts, 0);
    work = clip_below_zero(&work);
    work = chord_out_backtracks(&work, 1);
    work = sort_by_slope(&work);
    let start_clipped = [start[0], start[1].max(0.0)];
    work[0] = start_clipped;
    let n = work.len();
    work[n - 1] = [last[0], last[1].max(0.0)];
    work.dedup();
    if work.len() < 2 {
        work = vec![start_clipped, [last[0], last[1].max(0.0)]];
    }
    ParamCurve::by_chord_length(work).or_else(|_| ParamCurve::uniform(work_fallback(start_clipped)))
}

fn work_fallback(p: Point) -> Vec<Point> {
    vec![p, p]
}

/// Make coordinate `axis` monotone: non-decreasing for `x` (axis 0),
/// non-increasing for `y` (axis 1), by chords to the first return point.
fn chord_out_backtracks(pts: &[Point], axis: usize) -> Vec<Point> {
    // orient so that the wanted direction is "non-decreasing"
    let sign = if axis == 0 { 1.0 } else { -1.0 };
    let key = |p: &Point| sign * p[axis];
    let mut work: Vec<Point> = pts.to_vec();
    let mut out = vec![work[0]];
    let mut i = 0;
    while i + 1 < work.len() {
        let cur = *out.last().unwrap();
        if key(&work[i + 1]) >= key(&cur) {
            out.push(work[i + 1]);
            i += 1;
            continue;
        }
        let level = key(&cur);
        let k = match (i + 1..work.len()).find(|&k| key(&work[k]) >= level) {
            Some(k) => k,
            None => {
                // unreachable under the entry checks; close with the last point
                out.push(work[work.len() - 1]);
                break;
            }
        };
        let (p, q) = (work[k - 1], work[k]);
        let t = if key(&q) == key(&p) {
            1.0
        } else {
            ((level - key(&p)) / (key(&q) - key(&p))).clamp(0.0, 1.0)
        };
        let mut hit = lerp(p, q, t);
        hit[axis] = cur[axis];
        out.push(hit);
        work[k - 1] = hit;
        i = k - 1;
    }
    out.dedup();
    out
}

fn clip_below_zero(pts: &[Point]) -> Vec<Point> {
    let mut out = vec![[pts[0][0], pts[0][1].max(0.0)]];
    for w in pts.windows(2) {
        let (p, q) = (w[0], w[1]);
        if (p[1] < 0.0) != (q[1] < 0.0) && p[1] != q[1] {
            let t = p[1] / (p[1] - q[1]);
            if t > 0.0 && t < 1.0 {
                let mut z = lerp(p, q, t);
                z[1] = 0.0;
                out.push(z);
            }
        }
        out.push([q[0], q[1].max(0.0)]);
    }
    out.dedup();
    out
}

/// Stable sort of the segment vectors by slope, steepest descent first.
fn sort_by_slope(pts: &[Point]) -> Vec<Point> {
    let mut segs: Vec<Point> = pts
        .windows(2)
        .map(|w| sub(w[1], w[0]))
        .filter(|v| *v != [0.0, 0.0])
        .collect();
    // with Δx ≥ 0, slope(a) < slope(b) ⇔ a_y b_x < b_y a_x
    segs.sort_by(|a, b| {
        let lhs = a[1] * b[0];
        let rhs = b[1] * a[0];
        lhs.partial_cmp(&rhs).unwrap_or(std::cmp::Ordering::Equal)
    });
    let mut out = vec![pts[0]];
    let mut cur = pts[0];
    for v in segs {
        cur = add(cur, v);
        // summation order changed, so clamp rounding below the waterline
        out.push([cur[0], cur[1].max(0.0)]);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::laplace_young::parametric_objective;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn circle_arc(r: f64, a0: f64, a1: f64, n: usize) -> ParamCurve {
        let pts = (0..=n)
            .map(|i| {
                let a = a0 + (a1 - a0) * i as f64 / n as f64;
                [r * a.cos(), r * a.sin()]
            })
            .collect();
        ParamCurve::uniform(pts).unwrap()
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(ParamCurve::new(vec![0.0, 0.5, 0.4, 1.0], vec![[0.0, 0.0]; 4]).is_err());
        assert!(ParamCurve::new(vec![0.0, 1.0], vec![[0.0, 0.0]]).is_err());
        assert!(ParamCurve::new(vec![0.1, 1.0], vec![[0.0, 0.0]; 2]).is_err());
    }

    #[test]
    fn stats_of_segment() {
        let c = ParamCurve::uniform(vec![[0.0, 0.0], [0.3, 0.4], [0.6, 0.8]]).unwrap();
        let st = c.stats();
        assert!((st.length - 1.0).abs() < 1e-15);
        assert!((st.max_speed - 1.0).abs() < 1e-15);
        assert!(st.length <= st.max_speed + 1e-15);
    }

    #[test]
    fn resample_straight_segment() {
        let c = ParamCurve::uniform(vec![[0.0, 0.0], [0.25, 0.0], [1.0, 0.0]]).unwrap();
        let r = resample_arclength(&c, 10).unwrap();
        for (i, p) in r.points().iter().enumerate() {
            assert!((p[0] - i as f64 / 10.0).abs() < 1e-15);
        }
        for v in r.speeds() {
            assert!((v - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn resample_quarter_circle_speed() {
        let c = circle_arc(1.0, 0.0, PI / 2.0, 100_000);
        let r = resample_arclength(&c, 100).unwrap();
        // chords of equal arcs: constant speed, slightly below the arc length
        let v = r.speeds();
        for w in v.windows(2) {
            assert!((w[1] - w[0]).abs() < 1e-9);
        }
        assert!((v[0] - PI / 2.0).abs() < 2e-5);
        assert_eq!(r.start(), c.start());
        assert_eq!(r.end(), c.end());
    }

    #[test]
    fn resample_is_idempotent() {
        let c = circle_arc(1.0, 0.0, 2.0, 100_000);
        let r1 = resample_arclength(&c, 64).unwrap();
        let r2 = resample_arclength(&r1, 64).unwrap();
        for (a, b) in r1.points().iter().zip(r2.points()) {
            assert!(dist(*a, *b) < 1e-12);
        }
    }

    #[test]
    fn resample_zero_length_fails() {
        let c = ParamCurve::uniform(vec![[1.0, 1.0], [1.0, 1.0]]).unwrap();
        assert!(resample_arclength(&c, 4).is_err());
    }

    #[test]
    fn curvature_of_line_circle_parabola() {
        let line = ParamCurve::uniform((0..10).map(|i| [i as f64, 2.0 * i as f64]).collect()).unwrap();
        assert!(discrete_curvature(&line).unwrap().iter().all(|k| k.abs() < 1e-15));

        let arc = circle_arc(1.0, 0.0, PI / 3.0, 60);
        for k in discrete_curvature(&arc).unwrap() {
            assert!((k - 1.0).abs() < 1e-4);
        }

        let h = 1e-3;
        let par = ParamCurve::uniform(vec![[-h, h * h], [0.0, 0.0], [h, h * h]]).unwrap();
        let k = discrete_curvature(&par).unwrap();
        assert!((k[1] - 2.0).abs() < 1e-5);
    }

    #[test]
    fn curvature_rejects_coincident_nodes() {
        let c = ParamCurve::uniform(vec![[0.0, 0.0], [0.0, 0.0], [1.0, 0.0]]).unwrap();
        assert!(discrete_curvature(&c).is_err());
    }

    #[test]
    fn mollify_constant_and_affine() {
        let c = ParamCurve::uniform(vec![[0.3, -0.2]; 11]).unwrap();
        let m = mollify(&c, 4).unwrap();
        for p in m.points() {
            assert!(dist(*p, [0.3, -0.2]) < 1e-15);
        }
        let aff = ParamCurve::uniform((0..=40).map(|i| {
            let s = i as f64 / 40.0;
            [0.2 + 0.6 * s, -0.1 + 0.5 * s]
        }).collect()).unwrap();
        let m = mollify(&aff, 3).unwrap();
        for (a, b) in m.points().iter().zip(aff.points()) {
            assert!(dist(*a, *b) < 1e-12);
        }
    }

    #[test]
    fn mollify_zigzag_keeps_unit_ball() {
        let n_nodes = 401;
        let pts: Vec<Point> = (0..n_nodes)
            .map(|i| {
                let s = i as f64 / (n_nodes - 1) as f64;
                let tooth = ((s * 40.0).fract() - 0.5).abs() / 40.0;
                [s * 0.6, tooth * 0.8]
            })
            .collect();
        let c = ParamCurve::uniform(pts).unwrap();
        let vmax = c.stats().max_speed;
        assert!(vmax <= 1.0 + 1e-12);
        let m = mollify(&c, 50).unwrap();
        assert!(m.stats().max_speed <= vmax.max(1.0) + 1e-12);
        let sup = c.s().iter().map(|&s| dist(m.eval(s), c.eval(s))).fold(0.0, f64::max);
        assert!(sup <= 2.0 / 50.0 * vmax);
        assert_eq!(m.start(), c.start());
        assert_eq!(m.end(), c.end());
    }

    #[test]
    fn mollify_rejects_zero_index() {
        let c = ParamCurve::uniform(vec![[0.0, 0.0], [1.0, 0.0]]).unwrap();
        assert!(mollify(&c, 0).is_err());
    }

    #[test]
    fn isometrize_unit_speed_is_identity() {
        let c = ParamCurve::by_chord_length(vec![[0.0, 0.0], [0.3, 0.4], [0.3, 0.7], [0.5, 0.7]]).unwrap();
        let out = isometrize(&c, 8).unwrap();
        assert!(out.subintervals.iter().all(|r| r.amplitude == 0.0));
        assert!(out.sup_error < 1e-14);
    }

    #[test]
    fn isometrize_half_speed_segment() {
        let c = ParamCurve::uniform((0..=64).map(|i| [i as f64 / 128.0, 0.0]).collect()).unwrap();
        let out = isometrize(&c, 8).unwrap();
        assert!((out.curve.length() - 1.0).abs() < 1e-10);
        for v in out.curve.speeds() {
            assert!((v - 1.0).abs() < 1e-10);
        }
        for j in 0..=8 {
            let s = j as f64 / 8.0;
            assert!(dist(out.curve.eval(s), c.eval(s)) < 1e-14);
        }
        // a bump of height a over width w adds about (π a / w)²-ish; sup error stays O(1/N)
        assert!(out.sup_error < 2.0 / 8.0);
        assert!(out.all_embedded());
        assert!(discrete_curvature(&out.curve).unwrap().iter().all(|k| k.is_finite()));
    }

    #[test]
    fn isometrize_rejects_long_curves() {
        let c = ParamCurve::uniform(vec![[0.0, 0.0], [2.0, 0.0]]).unwrap();
        assert!(matches!(isometrize(&c, 4), Err(Error::NotShort { .. })));
    }

    #[test]
    fn isometrize_error_halves_with_subdivision() {
        let r = 1.0 / PI;
        let arc = circle_arc(r, PI, 0.0, 4000);
        // speed 0.9: shrink the parameter-to-image map
        let short = arc.map_points(|p| scale(p, 0.9));
        let errs: Vec<f64> = [4usize, 8, 16, 32]
            .iter()
            .map(|&n| {
                let out = isometrize(&short, n).unwrap();
                assert!((out.curve.length() - 1.0).abs() < 1e-10);
                out.sup_error
            })
            .collect();
        for w in errs.windows(2) {
            assert!(w[1] / w[0] <= 0.75, "{errs:?}");
        }
    }

    fn objective(c: &ParamCurve) -> f64 {
        parametric_objective(c.points(), 1.0, 1.0)
    }

    #[test]
    fn rearrange_fixed_point() {
        let pts = vec![[0.0, 1.0], [0.2, 0.5], [0.6, 0.2], [1.4, 0.05], [3.0, 0.0]];
        let c = ParamCurve::by_chord_length(pts.clone()).unwrap();
        let r = monotone_rearrange(&c).unwrap();
        assert_eq!(r.points().len(), pts.len());
        for (a, b) in r.points().iter().zip(&pts) {
            assert!(dist(*a, *b) < 1e-14);
        }
    }

    #[test]
    fn rearrange_swaps_slopes() {
        // slopes −0.5 then −2: must become −2 then −0.5
        let pts = vec![[0.0, 3.0], [2.0, 2.0], [3.0, 0.0]];
        let c = ParamCurve::by_chord_length(pts).unwrap();
        let r = monotone_rearrange(&c).unwrap();
        assert!(dist(r.points()[1], [1.0, 1.0]) < 1e-14);
        let surface = |p: &[Point]| -> f64 {
            p.windows(2).map(|w| dist(w[0], w[1]) - (w[1][0] - w[0][0])).sum()
        };
        assert!((surface(c.points()) - surface(r.points())).abs() < 1e-14);
        // gravity: ∫ y² dx on each piece, (y_a² + y_a y_b + y_b²)/3 · Δx
        assert!(objective(&r) < objective(&c));
    }

    #[test]
    fn rearrange_removes_backtrack() {
        let pts = vec![[0.0, 1.0], [1.0, 0.8], [0.5, 0.6], [2.0, 0.3], [4.0, 0.0]];
        let c = ParamCurve::by_chord_length(pts).unwrap();
        let r = monotone_rearrange(&c).unwrap();
        assert!(r.points().windows(2).all(|w| w[1][0] >= w[0][0]));
        assert!(r.length() < c.length());
        assert!(objective(&r) <= objective(&c) + 1e-12);
    }

    #[test]
    fn rearrange_rejects_bad_tail() {
        let c = ParamCurve::by_chord_length(vec![[0.0, 1.0], [2.0, 0.5], [1.0, 0.0]]).unwrap();
        assert!(monotone_rearrange(&c).is_err());
    }

    fn random_curve() -> impl Strategy<Value = Vec<Point>> {
        prop::collection::vec((-0.5f64..1.5, -0.3f64..1.2), 2..12).prop_map(|v| {
            let mut pts: Vec<Point> = vec![[0.0, 0.8]];
            pts.extend(v.into_iter().map(|(x, y)| [x, y]));
            pts.push([3.0, 0.0]);
            pts
        })
    }

    proptest! {
        #[test]
        fn rearrange_never_increases_objective(pts in random_curve()) {
            let c = ParamCurve::by_chord_length(pts).unwrap();
            let r = monotone_rearrange(&c).unwrap();
            let p = r.points();
            prop_assert!(objective(&r) <= objective(&c) + 1e-12);
            prop_assert!(p.windows(2).all(|w| w[1][0] >= w[0][0] - 1e-12));
            prop_assert!(p.windows(2).all(|w| w[1][1] <= w[0][1] + 1e-12));
            prop_assert!(p.iter().all(|q| q[1] >= 0.0));
            prop_assert_eq!(r.end(), c.end());
        }

        #[test]
        fn mollify_respects_speed_bound(ys in prop::collection::vec(-0.02f64..0.02, 8..40), n in 1usize..30) {
            let m = ys.len();
            let pts: Vec<Point> = ys.iter().enumerate().map(|(i, y)| [0.5 * i as f64 / m as f64, *y]).collect();
            let c = ParamCurve::uniform(pts).unwrap();
            let vin = c.stats().max_speed;
            let out = mollify(&c, n).unwrap();
            prop_assert!(out.stats().max_speed <= vin.max(1.0) + 1e-12);
            prop_assert_eq!(out.start(), c.start());
            prop_assert_eq!(out.end(), c.end());
        }
    }

    #[test]
    fn csv_round_trip_and_rejection() {
        let c = circle_arc(1.0, 0.0, 1.0, 7);
        let mut buf = Vec::new();
        c.write_csv(&mut buf).unwrap();
        let back = ParamCurve::read_csv(buf.as_slice()).unwrap();
        assert_eq!(back, c);
        let bad = "s,x,y\n0,0,0\n0.7,1,1\n0.5,2,2\n1,3,3\n";
        assert!(ParamCurve::read_csv(bad.as_bytes()).is_err());
    }
}
