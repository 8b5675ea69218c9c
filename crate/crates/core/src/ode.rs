//! Adaptive Dormand–Prince 5(4) integration for small autonomous-or-not
//! systems of fixed dimension.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct Dp45Options {
    pub rtol: f64,
    pub atol: f64,
    /// Largest step allowed; also the initial step.
    pub max_step: f64,
    pub min_step: f64,
    pub max_steps: usize,
}

impl Default for Dp45Options {
    fn default() -> Self {
        Self {
            rtol: 1e-12,
            atol: 1e-14,
            max_step: 1e-2,
            min_step: 1e-14,
            max_steps: 10_000_000,
        }
    }
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// fifth minus fourth order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

fn axpy<const N: usize>(y: &[f64; N], terms: &[(f64, &[f64; N])], h: f64) -> [f64; N] {
    let mut out = *y;
    for (c, k) in terms {
        for i in 0..N {
            out[i] += h * c * k[i];
        }
    }
    out
}

/// One Dormand–Prince step: the 5th-order solution and the local error estimate.
pub fn dp45_step<const N: usize, F>(f: &F, t: f64, y: &[f64; N], h: f64) -> ([f64; N], [f64; N])
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    let k1 = f(t, y);
    let k2 = f(t + C2 * h, &axpy(y, &[(A21, &k1)], h));
    let k3 = f(t + C3 * h, &axpy(y, &[(A31, &k1), (A32, &k2)], h));
    let k4 = f(t + C4 * h, &axpy(y, &[(A41, &k1), (A42, &k2), (A43, &k3)], h));
    let k5 = f(
        t + C5 * h,
        &axpy(y, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)], h),
    );
    let k6 = f(
        t + h,
        &axpy(y, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)], h),
    );
    let y5 = axpy(y, &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)], h);
    let k7 = f(t + h, &y5);
    let mut err = [0.0; N];
    for i in 0..N {
        err[i] = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
    }
    (y5, err)
}

fn error_norm<const N: usize>(err: &[f64; N], y: &[f64; N], y_new: &[f64; N], o: &Dp45Options) -> f64 {
    let mut acc: f64 = 0.0;
    for i in 0..N {
        let sc = o.atol + o.rtol * y[i].abs().max(y_new[i].abs());
        acc = acc.max((err[i] / sc).abs());
    }
    acc
}

/// Integrate from `t0` to `t1` adaptively; returns the state at `t1`.
pub fn integrate<const N: usize, F>(f: F, t0: f64, y0: [f64; N], t1: f64, o: &Dp45Options) -> Result<[f64; N]>
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    let dir = (t1 - t0).signum();
    let span = (t1 - t0).abs();
    if span == 0.0 {
        return Ok(y0);
    }
    let mut t = t0;
    let mut y = y0;
    let mut h = o.max_step.min(span);
    let mut steps = 0;
    loop {
        let remaining = (t1 - t).abs();
        if remaining <= 1e-15 * span {
            return Ok(y);
        }
        let hh = h.min(remaining);
        let (y_new, err) = dp45_step(&f, t, &y, dir * hh);
        let en = error_norm(&err, &y, &y_new, o);
        steps += 1;
        if steps > o.max_steps {
            return Err(Error::NoConvergence {
                method: "Dormand-Prince",
                iterations: steps,
                residual: en,
            });
        }
        if en <= 1.0 || hh <= o.min_step {
            if y_new.iter().any(|v| !v.is_finite()) {
                return Err(Error::NoConvergence {
                    method: "Dormand-Prince",
                    iterations: steps,
                    residual: f64::INFINITY,
                });
            }
            t = if hh == remaining { t1 } else { t + dir * hh };
            y = y_new;
        }
        let fac = if en == 0.0 { 5.0 } else { (0.9 * en.powf(-0.2)).clamp(0.2, 5.0) };
        h = (hh * fac).min(o.max_step).max(o.min_step);
    }
}

/// Integrate on a fixed grid `t_0 < t_1 < …` and return the states at every node.
pub fn integrate_grid<const N: usize, F>(f: F, ts: &[f64], y0: [f64; N], o: &Dp45Options) -> Result<Vec<[f64; N]>>
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    let mut out = Vec::with_capacity(ts.len());
    let mut y = y0;
    out.push(y);
    for w in ts.windows(2) {
        y = integrate(&f, w[0], y, w[1], o)?;
        out.push(y);
    }
    Ok(out)
}
