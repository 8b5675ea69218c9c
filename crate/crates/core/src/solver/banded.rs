//! Symmetric banded matrices with an extra dense border row, solved by
//! banded Cholesky and a Schur complement on the border.

/// Lower band of a symmetric `n × n` matrix with half-bandwidth `b`.
#[derive(Debug, Clone)]
pub(crate) struct SymBand {
    n: usize,
    b: usize,
    // row i holds columns i-b..=i at offsets 0..=b
    data: Vec<f64>,
}

impl SymBand {
    pub fn zeros(n: usize, b: usize) -> Self {
        Self {
            n,
            b,
            data: vec![0.0; n * (b + 1)],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn bandwidth(&self) -> usize {
        self.b
    }

    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        debug_assert!(j <= i && i - j <= self.b);
        i * (self.b + 1) + (j + self.b - i)
    }

    /// Entry `(i, j)`; zero outside the band.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (i, j) = if i >= j { (i, j) } else { (j, i) };
        if i - j > self.b {
            0.0
        } else {
            self.data[self.idx(i, j)]
        }
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        let (i, j) = if i >= j { (i, j) } else { (j, i) };
        let k = self.idx(i, j);
        self.data[k] = v;
    }

    pub fn add_diagonal(&mut self, tau: f64) {
        for i in 0..self.n {
            let k = self.idx(i, i);
            self.data[k] += tau;
        }
    }

    pub fn max_abs_diagonal(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i).abs()).fold(0.0, f64::max)
    }

    /// In-place Cholesky factor `L` (lower band); `None` unless positive definite.
    pub fn cholesky(&self) -> Option<SymBand> {
        let mut l = self.clone();
        let b = self.b;
        for i in 0..self.n {
            let j0 = i.saturating_sub(b);
            for j in j0..=i {
                let mut sum = l.data[l.idx(i, j)];
                let k0 = j0.max(j.saturating_sub(b));
                for k in k0..j {
                    sum -= l.data[l.idx(i, k)] * l.data[l.idx(j, k)];
                }
                if i == j {
                    if !(sum > 0.0) || !sum.is_finite() {
                        return None;
                    }
                    let ix = l.idx(i, i);
                    l.data[ix] = sum.sqrt();
                } else {
                    let ix = l.idx(i, j);
                    l.data[ix] = sum / l.data[l.idx(j, j)];
                }
            }
        }
        Some(l)
    }

    /// Solve `L Lᵀ x = r` given the factor from [`SymBand::cholesky`].
    pub fn cholesky_solve(&self, r: &[f64]) -> Vec<f64> {
        let n = self.n;
        let b = self.b;
        let mut y = r.to_vec();
        for i in 0..n {
            let mut sum = y[i];
            for k in i.saturating_sub(b)..i {
                sum -= self.data[self.idx(i, k)] * y[k];
            }
            y[i] = sum / self.data[self.idx(i, i)];
        }
        for i in (0..n).rev() {
            let mut sum = y[i];
            for k in i + 1..(i + b + 1).min(n) {
                sum -= self.data[self.idx(k, i)] * y[k];
            }
            y[i] = sum / self.data[self.idx(i, i)];
        }
        y
    }
}

/// Solve `[H c; cᵀ d] [u; v] = [g; e]` with `H` banded and factored.
/// Returns `None` when the Schur complement is not positive.
pub(crate) fn bordered_solve(factor: &SymBand, c: &[f64], d: f64, g: &[f64], e: f64) -> Option<(Vec<f64>, f64)> {
    let u1 = factor.cholesky_solve(g);
    let u2 = factor.cholesky_solve(c);
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let schur = d - dot(c, &u2);
    if !(schur > 0.0) {
        return None;
    }
    let v = (e - dot(c, &u1)) / schur;
    let u = u1.iter().zip(&u2).map(|(a, b)| a - v * b).collect();
    Some((u, v))
}
