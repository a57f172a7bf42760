//! Small dense/banded symmetric eigen helpers.
//!
//! The one-body solver needs the lowest few eigenpairs of a large symmetric
//! banded matrix (a finite-difference Hamiltonian). Eigenvalues are located by
//! bisection on the inertia count of `A - σI` (Sylvester's law via an
//! unpivoted banded LDLᵀ factorisation) and eigenvectors by inverse iteration.
//! Dense blocks (exact diagonalisation, 6×6 checks) go through nalgebra.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};

/// Symmetric matrix with half-bandwidth `bw`, stored by diagonals.
///
/// `bands[k][i]` is `A[i][i + k]` for `k = 0..=bw`.
#[derive(Clone, Debug)]
pub struct SymBanded {
    n: usize,
    bw: usize,
    bands: Vec<Vec<f64>>,
}

struct Ldl {
    /// Row-major strictly-lower factor, `l[i * bw + (k - 1)] = L[i][i - k]`.
    l: Vec<f64>,
    d: Vec<f64>,
    negatives: usize,
}

impl SymBanded {
    pub fn zeros(n: usize, bw: usize) -> Self {
        let bands = (0..=bw).map(|k| vec![0.0; n.saturating_sub(k)]).collect();
        SymBanded { n, bw, bands }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn bandwidth(&self) -> usize {
        self.bw
    }

    /// Sets `A[i][i+k]` (and by symmetry `A[i+k][i]`).
    pub fn set(&mut self, i: usize, k: usize, value: f64) {
        self.bands[k][i] = value;
    }

    pub fn add(&mut self, i: usize, k: usize, value: f64) {
        self.bands[k][i] += value;
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (lo, hi) = if i <= j { (i, j) } else { (j, i) };
        let k = hi - lo;
        if k > self.bw {
            0.0
        } else {
            self.bands[k][lo]
        }
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.n, self.n, |i, j| self.get(i, j))
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        for i in 0..self.n {
            y[i] += self.bands[0][i] * x[i];
            for k in 1..=self.bw {
                if i + k < self.n {
                    let a = self.bands[k][i];
                    y[i] += a * x[i + k];
                    y[i + k] += a * x[i];
                }
            }
        }
        y
    }

    /// Gershgorin interval containing the whole spectrum.
    pub fn gershgorin(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..self.n {
            let mut r = 0.0;
            for k in 1..=self.bw {
                if i + k < self.n {
                    r += self.bands[k][i].abs();
                }
                if i >= k {
                    r += self.bands[k][i - k].abs();
                }
            }
            lo = lo.min(self.bands[0][i] - r);
            hi = hi.max(self.bands[0][i] + r);
        }
        (lo, hi)
    }

    fn scale(&self) -> f64 {
        let (lo, hi) = self.gershgorin();
        lo.abs().max(hi.abs()).max(f64::MIN_POSITIVE)
    }

    fn factor(&self, sigma: f64) -> Ldl {
        let n = self.n;
        let bw = self.bw;
        let tiny = f64::EPSILON * self.scale();
        let mut l = vec![0.0; n * bw.max(1)];
        let mut d = vec![0.0; n];
        let mut negatives = 0;
        for i in 0..n {
            // L[i][j] for j in i-bw..i
            for kk in (1..=bw.min(i)).rev() {
                let j = i - kk;
                // a_ij - sum_{m < j, within band of both} L[i][m] L[j][m] d[m]
                let mut s = self.bands[kk][j];
                for m in (i.saturating_sub(bw))..j {
                    let lim = l[i * bw + (i - m - 1)];
                    let ljm = if j - m <= bw { l[j * bw + (j - m - 1)] } else { 0.0 };
                    s -= lim * ljm * d[m];
                }
                l[i * bw + (kk - 1)] = s / d[j];
            }
            let mut di = self.bands[0][i] - sigma;
            for kk in 1..=bw.min(i) {
                let m = i - kk;
                let lim = l[i * bw + (kk - 1)];
                di -= lim * lim * d[m];
            }
            if di.abs() < tiny {
                di = tiny;
            }
            if di < 0.0 {
                negatives += 1;
            }
            d[i] = di;
        }
        Ldl { l, d, negatives }
    }

    /// Number of eigenvalues strictly below `sigma`.
    pub fn count_below(&self, sigma: f64) -> usize {
        self.factor(sigma).negatives
    }

    fn solve_shifted(&self, f: &Ldl, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        let bw = self.bw;
        let mut y = b.to_vec();
        for i in 0..n {
            for kk in 1..=bw.min(i) {
                y[i] -= f.l[i * bw + (kk - 1)] * y[i - kk];
            }
        }
        for i in 0..n {
            y[i] /= f.d[i];
        }
        for i in (0..n).rev() {
            for kk in 1..=bw {
                if i + kk < n {
                    y[i] -= f.l[(i + kk) * bw + (kk - 1)] * y[i + kk];
                }
            }
        }
        y
    }

    /// The `k` smallest eigenvalues, ascending.
    pub fn lowest_eigenvalues(&self, k: usize) -> Vec<f64> {
        let (glo, ghi) = self.gershgorin();
        let pad = 1e-10 * (glo.abs() + ghi.abs() + 1.0);
        let (glo, ghi) = (glo - pad, ghi + pad);
        let mut out = Vec::with_capacity(k);
        let mut lo = glo;
        for j in 0..k.min(self.n) {
            let mut a = lo;
            let mut b = ghi;
            for _ in 0..200 {
                let mid = 0.5 * (a + b);
                if mid <= a || mid >= b {
                    break;
                }
                if self.count_below(mid) > j {
                    b = mid;
                } else {
                    a = mid;
                }
                if b - a <= 2.0 * f64::EPSILON * (a.abs() + b.abs()) {
                    break;
                }
            }
            let lam = 0.5 * (a + b);
            out.push(lam);
            lo = a;
        }
        out
    }

    /// Lowest `k` eigenpairs. Vectors are unit-norm in the Euclidean sense.
    pub fn lowest_eigenpairs(&self, k: usize) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
        let values = self.lowest_eigenvalues(k);
        let scale = self.scale();
        let mut vectors: Vec<Vec<f64>> = Vec::with_capacity(values.len());
        for (j, &lam) in values.iter().enumerate() {
            let f = self.factor(lam);
            let mut x: Vec<f64> = (0..self.n)
                .map(|i| 1.0 + 0.5 * ((i as f64 + 1.0) * (0.7 + j as f64 * 0.13)).sin())
                .collect();
            normalize(&mut x);
            let close: Vec<usize> = (0..j)
                .filter(|&i| (values[i] - lam).abs() < 1e-6 * scale)
                .collect();
            let mut residual = f64::INFINITY;
            for _ in 0..8 {
                let mut y = self.solve_shifted(&f, &x);
                for &i in &close {
                    let p = dot(&y, &vectors[i]);
                    for (yy, vv) in y.iter_mut().zip(&vectors[i]) {
                        *yy -= p * vv;
                    }
                }
                normalize(&mut y);
                x = y;
                let ax = self.mul_vec(&x);
                residual = ax
                    .iter()
                    .zip(&x)
                    .map(|(a, b)| (a - lam * b).powi(2))
                    .sum::<f64>()
                    .sqrt();
                if residual < 1e-12 * scale {
                    break;
                }
            }
            if !(residual < 1e-8 * scale) {
                return Err(Error::NonconvergedEigensolver(format!(
                    "eigenvector {j} residual {residual:e}"
                )));
            }
            vectors.push(x);
        }
        Ok((values, vectors))
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn normalize(x: &mut [f64]) {
    let n = dot(x, x).sqrt();
    if n > 0.0 {
        for v in x.iter_mut() {
            *v /= n;
        }
    }
}

/// Ascending eigen-decomposition of a dense symmetric matrix.
///
/// Eigenvectors are returned as columns, each with its first component of
/// magnitude above 1e-12 made positive.
pub fn sym_eigen(m: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let n = m.nrows();
    if n == 0 {
        return (Vec::new(), DMatrix::zeros(0, 0));
    }
    let eig = SymmetricEigen::new(m.clone());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vecs = DMatrix::zeros(n, n);
    for (c, &i) in order.iter().enumerate() {
        let mut col = eig.eigenvectors.column(i).clone_owned();
        if let Some(first) = col.iter().find(|v| v.abs() > 1e-12) {
            if *first < 0.0 {
                col.neg_mut();
            }
        }
        vecs.set_column(c, &col);
    }
    (values, vecs)
}

pub fn sym_eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    if m.nrows() == 0 {
        return Vec::new();
    }
    let mut v: Vec<f64> = m.clone().symmetric_eigenvalues().iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}
