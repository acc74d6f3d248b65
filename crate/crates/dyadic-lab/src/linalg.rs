//! Just enough dense linear algebra: row-major matrices, a spectral-norm
//! power iteration on the Gram operator, and a Jacobi eigensolver for the
//! small symmetric systems that come out of per-block norm bounds.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Matrix {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Matrix {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    #[inline]
    pub fn add_to(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] += v;
    }

    pub fn matvec(&self, x: &[f64], out: &mut [f64]) {
        debug_assert_eq!(x.len(), self.cols);
        debug_assert_eq!(out.len(), self.rows);
        let chunks: Vec<f64> = crate::par::map_indexed(self.rows, |i| {
            let row = &self.data[i * self.cols..(i + 1) * self.cols];
            row.iter().zip(x).map(|(&a, &b)| a * b).sum()
        });
        out.copy_from_slice(&chunks);
    }

    pub fn matvec_transpose(&self, x: &[f64], out: &mut [f64]) {
        debug_assert_eq!(x.len(), self.rows);
        debug_assert_eq!(out.len(), self.cols);
        let chunks: Vec<f64> = crate::par::map_indexed(self.cols, |j| {
            (0..self.rows)
                .map(|i| self.data[i * self.cols + j] * x[i])
                .sum()
        });
        out.copy_from_slice(&chunks);
    }

    pub fn apply_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.rows];
        self.matvec(x, &mut out);
        out
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows);
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i * other.cols + j] += a * other.get(k, j);
                }
            }
        }
        out
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    /// Conjugate by diagonal matrices: `diag(l) * A * diag(r)`.
    pub fn scale_rows_cols(&self, left: &[f64], right: &[f64]) -> Matrix {
        assert_eq!(left.len(), self.rows);
        assert_eq!(right.len(), self.cols);
        let mut out = self.clone();
        for (i, &l) in left.iter().enumerate() {
            let row = &mut out.data[i * self.cols..(i + 1) * self.cols];
            for (cell, &r) in row.iter_mut().zip(right) {
                *cell *= l * r;
            }
        }
        out
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        self.rows == self.cols
            && (0..self.rows)
                .all(|i| (0..i).all(|j| (self.get(i, j) - self.get(j, i)).abs() <= tol))
    }
}

/// Largest singular value via power iteration on `A^T A`, with Rayleigh
/// quotient stopping. Two seeded restarts guard against an unlucky start.
pub fn spectral_norm(a: &Matrix, seed: u64) -> f64 {
    let mut best = 0.0f64;
    for restart in 0..2 {
        best = best.max(power_iteration(a, seed.wrapping_add(restart)));
    }
    best
}

fn power_iteration(a: &Matrix, seed: u64) -> f64 {
    let n = a.cols;
    if n == 0 || a.rows == 0 {
        return 0.0;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    normalize(&mut v);
    let mut av = vec![0.0; a.rows];
    let mut atav = vec![0.0; n];
    let mut lambda = 0.0f64;
    for _ in 0..5000 {
        a.matvec(&v, &mut av);
        a.matvec_transpose(&av, &mut atav);
        let new_lambda: f64 = v.iter().zip(&atav).map(|(&x, &y)| x * y).sum();
        let norm = normalize_into(&atav, &mut v);
        if norm == 0.0 {
            return 0.0;
        }
        if (new_lambda - lambda).abs() <= 1e-13 * new_lambda.abs() + 1e-300 {
            lambda = new_lambda;
            break;
        }
        lambda = new_lambda;
    }
    lambda.max(0.0).sqrt()
}

fn normalize(v: &mut [f64]) {
    let n = (v.iter().map(|x| x * x).sum::<f64>()).sqrt();
    if n > 0.0 {
        for x in v.iter_mut() {
            *x /= n;
        }
    }
}

fn normalize_into(src: &[f64], dst: &mut [f64]) -> f64 {
    let n = (src.iter().map(|x| x * x).sum::<f64>()).sqrt();
    if n > 0.0 {
        for (d, &s) in dst.iter_mut().zip(src) {
            *d = s / n;
        }
    }
    n
}

/// Eigenvalues of a small symmetric matrix by cyclic Jacobi rotations.
pub fn symmetric_eigenvalues(m: &Matrix) -> Vec<f64> {
    assert_eq!(m.rows, m.cols);
    let n = m.rows;
    let mut a = m.data.clone();
    let at = |a: &[f64], i: usize, j: usize| a[i * n + j];
    for _ in 0..100 {
        let mut off = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                off += at(&a, i, j).powi(2);
            }
        }
        if off < 1e-28 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = at(&a, p, q);
                if apq.abs() < 1e-300 {
                    continue;
                }
                let app = at(&a, p, p);
                let aqq = at(&a, q, q);
                let theta = 0.5 * (aqq - app) / apq;
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = at(&a, k, p);
                    let akq = at(&a, k, q);
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = at(&a, p, k);
                    let aqk = at(&a, q, k);
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
            }
        }
    }
    (0..n).map(|i| at(&a, i, i)).collect()
}
