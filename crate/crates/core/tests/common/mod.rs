//! Independent reference implementations used by the integration tests.
//! Nothing here calls into the library's numerical routines.

#![allow(dead_code, clippy::needless_range_loop)]

use kronrisk::tensor::DenseTensor;
use nalgebra::{DMatrix, DVector};
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Small deterministic generator for test inputs.
pub struct TestRng(ChaCha8Rng);

impl TestRng {
    pub fn new(seed: u64) -> Self {
        Self(ChaCha8Rng::seed_from_u64(seed))
    }

    /// Uniform in `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        (self.0.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    /// Uniform in `[-1, 1)`.
    pub fn signed(&mut self) -> f64 {
        2.0 * self.uniform() - 1.0
    }

    /// Uniform integer in `lo..=hi`.
    pub fn range(&mut self, lo: usize, hi: usize) -> usize {
        lo + (self.0.next_u64() % (hi - lo + 1) as u64) as usize
    }

    pub fn matrix(&mut self, rows: usize, cols: usize) -> DMatrix<f64> {
        DMatrix::from_fn(rows, cols, |_, _| self.signed())
    }

    pub fn vector(&mut self, n: usize) -> DVector<f64> {
        DVector::from_fn(n, |_, _| self.signed())
    }

    pub fn tensor(&mut self, dims: &[usize]) -> DenseTensor {
        let n = dims.iter().product();
        let data = (0..n).map(|_| self.signed()).collect();
        DenseTensor::new(dims.to_vec(), data).unwrap()
    }
}

/// Multi-index (mode 0 fastest) of a linear position.
pub fn multi_index(mut pos: usize, dims: &[usize]) -> Vec<usize> {
    dims.iter()
        .map(|&d| {
            let i = pos % d;
            pos /= d;
            i
        })
        .collect()
}

pub fn linear_index(idx: &[usize], dims: &[usize]) -> usize {
    let mut pos = 0;
    let mut stride = 1;
    for (&i, &d) in idx.iter().zip(dims) {
        pos += i * stride;
        stride *= d;
    }
    pos
}

/// Elementwise mode-n unfolding by definition: `X_(n)[i_n, j]` where `j`
/// enumerates the remaining indices with the lowest mode fastest.
pub fn unfold_by_definition(t: &DenseTensor, mode: usize) -> DMatrix<f64> {
    let dims = t.dims();
    let rest: usize = dims
        .iter()
        .enumerate()
        .filter(|&(k, _)| k != mode)
        .map(|(_, &d)| d)
        .product();
    let mut m = DMatrix::zeros(dims[mode], rest);
    for pos in 0..t.len() {
        let idx = multi_index(pos, dims);
        let mut col = 0;
        let mut stride = 1;
        for (k, (&i, &d)) in idx.iter().zip(dims).enumerate() {
            if k != mode {
                col += i * stride;
                stride *= d;
            }
        }
        m[(idx[mode], col)] = t.data()[pos];
    }
    m
}

/// `Y = X ×_0 U_0 ×_1 U_1 ...` evaluated as
/// `Y[j] = Σ_i X[i] Π_k U_k[j_k, i_k]`.
pub fn multi_mode_direct(t: &DenseTensor, mats: &[DMatrix<f64>]) -> DenseTensor {
    let in_dims = t.dims().to_vec();
    let out_dims: Vec<usize> = mats.iter().map(|u| u.nrows()).collect();
    let out_len: usize = out_dims.iter().product();
    let mut out = vec![0.0; out_len];
    for (o, slot) in out.iter_mut().enumerate() {
        let j = multi_index(o, &out_dims);
        let mut acc = 0.0;
        for (p, &x) in t.data().iter().enumerate() {
            let i = multi_index(p, &in_dims);
            let mut w = x;
            for (k, u) in mats.iter().enumerate() {
                w *= u[(j[k], i[k])];
            }
            acc += w;
        }
        *slot = acc;
    }
    DenseTensor::new(out_dims, out).unwrap()
}

/// Single mode product by definition.
pub fn mode_product_direct(t: &DenseTensor, u: &DMatrix<f64>, mode: usize) -> DenseTensor {
    let mats: Vec<DMatrix<f64>> = t
        .dims()
        .iter()
        .enumerate()
        .map(|(k, &d)| {
            if k == mode {
                u.clone()
            } else {
                DMatrix::identity(d, d)
            }
        })
        .collect();
    multi_mode_direct(t, &mats)
}

/// Kronecker product by its block definition.
pub fn kron(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    let (p, q) = (b.nrows(), b.ncols());
    DMatrix::from_fn(a.nrows() * p, a.ncols() * q, |r, c| {
        a[(r / p, c / q)] * b[(r % p, c % q)]
    })
}

/// `mats[0] ⊗ mats[1] ⊗ ...`.
pub fn kron_all(mats: &[&DMatrix<f64>]) -> DMatrix<f64> {
    let mut acc = DMatrix::from_element(1, 1, 1.0);
    for m in mats {
        acc = kron(&acc, m);
    }
    acc
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending.
pub fn jacobi_eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    let n = m.nrows();
    let mut a: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| 0.5 * (m[(i, j)] + m[(j, i)])).collect())
        .collect();
    let scale: f64 = a
        .iter()
        .flatten()
        .map(|x| x * x)
        .sum::<f64>()
        .sqrt()
        .max(f64::MIN_POSITIVE);
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum::<f64>()
            .sqrt();
        if off <= 1e-15 * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p][q];
                if apq.abs() <= 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut vals: Vec<f64> = (0..n).map(|i| a[i][i]).collect();
    vals.sort_by(f64::total_cmp);
    vals
}

/// Solves `a x = b` by Gaussian elimination with partial pivoting.
pub fn gauss_solve(a: &DMatrix<f64>, b: &DVector<f64>) -> DVector<f64> {
    let n = a.nrows();
    let mut m: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| a[(i, j)])
                .chain(std::iter::once(b[i]))
                .collect()
        })
        .collect();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&x, &y| m[x][col].abs().total_cmp(&m[y][col].abs()))
            .unwrap();
        m.swap(col, piv);
        for row in col + 1..n {
            let f = m[row][col] / m[col][col];
            if f != 0.0 {
                for k in col..=n {
                    m[row][k] -= f * m[col][k];
                }
            }
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|k| m[i][k] * x[k]).sum();
        x[i] = (m[i][n] - s) / m[i][i];
    }
    DVector::from_vec(x)
}

/// `Σ⁻¹1 / (1ᵀΣ⁻¹1)` through an explicit linear solve.
pub fn min_variance_oracle(sigma: &DMatrix<f64>) -> DVector<f64> {
    let ones = DVector::from_element(sigma.nrows(), 1.0);
    let x = gauss_solve(sigma, &ones);
    let s = x.sum();
    x / s
}

/// Minimum-norm solution of a full-row-rank system: `Aᵀ (A Aᵀ)⁻¹ b`.
pub fn normal_equations_min_norm(a: &DMatrix<f64>, b: &DVector<f64>) -> DVector<f64> {
    let gram = a * a.transpose();
    a.transpose() * gauss_solve(&gram, b)
}

/// Sample covariance of vectorized tensors by explicit sums.
pub fn explicit_covariance(samples: &[DenseTensor], demean: bool) -> DMatrix<f64> {
    let n = samples[0].len();
    let t = samples.len();
    let mut mean = vec![0.0; n];
    if demean {
        for s in samples {
            for (m, x) in mean.iter_mut().zip(s.data()) {
                *m += x / t as f64;
            }
        }
    }
    let mut c = DMatrix::zeros(n, n);
    for s in samples {
        for i in 0..n {
            let xi = s.data()[i] - mean[i];
            for j in 0..n {
                c[(i, j)] += xi * (s.data()[j] - mean[j]);
            }
        }
    }
    c / (t - 1) as f64
}

/// A valid (symmetric, positive-definite, unit-trace) random matrix.
pub fn random_theta(rng: &mut TestRng, n: usize) -> DMatrix<f64> {
    let a = rng.matrix(n, n);
    let m = &a * a.transpose() + DMatrix::identity(n, n) * 0.05;
    let tr = m.trace();
    m / tr
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}
