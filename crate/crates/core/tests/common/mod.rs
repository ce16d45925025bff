//! Helpers shared by the integration tests. Dense matrices are `Vec` rows so
//! the oracles share no code with the library.
#![allow(dead_code, clippy::needless_range_loop)]

pub mod hd_laws;

use intesn_core::readout::ridge_fit;
use intesn_core::{Mat, TrainingBatch};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Rows = Vec<Vec<f64>>;

pub fn transpose(a: &Rows) -> Rows {
    let (r, c) = (a.len(), a[0].len());
    (0..c).map(|j| (0..r).map(|i| a[i][j]).collect()).collect()
}

pub fn matmul(a: &Rows, b: &Rows) -> Rows {
    let (n, k, m) = (a.len(), b.len(), b[0].len());
    let mut out = vec![vec![0.0; m]; n];
    for i in 0..n {
        for p in 0..k {
            let v = a[i][p];
            for j in 0..m {
                out[i][j] += v * b[p][j];
            }
        }
    }
    out
}

/// Solves `A Z = B` by Gaussian elimination with partial pivoting.
pub fn gauss_solve(a: &Rows, b: &Rows) -> Rows {
    let n = a.len();
    let m = b[0].len();
    let mut aug: Rows = a.iter().zip(b).map(|(ra, rb)| ra.iter().chain(rb).copied().collect()).collect();
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| aug[i][col].abs().total_cmp(&aug[j][col].abs())).unwrap();
        aug.swap(col, pivot);
        let p = aug[col][col];
        for i in col + 1..n {
            let f = aug[i][col] / p;
            if f != 0.0 {
                for j in col..n + m {
                    aug[i][j] -= f * aug[col][j];
                }
            }
        }
    }
    let mut z = vec![vec![0.0; m]; n];
    for i in (0..n).rev() {
        for j in 0..m {
            let mut s = aug[i][n + j];
            for k in i + 1..n {
                s -= aug[i][k] * z[k][j];
            }
            z[i][j] = s / aug[i][i];
        }
    }
    z
}

/// Eigenvalues and eigenvectors (columns of the returned matrix) of a
/// symmetric matrix by cyclic Jacobi rotations.
pub fn jacobi_eigen(a: &Rows) -> (Vec<f64>, Rows) {
    let n = a.len();
    let mut a = a.clone();
    let mut v: Rows = (0..n).map(|i| (0..n).map(|j| f64::from(u8::from(i == j))).collect()).collect();
    for _ in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        let diag: f64 = (0..n).map(|i| a[i][i] * a[i][i]).sum();
        if off <= 1e-30 * diag.max(f64::MIN_POSITIVE) {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q] == 0.0 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let (vkp, vkq) = (v[k][p], v[k][q]);
                    v[k][p] = c * vkp - s * vkq;
                    v[k][q] = s * vkp + c * vkq;
                }
            }
        }
    }
    ((0..n).map(|i| a[i][i]).collect(), v)
}

/// `Yᵀ X (XᵀX + λI)⁻¹` from the normal equations for `λ > 0`, and from the
/// eigen-pseudo-inverse of `XᵀX` for `λ = 0`. `x` is T×N, `y` is T×L; the
/// result is L×N.
pub fn ridge_oracle(x: &Rows, y: &Rows, lambda: f64) -> Rows {
    let xt = transpose(x);
    let mut g = matmul(&xt, x);
    let rhs = matmul(&xt, y);
    let n = g.len();
    let wt = if lambda > 0.0 {
        for i in 0..n {
            g[i][i] += lambda;
        }
        gauss_solve(&g, &rhs)
    } else {
        let (vals, vecs) = jacobi_eigen(&g);
        let top = vals.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        // Eigenvalues of XᵀX are squared singular values of X; the cutoff sits
        // well above the rounding floor of the rotations.
        let inv: Vec<f64> = vals.iter().map(|&e| if e > 1e-12 * top { 1.0 / e } else { 0.0 }).collect();
        let vt = transpose(&vecs);
        let scaled: Rows = vecs.iter().map(|row| row.iter().zip(&inv).map(|(v, i)| v * i).collect()).collect();
        let pinv = matmul(&scaled, &vt);
        matmul(&pinv, &rhs)
    };
    transpose(&wt)
}

pub fn frobenius(a: &Rows) -> f64 {
    a.iter().flatten().map(|v| v * v).sum::<f64>().sqrt()
}

pub fn relative_error(a: &Rows, b: &Rows) -> f64 {
    let diff: Rows = a.iter().zip(b).map(|(ra, rb)| ra.iter().zip(rb).map(|(p, q)| p - q).collect()).collect();
    frobenius(&diff) / frobenius(b).max(f64::MIN_POSITIVE)
}

/// A random problem with `T <= 50`, `N <= 10`. Some problems are wide
/// (`T < N`) or have a duplicated column, so the Gram matrix is singular.
pub fn random_problem(rng: &mut ChaCha8Rng) -> (Rows, Rows) {
    let t = rng.random_range(1..=50);
    let n = rng.random_range(1..=10);
    let l = rng.random_range(1..=3);
    let mut x: Rows = (0..t).map(|_| (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()).collect();
    if n >= 2 && rng.random_bool(0.2) {
        for row in &mut x {
            row[n - 1] = row[0];
        }
    }
    let y = (0..t).map(|_| (0..l).map(|_| rng.random_range(-1.0..1.0)).collect()).collect();
    (x, y)
}

pub fn to_mat(a: &Rows) -> Mat<f64> {
    Mat::from_fn(a.len(), a[0].len(), |i, j| a[i][j])
}

/// Largest relative error of `ridge_fit` against the oracle over `count`
/// random problems, cycling λ through 0, 0.1 and 1.
pub fn ridge_against_oracle(seed: u64, count: usize) -> Result<f64, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for case in 0..count {
        let (x, y) = random_problem(&mut rng);
        let lambda = [0.0, 0.1, 1.0][case % 3];
        let batch = TrainingBatch::new(to_mat(&x), to_mat(&y)).map_err(|e| e.to_string())?;
        let w = ridge_fit(&batch, lambda).map_err(|e| format!("case {case}: {e}"))?;
        let got: Rows = (0..w.outputs()).map(|i| (0..w.inputs()).map(|j| w.weights()[(i, j)]).collect()).collect();
        worst = worst.max(relative_error(&got, &ridge_oracle(&x, &y, lambda)));
    }
    Ok(worst)
}
