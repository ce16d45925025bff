//! Linear readouts trained by ridge regression.

use faer::linalg::solvers::Solve;
use faer::{Mat, Side};

use crate::error::{Error, Result};
use crate::linalg::{all_finite, column};

/// Singular values below this fraction of the largest are treated as zero
/// when `λ = 0`.
pub const PINV_RELATIVE_TOLERANCE: f64 = 1e-10;

/// Reservoir states paired with desired outputs, one row per time step.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainingBatch {
    states: Mat<f64>,
    targets: Mat<f64>,
}

impl TrainingBatch {
    pub fn new(states: Mat<f64>, targets: Mat<f64>) -> Result<Self> {
        if states.nrows() == 0 {
            return Err(Error::Empty("training batch"));
        }
        if states.nrows() != targets.nrows() {
            return Err(Error::DimensionMismatch { expected: states.nrows(), got: targets.nrows() });
        }
        if !all_finite(&states) {
            return Err(Error::NonFinite("training states".into()));
        }
        if !all_finite(&targets) {
            return Err(Error::NonFinite("training targets".into()));
        }
        Ok(Self { states, targets })
    }

    /// Design matrix `[x(n); u(n)]` with the inputs appended as extra columns.
    pub fn with_inputs(states: Mat<f64>, inputs: &Mat<f64>, targets: Mat<f64>) -> Result<Self> {
        if inputs.nrows() != states.nrows() {
            return Err(Error::DimensionMismatch { expected: states.nrows(), got: inputs.nrows() });
        }
        let n = states.ncols();
        let design =
            Mat::from_fn(
                states.nrows(),
                n + inputs.ncols(),
                |i, j| {
                    if j < n {
                        states[(i, j)]
                    } else {
                        inputs[(i, j - n)]
                    }
                },
            );
        Self::new(design, targets)
    }

    pub fn states(&self) -> &Mat<f64> {
        &self.states
    }

    pub fn targets(&self) -> &Mat<f64> {
        &self.targets
    }

    pub fn len(&self) -> usize {
        self.states.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.states.nrows() == 0
    }
}

/// `L × N` readout weights and the regularization they were fitted with.
#[derive(Debug, Clone, PartialEq)]
pub struct ReadoutMatrix {
    weights: Mat<f64>,
    lambda: f64,
}

impl ReadoutMatrix {
    pub fn new(weights: Mat<f64>, lambda: f64) -> Result<Self> {
        if !all_finite(&weights) {
            return Err(Error::NonFinite("readout weights".into()));
        }
        Ok(Self { weights, lambda })
    }

    pub fn weights(&self) -> &Mat<f64> {
        &self.weights
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn outputs(&self) -> usize {
        self.weights.nrows()
    }

    pub fn inputs(&self) -> usize {
        self.weights.ncols()
    }

    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.weights.ncols() {
            return Err(Error::DimensionMismatch { expected: self.weights.ncols(), got: x.len() });
        }
        let mut y = vec![0.0; self.outputs()];
        for (j, &xj) in x.iter().enumerate() {
            if xj != 0.0 {
                for (o, &w) in y.iter_mut().zip(column(&self.weights, j)) {
                    *o += w * xj;
                }
            }
        }
        Ok(y)
    }

    /// Outputs for every row of `states`, as a `T × L` matrix.
    pub fn apply_rows(&self, states: &Mat<f64>) -> Result<Mat<f64>> {
        if states.ncols() != self.weights.ncols() {
            return Err(Error::DimensionMismatch { expected: self.weights.ncols(), got: states.ncols() });
        }
        Ok(states * self.weights.transpose())
    }

    /// Splits a readout fitted on concatenated targets into consecutive
    /// blocks of `width` outputs each.
    pub fn split_outputs(&self, width: usize) -> Result<Vec<ReadoutMatrix>> {
        if width == 0 || !self.outputs().is_multiple_of(width) {
            return Err(Error::config("width", "must divide the output count"));
        }
        Ok((0..self.outputs() / width)
            .map(|b| ReadoutMatrix { weights: self.weights.subrows(b * width, width).to_owned(), lambda: self.lambda })
            .collect())
    }
}

/// Fits `W_out = Yᵀ X (XᵀX + λI)⁻¹`.
///
/// With `λ > 0` the regularized normal equations are solved by Cholesky on
/// whichever of `XᵀX` or `XXᵀ` is smaller. With `λ = 0` the minimum-norm
/// least-squares solution is computed from a truncated SVD (after a QR
/// reduction of the tall or wide design matrix).
pub fn ridge_fit(batch: &TrainingBatch, lambda: f64) -> Result<ReadoutMatrix> {
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::config("lambda", format!("{lambda} must be finite and non-negative")));
    }
    let x = &batch.states;
    let y = &batch.targets;
    let wt = if lambda > 0.0 { regularized(x, y, lambda)? } else { min_norm(x, y)? };
    ReadoutMatrix::new(wt.transpose().to_owned(), lambda)
}

fn regularized(x: &Mat<f64>, y: &Mat<f64>, lambda: f64) -> Result<Mat<f64>> {
    let (t, n) = (x.nrows(), x.ncols());
    if t >= n {
        let mut g = x.transpose() * x;
        for i in 0..n {
            g[(i, i)] += lambda;
        }
        let rhs = x.transpose() * y;
        let llt = g
            .llt(Side::Lower)
            .map_err(|_| Error::Numerical("regularized Gram matrix is not positive definite".into()))?;
        Ok(llt.solve(&rhs))
    } else {
        let mut k = x * x.transpose();
        for i in 0..t {
            k[(i, i)] += lambda;
        }
        let llt = k
            .llt(Side::Lower)
            .map_err(|_| Error::Numerical("regularized kernel matrix is not positive definite".into()))?;
        let a = llt.solve(y);
        Ok(x.transpose() * &a)
    }
}

fn min_norm(x: &Mat<f64>, y: &Mat<f64>) -> Result<Mat<f64>> {
    let (t, n) = (x.nrows(), x.ncols());
    if t >= n {
        // X = Q R with R square; X⁺Y = R⁺ QᵀY.
        let qr = x.qr();
        let qty = qr.compute_thin_Q().transpose() * y;
        svd_solve(&qr.thin_R().to_owned(), &qty)
    } else {
        // Xᵀ = Q R, so X = Rᵀ Qᵀ and the minimum-norm solution is Q (Rᵀ)⁺ Y.
        let qr = x.transpose().qr();
        let rt = qr.thin_R().transpose().to_owned();
        let z = svd_solve(&rt, y)?;
        Ok(qr.compute_thin_Q() * &z)
    }
}

/// `A⁺ B` for square `A`, dropping singular values below the relative
/// tolerance.
fn svd_solve(a: &Mat<f64>, b: &Mat<f64>) -> Result<Mat<f64>> {
    let svd = a.svd().map_err(|e| Error::Numerical(format!("SVD did not converge: {e:?}")))?;
    let s = svd.S().column_vector();
    let smax = (0..s.nrows()).map(|i| s[i]).fold(0.0, f64::max);
    let mut utb = svd.U().transpose() * b;
    for i in 0..s.nrows() {
        let scale = if smax > 0.0 && s[i] > PINV_RELATIVE_TOLERANCE * smax { 1.0 / s[i] } else { 0.0 };
        for j in 0..utb.ncols() {
            utb[(i, j)] *= scale;
        }
    }
    Ok(svd.V() * &utb)
}

/// `y = W_out · x`.
pub fn readout_apply(w: &ReadoutMatrix, x: &[f64]) -> Result<Vec<f64>> {
    w.apply(x)
}

/// Index of the largest output; ties go to the lowest index.
pub fn winner_take_all(y: &[f64]) -> Result<usize> {
    if y.is_empty() {
        return Err(Error::Empty("output vector"));
    }
    let mut best = 0;
    for (i, &v) in y.iter().enumerate() {
        if !v.is_finite() {
            return Err(Error::NonFinite("output vector".into()));
        }
        if v > y[best] {
            best = i;
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::entries;

    fn from_rows(r: usize, c: usize, v: &[f64]) -> Mat<f64> {
        Mat::from_fn(r, c, |i, j| v[i * c + j])
    }

    fn batch(x: Mat<f64>, y: Mat<f64>) -> TrainingBatch {
        TrainingBatch::new(x, y).unwrap()
    }

    #[test]
    fn identity_design() {
        let y = from_rows(3, 2, &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        let w = ridge_fit(&batch(Mat::identity(3, 3), y.clone()), 0.0).unwrap();
        assert!((w.weights() - y.transpose()).norm_max() < 1e-12);
    }

    #[test]
    fn heavy_shrinkage() {
        let x = Mat::from_fn(20, 4, |i, j| ((i * 3 + j) % 5) as f64 - 2.0);
        let y = Mat::from_fn(20, 2, |i, j| (i + j) as f64);
        let w = ridge_fit(&batch(x, y), 1e12).unwrap();
        assert!(w.weights().norm_max() < 1e-6);
    }

    #[test]
    fn two_by_two_closed_form() {
        let x = from_rows(2, 2, &[1.0, 0.0, 0.0, 2.0]);
        let y = from_rows(2, 1, &[1.0, 4.0]);
        let w = ridge_fit(&batch(x, y), 1.0).unwrap();
        // (XᵀX + I) = diag(2, 5), XᵀY = (1, 8).
        assert!((w.weights()[(0, 0)] - 0.5).abs() < 1e-14);
        assert!((w.weights()[(0, 1)] - 1.6).abs() < 1e-14);
    }

    #[test]
    fn singular_design_gives_minimum_norm() {
        // Duplicate column: the minimum-norm solution splits weight evenly.
        let x = from_rows(3, 2, &[1.0, 1.0, 2.0, 2.0, 3.0, 3.0]);
        let y = from_rows(3, 1, &[2.0, 4.0, 6.0]);
        let w = ridge_fit(&batch(x, y), 0.0).unwrap();
        assert!((w.weights()[(0, 0)] - 1.0).abs() < 1e-12);
        assert!((w.weights()[(0, 1)] - 1.0).abs() < 1e-12);
        let zero = ridge_fit(&batch(Mat::zeros(4, 3), Mat::from_fn(4, 1, |_, _| 1.0)), 0.0).unwrap();
        assert_eq!((zero.weights().nrows(), zero.weights().ncols()), (1, 3));
        assert!(entries(zero.weights()).all(|v| v == 0.0));
    }

    #[test]
    fn wide_design_interpolates() {
        let x = Mat::from_fn(3, 6, |i, j| ((i + 1) * (j + 2) % 7) as f64);
        let y = Mat::from_fn(3, 1, |i, _| i as f64 - 1.0);
        let w = ridge_fit(&batch(x.clone(), y.clone()), 0.0).unwrap();
        let pred = w.apply_rows(&x).unwrap();
        assert!((pred - y).norm_max() < 1e-10);
    }

    #[test]
    fn batch_validation() {
        assert!(TrainingBatch::new(Mat::zeros(2, 2), Mat::zeros(3, 1)).is_err());
        assert!(TrainingBatch::new(Mat::from_fn(1, 1, |_, _| f64::NAN), Mat::zeros(1, 1)).is_err());
        assert!(TrainingBatch::new(Mat::zeros(0, 2), Mat::zeros(0, 1)).is_err());
        let b = batch(Mat::identity(2, 2), Mat::zeros(2, 1));
        assert!(ridge_fit(&b, -1.0).is_err());
    }

    #[test]
    fn apply_examples() {
        let w = ReadoutMatrix::new(Mat::identity(3, 3), 0.0).unwrap();
        assert_eq!(readout_apply(&w, &[1.0, -2.0, 3.0]).unwrap(), vec![1.0, -2.0, 3.0]);
        assert_eq!(readout_apply(&w, &[0.0; 3]).unwrap(), vec![0.0; 3]);
        let w = ReadoutMatrix::new(from_rows(1, 2, &[2.0, -1.0]), 0.0).unwrap();
        assert_eq!(readout_apply(&w, &[3.0, 4.0]).unwrap(), vec![2.0]);
        assert!(readout_apply(&w, &[1.0]).is_err());
    }

    #[test]
    fn inputs_can_be_concatenated() {
        let x = Mat::from_fn(5, 2, |i, j| (i + j) as f64);
        let u = Mat::from_fn(5, 1, |i, _| i as f64 * 0.5);
        let b = TrainingBatch::with_inputs(x, &u, Mat::zeros(5, 1)).unwrap();
        assert_eq!(b.states().ncols(), 3);
        assert_eq!(b.states()[(4, 2)], 2.0);
    }

    #[test]
    fn winner_take_all_examples() {
        assert_eq!(winner_take_all(&[0.1, 0.9, 0.3]).unwrap(), 1);
        assert_eq!(winner_take_all(&[0.5, 0.5]).unwrap(), 0);
        assert!(winner_take_all(&[]).is_err());
        let y = [0.2, -1.0, 3.5, 3.4];
        assert_eq!(winner_take_all(&y.map(|v| v * 7.5)).unwrap(), winner_take_all(&y).unwrap());
    }

    #[test]
    fn split_outputs_blocks() {
        let w = ReadoutMatrix::new(Mat::from_fn(6, 3, |i, j| (i * 3 + j) as f64), 0.5).unwrap();
        let parts = w.split_outputs(2).unwrap();
        assert_eq!(parts.len(), 3);
        assert_eq!(parts[2].weights()[(1, 2)], 17.0);
        assert!(w.split_outputs(4).is_err());
    }
}
