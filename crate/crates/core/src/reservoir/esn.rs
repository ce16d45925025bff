use faer::linalg::matmul::matmul;
use faer::{Accum, Col, Mat, MatMut, MatRef, Par};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal, Uniform};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::column;

/// Dimensions and gains of the conventional `tanh` reservoir.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EsnConfig {
    /// Input neurons `K`; zero disables the input layer.
    pub inputs: usize,
    /// Output neurons fed back into the reservoir `L`; zero disables feedback.
    pub feedback: usize,
    /// Reservoir neurons `N`.
    pub size: usize,
    /// Feedback strength applied to the unit-spectral-radius recurrent matrix.
    pub rho: f64,
    /// Projection gain for the input and feedback matrices.
    pub beta: f64,
}

impl EsnConfig {
    pub fn validate(&self) -> Result<()> {
        if self.size == 0 {
            return Err(Error::config("n", "reservoir size must be at least 1"));
        }
        if self.inputs > self.size || self.feedback > self.size {
            return Err(Error::config(
                "n",
                format!(
                    "reservoir size {} must be at least the input ({}) and output ({}) counts",
                    self.size, self.inputs, self.feedback
                ),
            ));
        }
        if !(self.rho > 0.0 && self.rho <= 1.0) {
            return Err(Error::config("rho", format!("{} is outside (0, 1]", self.rho)));
        }
        if !(self.beta > 0.0 && self.beta.is_finite()) {
            return Err(Error::config("beta", format!("{} must be positive", self.beta)));
        }
        Ok(())
    }
}

/// Fixed random projections of the float ESN.
#[derive(Debug, Clone, PartialEq)]
pub struct EsnWeights {
    /// `N × K` input projection, absent when `K = 0`.
    pub w_in: Option<Mat<f64>>,
    /// `N × N` orthogonal recurrent matrix.
    pub w: Mat<f64>,
    /// `N × L` feedback projection, absent when `L = 0`.
    pub w_back: Option<Mat<f64>>,
}

impl EsnWeights {
    /// Draws the recurrent matrix as the orthogonal QR factor of a standard
    /// normal matrix (with `R` made positive on the diagonal, so the factor is
    /// unique), then input and feedback projections uniform on `[-1, 1]`.
    pub fn generate<R: Rng + ?Sized>(cfg: &EsnConfig, rng: &mut R) -> Result<Self> {
        cfg.validate()?;
        let n = cfg.size;
        let gauss = Mat::<f64>::from_fn(n, n, |_, _| StandardNormal.sample(rng));
        let qr = gauss.qr();
        let r = qr.R();
        let mut w = qr.compute_Q();
        for j in 0..n {
            if r[(j, j)] < 0.0 {
                w.col_mut(j).iter_mut().for_each(|v| *v = -*v);
            }
        }
        let uniform = Uniform::new_inclusive(-1.0, 1.0).expect("valid range");
        let mut draw = |cols: usize| (cols > 0).then(|| Mat::from_fn(n, cols, |_, _| uniform.sample(rng)));
        let w_in = draw(cfg.inputs);
        let w_back = draw(cfg.feedback);
        Ok(Self { w_in, w, w_back })
    }

    pub fn size(&self) -> usize {
        self.w.nrows()
    }

    pub fn inputs(&self) -> usize {
        self.w_in.as_ref().map_or(0, |m| m.ncols())
    }

    pub fn feedback(&self) -> usize {
        self.w_back.as_ref().map_or(0, |m| m.ncols())
    }
}

/// Float reservoir state and update counter.
#[derive(Debug, Clone, PartialEq)]
pub struct EsnState {
    pub x: Vec<f64>,
    pub step: u64,
}

impl EsnState {
    pub fn zeros(n: usize) -> Self {
        Self { x: vec![0.0; n], step: 0 }
    }
}

/// Projection of the input layer for one step.
#[derive(Debug, Clone, Copy)]
pub enum EsnInput<'a> {
    None,
    /// One-hot input with the given active neuron.
    OneHot(usize),
    Dense(&'a [f64]),
}

/// One update `x ← tanh(ρ·W·x + β·W_in·u + β·W_back·y)`, writing into
/// `state` and using `scratch` for the pre-activation.
pub fn esn_advance(
    state: &mut EsnState,
    scratch: &mut Vec<f64>,
    input: EsnInput<'_>,
    y_prev: Option<&[f64]>,
    w: &EsnWeights,
    cfg: &EsnConfig,
) -> Result<()> {
    let n = w.size();
    if state.x.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: state.x.len() });
    }
    scratch.resize(n, 0.0);
    matmul(
        MatMut::from_column_major_slice_mut(scratch.as_mut_slice(), n, 1),
        Accum::Replace,
        w.w.as_ref(),
        MatRef::from_column_major_slice(state.x.as_slice(), n, 1),
        cfg.rho,
        Par::Seq,
    );
    match input {
        EsnInput::None => {}
        EsnInput::OneHot(k) => {
            let w_in = w.w_in.as_ref().ok_or(Error::config("inputs", "no input layer"))?;
            if k >= w_in.ncols() {
                return Err(Error::DimensionMismatch { expected: w_in.ncols(), got: k + 1 });
            }
            axpy(scratch, cfg.beta, column(w_in, k));
        }
        EsnInput::Dense(u) => {
            let w_in = w.w_in.as_ref().ok_or(Error::config("inputs", "no input layer"))?;
            project(scratch, w_in, u, cfg.beta, "input")?;
        }
    }
    if let Some(y) = y_prev {
        let w_back = w.w_back.as_ref().ok_or(Error::config("feedback", "no feedback layer"))?;
        project(scratch, w_back, y, cfg.beta, "feedback")?;
    }
    for (x, &p) in state.x.iter_mut().zip(scratch.iter()) {
        *x = p.tanh();
    }
    state.step += 1;
    Ok(())
}

fn axpy(acc: &mut [f64], a: f64, x: &[f64]) {
    for (o, &v) in acc.iter_mut().zip(x) {
        *o += a * v;
    }
}

fn project(acc: &mut [f64], m: &Mat<f64>, v: &[f64], gain: f64, what: &str) -> Result<()> {
    if v.len() != m.ncols() {
        return Err(Error::DimensionMismatch { expected: m.ncols(), got: v.len() });
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite(format!("{what} vector")));
    }
    for (j, &vj) in v.iter().enumerate() {
        if vj != 0.0 {
            axpy(acc, gain * vj, column(m, j));
        }
    }
    Ok(())
}

/// One ESN update, returning the new state.
pub fn esn_step(
    state: &EsnState,
    u: Option<&[f64]>,
    y_prev: Option<&[f64]>,
    w: &EsnWeights,
    cfg: &EsnConfig,
) -> Result<EsnState> {
    let mut next = state.clone();
    let mut scratch = Vec::new();
    let input = u.map_or(EsnInput::None, EsnInput::Dense);
    esn_advance(&mut next, &mut scratch, input, y_prev, w, cfg)?;
    Ok(next)
}

/// Largest singular value of `m` by power iteration on `mᵀm`.
pub fn spectral_norm(m: &Mat<f64>, tol: f64, max_iter: usize) -> f64 {
    let mut v = Col::<f64>::from_fn(m.ncols(), |i| 1.0 + (i % 7) as f64 * 0.1);
    v /= v.norm_l2();
    let mut estimate = 0.0;
    for _ in 0..max_iter {
        let mv = m * &v;
        let mut next = m.transpose() * &mv;
        let norm = next.norm_l2();
        if norm == 0.0 {
            return 0.0;
        }
        next /= norm;
        let s = norm.sqrt();
        let done = (s - estimate).abs() <= tol;
        estimate = s;
        v = next;
        if done {
            break;
        }
    }
    estimate
}
