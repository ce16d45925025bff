//! Reservoir update engines.

pub mod esn;
pub mod intesn;

use faer::Mat;
use serde::{Deserialize, Serialize};

pub use esn::{esn_advance, esn_step, spectral_norm, EsnConfig, EsnInput, EsnState, EsnWeights};
pub use intesn::{intesn_step, InputCoding, IntEsnConfig, IntState};

use crate::error::{Error, Result};
use crate::hd::{bits_per_element, PackedVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EngineKind {
    Esn,
    Intesn,
    /// Integer reservoir enlarged to the float reservoir's memory footprint.
    IntesnLarge,
}

impl EngineKind {
    pub fn label(&self) -> &'static str {
        match self {
            EngineKind::Esn => "esn",
            EngineKind::Intesn => "intesn",
            EngineKind::IntesnLarge => "intesn-large",
        }
    }

    pub fn is_integer(&self) -> bool {
        !matches!(self, EngineKind::Esn)
    }
}

impl std::fmt::Display for EngineKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

/// Integer reservoir size with the same state footprint as a float
/// reservoir of `float_size` 32-bit neurons.
pub fn footprint_matched_size(float_size: usize, kappa: i64) -> Result<usize> {
    let bits = bits_per_element(kappa)? as usize;
    Ok(float_size * (32 / bits))
}

/// Input presented to an engine at one step.
#[derive(Debug, Clone, Copy)]
pub enum Stimulus<'a> {
    None,
    /// A symbol from a finite alphabet: a one-hot input for the float network,
    /// a codebook lookup for the integer network.
    Symbol(usize),
    /// Real-valued input sample.
    Values(&'a [f64]),
}

#[derive(Debug, Clone)]
pub struct EsnEngine {
    cfg: EsnConfig,
    weights: EsnWeights,
    state: EsnState,
    scratch: Vec<f64>,
}

impl EsnEngine {
    pub fn new(cfg: EsnConfig, weights: EsnWeights) -> Result<Self> {
        cfg.validate()?;
        if weights.size() != cfg.size || weights.inputs() != cfg.inputs || weights.feedback() != cfg.feedback {
            return Err(Error::config("esn", "weights do not match the configuration"));
        }
        Ok(Self { state: EsnState::zeros(cfg.size), scratch: vec![0.0; cfg.size], cfg, weights })
    }

    pub fn config(&self) -> &EsnConfig {
        &self.cfg
    }

    pub fn weights(&self) -> &EsnWeights {
        &self.weights
    }

    pub fn state(&self) -> &EsnState {
        &self.state
    }

    pub fn state_mut(&mut self) -> &mut EsnState {
        &mut self.state
    }
}

#[derive(Debug, Clone)]
pub struct IntEngine {
    cfg: IntEsnConfig,
    state: IntState,
}

impl IntEngine {
    pub fn new(cfg: IntEsnConfig) -> Result<Self> {
        Ok(Self { state: IntState::zeros(cfg.size(), cfg.kappa())?, cfg })
    }

    pub fn config(&self) -> &IntEsnConfig {
        &self.cfg
    }

    pub fn state(&self) -> &IntState {
        &self.state
    }

    pub fn set_state(&mut self, state: IntState) -> Result<()> {
        if state.vector().dim() != self.cfg.size() {
            return Err(Error::DimensionMismatch { expected: self.cfg.size(), got: state.vector().dim() });
        }
        self.state = state;
        Ok(())
    }

    pub fn packed_state(&self) -> Result<PackedVector> {
        self.state.packed()
    }

    /// Advances one step. `feedback` is the previous output `y(n-1)`, encoded
    /// through the output memory.
    pub fn step(&mut self, input: Stimulus<'_>, feedback: Option<&[f64]>) -> Result<()> {
        let u_owned;
        let u = match (input, self.cfg.input()) {
            (Stimulus::None, _) => None,
            (Stimulus::Symbol(s), Some(InputCoding::Symbols(m))) => {
                Some(m.get(s).ok_or(Error::DimensionMismatch { expected: m.len(), got: s + 1 })?)
            }
            (Stimulus::Values(v), Some(InputCoding::Values(enc))) => {
                u_owned = enc.encode(v)?;
                Some(&u_owned)
            }
            (_, None) => return Err(Error::config("input", "engine has no input memory")),
            (Stimulus::Symbol(_), Some(_)) => {
                return Err(Error::config("input", "engine expects real-valued input"));
            }
            (Stimulus::Values(_), Some(_)) => {
                return Err(Error::config("input", "engine expects symbolic input"));
            }
        };
        let y_owned;
        let y = match feedback {
            None => None,
            Some(y) => {
                let enc = self.cfg.output().ok_or(Error::config("feedback", "engine has no output memory"))?;
                y_owned = enc.encode(y)?;
                Some(&y_owned)
            }
        };
        self.state.advance(u, y, &self.cfg)
    }
}

/// A reservoir of either flavour behind a common stepping interface.
#[derive(Debug, Clone)]
pub enum Engine {
    Esn(EsnEngine),
    Int(IntEngine),
}

impl Engine {
    pub fn size(&self) -> usize {
        match self {
            Engine::Esn(e) => e.cfg.size,
            Engine::Int(e) => e.cfg.size(),
        }
    }

    pub fn steps(&self) -> u64 {
        match self {
            Engine::Esn(e) => e.state.step,
            Engine::Int(e) => e.state.step(),
        }
    }

    /// Resets the state to zeros.
    pub fn reset(&mut self) {
        match self {
            Engine::Esn(e) => e.state = EsnState::zeros(e.cfg.size),
            Engine::Int(e) => e.state = IntState::zeros(e.cfg.size(), e.cfg.kappa()).expect("size validated"),
        }
    }

    /// Advances one step. `feedback` is the previous output `y(n-1)`.
    pub fn step(&mut self, input: Stimulus<'_>, feedback: Option<&[f64]>) -> Result<()> {
        match self {
            Engine::Esn(e) => {
                let input = match input {
                    Stimulus::None => EsnInput::None,
                    Stimulus::Symbol(s) => EsnInput::OneHot(s),
                    Stimulus::Values(v) => EsnInput::Dense(v),
                };
                esn_advance(&mut e.state, &mut e.scratch, input, feedback, &e.weights, &e.cfg)
            }
            Engine::Int(e) => e.step(input, feedback),
        }
    }

    /// Copies the current state into `out` as reals.
    pub fn write_state(&self, out: &mut [f64]) {
        match self {
            Engine::Esn(e) => out.copy_from_slice(&e.state.x),
            Engine::Int(e) => {
                for (o, &v) in out.iter_mut().zip(e.state.vector().as_slice()) {
                    *o = f64::from(v);
                }
            }
        }
    }

    pub fn state_vector(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.size()];
        self.write_state(&mut out);
        out
    }
}

/// Drives `engine` over `inputs`, teacher-forcing `teacher[n-1]` as feedback
/// at step `n` when given, and returns the states after the washout, one row
/// per kept step.
pub fn run_collect(
    engine: &mut Engine,
    inputs: &[Stimulus<'_>],
    teacher: Option<&[Vec<f64>]>,
    washout: usize,
) -> Result<Mat<f64>> {
    if inputs.is_empty() {
        return Err(Error::Empty("input sequence"));
    }
    if washout >= inputs.len() {
        return Err(Error::config(
            "washout",
            format!("{washout} must be shorter than the sequence ({})", inputs.len()),
        ));
    }
    if let Some(t) = teacher {
        if t.len() != inputs.len() {
            return Err(Error::DimensionMismatch { expected: inputs.len(), got: t.len() });
        }
    }
    let n = engine.size();
    let mut states = Mat::zeros(inputs.len() - washout, n);
    let mut row = vec![0.0; n];
    for (i, &input) in inputs.iter().enumerate() {
        let fb = match (teacher, i) {
            (Some(t), i) if i > 0 => Some(t[i - 1].as_slice()),
            _ => None,
        };
        engine.step(input, fb)?;
        if i >= washout {
            engine.write_state(&mut row);
            for (j, &v) in row.iter().enumerate() {
                states[(i - washout, j)] = v;
            }
        }
    }
    Ok(states)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hd::{HyperVector, ItemMemory};
    use crate::linalg::entries;
    use crate::rng::seeded;

    fn int_engine(n: usize, kappa: i64, seed: u64) -> Engine {
        let m = ItemMemory::random(27, n, &mut seeded(seed, 0)).unwrap();
        let cfg = IntEsnConfig::new(kappa, Some(InputCoding::Symbols(m)), None).unwrap();
        Engine::Int(IntEngine::new(cfg).unwrap())
    }

    fn esn_engine(n: usize) -> Engine {
        let cfg = EsnConfig { inputs: 27, feedback: 0, size: n, rho: 0.94, beta: 0.1 };
        let w = EsnWeights::generate(&cfg, &mut seeded(1, 0)).unwrap();
        Engine::Esn(EsnEngine::new(cfg, w).unwrap())
    }

    #[test]
    fn collect_shapes_and_bounds() {
        let tokens: Vec<usize> = (0..40).map(|i| (i * 7) % 27).collect();
        let inputs: Vec<Stimulus> = tokens.iter().map(|&t| Stimulus::Symbol(t)).collect();
        let mut e = int_engine(100, 3, 1);
        let x = run_collect(&mut e, &inputs, None, 39).unwrap();
        assert_eq!(x.nrows(), 1);
        e.reset();
        let x = run_collect(&mut e, &inputs, None, 5).unwrap();
        assert_eq!((x.nrows(), x.ncols()), (35, 100));
        assert!(entries(&x).all(|v| v.abs() <= 3.0));
        assert!(run_collect(&mut e, &[], None, 0).is_err());
        assert!(run_collect(&mut e, &inputs, None, 40).is_err());
    }

    #[test]
    fn esn_without_input_stays_zero() {
        let mut e = esn_engine(50);
        let inputs = vec![Stimulus::None; 30];
        let x = run_collect(&mut e, &inputs, None, 0).unwrap();
        assert!(entries(&x).all(|v| v == 0.0));
    }

    #[test]
    fn differently_initialised_integer_reservoirs_converge() {
        let n = 1000;
        let mut a = int_engine(n, 3, 9);
        let mut b = a.clone();
        if let Engine::Int(e) = &mut b {
            let start = HyperVector::random_bipolar(n, &mut seeded(77, 0)).unwrap();
            let start = start.clip(3).unwrap();
            e.set_state(IntState::from_vector(start, 3).unwrap()).unwrap();
        }
        let mut rng = seeded(10, 0);
        for _ in 0..200 {
            let t = rand::Rng::random_range(&mut rng, 0..27);
            a.step(Stimulus::Symbol(t), None).unwrap();
            b.step(Stimulus::Symbol(t), None).unwrap();
        }
        let (xa, xb) = (a.state_vector(), b.state_vector());
        let dot: f64 = xa.iter().zip(&xb).map(|(p, q)| p * q).sum();
        let na: f64 = xa.iter().map(|p| p * p).sum::<f64>().sqrt();
        let nb: f64 = xb.iter().map(|p| p * p).sum::<f64>().sqrt();
        assert!(dot / (na * nb) > 0.95, "{}", dot / (na * nb));
    }

    #[test]
    fn shift_recurrence_is_linear_without_clipping() {
        let n = 256;
        let m = ItemMemory::random(5, n, &mut seeded(3, 0)).unwrap();
        let cfg = IntEsnConfig::new(127, Some(InputCoding::Symbols(m.clone())), None).unwrap();
        let mut e = Engine::Int(IntEngine::new(cfg).unwrap());
        let seq: Vec<usize> = (0..20).map(|i| (i * 3 + 1) % 5).collect();
        for &s in &seq {
            e.step(Stimulus::Symbol(s), None).unwrap();
        }
        let mut expected = vec![0i64; n];
        for (j, &s) in seq.iter().enumerate() {
            let shift = seq.len() - 1 - j;
            for (i, &v) in m.get(s).unwrap().as_slice().iter().enumerate() {
                expected[(i + shift) % n] += i64::from(v);
            }
        }
        let got: Vec<i64> = e.state_vector().iter().map(|&v| v as i64).collect();
        assert_eq!(got, expected);
    }

    #[test]
    fn stimulus_kind_mismatch_is_an_error() {
        let mut e = int_engine(64, 3, 1);
        assert!(e.step(Stimulus::Values(&[0.5]), None).is_err());
        assert!(e.step(Stimulus::Symbol(27), None).is_err());
        assert!(e.step(Stimulus::None, Some(&[0.1])).is_err());
    }

    #[test]
    fn footprint_sizes() {
        assert_eq!(footprint_matched_size(100, 3).unwrap(), 1000);
        assert_eq!(footprint_matched_size(800, 7).unwrap(), 6400);
    }
}
