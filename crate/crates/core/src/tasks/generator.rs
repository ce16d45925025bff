//! Signal generation: teacher-forced training through the output feedback
//! path, then free running on the network's own predictions.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::mackey_glass::MackeyGlass;
use super::metrics::{dominant_frequency_bin, nrmse, std_dev};
use super::result::RunRecord;
use super::{check_positive, config_echo, split_runs, Outcome, Protocol, TrainedModel};
use crate::error::{Error, Result};
use crate::hd::{LevelCoding, Quantizer, ValueEncoder};
use crate::readout::{ridge_fit, ReadoutMatrix, TrainingBatch};
use crate::reservoir::{
    footprint_matched_size, Engine, EngineKind, EsnConfig, EsnEngine, EsnWeights, IntEngine, IntEsnConfig, Stimulus,
};
use crate::rng::{seeded, streams};
use crate::Mat;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum SignalSource {
    /// `amplitude · sin(n / period)`.
    Sine {
        amplitude: f64,
        period: f64,
    },
    /// Mackey-Glass series sampled at unit steps.
    MackeyGlass(MackeyGlass),
    Constant {
        value: f64,
    },
}

impl SignalSource {
    /// `len` samples after skipping `skip` leading samples.
    pub fn samples(&self, skip: usize, len: usize) -> Result<Vec<f64>> {
        Ok(match *self {
            SignalSource::Sine { amplitude, period } => {
                (skip..skip + len).map(|n| amplitude * (n as f64 / period).sin()).collect()
            }
            SignalSource::MackeyGlass(mg) => {
                let mut s = mg.generate(skip + len)?;
                s.drain(..skip);
                s
            }
            SignalSource::Constant { value } => vec![value; len],
        })
    }
}

/// Where the float network sees quantized data.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EsnQuantization {
    /// Raw values throughout.
    #[default]
    None,
    /// Quantized teacher signal; raw predictions fed back when free running.
    TrainOnly,
    /// Quantized teacher signal and quantized feedback of predictions.
    Both,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorConfig {
    pub signal: SignalSource,
    /// Leading samples of the signal discarded before training starts.
    pub transient: usize,
    /// Apply `tanh(x - 1)` to the signal before use.
    pub squash: bool,
    pub n: usize,
    pub train_len: usize,
    pub washout: usize,
    /// Free-running steps after training.
    pub horizon: usize,
    /// Free-running steps scored by `nrmse`.
    pub score_steps: usize,
    pub kappa: i64,
    pub rho: f64,
    pub beta: f64,
    /// Constant input of the float network; `0` disables its input layer.
    pub bias: f64,
    pub lambda: f64,
    pub quantizer: Quantizer,
    pub esn_quantization: EsnQuantization,
    /// Half-width of uniform noise added to the teacher signal fed back to
    /// the float network during training.
    pub teacher_noise: f64,
}

impl GeneratorConfig {
    /// `0.5 sin(n/4)` with a 1000-neuron reservoir.
    pub fn sine() -> Self {
        Self {
            signal: SignalSource::Sine { amplitude: 0.5, period: 4.0 },
            transient: 0,
            squash: false,
            n: 1000,
            train_len: 3000,
            washout: 1000,
            horizon: 100,
            score_steps: 100,
            kappa: 3,
            rho: 0.8,
            beta: 1.0,
            bias: 0.0,
            lambda: 0.0,
            quantizer: Quantizer::new(-0.5, 0.5, 0.01).expect("valid quantizer"),
            esn_quantization: EsnQuantization::None,
            teacher_noise: 0.0,
        }
    }

    /// Squashed Mackey-Glass series (`τ = 17`).
    pub fn mackey() -> Self {
        Self {
            signal: SignalSource::MackeyGlass(MackeyGlass::default()),
            transient: 1000,
            squash: true,
            horizon: 300,
            score_steps: 84,
            bias: 0.2,
            quantizer: Quantizer::new(-1.0, 1.0, 0.01).expect("valid quantizer"),
            ..Self::sine()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::config("n", "reservoir size must be at least 1"));
        }
        if self.washout >= self.train_len {
            return Err(Error::config("washout", "must be shorter than train_len"));
        }
        if self.horizon == 0 {
            return Err(Error::config("horizon", "must be at least 1"));
        }
        if self.score_steps < 2 || self.score_steps > self.horizon {
            return Err(Error::config("score_steps", "must lie in [2, horizon]"));
        }
        if !(1..=127).contains(&self.kappa) {
            return Err(Error::InvalidThreshold(self.kappa));
        }
        check_positive("rho", self.rho)?;
        if self.rho > 1.0 {
            return Err(Error::config("rho", format!("{} is outside (0, 1]", self.rho)));
        }
        check_positive("beta", self.beta)?;
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return Err(Error::config("lambda", "must be finite and non-negative"));
        }
        if !(self.teacher_noise >= 0.0 && self.teacher_noise.is_finite()) {
            return Err(Error::config("teacher_noise", "must be finite and non-negative"));
        }
        if !self.bias.is_finite() {
            return Err(Error::config("bias", "must be finite"));
        }
        Ok(())
    }

    /// The target series: training part followed by the free-run horizon.
    pub fn series(&self) -> Result<Vec<f64>> {
        let mut s = self.signal.samples(self.transient, self.train_len + self.horizon)?;
        if self.squash {
            s.iter_mut().for_each(|v| *v = (*v - 1.0).tanh());
        }
        if let Some((i, v)) = s.iter().enumerate().find(|(_, v)| !self.quantizer.contains(**v)) {
            return Err(Error::config(
                "quantizer",
                format!("target value {v} at step {i} lies outside [{}, {}]", self.quantizer.lo(), self.quantizer.hi()),
            ));
        }
        Ok(s)
    }
}

fn build_engine(cfg: &GeneratorConfig, kind: EngineKind, seed: u64) -> Result<Engine> {
    Ok(match kind {
        EngineKind::Esn => {
            let ec = EsnConfig {
                inputs: usize::from(cfg.bias != 0.0),
                feedback: 1,
                size: cfg.n,
                rho: cfg.rho,
                beta: cfg.beta,
            };
            let w = EsnWeights::generate(&ec, &mut seeded(seed, streams::WEIGHTS))?;
            Engine::Esn(EsnEngine::new(ec, w)?)
        }
        EngineKind::Intesn | EngineKind::IntesnLarge => {
            let n = if kind == EngineKind::IntesnLarge { footprint_matched_size(cfg.n, cfg.kappa)? } else { cfg.n };
            let enc = ValueEncoder::generate(
                cfg.quantizer,
                1,
                n,
                LevelCoding::Linear,
                &mut seeded(seed, streams::OUTPUT_MEMORY),
            )?;
            Engine::Int(IntEngine::new(IntEsnConfig::new(cfg.kappa, None, Some(enc))?)?)
        }
    })
}

/// Prediction and ground truth over the free-run horizon of one network.
#[derive(Debug, Clone)]
pub struct GeneratorRun {
    pub prediction: Vec<f64>,
    pub truth: Vec<f64>,
    pub readout: ReadoutMatrix,
    pub engine: Engine,
}

pub fn generator_run(cfg: &GeneratorConfig, kind: EngineKind, seed: u64) -> Result<GeneratorRun> {
    cfg.validate()?;
    let y = cfg.series()?;
    let q = &cfg.quantizer;
    let is_esn = kind == EngineKind::Esn;
    let quantized_teacher = is_esn && cfg.esn_quantization != EsnQuantization::None;
    let teacher: Vec<f64> = if quantized_teacher { y.iter().map(|&v| q.quantize(v)).collect() } else { y.clone() };
    let mut engine = build_engine(cfg, kind, seed)?;
    let bias = [cfg.bias];
    let input = if is_esn && cfg.bias != 0.0 { Stimulus::Values(&bias) } else { Stimulus::None };
    let mut noise = seeded(seed, streams::NOISE);

    let n = engine.size();
    let rows = cfg.train_len - cfg.washout;
    let mut states = Mat::<f64>::zeros(rows, n);
    let mut targets = Mat::<f64>::zeros(rows, 1);
    let mut x = vec![0.0; n];
    for i in 0..cfg.train_len {
        let fb = if i == 0 {
            0.0
        } else if is_esn && cfg.teacher_noise > 0.0 {
            teacher[i - 1] + noise.random_range(-cfg.teacher_noise..=cfg.teacher_noise)
        } else {
            teacher[i - 1]
        };
        engine.step(input, Some(&[fb]))?;
        if i >= cfg.washout {
            let r = i - cfg.washout;
            engine.write_state(&mut x);
            for (j, &v) in x.iter().enumerate() {
                states[(r, j)] = v;
            }
            targets[(r, 0)] = teacher[i];
        }
    }
    let readout = ridge_fit(&TrainingBatch::new(states, targets)?, cfg.lambda)?;

    let quantize_feedback = is_esn && cfg.esn_quantization == EsnQuantization::Both;
    let mut fb = teacher[cfg.train_len - 1];
    let mut prediction = Vec::with_capacity(cfg.horizon);
    for _ in 0..cfg.horizon {
        engine.step(input, Some(&[fb]))?;
        engine.write_state(&mut x);
        let p = readout.apply(&x)?[0];
        if !p.is_finite() {
            return Err(Error::NonFinite("free-running prediction".into()));
        }
        prediction.push(p);
        fb = if quantize_feedback { q.quantize(p) } else { p };
    }
    Ok(GeneratorRun { prediction, truth: y[cfg.train_len..].to_vec(), readout, engine })
}

/// Largest absolute difference between consecutive samples.
pub fn max_jump(v: &[f64]) -> f64 {
    v.windows(2).map(|w| (w[1] - w[0]).abs()).fold(0.0, f64::max)
}

fn record(cfg: &GeneratorConfig, kind: EngineKind, seed: u64, run: &GeneratorRun) -> Result<RunRecord> {
    let k = cfg.score_steps;
    let score = match nrmse(&run.prediction[..k], &run.truth[..k]) {
        Ok(v) => v,
        // A constant target has no scale to normalize by; report the RMSE.
        Err(Error::Config { .. }) => {
            (run.prediction[..k].iter().zip(&run.truth[..k]).map(|(p, t)| (p - t).powi(2)).sum::<f64>() / k as f64)
                .sqrt()
        }
        Err(e) => return Err(e),
    };
    let bins = 256;
    Ok(RunRecord::new(kind.label(), seed)
        .with("nrmse", vec![score])
        .with("prediction", run.prediction.clone())
        .with("truth", run.truth.clone())
        .with(
            "dominant_bin",
            vec![
                dominant_frequency_bin(&run.prediction[..k], bins) as f64,
                dominant_frequency_bin(&run.truth[..k], bins) as f64,
            ],
        )
        .with("max_abs", vec![run.prediction.iter().fold(0.0, |m: f64, v| m.max(v.abs()))])
        .with("max_jump", vec![max_jump(&run.prediction)])
        .with("truth_std", vec![std_dev(&run.truth)]))
}

/// Free-running prediction for every engine and seed. `experiment` names
/// the result (e.g. `sine`, `mackey`).
pub fn run_generator(experiment: &str, cfg: &GeneratorConfig, protocol: &Protocol) -> Result<Outcome> {
    cfg.validate()?;
    cfg.series()?;
    let runs = protocol.run(|kind, seed| {
        let run = generator_run(cfg, kind, seed)?;
        let rec = record(cfg, kind, seed, &run)?;
        let model = protocol.keeps(seed).then(|| TrainedModel {
            kind,
            seed,
            reservoir: run.engine,
            readouts: vec![("output".into(), run.readout)],
        });
        Ok((rec, model))
    })?;
    let (records, models) = split_runs(runs);
    let result = super::ExperimentResult::new(experiment, config_echo(cfg, protocol)?, records, "nrmse")?;
    Ok(Outcome { result, models })
}
