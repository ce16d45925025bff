//! Sequence recall: decode the token presented `d` steps ago from the
//! current reservoir state.

use faer::Mat;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::metrics::decoded_information;
use super::result::RunRecord;
use super::{check_positive, config_echo, split_runs, Outcome, Protocol, TrainedModel};
use crate::error::{Error, Result};
use crate::hd::ItemMemory;
use crate::readout::{ridge_fit, winner_take_all, TrainingBatch};
use crate::reservoir::{
    footprint_matched_size, run_collect, Engine, EngineKind, EsnConfig, EsnEngine, EsnWeights, InputCoding, IntEngine,
    IntEsnConfig, Stimulus,
};
use crate::rng::{seeded, streams};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RecallConfig {
    /// Alphabet size `D`.
    pub alphabet: usize,
    /// Delays `0..=max_delay` are decoded.
    pub max_delay: usize,
    pub train_len: usize,
    /// Training length used by the footprint-matched integer network.
    pub large_train_len: usize,
    pub washout: usize,
    pub test_len: usize,
    /// Reservoir size `N` (the float reservoir size for `intesn-large`).
    pub n: usize,
    pub kappa: i64,
    pub rho: f64,
    pub beta: f64,
    pub lambda: f64,
    /// Replace the targets (train and test) by tokens unrelated to the input.
    pub shuffle_targets: bool,
}

impl Default for RecallConfig {
    fn default() -> Self {
        Self {
            alphabet: 27,
            max_delay: 15,
            train_len: 2000,
            large_train_len: 9000,
            washout: 500,
            test_len: 2000,
            n: 100,
            kappa: 3,
            rho: 0.94,
            beta: 0.1,
            lambda: 0.0,
            shuffle_targets: false,
        }
    }
}

impl RecallConfig {
    pub fn validate(&self) -> Result<()> {
        if self.alphabet < 2 {
            return Err(Error::config("alphabet", "at least two tokens are required"));
        }
        if self.n == 0 {
            return Err(Error::config("n", "reservoir size must be at least 1"));
        }
        if self.n < self.alphabet {
            return Err(Error::config(
                "n",
                format!("reservoir size {} is smaller than the alphabet ({})", self.n, self.alphabet),
            ));
        }
        if self.kappa < 1 {
            return Err(Error::InvalidThreshold(self.kappa));
        }
        for (field, len) in [("train_len", self.train_len), ("large_train_len", self.large_train_len)] {
            if self.washout >= len {
                return Err(Error::config(field, format!("{len} must exceed the washout ({})", self.washout)));
            }
            if self.max_delay >= len - self.washout {
                return Err(Error::config("max_delay", format!("{} must be below {field} - washout", self.max_delay)));
            }
        }
        if self.max_delay > self.washout {
            return Err(Error::config(
                "max_delay",
                format!("{} exceeds the washout ({}), leaving early targets undefined", self.max_delay, self.washout),
            ));
        }
        if self.test_len == 0 {
            return Err(Error::config("test_len", "must be at least 1"));
        }
        check_positive("rho", self.rho)?;
        if self.rho > 1.0 {
            return Err(Error::config("rho", format!("{} is outside (0, 1]", self.rho)));
        }
        check_positive("beta", self.beta)?;
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return Err(Error::config("lambda", "must be finite and non-negative"));
        }
        Ok(())
    }

    pub fn delays(&self) -> usize {
        self.max_delay + 1
    }

    /// Reservoir size and training length used for `kind`.
    pub fn sizing(&self, kind: EngineKind) -> Result<(usize, usize)> {
        Ok(match kind {
            EngineKind::IntesnLarge => (footprint_matched_size(self.n, self.kappa)?, self.large_train_len),
            _ => (self.n, self.train_len),
        })
    }
}

fn build_engine(cfg: &RecallConfig, kind: EngineKind, n: usize, seed: u64) -> Result<Engine> {
    Ok(match kind {
        EngineKind::Esn => {
            let ec = EsnConfig { inputs: cfg.alphabet, feedback: 0, size: n, rho: cfg.rho, beta: cfg.beta };
            let w = EsnWeights::generate(&ec, &mut seeded(seed, streams::WEIGHTS))?;
            Engine::Esn(EsnEngine::new(ec, w)?)
        }
        EngineKind::Intesn | EngineKind::IntesnLarge => {
            let m = ItemMemory::random(cfg.alphabet, n, &mut seeded(seed, streams::INPUT_MEMORY))?;
            let ic = IntEsnConfig::new(cfg.kappa, Some(InputCoding::Symbols(m)), None)?;
            Engine::Int(IntEngine::new(ic)?)
        }
    })
}

fn tokens(len: usize, alphabet: usize, seed: u64, stream: u64) -> Vec<usize> {
    let mut rng = seeded(seed, stream);
    (0..len).map(|_| rng.random_range(0..alphabet)).collect()
}

/// Trains and tests one network; returns per-delay accuracies.
pub fn recall_run(
    cfg: &RecallConfig,
    kind: EngineKind,
    seed: u64,
    keep: bool,
) -> Result<(RunRecord, Option<TrainedModel>)> {
    cfg.validate()?;
    let (n, train_len) = cfg.sizing(kind)?;
    let d_count = cfg.delays();
    let alphabet = cfg.alphabet;
    let mut engine = build_engine(cfg, kind, n, seed)?;

    let mut history = tokens(train_len, alphabet, seed, streams::TRAIN_DATA);
    let test = tokens(cfg.test_len, alphabet, seed, streams::TEST_DATA);
    history.extend_from_slice(&test);
    // What the readouts are asked to recall; differs from `history` only in
    // the shuffled control.
    let recalled =
        if cfg.shuffle_targets { tokens(history.len(), alphabet, seed, streams::CONTROL) } else { history.clone() };

    let inputs: Vec<Stimulus> = history[..train_len].iter().map(|&t| Stimulus::Symbol(t)).collect();
    let states = run_collect(&mut engine, &inputs, None, cfg.washout)?;
    let rows = states.nrows();
    let mut targets = Mat::<f64>::zeros(rows, alphabet * d_count);
    for r in 0..rows {
        let i = cfg.washout + r;
        for d in 0..d_count {
            targets[(r, d * alphabet + recalled[i - d])] = 1.0;
        }
    }
    // Fitting the stacked targets at once equals one independent fit per
    // delay: each output column only depends on its own target column.
    let stacked = ridge_fit(&TrainingBatch::new(states, targets)?, cfg.lambda)?;

    let mut correct = vec![0usize; d_count];
    let mut x = vec![0.0; n];
    for j in 0..cfg.test_len {
        let i = train_len + j;
        engine.step(Stimulus::Symbol(history[i]), None)?;
        engine.write_state(&mut x);
        let y = stacked.apply(&x)?;
        for (d, c) in correct.iter_mut().enumerate() {
            if winner_take_all(&y[d * alphabet..(d + 1) * alphabet])? == recalled[i - d] {
                *c += 1;
            }
        }
    }
    let accuracy: Vec<f64> = correct.iter().map(|&c| c as f64 / cfg.test_len as f64).collect();
    let info = decoded_information(&accuracy, alphabet);
    let record = RunRecord::new(kind.label(), seed)
        .with("accuracy", accuracy)
        .with("information_bits", vec![info])
        .with("n", vec![n as f64]);
    let model = keep
        .then(|| -> Result<TrainedModel> {
            let readouts = stacked
                .split_outputs(alphabet)?
                .into_iter()
                .enumerate()
                .map(|(d, w)| (format!("delay{d}"), w))
                .collect();
            Ok(TrainedModel { kind, seed, reservoir: engine, readouts })
        })
        .transpose()?;
    Ok((record, model))
}

/// Per-delay decoding accuracy and decoded information for every engine
/// and seed.
pub fn run_recall(cfg: &RecallConfig, protocol: &Protocol) -> Result<Outcome> {
    cfg.validate()?;
    let runs = protocol.run(|kind, seed| recall_run(cfg, kind, seed, protocol.keeps(seed)))?;
    let (records, models) = split_runs(runs);
    let result = super::ExperimentResult::new("recall", config_echo(cfg, protocol)?, records, "information_bits")?;
    Ok(Outcome { result, models })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> RecallConfig {
        RecallConfig {
            train_len: 700,
            large_train_len: 900,
            washout: 100,
            test_len: 400,
            max_delay: 5,
            ..Default::default()
        }
    }

    #[test]
    fn validation_names_field() {
        let err = RecallConfig { n: 0, ..Default::default() }.validate().unwrap_err();
        assert!(err.is_config_error());
        assert!(err.to_string().contains("n:"), "{err}");
        assert!(RecallConfig { washout: 10, ..Default::default() }.validate().is_err());
        assert!(RecallConfig::default().validate().is_ok());
    }

    #[test]
    fn recent_tokens_are_recalled() {
        let cfg = small();
        for kind in [EngineKind::Esn, EngineKind::Intesn] {
            let (r, _) = recall_run(&cfg, kind, 3, false).unwrap();
            let acc = r.metric("accuracy").unwrap();
            assert_eq!(acc.len(), 6);
            assert!(acc[0] > 0.9, "{kind}: {acc:?}");
            assert!(acc.iter().all(|a| (0.0..=1.0).contains(a)));
        }
    }

    #[test]
    fn shuffled_targets_are_at_chance() {
        let cfg = RecallConfig { shuffle_targets: true, test_len: 2000, ..small() };
        let (r, _) = recall_run(&cfg, EngineKind::Intesn, 5, false).unwrap();
        let mean = super::super::metrics::mean(r.metric("accuracy").unwrap());
        assert!((mean - 1.0 / 27.0).abs() < 0.02, "{mean}");
    }

    #[test]
    fn deterministic_per_seed() {
        let cfg = small();
        let a = recall_run(&cfg, EngineKind::Intesn, 8, false).unwrap().0;
        let b = recall_run(&cfg, EngineKind::Intesn, 8, false).unwrap().0;
        assert_eq!(a, b);
    }

    #[test]
    fn protocol_collects_models_and_summary() {
        let mut p = Protocol::new(vec![EngineKind::Intesn, EngineKind::Esn], vec![2, 1]);
        p.keep_models = true;
        let out = run_recall(&small(), &p).unwrap();
        assert_eq!(out.result.runs.len(), 4);
        assert_eq!(out.result.seeds, vec![1, 2]);
        assert_eq!(out.models.len(), 2);
        assert_eq!(out.models[0].readouts.len(), 6);
        assert_eq!(out.result.band("esn", "accuracy").unwrap().mean.len(), 6);
        assert_eq!(out.result.config["n"], 100);
    }
}
