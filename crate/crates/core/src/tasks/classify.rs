//! Time-series classification from final reservoir states.
//!
//! Each series is run through a freshly reset reservoir and only its last
//! state is kept. One readout with one-hot class targets is fitted on the
//! final states of the training split and decoded by winner-take-all.

use faer::Mat;
use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::result::RunRecord;
use super::{check_positive, config_echo, split_runs, Outcome, Protocol, TrainedModel};
use crate::data::{Series, TimeSeriesDataset};
use crate::error::{Error, Result};
use crate::hd::{LevelCoding, Quantizer, ValueEncoder};
use crate::readout::{ridge_fit, winner_take_all, TrainingBatch};
use crate::reservoir::{
    footprint_matched_size, Engine, EngineKind, EsnConfig, EsnEngine, EsnWeights, InputCoding, IntEngine, IntEsnConfig,
    Stimulus,
};
use crate::rng::{seeded, streams};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClassifyConfig {
    pub n: usize,
    pub kappa: i64,
    pub rho: f64,
    pub beta: f64,
    pub lambda: f64,
    /// Quantization step of the normalized `[0, 1]` input for the integer
    /// network.
    pub level_step: f64,
    /// Size of the `intesn-large` reservoir; defaults to the footprint-matched
    /// size.
    pub large_size: Option<usize>,
    /// Permute the labels of both splits (chance-level control).
    pub shuffle_labels: bool,
}

impl Default for ClassifyConfig {
    fn default() -> Self {
        Self {
            n: 800,
            kappa: 7,
            rho: 0.99,
            beta: 0.25,
            lambda: 1.0,
            level_step: 1.0 / 32.0,
            large_size: None,
            shuffle_labels: false,
        }
    }
}

impl ClassifyConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::config("n", "reservoir size must be at least 1"));
        }
        if self.large_size == Some(0) {
            return Err(Error::config("large_size", "reservoir size must be at least 1"));
        }
        if self.kappa < 1 {
            return Err(Error::InvalidThreshold(self.kappa));
        }
        check_positive("rho", self.rho)?;
        if self.rho > 1.0 {
            return Err(Error::config("rho", format!("{} is outside (0, 1]", self.rho)));
        }
        check_positive("beta", self.beta)?;
        check_positive("lambda", self.lambda)?;
        check_positive("level_step", self.level_step)?;
        Quantizer::new(0.0, 1.0, self.level_step)?;
        Ok(())
    }

    pub fn size(&self, kind: EngineKind) -> Result<usize> {
        Ok(match kind {
            EngineKind::IntesnLarge => match self.large_size {
                Some(n) => n,
                None => footprint_matched_size(self.n, self.kappa)?,
            },
            _ => self.n,
        })
    }
}

/// Per-variable min-max scaling fitted on the training split; values outside
/// the training range are clamped.
#[derive(Debug, Clone, PartialEq)]
pub struct MinMax {
    lo: Vec<f64>,
    hi: Vec<f64>,
}

impl MinMax {
    pub fn fit(series: &[Series]) -> Result<Self> {
        let v = series.first().ok_or(Error::Empty("training split"))?.variables();
        let mut lo = vec![f64::INFINITY; v];
        let mut hi = vec![f64::NEG_INFINITY; v];
        for s in series {
            for sample in s.samples() {
                for (k, &x) in sample.iter().enumerate() {
                    lo[k] = lo[k].min(x);
                    hi[k] = hi[k].max(x);
                }
            }
        }
        Ok(Self { lo, hi })
    }

    pub fn apply(&self, sample: &[f64], out: &mut [f64]) {
        for (k, (o, &x)) in out.iter_mut().zip(sample).enumerate() {
            let range = self.hi[k] - self.lo[k];
            *o = if range > 0.0 { ((x - self.lo[k]) / range).clamp(0.0, 1.0) } else { 0.5 };
        }
    }
}

fn build_engine(cfg: &ClassifyConfig, kind: EngineKind, variables: usize, seed: u64) -> Result<Engine> {
    let n = cfg.size(kind)?;
    Ok(match kind {
        EngineKind::Esn => {
            let ec = EsnConfig { inputs: variables, feedback: 0, size: n, rho: cfg.rho, beta: cfg.beta };
            let w = EsnWeights::generate(&ec, &mut seeded(seed, streams::WEIGHTS))?;
            Engine::Esn(EsnEngine::new(ec, w)?)
        }
        EngineKind::Intesn | EngineKind::IntesnLarge => {
            let q = Quantizer::new(0.0, 1.0, cfg.level_step)?;
            let enc = ValueEncoder::generate(
                q,
                variables,
                n,
                LevelCoding::Scatter,
                &mut seeded(seed, streams::INPUT_MEMORY),
            )?;
            Engine::Int(IntEngine::new(IntEsnConfig::new(cfg.kappa, Some(InputCoding::Values(enc)), None)?)?)
        }
    })
}

/// Final state after feeding `series` from a reset state. The float network
/// sees inputs rescaled to `[-1, 1]`.
fn final_state(engine: &mut Engine, series: &Series, scale: &MinMax, buf: &mut [f64]) -> Result<Vec<f64>> {
    engine.reset();
    let float = matches!(engine, Engine::Esn(_));
    for sample in series.samples() {
        scale.apply(sample, buf);
        if float {
            buf.iter_mut().for_each(|v| *v = 2.0 * *v - 1.0);
        }
        engine.step(Stimulus::Values(buf), None)?;
    }
    Ok(engine.state_vector())
}

fn labels(set: &[Series], shuffle: bool, rng: &mut crate::rng::Rng) -> Vec<usize> {
    let mut l: Vec<usize> = set.iter().map(|s| s.label).collect();
    if shuffle {
        l.shuffle(rng);
    }
    l
}

/// Class absent from the training split but present in the test split.
fn unseen_class(data: &TimeSeriesDataset) -> Option<usize> {
    let mut seen = vec![false; data.classes()];
    for s in &data.train {
        seen[s.label] = true;
    }
    data.test.iter().map(|s| s.label).find(|&l| !seen[l])
}

pub fn classify_run(
    data: &TimeSeriesDataset,
    cfg: &ClassifyConfig,
    kind: EngineKind,
    seed: u64,
    keep: bool,
) -> Result<(RunRecord, Option<TrainedModel>)> {
    cfg.validate()?;
    if data.train.is_empty() {
        return Err(Error::Empty("training split"));
    }
    if data.test.is_empty() {
        return Err(Error::Empty("test split"));
    }
    if let Some(c) = unseen_class(data) {
        return Err(Error::UnseenClass(c));
    }
    let c = data.classes();
    let mut engine = build_engine(cfg, kind, data.variables(), seed)?;
    let n = engine.size();
    let scale = MinMax::fit(&data.train)?;
    let mut buf = vec![0.0; data.variables()];

    let mut control = seeded(seed, streams::CONTROL);
    let train_labels = labels(&data.train, cfg.shuffle_labels, &mut control);
    let test_labels = labels(&data.test, cfg.shuffle_labels, &mut control);

    let mut states = Mat::<f64>::zeros(data.train.len(), n);
    let mut targets = Mat::<f64>::zeros(data.train.len(), c);
    for (r, s) in data.train.iter().enumerate() {
        let x = final_state(&mut engine, s, &scale, &mut buf)?;
        for (j, v) in x.into_iter().enumerate() {
            states[(r, j)] = v;
        }
        targets[(r, train_labels[r])] = 1.0;
    }
    let readout = ridge_fit(&TrainingBatch::new(states, targets)?, cfg.lambda)?;

    let mut confusion = vec![0.0; c * c];
    let mut correct = 0usize;
    for (s, &truth) in data.test.iter().zip(&test_labels) {
        let x = final_state(&mut engine, s, &scale, &mut buf)?;
        let predicted = winner_take_all(&readout.apply(&x)?)?;
        correct += usize::from(predicted == truth);
        confusion[truth * c + predicted] += 1.0;
    }
    let accuracy = correct as f64 / data.test.len() as f64;
    let record = RunRecord::new(kind.label(), seed)
        .with("accuracy", vec![accuracy])
        .with("confusion", confusion)
        .with("n", vec![n as f64]);
    let model =
        keep.then(|| TrainedModel { kind, seed, reservoir: engine, readouts: vec![("classes".into(), readout)] });
    Ok((record, model))
}

/// Test accuracy (and confusion counts, row = true class) per engine and
/// seed.
pub fn run_classify(data: &TimeSeriesDataset, cfg: &ClassifyConfig, protocol: &Protocol) -> Result<Outcome> {
    cfg.validate()?;
    if let Some(c) = unseen_class(data) {
        return Err(Error::UnseenClass(c));
    }
    let runs = protocol.run(|kind, seed| classify_run(data, cfg, kind, seed, protocol.keeps(seed)))?;
    let (records, models) = split_runs(runs);
    let mut echo = config_echo(cfg, protocol)?;
    if let serde_json::Value::Object(map) = &mut echo {
        map.insert(
            "dataset".into(),
            serde_json::json!({
                "name": data.name,
                "variables": data.variables(),
                "classes": data.classes(),
                "train": data.train.len(),
                "test": data.test.len(),
            }),
        );
    }
    let result = super::ExperimentResult::new("classify", echo, records, "accuracy")?;
    Ok(Outcome { result, models })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::synthetic;

    fn small() -> ClassifyConfig {
        ClassifyConfig { n: 200, ..Default::default() }
    }

    #[test]
    fn two_level_is_perfect() {
        let d = synthetic::two_level(12, 4, 10).unwrap();
        for kind in [EngineKind::Esn, EngineKind::Intesn] {
            let (r, _) = classify_run(&d, &small(), kind, 1, false).unwrap();
            assert_eq!(r.metric("accuracy").unwrap(), &[1.0], "{kind}");
            assert_eq!(r.metric("confusion").unwrap(), &[10.0, 0.0, 0.0, 10.0]);
        }
    }

    #[test]
    fn multivariate_shape_is_separable() {
        let shape = &synthetic::suite_shapes()[4];
        let d = synthetic::generate(shape, 7).unwrap();
        for kind in [EngineKind::Esn, EngineKind::Intesn] {
            let (r, _) = classify_run(&d, &small(), kind, 2, false).unwrap();
            assert_eq!(r.metric("accuracy").unwrap(), &[1.0], "{kind}");
        }
    }

    #[test]
    fn unseen_test_class_is_an_error() {
        let mut d = synthetic::two_level(5, 2, 2).unwrap();
        d.train.retain(|s| s.label == 0);
        let err = classify_run(&d, &small(), EngineKind::Esn, 1, false).unwrap_err();
        assert!(matches!(err, Error::UnseenClass(1)));
    }

    #[test]
    fn min_max_clamps_and_handles_constants() {
        let train =
            vec![Series::new(2, vec![0.0, 5.0, 2.0, 5.0], 0).unwrap(), Series::new(2, vec![1.0, 5.0], 1).unwrap()];
        let m = MinMax::fit(&train).unwrap();
        let mut out = [0.0; 2];
        m.apply(&[3.0, 5.0], &mut out);
        assert_eq!(out, [1.0, 0.5]);
        m.apply(&[0.5, 1.0], &mut out);
        assert_eq!(out, [0.25, 0.5]);
    }

    #[test]
    fn large_size_override() {
        let cfg = ClassifyConfig { large_size: Some(1600), ..Default::default() };
        assert_eq!(cfg.size(EngineKind::IntesnLarge).unwrap(), 1600);
        assert_eq!(ClassifyConfig::default().size(EngineKind::IntesnLarge).unwrap(), 6400);
    }
}
