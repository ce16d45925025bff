//! Experiment drivers.
//!
//! Every driver takes its task configuration and a [`Protocol`] (engines,
//! seeds) and returns an [`Outcome`]. Runs for distinct `(engine, seed)`
//! pairs are independent and execute on the ambient rayon pool; each run
//! derives all of its randomness from its seed, so results do not depend on
//! scheduling.

pub mod classify;
pub mod generator;
pub mod mackey_glass;
pub mod metrics;
pub mod patches;
pub mod recall;
pub mod result;
pub mod timing;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use classify::{run_classify, ClassifyConfig};
pub use generator::{run_generator, EsnQuantization, GeneratorConfig, SignalSource};
pub use mackey_glass::MackeyGlass;
pub use patches::{run_patches, PatchConfig};
pub use recall::{run_recall, RecallConfig};
pub use result::{Band, ExperimentResult, Headline, RunRecord, RESULT_SCHEMA_VERSION};
pub use timing::{bench_steps, BenchConfig, BenchReport};

use crate::error::{Error, Result};
use crate::readout::ReadoutMatrix;
use crate::reservoir::{Engine, EngineKind};

/// Which engines to run and under which seeds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Protocol {
    pub engines: Vec<EngineKind>,
    pub seeds: Vec<u64>,
    /// Keep the trained reservoir and readouts of the first seed per engine.
    #[serde(default)]
    pub keep_models: bool,
}

impl Protocol {
    pub fn new(engines: Vec<EngineKind>, seeds: Vec<u64>) -> Self {
        Self { engines, seeds, keep_models: false }
    }

    pub fn validate(&self) -> Result<()> {
        if self.engines.is_empty() {
            return Err(Error::config("engine", "at least one engine is required"));
        }
        if self.seeds.is_empty() {
            return Err(Error::config("seeds", "at least one seed is required"));
        }
        Ok(())
    }

    fn keeps(&self, seed: u64) -> bool {
        self.keep_models && self.seeds.first() == Some(&seed)
    }

    /// Runs `f` for every `(engine, seed)` pair.
    fn run<T, F>(&self, f: F) -> Result<Vec<T>>
    where
        T: Send,
        F: Fn(EngineKind, u64) -> Result<T> + Sync,
    {
        self.validate()?;
        let jobs: Vec<(EngineKind, u64)> =
            self.engines.iter().flat_map(|&e| self.seeds.iter().map(move |&s| (e, s))).collect();
        jobs.into_par_iter().map(|(e, s)| f(e, s)).collect()
    }
}

/// A trained network: the reservoir (with its final state) and its named
/// readouts.
#[derive(Debug, Clone)]
pub struct TrainedModel {
    pub kind: EngineKind,
    pub seed: u64,
    pub reservoir: Engine,
    pub readouts: Vec<(String, ReadoutMatrix)>,
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub result: ExperimentResult,
    pub models: Vec<TrainedModel>,
}

/// Configuration echo stored in every result: the task parameters plus the
/// engines and seeds that were run.
fn config_echo<C: Serialize>(cfg: &C, protocol: &Protocol) -> Result<serde_json::Value> {
    let mut value = serde_json::to_value(cfg)?;
    if let serde_json::Value::Object(map) = &mut value {
        map.insert("engines".into(), serde_json::to_value(&protocol.engines)?);
        map.insert("seeds".into(), serde_json::to_value(&protocol.seeds)?);
    }
    Ok(value)
}

fn split_runs(runs: Vec<(RunRecord, Option<TrainedModel>)>) -> (Vec<RunRecord>, Vec<TrainedModel>) {
    let mut records = Vec::with_capacity(runs.len());
    let mut models = Vec::new();
    for (r, m) in runs {
        records.push(r);
        models.extend(m);
    }
    models.sort_by_key(|m| m.kind);
    (records, models)
}

fn check_positive(field: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::config(field, format!("{v} must be positive")))
    }
}
