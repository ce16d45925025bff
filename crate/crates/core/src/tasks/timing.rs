//! Wall-clock comparison of reservoir updates.

use std::time::Instant;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::metrics::median;
use crate::error::{Error, Result};
use crate::hd::{ItemMemory, PackedVector};
use crate::reservoir::{
    Engine, EsnConfig, EsnEngine, EsnWeights, InputCoding, IntEngine, IntEsnConfig, IntState, Stimulus,
};
use crate::rng::{seeded, streams};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BenchConfig {
    pub n: usize,
    pub kappa: i64,
    /// Updates per timed repetition.
    pub steps: usize,
    pub repetitions: usize,
    pub alphabet: usize,
    pub seed: u64,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self { n: 300, kappa: 3, steps: 10_000, repetitions: 5, alphabet: 27, seed: 1 }
    }
}

impl BenchConfig {
    pub fn validate(&self) -> Result<()> {
        if self.steps == 0 {
            return Err(Error::config("steps", "at least one step is required"));
        }
        if self.repetitions < 5 {
            return Err(Error::config("repetitions", "at least 5 repetitions are required"));
        }
        if self.n < self.alphabet || self.alphabet == 0 {
            return Err(Error::config("n", format!("{} must be at least the alphabet size {}", self.n, self.alphabet)));
        }
        if self.kappa < 1 {
            return Err(Error::InvalidThreshold(self.kappa));
        }
        Ok(())
    }
}

/// Median seconds per repetition of `steps` updates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub config: BenchConfig,
    pub esn_seconds: f64,
    /// Integer updates on the unpacked state.
    pub intesn_seconds: f64,
    /// Integer updates with the state unpacked before and re-packed after
    /// every step.
    pub intesn_packed_seconds: f64,
    pub packed_state_bytes: usize,
    pub float_state_bytes: usize,
}

impl BenchReport {
    /// ESN time over packed intESN time.
    pub fn speedup(&self) -> f64 {
        self.esn_seconds / self.intesn_packed_seconds
    }

    pub fn steps_per_second(&self, seconds: f64) -> f64 {
        self.config.steps as f64 / seconds
    }

    pub fn summary_line(&self) -> String {
        format!(
            "bench (N={}, {} steps x {}): esn {:.0} steps/s, intesn {:.0} steps/s, packed intesn {:.0} steps/s, speedup {:.2}x",
            self.config.n,
            self.config.steps,
            self.config.repetitions,
            self.steps_per_second(self.esn_seconds),
            self.steps_per_second(self.intesn_seconds),
            self.steps_per_second(self.intesn_packed_seconds),
            self.speedup()
        )
    }
}

pub fn bench_engines(cfg: &BenchConfig) -> Result<(Engine, Engine)> {
    let ec = EsnConfig { inputs: cfg.alphabet, feedback: 0, size: cfg.n, rho: 0.9, beta: 0.1 };
    let w = EsnWeights::generate(&ec, &mut seeded(cfg.seed, streams::WEIGHTS))?;
    let esn = Engine::Esn(EsnEngine::new(ec, w)?);
    let m = ItemMemory::random(cfg.alphabet, cfg.n, &mut seeded(cfg.seed, streams::INPUT_MEMORY))?;
    let int = Engine::Int(IntEngine::new(IntEsnConfig::new(cfg.kappa, Some(InputCoding::Symbols(m)), None)?)?);
    Ok((esn, int))
}

fn time<F: FnMut() -> Result<()>>(repetitions: usize, mut f: F) -> Result<f64> {
    let mut samples = Vec::with_capacity(repetitions);
    for _ in 0..repetitions {
        let start = Instant::now();
        f()?;
        samples.push(start.elapsed().as_secs_f64());
    }
    Ok(median(&samples))
}

/// One update of `engine` whose state lives in packed form between steps.
pub fn packed_step(engine: &mut IntEngine, packed: &mut PackedVector, symbol: usize) -> Result<()> {
    let kappa = engine.config().kappa();
    let x = packed.to_hypervector(crate::hd::Kind::Integer { bound: Some(kappa) })?;
    let step = engine.state().step();
    engine.set_state(IntState::from_vector(x, kappa)?.with_step(step))?;
    engine.step(Stimulus::Symbol(symbol), None)?;
    *packed = engine.packed_state()?;
    Ok(())
}

pub fn bench_steps(cfg: &BenchConfig) -> Result<BenchReport> {
    cfg.validate()?;
    let (mut esn, mut int) = bench_engines(cfg)?;
    let mut rng = seeded(cfg.seed, streams::TRAIN_DATA);
    let symbols: Vec<usize> = (0..cfg.steps).map(|_| rng.random_range(0..cfg.alphabet)).collect();

    let run = |engine: &mut Engine| -> Result<()> {
        for &s in &symbols {
            engine.step(Stimulus::Symbol(s), None)?;
        }
        Ok(())
    };
    let esn_seconds = time(cfg.repetitions, || run(&mut esn))?;
    let intesn_seconds = time(cfg.repetitions, || run(&mut int))?;

    let Engine::Int(mut int) = int else { unreachable!("integer engine") };
    let mut packed = int.packed_state()?;
    let intesn_packed_seconds = time(cfg.repetitions, || {
        for &s in &symbols {
            packed_step(&mut int, &mut packed, s)?;
        }
        Ok(())
    })?;
    Ok(BenchReport {
        config: cfg.clone(),
        esn_seconds,
        intesn_seconds,
        intesn_packed_seconds,
        packed_state_bytes: packed.as_bytes().len(),
        float_state_bytes: cfg.n * 4,
    })
}
