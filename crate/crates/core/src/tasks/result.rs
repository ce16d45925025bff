//! Structured experiment output.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::metrics::{mean, percentile, std_dev};
use crate::error::{Error, Result};

/// Version of the result layout; bumped on incompatible changes.
pub const RESULT_SCHEMA_VERSION: u32 = 1;

/// Metric series of one engine under one seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub engine: String,
    pub seed: u64,
    pub metrics: BTreeMap<String, Vec<f64>>,
}

impl RunRecord {
    pub fn new(engine: impl Into<String>, seed: u64) -> Self {
        Self { engine: engine.into(), seed, metrics: BTreeMap::new() }
    }

    pub fn with(mut self, key: impl Into<String>, values: Vec<f64>) -> Self {
        self.metrics.insert(key.into(), values);
        self
    }

    pub fn insert(&mut self, key: impl Into<String>, values: Vec<f64>) {
        self.metrics.insert(key.into(), values);
    }

    pub fn metric(&self, key: &str) -> Option<&[f64]> {
        self.metrics.get(key).map(Vec::as_slice)
    }
}

/// Elementwise statistics of a metric series across seeds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Band {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
    pub p10: Vec<f64>,
    pub median: Vec<f64>,
    pub p90: Vec<f64>,
}

impl Band {
    /// Statistics over `series`, which must all have the same length.
    pub fn from_series(series: &[&[f64]]) -> Option<Self> {
        let len = series.first()?.len();
        if series.iter().any(|s| s.len() != len) {
            return None;
        }
        let mut band = Band {
            mean: Vec::with_capacity(len),
            std: Vec::with_capacity(len),
            p10: Vec::with_capacity(len),
            median: Vec::with_capacity(len),
            p90: Vec::with_capacity(len),
        };
        let mut column = Vec::with_capacity(series.len());
        for i in 0..len {
            column.clear();
            column.extend(series.iter().map(|s| s[i]));
            band.mean.push(mean(&column));
            band.std.push(std_dev(&column));
            band.p10.push(percentile(&column, 10.0));
            band.median.push(percentile(&column, 50.0));
            band.p90.push(percentile(&column, 90.0));
        }
        Some(band)
    }
}

/// Mean and standard deviation of the key scalar metric of one engine.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Headline {
    pub mean: f64,
    pub std: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub schema_version: u32,
    pub experiment: String,
    /// Effective configuration the runs were produced with.
    pub config: serde_json::Value,
    pub seeds: Vec<u64>,
    /// Sorted by engine, then seed.
    pub runs: Vec<RunRecord>,
    /// Engine label → metric key → statistics across seeds.
    pub summary: BTreeMap<String, BTreeMap<String, Band>>,
    /// Name of the scalar metric reported in `headline`.
    pub headline_metric: String,
    pub headline: BTreeMap<String, Headline>,
}

impl ExperimentResult {
    /// Assembles a result, checking that every metric value is finite.
    ///
    /// `headline_metric` names a metric whose first element summarizes a run.
    pub fn new(
        experiment: impl Into<String>,
        config: serde_json::Value,
        mut runs: Vec<RunRecord>,
        headline_metric: impl Into<String>,
    ) -> Result<Self> {
        for run in &runs {
            for (key, values) in &run.metrics {
                if values.iter().any(|v| !v.is_finite()) {
                    return Err(Error::NonFiniteMetric(format!("{}.{key}", run.engine)));
                }
            }
        }
        runs.sort_by(|a, b| (&a.engine, a.seed).cmp(&(&b.engine, b.seed)));
        let mut seeds: Vec<u64> = runs.iter().map(|r| r.seed).collect();
        seeds.sort_unstable();
        seeds.dedup();

        let headline_metric = headline_metric.into();
        let mut by_engine: BTreeMap<&str, Vec<&RunRecord>> = BTreeMap::new();
        for run in &runs {
            by_engine.entry(&run.engine).or_default().push(run);
        }
        let mut summary = BTreeMap::new();
        let mut headline = BTreeMap::new();
        for (engine, group) in &by_engine {
            let mut keys: Vec<&String> = group.iter().flat_map(|r| r.metrics.keys()).collect();
            keys.sort();
            keys.dedup();
            let mut bands = BTreeMap::new();
            for key in keys {
                let series: Vec<&[f64]> = group.iter().filter_map(|r| r.metric(key)).collect();
                if series.len() == group.len() {
                    if let Some(band) = Band::from_series(&series) {
                        bands.insert(key.clone(), band);
                    }
                }
            }
            summary.insert(engine.to_string(), bands);
            let values: Vec<f64> =
                group.iter().filter_map(|r| r.metric(&headline_metric).and_then(|m| m.first().copied())).collect();
            if !values.is_empty() {
                headline.insert(engine.to_string(), Headline { mean: mean(&values), std: std_dev(&values) });
            }
        }
        Ok(Self {
            schema_version: RESULT_SCHEMA_VERSION,
            experiment: experiment.into(),
            config,
            seeds,
            runs,
            summary,
            headline_metric,
            headline,
        })
    }

    pub fn engines(&self) -> Vec<&str> {
        self.summary.keys().map(String::as_str).collect()
    }

    pub fn runs_of<'a>(&'a self, engine: &'a str) -> impl Iterator<Item = &'a RunRecord> + 'a {
        self.runs.iter().filter(move |r| r.engine == engine)
    }

    pub fn band(&self, engine: &str, key: &str) -> Option<&Band> {
        self.summary.get(engine)?.get(key)
    }

    /// One-line summary of the headline metric per engine.
    pub fn summary_line(&self) -> String {
        let parts: Vec<String> = self
            .headline
            .iter()
            .map(|(engine, h)| format!("{engine} {} = {} ± {}", self.headline_metric, short(h.mean), short(h.std)))
            .collect();
        format!(
            "{} ({} seed{}): {}",
            self.experiment,
            self.seeds.len(),
            if self.seeds.len() == 1 { "" } else { "s" },
            parts.join("; ")
        )
    }
}

fn short(v: f64) -> String {
    if v != 0.0 && v.abs() < 1e-3 {
        format!("{v:.3e}")
    } else {
        format!("{v:.4}")
    }
}
