//! Small generated stand-ins for the standard classification datasets.
//!
//! Each shape keeps the variable and class counts of a real dataset. Every
//! class draws a random template; a series is the trailing part of its
//! class template plus a little Gaussian noise, so the classes are separable
//! from the last few samples alone.

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::dataset::{Series, TimeSeriesDataset};
use crate::error::{Error, Result};
use crate::rng::{seeded, streams};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SyntheticShape {
    pub name: String,
    pub variables: usize,
    pub classes: usize,
    pub min_len: usize,
    pub max_len: usize,
    pub train_per_class: usize,
    pub test_per_class: usize,
}

impl SyntheticShape {
    fn new(name: &str, variables: usize, classes: usize, min_len: usize, max_len: usize) -> Self {
        Self {
            name: name.into(),
            variables,
            classes,
            min_len,
            max_len,
            train_per_class: 5,
            test_per_class: 6.max(100usize.div_ceil(classes)),
        }
    }
}

/// Variable and class counts of the seven benchmark datasets; univariate
/// shapes have equal lengths, multivariate ones vary per series.
pub fn suite_shapes() -> Vec<SyntheticShape> {
    vec![
        SyntheticShape::new("swedish-leaf", 1, 15, 24, 24),
        SyntheticShape::new("distal-phalanx", 1, 3, 20, 20),
        SyntheticShape::new("ecg", 1, 2, 24, 24),
        SyntheticShape::new("wafer", 1, 2, 30, 30),
        SyntheticShape::new("character-trajectories", 3, 20, 18, 30),
        SyntheticShape::new("spoken-arabic-digit", 13, 10, 16, 28),
        SyntheticShape::new("japanese-vowels", 12, 9, 16, 26),
    ]
}

pub const NOISE_STD: f64 = 0.01;

/// Generates the dataset of `shape`; the same `data_seed` always yields the
/// same data.
pub fn generate(shape: &SyntheticShape, data_seed: u64) -> Result<TimeSeriesDataset> {
    if shape.classes < 2 || shape.variables == 0 || shape.min_len == 0 || shape.min_len > shape.max_len {
        return Err(Error::config("shape", format!("degenerate synthetic shape {shape:?}")));
    }
    let mut rng = seeded(data_seed, streams::TRAIN_DATA);
    let v = shape.variables;
    let templates: Vec<Vec<f64>> =
        (0..shape.classes).map(|_| (0..shape.max_len * v).map(|_| rng.random::<f64>()).collect()).collect();
    let noise = Normal::new(0.0, NOISE_STD).expect("valid normal");
    let draw = |label: usize, rng: &mut crate::rng::Rng| -> Result<Series> {
        let len = rng.random_range(shape.min_len..=shape.max_len);
        let tail = &templates[label][(shape.max_len - len) * v..];
        let values = tail.iter().map(|&t| t + noise.sample(rng)).collect();
        Series::new(v, values, label)
    };
    let split = |per_class: usize, rng: &mut crate::rng::Rng| -> Result<Vec<Series>> {
        let mut out = Vec::with_capacity(per_class * shape.classes);
        for _ in 0..per_class {
            for label in 0..shape.classes {
                out.push(draw(label, rng)?);
            }
        }
        Ok(out)
    };
    let train = split(shape.train_per_class, &mut rng)?;
    let mut test_rng = seeded(data_seed, streams::TEST_DATA);
    let test = split(shape.test_per_class, &mut test_rng)?;
    TimeSeriesDataset::new(shape.name.clone(), shape.classes, train, test)
}

/// All suite datasets from one data seed.
pub fn suite(data_seed: u64) -> Result<Vec<TimeSeriesDataset>> {
    suite_shapes().iter().map(|s| generate(s, data_seed)).collect()
}

/// Two classes of constant series at levels 0.2 and 0.8.
pub fn two_level(length: usize, train_per_class: usize, test_per_class: usize) -> Result<TimeSeriesDataset> {
    let make = |per_class: usize| -> Result<Vec<Series>> {
        (0..per_class * 2)
            .map(|i| {
                let label = i % 2;
                Series::new(1, vec![0.2 + 0.6 * label as f64; length], label)
            })
            .collect()
    };
    TimeSeriesDataset::new("two-level", 2, make(train_per_class)?, make(test_per_class)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shapes_and_determinism() {
        let sets = suite(3).unwrap();
        assert_eq!(sets.len(), 7);
        for (d, s) in sets.iter().zip(suite_shapes()) {
            assert_eq!(d.variables(), s.variables);
            assert_eq!(d.classes(), s.classes);
            assert_eq!(d.train.len(), 5 * s.classes);
            assert!(d.test.len() >= 100);
            assert!(d.train.iter().all(|x| (s.min_len..=s.max_len).contains(&x.len())));
        }
        assert_eq!(suite(3).unwrap(), sets);
        assert_ne!(suite(4).unwrap(), sets);
    }

    #[test]
    fn same_class_series_share_their_tail() {
        let d = generate(&suite_shapes()[4], 1).unwrap();
        let a = d.train.iter().find(|s| s.label == 2).unwrap();
        let b = d.test.iter().find(|s| s.label == 2).unwrap();
        let (la, lb) = (a.sample(a.len() - 1), b.sample(b.len() - 1));
        for (x, y) in la.iter().zip(lb) {
            assert!((x - y).abs() < 10.0 * NOISE_STD);
        }
    }

    #[test]
    fn two_level_is_constant() {
        let d = two_level(10, 3, 4).unwrap();
        assert_eq!(d.train.len(), 6);
        assert_eq!(d.test.len(), 8);
        assert!(d.test[1].values().iter().all(|&v| v == 0.8));
    }
}
