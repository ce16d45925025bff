//! Mapping of real-valued samples onto ternary vectors.

use rand::Rng;

use super::memory::{default_scatter_flip, ItemMemory};
use super::quantize::Quantizer;
use super::vector::{bundle, HyperVector};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LevelCoding {
    /// Linear similarity between levels.
    Linear,
    /// Scatter codes with the default flip fraction.
    Scatter,
}

/// Quantizes each variable of a sample and looks up its level vector.
///
/// With several variables the per-variable codewords are bound to random
/// key vectors and combined by elementwise majority (sign of the sum), which
/// keeps the result ternary.
#[derive(Debug, Clone, PartialEq)]
pub struct ValueEncoder {
    quantizer: Quantizer,
    memories: Vec<ItemMemory>,
    keys: Vec<HyperVector>,
}

impl ValueEncoder {
    pub fn new(quantizer: Quantizer, memories: Vec<ItemMemory>, keys: Vec<HyperVector>) -> Result<Self> {
        let first = memories.first().ok_or(Error::Empty("value encoder memories"))?;
        let n = first.dim();
        for m in &memories {
            if m.dim() != n {
                return Err(Error::DimensionMismatch { expected: n, got: m.dim() });
            }
            if m.len() != quantizer.levels() {
                return Err(Error::config(
                    "encoder",
                    format!("memory has {} levels, quantizer {}", m.len(), quantizer.levels()),
                ));
            }
        }
        if memories.len() > 1 && keys.len() != memories.len() {
            return Err(Error::config("encoder", "one binding key per variable is required"));
        }
        for k in &keys {
            if k.dim() != n {
                return Err(Error::DimensionMismatch { expected: n, got: k.dim() });
            }
        }
        Ok(Self { quantizer, memories, keys })
    }

    pub fn generate<R: Rng + ?Sized>(
        quantizer: Quantizer,
        variables: usize,
        n: usize,
        coding: LevelCoding,
        rng: &mut R,
    ) -> Result<Self> {
        if variables == 0 {
            return Err(Error::config("variables", "at least one variable is required"));
        }
        let levels = quantizer.levels();
        let memories = (0..variables)
            .map(|_| match coding {
                LevelCoding::Linear => ItemMemory::linear_levels(levels, n, rng),
                LevelCoding::Scatter => ItemMemory::scatter_levels(levels, n, default_scatter_flip(levels), rng),
            })
            .collect::<Result<Vec<_>>>()?;
        let keys = if variables > 1 {
            (0..variables).map(|_| HyperVector::random_bipolar(n, rng)).collect::<Result<Vec<_>>>()?
        } else {
            Vec::new()
        };
        Self::new(quantizer, memories, keys)
    }

    pub fn dim(&self) -> usize {
        self.memories[0].dim()
    }

    pub fn variables(&self) -> usize {
        self.memories.len()
    }

    pub fn quantizer(&self) -> &Quantizer {
        &self.quantizer
    }

    pub fn memories(&self) -> &[ItemMemory] {
        &self.memories
    }

    pub fn keys(&self) -> &[HyperVector] {
        &self.keys
    }

    pub fn encode(&self, sample: &[f64]) -> Result<HyperVector> {
        if sample.len() != self.memories.len() {
            return Err(Error::DimensionMismatch { expected: self.memories.len(), got: sample.len() });
        }
        if let Some(v) = sample.iter().find(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!("encoder input {v}")));
        }
        if self.memories.len() == 1 {
            let idx = self.quantizer.level_index(sample[0]);
            return Ok(self.memories[0].entries()[idx].clone());
        }
        let bound = sample
            .iter()
            .zip(&self.memories)
            .zip(&self.keys)
            .map(|((&v, m), key)| m.entries()[self.quantizer.level_index(v)].bind(key))
            .collect::<Result<Vec<_>>>()?;
        Ok(bundle(&bound)?.sign())
    }
}
