use rand::seq::{index, SliceRandom};
use rand::Rng;

use super::vector::{same_dim, HyperVector};
use crate::error::{Error, Result};

/// Ordered codebook. Symbol ids are the entry indices `0..len()`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ItemMemory {
    dim: usize,
    entries: Vec<HyperVector>,
}

impl ItemMemory {
    pub fn new(entries: Vec<HyperVector>) -> Result<Self> {
        let first = entries.first().ok_or(Error::Empty("item memory"))?;
        let dim = first.dim();
        for e in &entries {
            same_dim(dim, e.dim())?;
        }
        Ok(Self { dim, entries })
    }

    /// `symbols` independent random bipolar vectors.
    pub fn random<R: Rng + ?Sized>(symbols: usize, n: usize, rng: &mut R) -> Result<Self> {
        if symbols == 0 {
            return Err(Error::Empty("item memory"));
        }
        let entries = (0..symbols).map(|_| HyperVector::random_bipolar(n, rng)).collect::<Result<_>>()?;
        Ok(Self { dim: n, entries })
    }

    /// Level codebook with a linear similarity profile.
    ///
    /// The two end levels are independent random vectors. Level `k` takes the
    /// first `⌊k·n/(L-1)⌋` positions of a fixed random ordering from the last
    /// level and the rest from the first, so the dot product with level 0 falls
    /// off linearly in `k`.
    pub fn linear_levels<R: Rng + ?Sized>(levels: usize, n: usize, rng: &mut R) -> Result<Self> {
        if levels < 2 {
            return Err(Error::config("levels", "at least two levels are required"));
        }
        if levels > n {
            return Err(Error::config("levels", format!("{levels} levels exceed dimensionality {n}")));
        }
        let low = HyperVector::random_bipolar(n, rng)?;
        let high = HyperVector::random_bipolar(n, rng)?;
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(rng);

        let mut entries = Vec::with_capacity(levels);
        let mut current = low.into_vec();
        let mut taken = 0;
        for k in 0..levels {
            let target = k * n / (levels - 1);
            for &pos in &order[taken..target] {
                current[pos] = high.as_slice()[pos];
            }
            taken = target;
            entries.push(HyperVector::bipolar(current.clone())?);
        }
        Ok(Self { dim: n, entries })
    }

    /// Scatter codebook: each level is the previous one with a fresh random
    /// `⌊flip_fraction·n⌋`-subset of positions negated, so similarity decays
    /// roughly exponentially with level distance.
    pub fn scatter_levels<R: Rng + ?Sized>(levels: usize, n: usize, flip_fraction: f64, rng: &mut R) -> Result<Self> {
        if levels == 0 {
            return Err(Error::Empty("item memory"));
        }
        if !(flip_fraction > 0.0 && flip_fraction < 1.0) {
            return Err(Error::OutOfRange { what: "scatter flip fraction", value: flip_fraction, lo: 0.0, hi: 1.0 });
        }
        let flips = (flip_fraction * n as f64).floor() as usize;
        let mut current = HyperVector::random_bipolar(n, rng)?.into_vec();
        let mut entries = Vec::with_capacity(levels);
        entries.push(HyperVector::bipolar(current.clone())?);
        for _ in 1..levels {
            for pos in index::sample(rng, n, flips) {
                current[pos] = -current[pos];
            }
            entries.push(HyperVector::bipolar(current.clone())?);
        }
        Ok(Self { dim: n, entries })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, symbol: usize) -> Option<&HyperVector> {
        self.entries.get(symbol)
    }

    pub fn entries(&self) -> &[HyperVector] {
        &self.entries
    }

    /// Nearest entry by dot product. Ties resolve to the lowest symbol id.
    pub fn cleanup(&self, query: &HyperVector) -> Result<(usize, i64)> {
        same_dim(self.dim, query.dim())?;
        let mut best = (0, i64::MIN);
        for (id, e) in self.entries.iter().enumerate() {
            let score = e.dot(query)?;
            if score > best.1 {
                best = (id, score);
            }
        }
        Ok(best)
    }
}

/// Default per-level flip fraction for scatter codebooks.
pub fn default_scatter_flip(levels: usize) -> f64 {
    1.0 / (2.0 * levels.max(1) as f64)
}
