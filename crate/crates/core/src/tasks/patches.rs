//! Storage of analog values: images bundled from sparsified pixel vectors,
//! stored one per step in an integer reservoir and read back by similarity.

use serde::{Deserialize, Serialize};

use super::result::RunRecord;
use super::{config_echo, Outcome, Protocol};
use crate::data::ImagePatch;
use crate::error::{Error, Result};
use crate::hd::HyperVector;
use crate::reservoir::{EngineKind, IntState};
use crate::rng::{seeded, streams};

/// Size and clipping threshold of one reservoir in the comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PatchReservoir {
    pub n: usize,
    pub kappa: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PatchConfig {
    pub reservoirs: Vec<PatchReservoir>,
    /// Largest accepted number of values (pixels × channels) per image.
    pub max_pixels: usize,
}

impl Default for PatchConfig {
    fn default() -> Self {
        Self {
            reservoirs: [(64000, 11), (32000, 8), (16000, 6), (8000, 4)]
                .into_iter()
                .map(|(n, kappa)| PatchReservoir { n, kappa })
                .collect(),
            max_pixels: 4096,
        }
    }
}

impl PatchConfig {
    pub fn validate(&self) -> Result<()> {
        if self.reservoirs.is_empty() {
            return Err(Error::config("reservoirs", "at least one reservoir is required"));
        }
        for r in &self.reservoirs {
            if r.n == 0 {
                return Err(Error::config("n", "reservoir size must be at least 1"));
            }
            if !(1..=127).contains(&r.kappa) {
                return Err(Error::InvalidThreshold(r.kappa));
            }
        }
        Ok(())
    }
}

/// Bundle of the pixel vectors of `image`, each pixel's base vector
/// sparsified to a density equal to its value.
fn encode_image(image: &ImagePatch, bases: &[HyperVector], rng: &mut crate::rng::Rng) -> Result<HyperVector> {
    let n = bases[0].dim();
    let mut acc = vec![0i16; n];
    for (base, &v) in bases.iter().zip(image.values()) {
        let sparse = base.sparsify(v, rng)?;
        for (a, &s) in acc.iter_mut().zip(sparse.as_slice()) {
            *a += s;
        }
    }
    HyperVector::integer(acc)
}

/// Estimated pixel values of the image stored `delay` steps before the
/// current state: similarity of the back-shifted state with each base
/// vector, divided by `N`, clamped to `[0, 1]`.
pub fn decode_image(state: &HyperVector, bases: &[HyperVector], delay: usize) -> Result<Vec<f64>> {
    let shifted = state.cyclic_shift(-(delay as i64));
    let n = state.dim() as f64;
    bases.iter().map(|b| Ok((shifted.dot(b)? as f64 / n).clamp(0.0, 1.0))).collect()
}

fn mse(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>() / a.len() as f64
}

/// `[image][delay]` → pixel values.
type Reconstructions = Vec<Vec<Vec<f64>>>;

/// Stores `images` in order under every cyclic rotation of the presentation
/// order and returns, per delay, the reconstruction MSE averaged over
/// rotations, plus the reconstruction of each image at each delay.
fn run_one(images: &[ImagePatch], res: PatchReservoir, seed: u64) -> Result<(Vec<f64>, Reconstructions)> {
    let k = images.len();
    let pixels = images[0].values().len();
    let mut rng = seeded(seed, streams::ENCODING);
    let bases = (0..pixels).map(|_| HyperVector::random_bipolar(res.n, &mut rng)).collect::<Result<Vec<_>>>()?;
    let mut noise = seeded(seed, streams::NOISE);
    let encoded = images.iter().map(|im| encode_image(im, &bases, &mut noise)).collect::<Result<Vec<_>>>()?;
    let kappa = res.kappa as i16;

    let mut mse_by_delay = vec![0.0; k];
    // recon[image][delay]
    let mut recon = vec![vec![Vec::new(); k]; k];
    for rot in 0..k {
        let order: Vec<usize> = (0..k).map(|i| (i + rot) % k).collect();
        let mut state = IntState::zeros(res.n, kappa)?;
        for &i in &order {
            state.advance_integer(&encoded[i], kappa, 1)?;
        }
        for (d, total) in mse_by_delay.iter_mut().enumerate() {
            let image = order[k - 1 - d];
            let est = decode_image(state.vector(), &bases, d)?;
            *total += mse(&est, images[image].values()) / k as f64;
            recon[image][d] = est;
        }
    }
    Ok((mse_by_delay, recon))
}

/// Reconstruction error versus delay for each configured reservoir. The
/// protocol's engines must be integer engines; the analog round trip has no
/// float counterpart.
pub fn run_patches(images: &[ImagePatch], cfg: &PatchConfig, protocol: &Protocol) -> Result<Outcome> {
    cfg.validate()?;
    if images.is_empty() {
        return Err(Error::Empty("image list"));
    }
    let pixels = images[0].values().len();
    for im in images {
        if im.values().len() > cfg.max_pixels {
            return Err(Error::config(
                "max_pixels",
                format!("image with {} values exceeds the budget of {}", im.values().len(), cfg.max_pixels),
            ));
        }
        if im.values().len() != pixels {
            return Err(Error::config("images", "all images must have the same size"));
        }
    }
    if protocol.engines.iter().any(|e| !e.is_integer()) {
        return Err(Error::config("engine", "analog patches are only defined for the integer reservoir"));
    }
    let protocol = Protocol { engines: vec![EngineKind::Intesn], ..protocol.clone() };
    let runs = protocol.run(|kind, seed| {
        let mut record = RunRecord::new(kind.label(), seed);
        let mut all = Vec::new();
        for &res in &cfg.reservoirs {
            let (mse, recon) = run_one(images, res, seed)?;
            all.extend_from_slice(&mse);
            record.insert(format!("mse.n{}", res.n), mse);
            for (i, per_delay) in recon.into_iter().enumerate() {
                for (d, values) in per_delay.into_iter().enumerate() {
                    record.insert(format!("reconstruction.n{}.image{i}.d{d}", res.n), values);
                }
            }
        }
        record.insert("mse_mean", vec![super::metrics::mean(&all)]);
        for (i, im) in images.iter().enumerate() {
            record.insert(format!("original.image{i}"), im.values().to_vec());
        }
        Ok(record)
    })?;
    let mut echo = config_echo(cfg, &protocol)?;
    if let serde_json::Value::Object(map) = &mut echo {
        let shapes: Vec<[usize; 3]> = images.iter().map(|im| [im.width(), im.height(), im.channels()]).collect();
        map.insert("images".into(), serde_json::to_value(shapes)?);
    }
    let result = super::ExperimentResult::new("patches", echo, runs, "mse_mean")?;
    Ok(Outcome { result, models: Vec::new() })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_by_two_image_round_trip() {
        let im = ImagePatch::new(2, 2, 1, vec![1.0, 0.0, 1.0, 0.0]).unwrap();
        let res = PatchReservoir { n: 10000, kappa: 3 };
        let (mse, recon) = run_one(std::slice::from_ref(&im), res, 4).unwrap();
        for (est, truth) in recon[0][0].iter().zip(im.values()) {
            assert!((est - truth).abs() < 0.05, "{est} vs {truth}");
        }
        assert!(mse[0] < 0.05f64.powi(2));
    }

    #[test]
    fn delay_and_size_ordering() {
        let images: Vec<ImagePatch> = (0..3)
            .map(|s| ImagePatch::new(8, 8, 1, (0..64).map(|i| ((i * (s + 3)) % 11) as f64 / 10.0).collect()).unwrap())
            .collect();
        let (small, _) = run_one(&images, PatchReservoir { n: 4000, kappa: 4 }, 1).unwrap();
        let (large, _) = run_one(&images, PatchReservoir { n: 32000, kappa: 8 }, 1).unwrap();
        assert!(large[0] < small[0], "{large:?} {small:?}");
        assert!(large[0] < large[1] && large[1] < large[2], "{large:?}");
    }

    #[test]
    fn budget_and_engine_checks() {
        let im = ImagePatch::new(4, 4, 1, vec![0.5; 16]).unwrap();
        let cfg = PatchConfig { max_pixels: 8, ..Default::default() };
        let p = Protocol::new(vec![EngineKind::Intesn], vec![1]);
        assert!(run_patches(std::slice::from_ref(&im), &cfg, &p).unwrap_err().is_config_error());
        let p = Protocol::new(vec![EngineKind::Esn], vec![1]);
        assert!(run_patches(&[im], &PatchConfig::default(), &p).is_err());
    }
}
