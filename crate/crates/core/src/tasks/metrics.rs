//! Scalar metrics shared by the experiment drivers.

use crate::error::{Error, Result};

/// Root-mean-square error normalized by the (population) standard deviation
/// of `truth`.
pub fn nrmse(pred: &[f64], truth: &[f64]) -> Result<f64> {
    if pred.len() != truth.len() {
        return Err(Error::DimensionMismatch { expected: truth.len(), got: pred.len() });
    }
    if truth.len() < 2 {
        return Err(Error::config("truth", "at least two samples are required"));
    }
    let sd = std_dev(truth);
    if sd == 0.0 {
        return Err(Error::config("truth", "zero variance"));
    }
    let mse = pred.iter().zip(truth).map(|(p, t)| (p - t).powi(2)).sum::<f64>() / truth.len() as f64;
    Ok(mse.sqrt() / sd)
}

/// Mutual information (bits) between a uniformly drawn symbol from an
/// alphabet of `alphabet` symbols and its decoded guess, assuming a correct
/// guess with probability `p` and errors spread evenly over the others.
pub fn symbol_information(p: f64, alphabet: usize) -> f64 {
    let d = alphabet as f64;
    if alphabet < 2 {
        return 0.0;
    }
    let p = p.clamp(0.0, 1.0);
    let mut info = d.log2();
    if p > 0.0 {
        info += p * p.log2();
    }
    if p < 1.0 {
        info += (1.0 - p) * ((1.0 - p) / (d - 1.0)).log2();
    }
    info.max(0.0)
}

/// Total information decoded over a set of delays.
pub fn decoded_information(accuracies: &[f64], alphabet: usize) -> f64 {
    accuracies.iter().map(|&p| symbol_information(p, alphabet)).sum()
}

pub fn mean(v: &[f64]) -> f64 {
    if v.is_empty() {
        return f64::NAN;
    }
    v.iter().sum::<f64>() / v.len() as f64
}

/// Population standard deviation.
pub fn std_dev(v: &[f64]) -> f64 {
    if v.is_empty() {
        return f64::NAN;
    }
    let m = mean(v);
    (v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / v.len() as f64).sqrt()
}

/// Linear-interpolated percentile, `q ∈ [0, 100]`.
pub fn percentile(v: &[f64], q: f64) -> f64 {
    if v.is_empty() {
        return f64::NAN;
    }
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    let pos = (q / 100.0).clamp(0.0, 1.0) * (s.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    s[lo] + (s[hi] - s[lo]) * (pos - lo as f64)
}

pub fn median(v: &[f64]) -> f64 {
    percentile(v, 50.0)
}

fn ranks(v: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
    let mut r = vec![0.0; v.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            r[k] = avg;
        }
        i = j + 1;
    }
    r
}

/// Spearman rank correlation with average ranks for ties.
pub fn spearman(a: &[f64], b: &[f64]) -> f64 {
    let (ra, rb) = (ranks(a), ranks(b));
    let (ma, mb) = (mean(&ra), mean(&rb));
    let cov: f64 = ra.iter().zip(&rb).map(|(x, y)| (x - ma) * (y - mb)).sum();
    let va: f64 = ra.iter().map(|x| (x - ma).powi(2)).sum();
    let vb: f64 = rb.iter().map(|y| (y - mb).powi(2)).sum();
    if va == 0.0 || vb == 0.0 {
        return 0.0;
    }
    cov / (va * vb).sqrt()
}

/// Index of the strongest non-DC bin of the `bins`-point DFT of the
/// mean-removed, zero-padded signal.
pub fn dominant_frequency_bin(signal: &[f64], bins: usize) -> usize {
    let m = mean(signal);
    let mut best = (0, f64::MIN);
    for k in 1..=bins / 2 {
        let w = -2.0 * std::f64::consts::PI * k as f64 / bins as f64;
        let (mut re, mut im) = (0.0, 0.0);
        for (n, &x) in signal.iter().take(bins).enumerate() {
            let (s, c) = (w * n as f64).sin_cos();
            re += (x - m) * c;
            im += (x - m) * s;
        }
        let power = re * re + im * im;
        if power > best.1 {
            best = (k, power);
        }
    }
    best.0
}
