use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform scalar quantizer on levels `lo, lo + step, ..., hi`.
///
/// Values are scaled by `1/step`, rounded half away from zero and clamped to
/// the boundary levels, so `step = 0.01` reproduces rounding to two decimals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawQuantizer")]
pub struct Quantizer {
    lo: f64,
    hi: f64,
    step: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawQuantizer {
    lo: f64,
    hi: f64,
    step: f64,
}

impl TryFrom<RawQuantizer> for Quantizer {
    type Error = Error;

    fn try_from(r: RawQuantizer) -> Result<Self> {
        Quantizer::new(r.lo, r.hi, r.step)
    }
}

impl Quantizer {
    /// `lo` and `hi` must both be integer multiples of `step`.
    pub fn new(lo: f64, hi: f64, step: f64) -> Result<Self> {
        if !(step.is_finite() && step > 0.0) {
            return Err(Error::config("quantizer.step", "must be positive and finite"));
        }
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::config("quantizer", format!("need lo < hi, got [{lo}, {hi}]")));
        }
        for (name, v) in [("quantizer.lo", lo), ("quantizer.hi", hi)] {
            let k = v / step;
            if (k - k.round()).abs() > 1e-9 * k.abs().max(1.0) {
                return Err(Error::config(name, format!("{v} is not a multiple of step {step}")));
            }
        }
        Ok(Self { lo, hi, step })
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    fn lo_index(&self) -> i64 {
        (self.lo / self.step).round() as i64
    }

    fn hi_index(&self) -> i64 {
        (self.hi / self.step).round() as i64
    }

    /// Number of representable levels.
    pub fn levels(&self) -> usize {
        (self.hi_index() - self.lo_index() + 1) as usize
    }

    /// Index in `0..levels()` of the level nearest to `v`.
    pub fn level_index(&self, v: f64) -> usize {
        // f64::round is half-away-from-zero.
        let k = (v / self.step).round() as i64;
        (k.clamp(self.lo_index(), self.hi_index()) - self.lo_index()) as usize
    }

    pub fn level_value(&self, index: usize) -> f64 {
        (self.lo_index() + index as i64) as f64 * self.step
    }

    pub fn quantize(&self, v: f64) -> f64 {
        self.level_value(self.level_index(v))
    }

    pub fn contains(&self, v: f64) -> bool {
        v >= self.lo - 0.5 * self.step && v <= self.hi + 0.5 * self.step
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sine_q() -> Quantizer {
        Quantizer::new(-0.5, 0.5, 0.01).unwrap()
    }

    #[test]
    fn deserialization_validates() {
        let q: Quantizer = serde_json::from_str(r#"{"lo": -0.5, "hi": 0.5, "step": 0.01}"#).unwrap();
        assert_eq!(q, sine_q());
        assert!(serde_json::from_str::<Quantizer>(r#"{"lo": 1, "hi": 0, "step": 0.1}"#).is_err());
    }

    #[test]
    fn two_decimal_rounding() {
        let q = sine_q();
        assert_eq!(q.levels(), 101);
        assert!((q.quantize(0.12345) - 0.12).abs() < 1e-12);
        assert!((q.quantize(-0.005) - -0.01).abs() < 1e-12);
        assert!((q.quantize(0.7) - 0.5).abs() < 1e-12);
        assert!((q.quantize(-3.0) - -0.5).abs() < 1e-12);
        assert_eq!(q.level_index(-0.5), 0);
        assert_eq!(q.level_index(0.5), 100);
    }

    #[test]
    fn idempotent_and_on_grid() {
        let q = sine_q();
        for i in -700..700 {
            let v = i as f64 * 0.000731;
            let a = q.quantize(v);
            assert_eq!(q.quantize(a), a);
            let k = (a - q.lo()) / q.step();
            assert!((k - k.round()).abs() < 1e-9);
        }
    }

    #[test]
    fn invalid_configs() {
        assert!(Quantizer::new(0.0, 1.0, 0.0).is_err());
        assert!(Quantizer::new(1.0, 0.0, 0.1).is_err());
        assert!(Quantizer::new(0.005, 1.0, 0.01).is_err());
    }
}
