use crate::error::{Error, Result};
use crate::hd::{HyperVector, ItemMemory, Kind, PackedVector, ValueEncoder};

/// How the input layer is projected into the reservoir.
#[derive(Debug, Clone, PartialEq)]
pub enum InputCoding {
    /// One codebook entry per symbol of a finite alphabet.
    Symbols(ItemMemory),
    /// Quantized real-valued samples.
    Values(ValueEncoder),
}

impl InputCoding {
    pub fn dim(&self) -> usize {
        match self {
            InputCoding::Symbols(m) => m.dim(),
            InputCoding::Values(e) => e.dim(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntEsnConfig {
    size: usize,
    kappa: i16,
    shift: i64,
    input: Option<InputCoding>,
    output: Option<ValueEncoder>,
}

impl IntEsnConfig {
    pub fn new(kappa: i64, input: Option<InputCoding>, output: Option<ValueEncoder>) -> Result<Self> {
        if !(1..=127).contains(&kappa) {
            return Err(Error::InvalidThreshold(kappa));
        }
        let size = match (&input, &output) {
            (None, None) => {
                return Err(Error::config("intesn", "at least one of the input or output memories is required"));
            }
            (Some(i), Some(o)) => {
                if i.dim() != o.dim() {
                    return Err(Error::DimensionMismatch { expected: i.dim(), got: o.dim() });
                }
                i.dim()
            }
            (Some(i), None) => i.dim(),
            (None, Some(o)) => o.dim(),
        };
        Ok(Self { size, kappa: kappa as i16, shift: 1, input, output })
    }

    pub fn with_shift(mut self, shift: i64) -> Self {
        self.shift = shift;
        self
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn kappa(&self) -> i16 {
        self.kappa
    }

    pub fn shift(&self) -> i64 {
        self.shift
    }

    pub fn input(&self) -> Option<&InputCoding> {
        self.input.as_ref()
    }

    pub fn output(&self) -> Option<&ValueEncoder> {
        self.output.as_ref()
    }
}

/// Integer reservoir state and the number of updates applied so far.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntState {
    x: HyperVector,
    step: u64,
}

impl IntState {
    pub fn zeros(n: usize, kappa: i16) -> Result<Self> {
        let mut x = HyperVector::zeros(n)?;
        x.set_kind(Kind::Integer { bound: Some(kappa) });
        Ok(Self { x, step: 0 })
    }

    pub fn from_vector(x: HyperVector, kappa: i16) -> Result<Self> {
        let x = HyperVector::bounded(x.into_vec(), kappa)?;
        Ok(Self { x, step: 0 })
    }

    /// Sets the update counter (used when restoring a saved state).
    pub fn with_step(mut self, step: u64) -> Self {
        self.step = step;
        self
    }

    pub fn vector(&self) -> &HyperVector {
        &self.x
    }

    pub fn step(&self) -> u64 {
        self.step
    }

    /// In-place update: shift, add input, add feedback, clip.
    pub fn advance(
        &mut self,
        u_hd: Option<&HyperVector>,
        y_hd: Option<&HyperVector>,
        cfg: &IntEsnConfig,
    ) -> Result<()> {
        let n = self.x.dim();
        for v in [u_hd, y_hd].into_iter().flatten() {
            if v.dim() != n {
                return Err(Error::DimensionMismatch { expected: n, got: v.dim() });
            }
            if !v.is_ternary() {
                let (index, &value) = v
                    .as_slice()
                    .iter()
                    .enumerate()
                    .find(|(_, e)| e.abs() > 1)
                    .expect("non-ternary vector has an element outside [-1, 1]");
                return Err(Error::InvalidElement { index, value: value.into(), expected: "ternary" });
            }
        }
        self.advance_unchecked(u_hd.map(HyperVector::as_slice), y_hd.map(HyperVector::as_slice), cfg.kappa, cfg.shift);
        Ok(())
    }

    /// Update with an integer-valued drive (e.g. a bundle of many ternary
    /// vectors) instead of a codebook entry; only the dimensionality is
    /// checked.
    pub fn advance_integer(&mut self, drive: &HyperVector, kappa: i16, shift: i64) -> Result<()> {
        if kappa < 1 {
            return Err(Error::InvalidThreshold(kappa.into()));
        }
        if drive.dim() != self.x.dim() {
            return Err(Error::DimensionMismatch { expected: self.x.dim(), got: drive.dim() });
        }
        self.advance_unchecked(Some(drive.as_slice()), None, kappa, shift);
        Ok(())
    }

    fn advance_unchecked(&mut self, u: Option<&[i16]>, y: Option<&[i16]>, kappa: i16, shift: i64) {
        self.x.shift_in_place(shift);
        let x = self.x.as_mut_slice();
        match (u, y) {
            (Some(u), Some(y)) => {
                for ((xi, &ui), &yi) in x.iter_mut().zip(u).zip(y) {
                    *xi = (*xi + ui + yi).clamp(-kappa, kappa);
                }
            }
            (Some(d), None) | (None, Some(d)) => {
                for (xi, &di) in x.iter_mut().zip(d) {
                    *xi = xi.saturating_add(di).clamp(-kappa, kappa);
                }
            }
            (None, None) => {}
        }
        self.step += 1;
    }

    pub fn packed(&self) -> Result<PackedVector> {
        PackedVector::from_hypervector(&self.x)
    }
}

/// One integer ESN update, returning the new state.
pub fn intesn_step(
    state: &IntState,
    u_hd: Option<&HyperVector>,
    y_hd: Option<&HyperVector>,
    cfg: &IntEsnConfig,
) -> Result<IntState> {
    let mut next = state.clone();
    next.advance(u_hd, y_hd, cfg)?;
    Ok(next)
}
