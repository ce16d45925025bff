use std::ops::Neg;

use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Value domain of a [`HyperVector`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    /// Every element is -1 or +1.
    Bipolar,
    /// Every element is -1, 0 or +1.
    Ternary,
    /// Arbitrary integers, optionally bounded to `[-bound, bound]`.
    Integer { bound: Option<i16> },
}

impl Kind {
    /// Largest magnitude an element of this kind may take, if bounded.
    pub fn bound(&self) -> Option<i16> {
        match self {
            Kind::Bipolar | Kind::Ternary => Some(1),
            Kind::Integer { bound } => *bound,
        }
    }
}

/// Fixed-length integer vector, the carrier of every reservoir state and
/// codebook entry.
///
/// The length is fixed at construction. Elements are stored as `i16`, which
/// leaves headroom for bundling many ternary vectors before clipping.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HyperVector {
    elems: Vec<i16>,
    kind: Kind,
}

impl HyperVector {
    /// All-zero vector of dimensionality `n`.
    pub fn zeros(n: usize) -> Result<Self> {
        check_dim(n)?;
        Ok(Self { elems: vec![0; n], kind: Kind::Ternary })
    }

    pub fn bipolar(elems: Vec<i16>) -> Result<Self> {
        check_dim(elems.len())?;
        validate(&elems, 1, false)?;
        Ok(Self { elems, kind: Kind::Bipolar })
    }

    pub fn ternary(elems: Vec<i16>) -> Result<Self> {
        check_dim(elems.len())?;
        validate(&elems, 1, true)?;
        Ok(Self { elems, kind: Kind::Ternary })
    }

    /// Integer vector bounded by `bound`; fails if any element exceeds it.
    pub fn bounded(elems: Vec<i16>, bound: i16) -> Result<Self> {
        check_dim(elems.len())?;
        if bound < 1 {
            return Err(Error::InvalidThreshold(bound.into()));
        }
        validate(&elems, bound, true)?;
        Ok(Self { elems, kind: Kind::Integer { bound: Some(bound) } })
    }

    /// Unbounded integer vector.
    pub fn integer(elems: Vec<i16>) -> Result<Self> {
        check_dim(elems.len())?;
        Ok(Self { elems, kind: Kind::Integer { bound: None } })
    }

    /// Random bipolar vector with i.i.d. equiprobable elements.
    pub fn random_bipolar<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Self> {
        check_dim(n)?;
        let elems = (0..n).map(|_| if rng.random::<bool>() { 1 } else { -1 }).collect();
        Ok(Self { elems, kind: Kind::Bipolar })
    }

    pub fn dim(&self) -> usize {
        self.elems.len()
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    pub fn as_slice(&self) -> &[i16] {
        &self.elems
    }

    pub fn into_vec(self) -> Vec<i16> {
        self.elems
    }

    /// True when every element lies in {-1, 0, +1}.
    pub fn is_ternary(&self) -> bool {
        matches!(self.kind, Kind::Bipolar | Kind::Ternary) || self.elems.iter().all(|v| v.abs() <= 1)
    }

    pub fn max_abs(&self) -> i16 {
        self.elems.iter().map(|v| v.abs()).max().unwrap_or(0)
    }

    /// Rotates the vector so that the element at index `i` moves to
    /// `(i + k) mod N`. Negative and oversized shifts are reduced modulo N.
    pub fn cyclic_shift(&self, k: i64) -> Self {
        let mut out = self.clone();
        out.shift_in_place(k);
        out
    }

    pub fn shift_in_place(&mut self, k: i64) {
        let n = self.elems.len() as i64;
        let k = k.rem_euclid(n) as usize;
        self.elems.rotate_right(k);
    }

    /// Inner product, accumulated in 64 bits.
    pub fn dot(&self, other: &Self) -> Result<i64> {
        same_dim(self.dim(), other.dim())?;
        Ok(dot_i16(&self.elems, &other.elems))
    }

    /// Applies the clipping nonlinearity elementwise, saturating at `±kappa`.
    pub fn clip(&self, kappa: i64) -> Result<Self> {
        let bound = check_kappa(kappa)?;
        let elems = self.elems.iter().map(|&v| v.clamp(-bound, bound)).collect();
        Ok(Self { elems, kind: Kind::Integer { bound: Some(bound) } })
    }

    /// Elementwise product (binding). Bipolar ⊙ bipolar stays bipolar.
    pub fn bind(&self, other: &Self) -> Result<Self> {
        same_dim(self.dim(), other.dim())?;
        let elems: Vec<i16> = self.elems.iter().zip(&other.elems).map(|(a, b)| a.saturating_mul(*b)).collect();
        let kind = match (self.kind, other.kind) {
            (Kind::Bipolar, Kind::Bipolar) => Kind::Bipolar,
            (Kind::Bipolar | Kind::Ternary, Kind::Bipolar | Kind::Ternary) => Kind::Ternary,
            _ => Kind::Integer { bound: None },
        };
        Ok(Self { elems, kind })
    }

    /// Elementwise sign, mapping zero to zero. The result is ternary.
    pub fn sign(&self) -> Self {
        Self { elems: self.elems.iter().map(|v| v.signum()).collect(), kind: Kind::Ternary }
    }

    /// Copy of a bipolar vector where `value` controls density: exactly
    /// `round((1 - value) * N)` randomly chosen positions are zeroed.
    pub fn sparsify<R: Rng + ?Sized>(&self, value: f64, rng: &mut R) -> Result<Self> {
        if !(0.0..=1.0).contains(&value) {
            return Err(Error::OutOfRange { what: "sparsify value", value, lo: 0.0, hi: 1.0 });
        }
        if self.kind != Kind::Bipolar {
            validate(&self.elems, 1, false)?;
        }
        let n = self.dim();
        let zeros = (((1.0 - value) * n as f64).round() as usize).min(n);
        let mut elems = self.elems.clone();
        for i in index::sample(rng, n, zeros) {
            elems[i] = 0;
        }
        Ok(Self { elems, kind: Kind::Ternary })
    }

    pub(crate) fn as_mut_slice(&mut self) -> &mut [i16] {
        &mut self.elems
    }

    pub(crate) fn set_kind(&mut self, kind: Kind) {
        self.kind = kind;
    }
}

impl Neg for &HyperVector {
    type Output = HyperVector;

    fn neg(self) -> HyperVector {
        HyperVector { elems: self.elems.iter().map(|v| -v).collect(), kind: self.kind }
    }
}

impl Neg for HyperVector {
    type Output = HyperVector;

    fn neg(self) -> HyperVector {
        -&self
    }
}

/// Elementwise integer sum of a non-empty set of vectors. No clipping is
/// applied; overflow beyond `i16` is reported as an error.
pub fn bundle<'a, I>(vectors: I) -> Result<HyperVector>
where
    I: IntoIterator<Item = &'a HyperVector>,
{
    let mut iter = vectors.into_iter();
    let first = iter.next().ok_or(Error::Empty("bundle of zero vectors"))?;
    let mut acc: Vec<i32> = first.elems.iter().map(|&v| v.into()).collect();
    for v in iter {
        same_dim(acc.len(), v.dim())?;
        for (a, &b) in acc.iter_mut().zip(&v.elems) {
            *a += i32::from(b);
        }
    }
    let elems = acc
        .into_iter()
        .map(|v| i16::try_from(v).map_err(|_| Error::Numerical(format!("bundle overflow: {v}"))))
        .collect::<Result<Vec<_>>>()?;
    Ok(HyperVector { elems, kind: Kind::Integer { bound: None } })
}

/// Bits needed to store one element bounded by `kappa`: ⌈log2(2κ+1)⌉.
pub fn bits_per_element(kappa: i64) -> Result<u32> {
    let bound = check_kappa(kappa)?;
    let levels = 2 * u32::from(bound as u16) + 1;
    Ok(u32::BITS - (levels - 1).leading_zeros())
}

pub(crate) fn dot_i16(a: &[i16], b: &[i16]) -> i64 {
    // Chunked i32 partial sums stay exact for |elements| <= 127 and chunks of
    // 2^16, then fold into i64.
    a.chunks(1 << 16)
        .zip(b.chunks(1 << 16))
        .map(|(x, y)| x.iter().zip(y).map(|(&p, &q)| i64::from(i32::from(p) * i32::from(q))).sum::<i64>())
        .sum()
}

pub(crate) fn check_kappa(kappa: i64) -> Result<i16> {
    if kappa < 1 || kappa > i64::from(i16::MAX) {
        return Err(Error::InvalidThreshold(kappa));
    }
    Ok(kappa as i16)
}

fn check_dim(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidDimension("hypervector dimensionality must be at least 1".into()));
    }
    Ok(())
}

pub(crate) fn same_dim(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::DimensionMismatch { expected, got });
    }
    Ok(())
}

fn validate(elems: &[i16], bound: i16, allow_zero: bool) -> Result<()> {
    let expected = match (bound, allow_zero) {
        (1, false) => "bipolar",
        (1, true) => "ternary",
        _ => "within the declared bound",
    };
    for (index, &v) in elems.iter().enumerate() {
        if v.abs() > bound || (!allow_zero && v == 0) {
            return Err(Error::InvalidElement { index, value: v.into(), expected });
        }
    }
    Ok(())
}
