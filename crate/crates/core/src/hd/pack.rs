//! Fixed-width bit packing of bounded integer vectors.
//!
//! An element `v ∈ [-κ, κ]` is stored as the unsigned offset `v + κ` in
//! `⌈log2(2κ+1)⌉` bits, little-endian within a continuous bit stream. A
//! vector of `N` elements occupies exactly `N·bits` bits, rounded up to whole
//! bytes only at the end of the stream.

use super::vector::{bits_per_element, check_kappa, HyperVector, Kind};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PackedVector {
    bound: i16,
    bits: u32,
    len: usize,
    bytes: Vec<u8>,
}

impl PackedVector {
    pub fn pack(values: &[i16], bound: i64) -> Result<Self> {
        let bits = bits_per_element(bound)?;
        let bound = check_kappa(bound)?;
        let mut bytes = vec![0u8; byte_len(values.len(), bits)];
        let mut bitpos = 0usize;
        for (index, &v) in values.iter().enumerate() {
            if v.abs() > bound {
                return Err(Error::InvalidElement { index, value: v.into(), expected: "within the packing bound" });
            }
            let mut code = (i32::from(v) + i32::from(bound)) as u32;
            let mut remaining = bits;
            while remaining > 0 {
                let byte = bitpos / 8;
                let offset = (bitpos % 8) as u32;
                let take = remaining.min(8 - offset);
                let mask = (1u32 << take) - 1;
                bytes[byte] |= ((code & mask) << offset) as u8;
                code >>= take;
                remaining -= take;
                bitpos += take as usize;
            }
        }
        Ok(Self { bound, bits, len: values.len(), bytes })
    }

    /// Packs a hypervector using its declared bound.
    pub fn from_hypervector(v: &HyperVector) -> Result<Self> {
        let bound = v.kind().bound().map(i64::from).unwrap_or_else(|| i64::from(v.max_abs().max(1)));
        Self::pack(v.as_slice(), bound)
    }

    pub fn from_bytes(bytes: Vec<u8>, len: usize, bound: i64) -> Result<Self> {
        let bits = bits_per_element(bound)?;
        let expected = byte_len(len, bits);
        if bytes.len() != expected {
            return Err(Error::Model(format!("packed payload holds {} bytes, expected {expected}", bytes.len())));
        }
        Ok(Self { bound: bound as i16, bits, len, bytes })
    }

    pub fn unpack(&self) -> Result<Vec<i16>> {
        let mut out = Vec::with_capacity(self.len);
        let mut bitpos = 0usize;
        for index in 0..self.len {
            let mut code = 0u32;
            let mut got = 0u32;
            while got < self.bits {
                let byte = bitpos / 8;
                let offset = (bitpos % 8) as u32;
                let take = (self.bits - got).min(8 - offset);
                let mask = (1u32 << take) - 1;
                code |= ((u32::from(self.bytes[byte]) >> offset) & mask) << got;
                got += take;
                bitpos += take as usize;
            }
            let v = code as i32 - i32::from(self.bound);
            if v.abs() > i32::from(self.bound) {
                return Err(Error::InvalidElement { index, value: v.into(), expected: "within the packing bound" });
            }
            out.push(v as i16);
        }
        Ok(out)
    }

    pub fn to_hypervector(&self, kind: Kind) -> Result<HyperVector> {
        let v = self.unpack()?;
        match kind {
            Kind::Bipolar => HyperVector::bipolar(v),
            Kind::Ternary => HyperVector::ternary(v),
            Kind::Integer { bound: Some(b) } => HyperVector::bounded(v, b),
            Kind::Integer { bound: None } => HyperVector::integer(v),
        }
    }

    pub fn bound(&self) -> i16 {
        self.bound
    }

    pub fn bits_per_element(&self) -> u32 {
        self.bits
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Payload size in bits, `len · bits_per_element`.
    pub fn bit_len(&self) -> usize {
        self.len * self.bits as usize
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.bytes
    }
}

pub fn byte_len(len: usize, bits: u32) -> usize {
    (len * bits as usize).div_ceil(8)
}
