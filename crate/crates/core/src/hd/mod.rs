//! Hyperdimensional vector algebra and the encoders built on it.

mod encode;
mod memory;
mod pack;
mod quantize;
mod vector;

pub use encode::{LevelCoding, ValueEncoder};
pub use memory::{default_scatter_flip, ItemMemory};
pub use pack::{byte_len, PackedVector};
pub use quantize::Quantizer;
pub use vector::{bits_per_element, bundle, HyperVector, Kind};
