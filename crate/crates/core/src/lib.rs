//! Integer echo state networks.
//!
//! The reservoir of an integer ESN is a vector of small bounded integers. Its
//! recurrence is a cyclic shift instead of a matrix product and its
//! nonlinearity is clipping at `±κ`. This crate provides
//!
//! - [`hd`]: bipolar/ternary hypervector algebra, codebooks and encoders,
//! - [`reservoir`]: the integer reservoir and a conventional `tanh` ESN,
//! - [`readout`]: ridge-regression readouts,
//! - [`tasks`]: sequence recall, analog storage, time-series classification
//!   and signal generation experiments,
//! - [`data`]: dataset, image, model and result file formats.

pub mod data;
pub mod error;
pub mod hd;
mod linalg;
pub mod readout;
pub mod reservoir;
pub mod rng;
pub mod tasks;

pub use data::{ImagePatch, ModelFile, TimeSeriesDataset};
pub use error::{Error, Result};
pub use faer::Mat;
pub use hd::{HyperVector, ItemMemory, Kind, Quantizer};
pub use readout::{ReadoutMatrix, TrainingBatch};
pub use reservoir::{Engine, EngineKind, EsnConfig, EsnWeights, IntEsnConfig, Stimulus};
pub use tasks::{ExperimentResult, Outcome, Protocol, RunRecord};
