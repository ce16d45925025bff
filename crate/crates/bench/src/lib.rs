//! Criterion benchmarks of the reservoir updates and the readout fit; see
//! `benches/steps.rs`.
