//! Trained-model container.
//!
//! Layout: the 8-byte magic `RSVRMDL\n`, one format-version byte, a
//! little-endian `u32` header length, a JSON header, then the payload. The
//! header records the engine, seed and configuration and a directory of
//! payload sections. Integer vectors are bit-packed at
//! `⌈log2(2κ+1)⌉` bits per element (bipolar and ternary vectors at 2 bits);
//! matrices are little-endian `f64` in column-major order.

use std::path::Path;

use faer::Mat;
use serde::{Deserialize, Serialize};

use super::results::write_atomic;
use crate::error::{Error, Result};
use crate::hd::{HyperVector, ItemMemory, Kind, PackedVector, Quantizer, ValueEncoder};
use crate::readout::ReadoutMatrix;
use crate::reservoir::{
    Engine, EngineKind, EsnConfig, EsnEngine, EsnWeights, InputCoding, IntEngine, IntEsnConfig, IntState, Stimulus,
};
use crate::tasks::TrainedModel;

pub const MAGIC: &[u8; 8] = b"RSVRMDL\n";
pub const MODEL_FORMAT_VERSION: u8 = 1;
/// Byte offset of the version byte.
pub const VERSION_OFFSET: usize = MAGIC.len();

/// A reservoir with its trained readouts.
#[derive(Debug, Clone)]
pub struct ModelFile {
    pub kind: EngineKind,
    pub seed: u64,
    /// Experiment configuration the model was trained under.
    pub config: serde_json::Value,
    pub engine: Engine,
    pub readouts: Vec<(String, ReadoutMatrix)>,
}

impl ModelFile {
    pub fn from_trained(model: TrainedModel, config: serde_json::Value) -> Self {
        Self { kind: model.kind, seed: model.seed, config, engine: model.reservoir, readouts: model.readouts }
    }

    /// Advances the reservoir and returns every readout's output.
    pub fn predict(&mut self, input: Stimulus<'_>, feedback: Option<&[f64]>) -> Result<Vec<Vec<f64>>> {
        self.engine.step(input, feedback)?;
        let x = self.engine.state_vector();
        self.readouts.iter().map(|(_, r)| r.apply(&x)).collect()
    }

    pub fn readout(&self, name: &str) -> Option<&ReadoutMatrix> {
        self.readouts.iter().find(|(n, _)| n == name).map(|(_, r)| r)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "type")]
enum Section {
    Packed { offset: usize, bytes: usize, len: usize, bound: i16, kind: Kind },
    Matrix { offset: usize, bytes: usize, rows: usize, cols: usize },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct EncoderHeader {
    quantizer: Quantizer,
    memories: Vec<Vec<Section>>,
    keys: Vec<Section>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "coding")]
enum InputHeader {
    Symbols { entries: Vec<Section> },
    Values { encoder: EncoderHeader },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "flavour")]
enum ReservoirHeader {
    Esn {
        config: EsnConfig,
        w_in: Option<Section>,
        w: Section,
        w_back: Option<Section>,
        state: Section,
        step: u64,
    },
    Int {
        size: usize,
        kappa: i16,
        shift: i64,
        input: Option<InputHeader>,
        output: Option<EncoderHeader>,
        state: Section,
        step: u64,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct ReadoutHeader {
    name: String,
    lambda: f64,
    weights: Section,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct Header {
    engine: EngineKind,
    seed: u64,
    config: serde_json::Value,
    reservoir: ReservoirHeader,
    readouts: Vec<ReadoutHeader>,
}

#[derive(Default)]
struct PayloadWriter {
    bytes: Vec<u8>,
}

impl PayloadWriter {
    fn vector(&mut self, v: &HyperVector) -> Result<Section> {
        let packed = PackedVector::from_hypervector(v)?;
        let offset = self.bytes.len();
        self.bytes.extend_from_slice(packed.as_bytes());
        Ok(Section::Packed {
            offset,
            bytes: packed.as_bytes().len(),
            len: packed.len(),
            bound: packed.bound(),
            kind: v.kind(),
        })
    }

    fn vectors(&mut self, vs: &[HyperVector]) -> Result<Vec<Section>> {
        vs.iter().map(|v| self.vector(v)).collect()
    }

    fn matrix(&mut self, m: &Mat<f64>) -> Section {
        let offset = self.bytes.len();
        for j in 0..m.ncols() {
            for i in 0..m.nrows() {
                self.bytes.extend_from_slice(&m[(i, j)].to_le_bytes());
            }
        }
        Section::Matrix { offset, bytes: self.bytes.len() - offset, rows: m.nrows(), cols: m.ncols() }
    }

    fn encoder(&mut self, e: &ValueEncoder) -> Result<EncoderHeader> {
        Ok(EncoderHeader {
            quantizer: *e.quantizer(),
            memories: e.memories().iter().map(|m| self.vectors(m.entries())).collect::<Result<_>>()?,
            keys: self.vectors(e.keys())?,
        })
    }
}

struct PayloadReader<'a> {
    bytes: &'a [u8],
}

impl PayloadReader<'_> {
    fn slice(&self, offset: usize, len: usize) -> Result<&[u8]> {
        offset.checked_add(len).and_then(|end| self.bytes.get(offset..end)).ok_or_else(|| {
            Error::Model(format!("section [{offset}, +{len}) lies outside the {}-byte payload", self.bytes.len()))
        })
    }

    fn vector(&self, s: &Section) -> Result<HyperVector> {
        match *s {
            Section::Packed { offset, bytes, len, bound, kind } => {
                let raw = self.slice(offset, bytes)?.to_vec();
                PackedVector::from_bytes(raw, len, bound.into())?.to_hypervector(kind)
            }
            Section::Matrix { .. } => Err(Error::Model("expected a packed vector section".into())),
        }
    }

    fn vectors(&self, ss: &[Section]) -> Result<Vec<HyperVector>> {
        ss.iter().map(|s| self.vector(s)).collect()
    }

    fn matrix(&self, s: &Section) -> Result<Mat<f64>> {
        match *s {
            Section::Matrix { offset, bytes, rows, cols } => {
                if bytes != rows * cols * 8 {
                    return Err(Error::Model(format!("{rows}x{cols} matrix section holds {bytes} bytes")));
                }
                let raw = self.slice(offset, bytes)?;
                let value = |k: usize| f64::from_le_bytes(raw[8 * k..8 * k + 8].try_into().expect("8 bytes"));
                Ok(Mat::from_fn(rows, cols, |i, j| value(j * rows + i)))
            }
            Section::Packed { .. } => Err(Error::Model("expected a matrix section".into())),
        }
    }

    fn encoder(&self, h: &EncoderHeader) -> Result<ValueEncoder> {
        let memories = h.memories.iter().map(|m| ItemMemory::new(self.vectors(m)?)).collect::<Result<Vec<_>>>()?;
        ValueEncoder::new(h.quantizer, memories, self.vectors(&h.keys)?)
    }
}

/// Serializes `model` into the container format.
pub fn encode_model(model: &ModelFile) -> Result<Vec<u8>> {
    let mut p = PayloadWriter::default();
    let reservoir = match &model.engine {
        Engine::Esn(e) => {
            let w = e.weights();
            let state = Mat::from_fn(e.state().x.len(), 1, |i, _| e.state().x[i]);
            ReservoirHeader::Esn {
                config: *e.config(),
                w_in: w.w_in.as_ref().map(|m| p.matrix(m)),
                w: p.matrix(&w.w),
                w_back: w.w_back.as_ref().map(|m| p.matrix(m)),
                state: p.matrix(&state),
                step: e.state().step,
            }
        }
        Engine::Int(e) => {
            let cfg = e.config();
            let input = match cfg.input() {
                None => None,
                Some(InputCoding::Symbols(m)) => Some(InputHeader::Symbols { entries: p.vectors(m.entries())? }),
                Some(InputCoding::Values(enc)) => Some(InputHeader::Values { encoder: p.encoder(enc)? }),
            };
            let output = cfg.output().map(|enc| p.encoder(enc)).transpose()?;
            ReservoirHeader::Int {
                size: cfg.size(),
                kappa: cfg.kappa(),
                shift: cfg.shift(),
                input,
                output,
                state: p.vector(e.state().vector())?,
                step: e.state().step(),
            }
        }
    };
    let readouts = model
        .readouts
        .iter()
        .map(|(name, r)| ReadoutHeader { name: name.clone(), lambda: r.lambda(), weights: p.matrix(r.weights()) })
        .collect();
    let header = Header { engine: model.kind, seed: model.seed, config: model.config.clone(), reservoir, readouts };
    let json = serde_json::to_vec(&header)?;
    let mut out = Vec::with_capacity(MAGIC.len() + 5 + json.len() + p.bytes.len());
    out.extend_from_slice(MAGIC);
    out.push(MODEL_FORMAT_VERSION);
    out.extend_from_slice(&(json.len() as u32).to_le_bytes());
    out.extend_from_slice(&json);
    out.extend_from_slice(&p.bytes);
    Ok(out)
}

pub fn decode_model(bytes: &[u8]) -> Result<ModelFile> {
    if bytes.len() < MAGIC.len() + 5 || &bytes[..MAGIC.len()] != MAGIC {
        return Err(Error::Model("not a model file (bad magic)".into()));
    }
    let version = bytes[VERSION_OFFSET];
    if version != MODEL_FORMAT_VERSION {
        return Err(Error::Version { found: version, expected: MODEL_FORMAT_VERSION });
    }
    let start = VERSION_OFFSET + 5;
    let header_len = u32::from_le_bytes(bytes[VERSION_OFFSET + 1..start].try_into().expect("4 bytes")) as usize;
    let header_bytes = bytes
        .get(start..start + header_len)
        .ok_or_else(|| Error::Model(format!("truncated header: expected {header_len} bytes")))?;
    let header: Header = serde_json::from_slice(header_bytes)?;
    let r = PayloadReader { bytes: &bytes[start + header_len..] };

    let engine = match &header.reservoir {
        ReservoirHeader::Esn { config, w_in, w, w_back, state, step } => {
            let weights = EsnWeights {
                w_in: w_in.as_ref().map(|s| r.matrix(s)).transpose()?,
                w: r.matrix(w)?,
                w_back: w_back.as_ref().map(|s| r.matrix(s)).transpose()?,
            };
            let mut e = EsnEngine::new(*config, weights)?;
            let x = r.matrix(state)?;
            if x.nrows() != config.size {
                return Err(Error::DimensionMismatch { expected: config.size, got: x.nrows() });
            }
            e.state_mut().x = (0..config.size).map(|i| x[(i, 0)]).collect();
            e.state_mut().step = *step;
            Engine::Esn(e)
        }
        ReservoirHeader::Int { size, kappa, shift, input, output, state, step } => {
            let input = match input {
                None => None,
                Some(InputHeader::Symbols { entries }) => {
                    Some(InputCoding::Symbols(ItemMemory::new(r.vectors(entries)?)?))
                }
                Some(InputHeader::Values { encoder }) => Some(InputCoding::Values(r.encoder(encoder)?)),
            };
            let output = output.as_ref().map(|h| r.encoder(h)).transpose()?;
            let cfg = IntEsnConfig::new((*kappa).into(), input, output)?.with_shift(*shift);
            if cfg.size() != *size {
                return Err(Error::DimensionMismatch { expected: *size, got: cfg.size() });
            }
            let mut e = IntEngine::new(cfg)?;
            e.set_state(IntState::from_vector(r.vector(state)?, *kappa)?.with_step(*step))?;
            Engine::Int(e)
        }
    };
    let readouts = header
        .readouts
        .iter()
        .map(|h| Ok((h.name.clone(), ReadoutMatrix::new(r.matrix(&h.weights)?, h.lambda)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(ModelFile { kind: header.engine, seed: header.seed, config: header.config, engine, readouts })
}

pub fn save_model(model: &ModelFile, path: &Path) -> Result<()> {
    write_atomic(path, &encode_model(model)?)
}

pub fn load_model(path: &Path) -> Result<ModelFile> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_model(&bytes)
}

/// Payload bytes of the packed reservoir state of a saved integer model.
pub fn state_payload_bytes(bytes: &[u8]) -> Result<Option<usize>> {
    let start = VERSION_OFFSET + 5;
    let header_len = u32::from_le_bytes(
        bytes
            .get(VERSION_OFFSET + 1..start)
            .ok_or_else(|| Error::Model("truncated file".into()))?
            .try_into()
            .expect("4 bytes"),
    ) as usize;
    let header: Header = serde_json::from_slice(
        bytes.get(start..start + header_len).ok_or_else(|| Error::Model("truncated header".into()))?,
    )?;
    Ok(match header.reservoir {
        ReservoirHeader::Int { state: Section::Packed { bytes, .. }, .. } => Some(bytes),
        _ => None,
    })
}
