//! Per-band ADPCM loop with a backward-adapted predictor.
//!
//! For every sample: `p = predict(history)`, `d = x - p`, `code = Q(d)`,
//! `x̂ = p + Q⁻¹(code)`. Before the first sample of each new frame the
//! predictor is refitted on the previous frame's reconstruction, which the
//! decoder also holds, so no coefficients are transmitted. Frame 0 uses the
//! zero predictor.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::lpc::{fit_lpc, LinearPredictor};
use crate::mlp::{train_committee, MlpCommittee, TrainConfig, INPUTS};
use crate::quantizer::{check_bits, QuantizerState, QuantizerTables};
use crate::rng::mix64;
use crate::scalar::Real;

pub const DEFAULT_FRAME_LENGTH: usize = 200;
/// Longest history any predictor reads.
pub const HISTORY_LEN: usize = 25;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PredictorKind {
    Lpc10,
    Lpc25,
    Mlp,
}

impl PredictorKind {
    pub const ALL: [PredictorKind; 3] = [Self::Lpc10, Self::Lpc25, Self::Mlp];

    pub fn name(self) -> &'static str {
        match self {
            Self::Lpc10 => "lpc10",
            Self::Lpc25 => "lpc25",
            Self::Mlp => "mlp",
        }
    }

    /// Number of past samples the predictor reads.
    pub fn order(self) -> usize {
        match self {
            Self::Lpc10 => 10,
            Self::Lpc25 => 25,
            Self::Mlp => INPUTS,
        }
    }

    pub fn to_u8(self) -> u8 {
        match self {
            Self::Lpc10 => 0,
            Self::Lpc25 => 1,
            Self::Mlp => 2,
        }
    }

    pub fn from_u8(v: u8) -> Option<Self> {
        match v {
            0 => Some(Self::Lpc10),
            1 => Some(Self::Lpc25),
            2 => Some(Self::Mlp),
            _ => None,
        }
    }
}

impl fmt::Display for PredictorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PredictorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "lpc10" | "lpc-10" => Ok(Self::Lpc10),
            "lpc25" | "lpc-25" => Ok(Self::Lpc25),
            "mlp" => Ok(Self::Mlp),
            other => Err(Error::Config(format!("unknown predictor {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Band {
    Low,
    High,
}

impl Band {
    pub fn label(self) -> &'static str {
        match self {
            Self::Low => "L",
            Self::High => "H",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CodecConfig<T> {
    pub predictor: PredictorKind,
    pub nq_low: u8,
    pub nq_high: u8,
    /// Backward-adaptation frame, in band samples.
    pub frame_length: usize,
    pub seed_base: u64,
    pub train: TrainConfig<T>,
    pub quantizer: QuantizerTables<T>,
}

impl<T: Real> Default for CodecConfig<T> {
    fn default() -> Self {
        Self {
            predictor: PredictorKind::Lpc10,
            nq_low: 4,
            nq_high: 2,
            frame_length: DEFAULT_FRAME_LENGTH,
            seed_base: 0,
            train: TrainConfig::default(),
            quantizer: QuantizerTables::default(),
        }
    }
}

impl<T: Real> CodecConfig<T> {
    pub fn new(predictor: PredictorKind, nq_low: u8, nq_high: u8) -> Self {
        Self {
            predictor,
            nq_low,
            nq_high,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_bits(self.nq_low)?;
        check_bits(self.nq_high)?;
        if self.frame_length < 2 * HISTORY_LEN || self.frame_length > usize::from(u16::MAX) {
            return Err(Error::Config(format!(
                "frame length {} must be in {}..={}",
                self.frame_length,
                2 * HISTORY_LEN,
                u16::MAX
            )));
        }
        self.train.validate()?;
        for nq in 2..=5 {
            self.quantizer.spec(nq)?;
        }
        Ok(())
    }

    pub fn nq(&self, band: Band) -> u8 {
        match band {
            Band::Low => self.nq_low,
            Band::High => self.nq_high,
        }
    }

    /// Training config for one band; each band gets its own seed stream.
    pub fn band_train_config(&self, band: Band) -> TrainConfig<T> {
        TrainConfig {
            seed_base: mix64(self.seed_base ^ (band as u64 + 1)),
            ..self.train.clone()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Predictor<T> {
    Zero,
    Linear(LinearPredictor<T>),
    Mlp(MlpCommittee<T>),
}

impl<T: Real> Predictor<T> {
    /// `history[0]` is the most recent reconstructed sample.
    pub fn predict(&self, history: &[T]) -> T {
        match self {
            Self::Zero => T::zero(),
            Self::Linear(p) => p.predict(history),
            Self::Mlp(c) => c.predict(history),
        }
    }
}

/// State machine shared by encoder and decoder for one band.
#[derive(Debug, Clone)]
pub struct BandCoderState<T> {
    kind: PredictorKind,
    frame_length: usize,
    train: TrainConfig<T>,
    predictor: Predictor<T>,
    history: [T; HISTORY_LEN],
    quantizer: QuantizerState<T>,
    frame_buffer: Vec<T>,
    frame_index: u64,
}

impl<T: Real> BandCoderState<T> {
    pub fn new(cfg: &CodecConfig<T>, band: Band) -> Result<Self> {
        cfg.validate()?;
        let spec = Arc::new(cfg.quantizer.spec(cfg.nq(band))?);
        Ok(Self {
            kind: cfg.predictor,
            frame_length: cfg.frame_length,
            train: cfg.band_train_config(band),
            predictor: Predictor::Zero,
            history: [T::zero(); HISTORY_LEN],
            quantizer: QuantizerState::new(spec, cfg.quantizer.initial_step),
            frame_buffer: Vec::with_capacity(cfg.frame_length),
            frame_index: 0,
        })
    }

    pub fn predictor(&self) -> &Predictor<T> {
        &self.predictor
    }

    pub fn quantizer(&self) -> &QuantizerState<T> {
        &self.quantizer
    }

    /// Index of the frame the next sample belongs to.
    pub fn frame_index(&self) -> u64 {
        self.frame_index
    }

    fn refit(&mut self) {
        let frame = &self.frame_buffer;
        self.predictor = match self.kind {
            PredictorKind::Lpc10 | PredictorKind::Lpc25 => Predictor::Linear(
                fit_lpc(frame, self.kind.order()).expect("frame length checked at construction"),
            ),
            PredictorKind::Mlp => {
                Predictor::Mlp(train_committee(frame, self.frame_index, &self.train))
            }
        };
        self.frame_buffer.clear();
        self.frame_index += 1;
    }

    fn prediction(&mut self) -> T {
        if self.frame_buffer.len() == self.frame_length {
            self.refit();
        }
        self.predictor.predict(&self.history)
    }

    fn push(&mut self, x_hat: T) {
        self.history.copy_within(0..HISTORY_LEN - 1, 1);
        self.history[0] = x_hat;
        self.frame_buffer.push(x_hat);
    }

    pub fn encode_sample(&mut self, x: T) -> EncodedSample<T> {
        let prediction = self.prediction();
        let residual = x - prediction;
        let (code, d_hat) = self.quantizer.encode(residual);
        let reconstruction = prediction + d_hat;
        self.push(reconstruction);
        EncodedSample {
            code,
            prediction,
            residual,
            reconstruction,
        }
    }

    pub fn decode_sample(&mut self, code: i32) -> Result<T> {
        let p = self.prediction();
        let d_hat = self
            .quantizer
            .decode(code)
            .map_err(|e| Error::Corrupt(e.to_string()))?;
        let x_hat = p + d_hat;
        self.push(x_hat);
        Ok(x_hat)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EncodedSample<T> {
    pub code: i32,
    pub prediction: T,
    pub residual: T,
    pub reconstruction: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BandEncoding<T> {
    pub codes: Vec<i32>,
    /// Encoder-side reconstruction `x̂`.
    pub reconstruction: Vec<T>,
    /// Closed-loop residual `d = x - p` before quantization.
    pub residual: Vec<T>,
    pub prediction: Vec<T>,
}

pub fn encode_band<T: Real>(x: &[T], cfg: &CodecConfig<T>, band: Band) -> Result<BandEncoding<T>> {
    let mut state = BandCoderState::new(cfg, band)?;
    let mut out = BandEncoding {
        codes: Vec::with_capacity(x.len()),
        reconstruction: Vec::with_capacity(x.len()),
        residual: Vec::with_capacity(x.len()),
        prediction: Vec::with_capacity(x.len()),
    };
    for &s in x {
        let e = state.encode_sample(s);
        out.codes.push(e.code);
        out.reconstruction.push(e.reconstruction);
        out.residual.push(e.residual);
        out.prediction.push(e.prediction);
    }
    Ok(out)
}

pub fn decode_band<T: Real>(codes: &[i32], cfg: &CodecConfig<T>, band: Band) -> Result<Vec<T>> {
    let mut state = BandCoderState::new(cfg, band)?;
    codes.iter().map(|&c| state.decode_sample(c)).collect()
}
