//! Wideband sub-band ADPCM speech codec.
//!
//! A 16 kHz signal is split by a two-band QMF bank; each 8 kHz band is coded
//! by ADPCM with a Jayant adaptive quantizer and a backward-adapted predictor
//! (LPC-10, LPC-25 or a committee of 10-2-1 perceptrons). The crate also
//! carries the evaluation metrics and a quadratic bandwidth-extension tool.
//!
//! Numeric code is generic over [`Real`] (`f32` or `f64`); the `*64` aliases
//! below fix the scalar to `f64`, which the CLI uses.

pub mod adpcm;
pub mod bitstream;
pub mod bwe;
pub mod error;
pub mod eval;
pub mod linalg;
pub mod lpc;
pub mod metrics;
pub mod mlp;
pub mod qmf;
pub mod quantizer;
pub mod rng;
pub mod scalar;
pub mod signal;
pub mod subband;
pub mod synth;

pub use adpcm::{Band, PredictorKind};
pub use bitstream::{Bitstream, Header};
pub use error::{Error, Result};
pub use scalar::Real;

pub type AudioBuffer64 = signal::AudioBuffer<f64>;
pub type QmfBank64 = qmf::QmfBank<f64>;
pub type CodecConfig64 = adpcm::CodecConfig<f64>;
pub type TrainConfig64 = mlp::TrainConfig<f64>;
pub type QuantizerTables64 = quantizer::QuantizerTables<f64>;
pub type MlpCommittee64 = mlp::MlpCommittee<f64>;

pub type AudioBuffer32 = signal::AudioBuffer<f32>;
pub type QmfBank32 = qmf::QmfBank<f32>;
pub type CodecConfig32 = adpcm::CodecConfig<f32>;
