//! Segmental SNR and prediction gain.

use crate::adpcm::Band;
use crate::error::{Error, Result};
use crate::qmf::{analyze, QmfBank};
use crate::scalar::Real;
use crate::signal::{AudioBuffer, FULL_SCALE};

/// Frames whose mean-square reference falls below this fraction of
/// full-scale² are not counted.
pub const SILENCE_FRACTION: f64 = 1e-8;
pub const SNR_CLAMP: (f64, f64) = (-10.0, 80.0);
pub const GAIN_CLAMP: (f64, f64) = (-20.0, 80.0);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SegmentalConfig {
    pub frame_length: usize,
    /// Mean-square threshold in signal units².
    pub silence_threshold: f64,
    pub clamp: (f64, f64),
}

impl SegmentalConfig {
    pub fn snr(frame_length: usize) -> Self {
        Self {
            frame_length,
            silence_threshold: SILENCE_FRACTION * FULL_SCALE * FULL_SCALE,
            clamp: SNR_CLAMP,
        }
    }

    pub fn gain(frame_length: usize) -> Self {
        Self {
            clamp: GAIN_CLAMP,
            ..Self::snr(frame_length)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SegmentalReport {
    pub per_frame: Vec<f64>,
    pub mean: f64,
    /// Population standard deviation over counted frames.
    pub std: f64,
}

impl SegmentalReport {
    pub fn from_frames(per_frame: Vec<f64>) -> Result<Self> {
        if per_frame.is_empty() {
            return Err(Error::NoFrames);
        }
        let k = per_frame.len() as f64;
        let mean = per_frame.iter().sum::<f64>() / k;
        let var = per_frame.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / k;
        Ok(Self {
            per_frame,
            mean,
            std: var.sqrt(),
        })
    }

    pub fn frames(&self) -> usize {
        self.per_frame.len()
    }
}

/// Per-frame `10·log10(Σ signal² / Σ noise²)` over full frames.
pub fn segmental_ratio<T: Real>(
    signal: &[T],
    noise: &[T],
    cfg: &SegmentalConfig,
) -> Result<SegmentalReport> {
    if signal.len() != noise.len() {
        return Err(Error::LengthMismatch {
            left: signal.len(),
            right: noise.len(),
        });
    }
    if cfg.frame_length == 0 {
        return Err(Error::Config("frame length must be positive".into()));
    }
    let (lo, hi) = cfg.clamp;
    let frames = signal
        .chunks_exact(cfg.frame_length)
        .zip(noise.chunks_exact(cfg.frame_length))
        .filter_map(|(s, e)| {
            let es: f64 = s.iter().map(|v| v.to_f64_lossy().powi(2)).sum();
            if es / (cfg.frame_length as f64) < cfg.silence_threshold {
                return None;
            }
            let ee: f64 = e.iter().map(|v| v.to_f64_lossy().powi(2)).sum();
            let db = if ee == 0.0 {
                hi
            } else {
                10.0 * (es / ee).log10()
            };
            Some(db.clamp(lo, hi))
        })
        .collect();
    SegmentalReport::from_frames(frames)
}

/// Segmental SNR of `test` against `reference` (already time-aligned).
pub fn segsnr<T: Real>(reference: &[T], test: &[T], frame_length: usize) -> Result<SegmentalReport> {
    if reference.len() != test.len() {
        return Err(Error::LengthMismatch {
            left: reference.len(),
            right: test.len(),
        });
    }
    let err: Vec<T> = reference.iter().zip(test).map(|(&x, &y)| x - y).collect();
    segmental_ratio(reference, &err, &SegmentalConfig::snr(frame_length))
}

/// Segmental prediction gain of a band against its loop residual.
pub fn prediction_gain<T: Real>(
    band: &[T],
    residual: &[T],
    frame_length: usize,
) -> Result<SegmentalReport> {
    segmental_ratio(band, residual, &SegmentalConfig::gain(frame_length))
}

/// The per-band metric reference: the band's analysis filter output.
pub fn band_reference<T: Real>(
    x: &AudioBuffer<T>,
    bank: &QmfBank<T>,
    band: Band,
) -> Result<AudioBuffer<T>> {
    let (low, high) = analyze(x, bank)?;
    Ok(match band {
        Band::Low => low,
        Band::High => high,
    })
}
