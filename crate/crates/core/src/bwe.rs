//! Synthetic high band from a narrowband signal via a quadratic nonlinearity.
//!
//! The 8 kHz input is interpolated through the QMF low synthesis branch, the
//! square of the result (minus its per-frame mean) is high-passed by the
//! full-rate H1 filter, scaled per frame relative to the low band, and added
//! back. Squaring a periodic signal keeps its period, so the new band carries
//! harmonics of the same fundamental.

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::qmf::{upsample2, QmfBank};
use crate::scalar::Real;
use crate::signal::{fir, AudioBuffer, FULL_RATE, HALF_RATE};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BweConfig {
    /// Level of the synthetic band relative to the low band's frame RMS.
    pub gain_db: f64,
    /// Frame length at 16 kHz for mean removal and level matching.
    pub frame_length: usize,
}

impl Default for BweConfig {
    fn default() -> Self {
        Self {
            gain_db: -12.0,
            frame_length: 400,
        }
    }
}

impl BweConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.gain_db <= 0.0) || self.frame_length == 0 {
            return Err(Error::Config(
                "bwe needs gain_db <= 0 and a positive frame length".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Extension<T> {
    /// Interpolated narrowband signal at 16 kHz.
    pub low: Vec<T>,
    /// Scaled synthetic high band.
    pub synthetic: Vec<T>,
    pub output: AudioBuffer<T>,
}

fn rms<T: Real>(x: &[T]) -> T {
    if x.is_empty() {
        return T::zero();
    }
    (x.iter().map(|&v| v * v).sum::<T>() / T::from_usize_lossy(x.len())).sqrt()
}

pub fn extend_bandwidth_parts<T: Real>(
    x_nb: &AudioBuffer<T>,
    bank: &QmfBank<T>,
    cfg: &BweConfig,
) -> Result<Extension<T>> {
    x_nb.expect_rate(HALF_RATE)?;
    cfg.validate()?;
    let low = fir(&bank.g0, &upsample2(&x_nb.samples));

    let mut squared = Vec::with_capacity(low.len());
    for frame in low.chunks(cfg.frame_length) {
        let sq: Vec<T> = frame.iter().map(|&v| v * v).collect();
        let mean = sq.iter().copied().sum::<T>() / T::from_usize_lossy(sq.len());
        squared.extend(sq.into_iter().map(|v| v - mean));
    }
    let mut synthetic = fir(&bank.h1, &squared);

    let gain = T::lit(10f64.powf(cfg.gain_db / 20.0));
    for (hp, lo) in synthetic
        .chunks_mut(cfg.frame_length)
        .zip(low.chunks(cfg.frame_length))
    {
        let (r_hp, r_lo) = (rms(hp), rms(lo));
        let scale = if r_hp > T::zero() && r_lo > T::zero() {
            gain * r_lo / r_hp
        } else {
            T::zero()
        };
        hp.iter_mut().for_each(|v| *v *= scale);
    }
    let samples = low.iter().zip(&synthetic).map(|(&a, &b)| a + b).collect();
    Ok(Extension {
        low,
        synthetic,
        output: AudioBuffer::new(samples, FULL_RATE),
    })
}

/// 8 kHz narrowband in, 16 kHz wideband out.
pub fn extend_bandwidth<T: Real>(
    x_nb: &AudioBuffer<T>,
    bank: &QmfBank<T>,
    cfg: &BweConfig,
) -> Result<AudioBuffer<T>> {
    Ok(extend_bandwidth_parts(x_nb, bank, cfg)?.output)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumRow {
    pub frequency_hz: f64,
    pub db: f64,
}

/// Hann-windowed magnitude spectrum in dB from 0 to Nyquist, averaged in
/// power over consecutive non-overlapping windows.
pub fn spectrum_dump<T: Real>(x: &AudioBuffer<T>, window_length: usize) -> Result<Vec<SpectrumRow>> {
    if window_length < 2 || window_length > x.len() {
        return Err(Error::Config(format!(
            "window length {window_length} must be in 2..={}",
            x.len()
        )));
    }
    let n = window_length;
    let window: Vec<f64> = (0..n)
        .map(|i| 0.5 - 0.5 * (2.0 * std::f64::consts::PI * i as f64 / n as f64).cos())
        .collect();
    let norm = window.iter().sum::<f64>().powi(2);
    let fft = FftPlanner::<f64>::new().plan_fft_forward(n);
    let bins = n / 2 + 1;
    let mut power = vec![0.0; bins];
    let mut count = 0usize;
    let mut buf = vec![Complex::new(0.0, 0.0); n];
    for chunk in x.samples.chunks_exact(n) {
        for ((b, &s), &w) in buf.iter_mut().zip(chunk).zip(&window) {
            *b = Complex::new(s.to_f64_lossy() * w, 0.0);
        }
        fft.process(&mut buf);
        for (p, c) in power.iter_mut().zip(&buf) {
            *p += c.norm_sqr() / norm;
        }
        count += 1;
    }
    let rate = f64::from(x.sample_rate);
    Ok(power
        .iter()
        .enumerate()
        .map(|(k, &p)| SpectrumRow {
            frequency_hz: k as f64 * rate / n as f64,
            db: 10.0 * (p / count as f64 + 1e-30).log10(),
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmf::design_prototype;

    #[test]
    fn silence_stays_silent() {
        let bank = design_prototype::<f64>();
        let y = extend_bandwidth(&AudioBuffer::zeros(800, HALF_RATE), &bank, &BweConfig::default())
            .unwrap();
        assert_eq!(y.len(), 1600);
        assert_eq!(y.sample_rate, FULL_RATE);
        assert!(y.samples.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn rate_and_config_checked() {
        let bank = design_prototype::<f64>();
        let x = AudioBuffer::zeros(10, FULL_RATE);
        assert!(extend_bandwidth(&x, &bank, &BweConfig::default()).is_err());
        let x = AudioBuffer::zeros(10, HALF_RATE);
        let cfg = BweConfig {
            gain_db: 3.0,
            ..Default::default()
        };
        assert!(extend_bandwidth(&x, &bank, &cfg).is_err());
    }

    #[test]
    fn sine_peak_bin() {
        let x: Vec<f64> = (0..4096)
            .map(|i| (2.0 * std::f64::consts::PI * 1000.0 * i as f64 / 16000.0).sin())
            .collect();
        let rows = spectrum_dump(&AudioBuffer::new(x, FULL_RATE), 512).unwrap();
        assert_eq!(rows.len(), 257);
        assert_eq!(rows.last().unwrap().frequency_hz, 8000.0);
        let peak = rows
            .iter()
            .max_by(|a, b| a.db.total_cmp(&b.db))
            .unwrap();
        assert_eq!(peak.frequency_hz, 1000.0);
        assert!(spectrum_dump(&AudioBuffer::new(vec![0.0f64; 10], FULL_RATE), 11).is_err());
    }
}
