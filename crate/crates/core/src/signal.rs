use crate::error::{Error, Result};
use crate::scalar::Real;

/// Sample rate of the wideband signal the codec operates on.
pub const FULL_RATE: u32 = 16_000;
/// Sample rate of each QMF sub-band (and of narrowband BWE input).
pub const HALF_RATE: u32 = 8_000;
/// Amplitude of 16-bit PCM full scale.
pub const FULL_SCALE: f64 = 32_768.0;

/// Mono sample sequence tagged with its sample rate.
#[derive(Debug, Clone, PartialEq)]
pub struct AudioBuffer<T> {
    pub samples: Vec<T>,
    pub sample_rate: u32,
}

impl<T: Real> AudioBuffer<T> {
    pub fn new(samples: Vec<T>, sample_rate: u32) -> Self {
        Self {
            samples,
            sample_rate,
        }
    }

    pub fn zeros(len: usize, sample_rate: u32) -> Self {
        Self::new(vec![T::zero(); len], sample_rate)
    }

    pub fn from_i16(pcm: &[i16], sample_rate: u32) -> Self {
        let samples = pcm.iter().map(|&s| T::lit(f64::from(s))).collect();
        Self::new(samples, sample_rate)
    }

    /// Rounds to the nearest integer and saturates to the 16-bit range.
    pub fn to_i16(&self) -> Vec<i16> {
        self.samples
            .iter()
            .map(|s| s.to_f64_lossy().round().clamp(-32768.0, 32767.0) as i16)
            .collect()
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration_secs(&self) -> f64 {
        self.samples.len() as f64 / f64::from(self.sample_rate)
    }

    pub fn expect_rate(&self, rate: u32) -> Result<()> {
        if self.sample_rate == rate {
            Ok(())
        } else {
            Err(Error::SampleRate {
                expected: rate,
                got: self.sample_rate,
            })
        }
    }
}

pub fn energy<T: Real>(x: &[T]) -> T {
    x.iter().map(|&v| v * v).sum()
}

/// Direct-form FIR with zero initial state; output has the length of the input.
pub fn fir<T: Real>(taps: &[T], x: &[T]) -> Vec<T> {
    (0..x.len())
        .map(|n| {
            let kmax = taps.len().min(n + 1);
            let mut acc = T::zero();
            for k in 0..kmax {
                acc += taps[k] * x[n - k];
            }
            acc
        })
        .collect()
}
