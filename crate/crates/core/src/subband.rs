//! Full two-band codec: QMF split, independent ADPCM per band, bitstream.

use crate::adpcm::{decode_band, encode_band, Band, BandEncoding, CodecConfig};
use crate::bitstream::{Bitstream, Header};
use crate::error::{Error, Result};
use crate::qmf::{analyze, compensate_delay, design_prototype, synthesize, QmfBank};
use crate::quantizer::check_bits;
use crate::scalar::Real;
use crate::signal::{AudioBuffer, FULL_RATE};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BitRate {
    pub bits_per_sample: f64,
    pub kbps: f64,
}

/// Equivalent full-band rate of a band allocation.
pub fn bit_rate(nq_low: u8, nq_high: u8) -> Result<BitRate> {
    check_bits(nq_low)?;
    check_bits(nq_high)?;
    let bits_per_sample = f64::from(nq_low + nq_high) / 2.0;
    Ok(BitRate {
        bits_per_sample,
        kbps: f64::from(FULL_RATE) / 1000.0 * bits_per_sample,
    })
}

/// Everything the encoder computes, for evaluation.
#[derive(Debug, Clone)]
pub struct Encoded<T> {
    pub bitstream: Bitstream,
    /// Analysis outputs: the per-band metric references.
    pub low_reference: AudioBuffer<T>,
    pub high_reference: AudioBuffer<T>,
    pub low: BandEncoding<T>,
    pub high: BandEncoding<T>,
    /// Local reconstructions passed through synthesis, delay-compensated and
    /// cut to the input length.
    pub output: AudioBuffer<T>,
}

fn padded_even<T: Real>(x: &AudioBuffer<T>) -> AudioBuffer<T> {
    let mut samples = x.samples.clone();
    if samples.len() % 2 == 1 {
        samples.push(T::zero());
    }
    AudioBuffer::new(samples, x.sample_rate)
}

pub fn encode_detailed<T: Real>(
    x: &AudioBuffer<T>,
    cfg: &CodecConfig<T>,
    bank: &QmfBank<T>,
) -> Result<Encoded<T>> {
    x.expect_rate(FULL_RATE)?;
    cfg.validate()?;
    let num_input_samples = u32::try_from(x.len())
        .map_err(|_| Error::Config(format!("{} samples exceed the format limit", x.len())))?;
    let (low_ref, high_ref) = analyze(&padded_even(x), bank)?;
    let (low, high) = rayon::join(
        || encode_band(&low_ref.samples, cfg, Band::Low),
        || encode_band(&high_ref.samples, cfg, Band::High),
    );
    let (low, high) = (low?, high?);
    let header = Header {
        predictor: cfg.predictor,
        nq_low: cfg.nq_low,
        nq_high: cfg.nq_high,
        frame_length: cfg.frame_length as u16,
        num_input_samples,
        seed_base: cfg.seed_base,
    };
    let bitstream = Bitstream::new(header, low.codes.clone(), high.codes.clone())?;
    let output = reconstruct(&low.reconstruction, &high.reconstruction, bank, x.len())?;
    Ok(Encoded {
        bitstream,
        low_reference: low_ref,
        high_reference: high_ref,
        low,
        high,
        output,
    })
}

pub fn encode<T: Real>(x: &AudioBuffer<T>, cfg: &CodecConfig<T>) -> Result<Bitstream> {
    Ok(encode_detailed(x, cfg, &design_prototype())?.bitstream)
}

fn reconstruct<T: Real>(
    low: &[T],
    high: &[T],
    bank: &QmfBank<T>,
    len: usize,
) -> Result<AudioBuffer<T>> {
    let y = synthesize(
        &AudioBuffer::new(low.to_vec(), crate::signal::HALF_RATE),
        &AudioBuffer::new(high.to_vec(), crate::signal::HALF_RATE),
        bank,
    )?;
    Ok(AudioBuffer::new(
        compensate_delay(&y.samples, bank.delay, len),
        FULL_RATE,
    ))
}

/// Codec settings carried by the header replace those in `base`; tables and
/// training parameters come from `base`.
pub fn config_for_header<T: Real>(header: &Header, base: &CodecConfig<T>) -> CodecConfig<T> {
    CodecConfig {
        predictor: header.predictor,
        nq_low: header.nq_low,
        nq_high: header.nq_high,
        frame_length: usize::from(header.frame_length),
        seed_base: header.seed_base,
        ..base.clone()
    }
}

/// Decoded band reconstructions.
pub fn decode_bands<T: Real>(
    bs: &Bitstream,
    base: &CodecConfig<T>,
) -> Result<(Vec<T>, Vec<T>)> {
    let cfg = config_for_header(&bs.header, base);
    let (low, high) = rayon::join(
        || decode_band(&bs.low, &cfg, Band::Low),
        || decode_band(&bs.high, &cfg, Band::High),
    );
    Ok((low?, high?))
}

pub fn decode_with_bank<T: Real>(
    bs: &Bitstream,
    base: &CodecConfig<T>,
    bank: &QmfBank<T>,
) -> Result<AudioBuffer<T>> {
    let (low, high) = decode_bands(bs, base)?;
    reconstruct(&low, &high, bank, bs.header.num_input_samples as usize)
}

pub fn decode<T: Real>(bs: &Bitstream, base: &CodecConfig<T>) -> Result<AudioBuffer<T>> {
    decode_with_bank(bs, base, &design_prototype())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adpcm::PredictorKind;

    #[test]
    fn table_rate_examples() {
        assert_eq!(bit_rate(2, 2).unwrap().bits_per_sample, 2.0);
        assert_eq!(bit_rate(5, 2).unwrap().bits_per_sample, 3.5);
        let top = bit_rate(5, 5).unwrap();
        assert_eq!(top.bits_per_sample, 5.0);
        assert_eq!(top.kbps, 80.0);
        assert_eq!(bit_rate(2, 2).unwrap().kbps, 32.0);
        assert!(bit_rate(1, 2).is_err());
        assert!(bit_rate(2, 6).is_err());
    }

    #[test]
    fn zeros_round_trip() {
        let cfg = CodecConfig::<f64>::new(PredictorKind::Lpc10, 3, 2);
        let x = AudioBuffer::zeros(1001, FULL_RATE);
        let bs = encode(&x, &cfg).unwrap();
        assert_eq!(bs.header.band_len(), 501);
        let parsed = Bitstream::from_bytes(&bs.to_bytes()).unwrap();
        let y = decode(&parsed, &CodecConfig::<f64>::default()).unwrap();
        assert_eq!(y.len(), 1001);
        assert!(y.samples.iter().all(|v| v.abs() < 40.0));
    }

    #[test]
    fn wrong_rate_rejected() {
        let cfg = CodecConfig::<f64>::default();
        let x = AudioBuffer::zeros(100, 8000);
        assert!(matches!(encode(&x, &cfg), Err(Error::SampleRate { .. })));
    }
}
