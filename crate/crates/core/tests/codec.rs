use proptest::prelude::*;
use sbadpcm::adpcm::{decode_band, encode_band, Band, CodecConfig};
use sbadpcm::bitstream::{Bitstream, Header, HEADER_LEN};
use sbadpcm::eval::evaluate_internal;
use sbadpcm::qmf::design_prototype;
use sbadpcm::signal::{AudioBuffer, FULL_RATE};
use sbadpcm::subband::{decode, encode, encode_detailed};
use sbadpcm::synth::{ar_process, speech_like, white_noise};
use sbadpcm::{Error, PredictorKind};

#[test]
fn band_decoder_tracks_encoder() {
    let x: Vec<f64> = speech_like::<f64>(0.6, 3).samples[..4800].to_vec();
    for kind in PredictorKind::ALL {
        for nq in 2..=5 {
            let cfg = CodecConfig::<f64>::new(kind, nq, nq);
            let enc = encode_band(&x, &cfg, Band::Low).unwrap();
            let dec = decode_band(&enc.codes, &cfg, Band::Low).unwrap();
            assert_eq!(dec, enc.reconstruction, "{kind} nq={nq}");
        }
    }
}

#[test]
fn truncated_codes_decode_prefix() {
    let x: Vec<f64> = white_noise(1000, 2000.0, 4);
    let cfg = CodecConfig::<f64>::new(PredictorKind::Mlp, 3, 3);
    let enc = encode_band(&x, &cfg, Band::High).unwrap();
    let full = decode_band(&enc.codes, &cfg, Band::High).unwrap();
    for cut in [1, 199, 200, 201, 650] {
        let part = decode_band(&enc.codes[..cut], &cfg, Band::High).unwrap();
        assert_eq!(part[..], full[..cut]);
    }
}

#[test]
fn payload_size_for_every_allocation() {
    let x = speech_like::<f64>(0.25, 1);
    for l in 2..=5u8 {
        for h in 2..=5u8 {
            let cfg = CodecConfig::<f64>::new(PredictorKind::Lpc10, l, h);
            let bs = encode(&x, &cfg).unwrap();
            let bits = x.len().div_ceil(2) * usize::from(l + h);
            assert_eq!(bs.header.payload_bits(), bits);
            assert_eq!(bs.to_bytes().len(), HEADER_LEN + bits.div_ceil(8));
        }
    }
}

#[test]
fn one_second_at_4_plus_2_bits() {
    let x = speech_like::<f64>(1.0, 2);
    let cfg = CodecConfig::<f64>::new(PredictorKind::Lpc10, 4, 2);
    let bs = encode(&x, &cfg).unwrap();
    assert_eq!(bs.header.payload_bits(), 48_000);
    assert_eq!(bs.to_bytes().len(), HEADER_LEN + 6000);
}

#[test]
fn encoding_is_deterministic() {
    let x = speech_like::<f64>(0.5, 6);
    let cfg = CodecConfig::<f64>::new(PredictorKind::Mlp, 3, 2);
    assert_eq!(encode(&x, &cfg).unwrap().to_bytes(), encode(&x, &cfg).unwrap().to_bytes());
}

#[test]
fn end_to_end_matches_local_reconstruction() {
    let bank = design_prototype::<f64>();
    let x = speech_like::<f64>(0.7, 8);
    for kind in PredictorKind::ALL {
        let cfg = CodecConfig::<f64>::new(kind, 4, 3);
        let enc = encode_detailed(&x, &cfg, &bank).unwrap();
        let parsed = Bitstream::from_bytes(&enc.bitstream.to_bytes()).unwrap();
        // decoder side only knows the header
        let y = decode(&parsed, &CodecConfig::<f64>::default()).unwrap();
        assert_eq!(y, enc.output, "{kind}");
        assert_eq!(y.len(), x.len());
    }
}

#[test]
fn odd_length_input() {
    let x = AudioBuffer::new(white_noise(1001, 1000.0, 1), FULL_RATE);
    let cfg = CodecConfig::<f64>::new(PredictorKind::Lpc25, 5, 5);
    let bs = encode(&x, &cfg).unwrap();
    assert_eq!(bs.header.num_input_samples, 1001);
    assert_eq!(bs.low.len(), 501);
    assert_eq!(decode(&bs, &cfg).unwrap().len(), 1001);
}

#[test]
fn predictable_band_codes_well() {
    // stable AR(10) with poles at radius 0.97 spread over the band
    let mut poly = vec![1.0f64];
    for k in 0..5 {
        let th = std::f64::consts::PI * (0.1 + 0.18 * k as f64);
        let (a, b) = (-2.0 * 0.97 * th.cos(), 0.97 * 0.97);
        let mut next = vec![0.0; poly.len() + 2];
        for (i, &c) in poly.iter().enumerate() {
            next[i] += c;
            next[i + 1] += a * c;
            next[i + 2] += b * c;
        }
        poly = next;
    }
    let coeffs: Vec<f64> = poly[1..].iter().map(|c| -c).collect();
    let x: Vec<f64> = ar_process(&coeffs, 16_000, 300.0, 12);
    let cfg = CodecConfig::<f64>::new(PredictorKind::Lpc10, 5, 5);
    let enc = encode_band(&x, &cfg, Band::Low).unwrap();
    let seg = sbadpcm::metrics::segsnr(&x, &enc.reconstruction, 200).unwrap();
    assert!(seg.mean >= 25.0, "{}", seg.mean);
}

#[test]
fn corrupt_streams_rejected() {
    let x = speech_like::<f64>(0.2, 1);
    let cfg = CodecConfig::<f64>::new(PredictorKind::Lpc10, 3, 3);
    let bytes = encode(&x, &cfg).unwrap().to_bytes();
    assert!(matches!(Bitstream::from_bytes(&bytes[..bytes.len() - 3]), Err(Error::Corrupt(_))));
    let mut bad = bytes.clone();
    bad[1] = b'?';
    assert!(matches!(Bitstream::from_bytes(&bad), Err(Error::Corrupt(_))));
}

#[test]
fn internal_eval_has_all_rows() {
    let x = speech_like::<f64>(1.0, 4);
    let rows = evaluate_internal(&x, &CodecConfig::<f64>::new(PredictorKind::Lpc10, 4, 2), &design_prototype()).unwrap();
    let keys: Vec<(String, String)> = rows.iter().map(|r| (r.band.clone(), r.metric.clone())).collect();
    assert_eq!(keys.len(), 5);
    for (b, m) in [("L", "Gp"), ("H", "Gp"), ("L", "SEG"), ("H", "SEG"), ("F", "SEG")] {
        assert!(keys.contains(&(b.to_string(), m.to_string())));
    }
    assert!(rows.iter().all(|r| r.mean.is_finite()));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn header_round_trip(kind in 0u8..3, l in 2u8..=5, h in 2u8..=5, frame in 1u16.., n in any::<u32>(), seed in any::<u64>()) {
        let header = Header {
            predictor: PredictorKind::from_u8(kind).unwrap(),
            nq_low: l,
            nq_high: h,
            frame_length: frame,
            num_input_samples: n,
            seed_base: seed,
        };
        prop_assert_eq!(Header::parse(&header.to_bytes()).unwrap(), header);
    }

    #[test]
    fn lpc_synchrony_random_input(seed in 0u64..10_000, l in 2u8..=5, h in 2u8..=5, kind in 0u8..2) {
        let x = AudioBuffer::new(white_noise(1200, 3000.0, seed), FULL_RATE);
        let cfg = CodecConfig::<f64>::new(PredictorKind::from_u8(kind).unwrap(), l, h);
        let enc = encode_detailed(&x, &cfg, &design_prototype()).unwrap();
        let y = decode(&Bitstream::from_bytes(&enc.bitstream.to_bytes()).unwrap(), &cfg).unwrap();
        prop_assert_eq!(y, enc.output);
    }
}
