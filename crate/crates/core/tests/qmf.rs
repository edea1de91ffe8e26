use std::f64::consts::PI;

use proptest::prelude::*;
use sbadpcm::qmf::{analyze, design_prototype, freq_response, alias_residual, round_trip, synthesize};
use sbadpcm::signal::{AudioBuffer, FULL_RATE};
use sbadpcm::synth::{tones, white_noise};

fn snr_db(x: &[f64], y: &[f64]) -> f64 {
    let s: f64 = x.iter().map(|v| v * v).sum();
    let e: f64 = x.iter().zip(y).map(|(a, b)| (a - b).powi(2)).sum();
    10.0 * (s / e).log10()
}

fn magnitude(taps: &[f64], w: f64) -> f64 {
    let (re, im) = freq_response(taps, w);
    (re * re + im * im).sqrt()
}

// Oracle: full linear convolution, then keep even-indexed samples.
fn convolve_decimate(h: &[f64], x: &[f64]) -> Vec<f64> {
    let mut full = vec![0.0; x.len() + h.len() - 1];
    for (i, &a) in x.iter().enumerate() {
        for (j, &b) in h.iter().enumerate() {
            full[i + j] += a * b;
        }
    }
    full[..x.len()].iter().step_by(2).copied().collect()
}

#[test]
fn mirror_magnitude_on_dense_grid() {
    let bank = design_prototype::<f64>();
    for k in 0..1024 {
        let w = PI * k as f64 / 1023.0;
        let a = magnitude(&bank.h1, w);
        let b = magnitude(&bank.h0, PI - w);
        assert!((a - b).abs() < 1e-12, "w={w}: {a} vs {b}");
    }
}

#[test]
fn alias_cancellation_identity() {
    let bank = design_prototype::<f64>();
    let worst = (0..1024)
        .map(|k| alias_residual(&bank, 2.0 * PI * k as f64 / 1024.0))
        .fold(0.0f64, f64::max);
    assert!(worst <= 1e-10, "{worst}");
}

#[test]
fn white_noise_round_trip_snr() {
    let bank = design_prototype::<f64>();
    let x = AudioBuffer::new(white_noise(32_000, 3000.0, 5), FULL_RATE);
    let y = round_trip(&x, &bank).unwrap();
    let n = x.len() - bank.delay;
    let snr = snr_db(&x.samples[..n], &y.samples[..n]);
    assert!(snr >= 40.0, "{snr}");
}

#[test]
fn band_edge_sine_round_trip() {
    let bank = design_prototype::<f64>();
    let x = AudioBuffer::new(tones(&[(3900.0, 8000.0)], 16_000, FULL_RATE), FULL_RATE);
    let y = round_trip(&x, &bank).unwrap();
    let n = x.len() - bank.delay;
    let snr = snr_db(&x.samples[100..n], &y.samples[100..n]);
    assert!(snr >= 30.0, "{snr}");
}

#[test]
fn low_tone_stays_in_low_band() {
    let bank = design_prototype::<f64>();
    let x = AudioBuffer::new(tones(&[(500.0, 10_000.0)], 16_000, FULL_RATE), FULL_RATE);
    let (l, h) = analyze(&x, &bank).unwrap();
    let el: f64 = l.samples.iter().map(|v| v * v).sum();
    let eh: f64 = h.samples.iter().map(|v| v * v).sum();
    assert!(eh / el < 1e-3, "{}", eh / el);
}

#[test]
fn analysis_matches_direct_convolution() {
    let bank = design_prototype::<f64>();
    let x: Vec<f64> = white_noise(2001, 1000.0, 9);
    let (l, h) = analyze(&AudioBuffer::new(x.clone(), FULL_RATE), &bank).unwrap();
    let lo = convolve_decimate(&bank.h0, &x);
    let hi = convolve_decimate(&bank.h1, &x);
    assert_eq!(l.len(), 1001);
    for (a, b) in l.samples.iter().zip(&lo).chain(h.samples.iter().zip(&hi)) {
        assert!((a - b).abs() < 1e-9);
    }
    // Power split: both bands together keep about half the input energy.
    let ex: f64 = x.iter().map(|v| v * v).sum();
    let eb: f64 = lo.iter().chain(&hi).map(|v| v * v).sum();
    assert!((eb / ex - 0.5).abs() < 0.05, "{}", eb / ex);
}

#[test]
fn zero_bands_synthesize_to_zero() {
    let bank = design_prototype::<f64>();
    let z = AudioBuffer::zeros(64, 8000);
    let y = synthesize(&z, &z, &bank).unwrap();
    assert_eq!(y.len(), 128);
    assert!(y.samples.iter().all(|&v| v == 0.0));
}

#[test]
fn f32_bank_round_trips() {
    let bank = design_prototype::<f32>();
    let x: Vec<f32> = white_noise(8000, 1000.0, 2);
    let buf = AudioBuffer::new(x.clone(), FULL_RATE);
    let y = round_trip(&buf, &bank).unwrap();
    let n = x.len() - 31;
    let xs: Vec<f64> = x[..n].iter().map(|&v| f64::from(v)).collect();
    let ys: Vec<f64> = y.samples[..n].iter().map(|&v| f64::from(v)).collect();
    assert!(snr_db(&xs, &ys) > 40.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn round_trip_is_linear(sa in 1u64..1000, sb in 1u64..1000, a in -3.0f64..3.0, b in -3.0f64..3.0) {
        let bank = design_prototype::<f64>();
        let x: Vec<f64> = white_noise(600, 100.0, sa);
        let y: Vec<f64> = white_noise(600, 100.0, sb);
        let mix: Vec<f64> = x.iter().zip(&y).map(|(p, q)| a * p + b * q).collect();
        let rt = |v: &Vec<f64>| round_trip(&AudioBuffer::new(v.clone(), FULL_RATE), &bank).unwrap().samples;
        let (rx, ry, rm) = (rt(&x), rt(&y), rt(&mix));
        for i in 0..600 {
            prop_assert!((rm[i] - (a * rx[i] + b * ry[i])).abs() < 1e-9);
        }
    }

    #[test]
    fn even_shift_commutes(seed in 1u64..1000, half_shift in 0usize..20) {
        let bank = design_prototype::<f64>();
        let shift = 2 * half_shift;
        let x: Vec<f64> = white_noise(500, 100.0, seed);
        let mut shifted = vec![0.0; shift];
        shifted.extend_from_slice(&x);
        let rt = |v: Vec<f64>| round_trip(&AudioBuffer::new(v, FULL_RATE), &bank).unwrap().samples;
        let a = rt(x);
        let b = rt(shifted);
        for i in 0..a.len() {
            prop_assert!((b[i + shift] - a[i]).abs() < 1e-9);
        }
    }
}
