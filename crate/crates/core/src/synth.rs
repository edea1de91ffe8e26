//! Deterministic test signals: noise, AR processes, tones and a formant
//! synthesizer that produces speech-like 16 kHz material (voiced vowels with
//! moving formants and pitch, fricatives, pauses, a low background noise floor).

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::scalar::Real;
use crate::signal::{AudioBuffer, FULL_RATE};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn white_noise<T: Real>(len: usize, std: f64, seed: u64) -> Vec<T> {
    let mut r = rng(seed);
    let n = Normal::new(0.0, std).expect("finite std");
    (0..len).map(|_| T::lit(n.sample(&mut r))).collect()
}

/// `x[n] = Σ a_k x[n-k] + w[n]`, with a burn-in so the output is stationary.
pub fn ar_process<T: Real>(coeffs: &[f64], len: usize, noise_std: f64, seed: u64) -> Vec<T> {
    let burn = 1000;
    let w: Vec<f64> = white_noise(len + burn, noise_std, seed);
    let mut x = vec![0.0; len + burn];
    for n in 0..x.len() {
        let mut acc = w[n];
        for (k, &a) in coeffs.iter().enumerate() {
            if n > k {
                acc += a * x[n - 1 - k];
            }
        }
        x[n] = acc;
    }
    x[burn..].iter().map(|&v| T::lit(v)).collect()
}

/// Sum of sines `(frequency_hz, amplitude)` at `rate`.
pub fn tones<T: Real>(components: &[(f64, f64)], len: usize, rate: u32) -> Vec<T> {
    (0..len)
        .map(|i| {
            let t = i as f64 / f64::from(rate);
            T::lit(
                components
                    .iter()
                    .map(|&(f, a)| a * (2.0 * PI * f * t).sin())
                    .sum(),
            )
        })
        .collect()
}

#[derive(Clone, Copy)]
struct Resonator {
    y1: f64,
    y2: f64,
}

impl Resonator {
    fn new() -> Self {
        Self { y1: 0.0, y2: 0.0 }
    }

    // Two-pole resonance with unit gain at DC.
    fn run(&mut self, x: f64, freq: f64, bw: f64) -> f64 {
        let fs = f64::from(FULL_RATE);
        let r = (-PI * bw / fs).exp();
        let c = 2.0 * r * (2.0 * PI * freq / fs).cos();
        let g = 1.0 - c + r * r;
        let y = g * x + c * self.y1 - r * r * self.y2;
        self.y2 = self.y1;
        self.y1 = y;
        y
    }
}

const VOWELS: [[f64; 3]; 7] = [
    [730.0, 1090.0, 2440.0],
    [270.0, 2290.0, 3010.0],
    [300.0, 870.0, 2240.0],
    [530.0, 1840.0, 2480.0],
    [570.0, 840.0, 2410.0],
    [660.0, 1720.0, 2410.0],
    [440.0, 1020.0, 2240.0],
];

const FORMANT_BW: [f64; 5] = [80.0, 110.0, 160.0, 250.0, 300.0];

enum Segment {
    Vowel { formants: [f64; 5], amp: f64, f0: f64, glide: f64 },
    Fricative { centre: f64, bw: f64, amp: f64 },
    Pause,
}

/// Speech-like signal in 16-bit PCM units, peak near −6 dBFS.
pub fn speech_like<T: Real>(seconds: f64, seed: u64) -> AudioBuffer<T> {
    let fs = f64::from(FULL_RATE);
    let len = (seconds * fs).round() as usize;
    let mut r = rng(seed);
    let gauss = Normal::new(0.0, 1.0).expect("unit normal");
    let base_f0: f64 = r.gen_range(95.0..190.0);

    let mut out = Vec::with_capacity(len);
    let mut formants = [500.0, 1500.0, 2500.0, 3500.0, 4500.0];
    let mut vocal = [Resonator::new(); 5];
    let mut frication = [Resonator::new(); 2];
    let mut phase = 0.0f64;

    while out.len() < len {
        let pick: f64 = r.gen();
        let (seg, dur_s) = if pick < 0.68 {
            let v = VOWELS[r.gen_range(0..VOWELS.len())];
            let target = [
                v[0] * r.gen_range(0.9..1.1),
                v[1] * r.gen_range(0.9..1.1),
                v[2] * r.gen_range(0.95..1.05),
                r.gen_range(3300.0..3800.0),
                r.gen_range(4300.0..4900.0),
            ];
            (
                Segment::Vowel {
                    formants: target,
                    amp: r.gen_range(0.5..1.0),
                    f0: base_f0 * r.gen_range(0.85..1.2),
                    glide: r.gen_range(-0.25..0.15),
                },
                r.gen_range(0.12..0.32),
            )
        } else if pick < 0.86 {
            (
                Segment::Fricative {
                    centre: r.gen_range(3500.0..6500.0),
                    bw: r.gen_range(1200.0..3000.0),
                    amp: r.gen_range(0.03..0.12),
                },
                r.gen_range(0.07..0.18),
            )
        } else {
            (Segment::Pause, r.gen_range(0.05..0.2))
        };
        let n = ((dur_s * fs) as usize).min(len - out.len());
        let ramp = (0.015 * fs) as usize;
        let start = formants;
        for i in 0..n {
            let env = {
                let edge = i.min(n - 1 - i);
                let a = (edge as f64 / ramp as f64).min(1.0);
                0.5 - 0.5 * (PI * a).cos()
            };
            let s = match &seg {
                Segment::Vowel {
                    formants: target,
                    amp,
                    f0,
                    glide,
                } => {
                    let k = (i as f64 / (0.04 * fs)).min(1.0);
                    for j in 0..5 {
                        formants[j] = start[j] + k * (target[j] - start[j]);
                    }
                    let pitch = f0 * (1.0 + glide * i as f64 / n as f64)
                        * (1.0 + 0.01 * gauss.sample(&mut r));
                    phase += pitch / fs;
                    if phase >= 1.0 {
                        phase -= 1.0;
                    }
                    // Rosenberg glottal pulse: 40 % opening, 16 % closing.
                    let g = if phase < 0.4 {
                        0.5 * (1.0 - (PI * phase / 0.4).cos())
                    } else if phase < 0.56 {
                        (PI * (phase - 0.4) / 0.32).cos()
                    } else {
                        0.0
                    };
                    let aspiration = 0.04 * g * gauss.sample(&mut r);
                    let mut y = (g + aspiration) * amp;
                    for (res, (&f, &bw)) in vocal.iter_mut().zip(formants.iter().zip(&FORMANT_BW)) {
                        y = res.run(y, f, bw);
                    }
                    y
                }
                Segment::Fricative { centre, bw, amp } => {
                    let w = gauss.sample(&mut r) * amp;
                    let a = frication[0].run(w, *centre, *bw);
                    let b = frication[1].run(w, 2500.0, 1500.0);
                    a + 0.3 * b
                }
                Segment::Pause => 0.0,
            };
            out.push(s * env);
        }
        if let Segment::Fricative { .. } = seg {
            frication = [Resonator::new(); 2];
        }
    }

    // Lip radiation.
    let mut prev = 0.0;
    for v in out.iter_mut() {
        let x = *v;
        *v = x - 0.97 * prev;
        prev = x;
    }
    let peak = out.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1e-12);
    let floor = Normal::new(0.0, 10.0).expect("finite std");
    let samples = out
        .iter()
        .map(|&v| T::lit((v / peak * 16000.0 + floor.sample(&mut r)).round()))
        .collect();
    AudioBuffer::new(samples, FULL_RATE)
}
