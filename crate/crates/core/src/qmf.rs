//! Two-band quadrature mirror filter bank.
//!
//! All filters derive from one 32-tap linear-phase lowpass prototype `h`:
//!
//! ```text
//! h0[n] = h[n]          g0[n] =  2 h[n]
//! h1[n] = (-1)^n h[n]   g1[n] = -2 (-1)^n h[n]
//! ```
//!
//! With this structure the aliasing term of the decimated system cancels for
//! any prototype; reconstruction quality then depends only on how close
//! `|H(w)|² + |H(π-w)|²` is to one.

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::signal::{fir, AudioBuffer, FULL_RATE, HALF_RATE};

pub const PROTOTYPE_LEN: usize = 32;

/// Canonical prototype, first half (the second half mirrors it).
///
/// Produced by [`design::refine_power_complementary`] started from
/// [`design::windowed_halfband_sinc`]; `shipped_prototype_matches_design`
/// in the tests re-runs the procedure.
pub const PROTOTYPE_HALF: [f64; PROTOTYPE_LEN / 2] = [
    0.0012666306940330241,
    -0.002243359663530726,
    -0.001500056065325351,
    0.005514270913459907,
    0.0013170958749783557,
    -0.01115255329191965,
    0.0005180731666081538,
    0.01980973830231007,
    -0.005484543820043588,
    -0.03278020467327789,
    0.016388941085506713,
    0.05380309447989594,
    -0.04135523095175319,
    -0.09970575363576377,
    0.130294812076558,
    0.46534444682462534,
];

#[derive(Debug, Clone, PartialEq)]
pub struct QmfBank<T> {
    pub h: Vec<T>,
    pub h0: Vec<T>,
    pub h1: Vec<T>,
    pub g0: Vec<T>,
    pub g1: Vec<T>,
    /// Group delay of analysis followed by synthesis, in full-rate samples.
    pub delay: usize,
}

/// Full 32-tap canonical prototype.
pub fn prototype_taps() -> [f64; PROTOTYPE_LEN] {
    let mut taps = [0.0; PROTOTYPE_LEN];
    for (i, &v) in PROTOTYPE_HALF.iter().enumerate() {
        taps[i] = v;
        taps[PROTOTYPE_LEN - 1 - i] = v;
    }
    taps
}

/// Bank built from the shipped canonical prototype.
pub fn design_prototype<T: Real>() -> QmfBank<T> {
    let h: Vec<T> = prototype_taps().iter().map(|&v| T::lit(v)).collect();
    derive_bank(&h).expect("canonical prototype has the right length")
}

/// Derives analysis and synthesis filters from a 32-tap prototype.
pub fn derive_bank<T: Real>(h: &[T]) -> Result<QmfBank<T>> {
    if h.len() != PROTOTYPE_LEN {
        return Err(Error::PrototypeLength {
            expected: PROTOTYPE_LEN,
            got: h.len(),
        });
    }
    let two = T::lit(2.0);
    let alt = |n: usize| if n % 2 == 0 { T::one() } else { -T::one() };
    let h0 = h.to_vec();
    let h1: Vec<T> = h.iter().enumerate().map(|(n, &v)| alt(n) * v).collect();
    let g0: Vec<T> = h.iter().map(|&v| two * v).collect();
    let g1: Vec<T> = h1.iter().map(|&v| -two * v).collect();
    Ok(QmfBank {
        h: h.to_vec(),
        h0,
        h1,
        g0,
        g1,
        delay: PROTOTYPE_LEN - 1,
    })
}

/// Splits a 16 kHz signal into low and high half-rate bands.
///
/// Both outputs have `ceil(len(x) / 2)` samples (even-indexed filter outputs).
pub fn analyze<T: Real>(
    x: &AudioBuffer<T>,
    bank: &QmfBank<T>,
) -> Result<(AudioBuffer<T>, AudioBuffer<T>)> {
    if x.is_empty() {
        return Err(Error::EmptyInput);
    }
    x.expect_rate(FULL_RATE)?;
    let low = decimate2(&fir(&bank.h0, &x.samples));
    let high = decimate2(&fir(&bank.h1, &x.samples));
    Ok((
        AudioBuffer::new(low, HALF_RATE),
        AudioBuffer::new(high, HALF_RATE),
    ))
}

/// Recombines two half-rate bands into a 16 kHz signal of `2·len(L)` samples.
///
/// The output lags the analysis input by `bank.delay` samples.
pub fn synthesize<T: Real>(
    low: &AudioBuffer<T>,
    high: &AudioBuffer<T>,
    bank: &QmfBank<T>,
) -> Result<AudioBuffer<T>> {
    if low.len() != high.len() {
        return Err(Error::LengthMismatch {
            left: low.len(),
            right: high.len(),
        });
    }
    let lo = fir(&bank.g0, &upsample2(&low.samples));
    let hi = fir(&bank.g1, &upsample2(&high.samples));
    let samples = lo.iter().zip(&hi).map(|(&a, &b)| a + b).collect();
    Ok(AudioBuffer::new(samples, FULL_RATE))
}

/// Analysis followed by synthesis, realigned by the bank delay and cut to `len(x)`.
pub fn round_trip<T: Real>(x: &AudioBuffer<T>, bank: &QmfBank<T>) -> Result<AudioBuffer<T>> {
    let (low, high) = analyze(x, bank)?;
    let y = synthesize(&low, &high, bank)?;
    Ok(AudioBuffer::new(
        compensate_delay(&y.samples, bank.delay, x.len()),
        FULL_RATE,
    ))
}

/// Drops `delay` leading samples and zero-pads or truncates to `len`.
pub fn compensate_delay<T: Real>(y: &[T], delay: usize, len: usize) -> Vec<T> {
    let mut out: Vec<T> = y.iter().skip(delay).take(len).copied().collect();
    out.resize(len, T::zero());
    out
}

pub(crate) fn decimate2<T: Real>(y: &[T]) -> Vec<T> {
    y.iter().step_by(2).copied().collect()
}

pub(crate) fn upsample2<T: Real>(x: &[T]) -> Vec<T> {
    let mut out = vec![T::zero(); 2 * x.len()];
    for (i, &v) in x.iter().enumerate() {
        out[2 * i] = v;
    }
    out
}

/// DTFT of `taps` at `omega` rad/sample, as (re, im).
pub fn freq_response<T: Real>(taps: &[T], omega: T) -> (T, T) {
    taps.iter()
        .enumerate()
        .fold((T::zero(), T::zero()), |(re, im), (n, &t)| {
            let phase = omega * T::from_usize_lossy(n);
            (re + t * phase.cos(), im - t * phase.sin())
        })
}

/// Magnitude of `H0(w-π)G0(w) + H1(w-π)G1(w)`.
pub fn alias_residual<T: Real>(bank: &QmfBank<T>, omega: T) -> T {
    let mul = |a: (T, T), b: (T, T)| (a.0 * b.0 - a.1 * b.1, a.0 * b.1 + a.1 * b.0);
    let shifted = omega - T::PI();
    let t0 = mul(
        freq_response(&bank.h0, shifted),
        freq_response(&bank.g0, omega),
    );
    let t1 = mul(
        freq_response(&bank.h1, shifted),
        freq_response(&bank.g1, omega),
    );
    ((t0.0 + t1.0).powi(2) + (t0.1 + t1.1).powi(2)).sqrt()
}

/// One coefficient per line, shortest decimal that round-trips.
pub fn prototype_to_text<T: Real>(bank: &QmfBank<T>) -> String {
    let mut s = String::new();
    for v in &bank.h {
        s.push_str(&format!("{}\n", v.to_f64_lossy()));
    }
    s
}

pub fn prototype_from_text<T: Real>(text: &str) -> Result<QmfBank<T>> {
    let taps = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| {
            l.parse::<f64>()
                .map(T::lit)
                .map_err(|e| Error::Config(format!("bad coefficient {l:?}: {e}")))
        })
        .collect::<Result<Vec<T>>>()?;
    derive_bank(&taps)
}

/// Prototype design procedure used to produce [`PROTOTYPE_HALF`].
pub mod design {
    use crate::linalg::SquareMatrix;

    use super::PROTOTYPE_LEN;

    const HALF: usize = PROTOTYPE_LEN / 2;
    const GRID: usize = 512;
    const STOPBAND_EDGE: f64 = 0.6;
    const COMPLEMENT_WEIGHT: f64 = 3.0;

    /// Hamming-windowed sinc, cutoff π/2, normalized to unit DC gain.
    pub fn windowed_halfband_sinc() -> [f64; PROTOTYPE_LEN] {
        let n = PROTOTYPE_LEN as f64;
        let mut h = [0.0; PROTOTYPE_LEN];
        for (i, v) in h.iter_mut().enumerate() {
            let m = i as f64 - (n - 1.0) / 2.0;
            let x = std::f64::consts::PI * 0.5 * m;
            let sinc = if x == 0.0 { 1.0 } else { x.sin() / x };
            let window =
                0.54 - 0.46 * (2.0 * std::f64::consts::PI * i as f64 / (n - 1.0)).cos();
            *v = 0.5 * sinc * window;
        }
        let dc: f64 = h.iter().sum();
        h.iter_mut().for_each(|v| *v /= dc);
        h
    }

    // Zero-phase amplitude response of the symmetric filter with half taps `p`.
    fn amplitude(p: &[f64; HALF], omega: f64) -> f64 {
        p.iter()
            .enumerate()
            .map(|(k, &c)| 2.0 * c * (omega * (k as f64 - 15.5)).cos())
            .sum()
    }

    fn amplitude_grad(omega: f64) -> [f64; HALF] {
        let mut g = [0.0; HALF];
        for (k, v) in g.iter_mut().enumerate() {
            *v = 2.0 * (omega * (k as f64 - 15.5)).cos();
        }
        g
    }

    fn residuals(p: &[f64; HALF], jac: Option<&mut Vec<f64>>) -> Vec<f64> {
        let pi = std::f64::consts::PI;
        let mut r = Vec::new();
        let mut rows: Vec<[f64; HALF]> = Vec::new();
        for i in 0..=GRID {
            let w = pi * i as f64 / GRID as f64;
            let a = amplitude(p, w);
            let b = amplitude(p, pi - w);
            r.push(COMPLEMENT_WEIGHT * (a * a + b * b - 1.0));
            let ga = amplitude_grad(w);
            let gb = amplitude_grad(pi - w);
            let mut row = [0.0; HALF];
            for k in 0..HALF {
                row[k] = COMPLEMENT_WEIGHT * 2.0 * (a * ga[k] + b * gb[k]);
            }
            rows.push(row);
            if w >= STOPBAND_EDGE * pi {
                r.push(a);
                rows.push(ga);
            }
        }
        if let Some(j) = jac {
            j.clear();
            rows.iter().for_each(|row| j.extend_from_slice(row));
        }
        r
    }

    /// Damped Gauss-Newton fit of the half taps to power complementarity
    /// (`A(w)² + A(π-w)² = 1`) plus stopband energy above 0.6π.
    pub fn refine_power_complementary(initial: &[f64; PROTOTYPE_LEN]) -> [f64; PROTOTYPE_LEN] {
        let mut p = [0.0; HALF];
        p.copy_from_slice(&initial[..HALF]);
        let mut jac = Vec::new();
        let mut r = residuals(&p, Some(&mut jac));
        let mut cost: f64 = r.iter().map(|v| v * v).sum();
        let mut mu = 1e-3;
        for _ in 0..500 {
            let rows = r.len();
            let mut a = SquareMatrix::gram(&jac, rows, HALF);
            let mut g = [0.0; HALF];
            for (row, &rv) in jac.chunks(HALF).zip(&r) {
                for k in 0..HALF {
                    g[k] -= row[k] * rv;
                }
            }
            a.add_diagonal(mu);
            let Some(ch) = a.cholesky() else {
                mu *= 10.0;
                continue;
            };
            let delta = ch.solve(&g);
            let mut trial = p;
            for k in 0..HALF {
                trial[k] += delta[k];
            }
            let mut trial_jac = Vec::new();
            let trial_r = residuals(&trial, Some(&mut trial_jac));
            let trial_cost: f64 = trial_r.iter().map(|v| v * v).sum();
            if trial_cost < cost {
                let step: f64 = delta.iter().map(|d| d * d).sum::<f64>().sqrt();
                p = trial;
                r = trial_r;
                jac = trial_jac;
                cost = trial_cost;
                mu = (mu * 0.1).max(1e-12);
                if step < 1e-14 {
                    break;
                }
            } else {
                mu *= 10.0;
                if mu > 1e8 {
                    break;
                }
            }
        }
        let mut h = [0.0; PROTOTYPE_LEN];
        for k in 0..HALF {
            h[k] = p[k];
            h[PROTOTYPE_LEN - 1 - k] = p[k];
        }
        h
    }
}
