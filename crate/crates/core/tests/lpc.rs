use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use sbadpcm::lpc::{autocorrelation, fit_lpc, levinson_durbin, WHITE_NOISE_CORRECTION};
use sbadpcm::metrics::prediction_gain;
use sbadpcm::synth::{ar_process, white_noise};

// Oracle: dense LU solve of the Toeplitz normal equations.
fn toeplitz_solve(frame: &[f64], order: usize) -> Vec<f64> {
    let mut r = autocorrelation(frame, order);
    r[0] *= WHITE_NOISE_CORRECTION;
    let m = DMatrix::from_fn(order, order, |i, j| r[i.abs_diff(j)]);
    let b = DVector::from_fn(order, |i, _| r[i + 1]);
    m.lu().solve(&b).unwrap().iter().copied().collect()
}

fn residual(frame: &[f64], coeffs: &[f64], warm: &[f64]) -> Vec<f64> {
    let mut all = warm.to_vec();
    all.extend_from_slice(frame);
    let o = warm.len();
    (0..frame.len())
        .map(|n| {
            let p: f64 = coeffs.iter().enumerate().map(|(k, a)| a * all[o + n - 1 - k]).sum();
            frame[n] - p
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn levinson_matches_dense_solve(seed in 0u64..100_000, order_pick in 0usize..2, a1 in -0.9f64..0.9, a2 in -0.5f64..0.4) {
        let order = [10, 25][order_pick];
        let frame: Vec<f64> = ar_process(&[a1, a2 * (1.0 - a1.abs())], 200, 500.0, seed);
        let fast = fit_lpc(&frame, order).unwrap();
        let slow = toeplitz_solve(&frame, order);
        let norm: f64 = slow.iter().map(|v| v * v).sum::<f64>().sqrt();
        let diff: f64 = fast.coeffs().iter().zip(&slow).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        prop_assert!(diff <= 1e-8 * norm.max(1e-12), "rel {}", diff / norm);
        let mut r = autocorrelation(&frame, order);
        r[0] *= WHITE_NOISE_CORRECTION;
        let sol = levinson_durbin(&r, order).unwrap();
        prop_assert_eq!(sol.reflection.len(), order);
        prop_assert!(sol.reflection.iter().all(|k| k.abs() < 1.0));
    }
}

#[test]
fn recovers_ar1() {
    let x: Vec<f64> = ar_process(&[0.9], 20_000, 100.0, 7);
    let p = fit_lpc(&x, 10).unwrap();
    let a = p.coeffs();
    assert!((0.85..=0.95).contains(&a[0]), "{a:?}");
    assert!(a[1..].iter().all(|c| c.abs() < 0.05), "{a:?}");
}

#[test]
fn ar1_prediction_gain_on_next_frame() {
    let x: Vec<f64> = ar_process(&[0.9], 40_000, 100.0, 8);
    let (train, test) = x.split_at(20_000);
    let p = fit_lpc(train, 1).unwrap();
    let d = residual(test, p.coeffs(), &train[train.len() - 1..]);
    let g = prediction_gain(test, &d, 200).unwrap();
    let theory = 10.0 * (1.0f64 / (1.0 - 0.81)).log10();
    assert!((g.mean - theory).abs() < 1.0, "{} vs {theory}", g.mean);
}

#[test]
fn white_noise_is_unpredictable() {
    let x: Vec<f64> = white_noise(40_000, 1000.0, 3);
    let (train, test) = x.split_at(20_000);
    let p = fit_lpc(train, 10).unwrap();
    let d = residual(test, p.coeffs(), &train[train.len() - 10..]);
    let g = prediction_gain(test, &d, 200).unwrap();
    assert!(g.mean.abs() < 1.0, "{}", g.mean);
}
