//! Backward-adapted linear predictors (autocorrelation method, Levinson-Durbin).

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Scale applied to the zero-lag autocorrelation before the recursion.
pub const WHITE_NOISE_CORRECTION: f64 = 1.0 + 1e-6;

/// `p[n] = Σ a_k · x[n-k]`, `k = 1..=order`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearPredictor<T> {
    coeffs: Vec<T>,
}

impl<T: Real> LinearPredictor<T> {
    pub fn zero(order: usize) -> Self {
        Self {
            coeffs: vec![T::zero(); order],
        }
    }

    pub fn from_coeffs(coeffs: Vec<T>) -> Self {
        Self { coeffs }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    /// `history[0]` is the most recent sample; extra history is ignored.
    pub fn predict(&self, history: &[T]) -> T {
        self.coeffs
            .iter()
            .zip(history)
            .map(|(&a, &x)| a * x)
            .sum()
    }
}

/// Free-function form of [`LinearPredictor::predict`].
pub fn predict_linear<T: Real>(pred: &LinearPredictor<T>, history: &[T]) -> T {
    pred.predict(history)
}

/// Biased autocorrelation `r[k] = Σ x[n] x[n+k]` for `k = 0..=max_lag`.
pub fn autocorrelation<T: Real>(x: &[T], max_lag: usize) -> Vec<T> {
    (0..=max_lag)
        .map(|lag| {
            x.iter()
                .zip(x.iter().skip(lag))
                .map(|(&a, &b)| a * b)
                .sum()
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct LevinsonSolution<T> {
    pub coeffs: Vec<T>,
    pub reflection: Vec<T>,
    /// Final prediction error power.
    pub error: T,
}

/// Solves the Toeplitz normal equations for `r[0..=order]`.
///
/// Returns `None` when `r[0]` is not positive. If a reflection coefficient
/// reaches magnitude one the recursion stops and the remaining coefficients
/// stay zero.
pub fn levinson_durbin<T: Real>(r: &[T], order: usize) -> Option<LevinsonSolution<T>> {
    assert!(r.len() > order, "need {} autocorrelation lags", order + 1);
    if !(r[0] > T::zero()) {
        return None;
    }
    let mut a = vec![T::zero(); order];
    let mut prev = vec![T::zero(); order];
    let mut reflection = Vec::with_capacity(order);
    let mut err = r[0];
    for i in 0..order {
        let mut acc = r[i + 1];
        for j in 0..i {
            acc -= a[j] * r[i - j];
        }
        let k = acc / err;
        if !(k.abs() < T::one()) {
            break;
        }
        prev[..i].copy_from_slice(&a[..i]);
        a[i] = k;
        for j in 0..i {
            a[j] = prev[j] - k * prev[i - 1 - j];
        }
        err *= T::one() - k * k;
        reflection.push(k);
    }
    Some(LevinsonSolution {
        coeffs: a,
        reflection,
        error: err,
    })
}

/// Fits an order-`order` predictor to one frame of reconstructed samples.
///
/// Rectangular window, white-noise corrected. An all-zero frame gives the
/// zero predictor.
pub fn fit_lpc<T: Real>(frame: &[T], order: usize) -> Result<LinearPredictor<T>> {
    if order == 0 || order >= frame.len() {
        return Err(Error::Config(format!(
            "LPC order {order} must be in 1..{}",
            frame.len()
        )));
    }
    let mut r = autocorrelation(frame, order);
    r[0] *= T::lit(WHITE_NOISE_CORRECTION);
    Ok(match levinson_durbin(&r, order) {
        Some(sol) if sol.coeffs.iter().all(|c| c.is_finite()) => {
            LinearPredictor::from_coeffs(sol.coeffs)
        }
        _ => LinearPredictor::zero(order),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_frame_gives_zero_predictor() {
        let p = fit_lpc(&[0.0f64; 200], 10).unwrap();
        assert_eq!(p, LinearPredictor::zero(10));
    }

    #[test]
    fn order_must_fit_frame() {
        assert!(fit_lpc(&[1.0f64; 10], 10).is_err());
        assert!(fit_lpc(&[1.0f64; 10], 0).is_err());
    }

    #[test]
    fn predict_examples() {
        let zero = LinearPredictor::<f64>::zero(10);
        assert_eq!(zero.predict(&[3.0; 10]), 0.0);
        let ident = LinearPredictor::from_coeffs(vec![1.0f64]);
        assert_eq!(predict_linear(&ident, &[4.5]), 4.5);
        let two = LinearPredictor::from_coeffs(vec![0.5f64, -0.25]);
        assert_eq!(two.predict(&[2.0, 4.0]), 0.0);
    }

    #[test]
    fn single_lag_reflection() {
        let sol = levinson_durbin(&[2.0f64, 1.0], 1).unwrap();
        assert_eq!(sol.coeffs, vec![0.5]);
        assert_eq!(sol.error, 2.0 * 0.75);
        assert!(levinson_durbin(&[0.0f64, 0.0], 1).is_none());
    }

    #[test]
    fn autocorrelation_small() {
        let r = autocorrelation(&[1.0f64, 2.0, 3.0], 2);
        assert_eq!(r, vec![14.0, 8.0, 3.0]);
    }
}
