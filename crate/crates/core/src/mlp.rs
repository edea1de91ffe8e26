//! Nonlinear predictor: a committee of 10-2-1 tanh perceptrons, each trained
//! per frame by Levenberg-Marquardt with Bayesian (evidence) regularization.
//!
//! Training minimizes `F = β·E_D + α·E_W` where `E_D` is the sum of squared
//! prediction errors over the frame and `E_W` the sum of squared weights.
//! Each LM step solves `(β·JᵀJ + (α + μ)·I)·δ = -(β·Jᵀe + α·w)`; after an
//! accepted step the hyperparameters are re-estimated from the Gauss-Newton
//! Hessian `H = β·JᵀJ + α·I`:
//!
//! ```text
//! γ = P - α·trace(H⁻¹)      α = γ / (2·E_W)      β = (N - γ) / (2·E_D)
//! ```

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::SquareMatrix;
use crate::rng::{counter_u64, counter_uniform};
use crate::scalar::Real;

pub const INPUTS: usize = 10;
pub const HIDDEN: usize = 2;
/// `HIDDEN·INPUTS + HIDDEN + HIDDEN + 1`.
pub const PARAMS: usize = 25;
pub const COMMITTEE_SIZE: usize = 5;
pub const DEFAULT_SCALE: f64 = 32_768.0;

const RETRY_OFFSET: u64 = 0x5DEE_CE66_D1CE_4E5B;
const HYPER_MIN: f64 = 1e-12;
const HYPER_MAX: f64 = 1e12;

#[derive(Debug, Clone, PartialEq)]
pub struct MlpWeights<T> {
    pub w1: [[T; INPUTS]; HIDDEN],
    pub b1: [T; HIDDEN],
    pub w2: [T; HIDDEN],
    pub b2: T,
}

impl<T: Real> MlpWeights<T> {
    pub fn zeros() -> Self {
        Self {
            w1: [[T::zero(); INPUTS]; HIDDEN],
            b1: [T::zero(); HIDDEN],
            w2: [T::zero(); HIDDEN],
            b2: T::zero(),
        }
    }

    /// Flat parameter vector: `w1` row-major, then `b1`, `w2`, `b2`.
    pub fn to_params(&self) -> [T; PARAMS] {
        let mut p = [T::zero(); PARAMS];
        for j in 0..HIDDEN {
            p[j * INPUTS..(j + 1) * INPUTS].copy_from_slice(&self.w1[j]);
        }
        let o = HIDDEN * INPUTS;
        p[o..o + HIDDEN].copy_from_slice(&self.b1);
        p[o + HIDDEN..o + 2 * HIDDEN].copy_from_slice(&self.w2);
        p[PARAMS - 1] = self.b2;
        p
    }

    pub fn from_params(p: &[T; PARAMS]) -> Self {
        let mut w = Self::zeros();
        for j in 0..HIDDEN {
            w.w1[j].copy_from_slice(&p[j * INPUTS..(j + 1) * INPUTS]);
        }
        let o = HIDDEN * INPUTS;
        w.b1.copy_from_slice(&p[o..o + HIDDEN]);
        w.w2.copy_from_slice(&p[o + HIDDEN..o + 2 * HIDDEN]);
        w.b2 = p[PARAMS - 1];
        w
    }

    pub fn is_finite(&self) -> bool {
        self.to_params().iter().all(|v| v.is_finite())
    }

    /// `y = w2 · tanh(w1·u + b1) + b2`.
    pub fn forward(&self, u: &[T]) -> T {
        let mut y = self.b2;
        for j in 0..HIDDEN {
            let z = self.w1[j]
                .iter()
                .zip(u)
                .fold(self.b1[j], |acc, (&w, &x)| acc + w * x);
            y += self.w2[j] * z.tanh();
        }
        y
    }

    /// Output and `∂y/∂params` (same order as [`to_params`](Self::to_params)).
    pub fn forward_with_jacobian(&self, u: &[T], row: &mut [T]) -> T {
        let mut y = self.b2;
        let o = HIDDEN * INPUTS;
        for j in 0..HIDDEN {
            let z = self.w1[j]
                .iter()
                .zip(u)
                .fold(self.b1[j], |acc, (&w, &x)| acc + w * x);
            let a = z.tanh();
            y += self.w2[j] * a;
            let dz = self.w2[j] * (T::one() - a * a);
            for i in 0..INPUTS {
                row[j * INPUTS + i] = dz * u[i];
            }
            row[o + j] = dz;
            row[o + HIDDEN + j] = a;
        }
        row[PARAMS - 1] = T::one();
        y
    }
}

pub fn mlp_forward<T: Real>(w: &MlpWeights<T>, u: &[T]) -> T {
    w.forward(u)
}

/// Uniform `[-0.5, 0.5]` weights keyed by `(seed, parameter index)`.
pub fn init_weights<T: Real>(seed: u64) -> MlpWeights<T> {
    let mut p = [T::zero(); PARAMS];
    for (i, v) in p.iter_mut().enumerate() {
        *v = T::lit(counter_uniform(&[seed, i as u64]) - 0.5);
    }
    MlpWeights::from_params(&p)
}

/// Seed of committee member `member` for frame `frame_index`.
pub fn member_seed(seed_base: u64, frame_index: u64, member: usize) -> u64 {
    seed_base ^ counter_u64(&[frame_index, member as u64])
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig<T> {
    pub max_iters: usize,
    pub mu0: T,
    pub mu_up: T,
    pub mu_down: T,
    /// Training stops once μ exceeds this.
    pub mu_max: T,
    pub seed_base: u64,
    pub alpha0: T,
    pub beta0: T,
    /// Amplitude normalization between sample units and network units.
    pub scale: T,
}

impl<T: Real> Default for TrainConfig<T> {
    fn default() -> Self {
        Self {
            max_iters: 12,
            mu0: T::lit(0.005),
            mu_up: T::lit(10.0),
            mu_down: T::lit(0.1),
            mu_max: T::lit(1e10),
            seed_base: 0,
            alpha0: T::lit(0.01),
            beta0: T::one(),
            scale: T::lit(DEFAULT_SCALE),
        }
    }
}

impl<T: Real> TrainConfig<T> {
    pub fn validate(&self) -> Result<()> {
        let ok = self.max_iters >= 1
            && self.mu0 > T::zero()
            && self.mu_up > T::one()
            && self.mu_down > T::zero()
            && self.mu_down < T::one()
            && self.mu_max > self.mu0
            && self.alpha0 > T::zero()
            && self.beta0 > T::zero()
            && self.scale > T::zero();
        if ok {
            Ok(())
        } else {
            Err(Error::Config(
                "train config needs max_iters >= 1, mu0 > 0, mu_up > 1 > mu_down > 0, \
                 mu_max > mu0, alpha0, beta0, scale > 0"
                    .into(),
            ))
        }
    }
}

/// Lagged (input, target) pairs: inputs `[x[n-1], ..., x[n-10]]`, target `x[n]`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainingSet<T> {
    pub inputs: Vec<[T; INPUTS]>,
    pub targets: Vec<T>,
}

impl<T: Real> TrainingSet<T> {
    pub fn from_frame(frame: &[T]) -> Self {
        let mut inputs = Vec::new();
        let mut targets = Vec::new();
        for n in INPUTS..frame.len() {
            let mut u = [T::zero(); INPUTS];
            for (k, v) in u.iter_mut().enumerate() {
                *v = frame[n - 1 - k];
            }
            inputs.push(u);
            targets.push(frame[n]);
        }
        Self { inputs, targets }
    }

    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }
}

/// Regularized cost and its parts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cost<T> {
    pub total: T,
    pub data: T,
    pub weights: T,
}

pub fn cost<T: Real>(w: &MlpWeights<T>, set: &TrainingSet<T>, alpha: T, beta: T) -> Cost<T> {
    let data: T = set
        .inputs
        .iter()
        .zip(&set.targets)
        .map(|(u, &t)| {
            let e = w.forward(u) - t;
            e * e
        })
        .sum();
    let weights: T = w.to_params().iter().map(|&v| v * v).sum();
    Cost {
        total: beta * data + alpha * weights,
        data,
        weights,
    }
}

/// Analytic `∇F = 2β·Jᵀe + 2α·w`.
pub fn cost_gradient<T: Real>(
    w: &MlpWeights<T>,
    set: &TrainingSet<T>,
    alpha: T,
    beta: T,
) -> [T; PARAMS] {
    let params = w.to_params();
    let mut row = [T::zero(); PARAMS];
    let mut g = [T::zero(); PARAMS];
    for (u, &t) in set.inputs.iter().zip(&set.targets) {
        let e = w.forward_with_jacobian(u, &mut row) - t;
        for k in 0..PARAMS {
            g[k] += row[k] * e;
        }
    }
    let two = T::lit(2.0);
    for k in 0..PARAMS {
        g[k] = two * (beta * g[k] + alpha * params[k]);
    }
    g
}

/// One accepted LM step. `cost_before`/`cost_after` use the same (α, β);
/// the hyperparameters recorded are the ones re-estimated after the step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepRecord<T> {
    pub cost_before: T,
    pub cost_after: T,
    pub alpha: T,
    pub beta: T,
    pub gamma: T,
    pub mu: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainOutcome<T> {
    pub weights: MlpWeights<T>,
    pub initial: MlpWeights<T>,
    pub steps: Vec<StepRecord<T>>,
    /// Sum of squared errors on the training set at the returned weights.
    pub data_error: T,
    /// Set when the first start went non-finite.
    pub restarted: bool,
}

struct Linearization<T> {
    jac: Vec<T>,
    err: Vec<T>,
}

fn linearize<T: Real>(w: &MlpWeights<T>, set: &TrainingSet<T>) -> Linearization<T> {
    let n = set.len();
    let mut jac = vec![T::zero(); n * PARAMS];
    let mut err = Vec::with_capacity(n);
    for (i, (u, &t)) in set.inputs.iter().zip(&set.targets).enumerate() {
        let y = w.forward_with_jacobian(u, &mut jac[i * PARAMS..(i + 1) * PARAMS]);
        err.push(y - t);
    }
    Linearization { jac, err }
}

fn clamp_hyper<T: Real>(v: T) -> T {
    v.max(T::lit(HYPER_MIN)).min(T::lit(HYPER_MAX))
}

/// Returns `None` if the cost or hyperparameters leave the finite range.
fn levenberg_marquardt<T: Real>(
    set: &TrainingSet<T>,
    init: &MlpWeights<T>,
    cfg: &TrainConfig<T>,
) -> Option<(MlpWeights<T>, Vec<StepRecord<T>>, T)> {
    let n_data = T::from_usize_lossy(set.len());
    let n_params = T::from_usize_lossy(PARAMS);
    let two = T::lit(2.0);
    let tiny = T::min_positive_value().sqrt();

    let mut w = init.clone();
    let mut alpha = cfg.alpha0;
    let mut beta = cfg.beta0;
    let mut mu = cfg.mu0;
    let mut lin = linearize(&w, set);
    let mut current = cost(&w, set, alpha, beta);
    if !current.total.is_finite() {
        return None;
    }
    let mut steps = Vec::new();

    'outer: for _ in 0..cfg.max_iters {
        let gram = SquareMatrix::gram(&lin.jac, set.len(), PARAMS);
        let params = w.to_params();
        let mut rhs = [T::zero(); PARAMS];
        for (row, &e) in lin.jac.chunks(PARAMS).zip(&lin.err) {
            for k in 0..PARAMS {
                rhs[k] += row[k] * e;
            }
        }
        for k in 0..PARAMS {
            rhs[k] = -(beta * rhs[k] + alpha * params[k]);
        }

        let (next, trial) = loop {
            let mut sys = gram.scaled(beta);
            sys.add_diagonal(alpha + mu);
            if let Some(ch) = sys.cholesky() {
                let delta = ch.solve(&rhs);
                let mut p = params;
                for k in 0..PARAMS {
                    p[k] += delta[k];
                }
                let cand = MlpWeights::from_params(&p);
                let c = cost(&cand, set, alpha, beta);
                if c.total.is_finite() && c.total < current.total {
                    break (cand, c);
                }
            }
            mu *= cfg.mu_up;
            if mu > cfg.mu_max {
                break 'outer;
            }
        };

        let cost_before = current.total;
        w = next;
        lin = linearize(&w, set);
        mu = (mu * cfg.mu_down).max(tiny);

        let mut hessian = SquareMatrix::gram(&lin.jac, set.len(), PARAMS).scaled(beta);
        hessian.add_diagonal(alpha);
        let trace = hessian.cholesky()?.inverse_trace();
        let gamma = (n_params - alpha * trace).max(T::zero()).min(n_params);
        alpha = clamp_hyper(gamma / (two * trial.weights.max(tiny)));
        beta = clamp_hyper((n_data - gamma) / (two * trial.data.max(tiny)));
        current = cost(&w, set, alpha, beta);
        if !current.total.is_finite() || !alpha.is_finite() || !beta.is_finite() {
            return None;
        }
        steps.push(StepRecord {
            cost_before,
            cost_after: trial.total,
            alpha,
            beta,
            gamma,
            mu,
        });
    }
    Some((w, steps, current.data))
}

/// Trains one network on a normalized frame; deterministic in `(frame, seed, cfg)`.
pub fn train_member_traced<T: Real>(frame: &[T], seed: u64, cfg: &TrainConfig<T>) -> TrainOutcome<T> {
    let set = TrainingSet::from_frame(frame);
    let initial = init_weights::<T>(seed);
    if set.is_empty() {
        let data_error = cost(&initial, &set, T::zero(), T::one()).data;
        return TrainOutcome {
            weights: initial.clone(),
            initial,
            steps: Vec::new(),
            data_error,
            restarted: false,
        };
    }
    if let Some((weights, steps, data_error)) = levenberg_marquardt(&set, &initial, cfg) {
        return TrainOutcome {
            weights,
            initial,
            steps,
            data_error,
            restarted: false,
        };
    }
    let retry = init_weights::<T>(seed.wrapping_add(RETRY_OFFSET));
    match levenberg_marquardt(&set, &retry, cfg) {
        Some((weights, steps, data_error)) => TrainOutcome {
            weights,
            initial: retry,
            steps,
            data_error,
            restarted: true,
        },
        None => {
            let data_error = cost(&initial, &set, T::zero(), T::one()).data;
            TrainOutcome {
                weights: initial.clone(),
                initial,
                steps: Vec::new(),
                data_error,
                restarted: true,
            }
        }
    }
}

pub fn train_member<T: Real>(frame: &[T], seed: u64, cfg: &TrainConfig<T>) -> MlpWeights<T> {
    train_member_traced(frame, seed, cfg).weights
}

/// Committee of independently initialized networks; predicts the mean output.
#[derive(Debug, Clone, PartialEq)]
pub struct MlpCommittee<T> {
    members: Vec<MlpWeights<T>>,
    scale: T,
}

impl<T: Real> MlpCommittee<T> {
    pub fn new(members: Vec<MlpWeights<T>>, scale: T) -> Result<Self> {
        if members.len() != COMMITTEE_SIZE {
            return Err(Error::Config(format!(
                "committee needs {COMMITTEE_SIZE} members, got {}",
                members.len()
            )));
        }
        Ok(Self { members, scale })
    }

    pub fn members(&self) -> &[MlpWeights<T>] {
        &self.members
    }

    pub fn scale(&self) -> T {
        self.scale
    }

    /// `history[0]` is the most recent sample, in sample units.
    pub fn predict(&self, history: &[T]) -> T {
        let mut u = [T::zero(); INPUTS];
        for (v, &h) in u.iter_mut().zip(history) {
            *v = h / self.scale;
        }
        let sum: T = self.members.iter().map(|m| m.forward(&u)).sum();
        self.scale * sum / T::from_usize_lossy(self.members.len())
    }
}

pub fn committee_predict<T: Real>(c: &MlpCommittee<T>, history: &[T]) -> T {
    c.predict(history)
}

/// Trains the committee for one frame of reconstructed samples (sample units).
///
/// Members train in parallel; each is a pure function of its seed.
pub fn train_committee<T: Real>(
    frame: &[T],
    frame_index: u64,
    cfg: &TrainConfig<T>,
) -> MlpCommittee<T> {
    let normalized: Vec<T> = frame.iter().map(|&v| v / cfg.scale).collect();
    let members = (0..COMMITTEE_SIZE)
        .into_par_iter()
        .map(|i| train_member(&normalized, member_seed(cfg.seed_base, frame_index, i), cfg))
        .collect();
    MlpCommittee {
        members,
        scale: cfg.scale,
    }
}
