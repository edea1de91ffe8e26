use sbadpcm::metrics::prediction_gain;
use sbadpcm::mlp::{
    cost, cost_gradient, init_weights, train_committee, train_member, train_member_traced,
    MlpWeights, TrainConfig, TrainingSet, PARAMS,
};
use sbadpcm::rng::counter_uniform;
use sbadpcm::synth::ar_process;

fn normalized_ar_frame(seed: u64) -> Vec<f64> {
    ar_process::<f64>(&[1.3, -0.6], 200, 0.01, seed)
}

fn random_weights(seed: u64, spread: f64) -> MlpWeights<f64> {
    let mut p = [0.0; PARAMS];
    for (i, v) in p.iter_mut().enumerate() {
        *v = spread * (2.0 * counter_uniform(&[seed, 99, i as u64]) - 1.0);
    }
    MlpWeights::from_params(&p)
}

#[test]
fn gradient_matches_central_differences() {
    for draw in 0..20u64 {
        let set = TrainingSet::from_frame(&normalized_ar_frame(1000 + draw));
        let w = random_weights(draw, 1.5);
        let alpha = 0.01 + counter_uniform(&[draw, 1]);
        let beta = 1.0 + 100.0 * counter_uniform(&[draw, 2]);
        let g = cost_gradient(&w, &set, alpha, beta);
        let p = w.to_params();
        let mut fd = [0.0; PARAMS];
        for k in 0..PARAMS {
            let h = 1e-6 * p[k].abs().max(1.0);
            let mut up = p;
            up[k] += h;
            let mut dn = p;
            dn[k] -= h;
            let fu = cost(&MlpWeights::from_params(&up), &set, alpha, beta).total;
            let fdn = cost(&MlpWeights::from_params(&dn), &set, alpha, beta).total;
            fd[k] = (fu - fdn) / (2.0 * h);
        }
        let num: f64 = g.iter().zip(&fd).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        let den: f64 = fd.iter().map(|v| v * v).sum::<f64>().sqrt();
        assert!(num / den <= 1e-4, "draw {draw}: rel {}", num / den);
    }
}

#[test]
fn accepted_steps_never_increase_cost() {
    let cfg = TrainConfig::<f64>::default();
    for frame_seed in 0..100u64 {
        let frame = normalized_ar_frame(frame_seed);
        let out = train_member_traced(&frame, frame_seed * 7 + 1, &cfg);
        assert!(!out.steps.is_empty());
        for s in &out.steps {
            assert!(s.cost_after <= s.cost_before, "{s:?}");
            assert!(s.alpha > 0.0 && s.beta > 0.0);
            assert!((0.0..=25.0).contains(&s.gamma));
        }
        assert!(out.weights.is_finite());
    }
}

#[test]
fn training_is_deterministic() {
    let frame: Vec<f64> = ar_process(&[1.3, -0.6], 200, 300.0, 4);
    let cfg = TrainConfig::<f64>::default();
    let a = train_committee(&frame, 17, &cfg);
    let b = train_committee(&frame, 17, &cfg);
    assert_eq!(a, b);
    let bits = |c: &sbadpcm::mlp::MlpCommittee<f64>| -> Vec<u64> {
        c.members().iter().flat_map(|m| m.to_params().map(f64::to_bits)).collect()
    };
    assert_eq!(bits(&a), bits(&b));
    // different members and different frame indices start elsewhere
    let m = a.members();
    for i in 0..m.len() {
        for j in i + 1..m.len() {
            assert_ne!(m[i], m[j]);
        }
    }
    assert_ne!(train_committee(&frame, 18, &cfg), a);
}

#[test]
fn distinct_seeds_distinct_weights() {
    let frame = normalized_ar_frame(1);
    let cfg = TrainConfig::<f64>::default();
    assert_ne!(train_member(&frame, 1, &cfg), train_member(&frame, 2, &cfg));
    assert_ne!(init_weights::<f64>(1), init_weights::<f64>(2));
}

#[test]
fn noiseless_linear_target_is_fitted() {
    // x[n] = 2cos(0.6)·x[n-1] - x[n-2]: exactly linear in the lagged inputs.
    let frame: Vec<f64> = (0..200).map(|n| 0.05 * (0.6 * n as f64).sin()).collect();
    let cfg = TrainConfig::<f64> {
        max_iters: 50,
        ..Default::default()
    };
    let errors: Vec<f64> = (0..5u64)
        .map(|i| train_member_traced(&frame, 100 + i, &cfg).data_error)
        .collect();
    let best = errors.iter().copied().fold(f64::INFINITY, f64::min);
    assert!(best <= 1e-6, "{errors:?}");
    assert!(errors.iter().filter(|&&e| e <= 1e-6).count() >= 3, "{errors:?}");
}

#[test]
fn committee_predicts_matched_ar2() {
    let x: Vec<f64> = ar_process(&[1.3, -0.6], 400, 500.0, 21);
    let cfg = TrainConfig::<f64>::default();
    let committee = train_committee(&x[..200], 0, &cfg);
    let test = &x[200..];
    let d: Vec<f64> = (0..200)
        .map(|n| {
            let hist: Vec<f64> = (1..=10).map(|k| x[200 + n - k]).collect();
            test[n] - committee.predict(&hist)
        })
        .collect();
    let g = prediction_gain(test, &d, 200).unwrap();
    assert!(g.mean > 0.0, "{}", g.mean);
}

#[test]
fn f32_training_runs() {
    let frame: Vec<f32> = ar_process(&[1.3, -0.6], 200, 0.01, 3);
    let out = train_member_traced(&frame, 5, &TrainConfig::<f32>::default());
    assert!(out.weights.is_finite());
    assert!(out.steps.iter().all(|s| s.cost_after <= s.cost_before));
}
