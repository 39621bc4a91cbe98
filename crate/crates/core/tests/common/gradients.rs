//! Central finite differences for the surrogate and critic gradients.

use dtpo_core::dtpo::{ldt_gradient, ldt_objective};
use dtpo_core::rng::seeded;
use dtpo_core::CriticNet;
use ndarray::Array2;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub const STEP: f64 = 1e-5;

/// `‖a - b‖ / max(‖a‖, ‖b‖)`
pub fn relative_error(analytic: &[f64], numeric: &[f64]) -> f64 {
    let diff: f64 = analytic.iter().zip(numeric).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
    let norm_a: f64 = analytic.iter().map(|a| a * a).sum::<f64>().sqrt();
    let norm_b: f64 = numeric.iter().map(|b| b * b).sum::<f64>().sqrt();
    diff / norm_a.max(norm_b).max(1e-12)
}

/// Relative error of `ldt_gradient` on one random batch.
pub fn ldt_instance_error(rng: &mut ChaCha8Rng) -> f64 {
    let t_len = rng.gen_range(1..=6);
    let k = rng.gen_range(2..=4);
    let logits = Array2::from_shape_fn((t_len, k), |_| rng.gen_range(-3.0..3.0));
    let mut behavior = Array2::from_shape_fn((t_len, k), |_| rng.gen_range(0.05..1.0));
    for mut row in behavior.rows_mut() {
        let s = row.sum();
        row /= s;
    }
    let actions: Vec<usize> = (0..t_len).map(|_| rng.gen_range(0..k)).collect();
    let adv: Vec<f64> = (0..t_len).map(|_| rng.gen_range(-2.0..2.0)).collect();

    // The analytic rows are per-step derivatives; the objective is the mean
    // over steps, so the numeric derivative is scaled by T.
    let analytic = ldt_gradient(logits.view(), &actions, behavior.view(), &adv);
    let mut numeric = Array2::<f64>::zeros((t_len, k));
    for t in 0..t_len {
        for c in 0..k {
            let mut plus = logits.clone();
            plus[[t, c]] += STEP;
            let mut minus = logits.clone();
            minus[[t, c]] -= STEP;
            let f_plus = ldt_objective(plus.view(), &actions, behavior.view(), &adv);
            let f_minus = ldt_objective(minus.view(), &actions, behavior.view(), &adv);
            numeric[[t, c]] = (f_plus - f_minus) / (2.0 * STEP) * t_len as f64;
        }
    }
    relative_error(analytic.as_slice().unwrap(), numeric.as_slice().unwrap())
}

/// Relative error of the critic's loss gradient on one random network and
/// minibatch, or `None` when the draw sits too close to a kink of the
/// clipped loss for finite differences to be meaningful.
pub fn critic_instance_error(rng: &mut ChaCha8Rng) -> Option<f64> {
    let clip = 0.2;
    let m = rng.gen_range(1..=4);
    let hidden = [3, 8, 16][rng.gen_range(0..3)];
    let n = rng.gen_range(1..=5);
    let net = CriticNet::new(m, hidden, &mut seeded(rng.gen(), 0));
    let x = Array2::from_shape_fn((n, m), |_| rng.gen_range(-2.0..2.0));
    let values = net.values(x.view());
    let old: Vec<f64> = values
        .iter()
        .map(|v| v + if rng.gen_bool(0.5) { rng.gen_range(-0.15..0.15) } else { rng.gen_range(0.3..1.0) })
        .collect();
    let targets: Vec<f64> = (0..n).map(|_| rng.gen_range(-3.0..3.0)).collect();
    let near_kink = values.iter().zip(&old).zip(&targets).any(|((&v, &o), &t)| {
        let d = v - o;
        let clipped = o + d.clamp(-clip, clip) - t;
        (d.abs() - clip).abs() < 1e-3 || ((v - t).powi(2) - clipped.powi(2)).abs() < 1e-3
    });
    if near_kink {
        return None;
    }

    let (_, analytic) = net.loss_and_grad(x.view(), &old, &targets, clip);
    let mut numeric = vec![0.0; analytic.len()];
    let mut probe = net.clone();
    for i in 0..analytic.len() {
        let base = probe.params()[i];
        probe.params_mut()[i] = base + STEP;
        let (f_plus, _) = probe.loss_and_grad(x.view(), &old, &targets, clip);
        probe.params_mut()[i] = base - STEP;
        let (f_minus, _) = probe.loss_and_grad(x.view(), &old, &targets, clip);
        probe.params_mut()[i] = base;
        numeric[i] = (f_plus - f_minus) / (2.0 * STEP);
    }
    Some(relative_error(&analytic, &numeric))
}
