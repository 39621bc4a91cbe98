//! GAE as an explicit discounted sum of TD errors.

use dtpo_core::advantage::gae;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub struct Case {
    pub rewards: Vec<f64>,
    pub values: Vec<f64>,
    pub next_values: Vec<f64>,
    pub terminated: Vec<bool>,
    pub truncated: Vec<bool>,
}

pub fn random_case(rng: &mut ChaCha8Rng) -> Case {
    let t = rng.gen_range(1..=8);
    let mut terminated = Vec::new();
    let mut truncated = Vec::new();
    for _ in 0..t {
        let r: f64 = rng.gen();
        terminated.push(r < 0.2);
        truncated.push((0.2..0.3).contains(&r));
    }
    Case {
        rewards: (0..t).map(|_| rng.gen_range(-2.0..2.0)).collect(),
        values: (0..t).map(|_| rng.gen_range(-5.0..5.0)).collect(),
        next_values: (0..t).map(|_| rng.gen_range(-5.0..5.0)).collect(),
        terminated,
        truncated,
    }
}

/// `Â_t = Σ_l (γλ)^l δ_{t+l}`, summed up to the end of `t`'s episode or
/// the batch.
pub fn explicit(c: &Case, gamma: f64, lambda: f64) -> Vec<f64> {
    let n = c.rewards.len();
    let delta: Vec<f64> = (0..n)
        .map(|t| {
            let boot = if c.terminated[t] { 0.0 } else { gamma * c.next_values[t] };
            c.rewards[t] + boot - c.values[t]
        })
        .collect();
    (0..n)
        .map(|t| {
            let mut total = 0.0;
            let mut weight = 1.0;
            for u in t..n {
                total += weight * delta[u];
                if c.terminated[u] || c.truncated[u] {
                    break;
                }
                weight *= gamma * lambda;
            }
            total
        })
        .collect()
}

pub fn run(c: &Case, gamma: f64, lambda: f64) -> Vec<f64> {
    gae(&c.rewards, &c.values, &c.next_values, &c.terminated, &c.truncated, gamma, lambda)
}

