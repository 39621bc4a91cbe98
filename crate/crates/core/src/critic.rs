//! MLP value function `m -> 64 -> 64 -> 1` with tanh hidden layers,
//! hand-written backpropagation, Adam, and the clipped value loss.
//!
//! Parameters live in one flat vector so the optimizer and gradient checks
//! can treat them uniformly. Layout: `w1 (m x h)`, `b1 (h)`, `w2 (h x h)`,
//! `b2 (h)`, `w3 (h)`, `b3 (1)`, all row-major.

use ndarray::{Array1, Array2, ArrayView1, ArrayView2, Axis};
use rand::seq::SliceRandom;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::Rng;

pub const HIDDEN: usize = 64;
pub const LEARNING_RATE: f64 = 2.5e-4;
pub const BETA1: f64 = 0.9;
pub const BETA2: f64 = 0.999;
pub const ADAM_EPSILON: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticNet {
    input_dim: usize,
    hidden: usize,
    params: Vec<f64>,
}

struct Offsets {
    w1: usize,
    b1: usize,
    w2: usize,
    b2: usize,
    w3: usize,
    b3: usize,
    end: usize,
}

fn offsets(m: usize, h: usize) -> Offsets {
    let w1 = 0;
    let b1 = w1 + m * h;
    let w2 = b1 + h;
    let b2 = w2 + h * h;
    let w3 = b2 + h;
    let b3 = w3 + h;
    Offsets { w1, b1, w2, b2, w3, b3, end: b3 + 1 }
}

/// Hidden activations kept for the backward pass.
struct Activations {
    h1: Array2<f64>,
    h2: Array2<f64>,
    out: Array1<f64>,
}

impl CriticNet {
    /// Weights and biases drawn from `U(-1/sqrt(fan_in), 1/sqrt(fan_in))`.
    pub fn new(input_dim: usize, hidden: usize, rng: &mut Rng) -> Self {
        let o = offsets(input_dim, hidden);
        let mut params = vec![0.0; o.end];
        let mut fill = |range: std::ops::Range<usize>, fan_in: usize| {
            let bound = 1.0 / (fan_in as f64).sqrt();
            for p in &mut params[range] {
                *p = rng.gen_range(-bound..bound);
            }
        };
        fill(o.w1..o.b1, input_dim);
        fill(o.b1..o.w2, input_dim);
        fill(o.w2..o.b2, hidden);
        fill(o.b2..o.w3, hidden);
        fill(o.w3..o.b3, hidden);
        fill(o.b3..o.end, hidden);
        Self { input_dim, hidden, params }
    }

    pub fn zeros(input_dim: usize, hidden: usize) -> Self {
        Self {
            input_dim,
            hidden,
            params: vec![0.0; offsets(input_dim, hidden).end],
        }
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn hidden(&self) -> usize {
        self.hidden
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [f64] {
        &mut self.params
    }

    fn layers(&self) -> (ArrayView2<'_, f64>, ArrayView1<'_, f64>, ArrayView2<'_, f64>, ArrayView1<'_, f64>, ArrayView1<'_, f64>, f64) {
        let (m, h) = (self.input_dim, self.hidden);
        let o = offsets(m, h);
        let p = &self.params;
        (
            ArrayView2::from_shape((m, h), &p[o.w1..o.b1]).expect("layout"),
            ArrayView1::from(&p[o.b1..o.w2]),
            ArrayView2::from_shape((h, h), &p[o.w2..o.b2]).expect("layout"),
            ArrayView1::from(&p[o.b2..o.w3]),
            ArrayView1::from(&p[o.w3..o.b3]),
            p[o.b3],
        )
    }

    fn forward(&self, x: ArrayView2<'_, f64>) -> Activations {
        let (w1, b1, w2, b2, w3, b3) = self.layers();
        let mut h1 = x.dot(&w1);
        h1 += &b1;
        h1.mapv_inplace(f64::tanh);
        let mut h2 = h1.dot(&w2);
        h2 += &b2;
        h2.mapv_inplace(f64::tanh);
        let mut out = h2.dot(&w3);
        out += b3;
        Activations { h1, h2, out }
    }

    /// Value of a single observation.
    pub fn value(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.input_dim {
            return Err(Error::DimensionMismatch {
                expected: self.input_dim,
                got: x.len(),
            });
        }
        let row = ArrayView2::from_shape((1, self.input_dim), x).expect("row view");
        Ok(self.forward(row).out[0])
    }

    /// Values for every row of `x`.
    pub fn values(&self, x: ArrayView2<'_, f64>) -> Vec<f64> {
        assert_eq!(x.ncols(), self.input_dim, "critic input width");
        self.forward(x).out.to_vec()
    }

    /// Accumulates `sum_i d_out[i] * dV(x_i)/dθ` into `grad`.
    fn backward(&self, x: ArrayView2<'_, f64>, acts: &Activations, d_out: &Array1<f64>, grad: &mut [f64]) {
        let (m, h) = (self.input_dim, self.hidden);
        let o = offsets(m, h);
        let (_, _, w2, _, w3, _) = self.layers();

        let mut g = ndarray::ArrayViewMut1::from(&mut grad[o.w3..o.b3]);
        g += &acts.h2.t().dot(d_out);
        grad[o.b3] += d_out.sum();

        // dz2 = (d_out ⊗ w3) ⊙ (1 - h2²)
        let mut dz2 = Array2::<f64>::zeros((x.nrows(), h));
        for ((mut row, &d), h2row) in dz2.rows_mut().into_iter().zip(d_out.iter()).zip(acts.h2.rows()) {
            for ((z, &w), &a) in row.iter_mut().zip(w3.iter()).zip(h2row.iter()) {
                *z = d * w * (1.0 - a * a);
            }
        }
        let mut g = ndarray::ArrayViewMut2::from_shape((h, h), &mut grad[o.w2..o.b2]).expect("layout");
        g += &acts.h1.t().dot(&dz2);
        let mut g = ndarray::ArrayViewMut1::from(&mut grad[o.b2..o.w3]);
        g += &dz2.sum_axis(Axis(0));

        let mut dz1 = dz2.dot(&w2.t());
        ndarray::Zip::from(&mut dz1)
            .and(&acts.h1)
            .for_each(|z, &a| *z *= 1.0 - a * a);
        let mut g = ndarray::ArrayViewMut2::from_shape((m, h), &mut grad[o.w1..o.b1]).expect("layout");
        g += &x.t().dot(&dz1);
        let mut g = ndarray::ArrayViewMut1::from(&mut grad[o.b1..o.w2]);
        g += &dz1.sum_axis(Axis(0));
    }

    /// Mean clipped value loss over the rows of `x` and its gradient with
    /// respect to the parameters. `old_values` are the frozen predictions of
    /// the network the update started from.
    pub fn loss_and_grad(
        &self,
        x: ArrayView2<'_, f64>,
        old_values: &[f64],
        targets: &[f64],
        clip: f64,
    ) -> (f64, Vec<f64>) {
        let n = x.nrows();
        let acts = self.forward(x);
        let mut loss = 0.0;
        let mut d_out = Array1::<f64>::zeros(n);
        for i in 0..n {
            let v = acts.out[i];
            loss += clipped_value_loss(v, old_values[i], targets[i], clip);
            d_out[i] = clipped_value_loss_grad(v, old_values[i], targets[i], clip) / n as f64;
        }
        let mut grad = vec![0.0; self.params.len()];
        self.backward(x, &acts, &d_out, &mut grad);
        (loss / n as f64, grad)
    }
}

/// `max((v - target)², (v_old + clip(v - v_old, -ε, ε) - target)²)`
pub fn clipped_value_loss(value: f64, old_value: f64, target: f64, clip: f64) -> f64 {
    let unclipped = (value - target).powi(2);
    let clipped = (old_value + (value - old_value).clamp(-clip, clip) - target).powi(2);
    unclipped.max(clipped)
}

/// Derivative of [`clipped_value_loss`] in `value`. Ties between the two
/// branches take the unclipped branch.
pub fn clipped_value_loss_grad(value: f64, old_value: f64, target: f64, clip: f64) -> f64 {
    let diff = value - old_value;
    let unclipped = value - target;
    let clipped_value = old_value + diff.clamp(-clip, clip);
    let clipped = clipped_value - target;
    if unclipped * unclipped >= clipped * clipped {
        2.0 * unclipped
    } else if diff.abs() < clip {
        2.0 * clipped
    } else {
        0.0
    }
}

/// Adam moments for a flat parameter vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdamState {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    pub step: u64,
    first: Vec<f64>,
    second: Vec<f64>,
}

impl AdamState {
    pub fn new(n_params: usize) -> Self {
        Self::with_learning_rate(n_params, LEARNING_RATE)
    }

    pub fn with_learning_rate(n_params: usize, learning_rate: f64) -> Self {
        Self {
            learning_rate,
            beta1: BETA1,
            beta2: BETA2,
            epsilon: ADAM_EPSILON,
            step: 0,
            first: vec![0.0; n_params],
            second: vec![0.0; n_params],
        }
    }

    /// One bias-corrected descent step on `params` along `grad`.
    pub fn update(&mut self, params: &mut [f64], grad: &[f64]) {
        assert_eq!(params.len(), self.first.len(), "parameter count");
        assert_eq!(grad.len(), self.first.len(), "gradient length");
        self.step += 1;
        let t = self.step as i32;
        let c1 = 1.0 - self.beta1.powi(t);
        let c2 = 1.0 - self.beta2.powi(t);
        for i in 0..params.len() {
            self.first[i] = self.beta1 * self.first[i] + (1.0 - self.beta1) * grad[i];
            self.second[i] = self.beta2 * self.second[i] + (1.0 - self.beta2) * grad[i] * grad[i];
            let m_hat = self.first[i] / c1;
            let v_hat = self.second[i] / c2;
            params[i] -= self.learning_rate * m_hat / (v_hat.sqrt() + self.epsilon);
        }
    }
}

/// Runs `epochs` passes of shuffled minibatches over `(x, targets)`, one
/// Adam step per minibatch on the mean clipped value loss. The clipping
/// reference is the network as it was on entry. Returns the mean minibatch
/// loss of the final epoch.
#[allow(clippy::too_many_arguments)]
pub fn train_epochs(
    net: &mut CriticNet,
    adam: &mut AdamState,
    x: ArrayView2<'_, f64>,
    targets: &[f64],
    epochs: usize,
    batch_size: usize,
    clip: f64,
    rng: &mut Rng,
) -> f64 {
    let n = x.nrows();
    assert_eq!(targets.len(), n, "one target per row");
    if n == 0 || epochs == 0 {
        return 0.0;
    }
    let batch_size = batch_size.max(1);
    let old_values = net.values(x);
    let mut order: Vec<usize> = (0..n).collect();
    let mut last_epoch_loss = 0.0;
    let mut xb = Array2::<f64>::zeros((batch_size, x.ncols()));
    let mut old_b = Vec::with_capacity(batch_size);
    let mut target_b = Vec::with_capacity(batch_size);
    for _ in 0..epochs {
        order.shuffle(rng);
        let mut total = 0.0;
        let mut batches = 0;
        for chunk in order.chunks(batch_size) {
            if xb.nrows() != chunk.len() {
                xb = Array2::zeros((chunk.len(), x.ncols()));
            }
            old_b.clear();
            target_b.clear();
            for (row, &i) in chunk.iter().enumerate() {
                xb.row_mut(row).assign(&x.row(i));
                old_b.push(old_values[i]);
                target_b.push(targets[i]);
            }
            let (loss, grad) = net.loss_and_grad(xb.view(), &old_b, &target_b, clip);
            adam.update(&mut net.params, &grad);
            total += loss;
            batches += 1;
        }
        last_epoch_loss = total / batches as f64;
    }
    last_epoch_loss
}
