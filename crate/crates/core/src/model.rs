//! A dense ReLU classifier with hand-written backpropagation.
//!
//! The network maps a series of length `m` through rectified-linear hidden
//! layers to `C` logits followed by a softmax. Input gradients are taken with
//! respect to the logits.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::dataset::Dataset;
use crate::error::{AsiError, Result};
use crate::measures::PredictionDistribution;
use crate::numeric::{argmax, compensated_sum};

/// Fully connected layer; `weights` is `outputs x inputs`, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseLayer {
    pub inputs: usize,
    pub outputs: usize,
    pub weights: Vec<f64>,
    pub bias: Vec<f64>,
}

impl DenseLayer {
    pub fn zeros(inputs: usize, outputs: usize) -> Self {
        Self {
            inputs,
            outputs,
            weights: vec![0.0; inputs * outputs],
            bias: vec![0.0; outputs],
        }
    }

    pub fn row(&self, o: usize) -> &[f64] {
        &self.weights[o * self.inputs..(o + 1) * self.inputs]
    }

    fn forward_into(&self, x: &[f64], out: &mut Vec<f64>) {
        out.clear();
        out.extend((0..self.outputs).map(|o| {
            self.row(o)
                .iter()
                .zip(x)
                .fold(self.bias[o], |acc, (w, v)| acc + w * v)
        }));
    }

    // out = W^T delta
    fn backward_input(&self, delta: &[f64], out: &mut Vec<f64>) {
        out.clear();
        out.resize(self.inputs, 0.0);
        for (o, &d) in delta.iter().enumerate() {
            if d == 0.0 {
                continue;
            }
            for (acc, w) in out.iter_mut().zip(self.row(o)) {
                *acc += w * d;
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    layers: Vec<DenseLayer>,
}

impl ModelParams {
    pub fn from_layers(layers: Vec<DenseLayer>) -> Result<Self> {
        if layers.is_empty() {
            return Err(AsiError::Config("model needs at least one layer".into()));
        }
        for (i, l) in layers.iter().enumerate() {
            if l.inputs == 0 || l.outputs == 0 {
                return Err(AsiError::Config(format!("layer {i} has a zero dimension")));
            }
            if l.weights.len() != l.inputs * l.outputs || l.bias.len() != l.outputs {
                return Err(AsiError::Config(format!(
                    "layer {i} arrays do not match its {}x{} shape",
                    l.outputs, l.inputs
                )));
            }
            if l.weights.iter().chain(&l.bias).any(|v| !v.is_finite()) {
                return Err(AsiError::Config(format!("layer {i} has non-finite values")));
            }
            if i > 0 && layers[i - 1].outputs != l.inputs {
                return Err(AsiError::Config(format!(
                    "layer {i} expects {} inputs but layer {} produces {}",
                    l.inputs,
                    i - 1,
                    layers[i - 1].outputs
                )));
            }
        }
        if layers.last().map(|l| l.outputs) < Some(2) {
            return Err(AsiError::Config(
                "model needs at least 2 output classes".into(),
            ));
        }
        Ok(Self { layers })
    }

    /// All-zero parameters for the layer sizes `dims = [m, h1, ..., C]`.
    pub fn zeros(dims: &[usize]) -> Result<Self> {
        if dims.len() < 2 {
            return Err(AsiError::Config(
                "need at least input and output sizes".into(),
            ));
        }
        Self::from_layers(
            dims.windows(2)
                .map(|w| DenseLayer::zeros(w[0], w[1]))
                .collect(),
        )
    }

    /// Glorot-uniform weights in `±sqrt(6 / (fan_in + fan_out))`, zero biases.
    pub fn init(dims: &[usize], rng: &mut impl Rng) -> Result<Self> {
        let mut params = Self::zeros(dims)?;
        for l in &mut params.layers {
            let limit = (6.0 / (l.inputs + l.outputs) as f64).sqrt();
            for w in &mut l.weights {
                *w = rng.random_range(-limit..limit);
            }
        }
        Ok(params)
    }

    pub fn layers(&self) -> &[DenseLayer] {
        &self.layers
    }

    pub fn dims(&self) -> Vec<usize> {
        std::iter::once(self.layers[0].inputs)
            .chain(self.layers.iter().map(|l| l.outputs))
            .collect()
    }

    pub fn input_len(&self) -> usize {
        self.layers[0].inputs
    }

    pub fn class_count(&self) -> usize {
        self.layers[self.layers.len() - 1].outputs
    }

    /// SHA-256 over dimensions and parameter bit patterns.
    pub fn fingerprint(&self) -> String {
        let mut h = Sha256::new();
        for d in self.dims() {
            h.update((d as u64).to_le_bytes());
        }
        for l in &self.layers {
            for v in l.weights.iter().chain(&l.bias) {
                h.update(v.to_bits().to_le_bytes());
            }
        }
        hex::encode(h.finalize())
    }

    fn check_input(&self, ts: &[f64]) -> Result<()> {
        if ts.len() != self.input_len() {
            return Err(AsiError::Dimension {
                what: "model input",
                expected: self.input_len(),
                found: ts.len(),
            });
        }
        Ok(())
    }

    // Pre-activations of every layer; hidden layers are ReLU'd before
    // feeding the next one.
    fn forward(&self, ts: &[f64]) -> Vec<Vec<f64>> {
        let mut pre = Vec::with_capacity(self.layers.len());
        let mut act = ts.to_vec();
        let last = self.layers.len() - 1;
        for (i, layer) in self.layers.iter().enumerate() {
            let mut z = Vec::new();
            layer.forward_into(&act, &mut z);
            if i < last {
                act = z.iter().map(|v| v.max(0.0)).collect();
            }
            pre.push(z);
        }
        pre
    }

    pub fn logits(&self, ts: &[f64]) -> Result<Vec<f64>> {
        self.check_input(ts)?;
        Ok(self.forward(ts).pop().expect("at least one layer"))
    }

    pub fn predict_proba(&self, ts: &[f64]) -> Result<PredictionDistribution> {
        let z = self.logits(ts)?;
        PredictionDistribution::new(softmax(&z))
    }

    pub fn predict_class(&self, ts: &[f64]) -> Result<usize> {
        Ok(argmax(&self.logits(ts)?))
    }

    /// Gradient of logit `class_index` with respect to each input point.
    pub fn gradient_wrt_input(&self, ts: &[f64], class_index: usize) -> Result<Vec<f64>> {
        self.check_input(ts)?;
        let classes = self.class_count();
        if class_index >= classes {
            return Err(AsiError::ClassIndex {
                index: class_index,
                classes,
            });
        }
        let pre = self.forward(ts);
        let mut delta = vec![0.0; classes];
        delta[class_index] = 1.0;
        let mut next = Vec::new();
        for i in (0..self.layers.len()).rev() {
            self.layers[i].backward_input(&delta, &mut next);
            if i > 0 {
                for (d, z) in next.iter_mut().zip(&pre[i - 1]) {
                    if *z <= 0.0 {
                        *d = 0.0;
                    }
                }
            }
            std::mem::swap(&mut delta, &mut next);
        }
        Ok(delta)
    }
}

pub fn softmax(z: &[f64]) -> Vec<f64> {
    let max = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = z.iter().map(|v| (v - max).exp()).collect();
    let total: f64 = exps.iter().sum();
    exps.iter().map(|e| e / total).collect()
}

fn cross_entropy(z: &[f64], label: usize) -> f64 {
    let max = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lse = max + z.iter().map(|v| (v - max).exp()).sum::<f64>().ln();
    lse - z[label]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub batch_size: usize,
    pub epochs: usize,
    pub seed: u64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    pub hidden_layers: Vec<usize>,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            learning_rate: 1e-3,
            batch_size: 32,
            epochs: 100,
            seed: 0,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            hidden_layers: vec![64, 32],
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(AsiError::Config(format!(
                "learning rate must be positive, got {}",
                self.learning_rate
            )));
        }
        if self.batch_size == 0 {
            return Err(AsiError::Config("batch size must be at least 1".into()));
        }
        if self.epochs == 0 {
            return Err(AsiError::Config("epochs must be at least 1".into()));
        }
        if !(0.0..1.0).contains(&self.beta1) || !(0.0..1.0).contains(&self.beta2) {
            return Err(AsiError::Config(
                "Adam moment coefficients must lie in [0, 1)".into(),
            ));
        }
        if self.epsilon.is_nan() || self.epsilon <= 0.0 {
            return Err(AsiError::Config("Adam epsilon must be positive".into()));
        }
        if self.hidden_layers.contains(&0) {
            return Err(AsiError::Config(
                "hidden layer sizes must be positive".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub params: ModelParams,
    /// Mean cross-entropy seen during each epoch.
    pub epoch_losses: Vec<f64>,
}

struct Gradients {
    weights: Vec<Vec<f64>>,
    bias: Vec<Vec<f64>>,
}

impl Gradients {
    fn zeros_like(p: &ModelParams) -> Self {
        Self {
            weights: p
                .layers
                .iter()
                .map(|l| vec![0.0; l.weights.len()])
                .collect(),
            bias: p.layers.iter().map(|l| vec![0.0; l.bias.len()]).collect(),
        }
    }

    fn clear(&mut self) {
        self.weights
            .iter_mut()
            .chain(&mut self.bias)
            .for_each(|g| g.fill(0.0));
    }
}

// Accumulates the cross-entropy gradient of one sample into `grads` and
// returns its loss.
fn accumulate(params: &ModelParams, ts: &[f64], label: usize, grads: &mut Gradients) -> f64 {
    let pre = params.forward(ts);
    let logits = pre.last().expect("at least one layer");
    let loss = cross_entropy(logits, label);
    let mut delta = softmax(logits);
    delta[label] -= 1.0;
    let mut next = Vec::new();
    let relu = |z: &[f64]| -> Vec<f64> { z.iter().map(|v| v.max(0.0)).collect() };
    for i in (0..params.layers.len()).rev() {
        let layer = &params.layers[i];
        let input: Vec<f64> = if i == 0 {
            ts.to_vec()
        } else {
            relu(&pre[i - 1])
        };
        for (o, &d) in delta.iter().enumerate() {
            grads.bias[i][o] += d;
            if d == 0.0 {
                continue;
            }
            let row = &mut grads.weights[i][o * layer.inputs..(o + 1) * layer.inputs];
            for (g, x) in row.iter_mut().zip(&input) {
                *g += d * x;
            }
        }
        if i > 0 {
            layer.backward_input(&delta, &mut next);
            for (d, z) in next.iter_mut().zip(&pre[i - 1]) {
                if *z <= 0.0 {
                    *d = 0.0;
                }
            }
            std::mem::swap(&mut delta, &mut next);
        }
    }
    loss
}

/// Mini-batch Adam on the mean cross-entropy. Bit-reproducible for a given
/// dataset and config.
pub fn train_with_history(dataset: &Dataset, cfg: &TrainConfig) -> Result<TrainOutcome> {
    cfg.validate()?;
    if dataset.is_empty() {
        return Err(AsiError::EmptyInput("training dataset"));
    }
    let mut dims = vec![dataset.series_len()];
    dims.extend(&cfg.hidden_layers);
    dims.push(dataset.class_count());

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut params = ModelParams::init(&dims, &mut rng)?;
    let mut grads = Gradients::zeros_like(&params);
    let mut m1 = Gradients::zeros_like(&params);
    let mut m2 = Gradients::zeros_like(&params);
    let mut order: Vec<usize> = (0..dataset.len()).collect();
    let mut step = 0i32;
    let mut epoch_losses = Vec::with_capacity(cfg.epochs);

    for _ in 0..cfg.epochs {
        order.shuffle(&mut rng);
        let mut losses = Vec::with_capacity(dataset.len());
        for batch in order.chunks(cfg.batch_size) {
            grads.clear();
            for &i in batch {
                losses.push(accumulate(
                    &params,
                    dataset.sample(i),
                    dataset.label(i),
                    &mut grads,
                ));
            }
            step += 1;
            let scale = 1.0 / batch.len() as f64;
            let c1 = 1.0 - cfg.beta1.powi(step);
            let c2 = 1.0 - cfg.beta2.powi(step);
            for (li, layer) in params.layers.iter_mut().enumerate() {
                let targets = [
                    (
                        &mut layer.weights,
                        &grads.weights[li],
                        &mut m1.weights[li],
                        &mut m2.weights[li],
                    ),
                    (
                        &mut layer.bias,
                        &grads.bias[li],
                        &mut m1.bias[li],
                        &mut m2.bias[li],
                    ),
                ];
                for (theta, g, m, v) in targets {
                    for k in 0..theta.len() {
                        let gk = g[k] * scale;
                        m[k] = cfg.beta1 * m[k] + (1.0 - cfg.beta1) * gk;
                        v[k] = cfg.beta2 * v[k] + (1.0 - cfg.beta2) * gk * gk;
                        let m_hat = m[k] / c1;
                        let v_hat = v[k] / c2;
                        theta[k] -= cfg.learning_rate * m_hat / (v_hat.sqrt() + cfg.epsilon);
                    }
                }
            }
        }
        epoch_losses.push(compensated_sum(losses.iter().copied()) / losses.len() as f64);
    }
    Ok(TrainOutcome {
        params,
        epoch_losses,
    })
}

pub fn train(dataset: &Dataset, cfg: &TrainConfig) -> Result<ModelParams> {
    Ok(train_with_history(dataset, cfg)?.params)
}

/// Fraction of samples whose predicted class equals the label.
pub fn accuracy(params: &ModelParams, dataset: &Dataset) -> Result<f64> {
    if dataset.is_empty() {
        return Err(AsiError::EmptyInput("dataset"));
    }
    let mut correct = 0usize;
    for (s, &l) in dataset.samples().iter().zip(dataset.labels()) {
        if params.predict_class(s)? == l {
            correct += 1;
        }
    }
    Ok(correct as f64 / dataset.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn linear(weights: Vec<f64>, bias: Vec<f64>, inputs: usize) -> ModelParams {
        let outputs = bias.len();
        ModelParams::from_layers(vec![DenseLayer {
            inputs,
            outputs,
            weights,
            bias,
        }])
        .unwrap()
    }

    fn toy_separable() -> Dataset {
        let mut samples = Vec::new();
        let mut labels = Vec::new();
        for i in 0..20 {
            let c = i % 2;
            let sign = if c == 1 { 1.0 } else { -1.0 };
            let jitter = (i as f64) * 0.01;
            samples.push(vec![sign * (1.0 + jitter), 0.3 - jitter, sign * 0.5]);
            labels.push(c);
        }
        Dataset::new(samples, labels, 2).unwrap()
    }

    #[test]
    fn zero_params_predict_uniform() {
        let p = ModelParams::zeros(&[5, 4, 3]).unwrap();
        let d = p.predict_proba(&[1.0, -2.0, 3.0, 0.5, 9.0]).unwrap();
        for v in d.probs() {
            assert!((v - 1.0 / 3.0).abs() < 1e-15);
        }
        assert_eq!(p.gradient_wrt_input(&[1.0; 5], 2).unwrap(), vec![0.0; 5]);
    }

    #[test]
    fn softmax_is_normalized() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let p = ModelParams::init(&[8, 6, 4], &mut rng).unwrap();
        let ts: Vec<f64> = (0..8).map(|i| (i as f64).sin() * 4.0).collect();
        let d = p.predict_proba(&ts).unwrap();
        let sum: f64 = d.probs().iter().sum();
        assert!((sum - 1.0).abs() < 1e-9);
        assert!(d.probs().iter().all(|v| *v > 0.0 && *v < 1.0));
    }

    #[test]
    fn linear_gradient_is_weight_row() {
        let p = linear(vec![1.0, -2.0, 0.5, 3.0, 0.0, -1.0], vec![0.1, -0.1], 3);
        assert_eq!(
            p.gradient_wrt_input(&[4.0, 5.0, 6.0], 0).unwrap(),
            vec![1.0, -2.0, 0.5]
        );
        assert_eq!(
            p.gradient_wrt_input(&[4.0, 5.0, 6.0], 1).unwrap(),
            vec![3.0, 0.0, -1.0]
        );
    }

    #[test]
    fn errors() {
        let p = ModelParams::zeros(&[3, 2]).unwrap();
        assert!(matches!(
            p.gradient_wrt_input(&[0.0; 3], 2),
            Err(AsiError::ClassIndex { .. })
        ));
        assert!(matches!(
            p.predict_proba(&[0.0; 4]),
            Err(AsiError::Dimension { .. })
        ));
        assert!(ModelParams::zeros(&[3, 1]).is_err());
        let bad = vec![DenseLayer::zeros(3, 4), DenseLayer::zeros(5, 2)];
        assert!(ModelParams::from_layers(bad).is_err());
    }

    #[test]
    fn config_validation() {
        let cfg = TrainConfig {
            epochs: 0,
            ..TrainConfig::default()
        };
        assert!(matches!(
            train(&toy_separable(), &cfg),
            Err(AsiError::Config(_))
        ));
        let cfg = TrainConfig {
            batch_size: 0,
            ..TrainConfig::default()
        };
        assert!(cfg.validate().is_err());
        let cfg = TrainConfig {
            learning_rate: -1.0,
            ..TrainConfig::default()
        };
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn separable_toy_reaches_full_accuracy() {
        let data = toy_separable();
        let cfg = TrainConfig {
            epochs: 200,
            batch_size: 4,
            learning_rate: 1e-2,
            ..TrainConfig::default()
        };
        let params = train(&data, &cfg).unwrap();
        assert_eq!(accuracy(&params, &data).unwrap(), 1.0);
    }

    #[test]
    fn full_batch_loss_is_monotone() {
        let data = toy_separable();
        let cfg = TrainConfig {
            epochs: 200,
            batch_size: data.len(),
            ..TrainConfig::default()
        };
        let out = train_with_history(&data, &cfg).unwrap();
        for w in out.epoch_losses.windows(2) {
            assert!(w[1] <= w[0] + 1e-6, "loss rose from {} to {}", w[0], w[1]);
        }
        assert!(out.epoch_losses.last() < out.epoch_losses.first());
    }

    #[test]
    fn training_is_reproducible() {
        let data = toy_separable();
        let cfg = TrainConfig {
            epochs: 5,
            batch_size: 3,
            seed: 11,
            ..TrainConfig::default()
        };
        let a = train(&data, &cfg).unwrap();
        let b = train(&data, &cfg).unwrap();
        assert_eq!(a.fingerprint(), b.fingerprint());
        let c = train(&data, &TrainConfig { seed: 12, ..cfg }).unwrap();
        assert_ne!(a.fingerprint(), c.fingerprint());
    }

    #[test]
    fn accuracy_of_constant_predictor_on_balanced_set() {
        let data = toy_separable();
        // Bias only: always predicts class 0.
        let p = linear(vec![0.0; 6], vec![1.0, 0.0], 3);
        assert_eq!(accuracy(&p, &data).unwrap(), 0.5);
    }
}
