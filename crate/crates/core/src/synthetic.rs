//! Seeded two-class "bump" datasets.
//!
//! Class 0 is Gaussian noise. Class 1 adds a single Gaussian-shaped bump at a
//! random position, so the evidence for class 1 is local and a faithful
//! attribution should point at it.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{AsiError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BumpConfig {
    pub samples: usize,
    pub length: usize,
    pub amplitude: f64,
    /// Standard deviation of the bump shape, in time points.
    pub width: f64,
    pub noise_std: f64,
    pub seed: u64,
}

impl Default for BumpConfig {
    fn default() -> Self {
        Self {
            samples: 500,
            length: 96,
            amplitude: 2.0,
            width: 2.5,
            noise_std: 0.3,
            seed: 0,
        }
    }
}

/// Class labels alternate 0, 1, 0, ... so the set is balanced.
pub fn bump_dataset(cfg: &BumpConfig) -> Result<Dataset> {
    if cfg.samples == 0 || cfg.length == 0 {
        return Err(AsiError::EmptyInput("bump dataset"));
    }
    let noise =
        Normal::new(0.0, cfg.noise_std).map_err(|e| AsiError::Config(format!("noise std: {e}")))?;
    let margin = (3.0 * cfg.width).ceil() as usize;
    if 2 * margin >= cfg.length {
        return Err(AsiError::Config(format!(
            "bump width {} does not fit in length {}",
            cfg.width, cfg.length
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut samples = Vec::with_capacity(cfg.samples);
    let mut labels = Vec::with_capacity(cfg.samples);
    for i in 0..cfg.samples {
        let label = i % 2;
        let mut s: Vec<f64> = (0..cfg.length).map(|_| noise.sample(&mut rng)).collect();
        if label == 1 {
            let center = rng.random_range(margin..cfg.length - margin) as f64;
            for (t, v) in s.iter_mut().enumerate() {
                let z = (t as f64 - center) / cfg.width;
                *v += cfg.amplitude * (-0.5 * z * z).exp();
            }
        }
        samples.push(s);
        labels.push(label);
    }
    Dataset::new(samples, labels, 2)
}
