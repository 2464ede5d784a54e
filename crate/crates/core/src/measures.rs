//! The numerical building blocks of the Attribution Stability Indicator.
//!
//! Every function here is pure. The combined score is
//!
//! ```text
//! ASI = ( w1 * flip
//!       + w2 * (1 - JS_dist(p, p'))
//!       + w3 * pcc(att, att')
//!       + w4 * (1 - pcc(ts, ts')) ) / 4
//! ```
//!
//! where `pcc` is the Pearson correlation rescaled to `[0, 1]`. Lower scores
//! indicate an attribution whose perturbation changed the model's decision
//! while touching the input as little as possible.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{AsiError, Result};
use crate::numeric::{argmax, compensated_sum};

/// Tolerance on the sum of a probability vector.
pub const DISTRIBUTION_SUM_TOLERANCE: f64 = 1e-6;

/// Distributions whose entries all differ by less than this are treated as
/// identical by [`js_distance`].
pub const IDENTITY_TOLERANCE: f64 = 1e-12;

/// Per-class probabilities produced by a classifier.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct PredictionDistribution(Vec<f64>);

impl PredictionDistribution {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.len() < 2 {
            return Err(AsiError::InvalidDistribution(format!(
                "need at least 2 classes, got {}",
                probs.len()
            )));
        }
        if let Some((i, p)) = probs
            .iter()
            .enumerate()
            .find(|(_, p)| !p.is_finite() || **p < 0.0)
        {
            return Err(AsiError::InvalidDistribution(format!(
                "entry {i} is {p}, expected a finite nonnegative value"
            )));
        }
        let sum = compensated_sum(probs.iter().copied());
        if (sum - 1.0).abs() > DISTRIBUTION_SUM_TOLERANCE {
            return Err(AsiError::InvalidDistribution(format!(
                "entries sum to {sum}, expected 1"
            )));
        }
        Ok(Self(probs))
    }

    pub fn uniform(classes: usize) -> Result<Self> {
        Self::new(vec![1.0 / classes as f64; classes])
    }

    pub fn probs(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn predicted_class(&self) -> usize {
        argmax(&self.0)
    }
}

impl TryFrom<Vec<f64>> for PredictionDistribution {
    type Error = AsiError;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<PredictionDistribution> for Vec<f64> {
    fn from(p: PredictionDistribution) -> Self {
        p.0
    }
}

/// Weights `(w1, w2, w3, w4)` for the flip, probability-distance,
/// attribution-correlation and series-correlation terms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 4]", into = "[f64; 4]")]
pub struct WeightVector([f64; 4]);

impl WeightVector {
    /// `(0.5, 1, 0.5, 3)`: emphasises attribution and series change.
    pub const DEFAULT: WeightVector = WeightVector([0.5, 1.0, 0.5, 3.0]);
    /// `(1, 0, 0, 0)`: reproduces the raw flip count.
    pub const RAW: WeightVector = WeightVector([1.0, 0.0, 0.0, 0.0]);
    /// `(0.5, 1, 1, 2)`.
    pub const BALANCED: WeightVector = WeightVector([0.5, 1.0, 1.0, 2.0]);

    pub fn new(w: [f64; 4]) -> Result<Self> {
        if w.iter().any(|x| !x.is_finite() || *x < 0.0) {
            return Err(AsiError::Config(format!(
                "weights must be finite and nonnegative, got {w:?}"
            )));
        }
        if w.iter().all(|x| *x == 0.0) {
            return Err(AsiError::Config(
                "at least one weight must be positive".into(),
            ));
        }
        Ok(Self(w))
    }

    pub fn preset(name: &str) -> Result<Self> {
        match name {
            "default" => Ok(Self::DEFAULT),
            "raw" => Ok(Self::RAW),
            "balanced" => Ok(Self::BALANCED),
            other => Err(AsiError::Config(format!(
                "unknown weight preset {other:?} (expected default, raw or balanced)"
            ))),
        }
    }

    pub fn as_array(&self) -> [f64; 4] {
        self.0
    }

    pub fn total(&self) -> f64 {
        self.0.iter().sum()
    }

    /// Largest attainable score, `(w1 + w2 + w3 + w4) / 4`.
    pub fn max_score(&self) -> f64 {
        self.total() / 4.0
    }
}

impl Default for WeightVector {
    fn default() -> Self {
        Self::DEFAULT
    }
}

impl TryFrom<[f64; 4]> for WeightVector {
    type Error = AsiError;

    fn try_from(w: [f64; 4]) -> Result<Self> {
        Self::new(w)
    }
}

impl From<WeightVector> for [f64; 4] {
    fn from(w: WeightVector) -> Self {
        w.0
    }
}

impl FromStr for WeightVector {
    type Err = AsiError;

    fn from_str(s: &str) -> Result<Self> {
        let parts = s
            .split(',')
            .map(|t| t.trim().parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| AsiError::Config(format!("bad weight list {s:?}: {e}")))?;
        let w: [f64; 4] = parts.try_into().map_err(|v: Vec<f64>| {
            AsiError::Config(format!("expected 4 weights, got {}", v.len()))
        })?;
        Self::new(w)
    }
}

impl fmt::Display for WeightVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = self.0;
        write!(f, "{a},{b},{c},{d}")
    }
}

/// The four summands of the score before weighting.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AsiComponents {
    flip_term: f64,
    prob_term: f64,
    att_term: f64,
    ts_term: f64,
}

impl AsiComponents {
    pub fn new(flip_term: f64, prob_term: f64, att_term: f64, ts_term: f64) -> Result<Self> {
        if flip_term != 0.0 && flip_term != 1.0 {
            return Err(AsiError::Config(format!(
                "flip term must be 0 or 1, got {flip_term}"
            )));
        }
        for (name, v) in [
            ("probability", prob_term),
            ("attribution", att_term),
            ("series", ts_term),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return Err(AsiError::Config(format!(
                    "{name} term must lie in [0, 1], got {v}"
                )));
            }
        }
        Ok(Self {
            flip_term,
            prob_term,
            att_term,
            ts_term,
        })
    }

    pub fn flip_term(&self) -> f64 {
        self.flip_term
    }

    pub fn prob_term(&self) -> f64 {
        self.prob_term
    }

    pub fn att_term(&self) -> f64 {
        self.att_term
    }

    pub fn ts_term(&self) -> f64 {
        self.ts_term
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.flip_term, self.prob_term, self.att_term, self.ts_term]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AsiResult {
    pub components: AsiComponents,
    pub weights: WeightVector,
    pub score: f64,
}

/// Correlation value plus a flag raised when either input had zero variance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Correlation {
    pub value: f64,
    pub degenerate: bool,
}

fn check_lengths(what: &'static str, a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(AsiError::Dimension {
            what,
            expected: a,
            found: b,
        });
    }
    Ok(())
}

/// 1 when both distributions predict the same class, 0 on a class flip.
pub fn binary_flip(p: &PredictionDistribution, q: &PredictionDistribution) -> Result<f64> {
    check_lengths("binary flip", p.len(), q.len())?;
    Ok(if p.predicted_class() == q.predicted_class() {
        1.0
    } else {
        0.0
    })
}

/// Kullback-Leibler divergence `sum p_i log2(p_i / q_i)` in bits.
pub fn kl_divergence(p: &PredictionDistribution, q: &[f64]) -> Result<f64> {
    check_lengths("KL divergence", p.len(), q.len())?;
    let mut terms = Vec::with_capacity(q.len());
    for (i, (&pi, &qi)) in p.probs().iter().zip(q).enumerate() {
        if pi == 0.0 {
            continue;
        }
        if qi <= 0.0 {
            return Err(AsiError::DivergenceUndefined { index: i });
        }
        terms.push(pi * (pi / qi).log2());
    }
    Ok(compensated_sum(terms).max(0.0))
}

// p*log2(p/m) + q*log2(q/m) with m = (p+q)/2, evaluated through ln_1p so the
// first-order terms cancel without losing the second-order remainder.
fn js_term(p: f64, q: f64) -> f64 {
    if p == 0.0 && q == 0.0 {
        0.0
    } else if p == 0.0 {
        q
    } else if q == 0.0 {
        p
    } else {
        let d = (p - q) / (p + q);
        ((p * d.ln_1p() + q * (-d).ln_1p()) / std::f64::consts::LN_2).max(0.0)
    }
}

/// Jensen-Shannon divergence in bits, bounded by 1.
pub fn js_divergence(p: &PredictionDistribution, q: &PredictionDistribution) -> Result<f64> {
    check_lengths("JS divergence", p.len(), q.len())?;
    let total = compensated_sum(
        p.probs()
            .iter()
            .zip(q.probs())
            .map(|(&a, &b)| js_term(a, b)),
    );
    Ok((0.5 * total).clamp(0.0, 1.0))
}

/// Jensen-Shannon distance: square root of the base-2 JS divergence.
pub fn js_distance(p: &PredictionDistribution, q: &PredictionDistribution) -> Result<f64> {
    check_lengths("JS distance", p.len(), q.len())?;
    let identical = p
        .probs()
        .iter()
        .zip(q.probs())
        .all(|(a, b)| (a - b).abs() < IDENTITY_TOLERANCE);
    if identical {
        return Ok(0.0);
    }
    Ok(js_divergence(p, q)?.sqrt())
}

pub fn hellinger_distance(p: &PredictionDistribution, q: &PredictionDistribution) -> Result<f64> {
    check_lengths("Hellinger distance", p.len(), q.len())?;
    let total = compensated_sum(p.probs().iter().zip(q.probs()).map(|(&a, &b)| {
        let d = a.sqrt() - b.sqrt();
        d * d
    }));
    Ok((0.5 * total).sqrt().clamp(0.0, 1.0))
}

fn is_constant(x: &[f64]) -> bool {
    x.iter().all(|v| *v == x[0])
}

/// Pearson correlation coefficient.
///
/// Zero-variance inputs yield `value = 0` with `degenerate = true` instead of
/// an error.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<Correlation> {
    check_lengths("pearson", x.len(), y.len())?;
    if x.len() < 2 {
        return Err(AsiError::InsufficientData {
            needed: 2,
            found: x.len(),
        });
    }
    if is_constant(x) || is_constant(y) {
        return Ok(Correlation {
            value: 0.0,
            degenerate: true,
        });
    }
    let mx = crate::numeric::mean(x);
    let my = crate::numeric::mean(y);
    let cov = compensated_sum(x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)));
    let vx = compensated_sum(x.iter().map(|a| (a - mx) * (a - mx)));
    let vy = compensated_sum(y.iter().map(|b| (b - my) * (b - my)));
    if vx == 0.0 || vy == 0.0 {
        return Ok(Correlation {
            value: 0.0,
            degenerate: true,
        });
    }
    // The n-1 factors of covariance and both deviations cancel. sqrt(v*v)
    // is exactly v, so identical inputs give rho == 1 exactly.
    let prod = vx * vy;
    let denom = if prod.is_normal() {
        prod.sqrt()
    } else {
        vx.sqrt() * vy.sqrt()
    };
    let rho = cov / denom;
    Ok(Correlation {
        value: rho.clamp(-1.0, 1.0),
        degenerate: false,
    })
}

/// Pearson correlation mapped to `[0, 1]` via `(rho + 1) / 2`.
pub fn pcc_norm(x: &[f64], y: &[f64]) -> Result<Correlation> {
    let c = pearson(x, y)?;
    Ok(Correlation {
        value: (c.value + 1.0) / 2.0,
        degenerate: c.degenerate,
    })
}

/// Weighted combination; the divisor is always 4.
pub fn asi_combine(c: AsiComponents, w: WeightVector) -> AsiResult {
    let [w1, w2, w3, w4] = w.as_array();
    let score = (w1 * c.flip_term + w2 * c.prob_term + w3 * c.att_term + w4 * c.ts_term) / 4.0;
    AsiResult {
        components: c,
        weights: w,
        score,
    }
}

/// Distance used for the prediction-probability term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProbabilityDistance {
    #[default]
    JensenShannon,
    Hellinger,
}

impl ProbabilityDistance {
    pub fn distance(&self, p: &PredictionDistribution, q: &PredictionDistribution) -> Result<f64> {
        match self {
            ProbabilityDistance::JensenShannon => js_distance(p, q),
            ProbabilityDistance::Hellinger => hellinger_distance(p, q),
        }
    }
}

impl FromStr for ProbabilityDistance {
    type Err = AsiError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "js" | "jensen_shannon" => Ok(Self::JensenShannon),
            "hellinger" => Ok(Self::Hellinger),
            other => Err(AsiError::Config(format!(
                "unknown distance {other:?} (expected js or hellinger)"
            ))),
        }
    }
}
