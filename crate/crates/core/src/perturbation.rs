//! The perturbation function: pick a relevance threshold from an
//! attribution, expand the selected points into windows, and overwrite them
//! with a substitution value.

use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{AsiError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum ThresholdSpec {
    /// Nearest-rank percentile in `(0, 100]` of the attribution magnitudes.
    Percentile(f64),
    /// Fixed attribution magnitude.
    Absolute(f64),
}

impl ThresholdSpec {
    pub fn percentile(q: f64) -> Result<Self> {
        let spec = ThresholdSpec::Percentile(q);
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            ThresholdSpec::Percentile(q) if !(q > 0.0 && q <= 100.0) => Err(AsiError::Config(
                format!("percentile must lie in (0, 100], got {q}"),
            )),
            ThresholdSpec::Absolute(v) if !v.is_finite() => Err(AsiError::Config(format!(
                "threshold must be finite, got {v}"
            ))),
            _ => Ok(()),
        }
    }
}

impl Default for ThresholdSpec {
    fn default() -> Self {
        ThresholdSpec::Percentile(90.0)
    }
}

/// Whether thresholding looks at `|a_i|` or the raw signed value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MagnitudeMode {
    #[default]
    Absolute,
    Signed,
}

impl MagnitudeMode {
    fn apply(self, v: f64) -> f64 {
        match self {
            MagnitudeMode::Absolute => v.abs(),
            MagnitudeMode::Signed => v,
        }
    }
}

impl FromStr for MagnitudeMode {
    type Err = AsiError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "absolute" => Ok(Self::Absolute),
            "signed" => Ok(Self::Signed),
            other => Err(AsiError::Config(format!(
                "unknown magnitude mode {other:?} (expected absolute or signed)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum Strategy {
    /// Write 0.
    ZeroSub,
    /// Write the dataset maximum.
    GlobalMax,
    /// Write `min - margin * (max - min)`.
    OodLowSub { margin: f64 },
}

impl Strategy {
    pub const DEFAULT_OOD_MARGIN: f64 = 1.0;

    pub fn substitution_value(&self, stats: &DatasetStats) -> f64 {
        match *self {
            Strategy::ZeroSub => 0.0,
            Strategy::GlobalMax => stats.global_max,
            Strategy::OodLowSub { margin } => {
                stats.global_min - margin * (stats.global_max - stats.global_min)
            }
        }
    }

    pub fn id(&self) -> &'static str {
        match self {
            Strategy::ZeroSub => "zero_sub",
            Strategy::GlobalMax => "global_max",
            Strategy::OodLowSub { .. } => "ood_low_sub",
        }
    }

    pub fn parse(name: &str, ood_margin: f64) -> Result<Self> {
        match name {
            "zero_sub" => Ok(Strategy::ZeroSub),
            "global_max" => Ok(Strategy::GlobalMax),
            "ood_low_sub" => {
                if !(ood_margin.is_finite() && ood_margin >= 0.0) {
                    return Err(AsiError::Config(format!(
                        "ood margin must be finite and nonnegative, got {ood_margin}"
                    )));
                }
                Ok(Strategy::OodLowSub { margin: ood_margin })
            }
            other => Err(AsiError::Config(format!(
                "unknown strategy {other:?} (expected zero_sub, global_max or ood_low_sub)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerturbationConfig {
    pub strategy: Strategy,
    pub threshold: ThresholdSpec,
    pub window_radius: usize,
    pub magnitude: MagnitudeMode,
}

impl Default for PerturbationConfig {
    /// Zero substitution of five-point windows around the points at or
    /// above the 90th percentile of `|attribution|`.
    fn default() -> Self {
        Self {
            strategy: Strategy::ZeroSub,
            threshold: ThresholdSpec::default(),
            window_radius: 2,
            magnitude: MagnitudeMode::Absolute,
        }
    }
}

/// Dataset-wide value range used by the substitution strategies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DatasetStats {
    pub global_min: f64,
    pub global_max: f64,
}

impl DatasetStats {
    pub fn new(global_min: f64, global_max: f64) -> Result<Self> {
        if !(global_min.is_finite() && global_max.is_finite()) || global_min > global_max {
            return Err(AsiError::Config(format!(
                "invalid dataset range [{global_min}, {global_max}]"
            )));
        }
        Ok(Self {
            global_min,
            global_max,
        })
    }

    pub fn from_series<'a, I: IntoIterator<Item = &'a [f64]>>(series: I) -> Result<Self> {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for s in series {
            for &v in s {
                lo = lo.min(v);
                hi = hi.max(v);
            }
        }
        if lo > hi {
            return Err(AsiError::EmptyInput("dataset statistics"));
        }
        Self::new(lo, hi)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelevanceMask(Vec<bool>);

impl RelevanceMask {
    pub fn from_flags(flags: Vec<bool>) -> Self {
        Self(flags)
    }

    pub fn flags(&self) -> &[bool] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Number of flagged points.
    pub fn cardinality(&self) -> usize {
        self.0.iter().filter(|f| **f).count()
    }

    pub fn indices(&self) -> Vec<usize> {
        self.0
            .iter()
            .enumerate()
            .filter_map(|(i, f)| f.then_some(i))
            .collect()
    }
}

/// Threshold ξ for one attribution vector.
///
/// Percentiles use the nearest-rank rule: the value at 1-based position
/// `ceil(q/100 * m)` of the ascending sort.
pub fn select_threshold(att: &[f64], spec: ThresholdSpec, mode: MagnitudeMode) -> Result<f64> {
    if att.is_empty() {
        return Err(AsiError::EmptyInput("attribution"));
    }
    spec.validate()?;
    match spec {
        ThresholdSpec::Absolute(v) => Ok(v),
        ThresholdSpec::Percentile(q) => {
            let mut values: Vec<f64> = att.iter().map(|v| mode.apply(*v)).collect();
            values.sort_by(f64::total_cmp);
            let m = values.len();
            let rank = ((q * m as f64) / 100.0).ceil() as usize;
            Ok(values[rank.clamp(1, m) - 1])
        }
    }
}

/// Flags every point within `window_radius` of an attribution whose
/// magnitude reaches `xi`. Windows are clamped at the series ends.
pub fn relevance_mask(
    att: &[f64],
    xi: f64,
    window_radius: usize,
    mode: MagnitudeMode,
) -> RelevanceMask {
    let m = att.len();
    let mut flags = vec![false; m];
    for (j, &a) in att.iter().enumerate() {
        if mode.apply(a) >= xi {
            let lo = j.saturating_sub(window_radius);
            let hi = (j + window_radius).min(m.saturating_sub(1));
            flags[lo..=hi].iter_mut().for_each(|f| *f = true);
        }
    }
    RelevanceMask(flags)
}

/// Replaces masked points with the strategy's substitution value; unmasked
/// points are copied unchanged.
pub fn perturb(
    ts: &[f64],
    mask: &RelevanceMask,
    strategy: Strategy,
    stats: &DatasetStats,
) -> Result<Vec<f64>> {
    if mask.len() != ts.len() {
        return Err(AsiError::Dimension {
            what: "perturbation mask",
            expected: ts.len(),
            found: mask.len(),
        });
    }
    let value = strategy.substitution_value(stats);
    Ok(ts
        .iter()
        .zip(mask.flags())
        .map(|(&v, &f)| if f { value } else { v })
        .collect())
}

/// Threshold, mask and substitute in one go.
pub fn apply(
    ts: &[f64],
    att: &[f64],
    cfg: &PerturbationConfig,
    stats: &DatasetStats,
) -> Result<(Vec<f64>, RelevanceMask, f64)> {
    if att.len() != ts.len() {
        return Err(AsiError::Dimension {
            what: "attribution",
            expected: ts.len(),
            found: att.len(),
        });
    }
    let xi = select_threshold(att, cfg.threshold, cfg.magnitude)?;
    let mask = relevance_mask(att, xi, cfg.window_radius, cfg.magnitude);
    let perturbed = perturb(ts, &mask, cfg.strategy, stats)?;
    Ok((perturbed, mask, xi))
}
