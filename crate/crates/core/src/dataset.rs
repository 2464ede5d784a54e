use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{AsiError, Result};
use crate::perturbation::DatasetStats;

/// Labelled univariate time series of uniform length.
///
/// Labels are contiguous class indices `0..class_count`; `label_values`
/// keeps the original label for each index (ascending order).
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    samples: Vec<Vec<f64>>,
    labels: Vec<usize>,
    label_values: Vec<f64>,
    stats: DatasetStats,
}

/// Shape and identity of a dataset, as recorded in manifests.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetInfo {
    pub fingerprint: String,
    pub samples: usize,
    pub series_len: usize,
    pub class_count: usize,
    pub label_values: Vec<f64>,
    pub stats: DatasetStats,
}

impl Dataset {
    /// Builds a dataset whose original labels are the class indices.
    pub fn new(samples: Vec<Vec<f64>>, labels: Vec<usize>, class_count: usize) -> Result<Self> {
        let label_values = (0..class_count).map(|c| c as f64).collect();
        Self::with_label_values(samples, labels, label_values)
    }

    pub fn with_label_values(
        samples: Vec<Vec<f64>>,
        labels: Vec<usize>,
        label_values: Vec<f64>,
    ) -> Result<Self> {
        if samples.is_empty() {
            return Err(AsiError::EmptyInput("dataset"));
        }
        if labels.len() != samples.len() {
            return Err(AsiError::Dimension {
                what: "dataset labels",
                expected: samples.len(),
                found: labels.len(),
            });
        }
        let m = samples[0].len();
        if m == 0 {
            return Err(AsiError::EmptyInput("time series"));
        }
        for (row, s) in samples.iter().enumerate() {
            if s.len() != m {
                return Err(AsiError::Dimension {
                    what: "series length",
                    expected: m,
                    found: s.len(),
                });
            }
            if let Some(col) = s.iter().position(|v| !v.is_finite()) {
                return Err(AsiError::NonFinite {
                    what: "series value",
                    row,
                    col,
                });
            }
        }
        let class_count = label_values.len();
        if let Some(&bad) = labels.iter().find(|l| **l >= class_count) {
            return Err(AsiError::ClassIndex {
                index: bad,
                classes: class_count,
            });
        }
        let stats = DatasetStats::from_series(samples.iter().map(Vec::as_slice))?;
        Ok(Self {
            samples,
            labels,
            label_values,
            stats,
        })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn series_len(&self) -> usize {
        self.samples[0].len()
    }

    pub fn class_count(&self) -> usize {
        self.label_values.len()
    }

    pub fn sample(&self, i: usize) -> &[f64] {
        &self.samples[i]
    }

    pub fn samples(&self) -> &[Vec<f64>] {
        &self.samples
    }

    pub fn label(&self, i: usize) -> usize {
        self.labels[i]
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn label_values(&self) -> &[f64] {
        &self.label_values
    }

    pub fn stats(&self) -> &DatasetStats {
        &self.stats
    }

    /// Same labels, new series values (e.g. a perturbed copy).
    pub fn with_samples(&self, samples: Vec<Vec<f64>>) -> Result<Self> {
        Self::with_label_values(samples, self.labels.clone(), self.label_values.clone())
    }

    /// SHA-256 over the label values and the bit patterns of every sample.
    pub fn fingerprint(&self) -> String {
        let mut h = Sha256::new();
        h.update((self.len() as u64).to_le_bytes());
        h.update((self.series_len() as u64).to_le_bytes());
        for (s, &l) in self.samples.iter().zip(&self.labels) {
            h.update(self.label_values[l].to_bits().to_le_bytes());
            for v in s {
                h.update(v.to_bits().to_le_bytes());
            }
        }
        hex::encode(h.finalize())
    }

    pub fn info(&self) -> DatasetInfo {
        DatasetInfo {
            fingerprint: self.fingerprint(),
            samples: self.len(),
            series_len: self.series_len(),
            class_count: self.class_count(),
            label_values: self.label_values.clone(),
            stats: self.stats,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_inconsistent_input() {
        assert!(Dataset::new(vec![], vec![], 2).is_err());
        assert!(Dataset::new(vec![vec![1.0, 2.0], vec![1.0]], vec![0, 1], 2).is_err());
        assert!(Dataset::new(vec![vec![1.0]], vec![2], 2).is_err());
        assert!(Dataset::new(vec![vec![f64::NAN]], vec![0], 2).is_err());
    }

    #[test]
    fn stats_and_fingerprint() {
        let d = Dataset::new(vec![vec![1.0, -3.0], vec![4.0, 0.5]], vec![0, 1], 2).unwrap();
        assert_eq!(d.stats().global_min, -3.0);
        assert_eq!(d.stats().global_max, 4.0);
        let e = d
            .with_samples(vec![vec![1.0, -3.0], vec![4.0, 0.25]])
            .unwrap();
        assert_ne!(d.fingerprint(), e.fingerprint());
        assert_eq!(d.fingerprint(), d.clone().fingerprint());
    }
}
