//! Perturbation-based evaluation of time-series attributions.
//!
//! The crate computes the Attribution Stability Indicator (ASI) for single
//! samples and whole datasets. It ships a small dense classifier with exact
//! input gradients (for saliency and integrated gradients), reads and writes
//! an interchange format for attributions and predictions produced by other
//! tools, projects attribution sets with PCA, and renders SVG reports.

pub mod attribution;
pub mod cli;
pub mod dataset;
pub mod error;
pub mod evaluation;
pub mod io;
pub mod measures;
pub mod model;
pub mod numeric;
pub mod parallel;
pub mod perturbation;
pub mod projection;
pub mod synthetic;

mod serde_float;

pub use attribution::{Attribution, AttributionSet, Technique};
pub use dataset::Dataset;
pub use error::{AsiError, Result};
pub use evaluation::{evaluate_dataset, evaluate_sample, EvaluationConfig};
pub use measures::{AsiComponents, AsiResult, PredictionDistribution, WeightVector};
pub use model::{ModelParams, TrainConfig};
pub use parallel::Parallelism;
pub use perturbation::{PerturbationConfig, Strategy, ThresholdSpec};
