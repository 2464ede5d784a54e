//! Per-sample and dataset-level perturbation analysis.
//!
//! For one series `ts` the pipeline is: attribute, threshold, perturb,
//! predict before and after, attribute the perturbed series, then combine
//! the four terms into a score. Dataset evaluation runs that pipeline for
//! every sample (in parallel when enabled) and aggregates in dataset order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::attribution::{Attribution, AttributionSet, Technique};
use crate::dataset::Dataset;
use crate::error::{AsiError, Result};
use crate::measures::{
    asi_combine, binary_flip, pcc_norm, AsiComponents, AsiResult, PredictionDistribution,
    ProbabilityDistance, WeightVector,
};
use crate::model::ModelParams;
use crate::numeric::compensated_sum;
use crate::parallel::{map_indexed, Parallelism};
use crate::perturbation::{self, DatasetStats, PerturbationConfig, RelevanceMask};

pub const HISTOGRAM_BINS: usize = 40;

/// Which version of a sample a prediction or attribution refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Original,
    Perturbed,
}

pub trait Predictor: Sync {
    fn model_id(&self) -> String;
    fn class_count(&self) -> usize;
    fn predict(
        &self,
        sample: usize,
        stage: Stage,
        series: &[f64],
    ) -> Result<PredictionDistribution>;
}

impl Predictor for ModelParams {
    fn model_id(&self) -> String {
        format!("native:{}", self.fingerprint())
    }

    fn class_count(&self) -> usize {
        ModelParams::class_count(self)
    }

    fn predict(&self, _: usize, _: Stage, series: &[f64]) -> Result<PredictionDistribution> {
        self.predict_proba(series)
    }
}

/// Predictions produced elsewhere for the original and perturbed datasets.
#[derive(Debug, Clone)]
pub struct ExternalPredictions {
    pub id: String,
    pub original: Vec<PredictionDistribution>,
    pub perturbed: Option<Vec<PredictionDistribution>>,
}

impl Predictor for ExternalPredictions {
    fn model_id(&self) -> String {
        format!("external:{}", self.id)
    }

    fn class_count(&self) -> usize {
        self.original.first().map_or(0, PredictionDistribution::len)
    }

    fn predict(&self, sample: usize, stage: Stage, _: &[f64]) -> Result<PredictionDistribution> {
        let rows = match stage {
            Stage::Original => &self.original,
            Stage::Perturbed => self.perturbed.as_ref().ok_or_else(|| {
                AsiError::UnsupportedSource("no predictions for the perturbed dataset".into())
            })?,
        };
        rows.get(sample).cloned().ok_or(AsiError::Dimension {
            what: "external predictions",
            expected: sample + 1,
            found: rows.len(),
        })
    }
}

pub trait AttributionSource: Sync {
    fn technique_id(&self) -> String;
    fn attribute(&self, sample: usize, stage: Stage, series: &[f64]) -> Result<Attribution>;
}

/// A native technique evaluated on the built-in model.
#[derive(Debug, Clone, Copy)]
pub struct NativeAttribution<'a> {
    pub params: &'a ModelParams,
    pub technique: Technique,
}

impl AttributionSource for NativeAttribution<'_> {
    fn technique_id(&self) -> String {
        self.technique.id().to_owned()
    }

    fn attribute(&self, _: usize, _: Stage, series: &[f64]) -> Result<Attribution> {
        self.technique.attribute(self.params, series)
    }
}

/// Attributions loaded from interchange files. The perturbed set must have
/// been computed on the output of the same perturbation configuration.
#[derive(Debug, Clone)]
pub struct ExternalAttributions {
    pub original: AttributionSet,
    pub perturbed: Option<AttributionSet>,
}

impl AttributionSource for ExternalAttributions {
    fn technique_id(&self) -> String {
        self.original.technique_id().to_owned()
    }

    fn attribute(&self, sample: usize, stage: Stage, series: &[f64]) -> Result<Attribution> {
        let set = match stage {
            Stage::Original => &self.original,
            Stage::Perturbed => self.perturbed.as_ref().ok_or_else(|| {
                AsiError::UnsupportedSource(
                    "external source has no attributions for the perturbed dataset".into(),
                )
            })?,
        };
        if sample >= set.len() {
            return Err(AsiError::Dimension {
                what: "external attributions",
                expected: sample + 1,
                found: set.len(),
            });
        }
        if set.series_len() != series.len() {
            return Err(AsiError::Dimension {
                what: "external attribution length",
                expected: series.len(),
                found: set.series_len(),
            });
        }
        Ok(set.get(sample))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct EvaluationConfig {
    pub perturbation: PerturbationConfig,
    pub weights: WeightVector,
    pub distance: ProbabilityDistance,
}

/// Zero-variance inputs met while computing the correlation terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct DegenerateFlags {
    pub attribution: bool,
    pub series: bool,
}

impl DegenerateFlags {
    pub fn any(&self) -> bool {
        self.attribution || self.series
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleEvaluation {
    pub sample_index: usize,
    pub original_series: Vec<f64>,
    pub perturbed_series: Vec<f64>,
    pub original_prediction: PredictionDistribution,
    pub perturbed_prediction: PredictionDistribution,
    pub original_attribution: Vec<f64>,
    pub perturbed_attribution: Vec<f64>,
    pub threshold: f64,
    pub perturbed_points: usize,
    pub asi: AsiResult,
    pub degenerate: DegenerateFlags,
}

fn components(
    ts: &[f64],
    ts_pert: &[f64],
    p: &PredictionDistribution,
    p_pert: &PredictionDistribution,
    att: &[f64],
    att_pert: &[f64],
    distance: ProbabilityDistance,
) -> Result<(AsiComponents, DegenerateFlags)> {
    let flip = binary_flip(p, p_pert)?;
    let prob = 1.0 - distance.distance(p, p_pert)?;
    let att_corr = pcc_norm(att, att_pert)?;
    let ts_corr = pcc_norm(ts, ts_pert)?;
    let c = AsiComponents::new(flip, prob, att_corr.value, 1.0 - ts_corr.value)?;
    Ok((
        c,
        DegenerateFlags {
            attribution: att_corr.degenerate,
            series: ts_corr.degenerate,
        },
    ))
}

impl SampleEvaluation {
    pub fn flipped(&self) -> bool {
        self.asi.components.flip_term() == 0.0
    }

    /// Recomputes the score from the stored fields.
    pub fn recompute(&self, distance: ProbabilityDistance) -> Result<AsiResult> {
        let (c, _) = components(
            &self.original_series,
            &self.perturbed_series,
            &self.original_prediction,
            &self.perturbed_prediction,
            &self.original_attribution,
            &self.perturbed_attribution,
            distance,
        )?;
        Ok(asi_combine(c, self.asi.weights))
    }
}

pub fn evaluate_sample(
    predictor: &dyn Predictor,
    source: &dyn AttributionSource,
    sample_index: usize,
    ts: &[f64],
    cfg: &EvaluationConfig,
    stats: &DatasetStats,
) -> Result<SampleEvaluation> {
    let att = source.attribute(sample_index, Stage::Original, ts)?;
    let (ts_pert, mask, xi) = perturbation::apply(ts, &att.values, &cfg.perturbation, stats)?;
    let p = predictor.predict(sample_index, Stage::Original, ts)?;
    let p_pert = predictor.predict(sample_index, Stage::Perturbed, &ts_pert)?;
    let att_pert = source.attribute(sample_index, Stage::Perturbed, &ts_pert)?;
    let (c, degenerate) = components(
        ts,
        &ts_pert,
        &p,
        &p_pert,
        &att.values,
        &att_pert.values,
        cfg.distance,
    )?;
    Ok(SampleEvaluation {
        sample_index,
        original_series: ts.to_vec(),
        perturbed_series: ts_pert,
        original_prediction: p,
        perturbed_prediction: p_pert,
        original_attribution: att.values,
        perturbed_attribution: att_pert.values,
        threshold: xi,
        perturbed_points: mask.cardinality(),
        asi: asi_combine(c, cfg.weights),
        degenerate,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianityDiagnostic {
    #[serde(with = "crate::serde_float")]
    pub skewness: f64,
    #[serde(with = "crate::serde_float")]
    pub excess_kurtosis: f64,
    /// `|skewness| + |excess kurtosis|`; lower is closer to Gaussian.
    #[serde(with = "crate::serde_float")]
    pub gaussianity_index: f64,
    pub undefined_moments: bool,
}

/// Moment-based shape statistics (`g1`, `g2`) of a score distribution.
pub fn gaussianity_diagnostic(scores: &[f64]) -> Result<GaussianityDiagnostic> {
    if scores.len() < 3 {
        return Err(AsiError::InsufficientData {
            needed: 3,
            found: scores.len(),
        });
    }
    let n = scores.len() as f64;
    let mean = compensated_sum(scores.iter().copied()) / n;
    let moment = |k: i32| compensated_sum(scores.iter().map(|x| (x - mean).powi(k))) / n;
    let m2 = moment(2);
    if scores.iter().all(|x| *x == scores[0]) || m2 == 0.0 {
        return Ok(GaussianityDiagnostic {
            skewness: f64::NAN,
            excess_kurtosis: f64::NAN,
            gaussianity_index: f64::INFINITY,
            undefined_moments: true,
        });
    }
    let skewness = moment(3) / m2.powf(1.5);
    let excess_kurtosis = moment(4) / (m2 * m2) - 3.0;
    Ok(GaussianityDiagnostic {
        skewness,
        excess_kurtosis,
        gaussianity_index: skewness.abs() + excess_kurtosis.abs(),
        undefined_moments: false,
    })
}

/// Equal-width bins over `[lo, hi]`; the last bin is closed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub counts: Vec<usize>,
}

impl Histogram {
    pub fn build(values: &[f64], lo: f64, hi: f64, bins: usize) -> Self {
        let width = (hi - lo) / bins as f64;
        let mut edges: Vec<f64> = (0..bins).map(|i| lo + i as f64 * width).collect();
        edges.push(hi);
        let mut counts = vec![0; bins];
        for &v in values {
            let idx = if width > 0.0 {
                (((v - lo) / width).floor().max(0.0) as usize).min(bins - 1)
            } else {
                0
            };
            counts[idx] += 1;
        }
        Self { edges, counts }
    }

    pub fn bins(&self) -> usize {
        self.counts.len()
    }
}

/// Identity of what was evaluated; comparisons require these to match.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationContext {
    pub dataset_fingerprint: String,
    pub model_id: String,
    pub config: EvaluationConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationSummary {
    pub technique_id: String,
    pub context: EvaluationContext,
    pub samples: usize,
    pub flip_count: usize,
    pub degenerate_count: usize,
    pub asi_mean: f64,
    pub asi_std: f64,
    /// Mean of each unweighted component.
    pub component_means: [f64; 4],
    pub mean_perturbed_points: f64,
    pub gaussianity: Option<GaussianityDiagnostic>,
    pub histogram: Histogram,
}

impl EvaluationSummary {
    pub fn flip_rate(&self) -> f64 {
        self.flip_count as f64 / self.samples as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetEvaluation {
    pub summary: EvaluationSummary,
    pub samples: Vec<SampleEvaluation>,
}

impl DatasetEvaluation {
    pub fn scores(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.asi.score).collect()
    }
}

fn summarize(
    technique_id: String,
    context: EvaluationContext,
    samples: &[SampleEvaluation],
) -> Result<EvaluationSummary> {
    let n = samples.len();
    let scores: Vec<f64> = samples.iter().map(|s| s.asi.score).collect();
    let asi_mean = compensated_sum(scores.iter().copied()) / n as f64;
    let asi_std = if scores.iter().all(|s| *s == scores[0]) {
        0.0
    } else {
        (compensated_sum(scores.iter().map(|s| (s - asi_mean).powi(2))) / n as f64).sqrt()
    };
    let mut component_means = [0.0; 4];
    for (k, slot) in component_means.iter_mut().enumerate() {
        *slot = compensated_sum(samples.iter().map(|s| s.asi.components.as_array()[k])) / n as f64;
    }
    let gaussianity = if n >= 3 {
        Some(gaussianity_diagnostic(&scores)?)
    } else {
        None
    };
    let max = context.config.weights.max_score();
    Ok(EvaluationSummary {
        technique_id,
        samples: n,
        flip_count: samples.iter().filter(|s| s.flipped()).count(),
        degenerate_count: samples.iter().filter(|s| s.degenerate.any()).count(),
        asi_mean,
        asi_std,
        component_means,
        mean_perturbed_points: samples
            .iter()
            .map(|s| s.perturbed_points as f64)
            .sum::<f64>()
            / n as f64,
        gaussianity,
        histogram: Histogram::build(&scores, 0.0, max, HISTOGRAM_BINS),
        context,
    })
}

/// Evaluates every sample of `dataset`. Output is independent of `mode`.
pub fn evaluate_dataset(
    predictor: &dyn Predictor,
    source: &dyn AttributionSource,
    dataset: &Dataset,
    cfg: &EvaluationConfig,
    mode: Parallelism,
) -> Result<DatasetEvaluation> {
    if dataset.is_empty() {
        return Err(AsiError::EmptyInput("dataset"));
    }
    let stats = *dataset.stats();
    let samples = map_indexed(dataset.len(), mode, |i| {
        evaluate_sample(predictor, source, i, dataset.sample(i), cfg, &stats)
    })?;
    let context = EvaluationContext {
        dataset_fingerprint: dataset.fingerprint(),
        model_id: predictor.model_id(),
        config: *cfg,
    };
    let summary = summarize(source.technique_id(), context, &samples)?;
    Ok(DatasetEvaluation { summary, samples })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub rank: usize,
    pub technique_id: String,
    pub asi_mean: f64,
    pub asi_std: f64,
    pub flip_count: usize,
    pub samples: usize,
    pub degenerate_count: usize,
    pub gaussianity: Option<GaussianityDiagnostic>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub context: EvaluationContext,
    pub rows: Vec<ComparisonRow>,
}

/// Ranks techniques by ascending mean score; ties go to the larger flip
/// count, then to the technique id.
pub fn compare_techniques(summaries: &[&EvaluationSummary]) -> Result<Comparison> {
    let first = summaries
        .first()
        .ok_or(AsiError::EmptyInput("technique comparison"))?;
    for s in &summaries[1..] {
        if s.context != first.context || s.samples != first.samples {
            return Err(AsiError::IncompatibleComparison(format!(
                "{} and {} were evaluated on different datasets, models or configurations",
                first.technique_id, s.technique_id
            )));
        }
    }
    let mut sorted: Vec<&EvaluationSummary> = summaries.to_vec();
    sorted.sort_by(|a, b| {
        a.asi_mean
            .total_cmp(&b.asi_mean)
            .then(b.flip_count.cmp(&a.flip_count))
            .then(a.technique_id.cmp(&b.technique_id))
    });
    Ok(Comparison {
        context: first.context.clone(),
        rows: sorted
            .into_iter()
            .enumerate()
            .map(|(i, s)| ComparisonRow {
                rank: i + 1,
                technique_id: s.technique_id.clone(),
                asi_mean: s.asi_mean,
                asi_std: s.asi_std,
                flip_count: s.flip_count,
                samples: s.samples,
                degenerate_count: s.degenerate_count,
                gaussianity: s.gaussianity,
            })
            .collect(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QualityMetricReport {
    pub accuracy_clean: f64,
    pub accuracy_attr_perturbed: f64,
    pub accuracy_random_perturbed: f64,
    pub mean_perturbed_points: f64,
    pub trials: usize,
    pub seed: u64,
}

/// Random mask with exactly `k` flagged points, drawn from a stream keyed by
/// `(seed, trial, sample)` so results do not depend on scheduling.
pub fn random_mask(m: usize, k: usize, seed: u64, trial: usize, sample: usize) -> RelevanceMask {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((trial as u64) << 32) ^ sample as u64);
    let mut flags = vec![false; m];
    for i in rand::seq::index::sample(&mut rng, m, k.min(m)) {
        flags[i] = true;
    }
    RelevanceMask::from_flags(flags)
}

/// Accuracy on clean data, on data perturbed where the attribution points,
/// and on data perturbed at random masks of the same per-sample size.
pub fn quality_metric_check(
    model: &ModelParams,
    dataset: &Dataset,
    cfg: &PerturbationConfig,
    source: &dyn AttributionSource,
    trials: usize,
    seed: u64,
    mode: Parallelism,
) -> Result<QualityMetricReport> {
    if trials == 0 {
        return Err(AsiError::Config(
            "quality check needs at least 1 trial".into(),
        ));
    }
    if dataset.is_empty() {
        return Err(AsiError::EmptyInput("dataset"));
    }
    let stats = *dataset.stats();
    let m = dataset.series_len();
    // (clean correct, attribution-perturbed correct, random correct count, mask size)
    let rows = map_indexed(dataset.len(), mode, |i| {
        let ts = dataset.sample(i);
        let label = dataset.label(i);
        let att = source.attribute(i, Stage::Original, ts)?;
        let (pert, mask, _) = perturbation::apply(ts, &att.values, cfg, &stats)?;
        let k = mask.cardinality();
        let clean = model.predict_class(ts)? == label;
        let attr = model.predict_class(&pert)? == label;
        let mut random = 0usize;
        for t in 0..trials {
            let rmask = random_mask(m, k, seed, t, i);
            let rpert = perturbation::perturb(ts, &rmask, cfg.strategy, &stats)?;
            if model.predict_class(&rpert)? == label {
                random += 1;
            }
        }
        Ok((clean, attr, random, k))
    })?;
    let n = dataset.len() as f64;
    let count = |f: fn(&(bool, bool, usize, usize)) -> bool| rows.iter().filter(|r| f(r)).count();
    Ok(QualityMetricReport {
        accuracy_clean: count(|r| r.0) as f64 / n,
        accuracy_attr_perturbed: count(|r| r.1) as f64 / n,
        accuracy_random_perturbed: rows.iter().map(|r| r.2).sum::<usize>() as f64
            / (n * trials as f64),
        mean_perturbed_points: rows.iter().map(|r| r.3).sum::<usize>() as f64 / n,
        trials,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::DenseLayer;
    use crate::perturbation::{Strategy, ThresholdSpec};
    use rand_distr::{Distribution, StandardNormal};

    fn model() -> ModelParams {
        ModelParams::from_layers(vec![
            DenseLayer {
                inputs: 4,
                outputs: 3,
                weights: vec![
                    1.0, -0.5, 0.3, 0.2, -0.7, 0.9, 0.1, 0.4, 0.2, 0.2, -1.0, 0.8,
                ],
                bias: vec![0.1, 0.0, -0.1],
            },
            DenseLayer {
                inputs: 3,
                outputs: 2,
                weights: vec![1.2, -0.6, 0.5, -0.9, 0.8, -0.2],
                bias: vec![0.0, 0.05],
            },
        ])
        .unwrap()
    }

    fn data() -> Dataset {
        Dataset::new(
            vec![
                vec![1.0, 2.0, -1.0, 0.5],
                vec![-1.0, 0.3, 2.0, 1.5],
                vec![0.2, -0.4, 0.9, -2.0],
                vec![2.5, 1.0, 0.0, -0.5],
            ],
            vec![0, 1, 1, 0],
            2,
        )
        .unwrap()
    }

    fn identity_cfg(weights: WeightVector) -> EvaluationConfig {
        EvaluationConfig {
            perturbation: PerturbationConfig {
                threshold: ThresholdSpec::Absolute(1e9),
                ..PerturbationConfig::default()
            },
            weights,
            distance: ProbabilityDistance::JensenShannon,
        }
    }

    #[test]
    fn identity_perturbation_components() {
        let m = model();
        let d = data();
        let src = NativeAttribution {
            params: &m,
            technique: Technique::Saliency,
        };
        let w = WeightVector::new([0.7, 1.3, 0.2, 2.0]).unwrap();
        let e = evaluate_sample(&m, &src, 0, d.sample(0), &identity_cfg(w), d.stats()).unwrap();
        assert_eq!(e.perturbed_series, e.original_series);
        assert_eq!(e.perturbed_points, 0);
        // An untouched series correlates perfectly with itself, so the
        // series term is 1 - 1 = 0 while the other three are maximal.
        assert_eq!(e.asi.components.as_array(), [1.0, 1.0, 1.0, 0.0]);
        assert!((e.asi.score - (0.7 + 1.3 + 0.2) / 4.0).abs() < 1e-15);
    }

    #[test]
    fn raw_weights_count_flips() {
        let m = model();
        let d = data();
        let src = NativeAttribution {
            params: &m,
            technique: Technique::Gradient,
        };
        let cfg = EvaluationConfig {
            perturbation: PerturbationConfig {
                threshold: ThresholdSpec::Percentile(50.0),
                window_radius: 0,
                strategy: Strategy::GlobalMax,
                ..PerturbationConfig::default()
            },
            weights: WeightVector::RAW,
            distance: ProbabilityDistance::JensenShannon,
        };
        let e = evaluate_dataset(&m, &src, &d, &cfg, Parallelism::Serial).unwrap();
        for s in &e.samples {
            assert_eq!(s.asi.score, s.asi.components.flip_term() / 4.0);
        }
        let n = d.len() as f64;
        let expected = (n - e.summary.flip_count as f64) / (4.0 * n);
        assert!((e.summary.asi_mean - expected).abs() < 1e-12);
    }

    #[test]
    fn stored_fields_reproduce_score() {
        let m = model();
        let d = data();
        let src = NativeAttribution {
            params: &m,
            technique: Technique::IntegratedGradients { steps: 8 },
        };
        let cfg = EvaluationConfig::default();
        let e = evaluate_dataset(&m, &src, &d, &cfg, Parallelism::Serial).unwrap();
        for s in &e.samples {
            assert_eq!(s.recompute(cfg.distance).unwrap(), s.asi);
        }
    }

    #[test]
    fn identical_samples_have_zero_spread() {
        let m = model();
        let row = vec![0.4, -1.1, 0.7, 2.0];
        let d = Dataset::new(vec![row.clone(); 5], vec![0; 5], 2).unwrap();
        let src = NativeAttribution {
            params: &m,
            technique: Technique::Saliency,
        };
        let e = evaluate_dataset(
            &m,
            &src,
            &d,
            &EvaluationConfig::default(),
            Parallelism::Auto,
        )
        .unwrap();
        assert_eq!(e.summary.asi_std, 0.0);
        assert!(e.summary.gaussianity.unwrap().undefined_moments);
    }

    #[test]
    fn external_source_without_perturbed_set_is_rejected() {
        let m = model();
        let d = data();
        let set = AttributionSet::new("deeplift", d.samples().to_vec()).unwrap();
        let src = ExternalAttributions {
            original: set,
            perturbed: None,
        };
        let err = evaluate_sample(
            &m,
            &src,
            0,
            d.sample(0),
            &EvaluationConfig::default(),
            d.stats(),
        )
        .unwrap_err();
        assert!(matches!(err, AsiError::UnsupportedSource(_)));
    }

    #[test]
    fn histogram_spans_weight_range() {
        let h = Histogram::build(&[0.0, 0.3, 1.25, 1.0], 0.0, 1.25, HISTOGRAM_BINS);
        assert_eq!(h.bins(), 40);
        assert_eq!(h.edges.len(), 41);
        assert_eq!(h.edges[40], 1.25);
        assert_eq!(h.counts.iter().sum::<usize>(), 4);
        assert_eq!(h.counts[39], 1);
        assert_eq!(h.counts[0], 1);
    }

    #[test]
    fn gaussianity_examples() {
        let two_point: Vec<f64> = (0..100).map(|i| (i % 2) as f64).collect();
        let g = gaussianity_diagnostic(&two_point).unwrap();
        assert!(g.skewness.abs() < 1e-12);
        // A symmetric two-point mass has kurtosis 1, i.e. excess -2.
        assert!((g.excess_kurtosis + 2.0).abs() < 1e-12);

        let flat = gaussianity_diagnostic(&[0.3; 10]).unwrap();
        assert!(flat.undefined_moments);
        assert_eq!(flat.gaussianity_index, f64::INFINITY);

        assert!(gaussianity_diagnostic(&[1.0, 2.0]).is_err());

        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let draws: Vec<f64> = (0..10_000)
            .map(|_| StandardNormal.sample(&mut rng))
            .collect();
        let g = gaussianity_diagnostic(&draws).unwrap();
        assert!(g.skewness.abs() < 0.1, "skewness {}", g.skewness);
        assert!(
            g.excess_kurtosis.abs() < 0.2,
            "kurtosis {}",
            g.excess_kurtosis
        );
    }

    fn summary(id: &str, mean: f64, flips: usize) -> EvaluationSummary {
        EvaluationSummary {
            technique_id: id.into(),
            context: EvaluationContext {
                dataset_fingerprint: "d".into(),
                model_id: "m".into(),
                config: EvaluationConfig::default(),
            },
            samples: 10,
            flip_count: flips,
            degenerate_count: 0,
            asi_mean: mean,
            asi_std: 0.1,
            component_means: [0.0; 4],
            mean_perturbed_points: 0.0,
            gaussianity: None,
            histogram: Histogram::build(&[], 0.0, 1.25, HISTOGRAM_BINS),
        }
    }

    #[test]
    fn comparison_ordering() {
        let a = summary("a", 0.4, 3);
        let single = compare_techniques(&[&a]).unwrap();
        assert_eq!(single.rows.len(), 1);

        let b = summary("b", 0.4, 5);
        let c = summary("c", 0.2, 1);
        let d = summary("d", 0.4, 5);
        let table = compare_techniques(&[&a, &b, &c, &d]).unwrap();
        let order: Vec<&str> = table.rows.iter().map(|r| r.technique_id.as_str()).collect();
        assert_eq!(order, vec!["c", "b", "d", "a"]);
        assert_eq!(table.rows[0].rank, 1);

        let mut other = summary("e", 0.1, 0);
        other.context.model_id = "other".into();
        assert!(matches!(
            compare_techniques(&[&a, &other]),
            Err(AsiError::IncompatibleComparison(_))
        ));
    }

    #[test]
    fn quality_check_identity_and_untrained() {
        let m = model();
        let d = data();
        let src = NativeAttribution {
            params: &m,
            technique: Technique::Saliency,
        };
        let cfg = identity_cfg(WeightVector::DEFAULT).perturbation;
        let r = quality_metric_check(&m, &d, &cfg, &src, 3, 1, Parallelism::Serial).unwrap();
        assert_eq!(r.accuracy_clean, r.accuracy_attr_perturbed);
        assert_eq!(r.accuracy_clean, r.accuracy_random_perturbed);

        // Zero weights predict uniformly, which resolves to class 0: chance
        // level on this balanced set.
        let zero = ModelParams::zeros(&[4, 3, 2]).unwrap();
        let zsrc = NativeAttribution {
            params: &zero,
            technique: Technique::Saliency,
        };
        let r = quality_metric_check(
            &zero,
            &d,
            &PerturbationConfig::default(),
            &zsrc,
            2,
            1,
            Parallelism::Serial,
        )
        .unwrap();
        assert_eq!(
            (
                r.accuracy_clean,
                r.accuracy_attr_perturbed,
                r.accuracy_random_perturbed
            ),
            (0.5, 0.5, 0.5)
        );
        assert!(quality_metric_check(&m, &d, &cfg, &src, 0, 1, Parallelism::Serial).is_err());
    }

    #[test]
    fn random_mask_has_requested_size() {
        let a = random_mask(96, 17, 5, 0, 3);
        assert_eq!(a.cardinality(), 17);
        assert_eq!(a, random_mask(96, 17, 5, 0, 3));
        assert_ne!(a, random_mask(96, 17, 5, 1, 3));
    }
}
