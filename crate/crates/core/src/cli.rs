//! The `asi` command-line interface.
//!
//! Exit codes: 0 on success, 1 for usage and validation errors, 2 when a file
//! cannot be read or written.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::attribution::{AttributionSet, Technique};
use crate::dataset::Dataset;
use crate::error::{AsiError, Result};
use crate::evaluation::{
    compare_techniques, evaluate_dataset, quality_metric_check, AttributionSource,
    DatasetEvaluation, EvaluationConfig, EvaluationSummary, ExternalAttributions,
    ExternalPredictions, NativeAttribution, Predictor,
};
use crate::io::checkpoint::{read_checkpoint, write_checkpoint};
use crate::io::interchange::{self, Kind};
use crate::io::manifest::{current_unix_time, FileRef, ModelRef, RunManifest};
use crate::io::report::{
    read_summary, render_report, ProjectionSummary, ProjectionView, ReportOptions,
};
use crate::io::svg;
use crate::io::ucr::{load_ucr, write_ucr, Delimiter};
use crate::measures::{ProbabilityDistance, WeightVector};
use crate::model::{accuracy, train_with_history, ModelParams, TrainConfig};
use crate::numeric::format_f64;
use crate::parallel::{map_indexed, Parallelism};
use crate::perturbation::{self, MagnitudeMode, PerturbationConfig, Strategy, ThresholdSpec};
use crate::projection::{cluster_separation, project_attributions};
use crate::synthetic::{bump_dataset, BumpConfig};

const PERCENTILE_HELP: &str = "Percentile of attribution magnitudes used as the threshold. \
Nearest-rank convention: the value at 1-based position ceil(q/100*m) of the ascending sort";

#[derive(Parser, Debug)]
#[command(
    name = "asi",
    version,
    about = "Attribution Stability Indicator for time-series classifiers"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a seeded two-class bump dataset.
    Synth(SynthArgs),
    /// Train the built-in classifier and write a checkpoint.
    Train(TrainArgs),
    /// Compute native attributions and write an interchange file.
    Attribute(AttributeArgs),
    /// Write the model's class probabilities as an interchange file.
    Predict(PredictArgs),
    /// Apply the attribution-guided perturbation to a dataset.
    Perturb(PerturbArgs),
    /// Score techniques over a dataset and render a report.
    Evaluate(EvaluateArgs),
    /// Project attributions onto two principal components.
    Project(ProjectArgs),
    /// Rank the techniques found in one or more report summaries.
    Compare(CompareArgs),
    /// Compare accuracy under attribution-guided and random perturbation.
    CheckQm(CheckQmArgs),
}

#[derive(Args, Debug)]
struct DataArgs {
    /// UCR-style dataset: label first, then the series values.
    #[arg(long)]
    data: PathBuf,
    /// Field separator of the dataset file: tab or comma.
    #[arg(long, default_value = "tab")]
    delimiter: String,
}

impl DataArgs {
    fn load(&self) -> Result<Dataset> {
        load_ucr(&self.data, self.delimiter.parse()?)
    }
}

#[derive(Args, Debug)]
struct PerturbArgsCommon {
    /// zero_sub, global_max or ood_low_sub.
    #[arg(long, default_value = "zero_sub")]
    strategy: String,
    /// Margin for ood_low_sub, as a multiple of the dataset range.
    #[arg(long, default_value_t = Strategy::DEFAULT_OOD_MARGIN)]
    ood_margin: f64,
    #[arg(long, help = PERCENTILE_HELP, conflicts_with = "threshold")]
    percentile: Option<f64>,
    /// Fixed magnitude threshold instead of a percentile.
    #[arg(long)]
    threshold: Option<f64>,
    /// Points on each side of a relevant point that are perturbed too.
    #[arg(long, default_value_t = 2)]
    window_radius: usize,
    /// Rank attributions by absolute or signed value.
    #[arg(long, default_value = "absolute")]
    magnitude: String,
}

impl PerturbArgsCommon {
    fn config(&self) -> Result<PerturbationConfig> {
        let threshold = match (self.percentile, self.threshold) {
            (_, Some(t)) => ThresholdSpec::Absolute(t),
            (Some(q), None) => ThresholdSpec::percentile(q)?,
            (None, None) => ThresholdSpec::default(),
        };
        threshold.validate()?;
        Ok(PerturbationConfig {
            strategy: Strategy::parse(&self.strategy, self.ood_margin)?,
            threshold,
            window_radius: self.window_radius,
            magnitude: self.magnitude.parse::<MagnitudeMode>()?,
        })
    }
}

#[derive(Args, Debug)]
struct SynthArgs {
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 500)]
    samples: usize,
    #[arg(long, default_value_t = 96)]
    length: usize,
    #[arg(long, default_value_t = 2.0)]
    amplitude: f64,
    #[arg(long, default_value_t = 2.5)]
    width: f64,
    #[arg(long, default_value_t = 0.3)]
    noise_std: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "tab")]
    delimiter: String,
}

#[derive(Args, Debug)]
struct TrainArgs {
    #[command(flatten)]
    data: DataArgs,
    /// Checkpoint to write.
    #[arg(long)]
    out: PathBuf,
    /// Held-out dataset to report accuracy on.
    #[arg(long)]
    test: Option<PathBuf>,
    #[arg(long, default_value_t = 100)]
    epochs: usize,
    #[arg(long, default_value_t = 1e-3)]
    learning_rate: f64,
    #[arg(long, default_value_t = 32)]
    batch_size: usize,
    /// Hidden layer widths, comma separated.
    #[arg(long, default_value = "64,32", value_delimiter = ',')]
    hidden: Vec<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug)]
struct AttributeArgs {
    #[command(flatten)]
    data: DataArgs,
    #[arg(long)]
    model: PathBuf,
    /// saliency, gradient or integrated_gradients (alias ig).
    #[arg(long)]
    technique: String,
    #[arg(long, default_value_t = crate::attribution::DEFAULT_IG_STEPS)]
    ig_steps: usize,
    #[arg(long)]
    out: PathBuf,
    /// Worker threads; 0 picks automatically, 1 runs serially.
    #[arg(long, default_value_t = 0)]
    workers: usize,
}

#[derive(Args, Debug)]
struct PredictArgs {
    #[command(flatten)]
    data: DataArgs,
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct PerturbArgs {
    #[command(flatten)]
    data: DataArgs,
    /// Interchange attribution file for the dataset.
    #[arg(long)]
    attributions: PathBuf,
    #[command(flatten)]
    perturbation: PerturbArgsCommon,
    /// Perturbed dataset to write, in the input's format.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct EvaluateArgs {
    #[command(flatten)]
    data: DataArgs,
    /// Checkpoint of the built-in classifier.
    #[arg(long)]
    model: Option<PathBuf>,
    /// Native techniques, comma separated.
    #[arg(long, value_delimiter = ',')]
    technique: Vec<String>,
    #[arg(long, default_value_t = crate::attribution::DEFAULT_IG_STEPS)]
    ig_steps: usize,
    /// External attribution file for the original dataset. Repeatable.
    #[arg(long)]
    external_attributions: Vec<PathBuf>,
    /// External attributions for the perturbed dataset, paired by position
    /// with --external-attributions.
    #[arg(long)]
    external_perturbed_attributions: Vec<PathBuf>,
    /// External predictions for the original dataset.
    #[arg(long, requires = "external_perturbed_predictions")]
    external_predictions: Option<PathBuf>,
    /// External predictions for the perturbed dataset.
    #[arg(long, requires = "external_predictions")]
    external_perturbed_predictions: Option<PathBuf>,
    #[command(flatten)]
    perturbation: PerturbArgsCommon,
    /// Four weights w1,w2,w3,w4.
    #[arg(long, conflicts_with = "weights_preset")]
    weights: Option<String>,
    /// default, raw or balanced.
    #[arg(long)]
    weights_preset: Option<String>,
    /// js or hellinger.
    #[arg(long, default_value = "js")]
    distance: String,
    /// Recorded in the manifest; evaluation itself draws no random numbers.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 0)]
    workers: usize,
    #[arg(long)]
    out_dir: PathBuf,
    /// Sample indices that get an overlay chart.
    #[arg(long, value_delimiter = ',', default_value = "0")]
    overlay: Vec<usize>,
    /// Technique whose original attributions are projected into the report.
    #[arg(long)]
    project: Option<String>,
}

#[derive(Args, Debug)]
struct ProjectArgs {
    #[command(flatten)]
    data: DataArgs,
    /// Interchange attribution file.
    #[arg(long, conflicts_with_all = ["model", "technique"])]
    attributions: Option<PathBuf>,
    #[arg(long, requires = "technique")]
    model: Option<PathBuf>,
    #[arg(long, requires = "model")]
    technique: Option<String>,
    #[arg(long, default_value_t = crate::attribution::DEFAULT_IG_STEPS)]
    ig_steps: usize,
    #[arg(long)]
    out_dir: PathBuf,
    #[arg(long, default_value_t = 0)]
    workers: usize,
}

#[derive(Args, Debug)]
struct CompareArgs {
    /// Report summaries to merge.
    #[arg(required = true)]
    summaries: Vec<PathBuf>,
    /// Write the ranking as JSON here as well.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct CheckQmArgs {
    #[command(flatten)]
    data: DataArgs,
    #[arg(long)]
    model: PathBuf,
    /// Native technique; ignored when --external-attributions is given.
    #[arg(long, default_value = "saliency")]
    technique: String,
    #[arg(long, default_value_t = crate::attribution::DEFAULT_IG_STEPS)]
    ig_steps: usize,
    #[arg(long)]
    external_attributions: Option<PathBuf>,
    #[command(flatten)]
    perturbation: PerturbArgsCommon,
    #[arg(long, default_value_t = 10)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 0)]
    workers: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_io() {
                2
            } else {
                1
            }
        }
    }
}

fn dispatch(cmd: Command) -> Result<()> {
    match cmd {
        Command::Synth(a) => synth(a),
        Command::Train(a) => train(a),
        Command::Attribute(a) => attribute(a),
        Command::Predict(a) => predict(a),
        Command::Perturb(a) => perturb(a),
        Command::Evaluate(a) => evaluate(a),
        Command::Project(a) => project(a),
        Command::Compare(a) => compare(a),
        Command::CheckQm(a) => check_qm(a),
    }
}

fn parse_technique(name: &str, ig_steps: usize) -> Result<Technique> {
    match name.trim().parse()? {
        Technique::IntegratedGradients { .. } => {
            if ig_steps == 0 {
                return Err(AsiError::Config("--ig-steps must be at least 1".into()));
            }
            Ok(Technique::IntegratedGradients { steps: ig_steps })
        }
        t => Ok(t),
    }
}

fn check_model(params: &ModelParams, dataset: &Dataset) -> Result<()> {
    if params.input_len() != dataset.series_len() {
        return Err(AsiError::Dimension {
            what: "model input",
            expected: dataset.series_len(),
            found: params.input_len(),
        });
    }
    if params.class_count() < dataset.class_count() {
        return Err(AsiError::Dimension {
            what: "model classes",
            expected: dataset.class_count(),
            found: params.class_count(),
        });
    }
    Ok(())
}

fn load_model(path: &Path, dataset: &Dataset) -> Result<ModelParams> {
    let params = read_checkpoint(path)?;
    check_model(&params, dataset)?;
    Ok(params)
}

fn native_attributions(
    params: &ModelParams,
    technique: Technique,
    dataset: &Dataset,
    mode: Parallelism,
) -> Result<AttributionSet> {
    let rows = map_indexed(dataset.len(), mode, |i| {
        Ok(technique.attribute(params, dataset.sample(i))?.values)
    })?;
    AttributionSet::new(technique.id(), rows)
}

fn synth(a: SynthArgs) -> Result<()> {
    let cfg = BumpConfig {
        samples: a.samples,
        length: a.length,
        amplitude: a.amplitude,
        width: a.width,
        noise_std: a.noise_std,
        seed: a.seed,
    };
    let d = bump_dataset(&cfg)?;
    write_ucr(&d, &a.out, a.delimiter.parse()?)?;
    println!(
        "wrote {} series of length {} to {}",
        d.len(),
        d.series_len(),
        a.out.display()
    );
    Ok(())
}

fn train(a: TrainArgs) -> Result<()> {
    let dataset = a.data.load()?;
    let test = a
        .test
        .as_deref()
        .map(|p| load_ucr(p, a.data.delimiter.parse()?))
        .transpose()?;
    let cfg = TrainConfig {
        learning_rate: a.learning_rate,
        batch_size: a.batch_size,
        epochs: a.epochs,
        seed: a.seed,
        hidden_layers: a.hidden,
        ..TrainConfig::default()
    };
    let outcome = train_with_history(&dataset, &cfg)?;
    write_checkpoint(&a.out, &outcome.params)?;
    let last = outcome.epoch_losses.last().copied().unwrap_or(f64::NAN);
    println!("final loss {last:.6}");
    println!("train accuracy {:.4}", accuracy(&outcome.params, &dataset)?);
    if let Some(t) = &test {
        check_model(&outcome.params, t)?;
        println!("test accuracy {:.4}", accuracy(&outcome.params, t)?);
    }
    println!("wrote {}", a.out.display());
    Ok(())
}

fn attribute(a: AttributeArgs) -> Result<()> {
    let dataset = a.data.load()?;
    let params = load_model(&a.model, &dataset)?;
    let technique = parse_technique(&a.technique, a.ig_steps)?;
    let set = native_attributions(
        &params,
        technique,
        &dataset,
        Parallelism::from_workers(a.workers),
    )?;
    interchange::write_attributions(&a.out, &set)?;
    println!(
        "wrote {} {} attributions to {}",
        set.len(),
        set.technique_id(),
        a.out.display()
    );
    Ok(())
}

fn predict(a: PredictArgs) -> Result<()> {
    let dataset = a.data.load()?;
    let params = load_model(&a.model, &dataset)?;
    let preds = dataset
        .samples()
        .iter()
        .map(|s| params.predict_proba(s))
        .collect::<Result<Vec<_>>>()?;
    interchange::write_predictions(&a.out, &preds)?;
    interchange::write_meta(
        &a.out,
        Kind::Predictions,
        &Predictor::model_id(&params),
        preds.len(),
        params.class_count(),
    )?;
    println!("wrote {} predictions to {}", preds.len(), a.out.display());
    Ok(())
}

fn perturb(a: PerturbArgs) -> Result<()> {
    let delimiter: Delimiter = a.data.delimiter.parse()?;
    let dataset = a.data.load()?;
    let cfg = a.perturbation.config()?;
    let set = interchange::load_external(&a.attributions, dataset.len(), dataset.series_len())?;
    let stats = *dataset.stats();
    let mut points = 0usize;
    let mut samples = Vec::with_capacity(dataset.len());
    for i in 0..dataset.len() {
        let (pert, mask, _) = perturbation::apply(dataset.sample(i), set.row(i), &cfg, &stats)?;
        points += mask.cardinality();
        samples.push(pert);
    }
    let out = dataset.with_samples(samples)?;
    write_ucr(&out, &a.out, delimiter)?;
    println!(
        "perturbed {points} points across {} series, wrote {}",
        out.len(),
        a.out.display()
    );
    Ok(())
}

fn read_external_predictions(path: &Path) -> Result<(Vec<crate::PredictionDistribution>, String)> {
    let preds = interchange::read_predictions(path)?;
    let id = if interchange::meta_path(path).exists() {
        interchange::read_meta(path, Kind::Predictions)?.producer
    } else {
        path.file_stem()
            .map_or_else(String::new, |s| s.to_string_lossy().into_owned())
    };
    Ok((preds, id))
}

fn weights(a: &EvaluateArgs) -> Result<WeightVector> {
    match (&a.weights, &a.weights_preset) {
        (Some(w), _) => w.parse(),
        (None, Some(p)) => WeightVector::preset(p),
        (None, None) => Ok(WeightVector::DEFAULT),
    }
}

fn evaluate(a: EvaluateArgs) -> Result<()> {
    let dataset = a.data.load()?;
    let n = dataset.len();
    let m = dataset.series_len();
    let mode = Parallelism::from_workers(a.workers);
    let cfg = EvaluationConfig {
        perturbation: a.perturbation.config()?,
        weights: weights(&a)?,
        distance: a.distance.parse::<ProbabilityDistance>()?,
    };
    let mut files = vec![FileRef::new("dataset", &a.data.data)?];

    let params = match &a.model {
        Some(p) => {
            files.push(FileRef::new("model", p)?);
            Some(load_model(p, &dataset)?)
        }
        None => None,
    };
    let external_predictor = match (&a.external_predictions, &a.external_perturbed_predictions) {
        (Some(orig), Some(pert)) => {
            let (original, id) = read_external_predictions(orig)?;
            let (perturbed, _) = read_external_predictions(pert)?;
            for (what, rows) in [
                ("external predictions", &original),
                ("external perturbed predictions", &perturbed),
            ] {
                if rows.len() != n {
                    return Err(AsiError::Dimension {
                        what,
                        expected: n,
                        found: rows.len(),
                    });
                }
            }
            files.push(FileRef::new("predictions", orig)?);
            files.push(FileRef::new("perturbed_predictions", pert)?);
            Some(ExternalPredictions {
                id,
                original,
                perturbed: Some(perturbed),
            })
        }
        _ => None,
    };
    let (predictor, model_ref): (&dyn Predictor, ModelRef) = match (&external_predictor, &params) {
        (Some(e), _) => (
            e,
            ModelRef {
                id: e.model_id(),
                architecture: None,
            },
        ),
        (None, Some(p)) => (
            p,
            ModelRef {
                id: p.model_id(),
                architecture: Some(p.dims()),
            },
        ),
        (None, None) => {
            return Err(AsiError::Config(
                "evaluate needs --model or --external-predictions".into(),
            ))
        }
    };

    let techniques = a
        .technique
        .iter()
        .map(|t| parse_technique(t, a.ig_steps))
        .collect::<Result<Vec<_>>>()?;
    let mut sources: Vec<Box<dyn AttributionSource + '_>> = Vec::new();
    if !techniques.is_empty() {
        let Some(p) = &params else {
            return Err(AsiError::Config("native techniques need --model".into()));
        };
        for &technique in &techniques {
            sources.push(Box::new(NativeAttribution {
                params: p,
                technique,
            }));
        }
    }
    if a.external_attributions.len() != a.external_perturbed_attributions.len() {
        return Err(AsiError::Config(format!(
            "{} --external-attributions but {} --external-perturbed-attributions; they are paired by position",
            a.external_attributions.len(),
            a.external_perturbed_attributions.len()
        )));
    }
    for (orig, pert) in a
        .external_attributions
        .iter()
        .zip(&a.external_perturbed_attributions)
    {
        let original = interchange::load_external(orig, n, m)?;
        let perturbed = interchange::load_external(pert, n, m)?;
        files.push(FileRef::new(
            format!("attributions:{}", original.technique_id()),
            orig,
        )?);
        files.push(FileRef::new(
            format!("perturbed_attributions:{}", original.technique_id()),
            pert,
        )?);
        sources.push(Box::new(ExternalAttributions {
            original,
            perturbed: Some(perturbed),
        }));
    }
    if sources.is_empty() {
        return Err(AsiError::Config(
            "nothing to evaluate: give --technique or --external-attributions".into(),
        ));
    }
    let mut ids: Vec<String> = sources.iter().map(|s| s.technique_id()).collect();
    ids.sort();
    if let Some(dup) = ids.windows(2).find(|w| w[0] == w[1]) {
        return Err(AsiError::Config(format!(
            "technique {} given twice",
            dup[0]
        )));
    }

    let evals = sources
        .iter()
        .map(|s| evaluate_dataset(predictor, s.as_ref(), &dataset, &cfg, mode))
        .collect::<Result<Vec<DatasetEvaluation>>>()?;

    let projected = match &a.project {
        Some(id) => {
            let eval = evals
                .iter()
                .find(|e| {
                    e.summary.technique_id == *id
                        || parse_technique(id, a.ig_steps)
                            .is_ok_and(|t| t.id() == e.summary.technique_id)
                })
                .ok_or_else(|| {
                    AsiError::Config(format!("--project {id}: technique not evaluated"))
                })?;
            let rows = eval
                .samples
                .iter()
                .map(|s| s.original_attribution.clone())
                .collect();
            let set = AttributionSet::new(eval.summary.technique_id.clone(), rows)?;
            let proj = project_attributions(&set)?;
            let sep = cluster_separation(&proj, dataset.labels())?;
            Some((eval.summary.technique_id.clone(), proj, sep))
        }
        None => None,
    };
    let view = projected.as_ref().map(|(id, proj, sep)| ProjectionView {
        technique_id: id,
        projection: proj,
        labels: dataset.labels(),
        separation: *sep,
    });

    let ig_steps = techniques.iter().find_map(|t| match t {
        Technique::IntegratedGradients { steps } => Some(*steps),
        _ => None,
    });
    let mut manifest = RunManifest::new(
        current_unix_time(),
        dataset.info(),
        model_ref,
        evals
            .iter()
            .map(|e| e.summary.technique_id.clone())
            .collect(),
        ig_steps,
        cfg.perturbation,
        cfg.weights,
        cfg.distance,
        a.seed,
    );
    manifest.files = files;
    let options = ReportOptions {
        overlay_samples: a.overlay.clone(),
    };
    render_report(&evals, view, &manifest, &a.out_dir, &options)?;
    let summaries: Vec<&EvaluationSummary> = evals.iter().map(|e| &e.summary).collect();
    print_ranking(&compare_techniques(&summaries)?);
    println!("report written to {}", a.out_dir.display());
    Ok(())
}

fn print_ranking(c: &crate::evaluation::Comparison) {
    println!(
        "{:<4} {:<24} {:>10} {:>10} {:>7} {:>7} {:>10}",
        "rank", "technique", "asi_mean", "asi_std", "flips", "n", "gauss_idx"
    );
    for r in &c.rows {
        let g = r
            .gaussianity
            .as_ref()
            .map_or_else(|| "-".to_owned(), |g| format!("{:.4}", g.gaussianity_index));
        println!(
            "{:<4} {:<24} {:>10.6} {:>10.6} {:>7} {:>7} {:>10}",
            r.rank, r.technique_id, r.asi_mean, r.asi_std, r.flip_count, r.samples, g
        );
    }
}

fn project(a: ProjectArgs) -> Result<()> {
    let dataset = a.data.load()?;
    let set = match (&a.attributions, &a.model, &a.technique) {
        (Some(p), _, _) => interchange::load_external(p, dataset.len(), dataset.series_len())?,
        (None, Some(model), Some(t)) => {
            let params = load_model(model, &dataset)?;
            let technique = parse_technique(t, a.ig_steps)?;
            native_attributions(
                &params,
                technique,
                &dataset,
                Parallelism::from_workers(a.workers),
            )?
        }
        _ => {
            return Err(AsiError::Config(
                "project needs --attributions or --model with --technique".into(),
            ))
        }
    };
    let proj = project_attributions(&set)?;
    let separation = cluster_separation(&proj, dataset.labels())?;
    std::fs::create_dir_all(&a.out_dir).map_err(|e| AsiError::io(&a.out_dir, e))?;
    let title = format!(
        "PCA of {} attributions (explained {:.3} + {:.3})",
        set.technique_id(),
        proj.explained_variance_ratio[0],
        proj.explained_variance_ratio[1]
    );
    let svg_path = a.out_dir.join("projection.svg");
    let doc = svg::scatter(&title, &proj.coordinates, dataset.labels());
    std::fs::write(&svg_path, doc).map_err(|e| AsiError::io(&svg_path, e))?;
    let summary = ProjectionSummary {
        technique_id: set.technique_id().to_owned(),
        explained_variance_ratio: proj.explained_variance_ratio,
        cluster_separation: separation,
        coordinates: proj.coordinates.clone(),
        labels: dataset.labels().to_vec(),
    };
    let json_path = a.out_dir.join("projection.json");
    let json = serde_json::to_string_pretty(&summary).expect("projection serializes");
    std::fs::write(&json_path, json).map_err(|e| AsiError::io(&json_path, e))?;
    println!(
        "explained variance {} + {}, cluster separation {}",
        format_f64(proj.explained_variance_ratio[0]),
        format_f64(proj.explained_variance_ratio[1]),
        format_f64(separation)
    );
    println!("wrote {} and {}", svg_path.display(), json_path.display());
    Ok(())
}

fn compare(a: CompareArgs) -> Result<()> {
    let mut all = Vec::new();
    for p in &a.summaries {
        all.extend(read_summary(p)?.techniques);
    }
    let refs: Vec<&EvaluationSummary> = all.iter().collect();
    let ranking = compare_techniques(&refs)?;
    print_ranking(&ranking);
    if let Some(out) = &a.out {
        let json = serde_json::to_string_pretty(&ranking).expect("ranking serializes");
        std::fs::write(out, json).map_err(|e| AsiError::io(out, e))?;
    }
    Ok(())
}

fn check_qm(a: CheckQmArgs) -> Result<()> {
    let dataset = a.data.load()?;
    let params = load_model(&a.model, &dataset)?;
    let cfg = a.perturbation.config()?;
    let mode = Parallelism::from_workers(a.workers);
    let source: Box<dyn AttributionSource> = match &a.external_attributions {
        Some(p) => Box::new(ExternalAttributions {
            original: interchange::load_external(p, dataset.len(), dataset.series_len())?,
            perturbed: None,
        }),
        None => Box::new(NativeAttribution {
            params: &params,
            technique: parse_technique(&a.technique, a.ig_steps)?,
        }),
    };
    let report = quality_metric_check(
        &params,
        &dataset,
        &cfg,
        source.as_ref(),
        a.trials,
        a.seed,
        mode,
    )?;
    println!("technique                 {}", source.technique_id());
    println!("accuracy clean            {:.4}", report.accuracy_clean);
    println!(
        "accuracy attr-perturbed   {:.4}",
        report.accuracy_attr_perturbed
    );
    println!(
        "accuracy random-perturbed {:.4}",
        report.accuracy_random_perturbed
    );
    println!(
        "mean perturbed points     {:.2}",
        report.mean_perturbed_points
    );
    if let Some(out) = &a.out {
        let json = serde_json::to_string_pretty(&report).expect("report serializes");
        std::fs::write(out, json).map_err(|e| AsiError::io(out, e))?;
    }
    Ok(())
}
