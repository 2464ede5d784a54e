//! Report rendering: SVG charts plus a JSON summary with the run manifest
//! embedded.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{AsiError, Result};
use crate::evaluation::{compare_techniques, Comparison, DatasetEvaluation, EvaluationSummary};
use crate::numeric::format_f64;
use crate::projection::Projection2D;

use super::manifest::RunManifest;
use super::svg;
use super::write_bytes;

pub const SUMMARY_FILE: &str = "summary.json";

/// A projection to draw, with the class label of every point.
#[derive(Debug, Clone, Copy)]
pub struct ProjectionView<'a> {
    pub technique_id: &'a str,
    pub projection: &'a Projection2D,
    pub labels: &'a [usize],
    pub separation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectionSummary {
    pub technique_id: String,
    pub explained_variance_ratio: [f64; 2],
    #[serde(with = "crate::serde_float")]
    pub cluster_separation: f64,
    pub coordinates: Vec<[f64; 2]>,
    pub labels: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportSummary {
    pub manifest: RunManifest,
    pub techniques: Vec<EvaluationSummary>,
    pub ranking: Comparison,
    pub projection: Option<ProjectionSummary>,
}

#[derive(Debug, Clone, Default)]
pub struct ReportOptions {
    /// Samples that get an overlay chart.
    pub overlay_samples: Vec<usize>,
}

fn file_stem(id: &str) -> String {
    id.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '-' {
                c
            } else {
                '_'
            }
        })
        .collect()
}

fn write_text(dir: &Path, name: &str, text: &str, written: &mut Vec<PathBuf>) -> Result<()> {
    let path = dir.join(name);
    write_bytes(&path, text.as_bytes())?;
    written.push(path);
    Ok(())
}

fn samples_csv(eval: &DatasetEvaluation) -> String {
    let mut out = String::from(
        "sample,flip_term,prob_term,att_term,ts_term,score,perturbed_points,threshold,degenerate\n",
    );
    for s in &eval.samples {
        let c = s.asi.components.as_array();
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            s.sample_index,
            format_f64(c[0]),
            format_f64(c[1]),
            format_f64(c[2]),
            format_f64(c[3]),
            format_f64(s.asi.score),
            s.perturbed_points,
            format_f64(s.threshold),
            s.degenerate.any()
        );
    }
    out
}

/// Writes, into `out_dir`:
///
/// - `summary.json`: manifest, per-technique aggregates, ranking, projection
/// - `histogram_<technique>.svg` and `samples_<technique>.csv`
/// - `overlay_<technique>_<sample>.svg` for each requested sample
/// - `projection.svg` when a projection is given
///
/// Returns the written paths in creation order.
pub fn render_report(
    evaluations: &[DatasetEvaluation],
    projection: Option<ProjectionView<'_>>,
    manifest: &RunManifest,
    out_dir: &Path,
    options: &ReportOptions,
) -> Result<Vec<PathBuf>> {
    if evaluations.is_empty() {
        return Err(AsiError::EmptyInput("report evaluations"));
    }
    std::fs::create_dir_all(out_dir).map_err(|e| AsiError::io(out_dir, e))?;
    let summaries: Vec<&EvaluationSummary> = evaluations.iter().map(|e| &e.summary).collect();
    let ranking = compare_techniques(&summaries)?;
    let mut written = Vec::new();

    for eval in evaluations {
        let id = &eval.summary.technique_id;
        let stem = file_stem(id);
        let title = format!(
            "ASI distribution: {id} (n={}, flips={}, mean={:.4})",
            eval.summary.samples, eval.summary.flip_count, eval.summary.asi_mean
        );
        let hist = svg::histogram(&title, &eval.summary.histogram, "ASI score");
        write_text(
            out_dir,
            &format!("histogram_{stem}.svg"),
            &hist,
            &mut written,
        )?;
        write_text(
            out_dir,
            &format!("samples_{stem}.csv"),
            &samples_csv(eval),
            &mut written,
        )?;
        for &i in &options.overlay_samples {
            let Some(s) = eval.samples.get(i) else {
                continue;
            };
            let title = format!(
                "{id}, sample {i}: class {} -> {}, ASI {:.4}",
                s.original_prediction.predicted_class(),
                s.perturbed_prediction.predicted_class(),
                s.asi.score
            );
            let doc = svg::overlay(
                &title,
                (&s.original_series, &s.perturbed_series),
                (&s.original_attribution, &s.perturbed_attribution),
            );
            write_text(
                out_dir,
                &format!("overlay_{stem}_{i}.svg"),
                &doc,
                &mut written,
            )?;
        }
    }

    let projection_summary = projection.map(|p| ProjectionSummary {
        technique_id: p.technique_id.to_owned(),
        explained_variance_ratio: p.projection.explained_variance_ratio,
        cluster_separation: p.separation,
        coordinates: p.projection.coordinates.clone(),
        labels: p.labels.to_vec(),
    });
    if let Some(p) = &projection_summary {
        let title = format!(
            "PCA of {} attributions (explained {:.3} + {:.3})",
            p.technique_id, p.explained_variance_ratio[0], p.explained_variance_ratio[1]
        );
        let doc = svg::scatter(&title, &p.coordinates, &p.labels);
        write_text(out_dir, "projection.svg", &doc, &mut written)?;
    }

    let summary = ReportSummary {
        manifest: manifest.clone(),
        techniques: summaries.into_iter().cloned().collect(),
        ranking,
        projection: projection_summary,
    };
    let json = serde_json::to_string_pretty(&summary).expect("summary serializes");
    write_text(out_dir, SUMMARY_FILE, &json, &mut written)?;
    Ok(written)
}

pub fn read_summary(path: &Path) -> Result<ReportSummary> {
    let text = super::read_string(path)?;
    serde_json::from_str(&text).map_err(|e| AsiError::Manifest {
        path: path.to_path_buf(),
        msg: format!("unreadable summary: {e}"),
    })
}
