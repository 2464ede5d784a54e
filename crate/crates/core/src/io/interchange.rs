//! Interchange CSV, version 1.
//!
//! ```text
//! # asi-interchange v1 <kind> n=<rows> d=<cols>
//! v,v,...,v
//! ```
//!
//! `kind` is `predictions` (one probability row per sample) or
//! `attributions` (one relevance row per sample). Values are written in the
//! shortest decimal form that round-trips. Each file may carry a JSON
//! sidecar `<file>.meta.json` naming the technique or model and the file's
//! SHA-256.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::attribution::AttributionSet;
use crate::error::{AsiError, Result};
use crate::measures::{PredictionDistribution, DISTRIBUTION_SUM_TOLERANCE};
use crate::numeric::{compensated_sum, format_f64};

use super::{file_sha256, read_string, write_bytes};

pub const FORMAT: &str = "asi-interchange";
pub const VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    Predictions,
    Attributions,
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Kind::Predictions => "predictions",
            Kind::Attributions => "attributions",
        })
    }
}

pub fn header(kind: Kind, n: usize, d: usize) -> String {
    format!("# {FORMAT} v{VERSION} {kind} n={n} d={d}")
}

fn parse_header(line: &str, kind: Kind, path: &Path) -> Result<(usize, usize)> {
    let bad = |msg: String| AsiError::Parse {
        path: path.to_path_buf(),
        line: 1,
        msg,
    };
    let tokens: Vec<&str> = line.split_whitespace().collect();
    let expected_prefix = ["#", FORMAT, "v1"];
    if tokens.len() != 6 || tokens[..3] != expected_prefix {
        return Err(bad(format!(
            "expected header \"{}\", found {line:?}",
            header(kind, 0, 0).replace("n=0 d=0", "n=<n> d=<d>")
        )));
    }
    if tokens[3] != kind.to_string() {
        return Err(bad(format!("expected {kind} file, found {}", tokens[3])));
    }
    let field = |tok: &str, key: &str| -> Result<usize> {
        tok.strip_prefix(key)
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| bad(format!("malformed header field {tok:?}")))
    };
    Ok((field(tokens[4], "n=")?, field(tokens[5], "d=")?))
}

pub fn format_matrix(kind: Kind, rows: &[Vec<f64>]) -> String {
    let d = rows.first().map_or(0, Vec::len);
    let mut out = header(kind, rows.len(), d);
    out.push('\n');
    for r in rows {
        let line: Vec<String> = r.iter().map(|v| format_f64(*v)).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}

/// Parses an interchange matrix, checking the header, every row's width and
/// that all values are finite. Errors name the offending row (0-based sample
/// index) or line.
pub fn parse_matrix(text: &str, kind: Kind, path: &Path) -> Result<Vec<Vec<f64>>> {
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty());
    let (_, first) = lines.next().ok_or_else(|| AsiError::Parse {
        path: path.to_path_buf(),
        line: 1,
        msg: "empty file".into(),
    })?;
    let (n, d) = parse_header(first, kind, path)?;
    let mut rows = Vec::with_capacity(n);
    for (row, (i, line)) in lines.enumerate() {
        let mut values = Vec::with_capacity(d);
        for (col, tok) in line.split(',').enumerate() {
            let v: f64 = tok.trim().parse().map_err(|_| AsiError::Parse {
                path: path.to_path_buf(),
                line: i + 1,
                msg: format!("row {row}, column {col}: {tok:?} is not a number"),
            })?;
            if !v.is_finite() {
                return Err(AsiError::NonFinite {
                    what: "interchange value",
                    row,
                    col,
                });
            }
            values.push(v);
        }
        if values.len() != d {
            return Err(AsiError::Shape {
                path: path.to_path_buf(),
                msg: format!("row {row} has {} columns, header says d={d}", values.len()),
            });
        }
        rows.push(values);
    }
    if rows.len() != n {
        return Err(AsiError::Shape {
            path: path.to_path_buf(),
            msg: format!("found {} rows, header says n={n}", rows.len()),
        });
    }
    Ok(rows)
}

pub fn read_matrix(path: &Path, kind: Kind) -> Result<Vec<Vec<f64>>> {
    parse_matrix(&read_string(path)?, kind, path)
}

pub fn write_matrix(path: &Path, kind: Kind, rows: &[Vec<f64>]) -> Result<()> {
    write_bytes(path, format_matrix(kind, rows).as_bytes())
}

pub fn read_predictions(path: &Path) -> Result<Vec<PredictionDistribution>> {
    let rows = read_matrix(path, Kind::Predictions)?;
    rows.into_iter()
        .enumerate()
        .map(|(row, r)| {
            let sum = compensated_sum(r.iter().copied());
            if (sum - 1.0).abs() > DISTRIBUTION_SUM_TOLERANCE {
                return Err(AsiError::Unnormalized {
                    path: path.to_path_buf(),
                    row,
                    sum,
                });
            }
            PredictionDistribution::new(r).map_err(|e| AsiError::Shape {
                path: path.to_path_buf(),
                msg: format!("row {row}: {e}"),
            })
        })
        .collect()
}

pub fn write_predictions(path: &Path, predictions: &[PredictionDistribution]) -> Result<()> {
    let rows: Vec<Vec<f64>> = predictions.iter().map(|p| p.probs().to_vec()).collect();
    write_matrix(path, Kind::Predictions, &rows)
}

pub fn read_attributions(path: &Path) -> Result<Vec<Vec<f64>>> {
    read_matrix(path, Kind::Attributions)
}

/// Sidecar describing an interchange file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InterchangeMeta {
    pub format: String,
    pub version: u32,
    pub kind: Kind,
    /// Technique for attribution files, model for prediction files.
    pub producer: String,
    pub rows: usize,
    pub cols: usize,
    pub sha256: String,
}

pub fn meta_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".meta.json");
    PathBuf::from(s)
}

pub fn write_meta(path: &Path, kind: Kind, producer: &str, rows: usize, cols: usize) -> Result<()> {
    let meta = InterchangeMeta {
        format: FORMAT.into(),
        version: VERSION,
        kind,
        producer: producer.into(),
        rows,
        cols,
        sha256: file_sha256(path)?,
    };
    let json = serde_json::to_string_pretty(&meta).expect("meta serializes");
    write_bytes(&meta_path(path), json.as_bytes())
}

/// Reads and checks the sidecar of `path` against the file's contents.
pub fn read_meta(path: &Path, kind: Kind) -> Result<InterchangeMeta> {
    let mp = meta_path(path);
    let bad = |msg: String| AsiError::Manifest {
        path: mp.clone(),
        msg,
    };
    let text = read_string(&mp)?;
    let meta: InterchangeMeta =
        serde_json::from_str(&text).map_err(|e| bad(format!("unreadable: {e}")))?;
    if meta.format != FORMAT || meta.version != VERSION {
        return Err(bad(format!(
            "unsupported format {} v{}",
            meta.format, meta.version
        )));
    }
    if meta.kind != kind {
        return Err(bad(format!(
            "describes {} but {kind} were expected",
            meta.kind
        )));
    }
    if meta.sha256 != file_sha256(path)? {
        return Err(bad("checksum does not match the data file".into()));
    }
    Ok(meta)
}

/// Writes an attribution set plus its sidecar.
pub fn write_attributions(path: &Path, set: &AttributionSet) -> Result<()> {
    write_matrix(path, Kind::Attributions, set.rows())?;
    write_meta(
        path,
        Kind::Attributions,
        set.technique_id(),
        set.len(),
        set.series_len(),
    )
}

/// Loads externally computed attributions for a dataset of `n` series of
/// length `m`, taking the technique id from the sidecar.
pub fn load_external(path: &Path, n: usize, m: usize) -> Result<AttributionSet> {
    let rows = read_attributions(path)?;
    let meta = read_meta(path, Kind::Attributions)?;
    if meta.rows != rows.len() || meta.cols != rows.first().map_or(0, Vec::len) {
        return Err(AsiError::Manifest {
            path: meta_path(path),
            msg: format!(
                "sidecar says {}x{}, file holds {}x{}",
                meta.rows,
                meta.cols,
                rows.len(),
                rows.first().map_or(0, Vec::len)
            ),
        });
    }
    if rows.len() != n || meta.cols != m {
        return Err(AsiError::Shape {
            path: path.to_path_buf(),
            msg: format!(
                "expected {n} rows of {m} values for this dataset, found {}x{}",
                rows.len(),
                meta.cols
            ),
        });
    }
    AttributionSet::new(meta.producer, rows)
}
