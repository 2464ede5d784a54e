//! UCR-archive style text datasets: one series per line, the class label
//! first, then the values.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use crate::dataset::Dataset;
use crate::error::{AsiError, Result};
use crate::numeric::format_f64;

use super::{read_string, write_bytes};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Delimiter {
    /// Tabs (any run of whitespace is accepted when reading).
    #[default]
    Tab,
    Comma,
}

impl FromStr for Delimiter {
    type Err = AsiError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tab" => Ok(Delimiter::Tab),
            "comma" => Ok(Delimiter::Comma),
            other => Err(AsiError::Config(format!(
                "unknown delimiter {other:?} (expected tab or comma)"
            ))),
        }
    }
}

pub fn load_ucr(path: &Path, delimiter: Delimiter) -> Result<Dataset> {
    parse_ucr(&read_string(path)?, path, delimiter)
}

/// Parses UCR text. Original labels are mapped to `0..C` in ascending
/// numeric order; the mapping is kept in [`Dataset::label_values`].
pub fn parse_ucr(text: &str, path: &Path, delimiter: Delimiter) -> Result<Dataset> {
    let err = |line: usize, msg: String| AsiError::Parse {
        path: path.to_path_buf(),
        line,
        msg,
    };
    let mut raw_labels = Vec::new();
    let mut samples: Vec<Vec<f64>> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let lineno = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let tokens: Vec<&str> = match delimiter {
            Delimiter::Tab => line.split_whitespace().collect(),
            Delimiter::Comma => line.split(',').map(str::trim).collect(),
        };
        let mut values = Vec::with_capacity(tokens.len());
        for (col, tok) in tokens.iter().enumerate() {
            let v: f64 = tok
                .parse()
                .map_err(|_| err(lineno, format!("column {col}: {tok:?} is not a number")))?;
            if !v.is_finite() {
                return Err(err(
                    lineno,
                    format!("column {col}: non-finite value {tok:?}"),
                ));
            }
            values.push(v);
        }
        if values.len() < 2 {
            return Err(err(
                lineno,
                "expected a label followed by at least one value".into(),
            ));
        }
        if let Some(first) = samples.first() {
            if values.len() - 1 != first.len() {
                return Err(err(
                    lineno,
                    format!(
                        "expected {} values, found {}",
                        first.len(),
                        values.len() - 1
                    ),
                ));
            }
        }
        raw_labels.push(values[0]);
        samples.push(values.split_off(1));
    }
    if samples.is_empty() {
        return Err(err(0, "file contains no samples".into()));
    }
    let mut label_values = raw_labels.clone();
    label_values.sort_by(f64::total_cmp);
    label_values.dedup();
    let labels = raw_labels
        .iter()
        .map(|l| {
            label_values
                .iter()
                .position(|v| v == l)
                .expect("label present")
        })
        .collect();
    Dataset::with_label_values(samples, labels, label_values)
}

pub fn format_ucr(dataset: &Dataset, delimiter: Delimiter) -> String {
    let sep = match delimiter {
        Delimiter::Tab => '\t',
        Delimiter::Comma => ',',
    };
    let mut out = String::new();
    for (s, &l) in dataset.samples().iter().zip(dataset.labels()) {
        out.push_str(&format_f64(dataset.label_values()[l]));
        for v in s {
            out.push(sep);
            out.push_str(&format_f64(*v));
        }
        let _ = writeln!(out);
    }
    out
}

pub fn write_ucr(dataset: &Dataset, path: &Path, delimiter: Delimiter) -> Result<()> {
    write_bytes(path, format_ucr(dataset, delimiter).as_bytes())
}
