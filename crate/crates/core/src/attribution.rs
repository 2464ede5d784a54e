//! Gradient-based attributions over [`ModelParams`] and containers for
//! externally computed ones.
//!
//! Native techniques explain the model's predicted class for the series they
//! are given, so the attribution of a perturbed series targets the perturbed
//! prediction.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{AsiError, Result};
use crate::model::ModelParams;

pub const DEFAULT_IG_STEPS: usize = 50;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Attribution {
    pub technique_id: String,
    pub values: Vec<f64>,
}

impl Attribution {
    pub fn new(technique_id: impl Into<String>, values: Vec<f64>) -> Result<Self> {
        if let Some(col) = values.iter().position(|v| !v.is_finite()) {
            return Err(AsiError::NonFinite {
                what: "attribution",
                row: 0,
                col,
            });
        }
        Ok(Self {
            technique_id: technique_id.into(),
            values,
        })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// One attribution per dataset sample, all from the same technique.
#[derive(Debug, Clone, PartialEq)]
pub struct AttributionSet {
    technique_id: String,
    rows: Vec<Vec<f64>>,
}

impl AttributionSet {
    pub fn new(technique_id: impl Into<String>, rows: Vec<Vec<f64>>) -> Result<Self> {
        if rows.is_empty() {
            return Err(AsiError::EmptyInput("attribution set"));
        }
        let m = rows[0].len();
        for (row, r) in rows.iter().enumerate() {
            if r.len() != m {
                return Err(AsiError::Dimension {
                    what: "attribution length",
                    expected: m,
                    found: r.len(),
                });
            }
            if let Some(col) = r.iter().position(|v| !v.is_finite()) {
                return Err(AsiError::NonFinite {
                    what: "attribution",
                    row,
                    col,
                });
            }
        }
        Ok(Self {
            technique_id: technique_id.into(),
            rows,
        })
    }

    pub fn technique_id(&self) -> &str {
        &self.technique_id
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn series_len(&self) -> usize {
        self.rows[0].len()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.rows[i]
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn get(&self, i: usize) -> Attribution {
        Attribution {
            technique_id: self.technique_id.clone(),
            values: self.rows[i].clone(),
        }
    }
}

/// |d logit_c / d x| at the predicted class `c`.
pub fn saliency(params: &ModelParams, ts: &[f64]) -> Result<Attribution> {
    let c = params.predict_class(ts)?;
    let g = params.gradient_wrt_input(ts, c)?;
    Attribution::new("saliency", g.into_iter().map(f64::abs).collect())
}

/// Signed input gradient at the predicted class.
pub fn gradient(params: &ModelParams, ts: &[f64]) -> Result<Attribution> {
    let c = params.predict_class(ts)?;
    Attribution::new("gradient", params.gradient_wrt_input(ts, c)?)
}

/// Integrated gradients along the straight path from `baseline` to `ts`,
/// integrated with the midpoint rule over `steps` segments.
pub fn integrated_gradients(
    params: &ModelParams,
    ts: &[f64],
    baseline: &[f64],
    steps: usize,
) -> Result<Attribution> {
    if baseline.len() != ts.len() {
        return Err(AsiError::Dimension {
            what: "integrated gradients baseline",
            expected: ts.len(),
            found: baseline.len(),
        });
    }
    if steps == 0 {
        return Err(AsiError::Config(
            "integrated gradients needs at least 1 step".into(),
        ));
    }
    let c = params.predict_class(ts)?;
    let delta: Vec<f64> = ts.iter().zip(baseline).map(|(x, b)| x - b).collect();
    let mut total = vec![0.0; ts.len()];
    let mut point = vec![0.0; ts.len()];
    for k in 0..steps {
        let alpha = (k as f64 + 0.5) / steps as f64;
        for ((p, b), d) in point.iter_mut().zip(baseline).zip(&delta) {
            *p = b + alpha * d;
        }
        let g = params.gradient_wrt_input(&point, c)?;
        for (t, gi) in total.iter_mut().zip(g) {
            *t += gi;
        }
    }
    let values = total
        .iter()
        .zip(&delta)
        .map(|(t, d)| d * (t / steps as f64))
        .collect();
    Attribution::new("integrated_gradients", values)
}

/// Attribution techniques computed natively from model gradients.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum Technique {
    Saliency,
    Gradient,
    /// Zero baseline.
    IntegratedGradients {
        steps: usize,
    },
}

impl Technique {
    pub fn id(&self) -> &'static str {
        match self {
            Technique::Saliency => "saliency",
            Technique::Gradient => "gradient",
            Technique::IntegratedGradients { .. } => "integrated_gradients",
        }
    }

    pub fn attribute(&self, params: &ModelParams, ts: &[f64]) -> Result<Attribution> {
        match *self {
            Technique::Saliency => saliency(params, ts),
            Technique::Gradient => gradient(params, ts),
            Technique::IntegratedGradients { steps } => {
                integrated_gradients(params, ts, &vec![0.0; ts.len()], steps)
            }
        }
    }
}

impl FromStr for Technique {
    type Err = AsiError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "saliency" => Ok(Technique::Saliency),
            "gradient" => Ok(Technique::Gradient),
            "integrated_gradients" | "ig" => Ok(Technique::IntegratedGradients {
                steps: DEFAULT_IG_STEPS,
            }),
            other => Err(AsiError::Config(format!(
                "unknown technique {other:?} (expected saliency, gradient or integrated_gradients)"
            ))),
        }
    }
}

impl fmt::Display for Technique {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}
