//! Run manifests: everything needed to reproduce a report.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::dataset::DatasetInfo;
use crate::error::{AsiError, Result};
use crate::measures::{ProbabilityDistance, WeightVector};
use crate::perturbation::PerturbationConfig;

use super::file_sha256;

pub const MANIFEST_VERSION: u32 = 1;
pub const LOG_BASE: u32 = 2;
pub const PERCENTILE_CONVENTION: &str =
    "nearest-rank: value at 1-based position ceil(q/100*m) of the ascending sort";
pub const GRADIENT_TARGET: &str = "logit of the predicted class";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelRef {
    pub id: String,
    pub architecture: Option<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FileRef {
    pub role: String,
    pub path: PathBuf,
    pub sha256: String,
}

impl FileRef {
    pub fn new(role: impl Into<String>, path: &Path) -> Result<Self> {
        Ok(Self {
            role: role.into(),
            path: path.to_path_buf(),
            sha256: file_sha256(path)?,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub format_version: u32,
    pub tool: String,
    /// Seconds since the Unix epoch.
    pub created_unix: u64,
    pub dataset: DatasetInfo,
    pub model: ModelRef,
    pub techniques: Vec<String>,
    pub ig_steps: Option<usize>,
    pub perturbation: PerturbationConfig,
    pub weights: WeightVector,
    pub distance: ProbabilityDistance,
    pub seed: u64,
    pub log_base: u32,
    pub percentile_convention: String,
    pub gradient_target: String,
    pub files: Vec<FileRef>,
}

impl RunManifest {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        created_unix: u64,
        dataset: DatasetInfo,
        model: ModelRef,
        techniques: Vec<String>,
        ig_steps: Option<usize>,
        perturbation: PerturbationConfig,
        weights: WeightVector,
        distance: ProbabilityDistance,
        seed: u64,
    ) -> Self {
        Self {
            format_version: MANIFEST_VERSION,
            tool: format!("asi-core {}", env!("CARGO_PKG_VERSION")),
            created_unix,
            dataset,
            model,
            techniques,
            ig_steps,
            perturbation,
            weights,
            distance,
            seed,
            log_base: LOG_BASE,
            percentile_convention: PERCENTILE_CONVENTION.into(),
            gradient_target: GRADIENT_TARGET.into(),
            files: Vec::new(),
        }
    }

    /// Checks the version and that every referenced file still has the
    /// recorded checksum.
    pub fn verify(&self, origin: &Path) -> Result<()> {
        let bad = |msg: String| AsiError::Manifest {
            path: origin.to_path_buf(),
            msg,
        };
        if self.format_version != MANIFEST_VERSION {
            return Err(bad(format!(
                "unsupported manifest version {}",
                self.format_version
            )));
        }
        for f in &self.files {
            if file_sha256(&f.path)? != f.sha256 {
                return Err(bad(format!(
                    "{} ({}) changed since the run",
                    f.role,
                    f.path.display()
                )));
            }
        }
        Ok(())
    }
}

/// Seconds since the epoch, taken from `SOURCE_DATE_EPOCH` when set.
pub fn current_unix_time() -> u64 {
    std::env::var("SOURCE_DATE_EPOCH")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or_else(|| {
            std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map_or(0, |d| d.as_secs())
        })
}
