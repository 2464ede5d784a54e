//! File formats: UCR datasets, the interchange CSV, model checkpoints, run
//! manifests and rendered reports.

pub mod checkpoint;
pub mod interchange;
pub mod manifest;
pub mod report;
pub mod svg;
pub mod ucr;

use std::path::Path;

use sha2::{Digest, Sha256};

use crate::error::{AsiError, Result};

pub(crate) fn read_string(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| AsiError::io(path, e))
}

pub(crate) fn write_bytes(path: &Path, bytes: &[u8]) -> Result<()> {
    std::fs::write(path, bytes).map_err(|e| AsiError::io(path, e))
}

/// Hex SHA-256 of a file's contents.
pub fn file_sha256(path: &Path) -> Result<String> {
    let bytes = std::fs::read(path).map_err(|e| AsiError::io(path, e))?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}
