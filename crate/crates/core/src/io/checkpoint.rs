//! Binary model checkpoints.
//!
//! Layout, all integers and floats little-endian:
//!
//! | field            | type                     |
//! |------------------|--------------------------|
//! | magic            | `b"ASICKPT\0"`           |
//! | version          | `u32` (= 1)              |
//! | layer count `L`  | `u32`                    |
//! | dims             | `L + 1` x `u32`          |
//! | per layer        | weights (`out*in` f64, row-major), then bias (`out` f64) |
//! | checksum         | SHA-256 of all preceding bytes |

use std::path::Path;

use sha2::{Digest, Sha256};

use crate::error::{AsiError, Result};
use crate::model::{DenseLayer, ModelParams};

use super::write_bytes;

pub const MAGIC: &[u8; 8] = b"ASICKPT\0";
pub const VERSION: u32 = 1;

pub fn encode(params: &ModelParams) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&(params.layers().len() as u32).to_le_bytes());
    for d in params.dims() {
        out.extend_from_slice(&(d as u32).to_le_bytes());
    }
    for l in params.layers() {
        for v in l.weights.iter().chain(&l.bias) {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    let digest = Sha256::digest(&out);
    out.extend_from_slice(&digest);
    out
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Reader<'_> {
    fn take(&mut self, n: usize) -> Option<&[u8]> {
        let s = self.bytes.get(self.pos..self.pos + n)?;
        self.pos += n;
        Some(s)
    }

    fn u32(&mut self) -> Option<u32> {
        self.take(4)
            .map(|b| u32::from_le_bytes(b.try_into().expect("4 bytes")))
    }

    fn f64(&mut self) -> Option<f64> {
        self.take(8)
            .map(|b| f64::from_le_bytes(b.try_into().expect("8 bytes")))
    }
}

pub fn decode(bytes: &[u8], path: &Path) -> Result<ModelParams> {
    let bad = |msg: &str| AsiError::Checkpoint {
        path: path.to_path_buf(),
        msg: msg.to_owned(),
    };
    if bytes.len() < MAGIC.len() + 8 + 32 || &bytes[..MAGIC.len()] != MAGIC {
        return Err(bad("not a checkpoint file (bad magic)"));
    }
    let (body, digest) = bytes.split_at(bytes.len() - 32);
    if Sha256::digest(body).as_slice() != digest {
        return Err(bad("checksum mismatch"));
    }
    let mut r = Reader {
        bytes: body,
        pos: MAGIC.len(),
    };
    let truncated = || bad("truncated");
    let version = r.u32().ok_or_else(truncated)?;
    if version != VERSION {
        return Err(bad(&format!("unsupported version {version}")));
    }
    let layers = r.u32().ok_or_else(truncated)? as usize;
    if layers == 0 || layers > 64 {
        return Err(bad(&format!("implausible layer count {layers}")));
    }
    let dims = (0..=layers)
        .map(|_| r.u32().map(|d| d as usize))
        .collect::<Option<Vec<_>>>()
        .ok_or_else(truncated)?;
    let mut out = Vec::with_capacity(layers);
    for w in dims.windows(2) {
        let (inputs, outputs) = (w[0], w[1]);
        let count = inputs
            .checked_mul(outputs)
            .ok_or_else(|| bad("dimension overflow"))?;
        if body.len().saturating_sub(r.pos) / 8 < count + outputs {
            return Err(truncated());
        }
        let weights = (0..count)
            .map(|_| r.f64())
            .collect::<Option<Vec<_>>>()
            .ok_or_else(truncated)?;
        let bias = (0..outputs)
            .map(|_| r.f64())
            .collect::<Option<Vec<_>>>()
            .ok_or_else(truncated)?;
        out.push(DenseLayer {
            inputs,
            outputs,
            weights,
            bias,
        });
    }
    if r.pos != body.len() {
        return Err(bad("trailing bytes after parameters"));
    }
    ModelParams::from_layers(out).map_err(|e| bad(&e.to_string()))
}

pub fn write_checkpoint(path: &Path, params: &ModelParams) -> Result<()> {
    write_bytes(path, &encode(params))
}

pub fn read_checkpoint(path: &Path) -> Result<ModelParams> {
    let bytes = std::fs::read(path).map_err(|e| AsiError::io(path, e))?;
    decode(&bytes, path)
}
