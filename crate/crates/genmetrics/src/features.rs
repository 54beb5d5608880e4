//! `FBDFEAT1` feature-matrix files.
//!
//! Layout (all little-endian): the 8 ASCII bytes `FBDFEAT1`, `rows` as u64,
//! `dim` as u64, then `rows * dim` IEEE-754 f32 values in row-major order.

use std::fs;
use std::path::Path;

use genmetrics_core::FeatureMatrix;

use crate::error::{Error, Location, Result};

pub const MAGIC: &[u8; 8] = b"FBDFEAT1";
const HEADER_LEN: usize = 24;

pub fn read_features(path: impl AsRef<Path>) -> Result<FeatureMatrix> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_features(&bytes, path)
}

/// Decodes a feature file; `path` is only used in diagnostics.
pub fn decode_features(bytes: &[u8], path: &Path) -> Result<FeatureMatrix> {
    if bytes.len() < HEADER_LEN {
        return Err(Error::parse(path, Location::Header, format!("truncated header ({} bytes)", bytes.len())));
    }
    if &bytes[..8] != MAGIC {
        return Err(Error::parse(path, Location::Header, "bad magic, expected FBDFEAT1"));
    }
    let rows = u64::from_le_bytes(bytes[8..16].try_into().expect("8 bytes"));
    let dim = u64::from_le_bytes(bytes[16..24].try_into().expect("8 bytes"));
    let payload = &bytes[HEADER_LEN..];
    let expected = rows
        .checked_mul(dim)
        .and_then(|n| n.checked_mul(4))
        .filter(|&n| n <= usize::MAX as u64)
        .ok_or_else(|| Error::parse(path, Location::Header, format!("{rows} x {dim} matrix is too large")))?
        as usize;
    if payload.len() < expected {
        let row_bytes = (dim as usize * 4).max(1);
        return Err(Error::parse(
            path,
            Location::Row(payload.len() / row_bytes + 1),
            format!("truncated payload: {} of {expected} bytes", payload.len()),
        ));
    }
    if payload.len() > expected {
        return Err(Error::parse(
            path,
            Location::Offset((HEADER_LEN + expected) as u64),
            format!("{} trailing bytes after the matrix", payload.len() - expected),
        ));
    }
    let dim = dim as usize;
    let mut data = Vec::with_capacity(expected / 4);
    for (i, chunk) in payload.chunks_exact(4).enumerate() {
        let v = f32::from_le_bytes(chunk.try_into().expect("4 bytes"));
        if !v.is_finite() {
            return Err(Error::parse(
                path,
                Location::Row(i / dim + 1),
                format!("non-finite value {v} in column {}", i % dim + 1),
            ));
        }
        data.push(f64::from(v));
    }
    FeatureMatrix::new(rows as usize, dim, data).map_err(|source| Error::Data {
        path: path.to_path_buf(),
        source,
    })
}

/// Encodes a row-major f32 matrix.
pub fn encode_features(rows: usize, dim: usize, data: &[f32]) -> Vec<u8> {
    assert_eq!(data.len(), rows * dim, "data length must be rows * dim");
    let mut out = Vec::with_capacity(HEADER_LEN + data.len() * 4);
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&(rows as u64).to_le_bytes());
    out.extend_from_slice(&(dim as u64).to_le_bytes());
    for v in data {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

/// Writes `matrix`, narrowing values to f32.
pub fn write_features(path: impl AsRef<Path>, matrix: &FeatureMatrix) -> Result<()> {
    let path = path.as_ref();
    let data: Vec<f32> = matrix.data().iter().map(|&v| v as f32).collect();
    fs::write(path, encode_features(matrix.rows(), matrix.dim(), &data)).map_err(|e| Error::io(path, e))
}
