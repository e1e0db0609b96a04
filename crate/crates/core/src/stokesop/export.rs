//! Matrix files: a JSON header plus a flat little-endian payload.
//!
//! Entries are stored column-major. `dtype` is `"c128"` (interleaved
//! `(re, im)` pairs) or `"f64"`; real payloads are read back with zero
//! imaginary parts.

use crate::error::{Error, Result};
use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::fs;
use std::path::Path;

pub const MATRIX_LAYOUT: &str = "column-major";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixHeader {
    /// What the matrix is, e.g. `"A_block"`.
    pub name: String,
    /// Axial mode.
    pub n: i64,
    pub rows: usize,
    pub cols: usize,
    pub dtype: String,
    pub layout: String,
    /// Payload path, relative to the header's directory.
    pub payload: String,
}

/// Writes `header_path` and a sibling `<stem>.bin` payload. With `real`, the
/// imaginary parts are dropped and the payload is `f64`.
pub fn write_matrix(header_path: &Path, name: &str, n: i64, m: &DMatrix<Complex64>, real: bool) -> Result<MatrixHeader> {
    let stem = header_path
        .file_stem()
        .and_then(|s| s.to_str())
        .ok_or_else(|| Error::InvalidArgument(format!("bad header path {}", header_path.display())))?;
    let header = MatrixHeader {
        name: name.into(),
        n,
        rows: m.nrows(),
        cols: m.ncols(),
        dtype: if real { "f64" } else { "c128" }.into(),
        layout: MATRIX_LAYOUT.into(),
        payload: format!("{stem}.bin"),
    };
    let mut bytes = Vec::with_capacity(m.len() * 16);
    for c in m.iter() {
        bytes.extend_from_slice(&c.re.to_le_bytes());
        if !real {
            bytes.extend_from_slice(&c.im.to_le_bytes());
        }
    }
    let dir = header_path.parent().unwrap_or(Path::new("."));
    fs::write(dir.join(&header.payload), bytes)?;
    fs::write(header_path, serde_json::to_string_pretty(&header)?)?;
    Ok(header)
}

pub fn read_matrix(header_path: &Path) -> Result<(MatrixHeader, DMatrix<Complex64>)> {
    let header: MatrixHeader = serde_json::from_str(&fs::read_to_string(header_path)?)?;
    let width = match header.dtype.as_str() {
        "c128" => 16,
        "f64" => 8,
        other => return Err(Error::Format(format!("unsupported dtype {other:?}"))),
    };
    if header.layout != MATRIX_LAYOUT {
        return Err(Error::Format(format!("unsupported layout {:?}", header.layout)));
    }
    let dir = header_path.parent().unwrap_or(Path::new("."));
    let bytes = fs::read(dir.join(&header.payload))?;
    let expected = header.rows * header.cols * width;
    if bytes.len() != expected {
        return Err(Error::Format(format!(
            "payload holds {} bytes, header implies {expected}",
            bytes.len()
        )));
    }
    let f = |b: &[u8]| f64::from_le_bytes(b.try_into().unwrap());
    let values = bytes.chunks_exact(width).map(|b| {
        if width == 16 {
            Complex64::new(f(&b[..8]), f(&b[8..]))
        } else {
            Complex64::new(f(b), 0.0)
        }
    });
    let m = DMatrix::from_iterator(header.rows, header.cols, values);
    Ok((header, m))
}
