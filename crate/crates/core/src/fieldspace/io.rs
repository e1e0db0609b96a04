//! Field files: a JSON header plus a flat little-endian `complex128` payload.
//!
//! The header names the payload file relative to its own directory. Values
//! are interleaved `(re, im)` pairs, components stored one after another, each
//! in the in-memory layout (n-major, then m, then r).

use super::{Domain, DomainConfig, ScalarField, VectorField};
use crate::error::{Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::fs;
use std::path::Path;

pub const DTYPE: &str = "c128";
pub const LAYOUT: &str = "n-major, then m, then r";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldFileHeader {
    pub kappa: f64,
    pub ell: f64,
    pub mu: f64,
    pub n_r: usize,
    pub n_theta: usize,
    pub n_z: usize,
    pub quad_order: usize,
    pub components: usize,
    pub dtype: String,
    pub layout: String,
    pub real: bool,
    /// Payload path, relative to the header's directory.
    pub payload: String,
}

impl FieldFileHeader {
    pub fn domain_config(&self) -> DomainConfig {
        DomainConfig {
            kappa: self.kappa,
            ell: self.ell,
            mu: self.mu,
            n_r: self.n_r,
            n_theta: self.n_theta,
            n_z: self.n_z,
            quad_order: self.quad_order,
        }
    }
}

/// A field read back from disk.
#[derive(Debug, Clone)]
pub enum StoredField {
    Scalar(ScalarField),
    Vector(VectorField),
}

impl StoredField {
    pub fn domain(&self) -> &Domain {
        match self {
            StoredField::Scalar(f) => f.domain(),
            StoredField::Vector(v) => v.domain(),
        }
    }

    fn parts(&self) -> Vec<&ScalarField> {
        match self {
            StoredField::Scalar(f) => vec![f],
            StoredField::Vector(v) => v.components.iter().collect(),
        }
    }
}

impl From<ScalarField> for StoredField {
    fn from(f: ScalarField) -> Self {
        StoredField::Scalar(f)
    }
}

impl From<VectorField> for StoredField {
    fn from(v: VectorField) -> Self {
        StoredField::Vector(v)
    }
}

/// Writes `header_path` and a sibling `<stem>.bin` payload.
pub fn write_field_file(header_path: &Path, field: &StoredField) -> Result<FieldFileHeader> {
    let parts = field.parts();
    let cfg = field.domain().config();
    let stem = header_path
        .file_stem()
        .and_then(|s| s.to_str())
        .ok_or_else(|| Error::InvalidArgument(format!("bad header path {}", header_path.display())))?;
    let payload_name = format!("{stem}.bin");
    let header = FieldFileHeader {
        kappa: cfg.kappa,
        ell: cfg.ell,
        mu: cfg.mu,
        n_r: cfg.n_r,
        n_theta: cfg.n_theta,
        n_z: cfg.n_z,
        quad_order: cfg.quad_order,
        components: parts.len(),
        dtype: DTYPE.into(),
        layout: LAYOUT.into(),
        real: parts.iter().all(|p| p.is_real()),
        payload: payload_name.clone(),
    };
    let mut bytes = Vec::with_capacity(parts.len() * field.domain().len() * 16);
    for p in &parts {
        for c in p.coeffs() {
            bytes.extend_from_slice(&c.re.to_le_bytes());
            bytes.extend_from_slice(&c.im.to_le_bytes());
        }
    }
    let dir = header_path.parent().unwrap_or(Path::new("."));
    fs::write(dir.join(&payload_name), bytes)?;
    fs::write(header_path, serde_json::to_string_pretty(&header)?)?;
    Ok(header)
}

pub fn read_field_file(header_path: &Path) -> Result<StoredField> {
    let header: FieldFileHeader = serde_json::from_str(&fs::read_to_string(header_path)?)?;
    if header.dtype != DTYPE {
        return Err(Error::Format(format!("unsupported dtype {:?}", header.dtype)));
    }
    if header.layout != LAYOUT {
        return Err(Error::Format(format!("unsupported layout {:?}", header.layout)));
    }
    if header.components != 1 && header.components != 3 {
        return Err(Error::Format(format!("components must be 1 or 3, got {}", header.components)));
    }
    let domain = Domain::new(header.domain_config())?;
    let dir = header_path.parent().unwrap_or(Path::new("."));
    let bytes = fs::read(dir.join(&header.payload))?;
    let expected = header.components * domain.len() * 16;
    if bytes.len() != expected {
        return Err(Error::Format(format!(
            "payload holds {} bytes, header implies {expected}",
            bytes.len()
        )));
    }
    let values: Vec<Complex64> = bytes
        .chunks_exact(16)
        .map(|b| {
            let re = f64::from_le_bytes(b[..8].try_into().unwrap());
            let im = f64::from_le_bytes(b[8..].try_into().unwrap());
            Complex64::new(re, im)
        })
        .collect();
    let mut fields = values
        .chunks_exact(domain.len())
        .map(|c| ScalarField::from_coeffs(&domain, c.to_vec(), header.real))
        .collect::<Result<Vec<_>>>()?;
    if fields.len() == 1 {
        Ok(StoredField::Scalar(fields.pop().unwrap()))
    } else {
        let [a, b, c]: [ScalarField; 3] = fields.try_into().unwrap();
        Ok(StoredField::Vector(VectorField::new([a, b, c])?))
    }
}

#[cfg(test)]
mod tests {
    use super::super::BandLimit;
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    #[test]
    fn vector_round_trip_is_bit_exact() {
        let d = Domain::new(DomainConfig::new(0.5, 3.0, 1.0, 8, 4, 2)).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        let v = VectorField::random_smooth(&d, &mut rng, BandLimit::new(2, 4, 6), true);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("v.json");
        write_field_file(&path, &v.clone().into()).unwrap();
        let StoredField::Vector(back) = read_field_file(&path).unwrap() else {
            panic!("expected a vector field");
        };
        for (a, b) in v.components.iter().zip(&back.components) {
            assert!(a.coeffs().iter().zip(b.coeffs()).all(|(x, y)| {
                x.re.to_bits() == y.re.to_bits() && x.im.to_bits() == y.im.to_bits()
            }));
        }
        assert!(back.is_real());
    }

    #[test]
    fn truncated_payload_is_rejected() {
        let d = Domain::new(DomainConfig::new(0.5, 3.0, 1.0, 4, 2, 1)).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.json");
        write_field_file(&path, &ScalarField::constant(&d, 2.0).into()).unwrap();
        let bin = dir.path().join("s.bin");
        let mut bytes = fs::read(&bin).unwrap();
        bytes.truncate(bytes.len() - 16);
        fs::write(&bin, bytes).unwrap();
        assert!(matches!(read_field_file(&path), Err(Error::Format(_))));
    }
}
