//! `CTBW0001` tensor container.
//!
//! Layout: the 8 magic bytes, a little-endian `u32` byte length, that many
//! bytes of UTF-8 JSON manifest (`[{"name", "dtype": "f32", "shape"}, ...]`),
//! then each tensor's row-major little-endian `f32` payload in manifest order.
//! Nothing may follow the last payload.

use std::collections::BTreeMap;

use ndarray::{Array1, Array2};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const MAGIC: &[u8; 8] = b"CTBW0001";

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ArchiveError {
    #[error("bad magic bytes (expected CTBW0001)")]
    BadMagic,
    #[error("truncated archive header")]
    TruncatedHeader,
    #[error("malformed manifest: {0}")]
    Manifest(String),
    #[error("tensor {name}: unsupported dtype {dtype}")]
    Dtype { name: String, dtype: String },
    #[error("tensor {name}: duplicate name in manifest")]
    Duplicate { name: String },
    #[error("tensor {name}: truncated payload")]
    Truncated { name: String },
    #[error("{0} trailing bytes after last tensor")]
    Trailing(usize),
    #[error("missing tensor {0}")]
    Missing(String),
    #[error("tensor {name}: expected shape {expected:?}, found {found:?}")]
    Shape { name: String, expected: Vec<usize>, found: Vec<usize> },
    #[error("tensor {name}: shape {shape:?} holds {expected} values, got {found}")]
    Count { name: String, shape: Vec<usize>, expected: usize, found: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Tensor {
    shape: Vec<usize>,
    values: Vec<f32>,
}

impl Tensor {
    pub fn new(shape: Vec<usize>, values: Vec<f32>) -> Result<Self, ArchiveError> {
        let expected = shape.iter().product::<usize>();
        if expected != values.len() {
            return Err(ArchiveError::Count { name: String::new(), shape, expected, found: values.len() });
        }
        Ok(Tensor { shape, values })
    }

    pub fn zeros(shape: Vec<usize>) -> Self {
        let n = shape.iter().product();
        Tensor { shape, values: vec![0.0; n] }
    }

    pub fn scalar(v: f32) -> Self {
        Tensor { shape: vec![], values: vec![v] }
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn values(&self) -> &[f32] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f32] {
        &mut self.values
    }
}

#[derive(Serialize, Deserialize)]
struct ManifestEntry {
    name: String,
    dtype: String,
    shape: Vec<usize>,
}

/// Named tensors, kept sorted by name so serialization is canonical.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TensorArchive {
    tensors: BTreeMap<String, Tensor>,
}

impl TensorArchive {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, name: impl Into<String>, tensor: Tensor) {
        self.tensors.insert(name.into(), tensor);
    }

    pub fn get(&self, name: &str) -> Result<&Tensor, ArchiveError> {
        self.tensors.get(name).ok_or_else(|| ArchiveError::Missing(name.to_owned()))
    }

    pub fn get_mut(&mut self, name: &str) -> Result<&mut Tensor, ArchiveError> {
        self.tensors.get_mut(name).ok_or_else(|| ArchiveError::Missing(name.to_owned()))
    }

    pub fn contains(&self, name: &str) -> bool {
        self.tensors.contains_key(name)
    }

    pub fn remove(&mut self, name: &str) -> Option<Tensor> {
        self.tensors.remove(name)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.tensors.keys().map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Tensor)> {
        self.tensors.iter().map(|(k, v)| (k.as_str(), v))
    }

    /// The named tensor as a `rows x cols` matrix in double precision.
    pub fn matrix(&self, name: &str, rows: usize, cols: usize) -> Result<Array2<f64>, ArchiveError> {
        let t = self.expect_shape(name, &[rows, cols])?;
        Ok(Array2::from_shape_fn((rows, cols), |(i, j)| t.values[i * cols + j] as f64))
    }

    pub fn vector(&self, name: &str, len: usize) -> Result<Array1<f64>, ArchiveError> {
        let t = self.expect_shape(name, &[len])?;
        Ok(t.values.iter().map(|&v| v as f64).collect())
    }

    pub fn scalar_value(&self, name: &str) -> Result<f64, ArchiveError> {
        let t = self.get(name)?;
        if t.values.len() != 1 {
            return Err(ArchiveError::Shape { name: name.into(), expected: vec![], found: t.shape.clone() });
        }
        Ok(t.values[0] as f64)
    }

    pub fn expect_shape(&self, name: &str, shape: &[usize]) -> Result<&Tensor, ArchiveError> {
        let t = self.get(name)?;
        if t.shape != shape {
            return Err(ArchiveError::Shape { name: name.into(), expected: shape.to_vec(), found: t.shape.clone() });
        }
        Ok(t)
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let manifest: Vec<ManifestEntry> = self
            .tensors
            .iter()
            .map(|(name, t)| ManifestEntry { name: name.clone(), dtype: "f32".into(), shape: t.shape.clone() })
            .collect();
        let manifest = serde_json::to_vec(&manifest).expect("manifest serializes");
        let payload: usize = self.tensors.values().map(|t| t.values.len() * 4).sum();
        let mut out = Vec::with_capacity(12 + manifest.len() + payload);
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&(manifest.len() as u32).to_le_bytes());
        out.extend_from_slice(&manifest);
        for t in self.tensors.values() {
            for v in &t.values {
                out.extend_from_slice(&v.to_le_bytes());
            }
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, ArchiveError> {
        load_archive(bytes)
    }
}

/// Decodes a `CTBW0001` container.
pub fn load_archive(bytes: &[u8]) -> Result<TensorArchive, ArchiveError> {
    if bytes.len() < 8 || &bytes[..8] != MAGIC {
        return Err(ArchiveError::BadMagic);
    }
    let len_bytes: [u8; 4] = bytes.get(8..12).ok_or(ArchiveError::TruncatedHeader)?.try_into().unwrap();
    let manifest_len = u32::from_le_bytes(len_bytes) as usize;
    let manifest = bytes.get(12..12 + manifest_len).ok_or(ArchiveError::TruncatedHeader)?;
    let entries: Vec<ManifestEntry> =
        serde_json::from_slice(manifest).map_err(|e| ArchiveError::Manifest(e.to_string()))?;

    let mut archive = TensorArchive::new();
    let mut offset = 12 + manifest_len;
    for entry in entries {
        if entry.dtype != "f32" {
            return Err(ArchiveError::Dtype { name: entry.name, dtype: entry.dtype });
        }
        if archive.contains(&entry.name) {
            return Err(ArchiveError::Duplicate { name: entry.name });
        }
        let count: usize = entry.shape.iter().product();
        let end = count
            .checked_mul(4)
            .and_then(|n| n.checked_add(offset))
            .filter(|&end| end <= bytes.len())
            .ok_or_else(|| ArchiveError::Truncated { name: entry.name.clone() })?;
        let values = bytes[offset..end]
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]))
            .collect();
        offset = end;
        archive.insert(entry.name, Tensor { shape: entry.shape, values });
    }
    if offset != bytes.len() {
        return Err(ArchiveError::Trailing(bytes.len() - offset));
    }
    Ok(archive)
}
