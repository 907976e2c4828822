//! On-disk formats for states and measurements: minimal JSON with complex
//! entries as `[real, imag]` pairs and dimensions declared explicitly.
//!
//! A state file holds the full `(d_a * d_b)^2` matrix, row-major; a POVM
//! file holds one flat `dim^2` matrix per element. Serialization uses
//! shortest-roundtrip decimal text, so parse/serialize round-trips are exact.

use crate::matkernel::CMatrix;
use crate::measure::{MeasureError, Povm};
use crate::qstate::{DensityMatrix, StateError};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::path::Path;
use thiserror::Error;

/// Errors from reading or writing state and POVM files.
#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Read {
        path: String,
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Parse {
        path: String,
        source: serde_json::Error,
    },

    #[error("{path}: field `{field}`: expected {expected} entries, got {actual}")]
    BadShape {
        path: String,
        field: String,
        expected: usize,
        actual: usize,
    },

    #[error("{path}: {source}")]
    InvalidState { path: String, source: StateError },

    #[error("{path}: {source}")]
    InvalidPovm { path: String, source: MeasureError },
}

/// A bipartite density matrix on disk.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StateFile {
    /// Subsystem dimensions `(d_a, d_b)`.
    pub dims: (usize, usize),
    /// Row-major `(d_a * d_b)^2` complex entries as `[real, imag]` pairs.
    pub matrix: Vec<[f64; 2]>,
}

impl StateFile {
    pub fn from_density(rho: &DensityMatrix) -> Result<Self, StateError> {
        let dims = rho.split().ok_or(StateError::MissingSplit)?;
        let d = rho.dim();
        let m = rho.matrix();
        let mut matrix = Vec::with_capacity(d * d);
        for i in 0..d {
            for j in 0..d {
                matrix.push([m[(i, j)].re, m[(i, j)].im]);
            }
        }
        Ok(Self { dims, matrix })
    }

    pub fn to_density(&self, path: &str) -> Result<DensityMatrix, IoError> {
        let (d_a, d_b) = self.dims;
        let d = d_a * d_b;
        if self.matrix.len() != d * d {
            return Err(IoError::BadShape {
                path: path.to_string(),
                field: "matrix".to_string(),
                expected: d * d,
                actual: self.matrix.len(),
            });
        }
        let mat = CMatrix::from_fn(d, d, |i, j| {
            let [re, im] = self.matrix[i * d + j];
            Complex64::new(re, im)
        });
        DensityMatrix::bipartite(mat, d_a, d_b).map_err(|source| IoError::InvalidState {
            path: path.to_string(),
            source,
        })
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self, IoError> {
        let shown = path.as_ref().display().to_string();
        let text = std::fs::read_to_string(&path).map_err(|source| IoError::Read {
            path: shown.clone(),
            source,
        })?;
        serde_json::from_str(&text).map_err(|source| IoError::Parse {
            path: shown,
            source,
        })
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<(), IoError> {
        let shown = path.as_ref().display().to_string();
        let text = serde_json::to_string_pretty(self).expect("state files always serialize");
        std::fs::write(&path, text + "\n").map_err(|source| IoError::Read {
            path: shown,
            source,
        })
    }
}

/// Read and validate a state file in one step.
pub fn read_state(path: impl AsRef<Path>) -> Result<DensityMatrix, IoError> {
    let shown = path.as_ref().display().to_string();
    StateFile::read(&path)?.to_density(&shown)
}

/// A POVM on disk.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PovmFile {
    pub dim: usize,
    /// One flat row-major `dim^2` matrix of `[real, imag]` pairs per element.
    pub elements: Vec<Vec<[f64; 2]>>,
}

impl PovmFile {
    pub fn from_povm(povm: &Povm) -> Self {
        let d = povm.dim();
        let elements = povm
            .elements()
            .iter()
            .map(|m| {
                let mut flat = Vec::with_capacity(d * d);
                for i in 0..d {
                    for j in 0..d {
                        flat.push([m[(i, j)].re, m[(i, j)].im]);
                    }
                }
                flat
            })
            .collect();
        Self { dim: d, elements }
    }

    pub fn to_povm(&self, path: &str) -> Result<Povm, IoError> {
        let d = self.dim;
        let mut mats = Vec::with_capacity(self.elements.len());
        for (k, flat) in self.elements.iter().enumerate() {
            if flat.len() != d * d {
                return Err(IoError::BadShape {
                    path: path.to_string(),
                    field: format!("elements[{k}]"),
                    expected: d * d,
                    actual: flat.len(),
                });
            }
            mats.push(CMatrix::from_fn(d, d, |i, j| {
                let [re, im] = flat[i * d + j];
                Complex64::new(re, im)
            }));
        }
        Povm::new(mats).map_err(|source| IoError::InvalidPovm {
            path: path.to_string(),
            source,
        })
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self, IoError> {
        let shown = path.as_ref().display().to_string();
        let text = std::fs::read_to_string(&path).map_err(|source| IoError::Read {
            path: shown.clone(),
            source,
        })?;
        serde_json::from_str(&text).map_err(|source| IoError::Parse {
            path: shown,
            source,
        })
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<(), IoError> {
        let shown = path.as_ref().display().to_string();
        let text = serde_json::to_string_pretty(self).expect("POVM files always serialize");
        std::fs::write(&path, text + "\n").map_err(|source| IoError::Read {
            path: shown,
            source,
        })
    }
}

/// Read and validate a POVM file in one step.
pub fn read_povm(path: impl AsRef<Path>) -> Result<Povm, IoError> {
    let shown = path.as_ref().display().to_string();
    PovmFile::read(&path)?.to_povm(&shown)
}
