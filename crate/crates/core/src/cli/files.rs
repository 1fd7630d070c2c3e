//! On-disk JSON formats for maps and states.
//!
//! Complex entries are stored as `[re, im]` pairs of JSON numbers, row-major.
//! Serialization goes through serde_json's shortest-round-trip float encoding,
//! so save followed by load reproduces every `f64` bit for bit.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::linalg::{Complex64, ComplexMatrix, HermitianMatrix};
use crate::map::HermitianMap;
use crate::witness::DensityState;
use crate::{Error, Result};

/// Free-form identification attached to generated files.
#[derive(Clone, Debug, Default, Serialize, Deserialize, PartialEq)]
pub struct FileMetadata {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    /// The generating command line, for reproducibility.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<String>,
}

/// Serialized Hermitian map: dimensions plus the full Choi matrix.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct MapFile {
    /// Input algebra dimension.
    pub m: usize,
    /// Output algebra dimension.
    pub n: usize,
    /// `m*n x m*n` Choi matrix, row-major, entries as `[re, im]`.
    pub choi: Vec<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metadata: Option<FileMetadata>,
}

/// What a serialized state claims to be; loading validates the claim.
#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum StateKind {
    /// PSD with unit trace.
    Density,
    /// Hermitian observable used as a witness.
    Witness,
    /// Hermitian matrix with no further claim.
    Generic,
}

/// Serialized Hermitian matrix tagged with its intended role.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct StateFile {
    pub dim: usize,
    pub kind: StateKind,
    /// `dim x dim` matrix, row-major, entries as `[re, im]`.
    pub matrix: Vec<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metadata: Option<FileMetadata>,
}

fn encode_matrix(mat: &ComplexMatrix) -> Vec<Vec<[f64; 2]>> {
    (0..mat.rows())
        .map(|i| {
            (0..mat.cols())
                .map(|j| {
                    let z = mat.entry(i, j);
                    [z.re, z.im]
                })
                .collect()
        })
        .collect()
}

fn decode_matrix(rows: &[Vec<[f64; 2]>]) -> Result<ComplexMatrix> {
    let decoded: Vec<Vec<Complex64>> = rows
        .iter()
        .map(|row| row.iter().map(|[re, im]| Complex64::new(*re, *im)).collect())
        .collect();
    ComplexMatrix::from_rows(&decoded)
}

impl MapFile {
    pub fn from_map(map: &HermitianMap, metadata: Option<FileMetadata>) -> Self {
        Self {
            m: map.input_dim(),
            n: map.output_dim(),
            choi: encode_matrix(map.choi().matrix()),
            metadata,
        }
    }

    /// Validates dimensions and hermiticity and rebuilds the map.
    pub fn to_map(&self) -> Result<HermitianMap> {
        let side = self
            .m
            .checked_mul(self.n)
            .ok_or_else(|| Error::InvalidArgument("dimension overflow".into()))?;
        if self.choi.len() != side || self.choi.iter().any(|row| row.len() != side) {
            return Err(Error::DimensionMismatch {
                context: "stored Choi matrix",
                expected: side,
                got: self.choi.len(),
            });
        }
        let choi = HermitianMatrix::new(decode_matrix(&self.choi)?)?;
        HermitianMap::from_choi(self.m, self.n, choi)
    }
}

impl StateFile {
    pub fn from_density(state: &DensityState, metadata: Option<FileMetadata>) -> Self {
        Self {
            dim: state.dim(),
            kind: StateKind::Density,
            matrix: encode_matrix(state.matrix().matrix()),
            metadata,
        }
    }

    pub fn from_witness(witness: &HermitianMatrix, metadata: Option<FileMetadata>) -> Self {
        Self {
            dim: witness.dim(),
            kind: StateKind::Witness,
            matrix: encode_matrix(witness.matrix()),
            metadata,
        }
    }

    fn to_hermitian(&self) -> Result<HermitianMatrix> {
        if self.matrix.len() != self.dim || self.matrix.iter().any(|row| row.len() != self.dim) {
            return Err(Error::DimensionMismatch {
                context: "stored matrix",
                expected: self.dim,
                got: self.matrix.len(),
            });
        }
        HermitianMatrix::new(decode_matrix(&self.matrix)?)
    }

    /// Rebuilds a density state; the file must be tagged `DENSITY` and pass validation.
    pub fn to_density(&self) -> Result<DensityState> {
        if self.kind != StateKind::Density {
            return Err(Error::InvalidArgument(format!(
                "state file is tagged {:?}, not DENSITY",
                self.kind
            )));
        }
        DensityState::new(self.to_hermitian()?)
    }

    /// Rebuilds the stored Hermitian matrix regardless of tag.
    pub fn to_matrix(&self) -> Result<HermitianMatrix> {
        self.to_hermitian()
    }
}

/// Reads and parses a JSON value of either file type.
pub fn load<T: serde::de::DeserializeOwned>(path: &Path) -> anyhow::Result<T> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| anyhow::anyhow!("cannot read {}: {e}", path.display()))?;
    serde_json::from_str(&text)
        .map_err(|e| anyhow::anyhow!("cannot parse {}: {e}", path.display()))
}

/// Serializes pretty-printed JSON to a file.
pub fn save<T: Serialize>(path: &Path, value: &T) -> anyhow::Result<()> {
    let text = serde_json::to_string_pretty(value)
        .map_err(|e| anyhow::anyhow!("cannot serialize {}: {e}", path.display()))?;
    std::fs::write(path, text + "\n")
        .map_err(|e| anyhow::anyhow!("cannot write {}: {e}", path.display()))
}
