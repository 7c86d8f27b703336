//! On-disk JSON formats for matrices, superoperators and algebra bases.

use std::path::Path;

use serde::{Deserialize, Serialize};

use preserve_core::extremal::StarAlgebraBasis;
use preserve_core::superop::VEC_CONVENTION;
use preserve_core::{ComplexMatrix, SuperOperator, Tolerance, C64};

use crate::error::CliError;

/// Dense complex matrix; `entries[r][c] = [re, im]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixFile {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<Vec<[f64; 2]>>,
}

impl MatrixFile {
    pub fn from_matrix(m: &ComplexMatrix) -> Self {
        let entries = (0..m.rows())
            .map(|r| {
                (0..m.cols())
                    .map(|c| {
                        let z = m.get(r, c);
                        [z.re, z.im]
                    })
                    .collect()
            })
            .collect();
        Self {
            rows: m.rows(),
            cols: m.cols(),
            entries,
        }
    }

    pub fn to_matrix(&self) -> Result<ComplexMatrix, CliError> {
        if self.entries.len() != self.rows {
            return Err(CliError::format(format!(
                "matrix declares {} rows but has {}",
                self.rows,
                self.entries.len()
            )));
        }
        let mut flat = Vec::with_capacity(self.rows * self.cols);
        for (r, row) in self.entries.iter().enumerate() {
            if row.len() != self.cols {
                return Err(CliError::format(format!(
                    "row {r} has {} entries, expected {}",
                    row.len(),
                    self.cols
                )));
            }
            for (c, &[re, im]) in row.iter().enumerate() {
                if !re.is_finite() || !im.is_finite() {
                    return Err(CliError::format(format!("entry ({r}, {c}) is not finite")));
                }
                flat.push(C64::new(re, im));
            }
        }
        Ok(ComplexMatrix::new(self.rows, self.cols, flat)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuperOpFile {
    pub dim_in: usize,
    pub dim_out: usize,
    pub vec_convention: String,
    pub matrix: MatrixFile,
}

impl SuperOpFile {
    pub fn from_superop(phi: &SuperOperator) -> Self {
        Self {
            dim_in: phi.dim_in(),
            dim_out: phi.dim_out(),
            vec_convention: VEC_CONVENTION.to_string(),
            matrix: MatrixFile::from_matrix(phi.matrix()),
        }
    }

    pub fn to_superop(&self) -> Result<SuperOperator, CliError> {
        if self.vec_convention != VEC_CONVENTION {
            return Err(CliError::format(format!(
                "vec_convention must be \"{VEC_CONVENTION}\", got \"{}\"",
                self.vec_convention
            )));
        }
        Ok(SuperOperator::new(
            self.dim_in,
            self.dim_out,
            self.matrix.to_matrix()?,
        )?)
    }
}

/// Spanning set of a *-subalgebra of `M_n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BasisFile {
    pub n: usize,
    pub elements: Vec<MatrixFile>,
}

impl BasisFile {
    pub fn to_basis(&self, tol: &Tolerance) -> Result<StarAlgebraBasis, CliError> {
        let elements = self
            .elements
            .iter()
            .map(MatrixFile::to_matrix)
            .collect::<Result<Vec<_>, _>>()?;
        Ok(StarAlgebraBasis::new(self.n, elements, tol)?)
    }
}

pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| CliError::format(format!("{}: {e}", path.display())))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text =
        serde_json::to_string_pretty(value).map_err(|e| CliError::format(e.to_string()))?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))
}
