use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_ABS_TOL: f64 = 1e-8;

/// Absolute tolerance, optionally scaled by `√(rows·cols)` of the matrix
/// under test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub abs: f64,
    pub dimension_scaling: bool,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            abs: DEFAULT_ABS_TOL,
            dimension_scaling: true,
        }
    }
}

impl Tolerance {
    pub fn new(abs: f64) -> Result<Self> {
        Self::with_scaling(abs, true)
    }

    pub fn with_scaling(abs: f64, dimension_scaling: bool) -> Result<Self> {
        if !abs.is_finite() || abs < 0.0 {
            return Err(Error::InvalidTolerance(abs));
        }
        Ok(Self {
            abs,
            dimension_scaling,
        })
    }

    /// Tolerance applied to a residual of shape `rows × cols`.
    pub fn effective(&self, rows: usize, cols: usize) -> f64 {
        if self.dimension_scaling {
            self.abs * ((rows * cols) as f64).sqrt()
        } else {
            self.abs
        }
    }

    pub fn effective_square(&self, n: usize) -> f64 {
        self.effective(n, n)
    }
}
