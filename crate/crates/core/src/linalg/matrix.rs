use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Dense complex matrix with finite entries.
///
/// Shapes are always positive. Indexing is `(row, col)`; storage is the
/// column-major layout of the wrapped `nalgebra::DMatrix`.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    inner: DMatrix<C64>,
}

impl ComplexMatrix {
    /// Builds a matrix from row-major entries.
    pub fn new(rows: usize, cols: usize, entries: Vec<C64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::EmptyShape { rows, cols });
        }
        if entries.len() != rows * cols {
            return Err(Error::EntryCount {
                rows,
                cols,
                expected: rows * cols,
                got: entries.len(),
            });
        }
        Self::from_dmatrix(DMatrix::from_row_slice(rows, cols, &entries))
    }

    pub fn from_real(rows: usize, cols: usize, entries: &[f64]) -> Result<Self> {
        Self::new(
            rows,
            cols,
            entries.iter().map(|&x| C64::new(x, 0.0)).collect(),
        )
    }

    pub fn from_dmatrix(inner: DMatrix<C64>) -> Result<Self> {
        if inner.nrows() == 0 || inner.ncols() == 0 {
            return Err(Error::EmptyShape {
                rows: inner.nrows(),
                cols: inner.ncols(),
            });
        }
        // Report the offending entry in row-major order.
        for r in 0..inner.nrows() {
            for c in 0..inner.ncols() {
                let z = inner[(r, c)];
                if !z.re.is_finite() || !z.im.is_finite() {
                    return Err(Error::NonFinite {
                        index: r * inner.ncols() + c,
                        value: z.to_string(),
                    });
                }
            }
        }
        Ok(Self { inner })
    }

    /// Wraps a matrix produced by arithmetic on already-validated operands.
    pub(crate) fn wrap(inner: DMatrix<C64>) -> Self {
        debug_assert!(inner.nrows() > 0 && inner.ncols() > 0);
        Self { inner }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::wrap(DMatrix::zeros(rows, cols))
    }

    pub fn identity(n: usize) -> Self {
        Self::wrap(DMatrix::identity(n, n))
    }

    pub fn scalar(n: usize, value: C64) -> Self {
        Self::wrap(DMatrix::from_diagonal_element(n, n, value))
    }

    /// The matrix unit `E_ij` in `M_n`.
    pub fn unit(n: usize, i: usize, j: usize) -> Self {
        let mut m = DMatrix::zeros(n, n);
        m[(i, j)] = ONE;
        Self::wrap(m)
    }

    pub fn from_diagonal(diag: &[C64]) -> Self {
        let n = diag.len();
        let mut m = DMatrix::zeros(n, n);
        for (k, &d) in diag.iter().enumerate() {
            m[(k, k)] = d;
        }
        Self::wrap(m)
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let d: Vec<C64> = diag.iter().map(|&x| C64::new(x, 0.0)).collect();
        Self::from_diagonal(&d)
    }

    /// Block-diagonal matrix with the given blocks along the diagonal.
    pub fn block_diagonal(blocks: &[ComplexMatrix]) -> Self {
        let rows: usize = blocks.iter().map(|b| b.rows()).sum();
        let cols: usize = blocks.iter().map(|b| b.cols()).sum();
        let mut m = DMatrix::zeros(rows, cols);
        let (mut r0, mut c0) = (0, 0);
        for b in blocks {
            m.view_mut((r0, c0), (b.rows(), b.cols()))
                .copy_from(&b.inner);
            r0 += b.rows();
            c0 += b.cols();
        }
        Self::wrap(m)
    }

    /// Stacks matrices with a common column count on top of each other.
    pub fn vstack(blocks: &[ComplexMatrix]) -> Result<Self> {
        let cols = blocks
            .first()
            .map(|b| b.cols())
            .ok_or(Error::EmptyShape { rows: 0, cols: 0 })?;
        if let Some(bad) = blocks.iter().find(|b| b.cols() != cols) {
            return Err(Error::DimensionMismatch {
                op: "vstack",
                lhs: (blocks[0].rows(), cols),
                rhs: bad.shape(),
            });
        }
        let rows: usize = blocks.iter().map(|b| b.rows()).sum();
        let mut m = DMatrix::zeros(rows, cols);
        let mut r0 = 0;
        for b in blocks {
            m.view_mut((r0, 0), (b.rows(), cols)).copy_from(&b.inner);
            r0 += b.rows();
        }
        Ok(Self::wrap(m))
    }

    /// Column vector with the given entries.
    pub fn column(entries: &[C64]) -> Self {
        Self::wrap(DMatrix::from_column_slice(entries.len(), 1, entries))
    }

    pub fn rows(&self) -> usize {
        self.inner.nrows()
    }

    pub fn cols(&self) -> usize {
        self.inner.ncols()
    }

    pub fn shape(&self) -> (usize, usize) {
        self.inner.shape()
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.inner[(row, col)]
    }

    pub fn as_dmatrix(&self) -> &DMatrix<C64> {
        &self.inner
    }

    pub fn into_dmatrix(self) -> DMatrix<C64> {
        self.inner
    }

    pub fn row_major_entries(&self) -> Vec<C64> {
        let mut out = Vec::with_capacity(self.rows() * self.cols());
        for r in 0..self.rows() {
            for c in 0..self.cols() {
                out.push(self.inner[(r, c)]);
            }
        }
        out
    }

    /// Column-major slice (the column-stacking vectorisation of the matrix).
    pub fn column_major_slice(&self) -> &[C64] {
        self.inner.as_slice()
    }

    pub fn adjoint(&self) -> Self {
        Self::wrap(self.inner.adjoint())
    }

    pub fn transpose(&self) -> Self {
        Self::wrap(self.inner.transpose())
    }

    pub fn conj(&self) -> Self {
        Self::wrap(self.inner.map(|z| z.conj()))
    }

    pub fn trace(&self) -> C64 {
        self.inner.trace()
    }

    pub fn scale(&self, factor: C64) -> Self {
        Self::wrap(&self.inner * factor)
    }

    pub fn scale_real(&self, factor: f64) -> Self {
        Self::wrap(self.inner.map(|z| z * factor))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.inner.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.inner.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest singular value.
    pub fn operator_norm(&self) -> f64 {
        super::decomp::operator_norm(self)
    }

    /// Fallible product; the `*` operator panics on mismatch instead.
    pub fn multiply(&self, rhs: &ComplexMatrix) -> Result<Self> {
        if self.cols() != rhs.rows() {
            return Err(Error::DimensionMismatch {
                op: "multiply",
                lhs: self.shape(),
                rhs: rhs.shape(),
            });
        }
        Ok(Self::wrap(&self.inner * &rhs.inner))
    }

    pub fn try_add(&self, rhs: &ComplexMatrix) -> Result<Self> {
        self.same_shape("add", rhs)?;
        Ok(Self::wrap(&self.inner + &rhs.inner))
    }

    pub fn try_sub(&self, rhs: &ComplexMatrix) -> Result<Self> {
        self.same_shape("sub", rhs)?;
        Ok(Self::wrap(&self.inner - &rhs.inner))
    }

    fn same_shape(&self, op: &'static str, rhs: &ComplexMatrix) -> Result<()> {
        if self.shape() != rhs.shape() {
            return Err(Error::DimensionMismatch {
                op,
                lhs: self.shape(),
                rhs: rhs.shape(),
            });
        }
        Ok(())
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &ComplexMatrix) -> Self {
        Self::wrap(self.inner.kronecker(&other.inner))
    }

    /// `‖self − selfᴴ‖` in operator norm.
    pub fn hermitian_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        (self - &self.adjoint()).operator_norm()
    }

    /// Hermitian part `(A + Aᴴ)/2`.
    pub fn hermitian_part(&self) -> Self {
        (self + &self.adjoint()).scale_real(0.5)
    }

    pub fn commutator(&self, other: &ComplexMatrix) -> Self {
        &(self * other) - &(other * self)
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ComplexMatrix {}x{} ", self.rows(), self.cols())?;
        f.debug_list()
            .entries((0..self.rows()).map(|r| {
                (0..self.cols())
                    .map(|c| self.inner[(r, c)])
                    .collect::<Vec<_>>()
            }))
            .finish()
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(
            self.cols(),
            rhs.rows(),
            "matrix product of {:?} and {:?}",
            self.shape(),
            rhs.shape()
        );
        ComplexMatrix::wrap(&self.inner * &rhs.inner)
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix::wrap(&self.inner + &rhs.inner)
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix::wrap(&self.inner - &rhs.inner)
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn neg(self) -> ComplexMatrix {
        ComplexMatrix::wrap(-&self.inner)
    }
}
