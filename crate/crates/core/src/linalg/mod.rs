//! Dense complex matrices and the decompositions the rest of the crate needs.
//!
//! Everything is double-precision complex. Rank decisions (null spaces,
//! clamping of tiny negative eigenvalues) go through singular values or
//! Hermitian eigenvalues against a [`Tolerance`], never through determinants.

mod decomp;
mod matrix;
mod random;
mod tolerance;

pub use decomp::{
    expm_i_hermitian, hermitian_eigen, hermitian_function, isometry_defects, null_space_projection,
    operator_norm, polar_unitary, psd_sqrt, singular_values, svd, unitarity_defect, Svd,
};
pub use matrix::{ComplexMatrix, C64, I, ONE, ZERO};
pub use random::{
    complex_gaussian, gaussian_matrix, haar_unitary, haar_unitary_with, hermitian_unit_contraction,
    random_contraction, random_partial_isometry, random_projection, seeded_rng, SeededRng,
    RNG_NAME,
};
pub use tolerance::{Tolerance, DEFAULT_ABS_TOL};

use crate::error::Result;

pub fn multiply(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    a.multiply(b)
}

pub fn adjoint(a: &ComplexMatrix) -> ComplexMatrix {
    a.adjoint()
}
