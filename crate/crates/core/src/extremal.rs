//! Extreme points of the operator-norm unit ball.
//!
//! An element `W` of a C*-algebra `B` is extreme in the unit ball iff it is a
//! partial isometry with `(I − WᴴW)·B·(I − WWᴴ) = {0}`. For `B = M_n` this
//! singles out the unitaries. The mean-of-unitaries constructions write a
//! contraction as an average of unitaries.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    hermitian_eigen, isometry_defects, polar_unitary, psd_sqrt, svd, ComplexMatrix, Tolerance, C64,
    I,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum IsometryClass {
    Unitary,
    Isometry,
    Coisometry,
    PartialIsometry,
    None,
}

/// Classifies `a` (any shape) by which of `aᴴa = I`, `aaᴴ = I`, `aaᴴa = a`
/// hold within tolerance.
pub fn classify_isometry(a: &ComplexMatrix, tol: &Tolerance) -> IsometryClass {
    let (left, right) = isometry_defects(a);
    let is_iso = left <= tol.effective_square(a.cols());
    let is_coiso = right <= tol.effective_square(a.rows());
    match (is_iso, is_coiso) {
        (true, true) => IsometryClass::Unitary,
        (true, false) => IsometryClass::Isometry,
        (false, true) => IsometryClass::Coisometry,
        (false, false) => {
            let defect = (&(&(a * &a.adjoint()) * a) - a).operator_norm();
            if defect <= tol.effective(a.rows(), a.cols()) {
                IsometryClass::PartialIsometry
            } else {
                IsometryClass::None
            }
        }
    }
}

/// Spanning set of a unital *-subalgebra of `M_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct StarAlgebraBasis {
    n: usize,
    elements: Vec<ComplexMatrix>,
}

impl StarAlgebraBasis {
    /// Validates closure under adjoints and products and that `I` lies in
    /// the span.
    pub fn new(n: usize, elements: Vec<ComplexMatrix>, tol: &Tolerance) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::NotStarAlgebra("empty basis".into()));
        }
        if let Some(bad) = elements.iter().find(|e| e.shape() != (n, n)) {
            return Err(Error::DimensionMismatch {
                op: "StarAlgebraBasis::new",
                lhs: (n, n),
                rhs: bad.shape(),
            });
        }
        let span = Span::new(&elements)?;
        let eff = tol.effective_square(n);
        let id_res = span.residual(&ComplexMatrix::identity(n));
        if id_res > eff {
            return Err(Error::NotStarAlgebra(format!(
                "identity is not in the span (residual {id_res:e})"
            )));
        }
        for (k, e) in elements.iter().enumerate() {
            let r = span.residual(&e.adjoint());
            if r > eff {
                return Err(Error::NotStarAlgebra(format!(
                    "adjoint of element {k} is not in the span (residual {r:e})"
                )));
            }
            for (l, f) in elements.iter().enumerate() {
                let r = span.residual(&(e * f));
                if r > eff {
                    return Err(Error::NotStarAlgebra(format!(
                        "product of elements {k} and {l} is not in the span (residual {r:e})"
                    )));
                }
            }
        }
        Ok(Self { n, elements })
    }

    /// The matrix units `E_ij` spanning all of `M_n`, in row-major order.
    pub fn full(n: usize) -> Self {
        let elements = (0..n)
            .flat_map(|i| (0..n).map(move |j| ComplexMatrix::unit(n, i, j)))
            .collect();
        Self { n, elements }
    }

    /// Diagonal matrices, spanned by `E_11, …, E_nn`.
    pub fn diagonal(n: usize) -> Self {
        let elements = (0..n).map(|i| ComplexMatrix::unit(n, i, i)).collect();
        Self { n, elements }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn elements(&self) -> &[ComplexMatrix] {
        &self.elements
    }
}

/// Orthonormal basis of the vectorised span of a family of matrices.
struct Span {
    q: ComplexMatrix,
}

impl Span {
    fn new(elements: &[ComplexMatrix]) -> Result<Self> {
        let (r, c) = elements[0].shape();
        let cols: Vec<C64> = elements
            .iter()
            .flat_map(|e| e.column_major_slice().iter().copied())
            .collect();
        let stacked = ComplexMatrix::from_dmatrix(nalgebra::DMatrix::from_column_slice(
            r * c,
            elements.len(),
            &cols,
        ))?;
        let dec = svd(&stacked)?;
        let rank_threshold = dec.sigma.first().copied().unwrap_or(0.0) * 1e-12;
        let rank = dec.rank(rank_threshold).max(1);
        let q = dec.u.as_dmatrix().columns(0, rank).into_owned();
        Ok(Self {
            q: ComplexMatrix::from_dmatrix(q)?,
        })
    }

    fn residual(&self, m: &ComplexMatrix) -> f64 {
        let v = ComplexMatrix::column(m.column_major_slice());
        let proj = &self.q * &(&self.q.adjoint() * &v);
        (&v - &proj).frobenius_norm()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ExtremeVerdict {
    Extreme,
    NotExtreme,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtremePointReport {
    /// Distance of `WᴴW` from its nearest spectral projection.
    pub defect_left: f64,
    /// Distance of `WWᴴ` from its nearest spectral projection.
    pub defect_right: f64,
    pub is_partial_isometry: bool,
    /// `max_k ‖(I − WᴴW)·B_k·(I − WWᴴ)‖`.
    pub kadison_residual: f64,
    /// Basis index attaining `kadison_residual` when it exceeds tolerance.
    pub witness_index: Option<usize>,
    pub verdict: ExtremeVerdict,
    /// Effective tolerance minus the worst of the three statistics; positive
    /// means the verdict is Extreme.
    pub margin: f64,
}

/// Largest distance from an eigenvalue of the Hermitian `h` to `{0, 1}`.
fn projection_defect(h: &ComplexMatrix) -> Result<f64> {
    let (values, _) = hermitian_eigen(h)?;
    Ok(values
        .into_iter()
        .map(|l| l.abs().min((l - 1.0).abs()))
        .fold(0.0, f64::max))
}

pub fn kadison_extreme_test(
    w: &ComplexMatrix,
    basis: &StarAlgebraBasis,
    tol: &Tolerance,
) -> Result<ExtremePointReport> {
    let n = basis.n();
    if w.shape() != (n, n) {
        return Err(Error::DimensionMismatch {
            op: "kadison_extreme_test",
            lhs: (n, n),
            rhs: w.shape(),
        });
    }
    let eff = tol.effective_square(n);
    let id = ComplexMatrix::identity(n);
    let wh = w.adjoint();
    let left_gram = &wh * w;
    let right_gram = w * &wh;
    let defect_left = projection_defect(&left_gram)?;
    let defect_right = projection_defect(&right_gram)?;
    let is_partial_isometry = defect_left <= eff && defect_right <= eff;

    let left = &id - &left_gram;
    let right = &id - &right_gram;
    let mut kadison_residual = 0.0f64;
    let mut worst = None;
    for (k, b) in basis.elements().iter().enumerate() {
        let prod = &(&left * b) * &right;
        // ‖·‖_op ≤ ‖·‖_F, so only candidates above the running max need an SVD.
        if prod.frobenius_norm() <= kadison_residual {
            continue;
        }
        let r = prod.operator_norm();
        if r > kadison_residual {
            kadison_residual = r;
            worst = Some(k);
        }
    }
    let witness_index = if kadison_residual > eff { worst } else { None };

    let stat = defect_left.max(defect_right).max(kadison_residual);
    let verdict = if stat <= eff {
        ExtremeVerdict::Extreme
    } else if stat <= 10.0 * eff {
        ExtremeVerdict::Inconclusive
    } else {
        ExtremeVerdict::NotExtreme
    };
    Ok(ExtremePointReport {
        defect_left,
        defect_right,
        is_partial_isometry,
        kadison_residual,
        witness_index,
        verdict,
        margin: eff - stat,
    })
}

fn check_contraction(a: &ComplexMatrix, tol: &Tolerance) -> Result<f64> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            what: "contraction",
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    let norm = a.operator_norm();
    if norm > 1.0 + tol.effective_square(a.rows()) {
        return Err(Error::NormExceedsOne { norm });
    }
    Ok(norm)
}

/// Writes a Hermitian contraction as `S = (U₊ + U₋)/2` with
/// `U± = S ± i·√(I − S²)`.
pub fn selfadjoint_mean_of_unitaries(
    s: &ComplexMatrix,
    tol: &Tolerance,
) -> Result<(ComplexMatrix, ComplexMatrix)> {
    let norm = check_contraction(s, tol)?;
    let defect = s.hermitian_defect();
    if defect > tol.effective_square(s.rows()) {
        return Err(Error::NotHermitian { defect });
    }
    let mut h = s.hermitian_part();
    if norm > 1.0 {
        h = h.scale_real(1.0 / norm);
    }
    let n = h.rows();
    let complement = &ComplexMatrix::identity(n) - &(&h * &h);
    let root = psd_sqrt(&complement, tol)?.scale(I);
    Ok((&h + &root, &h - &root))
}

/// A convex combination `Σ weights[k] · unitaries[k]`.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryMean {
    pub unitaries: Vec<ComplexMatrix>,
    pub weights: Vec<f64>,
}

impl UnitaryMean {
    pub fn reconstruct(&self) -> ComplexMatrix {
        let n = self.unitaries[0].rows();
        self.unitaries
            .iter()
            .zip(&self.weights)
            .fold(ComplexMatrix::zeros(n, n), |acc, (u, &w)| {
                &acc + &u.scale_real(w)
            })
    }
}

/// Writes a square contraction as a mean of unitaries.
///
/// A unitary input comes back as itself with weight 1. Otherwise
/// `a = W·P` (polar, `W = U·Vh`) and `P = (U₊ + U₋)/2`, so
/// `a = (W·U₊ + W·U₋)/2`.
pub fn contraction_mean_of_unitaries(a: &ComplexMatrix, tol: &Tolerance) -> Result<UnitaryMean> {
    let norm = check_contraction(a, tol)?;
    if classify_isometry(a, tol) == IsometryClass::Unitary {
        return Ok(UnitaryMean {
            unitaries: vec![a.clone()],
            weights: vec![1.0],
        });
    }
    let (w, mut p) = polar_unitary(a)?;
    if norm > 1.0 {
        p = p.scale_real(1.0 / norm);
    }
    let (plus, minus) = selfadjoint_mean_of_unitaries(&p, tol)?;
    Ok(UnitaryMean {
        unitaries: vec![&w * &plus, &w * &minus],
        weights: vec![0.5, 0.5],
    })
}
