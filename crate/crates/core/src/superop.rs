//! Linear maps `Φ: M_n → M_m` as `(m² × n²)` matrices on vectorisations.
//!
//! Vectorisation stacks columns: `vec(A)[i + j·n] = A[i, j]`. Under this
//! convention `vec(U·A·V) = (Vᵗ ⊗ U)·vec(A)`, and column `i + j·n` of the
//! matrix is `vec(Φ(E_ij))`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extremal::{classify_isometry, IsometryClass};
use crate::linalg::{
    haar_unitary_with, seeded_rng, unitarity_defect, ComplexMatrix, Tolerance, C64, ONE,
};

/// Name of the vectorisation convention, as written into files.
pub const VEC_CONVENTION: &str = "column-stacking";

#[derive(Debug, Clone, PartialEq)]
pub struct SuperOperator {
    dim_in: usize,
    dim_out: usize,
    matrix: ComplexMatrix,
}

/// Block type in a direct-sum representation `A ↦ w·(⊕ ρ_k(A))·wᴴ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EmbeddingKind {
    Id,
    Transpose,
}

impl SuperOperator {
    pub fn new(dim_in: usize, dim_out: usize, matrix: ComplexMatrix) -> Result<Self> {
        if dim_in == 0 || dim_out == 0 {
            return Err(Error::EmptyShape {
                rows: dim_out,
                cols: dim_in,
            });
        }
        let want = (dim_out * dim_out, dim_in * dim_in);
        if matrix.shape() != want {
            return Err(Error::DimensionMismatch {
                op: "SuperOperator::new",
                lhs: want,
                rhs: matrix.shape(),
            });
        }
        Ok(Self {
            dim_in,
            dim_out,
            matrix,
        })
    }

    /// Tabulates `f` on the matrix units of `M_{dim_in}`.
    pub fn from_fn(
        dim_in: usize,
        dim_out: usize,
        f: impl Fn(&ComplexMatrix) -> ComplexMatrix,
    ) -> Result<Self> {
        let (n, m) = (dim_in, dim_out);
        let mut cols: Vec<C64> = Vec::with_capacity(m * m * n * n);
        for j in 0..n {
            for i in 0..n {
                let image = f(&ComplexMatrix::unit(n, i, j));
                if image.shape() != (m, m) {
                    return Err(Error::DimensionMismatch {
                        op: "SuperOperator::from_fn",
                        lhs: (m, m),
                        rhs: image.shape(),
                    });
                }
                cols.extend_from_slice(image.column_major_slice());
            }
        }
        let matrix = ComplexMatrix::from_dmatrix(DMatrix::from_column_slice(m * m, n * n, &cols))?;
        Self::new(n, m, matrix)
    }

    pub fn identity(n: usize) -> Self {
        Self {
            dim_in: n,
            dim_out: n,
            matrix: ComplexMatrix::identity(n * n),
        }
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    pub fn is_endomorphism(&self) -> bool {
        self.dim_in == self.dim_out
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn apply(&self, a: &ComplexMatrix) -> Result<ComplexMatrix> {
        if a.shape() != (self.dim_in, self.dim_in) {
            return Err(Error::DimensionMismatch {
                op: "SuperOperator::apply",
                lhs: (self.dim_in, self.dim_in),
                rhs: a.shape(),
            });
        }
        let v = ComplexMatrix::column(a.column_major_slice());
        let out = &self.matrix * &v;
        let m = self.dim_out;
        Ok(ComplexMatrix::wrap(DMatrix::from_column_slice(
            m,
            m,
            out.column_major_slice(),
        )))
    }

    /// `Φ(E_ij)`, read directly from column `i + j·n`.
    pub fn image_of_unit(&self, i: usize, j: usize) -> ComplexMatrix {
        let col = self.matrix.as_dmatrix().column(i + j * self.dim_in);
        let m = self.dim_out;
        ComplexMatrix::wrap(DMatrix::from_column_slice(m, m, col.as_slice()))
    }

    /// `A ↦ u·A·v` for `u: m×n`, `v: n×m`; the matrix is `vᵗ ⊗ u`.
    pub fn from_left_right(u: &ComplexMatrix, v: &ComplexMatrix) -> Result<Self> {
        let (m, n) = u.shape();
        if v.shape() != (n, m) {
            return Err(Error::DimensionMismatch {
                op: "from_left_right",
                lhs: u.shape(),
                rhs: v.shape(),
            });
        }
        Self::new(n, m, v.transpose().kron(u))
    }

    /// `A ↦ Aᵗ`; the matrix is the `n² × n²` commutation matrix.
    pub fn transpose_map(n: usize) -> Self {
        let mut k = DMatrix::zeros(n * n, n * n);
        for i in 0..n {
            for j in 0..n {
                // vec(Aᵗ)[j + i·n] = Aᵗ[j, i] = A[i, j] = vec(A)[i + j·n]
                k[(j + i * n, i + j * n)] = ONE;
            }
        }
        Self {
            dim_in: n,
            dim_out: n,
            matrix: ComplexMatrix::wrap(k),
        }
    }

    /// `A ↦ f(g(A))`.
    pub fn compose(f: &SuperOperator, g: &SuperOperator) -> Result<Self> {
        if g.dim_out != f.dim_in {
            return Err(Error::DimensionMismatch {
                op: "compose",
                lhs: (f.dim_out, f.dim_in),
                rhs: (g.dim_out, g.dim_in),
            });
        }
        Self::new(g.dim_in, f.dim_out, &f.matrix * &g.matrix)
    }

    /// `A ↦ v·Φ(A)` for a square `v` of the output size.
    pub fn left_multiplier(v: &ComplexMatrix, phi: &SuperOperator) -> Result<Self> {
        let m = phi.dim_out;
        if v.shape() != (m, m) {
            return Err(Error::DimensionMismatch {
                op: "left_multiplier",
                lhs: (m, m),
                rhs: v.shape(),
            });
        }
        let lift = ComplexMatrix::identity(m).kron(v);
        Self::new(phi.dim_in, m, &lift * &phi.matrix)
    }

    /// `A ↦ w·(ρ₁(A) ⊕ … ⊕ ρ_k(A))·wᴴ` with each `ρ` the identity or the
    /// transpose. `w` must be unitary of size `k·n`; `n` is inferred.
    pub fn direct_sum_embedding(
        kinds: &[EmbeddingKind],
        w: &ComplexMatrix,
        tol: &Tolerance,
    ) -> Result<Self> {
        let k = kinds.len();
        if k == 0 || !w.is_square() || !w.rows().is_multiple_of(k) {
            return Err(Error::InvalidInstance(format!(
                "direct sum of {k} blocks needs a square conjugator of size divisible by {k}, got {:?}",
                w.shape()
            )));
        }
        let defect = unitarity_defect(w);
        if defect > tol.effective_square(w.rows()) {
            return Err(Error::NotUnitary { defect });
        }
        let n = w.rows() / k;
        let wh = w.adjoint();
        Self::from_fn(n, k * n, |a| {
            let at = a.transpose();
            let blocks: Vec<ComplexMatrix> = kinds
                .iter()
                .map(|kind| match kind {
                    EmbeddingKind::Id => a.clone(),
                    EmbeddingKind::Transpose => at.clone(),
                })
                .collect();
            &(w * &ComplexMatrix::block_diagonal(&blocks)) * &wh
        })
    }

    /// Adds another map of the same shape.
    pub fn try_add(&self, other: &SuperOperator) -> Result<Self> {
        if (self.dim_in, self.dim_out) != (other.dim_in, other.dim_out) {
            return Err(Error::DimensionMismatch {
                op: "SuperOperator::try_add",
                lhs: (self.dim_out, self.dim_in),
                rhs: (other.dim_out, other.dim_in),
            });
        }
        Self::new(self.dim_in, self.dim_out, &self.matrix + &other.matrix)
    }

    /// `A ↦ (tr A / n)·I`.
    pub fn trace_pinch(n: usize) -> Self {
        Self::from_fn(n, n, |a| ComplexMatrix::scalar(n, a.trace() / n as f64))
            .expect("trace pinch shape is fixed")
    }
}

pub fn apply(phi: &SuperOperator, a: &ComplexMatrix) -> Result<ComplexMatrix> {
    phi.apply(a)
}

/// Certified lower bound on `sup_{‖A‖≤1} ‖Φ(A)‖`.
///
/// Evaluates `Φ` at `I` and, per sample, at a Haar unitary `U` and at the
/// mean `(U + V)/2` of two Haar unitaries. Each probe is rescaled to norm at
/// most one before evaluation.
pub fn map_norm_lower_bound(phi: &SuperOperator, samples: usize, seed: u64) -> f64 {
    let n = phi.dim_in();
    let mut rng = seeded_rng(seed);
    let eval = |a: &ComplexMatrix| -> f64 {
        let norm = a.operator_norm();
        let probe = if norm > 1.0 {
            a.scale_real(1.0 / norm)
        } else {
            a.clone()
        };
        phi.apply(&probe).map(|b| b.operator_norm()).unwrap_or(0.0)
    };
    let mut best = eval(&ComplexMatrix::identity(n));
    for _ in 0..samples {
        let u = haar_unitary_with(&mut rng, n);
        let v = haar_unitary_with(&mut rng, n);
        best = best.max(eval(&u));
        best = best.max(eval(&(&u + &v).scale_real(0.5)));
    }
    best
}

/// True when `Φ` maps the given unitary to a unitary.
pub fn maps_to_unitary(phi: &SuperOperator, u: &ComplexMatrix, tol: &Tolerance) -> Result<bool> {
    Ok(classify_isometry(&phi.apply(u)?, tol) == IsometryClass::Unitary)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{gaussian_matrix, haar_unitary, hermitian_unit_contraction, I};

    fn close(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
        (a - b).max_abs()
    }

    #[test]
    fn apply_examples() {
        let mut rng = seeded_rng(1);
        let a = gaussian_matrix(&mut rng, 3, 3);
        assert_eq!(SuperOperator::identity(3).apply(&a).unwrap(), a);
        let t = SuperOperator::transpose_map(2);
        assert_eq!(
            t.apply(&ComplexMatrix::unit(2, 0, 1)).unwrap(),
            ComplexMatrix::unit(2, 1, 0)
        );
        assert!(t.apply(&ComplexMatrix::identity(3)).is_err());
    }

    #[test]
    fn vec_kronecker_identity() {
        // Direct product U·A·V against the Kronecker-built matrix.
        let mut rng = seeded_rng(2);
        for trial in 0..100 {
            let n = 1 + trial % 4;
            let m = 1 + (trial / 4) % 3;
            let u = gaussian_matrix(&mut rng, m, n);
            let v = gaussian_matrix(&mut rng, n, m);
            let a = gaussian_matrix(&mut rng, n, n);
            let phi = SuperOperator::from_left_right(&u, &v).unwrap();
            let direct = &(&u * &a) * &v;
            let vec_a = ComplexMatrix::column(a.column_major_slice());
            let via_matrix = phi.matrix() * &vec_a;
            let vec_direct = ComplexMatrix::column(direct.column_major_slice());
            assert!(close(&via_matrix, &vec_direct) < 1e-12 * (1.0 + direct.max_abs()));
            assert!(close(&phi.apply(&a).unwrap(), &direct) < 1e-12 * (1.0 + direct.max_abs()));
        }
    }

    #[test]
    fn from_left_right_examples() {
        let id = ComplexMatrix::identity(3);
        assert_eq!(
            SuperOperator::from_left_right(&id, &id).unwrap(),
            SuperOperator::identity(3)
        );
        let u = haar_unitary(3, 5);
        let phi = SuperOperator::from_left_right(&u, &u.adjoint()).unwrap();
        assert!(close(&phi.apply(&id).unwrap(), &id) < 1e-14);
        assert!(SuperOperator::from_left_right(&u, &ComplexMatrix::identity(2)).is_err());
    }

    #[test]
    fn transpose_map_examples() {
        let mut rng = seeded_rng(3);
        let g = gaussian_matrix(&mut rng, 4, 4);
        let sym = &g + &g.transpose();
        let t = SuperOperator::transpose_map(4);
        assert_eq!(t.apply(&sym).unwrap(), sym);
        let tt = SuperOperator::compose(&t, &t).unwrap();
        assert_eq!(tt, SuperOperator::identity(4));
        let m = t.matrix();
        for r in 0..m.rows() {
            let ones = (0..m.cols()).filter(|&c| m.get(r, c) == ONE).count();
            let zeros = (0..m.cols())
                .filter(|&c| m.get(r, c) == C64::new(0.0, 0.0))
                .count();
            assert_eq!((ones, zeros), (1, m.cols() - 1));
        }
        for c in 0..m.cols() {
            assert_eq!((0..m.rows()).filter(|&r| m.get(r, c) == ONE).count(), 1);
        }
    }

    #[test]
    fn compose_examples() {
        let u = haar_unitary(3, 7);
        let v = haar_unitary(3, 8);
        let id = ComplexMatrix::identity(3);
        let left = SuperOperator::from_left_right(&u, &id).unwrap();
        let right = SuperOperator::from_left_right(&id, &v).unwrap();
        let both = SuperOperator::compose(&left, &right).unwrap();
        let direct = SuperOperator::from_left_right(&u, &v).unwrap();
        assert!(close(both.matrix(), direct.matrix()) < 1e-14);

        let mut rng = seeded_rng(9);
        let f = SuperOperator::new(2, 3, gaussian_matrix(&mut rng, 9, 4)).unwrap();
        let g = SuperOperator::new(3, 2, gaussian_matrix(&mut rng, 4, 9)).unwrap();
        let fg = SuperOperator::compose(&f, &g).unwrap();
        assert_eq!((fg.dim_in(), fg.dim_out()), (3, 3));
        for _ in 0..20 {
            let a = gaussian_matrix(&mut rng, 3, 3);
            let want = f.apply(&g.apply(&a).unwrap()).unwrap();
            assert!(close(&fg.apply(&a).unwrap(), &want) < 1e-12 * (1.0 + want.max_abs()));
        }
        assert!(SuperOperator::compose(&f, &f).is_err());
    }

    #[test]
    fn left_multiplier_examples() {
        let mut rng = seeded_rng(10);
        let phi = SuperOperator::new(2, 3, gaussian_matrix(&mut rng, 9, 4)).unwrap();
        let same = SuperOperator::left_multiplier(&ComplexMatrix::identity(3), &phi).unwrap();
        assert_eq!(same, phi);

        let v = haar_unitary(3, 11);
        let shifted = SuperOperator::from_left_right(&v, &ComplexMatrix::identity(3)).unwrap();
        let back = SuperOperator::left_multiplier(&v.adjoint(), &shifted).unwrap();
        assert!(close(back.matrix(), SuperOperator::identity(3).matrix()) < 1e-14);

        let w = gaussian_matrix(&mut rng, 3, 3);
        let lm = SuperOperator::left_multiplier(&w, &phi).unwrap();
        for _ in 0..10 {
            let a = gaussian_matrix(&mut rng, 2, 2);
            let want = &w * &phi.apply(&a).unwrap();
            assert!(close(&lm.apply(&a).unwrap(), &want) < 1e-12 * (1.0 + want.max_abs()));
        }
        assert!(SuperOperator::left_multiplier(&ComplexMatrix::identity(2), &phi).is_err());
    }

    #[test]
    fn direct_sum_examples() {
        let tol = Tolerance::default();
        let single = SuperOperator::direct_sum_embedding(
            &[EmbeddingKind::Id],
            &ComplexMatrix::identity(3),
            &tol,
        )
        .unwrap();
        assert_eq!(single, SuperOperator::identity(3));

        let pair = SuperOperator::direct_sum_embedding(
            &[EmbeddingKind::Id, EmbeddingKind::Transpose],
            &ComplexMatrix::identity(4),
            &tol,
        )
        .unwrap();
        let image = pair.apply(&ComplexMatrix::unit(2, 0, 1)).unwrap();
        let want = ComplexMatrix::block_diagonal(&[
            ComplexMatrix::unit(2, 0, 1),
            ComplexMatrix::unit(2, 1, 0),
        ]);
        assert_eq!(image, want);

        let w = haar_unitary(6, 12);
        let kinds = [
            EmbeddingKind::Id,
            EmbeddingKind::Transpose,
            EmbeddingKind::Id,
        ];
        let psi = SuperOperator::direct_sum_embedding(&kinds, &w, &tol).unwrap();
        assert!(
            close(
                &psi.apply(&ComplexMatrix::identity(2)).unwrap(),
                &ComplexMatrix::identity(6)
            ) < 1e-12
        );

        let not_unitary = ComplexMatrix::from_real_diagonal(&[1.0, 2.0]);
        assert!(matches!(
            SuperOperator::direct_sum_embedding(&[EmbeddingKind::Id], &not_unitary, &tol),
            Err(Error::NotUnitary { .. })
        ));
        assert!(
            SuperOperator::direct_sum_embedding(&kinds, &ComplexMatrix::identity(4), &tol).is_err()
        );
    }

    #[test]
    fn direct_sum_satisfies_square_identity() {
        // Ψ(S)ᴴΨ(S) = Ψ(I)ᴴΨ(S²) = Ψ(S²) for Hermitian S.
        let tol = Tolerance::default();
        let mut rng = seeded_rng(13);
        let kinds = [EmbeddingKind::Transpose, EmbeddingKind::Id];
        let w = haar_unitary(6, 14);
        let psi = SuperOperator::direct_sum_embedding(&kinds, &w, &tol).unwrap();
        let psi_i = psi.apply(&ComplexMatrix::identity(3)).unwrap();
        for _ in 0..20 {
            let s = hermitian_unit_contraction(&mut rng, 3);
            let ps = psi.apply(&s).unwrap();
            let ps2 = psi.apply(&(&s * &s)).unwrap();
            assert!((&(&ps.adjoint() * &ps) - &(&psi_i.adjoint() * &ps2)).operator_norm() < 1e-12);
            assert!((&(&ps.adjoint() * &ps) - &ps2).operator_norm() < 1e-12);
        }
    }

    #[test]
    fn left_right_unitaries_preserve_unitaries() {
        let tol = Tolerance::default();
        let mut rng = seeded_rng(15);
        for n in 1..=6 {
            let phi = SuperOperator::from_left_right(
                &haar_unitary_with(&mut rng, n),
                &haar_unitary_with(&mut rng, n),
            )
            .unwrap();
            for _ in 0..10 {
                let u = haar_unitary_with(&mut rng, n);
                assert!(maps_to_unitary(&phi, &u, &tol).unwrap());
            }
        }
    }

    #[test]
    fn norm_bound_examples() {
        assert!(map_norm_lower_bound(&SuperOperator::identity(3), 5, 1) >= 1.0 - 1e-12);
        let two = ComplexMatrix::scalar(3, C64::new(2.0, 0.0));
        let doubled = SuperOperator::from_left_right(&two, &ComplexMatrix::identity(3)).unwrap();
        assert!(map_norm_lower_bound(&doubled, 5, 1) >= 2.0 - 1e-12);
        let u = haar_unitary(4, 2);
        let v = haar_unitary(4, 3);
        let phi = SuperOperator::compose(
            &SuperOperator::from_left_right(&u, &v).unwrap(),
            &SuperOperator::transpose_map(4),
        )
        .unwrap();
        assert!(map_norm_lower_bound(&phi, 50, 4) <= 1.0 + 1e-8);
        // A map scaling by i has norm exactly 1.
        let phase = SuperOperator::from_left_right(
            &ComplexMatrix::scalar(2, I),
            &ComplexMatrix::identity(2),
        )
        .unwrap();
        assert!((map_norm_lower_bound(&phase, 3, 9) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn trace_pinch_values() {
        let p = SuperOperator::trace_pinch(2);
        let a = ComplexMatrix::from_real(2, 2, &[1.0, 5.0, 7.0, 3.0]).unwrap();
        assert_eq!(
            p.apply(&a).unwrap(),
            ComplexMatrix::identity(2).scale_real(2.0)
        );
    }
}
