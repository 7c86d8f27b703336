//! Jordan *-homomorphisms `Ψ: M_n → M_m`.
//!
//! [`jordan_check`] measures `Ψ(AB + BA) − Ψ(A)Ψ(B) − Ψ(B)Ψ(A)` and
//! `Ψ(A*) − Ψ(A)*` over all matrix units, which covers every input by
//! bilinearity. [`stormer_split`] finds the central projection `E` on which
//! `Ψ` is multiplicative (and anti-multiplicative on `I − E`), and
//! [`recover_conjugating_unitary`] rebuilds `W` with `Ψ(A) = W·A·Wᴴ`
//! (or `W·Aᵗ·Wᴴ`) for endomorphisms.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{null_space_projection, svd, ComplexMatrix, Tolerance, C64};
use crate::superop::SuperOperator;

/// Matrix unit `E_ij` as its index pair.
pub type UnitIndex = (usize, usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum JordanKind {
    /// `E = I`: a *-homomorphism.
    Hom,
    /// `E = 0`: a *-antihomomorphism.
    Anti,
    /// `n = 1`; homomorphic and antihomomorphic coincide.
    Commutative,
    /// Proper central projection; only possible for `m > n`.
    Mixed,
    None,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StormerSplit {
    /// Projection onto the homomorphic summand.
    pub e: ComplexMatrix,
    /// `tr E`, i.e. the rank of `E` as a real number.
    pub rank: f64,
    /// Multiplicity of the identity representation, or −1.
    pub p: i64,
    /// Multiplicity of the transpose representation, or −1.
    pub q: i64,
    /// `max ‖(Ψ(AB) − Ψ(A)Ψ(B))·E‖`.
    pub r_hom: f64,
    /// `max ‖(Ψ(AB) − Ψ(B)Ψ(A))·(I − E)‖`.
    pub r_anti: f64,
    /// `max ‖[E, Ψ(E_ij)]‖`.
    pub r_central: f64,
    pub kind: JordanKind,
}

#[derive(Debug, Clone, PartialEq)]
pub struct JordanReport {
    pub n: usize,
    pub m: usize,
    pub r_square: f64,
    pub r_star: f64,
    pub r_unital: f64,
    pub is_jordan: bool,
    /// Matrix-unit pair attaining `r_square`.
    pub worst_pair: (UnitIndex, UnitIndex),
    /// Filled in by [`stormer_split`].
    pub split: Option<StormerSplit>,
}

/// Images `F_ij = Ψ(E_ij)` indexed as `units[i * n + j]`.
struct UnitImages {
    n: usize,
    m: usize,
    units: Vec<ComplexMatrix>,
}

impl UnitImages {
    fn new(psi: &SuperOperator) -> Self {
        let n = psi.dim_in();
        let units = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| psi.image_of_unit(i, j))
            .collect();
        Self {
            n,
            m: psi.dim_out(),
            units,
        }
    }

    fn f(&self, i: usize, j: usize) -> &ComplexMatrix {
        &self.units[i * self.n + j]
    }

    /// `Ψ(E_ij·E_kl) = δ_jk·F_il`.
    fn product_image(&self, (i, j): UnitIndex, (k, l): UnitIndex) -> Option<&ComplexMatrix> {
        (j == k).then(|| self.f(i, l))
    }

    fn pairs(&self) -> impl Iterator<Item = (UnitIndex, UnitIndex)> + '_ {
        let n = self.n;
        let idx = move || (0..n).flat_map(move |i| (0..n).map(move |j| (i, j)));
        idx().flat_map(move |a| idx().map(move |b| (a, b)))
    }
}

/// Running maximum of operator norms, skipping the SVD whenever the
/// Frobenius norm (an upper bound) cannot beat the current maximum.
#[derive(Default)]
struct MaxNorm<K> {
    value: f64,
    arg: Option<K>,
}

impl<K: Copy> MaxNorm<K> {
    fn push(&mut self, key: K, m: &ComplexMatrix) {
        if self.arg.is_some() && m.frobenius_norm() <= self.value {
            return;
        }
        let r = m.operator_norm();
        if self.arg.is_none() || r > self.value {
            self.value = r;
            self.arg = Some(key);
        }
    }
}

/// `‖Ψ(AB + BA) − Ψ(A)Ψ(B) − Ψ(B)Ψ(A)‖` for one pair of inputs.
pub fn jordan_pair_residual(
    psi: &SuperOperator,
    a: &ComplexMatrix,
    b: &ComplexMatrix,
) -> Result<f64> {
    let pa = psi.apply(a)?;
    let pb = psi.apply(b)?;
    let sym = &a.multiply(b)? + &(b * a);
    let lhs = psi.apply(&sym)?;
    Ok((&(&lhs - &(&pa * &pb)) - &(&pb * &pa)).operator_norm())
}

/// Jordan identity residuals over all matrix units.
pub fn jordan_check(psi: &SuperOperator, tol: &Tolerance) -> JordanReport {
    let img = UnitImages::new(psi);
    let (n, m) = (img.n, img.m);

    let mut square = MaxNorm::default();
    for (a, b) in img.pairs() {
        // Symmetric in (a, b).
        if a > b {
            continue;
        }
        let fa = img.f(a.0, a.1);
        let fb = img.f(b.0, b.1);
        let mut r = -&(&(fa * fb) + &(fb * fa));
        if let Some(x) = img.product_image(a, b) {
            r = &r + x;
        }
        if let Some(x) = img.product_image(b, a) {
            r = &r + x;
        }
        square.push((a, b), &r);
    }

    let mut star = MaxNorm::default();
    for i in 0..n {
        for j in 0..n {
            star.push((i, j), &(img.f(j, i) - &img.f(i, j).adjoint()));
        }
    }

    let unit_image = (0..n).fold(ComplexMatrix::zeros(m, m), |acc, i| &acc + img.f(i, i));
    let r_unital = (&unit_image - &ComplexMatrix::identity(m)).operator_norm();

    let eff = tol.effective_square(m);
    JordanReport {
        n,
        m,
        r_square: square.value,
        r_star: star.value,
        r_unital,
        is_jordan: square.value.max(star.value) <= eff,
        worst_pair: square.arg.unwrap_or(((0, 0), (0, 0))),
        split: None,
    }
}

fn multiplicity(rank: f64, n: usize) -> Option<i64> {
    let k = (rank / n as f64).round();
    ((rank - k * n as f64).abs() <= 0.1 && k >= 0.0).then_some(k as i64)
}

/// Central splitting of a unital Jordan *-homomorphism.
///
/// `E` is the largest projection annihilated on the right by every
/// `Ψ(E_ij·E_kl) − Ψ(E_ij)·Ψ(E_kl)`; it is then certified through
/// `r_hom`, `r_anti` and `r_central`.
pub fn stormer_split(psi: &SuperOperator, tol: &Tolerance) -> Result<JordanReport> {
    let mut report = jordan_check(psi, tol);
    let eff = tol.effective_square(report.m);
    if !report.is_jordan {
        return Err(Error::NotJordan {
            residual: report.r_square.max(report.r_star),
        });
    }
    if report.r_unital > eff {
        return Err(Error::NotUnital {
            residual: report.r_unital,
        });
    }
    let img = UnitImages::new(psi);
    let (n, m) = (img.n, img.m);

    let defects: Vec<ComplexMatrix> = img
        .pairs()
        .map(|(a, b)| {
            let prod = img.f(a.0, a.1) * img.f(b.0, b.1);
            match img.product_image(a, b) {
                Some(x) => x - &prod,
                None => -&prod,
            }
        })
        .collect();
    let e = null_space_projection(m, &defects, tol)?;
    let complement = &ComplexMatrix::identity(m) - &e;

    let mut hom = MaxNorm::default();
    let mut anti = MaxNorm::default();
    for ((a, b), d) in img.pairs().zip(&defects) {
        hom.push((a, b), &(d * &e));
        let rev = img.f(b.0, b.1) * img.f(a.0, a.1);
        let anti_defect = match img.product_image(a, b) {
            Some(x) => x - &rev,
            None => -&rev,
        };
        anti.push((a, b), &(&anti_defect * &complement));
    }
    let mut central = MaxNorm::default();
    for (k, f) in img.units.iter().enumerate() {
        central.push(k, &e.commutator(f));
    }

    let rank = e.trace().re;
    let (p, q) = match (multiplicity(rank, n), multiplicity(m as f64 - rank, n)) {
        (Some(p), Some(q)) => (p, q),
        _ => (-1, -1),
    };
    let kind = if n == 1 {
        JordanKind::Commutative
    } else if (&e - &ComplexMatrix::identity(m)).operator_norm() <= eff {
        JordanKind::Hom
    } else if e.operator_norm() <= eff {
        JordanKind::Anti
    } else {
        JordanKind::Mixed
    };
    report.split = Some(StormerSplit {
        e,
        rank,
        p,
        q,
        r_hom: hom.value,
        r_anti: anti.value,
        r_central: central.value,
        kind,
    });
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConjugationKind {
    Hom,
    Anti,
}

/// Rebuilds `W` with `Ψ(A) = W·A·Wᴴ` (Hom) or `W·Aᵗ·Wᴴ` (Anti).
///
/// With `F_ij = Ψ(E_ij)` (after undoing the transpose for Anti), take the
/// top singular vector `v` of `F_11` and set column `i` of `W` to `F_i1·v`.
/// The phase is fixed by making the first non-negligible entry of the
/// first column real and positive.
pub fn recover_conjugating_unitary(
    psi: &SuperOperator,
    kind: ConjugationKind,
    tol: &Tolerance,
) -> Result<ComplexMatrix> {
    if !psi.is_endomorphism() {
        return Err(Error::DimensionMismatch {
            op: "recover_conjugating_unitary",
            lhs: (psi.dim_in(), psi.dim_in()),
            rhs: (psi.dim_out(), psi.dim_out()),
        });
    }
    let n = psi.dim_in();
    let hom = match kind {
        ConjugationKind::Hom => psi.clone(),
        ConjugationKind::Anti => SuperOperator::compose(psi, &SuperOperator::transpose_map(n))?,
    };
    let f11 = hom.image_of_unit(0, 0);
    let dec = svd(&f11)?;
    let top = dec.sigma[0];
    if top <= tol.effective_square(n) {
        return Err(Error::RankDeficient { norm: top });
    }
    let v_entries: Vec<C64> = (0..n).map(|r| dec.u.get(r, 0)).collect();
    let v = ComplexMatrix::column(&v_entries);
    let mut cols: Vec<C64> = Vec::with_capacity(n * n);
    for i in 0..n {
        let wi = &hom.image_of_unit(i, 0) * &v;
        cols.extend_from_slice(wi.column_major_slice());
    }
    let w = ComplexMatrix::from_dmatrix(nalgebra::DMatrix::from_column_slice(n, n, &cols))?;
    let pivot = (0..n)
        .map(|r| w.get(r, 0))
        .find(|z| z.norm() > tol.abs.max(f64::EPSILON))
        .unwrap_or(C64::new(1.0, 0.0));
    Ok(w.scale(pivot.conj() / pivot.norm()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{
        gaussian_matrix, haar_unitary, hermitian_eigen, psd_sqrt, random_projection, seeded_rng,
        unitarity_defect,
    };
    use crate::superop::{map_norm_lower_bound, EmbeddingKind};

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn conj_map(w: &ComplexMatrix) -> SuperOperator {
        SuperOperator::from_left_right(w, &w.adjoint()).unwrap()
    }

    fn anti_conj_map(w: &ComplexMatrix) -> SuperOperator {
        let n = w.rows();
        SuperOperator::compose(&conj_map(w), &SuperOperator::transpose_map(n)).unwrap()
    }

    #[test]
    fn identity_and_transpose_are_jordan() {
        for n in 1..=4 {
            for psi in [SuperOperator::identity(n), SuperOperator::transpose_map(n)] {
                let r = jordan_check(&psi, &tol());
                assert_eq!((r.r_square, r.r_star, r.r_unital), (0.0, 0.0, 0.0));
                assert!(r.is_jordan);
            }
        }
    }

    #[test]
    fn trace_pinch_residuals() {
        // Ψ(A) = (tr A/2)·I on M_2. At (E_11, E_11):
        // Ψ(2E_11) − 2Ψ(E_11)² = I − I/2, norm 1/2.
        let psi = SuperOperator::trace_pinch(2);
        let e11 = ComplexMatrix::unit(2, 0, 0);
        let at_e11 = jordan_pair_residual(&psi, &e11, &e11).unwrap();
        assert!((at_e11 - 0.5).abs() < 1e-15);
        // At (E_12, E_21): Ψ(I) − 0 = I, norm 1, which is the maximum.
        let r = jordan_check(&psi, &tol());
        assert!((r.r_square - 1.0).abs() < 1e-15);
        assert_eq!(r.worst_pair, ((0, 1), (1, 0)));
        assert!(!r.is_jordan);
        assert!(r.r_unital < 1e-15);
        assert!(matches!(
            stormer_split(&psi, &tol()),
            Err(Error::NotJordan { .. })
        ));
    }

    #[test]
    fn stormer_examples() {
        for n in 2..=4 {
            let r = stormer_split(&SuperOperator::identity(n), &tol()).unwrap();
            let s = r.split.unwrap();
            assert!((&s.e - &ComplexMatrix::identity(n)).max_abs() < 1e-12);
            assert_eq!((s.p, s.q, s.kind), (1, 0, JordanKind::Hom));

            let r = stormer_split(&SuperOperator::transpose_map(n), &tol()).unwrap();
            let s = r.split.unwrap();
            assert!(s.e.max_abs() < 1e-12);
            assert_eq!((s.p, s.q, s.kind), (0, 1, JordanKind::Anti));
        }
        let r = stormer_split(&SuperOperator::identity(1), &tol()).unwrap();
        assert_eq!(r.split.unwrap().kind, JordanKind::Commutative);
    }

    #[test]
    fn stormer_mixed_embedding() {
        let w = haar_unitary(6, 21);
        let kinds = [
            EmbeddingKind::Id,
            EmbeddingKind::Transpose,
            EmbeddingKind::Id,
        ];
        let psi = SuperOperator::direct_sum_embedding(&kinds, &w, &tol()).unwrap();
        let r = stormer_split(&psi, &tol()).unwrap();
        let s = r.split.unwrap();
        let d = ComplexMatrix::from_real_diagonal(&[1., 1., 0., 0., 1., 1.]);
        let expected = &(&w * &d) * &w.adjoint();
        assert!((&s.e - &expected).operator_norm() < 1e-10);
        assert!((s.rank - 4.0).abs() < 1e-10);
        assert_eq!((s.p, s.q, s.kind), (2, 1, JordanKind::Mixed));
        assert!(s.r_hom <= 1e-8 && s.r_anti <= 1e-8 && s.r_central <= 1e-8);
    }

    #[test]
    fn stormer_rejects_non_unital() {
        let half = ComplexMatrix::identity(2).scale_real(0.5);
        // A ↦ A/2 is not Jordan; A ↦ P·A·P for a projection P is Jordan only on
        // the compressed corner, so use an explicit non-unital Jordan map
        // A ↦ A ⊕ 0.
        let psi = SuperOperator::from_fn(2, 3, |a| {
            ComplexMatrix::block_diagonal(&[a.clone(), ComplexMatrix::zeros(1, 1)])
        })
        .unwrap();
        assert!(jordan_check(&psi, &tol()).is_jordan);
        assert!(matches!(
            stormer_split(&psi, &tol()),
            Err(Error::NotUnital { .. })
        ));
        let scaled = SuperOperator::from_left_right(&half, &ComplexMatrix::identity(2)).unwrap();
        assert!(!jordan_check(&scaled, &tol()).is_jordan);
    }

    #[test]
    fn recover_identity_and_conjugations() {
        let w =
            recover_conjugating_unitary(&SuperOperator::identity(3), ConjugationKind::Hom, &tol())
                .unwrap();
        assert!((&w - &ComplexMatrix::identity(3)).max_abs() < 1e-14);

        for n in 1..=5 {
            let w0 = haar_unitary(n, 30 + n as u64);
            let psi = conj_map(&w0);
            let w = recover_conjugating_unitary(&psi, ConjugationKind::Hom, &tol()).unwrap();
            assert!(unitarity_defect(&w) < 1e-10);
            assert!((conj_map(&w).matrix() - psi.matrix()).max_abs() <= 1e-8);
            // Gauge: first column's leading entry real positive.
            let lead = w.get(0, 0);
            assert!(lead.re > 0.0 && lead.im.abs() < 1e-12);

            let anti = anti_conj_map(&w0);
            let w = recover_conjugating_unitary(&anti, ConjugationKind::Anti, &tol()).unwrap();
            assert!((anti_conj_map(&w).matrix() - anti.matrix()).max_abs() <= 1e-8);
        }
    }

    #[test]
    fn recover_rejects_degenerate_input() {
        let zero = SuperOperator::new(2, 2, ComplexMatrix::zeros(4, 4)).unwrap();
        assert!(matches!(
            recover_conjugating_unitary(&zero, ConjugationKind::Hom, &tol()),
            Err(Error::RankDeficient { .. })
        ));
        let rect = SuperOperator::new(2, 3, ComplexMatrix::zeros(9, 4)).unwrap();
        assert!(recover_conjugating_unitary(&rect, ConjugationKind::Hom, &tol()).is_err());
    }

    #[test]
    fn jordan_maps_preserve_order_structure() {
        let mut rng = seeded_rng(40);
        let t = tol();
        for n in 2..=4 {
            let w0 = haar_unitary(n, 50 + n as u64);
            for psi in [conj_map(&w0), anti_conj_map(&w0)] {
                // Positivity.
                let b = gaussian_matrix(&mut rng, n, n);
                let p = &b.adjoint() * &b;
                let (vals, _) = hermitian_eigen(&psi.apply(&p).unwrap()).unwrap();
                assert!(vals[0] >= -t.effective_square(n));
                assert!(psd_sqrt(&psi.apply(&p).unwrap(), &t).is_ok());
                // Orthogonal projections stay orthogonal.
                let p1 = random_projection(&mut rng, n, 1);
                let p2 = &ComplexMatrix::identity(n) - &p1;
                let prod = &psi.apply(&p1).unwrap() * &psi.apply(&p2).unwrap();
                assert!(prod.operator_norm() <= t.effective_square(n));
                // Contractivity.
                assert!(map_norm_lower_bound(&psi, 200, 7) <= 1.0 + t.abs);
                // Herstein dichotomy.
                let s = stormer_split(&psi, &t).unwrap().split.unwrap();
                let to_id = (&s.e - &ComplexMatrix::identity(n)).operator_norm();
                assert!(s.e.operator_norm().min(to_id) <= 1e-8);
            }
        }
    }
}
