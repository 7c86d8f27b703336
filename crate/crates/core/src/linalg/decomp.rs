use nalgebra::{DMatrix, SymmetricEigen};

use super::matrix::{ComplexMatrix, C64};
use super::tolerance::Tolerance;
use crate::error::{Error, Result};

const EIG_EPS: f64 = 5.0 * f64::EPSILON;
const EIG_MAX_ITER: usize = 100_000;
const JACOBI_MAX_SWEEPS: usize = 80;

/// Thin singular value decomposition `a = u · diag(sigma) · vh`.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: ComplexMatrix,
    /// Descending, nonnegative.
    pub sigma: Vec<f64>,
    pub vh: ComplexMatrix,
}

impl Svd {
    pub fn rank(&self, threshold: f64) -> usize {
        self.sigma.iter().filter(|&&s| s > threshold).count()
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        let k = self.sigma.len();
        let mut us = self.u.as_dmatrix().clone();
        for j in 0..k {
            let s = self.sigma[j];
            us.column_mut(j).iter_mut().for_each(|z| *z *= s);
        }
        ComplexMatrix::wrap(us * self.vh.as_dmatrix())
    }
}

/// One-sided Jacobi on the columns of `b` (rows ≥ cols). Returns the rotated
/// columns and the accumulated right factor.
fn jacobi_columns(mut b: DMatrix<C64>) -> Result<(DMatrix<C64>, DMatrix<C64>)> {
    let (m, n) = b.shape();
    let mut v = DMatrix::<C64>::identity(n, n);
    let eps = 2.0 * (m.max(1) as f64) * f64::EPSILON;
    let negligible = (f64::EPSILON * b.norm()).powi(2);
    for _ in 0..JACOBI_MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let mut alpha = 0.0;
                let mut beta = 0.0;
                let mut gamma = C64::new(0.0, 0.0);
                for i in 0..m {
                    let x = b[(i, p)];
                    let y = b[(i, q)];
                    alpha += x.norm_sqr();
                    beta += y.norm_sqr();
                    gamma += x.conj() * y;
                }
                let g = gamma.norm();
                if g == 0.0
                    || alpha.min(beta) <= negligible
                    || g <= eps * (alpha.sqrt() * beta.sqrt())
                {
                    continue;
                }
                rotated = true;
                let phase = (gamma / g).conj();
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + zeta.hypot(1.0));
                let c = 1.0 / t.hypot(1.0);
                let s = c * t;
                rotate(&mut b, p, q, c, s, phase);
                rotate(&mut v, p, q, c, s, phase);
            }
        }
        if !rotated {
            return Ok((b, v));
        }
    }
    Err(Error::Convergence)
}

fn rotate(a: &mut DMatrix<C64>, p: usize, q: usize, c: f64, s: f64, phase: C64) {
    for i in 0..a.nrows() {
        let x = a[(i, p)];
        let y = a[(i, q)] * phase;
        a[(i, p)] = x * c - y * s;
        a[(i, q)] = x * s + y * c;
    }
}

/// Replaces the columns flagged in `missing` with an orthonormal completion
/// of the remaining ones.
fn complete_orthonormal(u: &mut DMatrix<C64>, missing: &[bool]) {
    let m = u.nrows();
    let mut basis: Vec<usize> = (0..u.ncols()).filter(|&j| !missing[j]).collect();
    let mut candidate = 0;
    for j in (0..u.ncols()).filter(|&j| missing[j]) {
        while candidate < m {
            let mut w = nalgebra::DVector::<C64>::zeros(m);
            w[candidate] = C64::new(1.0, 0.0);
            candidate += 1;
            for _ in 0..2 {
                for &k in &basis {
                    let col = u.column(k);
                    let proj = col.dotc(&w);
                    w -= col * proj;
                }
            }
            let norm = w.norm();
            if norm > 0.5 {
                u.set_column(j, &(w / C64::new(norm, 0.0)));
                basis.push(j);
                break;
            }
        }
    }
}

/// Thin SVD of a matrix with at least as many rows as columns.
fn tall_svd(a: DMatrix<C64>) -> Result<Svd> {
    let (m, n) = a.shape();
    let (q, r) = if m > n {
        let qr = a.qr();
        (Some(qr.q()), qr.r())
    } else {
        (None, a)
    };
    let (b, v) = jacobi_columns(r)?;
    let norms: Vec<f64> = (0..n).map(|j| b.column(j).norm()).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| norms[y].total_cmp(&norms[x]));
    let sigma: Vec<f64> = order.iter().map(|&j| norms[j]).collect();
    let floor = f64::EPSILON * b.norm();
    let mut u = DMatrix::<C64>::zeros(n, n);
    let mut missing = vec![false; n];
    for (k, &j) in order.iter().enumerate() {
        if sigma[k] > floor {
            u.set_column(k, &(b.column(j) / C64::new(sigma[k], 0.0)));
        } else {
            missing[k] = true;
        }
    }
    complete_orthonormal(&mut u, &missing);
    let u = match q {
        Some(q) => q * u,
        None => u,
    };
    let vh = DMatrix::from_fn(n, n, |r, c| v[(c, order[r])].conj());
    Ok(Svd {
        u: ComplexMatrix::wrap(u),
        sigma,
        vh: ComplexMatrix::wrap(vh),
    })
}

/// Thin SVD computed by one-sided Jacobi rotations, preceded by a QR
/// reduction when the input is tall. Zero singular values get an orthonormal
/// completion in `u`.
pub fn svd(a: &ComplexMatrix) -> Result<Svd> {
    if a.rows() >= a.cols() {
        tall_svd(a.as_dmatrix().clone())
    } else {
        let t = tall_svd(a.as_dmatrix().adjoint())?;
        Ok(Svd {
            u: t.vh.adjoint(),
            sigma: t.sigma,
            vh: t.u.adjoint(),
        })
    }
}

pub fn singular_values(a: &ComplexMatrix) -> Result<Vec<f64>> {
    Ok(svd(a)?.sigma)
}

/// Largest singular value. Falls back to the Frobenius norm (an upper bound)
/// in the practically unreachable case that the SVD does not converge.
pub fn operator_norm(a: &ComplexMatrix) -> f64 {
    if a.shape() == (1, 1) {
        return a.get(0, 0).norm();
    }
    if a.max_abs() == 0.0 {
        return 0.0;
    }
    match singular_values(a) {
        Ok(s) => s.first().copied().unwrap_or(0.0),
        Err(_) => a.frobenius_norm(),
    }
}

/// Polar decomposition `a = w · p` of a square matrix, with `w = U·Vh` unitary
/// and `p = Vhᴴ·Σ·Vh` positive semidefinite.
pub fn polar_unitary(a: &ComplexMatrix) -> Result<(ComplexMatrix, ComplexMatrix)> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            what: "polar decomposition input",
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    let dec = svd(a)?;
    let w = &dec.u * &dec.vh;
    let v = dec.vh.adjoint();
    let mut vs = v.as_dmatrix().clone();
    for (j, &s) in dec.sigma.iter().enumerate() {
        vs.column_mut(j).iter_mut().for_each(|z| *z *= s);
    }
    let p = ComplexMatrix::wrap(vs * dec.vh.as_dmatrix()).hermitian_part();
    Ok((w, p))
}

/// Eigen-decomposition of a Hermitian matrix: ascending eigenvalues and the
/// matching orthonormal eigenvectors as columns. Only the Hermitian part of
/// the input is used.
pub fn hermitian_eigen(h: &ComplexMatrix) -> Result<(Vec<f64>, ComplexMatrix)> {
    if !h.is_square() {
        return Err(Error::NotSquare {
            what: "hermitian eigenproblem input",
            rows: h.rows(),
            cols: h.cols(),
        });
    }
    let herm = h.hermitian_part();
    let eig = SymmetricEigen::try_new(herm.into_dmatrix(), EIG_EPS, EIG_MAX_ITER)
        .ok_or(Error::Convergence)?;
    let n = eig.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    Ok((values, ComplexMatrix::wrap(vectors)))
}

/// `Q · diag(f(λ)) · Qᴴ` for the Hermitian part of `h`.
pub fn hermitian_function(h: &ComplexMatrix, f: impl Fn(f64) -> C64) -> Result<ComplexMatrix> {
    let (values, q) = hermitian_eigen(h)?;
    let d: Vec<C64> = values.into_iter().map(f).collect();
    Ok(&(&q * &ComplexMatrix::from_diagonal(&d)) * &q.adjoint())
}

/// `exp(i·t·h)` for Hermitian `h`.
pub fn expm_i_hermitian(h: &ComplexMatrix, t: f64) -> Result<ComplexMatrix> {
    hermitian_function(h, |lambda| C64::from_polar(1.0, t * lambda))
}

/// Positive square root of a Hermitian positive semidefinite matrix.
/// Eigenvalues in `[-tol, 0)` are clamped to zero.
pub fn psd_sqrt(p: &ComplexMatrix, tol: &Tolerance) -> Result<ComplexMatrix> {
    if !p.is_square() {
        return Err(Error::NotSquare {
            what: "psd_sqrt input",
            rows: p.rows(),
            cols: p.cols(),
        });
    }
    let eff = tol.effective_square(p.rows());
    let defect = p.hermitian_defect();
    if defect > eff {
        return Err(Error::NotHermitian { defect });
    }
    let (values, q) = hermitian_eigen(p)?;
    if values[0] < -eff {
        return Err(Error::NotPositive {
            min_eigenvalue: values[0],
        });
    }
    let d: Vec<C64> = values
        .into_iter()
        .map(|l| C64::new(l.max(0.0).sqrt(), 0.0))
        .collect();
    Ok((&(&q * &ComplexMatrix::from_diagonal(&d)) * &q.adjoint()).hermitian_part())
}

/// Orthogonal projection onto `∩ ker(M)` over `ms`, all with `dim` columns.
///
/// The kernel is read off the SVD of the vertically stacked family; singular
/// values at or below `tol.effective(max_rows, dim)` count as zero. An empty
/// family yields the identity.
pub fn null_space_projection(
    dim: usize,
    ms: &[ComplexMatrix],
    tol: &Tolerance,
) -> Result<ComplexMatrix> {
    if let Some(bad) = ms.iter().find(|m| m.cols() != dim) {
        return Err(Error::DimensionMismatch {
            op: "null_space_projection",
            lhs: (bad.rows(), dim),
            rhs: bad.shape(),
        });
    }
    if ms.is_empty() {
        return Ok(ComplexMatrix::identity(dim));
    }
    let max_rows = ms.iter().map(|m| m.rows()).max().unwrap_or(1);
    let threshold = tol.effective(max_rows, dim);

    let mut blocks: Vec<ComplexMatrix> = ms.to_vec();
    let total_rows: usize = blocks.iter().map(|b| b.rows()).sum();
    if total_rows < dim {
        // Pad so the right singular vectors span all of C^dim.
        blocks.push(ComplexMatrix::zeros(dim - total_rows, dim));
    }
    let stacked = ComplexMatrix::vstack(&blocks)?;
    if stacked.max_abs() == 0.0 {
        return Ok(ComplexMatrix::identity(dim));
    }
    let dec = svd(&stacked)?;
    let vh = dec.vh.as_dmatrix();
    let mut q = DMatrix::<C64>::zeros(dim, dim);
    for k in 0..dec.sigma.len() {
        if dec.sigma[k] <= threshold {
            let row = vh.row(k);
            // v_k = conj(row k of Vh); accumulate v_k v_kᴴ.
            for r in 0..dim {
                let vr = row[r].conj();
                for c in 0..dim {
                    q[(r, c)] += vr * row[c];
                }
            }
        }
    }
    Ok(ComplexMatrix::wrap(q).hermitian_part())
}

/// `(‖aᴴa − I‖, ‖aaᴴ − I‖)` in operator norm.
pub fn isometry_defects(a: &ComplexMatrix) -> (f64, f64) {
    let ah = a.adjoint();
    let left = (&(&ah * a) - &ComplexMatrix::identity(a.cols())).operator_norm();
    let right = (&(a * &ah) - &ComplexMatrix::identity(a.rows())).operator_norm();
    (left, right)
}

/// `max(‖aᴴa − I‖, ‖aaᴴ − I‖)`; zero exactly for unitaries.
pub fn unitarity_defect(a: &ComplexMatrix) -> f64 {
    let (l, r) = isometry_defects(a);
    l.max(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::matrix::{I, ONE, ZERO};
    use crate::linalg::random::{gaussian_matrix, haar_unitary, seeded_rng};

    fn close(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
        (a - b).operator_norm()
    }

    /// Power iteration on AᴴA, independent of the SVD path.
    fn power_iteration_norm(a: &ComplexMatrix) -> f64 {
        let g = &a.adjoint() * a;
        let n = g.cols();
        let mut x = ComplexMatrix::column(&vec![C64::new(1.0, 0.3); n]);
        let mut lambda = 0.0;
        for _ in 0..5000 {
            let y = &g * &x;
            let norm = y.frobenius_norm();
            if norm == 0.0 {
                return 0.0;
            }
            let next = norm / x.frobenius_norm();
            x = y.scale_real(1.0 / norm);
            if (next - lambda).abs() < 1e-15 * next {
                lambda = next;
                break;
            }
            lambda = next;
        }
        lambda.sqrt()
    }

    #[test]
    fn operator_norm_examples() {
        assert!((haar_unitary(4, 3).operator_norm() - 1.0).abs() < 1e-12);
        assert!(
            (ComplexMatrix::from_real_diagonal(&[3.0, 1.0]).operator_norm() - 3.0).abs() < 1e-14
        );
        let mut rng = seeded_rng(11);
        for n in 1..6 {
            let a = gaussian_matrix(&mut rng, n, n);
            let oracle = power_iteration_norm(&a);
            assert!((a.operator_norm() - oracle).abs() < 1e-10, "n={n}");
        }
    }

    #[test]
    fn svd_identity_and_rank_one() {
        let dec = svd(&ComplexMatrix::identity(3)).unwrap();
        assert!(dec.sigma.iter().all(|&s| (s - 1.0).abs() < 1e-15));
        assert!(close(&(&dec.u * &dec.vh), &ComplexMatrix::identity(3)) < 1e-14);

        let x = ComplexMatrix::column(&[C64::new(1.0, 1.0), C64::new(0.0, 2.0), ONE]);
        let y = ComplexMatrix::column(&[C64::new(3.0, 0.0), C64::new(0.0, -4.0), ZERO]);
        let a = &x * &y.adjoint();
        let dec = svd(&a).unwrap();
        let expected = x.frobenius_norm() * y.frobenius_norm();
        assert!((dec.sigma[0] - expected).abs() < 1e-12);
        assert!(dec.sigma[1..].iter().all(|&s| s < 1e-12));
    }

    #[test]
    fn svd_reconstruction_residual() {
        let mut rng = seeded_rng(5);
        for &(r, c) in &[(3, 3), (5, 2), (2, 6), (8, 8)] {
            let a = gaussian_matrix(&mut rng, r, c);
            let dec = svd(&a).unwrap();
            assert!(dec.sigma.windows(2).all(|w| w[0] >= w[1]));
            assert!(close(&dec.reconstruct(), &a) <= 1e-12 * a.operator_norm());
            let k = dec.sigma.len();
            assert!(close(&(&dec.u.adjoint() * &dec.u), &ComplexMatrix::identity(k)) < 1e-12);
            assert!(close(&(&dec.vh * &dec.vh.adjoint()), &ComplexMatrix::identity(k)) < 1e-12);
        }
    }

    #[test]
    fn svd_of_exactly_rank_deficient_products() {
        let mut rng = seeded_rng(17);
        for trial in 0..600 {
            let (m, n) = (1 + trial % 7, 1 + (trial / 7) % 6);
            let rank = trial % (m.min(n) + 1);
            let a = if rank == 0 {
                ComplexMatrix::zeros(m, n)
            } else {
                &gaussian_matrix(&mut rng, m, rank) * &gaussian_matrix(&mut rng, rank, n)
            };
            let dec = svd(&a).unwrap();
            let k = m.min(n);
            assert!(close(&dec.reconstruct(), &a) <= 1e-12 * a.max_abs().max(1.0));
            assert!(close(&(&dec.u.adjoint() * &dec.u), &ComplexMatrix::identity(k)) < 1e-12);
            assert!(close(&(&dec.vh * &dec.vh.adjoint()), &ComplexMatrix::identity(k)) < 1e-12);
            assert!(dec.rank(1e-9) == rank);
        }
    }

    #[test]
    fn polar_examples() {
        let u = haar_unitary(3, 9);
        let (w, p) = polar_unitary(&u).unwrap();
        assert!(close(&w, &u) < 1e-12);
        assert!(close(&p, &ComplexMatrix::identity(3)) < 1e-12);

        let singular = ComplexMatrix::from_real_diagonal(&[2.0, 0.0]);
        let (w, p) = polar_unitary(&singular).unwrap();
        assert!(unitarity_defect(&w) < 1e-12);
        assert!(close(&(&w * &p), &singular) < 1e-12);
        assert!(close(&p, &singular) < 1e-12);

        let zero = ComplexMatrix::zeros(3, 3);
        let (w, p) = polar_unitary(&zero).unwrap();
        assert!(unitarity_defect(&w) < 1e-12);
        assert!(p.max_abs() == 0.0);

        let mut rng = seeded_rng(17);
        for n in 2..7 {
            let a = gaussian_matrix(&mut rng, n, n);
            let (w, p) = polar_unitary(&a).unwrap();
            assert!(close(&(&w * &p), &a) < 1e-12 * a.operator_norm().max(1.0));
            assert!(unitarity_defect(&w) < 1e-12);
            let (vals, _) = hermitian_eigen(&p).unwrap();
            assert!(vals[0] > -1e-12);
        }
        assert!(polar_unitary(&ComplexMatrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn polar_unitary_on_rank_deficient() {
        let mut rng = seeded_rng(23);
        for n in 2..7 {
            let x = gaussian_matrix(&mut rng, n, 1);
            let y = gaussian_matrix(&mut rng, 1, n);
            let (w, _) = polar_unitary(&(&x * &y)).unwrap();
            assert!(unitarity_defect(&w) < 1e-12);
        }
    }

    #[test]
    fn psd_sqrt_examples() {
        let tol = Tolerance::default();
        let r = psd_sqrt(&ComplexMatrix::identity(3), &tol).unwrap();
        assert!(close(&r, &ComplexMatrix::identity(3)) < 1e-14);
        let r = psd_sqrt(&ComplexMatrix::from_real_diagonal(&[4.0, 9.0]), &tol).unwrap();
        assert!(close(&r, &ComplexMatrix::from_real_diagonal(&[2.0, 3.0])) < 1e-14);

        let mut rng = seeded_rng(2);
        let b = gaussian_matrix(&mut rng, 5, 5);
        let p = &b.adjoint() * &b;
        let r = psd_sqrt(&p, &tol).unwrap();
        assert!(close(&(&r * &r), &p) <= tol.effective_square(5));
        assert!(r.hermitian_defect() < 1e-14);

        let bad = ComplexMatrix::new(2, 2, vec![ONE, I, I, ONE]).unwrap();
        assert!(matches!(
            psd_sqrt(&bad, &tol),
            Err(Error::NotHermitian { .. })
        ));
        let neg = ComplexMatrix::from_real_diagonal(&[1.0, -0.5]);
        assert!(matches!(
            psd_sqrt(&neg, &tol),
            Err(Error::NotPositive { .. })
        ));
        let tiny_neg = ComplexMatrix::from_real_diagonal(&[1.0, -1e-12]);
        assert!(psd_sqrt(&tiny_neg, &tol).is_ok());
    }

    #[test]
    fn null_space_examples() {
        let tol = Tolerance::default();
        let q = null_space_projection(3, &[ComplexMatrix::identity(3)], &tol).unwrap();
        assert!(q.max_abs() < 1e-14);
        let q = null_space_projection(2, &[ComplexMatrix::unit(2, 0, 0)], &tol).unwrap();
        assert!(close(&q, &ComplexMatrix::unit(2, 1, 1)) < 1e-14);
        let q = null_space_projection(4, &[], &tol).unwrap();
        assert_eq!(q, ComplexMatrix::identity(4));
        assert!(null_space_projection(4, &[ComplexMatrix::identity(3)], &tol).is_err());
    }

    #[test]
    fn null_space_recovers_constructed_kernel() {
        let tol = Tolerance::default();
        let mut rng = seeded_rng(31);
        for (n, k) in [(4usize, 1usize), (5, 2), (6, 3), (3, 2)] {
            // Kernel spanned by the first k columns of a Haar unitary.
            let u = haar_unitary(n, 100 + n as u64);
            let mut kernel_basis = ComplexMatrix::zeros(n, k).into_dmatrix();
            let mut complement = ComplexMatrix::zeros(n, n - k).into_dmatrix();
            kernel_basis.copy_from(&u.as_dmatrix().columns(0, k));
            complement.copy_from(&u.as_dmatrix().columns(k, n - k));
            let kb = ComplexMatrix::wrap(kernel_basis);
            let cb = ComplexMatrix::wrap(complement);
            let expected = &kb * &kb.adjoint();
            // Wide M whose row space is the complement; split into two blocks.
            let g1 = gaussian_matrix(&mut rng, 2, n - k);
            let g2 = gaussian_matrix(&mut rng, n, n - k);
            let m1 = &g1 * &cb.adjoint();
            let m2 = &g2 * &cb.adjoint();
            let q = null_space_projection(n, &[m1.clone(), m2.clone()], &tol).unwrap();
            assert!(close(&q, &expected) < 1e-10, "n={n} k={k}");
            assert!(close(&(&q * &q), &q) < 1e-12);
            assert!((&m1 * &q).operator_norm() < 1e-10);
        }
    }

    #[test]
    fn exponential_is_unitary() {
        let mut rng = seeded_rng(4);
        let g = gaussian_matrix(&mut rng, 4, 4);
        let h = g.hermitian_part();
        let u = expm_i_hermitian(&h, 0.5).unwrap();
        assert!(unitarity_defect(&u) < 1e-12);
        let back = expm_i_hermitian(&h, -0.5).unwrap();
        assert!(close(&(&u * &back), &ComplexMatrix::identity(4)) < 1e-12);
    }
}
