use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

use super::matrix::{ComplexMatrix, C64, ONE};

/// Generator used for every seeded draw in the crate.
pub type SeededRng = ChaCha20Rng;

/// Name recorded in reports next to the seed.
pub const RNG_NAME: &str = "ChaCha20Rng (rand_chacha 0.9, seed_from_u64)";

pub fn seeded_rng(seed: u64) -> SeededRng {
    SeededRng::seed_from_u64(seed)
}

/// Standard complex Gaussian: real and imaginary parts i.i.d. `N(0, 1/2)`.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn gaussian_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> ComplexMatrix {
    let entries = (0..rows * cols).map(|_| complex_gaussian(rng)).collect();
    ComplexMatrix::new(rows, cols, entries).expect("gaussian entries are finite")
}

/// Haar-distributed unitary: QR of a complex Ginibre matrix with the phases
/// of `R`'s diagonal moved into `Q`.
pub fn haar_unitary_with<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ComplexMatrix {
    assert!(n >= 1, "haar_unitary needs n >= 1");
    loop {
        let z = gaussian_matrix(rng, n, n).into_dmatrix();
        let qr = z.qr();
        let r = qr.r();
        let mut q = qr.q();
        // A zero pivot has probability zero; resample rather than guess a phase.
        if (0..n).any(|k| r[(k, k)].norm() == 0.0) {
            continue;
        }
        for k in 0..n {
            let d = r[(k, k)];
            let phase = d / d.norm();
            q.column_mut(k).iter_mut().for_each(|x| *x *= phase);
        }
        return ComplexMatrix::wrap(q);
    }
}

pub fn haar_unitary(n: usize, seed: u64) -> ComplexMatrix {
    haar_unitary_with(&mut seeded_rng(seed), n)
}

/// Random Hermitian matrix with operator norm exactly 1 (up to rounding),
/// or the identity when the draw is degenerate.
pub fn hermitian_unit_contraction<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ComplexMatrix {
    let h = gaussian_matrix(rng, n, n).hermitian_part();
    let norm = h.operator_norm();
    if norm == 0.0 {
        return ComplexMatrix::identity(n);
    }
    h.scale_real(1.0 / norm)
}

/// `U · diag(s) · V` with Haar `U`, `V` and `s` uniform in `[0, 1]`.
pub fn random_contraction<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ComplexMatrix {
    let u = haar_unitary_with(rng, n);
    let v = haar_unitary_with(rng, n);
    let s: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
    &(&u * &ComplexMatrix::from_real_diagonal(&s)) * &v
}

/// Orthogonal projection of rank `rank` in a Haar-random frame.
pub fn random_projection<R: Rng + ?Sized>(rng: &mut R, n: usize, rank: usize) -> ComplexMatrix {
    let u = haar_unitary_with(rng, n);
    let d: Vec<f64> = (0..n).map(|k| if k < rank { 1.0 } else { 0.0 }).collect();
    &(&u * &ComplexMatrix::from_real_diagonal(&d)) * &u.adjoint()
}

/// Partial isometry of rank `rank`: `U · (I_rank ⊕ 0) · V` with Haar `U`, `V`.
pub fn random_partial_isometry<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    rank: usize,
) -> ComplexMatrix {
    let u = haar_unitary_with(rng, n);
    let v = haar_unitary_with(rng, n);
    let d: Vec<C64> = (0..n)
        .map(|k| if k < rank { ONE } else { C64::new(0.0, 0.0) })
        .collect();
    &(&u * &ComplexMatrix::from_diagonal(&d)) * &v
}
