//! Seeded random matrices for tests, sampling and decomposition.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::{c, identity, CMat, CVec};

pub use rand::SeedableRng;
pub type Rng64 = ChaCha8Rng;

pub fn rng(seed: u64) -> Rng64 {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian<R: Rng>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}

pub fn gaussian_complex<R: Rng>(rng: &mut R) -> crate::linalg::C64 {
    c(gaussian(rng), gaussian(rng))
}

pub fn gaussian_matrix<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> CMat {
    CMat::from_fn(rows, cols, |_, _| gaussian_complex(rng))
}

pub fn gaussian_vector<R: Rng>(rng: &mut R, n: usize) -> CVec {
    CVec::from_fn(n, |_, _| gaussian_complex(rng))
}

/// Random positive definite matrix `x x* + eps·1`.
pub fn positive_definite<R: Rng>(rng: &mut R, n: usize, eps: f64) -> CMat {
    let x = gaussian_matrix(rng, n, n);
    &x * x.adjoint() + identity(n).scale(eps)
}

/// Haar-ish random unitary (QR of a Gaussian matrix).
pub fn unitary<R: Rng>(rng: &mut R, n: usize) -> CMat {
    let qr = gaussian_matrix(rng, n, n).qr();
    let q = qr.q();
    let rr = qr.r();
    let mut out = q.clone();
    for j in 0..n {
        let d = rr[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { crate::linalg::ONE };
        for i in 0..n {
            out[(i, j)] = q[(i, j)] * phase;
        }
    }
    out
}

/// Random invertible matrix with condition number kept moderate.
pub fn invertible<R: Rng>(rng: &mut R, n: usize) -> CMat {
    gaussian_matrix(rng, n, n) + identity(n).scale(2.0)
}
