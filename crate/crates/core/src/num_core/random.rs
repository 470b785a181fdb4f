//! Seeded sampling.
//!
//! Every random object is drawn from a ChaCha20 generator keyed by the
//! user seed. Stream-splitting rule: the `i`-th matrix or vector requested
//! by one caller is drawn from stream `i` of that seed
//! (`ChaCha20Rng::seed_from_u64(seed)` followed by `set_stream(i)`), so the
//! draws do not depend on call order or on how work is scheduled across
//! threads.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

use super::{householder_qr, ComplexMatrix, ComplexVector};
use crate::error::{Error, Result};

/// Generator for stream `stream` of `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Standard complex normal: real and imaginary parts i.i.d. N(0, 1/2).
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn gaussian_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| complex_gaussian(rng))
}

pub fn gaussian_vector<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexVector {
    ComplexVector::from((0..dim).map(|_| complex_gaussian(rng)).collect::<Vec<_>>())
}

/// Unit vector drawn uniformly from the complex sphere.
pub fn random_unit_vector<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexVector {
    loop {
        let v = gaussian_vector(dim, rng);
        if v.norm() > 1e-8 {
            return v.normalized();
        }
    }
}

/// Haar-distributed unitary: QR of a complex Ginibre matrix with the
/// columns of `Q` rephased so that `R` has a positive diagonal.
pub fn haar_unitary_with<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<ComplexMatrix> {
    if dim == 0 {
        return Err(Error::InvalidArgument("dimension must be at least 1".into()));
    }
    let g = gaussian_matrix(dim, dim, rng);
    let (mut q, r) = householder_qr(&g);
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 {
            d / d.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        for i in 0..dim {
            q[(i, j)] *= phase;
        }
    }
    Ok(q)
}

/// Haar unitary for `(dim, seed)`, drawn from stream 0 of `seed`.
pub fn haar_unitary(dim: usize, seed: u64) -> Result<ComplexMatrix> {
    haar_unitary_with(dim, &mut stream_rng(seed, 0))
}

/// Random operator of rank at most `rank`, scaled to operator norm one.
pub fn random_low_rank<R: Rng + ?Sized>(dim: usize, rank: usize, rng: &mut R) -> ComplexMatrix {
    let rank = rank.clamp(1, dim);
    let left = gaussian_matrix(dim, rank, rng);
    let right = gaussian_matrix(rank, dim, rng);
    let m = left.matmul(&right);
    let norm = super::operator_norm(&m, 1e-13).unwrap_or(1.0);
    m.scale_real(1.0 / norm)
}
