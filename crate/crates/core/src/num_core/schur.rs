//! Householder QR, Hessenberg reduction and the complex Schur form via
//! shifted QR sweeps with Givens rotations.

use num_complex::Complex64;

use super::ComplexMatrix;
use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Reflector `H = I − 2 v v* / (v* v)` that maps `x` onto a multiple of
/// the first basis vector. Returns `None` when `x` is already zero.
fn reflector(x: &[Complex64]) -> Option<(Vec<Complex64>, f64)> {
    let norm = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm == 0.0 {
        return None;
    }
    let phase = if x[0].norm() > 0.0 {
        x[0] / x[0].norm()
    } else {
        Complex64::new(1.0, 0.0)
    };
    let mut v = x.to_vec();
    v[0] += phase * norm;
    let vnorm2 = v.iter().map(|z| z.norm_sqr()).sum::<f64>();
    Some((v, vnorm2))
}

/// Applies `H` from the left to rows `offset..` of columns `cols`.
fn reflect_rows(m: &mut ComplexMatrix, v: &[Complex64], vnorm2: f64, offset: usize, cols: std::ops::Range<usize>) {
    for j in cols {
        let mut dot = ZERO;
        for (i, vi) in v.iter().enumerate() {
            dot += vi.conj() * m[(offset + i, j)];
        }
        let f = dot * (2.0 / vnorm2);
        for (i, vi) in v.iter().enumerate() {
            m[(offset + i, j)] -= vi * f;
        }
    }
}

/// Applies `H` from the right to columns `offset..` of rows `rows`.
fn reflect_cols(m: &mut ComplexMatrix, v: &[Complex64], vnorm2: f64, offset: usize, rows: std::ops::Range<usize>) {
    for i in rows {
        let mut dot = ZERO;
        for (l, vl) in v.iter().enumerate() {
            dot += m[(i, offset + l)] * vl;
        }
        let f = dot * (2.0 / vnorm2);
        for (l, vl) in v.iter().enumerate() {
            m[(i, offset + l)] -= f * vl.conj();
        }
    }
}

/// Householder QR of a square matrix: `a = q r`, `q` unitary, `r` upper
/// triangular.
pub fn householder_qr(a: &ComplexMatrix) -> (ComplexMatrix, ComplexMatrix) {
    assert!(a.is_square());
    let n = a.rows();
    let mut r = a.clone();
    let mut q = ComplexMatrix::identity(n);
    for k in 0..n.saturating_sub(1) {
        let x: Vec<_> = (k..n).map(|i| r[(i, k)]).collect();
        if let Some((v, vnorm2)) = reflector(&x) {
            reflect_rows(&mut r, &v, vnorm2, k, k..n);
            reflect_cols(&mut q, &v, vnorm2, k, 0..n);
        }
        for i in k + 1..n {
            r[(i, k)] = ZERO;
        }
    }
    (q, r)
}

/// Reduces `a` to upper Hessenberg form `h = q* a q`.
pub fn hessenberg(a: &ComplexMatrix) -> (ComplexMatrix, ComplexMatrix) {
    assert!(a.is_square());
    let n = a.rows();
    let mut h = a.clone();
    let mut q = ComplexMatrix::identity(n);
    for k in 0..n.saturating_sub(2) {
        let x: Vec<_> = (k + 1..n).map(|i| h[(i, k)]).collect();
        if let Some((v, vnorm2)) = reflector(&x) {
            reflect_rows(&mut h, &v, vnorm2, k + 1, 0..n);
            reflect_cols(&mut h, &v, vnorm2, k + 1, 0..n);
            reflect_cols(&mut q, &v, vnorm2, k + 1, 0..n);
        }
        for i in k + 2..n {
            h[(i, k)] = ZERO;
        }
    }
    (q, h)
}

/// Complex Schur decomposition `a = z t z*`.
#[derive(Clone, Debug)]
pub struct Schur {
    /// Unitary Schur vectors.
    pub z: ComplexMatrix,
    /// Upper triangular factor; its diagonal holds the eigenvalues.
    pub t: ComplexMatrix,
}

/// Givens rotation `[[c, s], [-conj(s), c]]` zeroing `b` in `(a, b)`.
fn givens(a: Complex64, b: Complex64) -> (f64, Complex64) {
    let na = a.norm();
    let nb = b.norm();
    if nb == 0.0 {
        return (1.0, ZERO);
    }
    if na == 0.0 {
        return (0.0, Complex64::new(1.0, 0.0));
    }
    let rho = na.hypot(nb);
    let c = na / rho;
    let s = (a / na) * b.conj() / rho;
    (c, s)
}

fn wilkinson_shift(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Complex64 {
    let half = (a - d) * 0.5;
    let disc = (half * half + b * c).sqrt();
    let mid = (a + d) * 0.5;
    let l1 = mid + disc;
    let l2 = mid - disc;
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

pub fn complex_schur(a: &ComplexMatrix) -> Result<Schur> {
    if !a.is_square() {
        return Err(Error::InvalidArgument("Schur form needs a square matrix".into()));
    }
    let n = a.rows();
    let (mut z, mut h) = hessenberg(a);
    if n == 1 {
        return Ok(Schur { z, t: h });
    }
    let eps = f64::EPSILON;
    let max_iters = 60 * n;
    let mut hi = n - 1;
    let mut iters_here = 0usize;
    let mut total = 0usize;
    let mut rotations: Vec<(f64, Complex64)> = Vec::with_capacity(n);

    while hi > 0 {
        // Deflation search.
        let mut lo = hi;
        while lo > 0 {
            let sub = h[(lo, lo - 1)].norm();
            let scale = h[(lo, lo)].norm() + h[(lo - 1, lo - 1)].norm();
            let scale = if scale == 0.0 { 1.0 } else { scale };
            if sub <= eps * scale {
                h[(lo, lo - 1)] = ZERO;
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            hi -= 1;
            iters_here = 0;
            continue;
        }
        iters_here += 1;
        total += 1;
        if total > max_iters {
            return Err(Error::NoConvergence(total));
        }

        let mu = if iters_here % 11 == 10 {
            // Exceptional shift to break cycles.
            h[(hi, hi)] + Complex64::new(h[(hi, hi - 1)].re.abs(), h[(hi, hi - 1)].im.abs()) * 0.75
        } else {
            wilkinson_shift(
                h[(hi - 1, hi - 1)],
                h[(hi - 1, hi)],
                h[(hi, hi - 1)],
                h[(hi, hi)],
            )
        };

        for i in lo..=hi {
            h[(i, i)] -= mu;
        }
        rotations.clear();
        for k in lo..hi {
            let (c, s) = givens(h[(k, k)], h[(k + 1, k)]);
            rotations.push((c, s));
            for j in k..n {
                let x = h[(k, j)];
                let y = h[(k + 1, j)];
                h[(k, j)] = x * c + s * y;
                h[(k + 1, j)] = -s.conj() * x + y * c;
            }
            h[(k + 1, k)] = ZERO;
        }
        for (idx, &(c, s)) in rotations.iter().enumerate() {
            let k = lo + idx;
            let row_end = (k + 2).min(hi);
            for i in 0..=row_end {
                let x = h[(i, k)];
                let y = h[(i, k + 1)];
                h[(i, k)] = x * c + y * s.conj();
                h[(i, k + 1)] = -x * s + y * c;
            }
            for i in 0..n {
                let x = z[(i, k)];
                let y = z[(i, k + 1)];
                z[(i, k)] = x * c + y * s.conj();
                z[(i, k + 1)] = -x * s + y * c;
            }
        }
        for i in lo..=hi {
            h[(i, i)] += mu;
        }
    }
    for j in 0..n {
        for i in j + 1..n {
            h[(i, j)] = ZERO;
        }
    }
    Ok(Schur { z, t: h })
}
