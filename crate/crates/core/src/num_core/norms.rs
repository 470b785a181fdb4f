use num_complex::Complex64;

use super::{complex_schur, ComplexMatrix, ComplexVector};
use crate::error::{Error, Result};

const MAX_POWER_ITERATIONS: usize = 200_000;

/// Largest singular value of `m`, to relative accuracy `tol`.
///
/// Power iteration on `m* m` from a fixed start vector; stops once the
/// residual `‖m* m v − ρ v‖` falls below `tol · ρ`.
pub fn operator_norm(m: &ComplexMatrix, tol: f64) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    let n = m.cols();
    let gram = m.adjoint().matmul(m);
    // Deterministic start with all coordinates distinct so it is not
    // orthogonal to a dominant singular vector of structured inputs.
    let mut v = ComplexVector::from(
        (0..n)
            .map(|i| Complex64::new(1.0 + 0.1 * i as f64, 0.05 * ((i * i) % 7) as f64))
            .collect::<Vec<_>>(),
    )
    .normalized();
    let mut rho = 0.0;
    for _ in 0..MAX_POWER_ITERATIONS {
        let w = gram.mul_vec(&v);
        let w_norm = w.norm();
        if w_norm == 0.0 {
            return Ok(0.0);
        }
        rho = v.inner(&w).re;
        let mut residual = w.clone();
        residual.add_scaled(Complex64::new(-rho, 0.0), &v);
        v = w.scale(Complex64::new(1.0 / w_norm, 0.0));
        // Some eigenvalue of m*m lies within the residual of rho.
        if residual.norm() <= tol * rho.abs() {
            break;
        }
    }
    Ok(rho.max(0.0).sqrt())
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(h: &ComplexMatrix) -> Result<Vec<f64>> {
    if !h.is_square() {
        return Err(Error::InvalidArgument("Hermitian eigenvalues need a square matrix".into()));
    }
    let s = complex_schur(h)?;
    let mut vals: Vec<f64> = s.t.diagonal().into_iter().map(|z| z.re).collect();
    vals.sort_by(|a, b| a.total_cmp(b));
    Ok(vals)
}

/// Singular values, descending.
pub fn singular_values(m: &ComplexMatrix) -> Result<Vec<f64>> {
    let gram = m.adjoint().matmul(m);
    let mut vals: Vec<f64> = hermitian_eigenvalues(&gram)?
        .into_iter()
        .map(|l| l.max(0.0).sqrt())
        .collect();
    vals.reverse();
    Ok(vals)
}

/// Trace norm `‖m‖₁ = Σ σ_i`.
pub fn trace_norm(m: &ComplexMatrix) -> Result<f64> {
    Ok(singular_values(m)?.iter().sum())
}
