//! Closed-form Cesàro limits and the Dirichlet-kernel error bounds.
//!
//! Every limit here is read off the spectral data of the unitary, never
//! from an average, so comparing the two is a real test.

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::num_core::{cis, normalize_angle, ComplexMatrix};
use crate::spectral::{
    for_each_assignment, is_zero_phase, Partition, SlotPattern, UnitaryOperator,
};

/// `N λ` this close to a multiple of `2π` counts as a whole number of
/// periods, where the Dirichlet mean vanishes identically.
pub const PERIOD_TOL: f64 = 1e-10;

/// `D_N(λ) = (1/N) Σ_{n<N} e^{inλ}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DirichletMean {
    pub angle: f64,
    pub n: usize,
}

impl DirichletMean {
    pub fn new(angle: f64, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("N must be at least 1".into()));
        }
        if !angle.is_finite() {
            return Err(Error::InvalidArgument(format!("angle {angle} is not finite")));
        }
        Ok(Self { angle, n })
    }

    /// `N λ = 2π j` for some `0 < j < N`.
    fn full_periods(&self) -> bool {
        let x = self.n as f64 * normalize_angle(self.angle);
        let j = (x / TAU).round();
        j >= 1.0 && j < self.n as f64 && (x - TAU * j).abs() <= PERIOD_TOL
    }

    pub fn value(&self) -> Complex64 {
        let lambda = normalize_angle(self.angle);
        if lambda == 0.0 {
            return Complex64::new(1.0, 0.0);
        }
        if self.full_periods() {
            return Complex64::new(0.0, 0.0);
        }
        let nf = self.n as f64;
        let ratio = (nf * lambda / 2.0).sin() / (nf * (lambda / 2.0).sin());
        cis(lambda * (nf - 1.0) / 2.0) * ratio
    }

    /// `min(1, 2 / (N |1 − e^{iλ}|))`, and `0` over whole periods.
    pub fn bound(&self) -> f64 {
        let lambda = normalize_angle(self.angle);
        if is_zero_phase(lambda) {
            return 1.0;
        }
        if self.full_periods() {
            return 0.0;
        }
        let gap = (Complex64::new(1.0, 0.0) - cis(lambda)).norm();
        (2.0 / (self.n as f64 * gap)).min(1.0)
    }
}

/// `D_N(λ)`, with `D_N(0) = 1`.
pub fn dirichlet_mean(angle: f64, n: usize) -> Result<Complex64> {
    Ok(DirichletMean::new(angle, n)?.value())
}

/// `E_1`, the projection onto invariant vectors (zero if there are none).
pub fn mean_ergodic_limit(u: &UnitaryOperator) -> ComplexMatrix {
    match u.index_of(0.0) {
        Some(i) => u.projection(i),
        None => ComplexMatrix::zeros(u.dim(), u.dim()),
    }
}

/// `max_{z ≠ 1} min(1, 2/(N|1 − z|))`, which dominates
/// `‖(1/N) Σ U^n − E_1‖_op = max_{z≠1} |D_N(z)|`.
pub fn mean_ergodic_error_bound(u: &UnitaryOperator, n: usize) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for theta in u.angles() {
        if !is_zero_phase(theta) {
            worst = worst.max(DirichletMean::new(theta, n)?.bound());
        }
    }
    Ok(worst)
}

fn check_ops(u: &UnitaryOperator, slots: usize, ops: &[ComplexMatrix]) -> Result<()> {
    if ops.len() + 1 != slots {
        return Err(Error::InvalidArgument(format!(
            "{slots} slots need {} operators, got {}",
            slots - 1,
            ops.len()
        )));
    }
    let d = u.dim();
    if ops.iter().any(|a| a.rows() != d || a.cols() != d) {
        return Err(Error::InvalidArgument(format!("operators must be {d}x{d}")));
    }
    Ok(())
}

/// `E_{ζ_1} A_1 E_{ζ_2} ⋯ A_{m−1} E_{ζ_m}`.
fn interleaved(projections: &[ComplexMatrix], indices: &[usize], ops: &[ComplexMatrix]) -> ComplexMatrix {
    let mut product = projections[indices[0]].clone();
    for (a, &i) in ops.iter().zip(&indices[1..]) {
        product = product.matmul(a).matmul(&projections[i]);
    }
    product
}

fn resonant_sum(u: &UnitaryOperator, pattern: &SlotPattern, ops: &[ComplexMatrix]) -> Result<ComplexMatrix> {
    check_ops(u, pattern.slots(), ops)?;
    let projections = u.projections();
    let mut sum = ComplexMatrix::zeros(u.dim(), u.dim());
    for_each_assignment(u, pattern, |idx, _, phases| {
        if phases.iter().all(|&ph| is_zero_phase(ph)) {
            sum.add_assign(&interleaved(&projections, idx, ops));
        }
    })?;
    Ok(sum)
}

/// Limit of the entangled mean: the sum over resonant assignments of the
/// interleaved eigenprojection products.
pub fn entangled_limit(
    u: &UnitaryOperator,
    partition: &Partition,
    ops: &[ComplexMatrix],
) -> Result<ComplexMatrix> {
    resonant_sum(u, &SlotPattern::from_partition(partition), ops)
}

/// Limit of `(1/N) Σ_n U^{n m_1} A_1 ⋯ A_{k−1} U^{n m_k}`.
pub fn power_chain_limit(
    u: &UnitaryOperator,
    exponents: &[i64],
    ops: &[ComplexMatrix],
) -> Result<ComplexMatrix> {
    resonant_sum(u, &SlotPattern::from_exponents(exponents)?, ops)
}

/// `ℰ(A) = Σ_z E_z A E_z`.
pub fn conditional_expectation(u: &UnitaryOperator, a: &ComplexMatrix) -> Result<ComplexMatrix> {
    check_ops(u, 2, std::slice::from_ref(a))?;
    let mut sum = ComplexMatrix::zeros(u.dim(), u.dim());
    for e in u.projections() {
        sum.add_assign(&e.matmul(a).matmul(&e));
    }
    Ok(sum)
}

/// Upper bound on `‖Γ_N − limit‖_op`: every non-resonant assignment adds
/// `Π_blocks bound(D_N(λ_j)) · Π ‖A_i‖`. Blocks that close a whole number
/// of periods at this `N` contribute zero.
pub fn cesaro_error_bound(
    u: &UnitaryOperator,
    pattern: &SlotPattern,
    op_norms: &[f64],
    n: usize,
) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidArgument("N must be at least 1".into()));
    }
    if op_norms.len() + 1 != pattern.slots() {
        return Err(Error::InvalidArgument(format!(
            "{} slots need {} operator norms, got {}",
            pattern.slots(),
            pattern.slots() - 1,
            op_norms.len()
        )));
    }
    let norm_product: f64 = op_norms.iter().product();
    let mut total = 0.0;
    for_each_assignment(u, pattern, |_, _, phases| {
        if phases.iter().all(|&ph| is_zero_phase(ph)) {
            return;
        }
        let weight: f64 = phases
            .iter()
            .map(|&ph| DirichletMean { angle: ph, n }.bound())
            .product();
        total += weight;
    })?;
    Ok(total * norm_product)
}

/// One term of `Γ_N − limit`: its assignment, block phases and the
/// interleaved projection product.
#[derive(Clone, Debug)]
pub struct NonResonantTerm {
    pub spectrum_indices: Vec<usize>,
    pub block_phases: Vec<f64>,
    pub term: ComplexMatrix,
}

/// `Γ_N = limit + Σ_terms (Π_j D_N(λ_j)) · term` for every `N`.
#[derive(Clone, Debug)]
pub struct LimitDecomposition {
    pub limit: ComplexMatrix,
    pub terms: Vec<NonResonantTerm>,
}

impl LimitDecomposition {
    pub fn new(u: &UnitaryOperator, pattern: &SlotPattern, ops: &[ComplexMatrix]) -> Result<Self> {
        check_ops(u, pattern.slots(), ops)?;
        let projections = u.projections();
        let mut limit = ComplexMatrix::zeros(u.dim(), u.dim());
        let mut terms = Vec::new();
        for_each_assignment(u, pattern, |idx, _, phases| {
            let term = interleaved(&projections, idx, ops);
            if phases.iter().all(|&ph| is_zero_phase(ph)) {
                limit.add_assign(&term);
            } else {
                terms.push(NonResonantTerm {
                    spectrum_indices: idx.to_vec(),
                    block_phases: phases.to_vec(),
                    term,
                });
            }
        })?;
        Ok(Self { limit, terms })
    }

    /// Exact finite mean at `N`, rebuilt from the spectral terms.
    pub fn reconstruct(&self, n: usize) -> Result<ComplexMatrix> {
        let mut out = self.limit.clone();
        for t in &self.terms {
            let mut weight = Complex64::new(1.0, 0.0);
            for &ph in &t.block_phases {
                weight *= dirichlet_mean(ph, n)?;
            }
            out.add_scaled(weight, &t.term);
        }
        Ok(out)
    }
}
