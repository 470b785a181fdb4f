//! Single-index Cesàro means `(1/N) Σ_n term(n)`, evaluated with running
//! sums so a whole schedule of `N` values costs one pass.

use std::time::Instant;

use num_complex::Complex64;

use super::{require_positive, AverageMode, AverageResult, AverageValue, OperatorChain};
use crate::error::{Error, Result};
use crate::num_core::{ComplexMatrix, ComplexVector};
use crate::spectral::{Partition, UnitaryOperator};

fn check_schedule(schedule: &[usize]) -> Result<()> {
    if schedule.first() == Some(&0) {
        return Err(Error::InvalidArgument("schedule entries must be at least 1".into()));
    }
    if schedule.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument(format!(
            "schedule must be strictly increasing, got {schedule:?}"
        )));
    }
    Ok(())
}

/// Adds `term(n)` for `n = 0, 1, …` and snapshots `sum / N` at every
/// schedule point.
fn running_means(
    schedule: &[usize],
    d: usize,
    mut add_term: impl FnMut(usize, &mut ComplexMatrix),
) -> Result<Vec<ComplexMatrix>> {
    check_schedule(schedule)?;
    let mut out = Vec::with_capacity(schedule.len());
    let Some(&last) = schedule.last() else {
        return Ok(out);
    };
    let mut sum = ComplexMatrix::zeros(d, d);
    let mut next = 0;
    for n in 0..last {
        add_term(n, &mut sum);
        if n + 1 == schedule[next] {
            out.push(sum.scale_real(1.0 / schedule[next] as f64));
            next += 1;
        }
    }
    Ok(out)
}

/// `(1/N) Σ_{n<N} U^n`.
pub fn mean_ergodic_average(u: &UnitaryOperator, n: usize) -> Result<ComplexMatrix> {
    require_positive(n)?;
    Ok(mean_ergodic_average_schedule(u, &[n])?.remove(0))
}

pub fn mean_ergodic_average_schedule(
    u: &UnitaryOperator,
    schedule: &[usize],
) -> Result<Vec<ComplexMatrix>> {
    let d = u.dim();
    let mut power = ComplexMatrix::identity(d);
    running_means(schedule, d, |_, sum| {
        sum.add_assign(&power);
        power = power.matmul(u.matrix());
    })
}

/// `(1/N) Σ_n U^n A U^{−n}`.
pub fn adjoint_average(u: &UnitaryOperator, a: &ComplexMatrix, n: usize) -> Result<ComplexMatrix> {
    require_positive(n)?;
    Ok(adjoint_average_schedule(u, a, &[n])?.remove(0))
}

pub fn adjoint_average_schedule(
    u: &UnitaryOperator,
    a: &ComplexMatrix,
    schedule: &[usize],
) -> Result<Vec<ComplexMatrix>> {
    check_square(u, a)?;
    let mut power = ComplexMatrix::identity(u.dim());
    running_means(schedule, u.dim(), |_, sum| {
        sum.add_assign(&power.matmul(a).matmul(&power.adjoint()));
        power = power.matmul(u.matrix());
    })
}

/// `(1/N) Σ_n U^n A U^n`, both powers positive.
pub fn diagonal_average(u: &UnitaryOperator, a: &ComplexMatrix, n: usize) -> Result<ComplexMatrix> {
    require_positive(n)?;
    Ok(diagonal_average_schedule(u, a, &[n])?.remove(0))
}

pub fn diagonal_average_schedule(
    u: &UnitaryOperator,
    a: &ComplexMatrix,
    schedule: &[usize],
) -> Result<Vec<ComplexMatrix>> {
    check_square(u, a)?;
    let mut power = ComplexMatrix::identity(u.dim());
    running_means(schedule, u.dim(), |_, sum| {
        sum.add_assign(&power.matmul(a).matmul(&power));
        power = power.matmul(u.matrix());
    })
}

fn check_square(u: &UnitaryOperator, a: &ComplexMatrix) -> Result<()> {
    if a.rows() != u.dim() || a.cols() != u.dim() {
        return Err(Error::InvalidArgument(format!(
            "operator must be {0}x{0}",
            u.dim()
        )));
    }
    Ok(())
}

/// `U^e` for any integer `e`, negative powers through the adjoint.
fn signed_power(u: &ComplexMatrix, e: i64) -> ComplexMatrix {
    let p = u.pow(e.unsigned_abs());
    if e < 0 {
        p.adjoint()
    } else {
        p
    }
}

/// `(1/N) Σ_n U^{n m_1} A_1 U^{n m_2} ⋯ A_{k−1} U^{n m_k}`.
///
/// Any nonzero integer exponents are accepted; a negative exponent steps
/// with `U*`.
pub fn power_chain_average(
    u: &UnitaryOperator,
    exponents: &[i64],
    ops: &[ComplexMatrix],
    n: usize,
    mode: &AverageMode,
) -> Result<AverageResult> {
    require_positive(n)?;
    let start = Instant::now();
    let value = power_chain_average_schedule(u, exponents, ops, &[n], mode)?.remove(0);
    Ok(AverageResult::timed(n, start, value))
}

pub fn power_chain_average_schedule(
    u: &UnitaryOperator,
    exponents: &[i64],
    ops: &[ComplexMatrix],
    schedule: &[usize],
    mode: &AverageMode,
) -> Result<Vec<AverageValue>> {
    if exponents.is_empty() {
        return Err(Error::InvalidArgument("exponent list is empty".into()));
    }
    if exponents.contains(&0) {
        return Err(Error::InvalidArgument(format!(
            "exponents must be nonzero, got {exponents:?}"
        )));
    }
    if ops.len() + 1 != exponents.len() {
        return Err(Error::InvalidArgument(format!(
            "{} exponents need {} operators, got {}",
            exponents.len(),
            exponents.len() - 1,
            ops.len()
        )));
    }
    for a in ops {
        check_square(u, a)?;
    }
    let d = u.dim();
    mode.check_dim(d)?;
    let steps: Vec<ComplexMatrix> = exponents.iter().map(|&e| signed_power(u.matrix(), e)).collect();
    let mut walkers: Vec<ComplexMatrix> = exponents.iter().map(|_| ComplexMatrix::identity(d)).collect();

    match mode {
        AverageMode::Matrix => {
            let means = running_means(schedule, d, |_, sum| {
                let mut product = walkers[0].clone();
                for (a, w) in ops.iter().zip(&walkers[1..]) {
                    product = product.matmul(a).matmul(w);
                }
                sum.add_assign(&product);
                for (w, s) in walkers.iter_mut().zip(&steps) {
                    *w = w.matmul(s);
                }
            })?;
            Ok(means.into_iter().map(AverageValue::Matrix).collect())
        }
        AverageMode::Weak { x, y } => {
            // A 1x1 running sum holds the scalar.
            let y_row: Vec<Complex64> = y.as_slice().iter().map(|z| z.conj()).collect();
            let mut row = vec![Complex64::new(0.0, 0.0); d];
            let mut scratch = vec![Complex64::new(0.0, 0.0); d];
            let means = running_means(schedule, 1, |_, sum| {
                ComplexMatrix::row_mul_into(&y_row, &walkers[0], &mut row);
                for (a, w) in ops.iter().zip(&walkers[1..]) {
                    ComplexMatrix::row_mul_into(&row, a, &mut scratch);
                    ComplexMatrix::row_mul_into(&scratch, w, &mut row);
                }
                let term: Complex64 = row.iter().zip(x.as_slice()).map(|(r, xi)| r * xi).sum();
                sum[(0, 0)] += term;
                for (w, s) in walkers.iter_mut().zip(&steps) {
                    *w = w.matmul(s);
                }
            })?;
            Ok(means
                .into_iter()
                .map(|s| AverageValue::Scalar(s[(0, 0)]))
                .collect())
        }
    }
}

/// `A = u v*`, so `A x = <x, v> u`.
#[derive(Clone, Debug)]
pub struct RankOneFactor {
    pub u: ComplexVector,
    pub v: ComplexVector,
}

impl RankOneFactor {
    pub fn new(u: ComplexVector, v: ComplexVector) -> Result<Self> {
        if u.dim() != v.dim() {
            return Err(Error::InvalidArgument("rank-one factor dimensions differ".into()));
        }
        Ok(Self { u, v })
    }

    pub fn to_matrix(&self) -> ComplexMatrix {
        ComplexMatrix::outer(&self.u, &self.v)
    }

    /// Splits a rank-at-most-one matrix. The largest column becomes `u`;
    /// anything left over beyond `tol · ‖A‖_F` means the rank exceeds one.
    pub fn from_matrix(a: &ComplexMatrix, tol: f64) -> Result<Self> {
        let d = a.rows();
        if !a.is_square() {
            return Err(Error::InvalidArgument("rank-one factor must be square".into()));
        }
        let norm = a.frobenius_norm();
        if norm == 0.0 {
            return Ok(Self {
                u: ComplexVector::zeros(d),
                v: ComplexVector::zeros(d),
            });
        }
        let pivot = (0..d)
            .max_by(|&i, &j| {
                let ni = a.column(i).norm();
                let nj = a.column(j).norm();
                ni.total_cmp(&nj)
            })
            .unwrap_or(0);
        let u = a.column(pivot);
        let uu = u.norm() * u.norm();
        let v: Vec<Complex64> = (0..d).map(|j| (a.column(j).inner(&u) / uu).conj()).collect();
        let factor = Self {
            u,
            v: ComplexVector::from(v),
        };
        let residual = a.max_abs_diff(&factor.to_matrix());
        if residual > tol * norm {
            return Err(Error::InvalidArgument(format!(
                "operator is not rank one (residual {residual:.3e})"
            )));
        }
        Ok(factor)
    }
}

/// Weak entangled mean through the block factorization
/// `Π_j (1/N) Σ_n Π_{p: α(p)=j} <U^n x_p, y_p>`, where slot `p` pairs the
/// vector to its right (`x` or `u_p`) with the one to its left (`y` or
/// `v_{p−1}`). Cost `m·N·dim²`.
///
/// The chain's operators must be rank one to within `1e-10` relative.
pub fn rank_one_factorized_weak_average(
    chain: &OperatorChain,
    x: &ComplexVector,
    y: &ComplexVector,
    n: usize,
) -> Result<Complex64> {
    let factors = chain
        .operators()
        .iter()
        .map(|a| RankOneFactor::from_matrix(a, 1e-10))
        .collect::<Result<Vec<_>>>()?;
    factorized(chain.unitary(), chain.partition(), &factors, x, y, n)
}

fn factorized(
    u: &ComplexMatrix,
    partition: &Partition,
    factors: &[RankOneFactor],
    x: &ComplexVector,
    y: &ComplexVector,
    n: usize,
) -> Result<Complex64> {
    require_positive(n)?;
    let m = partition.slots();
    let d = u.rows();
    if x.dim() != d || y.dim() != d {
        return Err(Error::InvalidArgument(format!("vectors must have dimension {d}")));
    }
    // seq[p][t] = <U^t x_p, y_p>
    let mut seq = Vec::with_capacity(m);
    for p in 0..m {
        let mut right = if p + 1 == m { x.clone() } else { factors[p].u.clone() };
        let left = if p == 0 { y } else { &factors[p - 1].v };
        let mut values = Vec::with_capacity(n);
        for _ in 0..n {
            values.push(right.inner(left));
            right = u.mul_vec(&right);
        }
        seq.push(values);
    }
    let mut total = Complex64::new(1.0, 0.0);
    for members in partition.block_members() {
        let mut block_sum = Complex64::new(0.0, 0.0);
        for t in 0..n {
            block_sum += members.iter().map(|&p| seq[p][t]).product::<Complex64>();
        }
        total *= block_sum / n as f64;
    }
    Ok(total)
}
