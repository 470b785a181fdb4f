//! `α = Ad_U` acting on matrices: Cesàro means of `α^n(A)`, their
//! trace pairings against the conditional expectation, and the recurrence
//! scan of `s_N = (1/N) Σ_n ω(A α^{n m_1}(A) ⋯ α^{n m_l}(A))`.

use log::warn;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::averagers::{adjoint_average, adjoint_average_schedule, power_chain_average, AverageMode};
use crate::error::{Error, Result};
use crate::limits::{cesaro_error_bound, conditional_expectation, mean_ergodic_limit};
use crate::measure_model::positivity_onset;
use crate::num_core::{operator_norm, trace_norm, ComplexMatrix, ComplexVector, NORM_TOL};
use crate::spectral::{classify, SlotPattern, UnitaryOperator};

/// Tolerance for `UΩ = Ω` and `‖Ω‖ = 1`.
pub const INVARIANCE_TOL: f64 = 1e-10;

/// A unitary with the automorphism `A ↦ U A U*` and, optionally, an
/// invariant unit vector Ω defining the state `ω = <·Ω, Ω>`.
#[derive(Clone, Debug)]
pub struct CompactSystem {
    unitary: UnitaryOperator,
    omega: Option<ComplexVector>,
}

impl CompactSystem {
    pub fn new(unitary: UnitaryOperator) -> Self {
        Self {
            unitary,
            omega: None,
        }
    }

    pub fn with_omega(unitary: UnitaryOperator, omega: ComplexVector) -> Result<Self> {
        if omega.dim() != unitary.dim() {
            return Err(Error::InvalidArgument(format!(
                "Ω must have dimension {}",
                unitary.dim()
            )));
        }
        if (omega.norm() - 1.0).abs() > INVARIANCE_TOL {
            return Err(Error::PreconditionViolation(format!(
                "Ω must be a unit vector, has norm {}",
                omega.norm()
            )));
        }
        let moved = unitary.matrix().mul_vec(&omega);
        let defect = (&moved - &omega).norm();
        if defect > INVARIANCE_TOL {
            return Err(Error::PreconditionViolation(format!(
                "Ω is not invariant (‖UΩ − Ω‖ = {defect:.3e})"
            )));
        }
        Ok(Self {
            unitary,
            omega: Some(omega),
        })
    }

    pub fn unitary(&self) -> &UnitaryOperator {
        &self.unitary
    }

    pub fn omega(&self) -> Option<&ComplexVector> {
        self.omega.as_ref()
    }

    /// `ω(A) = <AΩ, Ω>`.
    pub fn state(&self, a: &ComplexMatrix) -> Result<Complex64> {
        let om = self
            .omega
            .as_ref()
            .ok_or_else(|| Error::InvalidState("no invariant vector Ω was set".into()))?;
        Ok(a.mul_vec(om).inner(om))
    }

    fn check_operator(&self, a: &ComplexMatrix) -> Result<()> {
        let d = self.unitary.dim();
        if a.rows() != d || a.cols() != d {
            return Err(Error::InvalidArgument(format!("operator must be {d}x{d}")));
        }
        Ok(())
    }
}

/// `α^n(A) = U^n A U^{−n}` for any integer `n`.
pub fn alpha_power(system: &CompactSystem, a: &ComplexMatrix, n: i64) -> Result<ComplexMatrix> {
    system.check_operator(a)?;
    let p = system.unitary.matrix().pow(n.unsigned_abs());
    Ok(if n >= 0 {
        p.matmul(a).matmul(&p.adjoint())
    } else {
        p.adjoint().matmul(a).matmul(&p)
    })
}

/// `(1/N) Σ_{n<N} α^n(A)`; the same code path as `adjoint_average`.
pub fn cesaro_alpha(system: &CompactSystem, a: &ComplexMatrix, n: usize) -> Result<ComplexMatrix> {
    adjoint_average(&system.unitary, a, n)
}

#[derive(Clone, Debug)]
pub struct TracePairingReport {
    pub schedule: Vec<usize>,
    /// `Tr(T (Avg_N(A) − ℰ(A)))`.
    pub values: Vec<Complex64>,
    /// `‖T‖₁ · cesaro_error_bound(N)`.
    pub bounds: Vec<f64>,
    pub trace_norm: f64,
    pub operator_norm: f64,
}

impl TracePairingReport {
    /// Every value sits inside its bound, with `slack` for rounding.
    pub fn within_bounds(&self, slack: f64) -> bool {
        self.values
            .iter()
            .zip(&self.bounds)
            .all(|(v, b)| v.norm() <= b + slack)
    }
}

pub fn trace_pairing_convergence(
    system: &CompactSystem,
    t: &ComplexMatrix,
    a: &ComplexMatrix,
    schedule: &[usize],
) -> Result<TracePairingReport> {
    system.check_operator(t)?;
    system.check_operator(a)?;
    let u = &system.unitary;
    let expectation = conditional_expectation(u, a)?;
    let means = adjoint_average_schedule(u, a, schedule)?;
    let t_norm = trace_norm(t)?;
    let a_norm = operator_norm(a, NORM_TOL)?;
    let pattern = SlotPattern::from_exponents(&[1, -1])?;
    let mut values = Vec::with_capacity(schedule.len());
    let mut bounds = Vec::with_capacity(schedule.len());
    for (mean, &n) in means.iter().zip(schedule) {
        values.push(t.matmul(&(mean - &expectation)).trace());
        bounds.push(t_norm * cesaro_error_bound(u, &pattern, &[a_norm], n)?);
    }
    Ok(TracePairingReport {
        schedule: schedule.to_vec(),
        values,
        bounds,
        trace_norm: t_norm,
        operator_norm: a_norm,
    })
}

/// `ω(A) E_1` when the point spectrum is `{1}` with a one-dimensional fixed
/// space. In finite dimension that forces dimension one; the nontrivial
/// weakly mixing cases live in the measure model.
pub fn weak_mixing_corollary_limit(system: &CompactSystem, a: &ComplexMatrix) -> Result<ComplexMatrix> {
    system.check_operator(a)?;
    let u = &system.unitary;
    if !classify(u).weakly_mixing {
        return Err(Error::PreconditionViolation(
            "the unitary is not weakly mixing (point spectrum must be {1}, simple)".into(),
        ));
    }
    let omega = match system.state(a) {
        Ok(w) => w,
        Err(_) => {
            // The fixed space is a line; any unit vector in it gives ω.
            let idx = u.index_of(0.0).expect("weakly mixing has a fixed vector");
            let om = u.eigenspace(idx).column(0);
            a.mul_vec(&om).inner(&om)
        }
    };
    Ok(mean_ergodic_limit(u).scale(omega))
}

#[derive(Clone, Debug)]
pub struct RecurrenceReport {
    /// Least `N_0` with `Re s_N > 0` for all `N_0 < N ≤ horizon`; `None`
    /// when `s_horizon` itself is not positive.
    pub n0: Option<usize>,
    /// `s_1, …, s_horizon`.
    pub trace: Vec<Complex64>,
    /// `ω(A)^{l+1}`.
    pub limit: Complex64,
}

fn check_increasing(exponents: &[i64]) -> Result<()> {
    if exponents.is_empty() || exponents[0] < 1 || exponents.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument(format!(
            "exponents must be positive and strictly increasing, got {exponents:?}"
        )));
    }
    Ok(())
}

/// `ω(A α^{n m_1}(A) ⋯ α^{n m_l}(A))` for one `n`.
fn recurrence_term(system: &CompactSystem, a: &ComplexMatrix, exponents: &[i64], n: i64) -> Result<Complex64> {
    let mut product = a.clone();
    for &m in exponents {
        product = product.matmul(&alpha_power(system, a, n * m)?);
    }
    system.state(&product)
}

/// Scans `s_N` for `N = 1..=horizon`. Terms are computed in parallel and
/// summed in `n` order.
pub fn recurrence_scan(
    system: &CompactSystem,
    a: &ComplexMatrix,
    exponents: &[i64],
    horizon: usize,
) -> Result<RecurrenceReport> {
    system.check_operator(a)?;
    check_increasing(exponents)?;
    if horizon == 0 {
        return Err(Error::InvalidArgument("horizon must be at least 1".into()));
    }
    let omega = system.state(a)?;
    if omega.re <= 0.0 {
        warn!("ω(A) = {omega} is not positive; positivity of s_N is not expected");
    }
    let terms = (0..horizon as i64)
        .into_par_iter()
        .map(|n| recurrence_term(system, a, exponents, n))
        .collect::<Result<Vec<_>>>()?;
    let mut trace = Vec::with_capacity(horizon);
    let mut sum = Complex64::new(0.0, 0.0);
    for (i, term) in terms.iter().enumerate() {
        sum += term;
        trace.push(sum / (i + 1) as f64);
    }
    let real: Vec<f64> = trace.iter().map(|s| s.re).collect();
    Ok(RecurrenceReport {
        n0: positivity_onset(&real),
        trace,
        limit: omega.powi(exponents.len() as i32 + 1),
    })
}

/// `s_N` through the telescoped chain
/// `<A U^{n d_1} A U^{n d_2} ⋯ A U^{n d_l} A Ω, Ω>`, `d_i = m_i − m_{i−1}`,
/// evaluated as a weak-mode power-chain mean.
pub fn recurrence_telescoped(
    system: &CompactSystem,
    a: &ComplexMatrix,
    exponents: &[i64],
    n: usize,
) -> Result<Complex64> {
    system.check_operator(a)?;
    check_increasing(exponents)?;
    let om = system
        .omega
        .as_ref()
        .ok_or_else(|| Error::InvalidState("no invariant vector Ω was set".into()))?;
    let mut prev = 0;
    let gaps: Vec<i64> = exponents
        .iter()
        .map(|&m| {
            let d = m - prev;
            prev = m;
            d
        })
        .collect();
    let ops = vec![a.clone(); gaps.len() - 1];
    let mode = AverageMode::Weak {
        x: a.mul_vec(om),
        y: a.adjoint().mul_vec(om),
    };
    Ok(power_chain_average(&system.unitary, &gaps, &ops, n, &mode)?.scalar())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num_core::random::{gaussian_matrix, random_low_rank};
    use crate::num_core::{haar_unitary, stream_rng};
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn haar_system(dim: usize, seed: u64) -> CompactSystem {
        CompactSystem::new(UnitaryOperator::from_matrix(haar_unitary(dim, seed).unwrap()).unwrap())
    }

    /// Ω = e_0 fixed, the rest of the spectrum spread out.
    fn pointed_system() -> CompactSystem {
        let u = UnitaryOperator::diagonal(&[0.0, 1.3, 2.9, 4.4]).unwrap();
        CompactSystem::with_omega(u, ComplexVector::basis(4, 0)).unwrap()
    }

    #[test]
    fn alpha_group_law() {
        let s = haar_system(4, 2);
        let a = gaussian_matrix(4, 4, &mut stream_rng(2, 1));
        assert!(alpha_power(&s, &a, 0).unwrap().max_abs_diff(&a) < 1e-15);
        let id = ComplexMatrix::identity(4);
        assert!(alpha_power(&s, &id, 7).unwrap().max_abs_diff(&id) < 1e-13);
        let back = alpha_power(&s, &alpha_power(&s, &a, -5).unwrap(), 5).unwrap();
        assert!(back.max_abs_diff(&a) < 1e-12);
        let b = gaussian_matrix(4, 4, &mut stream_rng(2, 2));
        let lhs = alpha_power(&s, &a.matmul(&b), 3).unwrap();
        let rhs = alpha_power(&s, &a, 3).unwrap().matmul(&alpha_power(&s, &b, 3).unwrap());
        assert!(lhs.max_abs_diff(&rhs) < 1e-12);
    }

    #[test]
    fn cesaro_alpha_is_adjoint_average() {
        let s = haar_system(6, 8);
        let a = gaussian_matrix(6, 6, &mut stream_rng(8, 1));
        let lhs = cesaro_alpha(&s, &a, 1024).unwrap();
        assert_eq!(lhs, adjoint_average(s.unitary(), &a, 1024).unwrap());
        let e = conditional_expectation(s.unitary(), &a).unwrap();
        let bound = cesaro_error_bound(
            s.unitary(),
            &SlotPattern::from_exponents(&[1, -1]).unwrap(),
            &[operator_norm(&a, NORM_TOL).unwrap()],
            1024,
        )
        .unwrap();
        assert!(operator_norm(&(&lhs - &e), NORM_TOL).unwrap() <= bound + 1e-9);

        let flip = CompactSystem::new(UnitaryOperator::diagonal(&[0.0, PI]).unwrap());
        let off = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
        assert_eq!(cesaro_alpha(&flip, &off, 2).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn trace_pairing_examples() {
        let flip = CompactSystem::new(UnitaryOperator::diagonal(&[0.0, PI]).unwrap());
        let upper = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        let id = ComplexMatrix::identity(2);
        let r = trace_pairing_convergence(&flip, &id, &upper, &[2, 4, 8]).unwrap();
        assert!(r.values.iter().all(|v| v.norm() == 0.0));

        let s = haar_system(5, 12);
        let mut rng = stream_rng(12, 3);
        let a = gaussian_matrix(5, 5, &mut rng);
        let x = crate::num_core::random::random_unit_vector(5, &mut rng);
        let y = crate::num_core::random::random_unit_vector(5, &mut rng);
        // Tr(x y* M) = <M x, y>.
        let t = ComplexMatrix::outer(&x, &y);
        let r = trace_pairing_convergence(&s, &t, &a, &[8, 64, 512]).unwrap();
        let e = conditional_expectation(s.unitary(), &a).unwrap();
        for (v, &n) in r.values.iter().zip(&r.schedule) {
            let direct = (&cesaro_alpha(&s, &a, n).unwrap() - &e).mul_vec(&x).inner(&y);
            assert!((v - direct).norm() < 1e-12);
        }
        assert!(r.within_bounds(1e-9));

        let fixed = conditional_expectation(s.unitary(), &a).unwrap();
        let r = trace_pairing_convergence(&s, &random_low_rank(5, 2, &mut rng), &fixed, &[3, 30]).unwrap();
        assert!(r.values.iter().all(|v| v.norm() < 1e-12));
    }

    #[test]
    fn weak_mixing_corollary_in_dimension_one() {
        let s = CompactSystem::new(UnitaryOperator::diagonal(&[0.0]).unwrap());
        let a = ComplexMatrix::new(1, 1, vec![c(2.5, -1.0)]).unwrap();
        assert!(weak_mixing_corollary_limit(&s, &a).unwrap().max_abs_diff(&a) < 1e-15);
        let two = CompactSystem::new(UnitaryOperator::diagonal(&[0.0, 1.0]).unwrap());
        assert!(matches!(
            weak_mixing_corollary_limit(&two, &ComplexMatrix::identity(2)),
            Err(Error::PreconditionViolation(_))
        ));
    }

    #[test]
    fn omega_projection_recurs_immediately() {
        let s = pointed_system();
        let om = s.omega().unwrap().clone();
        let proj = ComplexMatrix::outer(&om, &om);
        let r = recurrence_scan(&s, &proj, &[1, 2, 4], 30).unwrap();
        assert_eq!(r.n0, Some(0));
        assert!(r.trace.iter().all(|v| (v - c(1.0, 0.0)).norm() < 1e-12));
    }

    #[test]
    fn identity_dynamics_gives_powers() {
        let u = UnitaryOperator::diagonal(&[0.0; 3]).unwrap();
        let om = ComplexVector::from_real(&[0.6, 0.8, 0.0]);
        let s = CompactSystem::with_omega(u, om).unwrap();
        let a = gaussian_matrix(3, 3, &mut stream_rng(4, 4));
        let r = recurrence_scan(&s, &a, &[1, 3], 6).unwrap();
        let expected = s.state(&a.pow(3)).unwrap();
        assert!(r.trace.iter().all(|v| (v - expected).norm() < 1e-12));
    }

    #[test]
    fn two_paths_agree() {
        let s = pointed_system();
        let mut rng = stream_rng(9, 0);
        let om = s.omega().unwrap().clone();
        let a = &ComplexMatrix::outer(&om, &om) + &gaussian_matrix(4, 4, &mut rng).scale_real(0.2);
        let exps = [1, 3, 4];
        let r = recurrence_scan(&s, &a, &exps, 40).unwrap();
        for n in [1, 7, 40] {
            let tele = recurrence_telescoped(&s, &a, &exps, n).unwrap();
            assert!((tele - r.trace[n - 1]).norm() < 1e-12);
        }
    }

    #[test]
    fn missing_omega_and_bad_exponents() {
        let s = haar_system(3, 1);
        let a = ComplexMatrix::identity(3);
        assert!(matches!(recurrence_scan(&s, &a, &[1], 5), Err(Error::InvalidState(_))));
        let p = pointed_system();
        let a = ComplexMatrix::identity(4);
        assert!(recurrence_scan(&p, &a, &[2, 1], 5).is_err());
        assert!(recurrence_scan(&p, &a, &[0, 1], 5).is_err());
        let not_fixed = ComplexVector::basis(4, 1);
        assert!(CompactSystem::with_omega(p.unitary().clone(), not_fixed).is_err());
    }
}
