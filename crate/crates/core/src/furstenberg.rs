//! Diagonal-measure machinery in the cyclic model: the shift on `p` points
//! with the diagonal algebra `M = M′`, its characters, and the isometry
//! that carries the limit of `(1/N) Σ U^n A U^n`.
//!
//! Shift convention: `(Ux)(t) = x(t − 1 mod p)`. The character
//! `χ_w(t) = w^t / √p` then satisfies `U χ_w = w̄ χ_w`, and
//! `V_z = diag(z̄^t)` sends `Ω` to the eigenvector of `U` for `z`.

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::averagers::diagonal_average;
use crate::error::{Error, Result};
use crate::num_core::{cis, ComplexMatrix, ComplexVector};
use crate::spectral::{sigma_pair_set, SpectralPoint, UnitaryOperator};

/// `e^{2πi j / p}` with `j` reduced first, so equal roots are bit-equal.
fn root(p: usize, j: i64) -> Complex64 {
    let j = j.rem_euclid(p as i64) as f64;
    cis(TAU * j / p as f64)
}

/// Cyclic shift on `p` points, `p` odd and at least 3.
#[derive(Clone, Debug)]
pub struct CyclicSystem {
    p: usize,
    unitary: UnitaryOperator,
    omega: ComplexVector,
}

/// `χ_w` for `w = e^{2πi j/p}`, with its `U`-eigenvalue `w̄`.
#[derive(Clone, Debug)]
pub struct Character {
    pub index: usize,
    pub w: Complex64,
    pub vector: ComplexVector,
    pub eigenvalue: Complex64,
}

impl CyclicSystem {
    pub fn new(p: usize) -> Result<Self> {
        if p < 3 || p.is_multiple_of(2) {
            return Err(Error::InvalidArgument(format!(
                "the cyclic model needs an odd p ≥ 3 (so w ↦ w⁻² is a bijection), got {p}"
            )));
        }
        let mut shift = ComplexMatrix::zeros(p, p);
        for t in 0..p {
            shift[((t + 1) % p, t)] = Complex64::new(1.0, 0.0);
        }
        // Column j is V_{z_j} Ω = χ_{z̄_j}, the eigenvector for z_j.
        let scale = 1.0 / (p as f64).sqrt();
        let basis = ComplexMatrix::from_fn(p, p, |t, j| root(p, -((j * t) as i64)) * scale);
        let spectrum = (0..p)
            .map(|j| SpectralPoint {
                angle: TAU * j as f64 / p as f64,
                multiplicity: 1,
            })
            .collect();
        let unitary = UnitaryOperator::from_parts(shift, spectrum, basis)?;
        let omega = ComplexVector::from(vec![Complex64::new(scale, 0.0); p]);
        Ok(Self { p, unitary, omega })
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn unitary(&self) -> &UnitaryOperator {
        &self.unitary
    }

    /// The uniform unit vector.
    pub fn omega(&self) -> &ComplexVector {
        &self.omega
    }

    /// The multiplication operator by `f`.
    pub fn multiplication(&self, f: &[Complex64]) -> Result<ComplexMatrix> {
        if f.len() != self.p {
            return Err(Error::InvalidArgument(format!("need {} values", self.p)));
        }
        Ok(ComplexMatrix::from_diagonal(f))
    }

    /// `V_z = diag(z̄^t)` for `z = e^{2πi j/p}`.
    pub fn v_unitary(&self, j: usize) -> ComplexMatrix {
        let diag: Vec<Complex64> = (0..self.p).map(|t| root(self.p, -((j * t) as i64))).collect();
        ComplexMatrix::from_diagonal(&diag)
    }

    /// `V_{z_j} Ω`.
    fn eigenvector(&self, j: usize) -> ComplexVector {
        self.unitary.eigenbasis().column(j)
    }

    /// `(j, k)` with `z_j z_k² = 1`, by exact index arithmetic.
    fn pair_indices(&self) -> Vec<(usize, usize)> {
        (0..self.p).map(|k| ((2 * (self.p - k)) % self.p, k)).collect()
    }
}

/// The `p` characters, `w = e^{2πi j/p}` for `j = 0..p`.
pub fn characters(system: &CyclicSystem) -> Vec<Character> {
    let p = system.p;
    let scale = 1.0 / (p as f64).sqrt();
    (0..p)
        .map(|j| {
            let w = root(p, j as i64);
            let vector = ComplexVector::from(
                (0..p).map(|t| root(p, (j * t) as i64) * scale).collect::<Vec<_>>(),
            );
            Character {
                index: j,
                w,
                vector,
                eigenvalue: w.conj(),
            }
        })
        .collect()
}

/// Projection onto the fixed vectors of `U ⊗ U²`:
/// `Σ_{z w² = 1} E_z ⊗ E_w`.
pub fn tensor_fixed_projection(system: &CyclicSystem) -> Result<ComplexMatrix> {
    let u = &system.unitary;
    let n = system.p * system.p;
    let mut out = ComplexMatrix::zeros(n, n);
    for (z, w) in sigma_pair_set(u) {
        let (Some(i), Some(k)) = (u.index_of(z), u.index_of(w)) else {
            return Err(Error::InvalidState("pair angle is not in the spectrum".into()));
        };
        out.add_assign(&u.projection(i).kron(&u.projection(k)));
    }
    Ok(out)
}

/// `V` as a `p × p²` matrix acting on `ξ ⊗ η` (row-major Kronecker order).
pub fn v_matrix(system: &CyclicSystem) -> ComplexMatrix {
    let p = system.p;
    let mut v = ComplexMatrix::zeros(p, p * p);
    for (j, k) in system.pair_indices() {
        let source = system.eigenvector(j).kron(&system.eigenvector(k));
        let target = system.v_unitary(j).mul_vec(&system.eigenvector(k));
        v.add_assign(&ComplexMatrix::outer(&target, &source));
    }
    v
}

/// `V(ξ ⊗ η) = Σ_{z w² = 1} <ξ, V_zΩ> <η, V_wΩ> V_z V_w Ω`.
pub fn v_isometry(system: &CyclicSystem, xi: &ComplexVector, eta: &ComplexVector) -> Result<ComplexVector> {
    let p = system.p;
    if xi.dim() != p || eta.dim() != p {
        return Err(Error::InvalidArgument(format!("vectors must have dimension {p}")));
    }
    let mut out = ComplexVector::zeros(p);
    for (j, k) in system.pair_indices() {
        let coeff = xi.inner(&system.eigenvector(j)) * eta.inner(&system.eigenvector(k));
        out.add_scaled(coeff, &system.v_unitary(j).mul_vec(&system.eigenvector(k)));
    }
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct DiamCheck {
    pub average: ComplexVector,
    pub limit: ComplexVector,
    pub error: f64,
}

fn require_diagonal(a: &ComplexMatrix, p: usize) -> Result<()> {
    if a.rows() != p || a.cols() != p {
        return Err(Error::InvalidArgument(format!("operator must be {p}x{p}")));
    }
    let scale = a.max_abs().max(1.0);
    for i in 0..p {
        for j in 0..p {
            if i != j && a[(i, j)].norm() > 1e-14 * scale {
                return Err(Error::PreconditionViolation(format!(
                    "operator is not diagonal (entry ({i}, {j}) = {})",
                    a[(i, j)]
                )));
            }
        }
    }
    Ok(())
}

/// `(1/N) Σ U^n A U^n x` against `V(AΩ ⊗ x)` for diagonal `A`.
pub fn diam_limit_check(
    system: &CyclicSystem,
    a: &ComplexMatrix,
    x: &ComplexVector,
    n: usize,
) -> Result<DiamCheck> {
    require_diagonal(a, system.p)?;
    let average = diagonal_average(&system.unitary, a, n)?.mul_vec(x);
    let limit = v_isometry(system, &a.mul_vec(&system.omega), x)?;
    let error = (&average - &limit).norm();
    Ok(DiamCheck {
        average,
        limit,
        error,
    })
}

/// Product state `φ`, diagonal state `ψ` and the dynamics
/// `γ = Ad_U ⊗ Ad_{U²}` on pairs of operators.
#[derive(Clone, Debug)]
pub struct DiagonalPairState<'a> {
    system: &'a CyclicSystem,
}

impl<'a> DiagonalPairState<'a> {
    pub fn new(system: &'a CyclicSystem) -> Self {
        Self { system }
    }

    fn omega_state(&self, a: &ComplexMatrix) -> Complex64 {
        let om = &self.system.omega;
        a.mul_vec(om).inner(om)
    }

    /// `φ(A ⊗ B) = <AΩ, Ω> <BΩ, Ω>`.
    pub fn phi(&self, a: &ComplexMatrix, b: &ComplexMatrix) -> Complex64 {
        self.omega_state(a) * self.omega_state(b)
    }

    /// `ψ(A ⊗ B) = <ABΩ, Ω>`.
    pub fn psi(&self, a: &ComplexMatrix, b: &ComplexMatrix) -> Complex64 {
        self.omega_state(&a.matmul(b))
    }

    /// `γ^n(A ⊗ B) = U^n A U^{−n} ⊗ U^{2n} B U^{−2n}`.
    pub fn gamma(&self, a: &ComplexMatrix, b: &ComplexMatrix, n: u64) -> (ComplexMatrix, ComplexMatrix) {
        let u = self.system.unitary.matrix();
        let un = u.pow(n);
        let u2n = un.matmul(&un);
        (
            un.matmul(a).matmul(&un.adjoint()),
            u2n.matmul(b).matmul(&u2n.adjoint()),
        )
    }
}

#[derive(Clone, Copy, Debug)]
pub struct PsiCheck {
    pub average: Complex64,
    pub phi: Complex64,
    pub error: f64,
}

/// `(1/N) Σ_n ψ(γ^n(A ⊗ B)) = (1/N) Σ_n <A U^n B Ω, Ω>` against `φ(A ⊗ B)`.
pub fn psi_generic_check(
    system: &CyclicSystem,
    a: &ComplexMatrix,
    b: &ComplexMatrix,
    n: usize,
) -> Result<PsiCheck> {
    let p = system.p;
    for m in [a, b] {
        if m.rows() != p || m.cols() != p {
            return Err(Error::InvalidArgument(format!("operators must be {p}x{p}")));
        }
    }
    if n == 0 {
        return Err(Error::InvalidArgument("N must be at least 1".into()));
    }
    let om = &system.omega;
    let mut walker = b.mul_vec(om);
    let mut sum = Complex64::new(0.0, 0.0);
    for _ in 0..n {
        sum += a.mul_vec(&walker).inner(om);
        walker = system.unitary.matrix().mul_vec(&walker);
    }
    let average = sum / n as f64;
    let phi = DiagonalPairState::new(system).phi(a, b);
    Ok(PsiCheck {
        average,
        phi,
        error: (average - phi).norm(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::averagers::mean_ergodic_average;
    use crate::num_core::random::{gaussian_vector, random_unit_vector};
    use crate::num_core::stream_rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn rejects_even_or_small_p() {
        for p in [0, 1, 2, 4, 10] {
            assert!(matches!(CyclicSystem::new(p), Err(Error::InvalidArgument(_))));
        }
    }

    #[test]
    fn characters_are_eigenvectors() {
        for p in [3, 5, 7, 31] {
            let s = CyclicSystem::new(p).unwrap();
            let chars = characters(&s);
            assert!((&chars[0].vector - s.omega()).norm() < 1e-15);
            for ch in &chars {
                let moved = s.unitary().matrix().mul_vec(&ch.vector);
                assert!((&moved - &ch.vector.scale(ch.eigenvalue)).norm() < 1e-12);
            }
            let gram = ComplexMatrix::from_fn(p, p, |i, j| chars[i].vector.inner(&chars[j].vector));
            assert!(gram.max_abs_diff(&ComplexMatrix::identity(p)) < 1e-12);
        }
        let s = CyclicSystem::new(3).unwrap();
        let w = root(3, 1);
        let expected = ComplexVector::from(vec![c(1.0, 0.0), w, w * w]).scale(c(1.0 / 3f64.sqrt(), 0.0));
        assert!((&characters(&s)[1].vector - &expected).norm() < 1e-15);
        assert_eq!(characters(&s)[1].eigenvalue, w.conj());
    }

    #[test]
    fn fixed_projection_rank_and_periodicity() {
        for p in [3, 5] {
            let s = CyclicSystem::new(p).unwrap();
            let e = tensor_fixed_projection(&s).unwrap();
            assert!((e.trace() - c(p as f64, 0.0)).norm() < 1e-12);
            let um = s.unitary().matrix();
            let tensor = UnitaryOperator::from_matrix(um.kron(&um.matmul(um))).unwrap();
            assert!(mean_ergodic_average(&tensor, p).unwrap().max_abs_diff(&e) < 1e-12);
            let v = v_matrix(&s);
            assert!(v.adjoint().matmul(&v).max_abs_diff(&e) < 1e-12);
        }
    }

    #[test]
    fn v_isometry_examples() {
        let s = CyclicSystem::new(3).unwrap();
        let om = s.omega().clone();
        assert!((&v_isometry(&s, &om, &om).unwrap() - &om).norm() < 1e-15);

        let mut rng = stream_rng(3, 0);
        let x = gaussian_vector(3, &mut rng);
        let a = s.multiplication(&[c(3f64.sqrt(), 0.0), c(0.0, 0.0), c(0.0, 0.0)]).unwrap();
        let got = v_isometry(&s, &a.mul_vec(&om), &x).unwrap();
        let xs = x.as_slice();
        let expected = ComplexVector::from(vec![xs[0], xs[2], xs[1]]).scale(c(1.0 / 3f64.sqrt(), 0.0));
        assert!((&got - &expected).norm() < 1e-14);

        let y = gaussian_vector(3, &mut rng);
        let via_matrix = v_matrix(&s).mul_vec(&x.kron(&y));
        assert!((&via_matrix - &v_isometry(&s, &x, &y).unwrap()).norm() < 1e-13);
        assert!(v_isometry(&s, &x, &y).unwrap().norm() <= x.norm() * y.norm() + 1e-12);
    }

    #[test]
    fn diagonal_limit_is_exact_at_full_periods() {
        for p in [3, 5, 7] {
            let s = CyclicSystem::new(p).unwrap();
            let mut rng = stream_rng(p as u64, 4);
            let a = s.multiplication(gaussian_vector(p, &mut rng).as_slice()).unwrap();
            let x = random_unit_vector(p, &mut rng);
            assert!(diam_limit_check(&s, &a, &x, p).unwrap().error < 1e-12);
            assert!(diam_limit_check(&s, &a, &x, 3 * p).unwrap().error < 1e-12);
            let zero = ComplexMatrix::zeros(p, p);
            assert_eq!(diam_limit_check(&s, &zero, &x, 4).unwrap().error, 0.0);
        }
        let s = CyclicSystem::new(3).unwrap();
        let full = ComplexMatrix::from_fn(3, 3, |_, _| c(1.0, 0.0));
        assert!(matches!(
            diam_limit_check(&s, &full, s.omega(), 3),
            Err(Error::PreconditionViolation(_))
        ));
    }

    #[test]
    fn psi_examples() {
        let s = CyclicSystem::new(5).unwrap();
        let id = ComplexMatrix::identity(5);
        assert!(psi_generic_check(&s, &id, &id, 7).unwrap().error < 1e-15);

        let mut ind = vec![c(0.0, 0.0); 5];
        ind[0] = c(1.0, 0.0);
        let a = s.multiplication(&ind).unwrap();
        let check = psi_generic_check(&s, &a, &a, 5).unwrap();
        assert!((check.average - c(1.0 / 25.0, 0.0)).norm() < 1e-15);
        assert!(check.error < 1e-15);

        // A constant B fixes Ω up to scale.
        let mut rng = stream_rng(5, 1);
        let a = s.multiplication(gaussian_vector(5, &mut rng).as_slice()).unwrap();
        let b = id.scale(c(0.5, -2.0));
        for n in [1, 2, 9] {
            assert!(psi_generic_check(&s, &a, &b, n).unwrap().error < 1e-14);
        }
    }

    #[test]
    fn gamma_route_matches_displayed_chain() {
        let s = CyclicSystem::new(7).unwrap();
        let state = DiagonalPairState::new(&s);
        let mut rng = stream_rng(7, 2);
        let a = s.multiplication(gaussian_vector(7, &mut rng).as_slice()).unwrap();
        let b = s.multiplication(gaussian_vector(7, &mut rng).as_slice()).unwrap();
        let n = 11;
        let mut sum = c(0.0, 0.0);
        for k in 0..n {
            let (ga, gb) = state.gamma(&a, &b, k);
            sum += state.psi(&ga, &gb);
        }
        let check = psi_generic_check(&s, &a, &b, n as usize).unwrap();
        assert!((sum / n as f64 - check.average).norm() < 1e-13);
        let id = ComplexMatrix::identity(7);
        assert!((state.psi(&id, &id) - c(1.0, 0.0)).norm() < 1e-15);
        assert!((state.phi(&id, &id) - c(1.0, 0.0)).norm() < 1e-15);
    }
}
