//! Unitary operators as spectral objects: clustered point spectrum,
//! eigenprojections, partitions of slot indices and the resonance sets that
//! index every closed-form limit.

mod partition;
mod resonance;

pub use partition::{
    enumerate_partitions, is_pair_partition, make_partition, Partition, MAX_ENUMERATED_SLOTS,
};
pub use resonance::{
    for_each_assignment, is_zero_phase, resonant_assignments, resonant_assignments_for,
    resonant_power_tuples, ResonantAssignment, SlotPattern, ENUMERATION_BUDGET, RESONANCE_TOL,
};

use crate::error::{Error, Result};
use crate::num_core::{
    circular_distance, cis, cluster, eigendecompose_unitary, normalize_angle, ComplexMatrix,
    DEFAULT_CLUSTER_TOL, DEFAULT_UNITARITY_TOL,
};

/// One distinct eigenvalue `e^{iθ}` and the dimension of its eigenspace.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectralPoint {
    pub angle: f64,
    pub multiplicity: usize,
}

/// A unitary matrix together with its clustered spectral decomposition.
///
/// Invariants: multiplicities sum to the dimension, the eigenbasis is
/// unitary, and angles are pairwise farther apart than the cluster
/// tolerance. Column block `c` of the eigenbasis spans the eigenspace of
/// `spectrum[c]`.
#[derive(Clone, Debug)]
pub struct UnitaryOperator {
    matrix: ComplexMatrix,
    spectrum: Vec<SpectralPoint>,
    eigenbasis: ComplexMatrix,
    offsets: Vec<usize>,
    cluster_tol: f64,
}

impl UnitaryOperator {
    /// Decomposes a unitary matrix with the default tolerances.
    pub fn from_matrix(matrix: ComplexMatrix) -> Result<Self> {
        Self::from_matrix_with(matrix, DEFAULT_UNITARITY_TOL, DEFAULT_CLUSTER_TOL)
    }

    pub fn from_matrix_with(
        matrix: ComplexMatrix,
        unitarity_tol: f64,
        cluster_tol: f64,
    ) -> Result<Self> {
        let eig = eigendecompose_unitary(&matrix, unitarity_tol, cluster_tol)?;
        let spectrum = eig
            .angles
            .iter()
            .zip(&eig.multiplicities)
            .map(|(&angle, &multiplicity)| SpectralPoint {
                angle,
                multiplicity,
            })
            .collect();
        Ok(Self::assemble(matrix, spectrum, eig.eigenbasis, cluster_tol))
    }

    /// `U = diag(e^{iθ_1}, …, e^{iθ_n})`; equal angles are grouped.
    pub fn diagonal(angles: &[f64]) -> Result<Self> {
        Self::conjugated(&ComplexMatrix::identity(angles.len()), angles)
    }

    /// `U = V diag(e^{iθ_j}) V*` for a unitary `V`; equal angles are grouped.
    pub fn conjugated(v: &ComplexMatrix, angles: &[f64]) -> Result<Self> {
        if angles.is_empty() {
            return Err(Error::InvalidArgument("spectrum is empty".into()));
        }
        if !v.is_square() || v.rows() != angles.len() {
            return Err(Error::InvalidArgument(format!(
                "basis is {}x{} but {} angles were given",
                v.rows(),
                v.cols(),
                angles.len()
            )));
        }
        if v.unitarity_defect() > 1e-10 {
            return Err(Error::PreconditionViolation("eigenbasis is not unitary".into()));
        }
        let groups = cluster(angles, DEFAULT_CLUSTER_TOL)?;
        let n = angles.len();
        let mut eigenbasis = ComplexMatrix::zeros(n, n);
        let mut spectrum = Vec::with_capacity(groups.len());
        let mut col = 0;
        for (angle, members) in &groups {
            // An explicitly given angle is kept exactly when a cluster has one
            // member; merged duplicates use the cluster mean.
            let angle = if members.len() == 1 {
                normalize_angle(angles[members[0]])
            } else {
                *angle
            };
            spectrum.push(SpectralPoint {
                angle,
                multiplicity: members.len(),
            });
            let mut sorted = members.clone();
            sorted.sort_unstable();
            for src in sorted {
                eigenbasis.set_column(col, &v.column(src));
                col += 1;
            }
        }
        let diag: Vec<_> = angles.iter().map(|&a| cis(a)).collect();
        let matrix = if v == &ComplexMatrix::identity(n) {
            ComplexMatrix::from_diagonal(&diag)
        } else {
            v.matmul(&ComplexMatrix::from_diagonal(&diag)).matmul(&v.adjoint())
        };
        Ok(Self::assemble(matrix, spectrum, eigenbasis, DEFAULT_CLUSTER_TOL))
    }

    /// Wraps a matrix whose spectral decomposition is already known
    /// exactly. The decomposition is checked against the matrix.
    pub fn from_parts(
        matrix: ComplexMatrix,
        spectrum: Vec<SpectralPoint>,
        eigenbasis: ComplexMatrix,
    ) -> Result<Self> {
        let total: usize = spectrum.iter().map(|s| s.multiplicity).sum();
        if !matrix.is_square() || total != matrix.rows() || eigenbasis.rows() != total {
            return Err(Error::InvalidArgument(
                "multiplicities must sum to the dimension".into(),
            ));
        }
        if eigenbasis.unitarity_defect() > 1e-10 {
            return Err(Error::PreconditionViolation("eigenbasis is not unitary".into()));
        }
        for (i, a) in spectrum.iter().enumerate() {
            for b in &spectrum[i + 1..] {
                if circular_distance(a.angle, b.angle) <= DEFAULT_CLUSTER_TOL {
                    return Err(Error::InvalidArgument(format!(
                        "spectral angles {} and {} coincide",
                        a.angle, b.angle
                    )));
                }
            }
        }
        let op = Self::assemble(matrix, spectrum, eigenbasis, DEFAULT_CLUSTER_TOL);
        let err = (&op.reconstruct() - &op.matrix).frobenius_norm();
        if err > 1e-9 {
            return Err(Error::PreconditionViolation(format!(
                "spectral data does not reproduce the matrix (error {err:.3e})"
            )));
        }
        Ok(op)
    }

    fn assemble(
        matrix: ComplexMatrix,
        spectrum: Vec<SpectralPoint>,
        eigenbasis: ComplexMatrix,
        cluster_tol: f64,
    ) -> Self {
        let mut offsets = Vec::with_capacity(spectrum.len() + 1);
        let mut acc = 0;
        offsets.push(0);
        for s in &spectrum {
            acc += s.multiplicity;
            offsets.push(acc);
        }
        Self {
            matrix,
            spectrum,
            eigenbasis,
            offsets,
            cluster_tol,
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    /// The unitary itself. Averaging engines use only this matrix, never the
    /// spectral data, so that averages and limits are computed independently.
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn spectrum(&self) -> &[SpectralPoint] {
        &self.spectrum
    }

    pub fn angles(&self) -> Vec<f64> {
        self.spectrum.iter().map(|s| s.angle).collect()
    }

    pub fn eigenbasis(&self) -> &ComplexMatrix {
        &self.eigenbasis
    }

    pub fn cluster_tol(&self) -> f64 {
        self.cluster_tol
    }

    /// Orthonormal basis of the `index`-th eigenspace, as columns.
    pub fn eigenspace(&self, index: usize) -> ComplexMatrix {
        let (lo, hi) = (self.offsets[index], self.offsets[index + 1]);
        ComplexMatrix::from_fn(self.dim(), hi - lo, |i, j| self.eigenbasis[(i, lo + j)])
    }

    /// Projection onto the `index`-th eigenspace.
    pub fn projection(&self, index: usize) -> ComplexMatrix {
        let b = self.eigenspace(index);
        b.matmul(&b.adjoint())
    }

    pub fn projections(&self) -> Vec<ComplexMatrix> {
        (0..self.spectrum.len()).map(|i| self.projection(i)).collect()
    }

    /// Spectrum index of `angle`, matched to the cluster tolerance.
    pub fn index_of(&self, angle: f64) -> Option<usize> {
        self.spectrum
            .iter()
            .position(|s| circular_distance(s.angle, angle) <= self.cluster_tol)
    }

    /// Eigenprojection `E_z` for `z = e^{i·angle}`.
    pub fn eigenprojection(&self, angle: f64) -> Result<ComplexMatrix> {
        self.index_of(angle)
            .map(|i| self.projection(i))
            .ok_or(Error::NotAnEigenvalue(angle))
    }

    /// `Σ_z z E_z`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.dim(), self.dim());
        for (i, s) in self.spectrum.iter().enumerate() {
            out.add_scaled(cis(s.angle), &self.projection(i));
        }
        out
    }

    /// `U^n` from the spectral decomposition, `n` of either sign.
    pub fn spectral_power(&self, n: i64) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.dim(), self.dim());
        for (i, s) in self.spectrum.iter().enumerate() {
            out.add_scaled(cis(s.angle * n as f64), &self.projection(i));
        }
        out
    }
}

/// Spectral points `z` whose conjugate is also a spectral point, as angles.
pub fn adjoint_point_spectrum(unitary: &UnitaryOperator) -> Vec<f64> {
    unitary
        .angles()
        .into_iter()
        .filter(|&a| unitary.angles().iter().any(|&b| is_zero_phase(a + b)))
        .collect()
}

/// Pairs `(z, w)` of spectral points with `z w² = 1`, as angles.
pub fn sigma_pair_set(unitary: &UnitaryOperator) -> Vec<(f64, f64)> {
    let angles = unitary.angles();
    let mut out = Vec::new();
    for &z in &angles {
        for &w in &angles {
            if is_zero_phase(z + 2.0 * w) {
                out.push((z, w));
            }
        }
    }
    out
}

/// Ergodic-theoretic type of a unitary.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Classification {
    /// The fixed space is one-dimensional.
    pub ergodic: bool,
    /// Point spectrum is `{1}` with a one-dimensional fixed space. In finite
    /// dimension this forces the dimension to be one.
    pub weakly_mixing: bool,
    /// Eigenvectors span the space; always true in finite dimension.
    pub almost_periodic: bool,
}

pub fn classify(unitary: &UnitaryOperator) -> Classification {
    let fixed = unitary.index_of(0.0).map(|i| unitary.spectrum()[i].multiplicity);
    let ergodic = fixed == Some(1);
    Classification {
        ergodic,
        weakly_mixing: ergodic && unitary.spectrum().len() == 1,
        almost_periodic: true,
    }
}
