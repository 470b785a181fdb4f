//! Dense complex linear algebra, seeded sampling and norms.

mod eigen;
mod matrix;
mod norms;
pub mod random;
mod schur;
mod vector;

pub use eigen::{
    circular_distance, cis, cluster, eigendecompose_unitary, normalize_angle, UnitaryEigen,
    DEFAULT_CLUSTER_TOL, DEFAULT_UNITARITY_TOL,
};
pub use matrix::ComplexMatrix;
pub use norms::{hermitian_eigenvalues, operator_norm, singular_values, trace_norm};
pub use random::{haar_unitary, stream_rng};
pub use schur::{complex_schur, hessenberg, householder_qr, Schur};
pub use vector::ComplexVector;

/// Tolerance used for operator norms in reports and checks.
pub const NORM_TOL: f64 = 1e-10;
