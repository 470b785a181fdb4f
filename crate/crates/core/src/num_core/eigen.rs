use std::f64::consts::{FRAC_PI_2, TAU};

use num_complex::Complex64;

use super::{complex_schur, ComplexMatrix};
use crate::error::{Error, Result};

/// Default angular tolerance for grouping computed eigenvalues.
pub const DEFAULT_CLUSTER_TOL: f64 = 1e-8;
/// Default bound on `‖M*M − I‖_F` accepted as unitary.
pub const DEFAULT_UNITARITY_TOL: f64 = 1e-10;

/// Maps any angle into `[0, 2π)`.
pub fn normalize_angle(theta: f64) -> f64 {
    let a = theta.rem_euclid(TAU);
    if a >= TAU {
        0.0
    } else {
        a
    }
}

/// Distance between two angles on the circle, in `[0, π]`.
pub fn circular_distance(a: f64, b: f64) -> f64 {
    let d = normalize_angle(a - b);
    d.min(TAU - d)
}

/// `e^{iθ}`, exact at multiples of a quarter turn.
pub fn cis(theta: f64) -> Complex64 {
    let quarters = theta / FRAC_PI_2;
    let rounded = quarters.round();
    if (quarters - rounded).abs() <= 4.0 * f64::EPSILON * rounded.abs().max(1.0) {
        return match (rounded as i64).rem_euclid(4) {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
    }
    Complex64::new(theta.cos(), theta.sin())
}

/// Eigendecomposition of a unitary matrix with eigenvalues clustered on the
/// circle.
#[derive(Clone, Debug)]
pub struct UnitaryEigen {
    /// Cluster angles in `[0, 2π)`, ascending.
    pub angles: Vec<f64>,
    pub multiplicities: Vec<usize>,
    /// Orthonormal columns; the columns of cluster `c` are contiguous and
    /// follow the order of `angles`.
    pub eigenbasis: ComplexMatrix,
}

/// Single-linkage clustering of angles on the circle.
///
/// Returns groups of indices into `angles`, each group ordered along the
/// chain, and the groups ordered by their circular mean.
fn cluster_angles(angles: &[f64], cluster_tol: f64) -> Result<Vec<(f64, Vec<usize>)>> {
    let n = angles.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| angles[a].total_cmp(&angles[b]));
    let sorted: Vec<f64> = order.iter().map(|&i| angles[i]).collect();

    // gap[i] is the circular gap between sorted[i] and its successor.
    let gaps: Vec<f64> = (0..n)
        .map(|i| {
            if i + 1 < n {
                sorted[i + 1] - sorted[i]
            } else {
                sorted[0] + TAU - sorted[n - 1]
            }
        })
        .collect();

    let Some(cut) = (0..n).rev().find(|&i| gaps[i] > cluster_tol) else {
        // No gap anywhere: one chain around the whole circle.
        let span = if n > 1 { TAU - gaps.iter().cloned().fold(0.0, f64::max) } else { 0.0 };
        if n > 1 && span > 10.0 * cluster_tol {
            return Err(Error::ClusteringAmbiguous {
                members: n,
                span,
                cluster_tol,
            });
        }
        return Ok(vec![(circular_mean(&sorted), order)]);
    };

    // Walk the circle starting right after a gap.
    let mut groups = Vec::new();
    let mut current: Vec<usize> = Vec::new();
    for step in 0..n {
        let i = (cut + 1 + step) % n;
        current.push(i);
        if gaps[i] > cluster_tol {
            groups.push(std::mem::take(&mut current));
        }
    }

    let mut out = Vec::with_capacity(groups.len());
    for group in groups {
        let members: Vec<f64> = group.iter().map(|&i| sorted[i]).collect();
        let span: f64 = group[..group.len() - 1].iter().map(|&i| gaps[i]).sum();
        if span > 10.0 * cluster_tol {
            return Err(Error::ClusteringAmbiguous {
                members: group.len(),
                span,
                cluster_tol,
            });
        }
        let indices = group.iter().map(|&i| order[i]).collect();
        out.push((circular_mean(&members), indices));
    }
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(out)
}

fn circular_mean(angles: &[f64]) -> f64 {
    if angles.len() == 1 {
        return normalize_angle(angles[0]);
    }
    let s: Complex64 = angles.iter().map(|&a| Complex64::new(a.cos(), a.sin())).sum();
    normalize_angle(s.arg())
}

/// Groups nearby angles on the circle. Exposed for callers that build
/// operators from explicit spectra.
pub fn cluster(angles: &[f64], cluster_tol: f64) -> Result<Vec<(f64, Vec<usize>)>> {
    if angles.is_empty() {
        return Ok(Vec::new());
    }
    cluster_angles(angles, cluster_tol)
}

/// Eigendecomposition of a unitary matrix via Hessenberg reduction and
/// shifted QR. A unitary matrix is normal, so its Schur form is diagonal up
/// to rounding and the Schur vectors are eigenvectors.
pub fn eigendecompose_unitary(
    m: &ComplexMatrix,
    unitarity_tol: f64,
    cluster_tol: f64,
) -> Result<UnitaryEigen> {
    if !m.is_square() {
        return Err(Error::PreconditionViolation("unitary input must be square".into()));
    }
    if !(cluster_tol > 0.0) || !(unitarity_tol > 0.0) {
        return Err(Error::InvalidArgument("tolerances must be positive".into()));
    }
    let defect = m.unitarity_defect();
    if defect > unitarity_tol {
        return Err(Error::PreconditionViolation(format!(
            "matrix is not unitary: ‖M*M − I‖_F = {defect:.3e} > {unitarity_tol:.3e}"
        )));
    }
    let schur = complex_schur(m)?;
    let raw: Vec<f64> = schur
        .t
        .diagonal()
        .into_iter()
        .map(|z| normalize_angle(z.arg()))
        .collect();
    let clusters = cluster_angles(&raw, cluster_tol)?;

    let n = m.rows();
    let mut eigenbasis = ComplexMatrix::zeros(n, n);
    let mut angles = Vec::with_capacity(clusters.len());
    let mut multiplicities = Vec::with_capacity(clusters.len());
    let mut col = 0;
    for (angle, members) in clusters {
        angles.push(angle);
        multiplicities.push(members.len());
        for &src in &members {
            eigenbasis.set_column(col, &schur.z.column(src));
            col += 1;
        }
    }
    Ok(UnitaryEigen {
        angles,
        multiplicities,
        eigenbasis,
    })
}
