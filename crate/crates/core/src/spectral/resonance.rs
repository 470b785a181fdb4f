//! Resonance sets: per-slot eigenvalue choices whose block phases vanish.
//!
//! A chain `U^{e_1 n_{β(1)}} A_1 ⋯ A_{m−1} U^{e_m n_{β(m)}}` expands, after
//! inserting `U^n = Σ_z z^n E_z` in every slot, into terms indexed by one
//! spectral point per slot. Summing over the block indices turns each term's
//! phase into a product of Dirichlet means, one per block, evaluated at the
//! block phase `Σ_{p ∈ block} e_p θ_p`. The terms whose block phases all
//! vanish survive the Cesàro limit. Entangled means use exponents `+1` with
//! `β` a partition; single-index power chains use one block with arbitrary
//! integer exponents.

use super::{Partition, UnitaryOperator};
use crate::error::{check_budget, Error, Result};
use crate::num_core::{circular_distance, normalize_angle};

/// Angular tolerance for deciding that a block phase is `0 mod 2π`.
pub const RESONANCE_TOL: f64 = 1e-9;

/// Largest number of assignments `|σ|^m` the enumerators will walk.
pub const ENUMERATION_BUDGET: f64 = 1e7;

/// Which summation index and exponent each slot of a chain carries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SlotPattern {
    blocks: Vec<usize>,
    exponents: Vec<i64>,
    block_count: usize,
}

impl SlotPattern {
    /// Entangled pattern: slot `p` carries `U^{n_{α(p)}}`.
    pub fn from_partition(partition: &Partition) -> Self {
        Self {
            blocks: (0..partition.slots()).map(|p| partition.block_of(p)).collect(),
            exponents: vec![1; partition.slots()],
            block_count: partition.blocks(),
        }
    }

    /// Single-index pattern: slot `p` carries `U^{n e_p}`. Exponents may be
    /// negative (`U^{-n}`) but not zero.
    pub fn from_exponents(exponents: &[i64]) -> Result<Self> {
        if exponents.is_empty() {
            return Err(Error::InvalidArgument("exponent list is empty".into()));
        }
        if exponents.contains(&0) {
            return Err(Error::InvalidArgument(format!(
                "exponents must be nonzero, got {exponents:?}"
            )));
        }
        Ok(Self {
            blocks: vec![0; exponents.len()],
            exponents: exponents.to_vec(),
            block_count: 1,
        })
    }

    pub fn slots(&self) -> usize {
        self.blocks.len()
    }

    pub fn blocks(&self) -> usize {
        self.block_count
    }

    pub fn block_of(&self, p: usize) -> usize {
        self.blocks[p]
    }

    pub fn exponent(&self, p: usize) -> i64 {
        self.exponents[p]
    }

    /// Block phases `Σ_{p ∈ block} e_p θ_p`, normalized to `[0, 2π)`.
    pub fn block_phases(&self, slot_angles: &[f64]) -> Vec<f64> {
        let mut phases = vec![0.0; self.block_count];
        for (p, &theta) in slot_angles.iter().enumerate() {
            phases[self.blocks[p]] += self.exponents[p] as f64 * theta;
        }
        phases.into_iter().map(normalize_angle).collect()
    }
}

pub fn is_zero_phase(phase: f64) -> bool {
    circular_distance(phase, 0.0) <= RESONANCE_TOL
}

/// One surviving term of the Cesàro limit.
#[derive(Clone, Debug, PartialEq)]
pub struct ResonantAssignment {
    /// Spectrum index chosen for each slot.
    pub spectrum_indices: Vec<usize>,
    /// Eigenvalue angle of each slot.
    pub slot_angles: Vec<f64>,
    /// Phase of each block; all within [`RESONANCE_TOL`] of zero.
    pub block_phases: Vec<f64>,
}

/// Walks every assignment of spectral points to slots in lexicographic
/// order of spectrum indices, calling `visit(indices, angles, phases)`.
pub fn for_each_assignment(
    unitary: &UnitaryOperator,
    pattern: &SlotPattern,
    mut visit: impl FnMut(&[usize], &[f64], &[f64]),
) -> Result<()> {
    let s = unitary.spectrum().len();
    let m = pattern.slots();
    if s == 0 {
        return Ok(());
    }
    check_budget(
        "resonance enumeration |σ|^m",
        (s as f64).powi(m as i32),
        ENUMERATION_BUDGET,
    )?;
    let angles = unitary.angles();
    let mut idx = vec![0usize; m];
    let mut slot_angles = vec![angles[0]; m];
    loop {
        let phases = pattern.block_phases(&slot_angles);
        visit(&idx, &slot_angles, &phases);
        let mut p = m;
        loop {
            if p == 0 {
                return Ok(());
            }
            p -= 1;
            idx[p] += 1;
            if idx[p] < s {
                slot_angles[p] = angles[idx[p]];
                break;
            }
            idx[p] = 0;
            slot_angles[p] = angles[0];
        }
    }
}

fn resonant_for_pattern(
    unitary: &UnitaryOperator,
    pattern: &SlotPattern,
) -> Result<Vec<ResonantAssignment>> {
    let mut out = Vec::new();
    for_each_assignment(unitary, pattern, |idx, angles, phases| {
        if phases.iter().all(|&ph| is_zero_phase(ph)) {
            out.push(ResonantAssignment {
                spectrum_indices: idx.to_vec(),
                slot_angles: angles.to_vec(),
                block_phases: phases.to_vec(),
            });
        }
    })?;
    Ok(out)
}

/// Per-slot eigenvalue assignments whose per-block products equal one.
pub fn resonant_assignments(
    unitary: &UnitaryOperator,
    partition: &Partition,
) -> Result<Vec<ResonantAssignment>> {
    resonant_for_pattern(unitary, &SlotPattern::from_partition(partition))
}

/// Tuples `(z_1, …, z_k)` of spectral points with `Π z_j^{m_j} = 1`, as
/// angles.
pub fn resonant_power_tuples(unitary: &UnitaryOperator, exponents: &[i64]) -> Result<Vec<Vec<f64>>> {
    let pattern = SlotPattern::from_exponents(exponents)?;
    Ok(resonant_for_pattern(unitary, &pattern)?
        .into_iter()
        .map(|r| r.slot_angles)
        .collect())
}

/// Resonant assignments for an arbitrary slot pattern.
pub fn resonant_assignments_for(
    unitary: &UnitaryOperator,
    pattern: &SlotPattern,
) -> Result<Vec<ResonantAssignment>> {
    resonant_for_pattern(unitary, pattern)
}
