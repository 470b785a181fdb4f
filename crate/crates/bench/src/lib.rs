//! Shared fixtures for the benchmarks.

use ergodiclab::averagers::OperatorChain;
use ergodiclab::num_core::random::{random_low_rank, random_unit_vector};
use ergodiclab::num_core::{haar_unitary, stream_rng, ComplexMatrix, ComplexVector};
use ergodiclab::spectral::{Partition, UnitaryOperator};

/// Haar unitary and norm-one operators for `assignment`, seeded.
pub fn chain(dim: usize, assignment: &[usize], seed: u64) -> OperatorChain {
    let partition = Partition::new(assignment.to_vec()).expect("valid partition");
    let mut rng = stream_rng(seed, 1);
    let ops = (1..partition.slots())
        .map(|_| random_low_rank(dim, dim, &mut rng))
        .collect();
    OperatorChain::from_matrix(haar_unitary(dim, seed).expect("dim > 0"), partition, ops)
        .expect("consistent chain")
}

pub fn unitary(dim: usize, seed: u64) -> UnitaryOperator {
    UnitaryOperator::from_matrix(haar_unitary(dim, seed).expect("dim > 0")).expect("unitary")
}

pub fn operator(dim: usize, seed: u64) -> ComplexMatrix {
    random_low_rank(dim, dim, &mut stream_rng(seed, 1))
}

pub fn probes(dim: usize, seed: u64) -> (ComplexVector, ComplexVector) {
    let mut rng = stream_rng(seed, 1 << 32);
    (random_unit_vector(dim, &mut rng), random_unit_vector(dim, &mut rng))
}
