//! Cesàro engines for every averaged expression: the multi-index entangled
//! mean (memoized engine plus a naive oracle), single-index power chains,
//! the adjoint and diagonal averages, and the rank-one factorized form.
//!
//! The engines only ever read `UnitaryOperator::matrix()`. Powers are built
//! by repeated multiplication, so averages never share a code path with the
//! spectral limit evaluators they are checked against.

mod engine;
mod oracle;
mod single;

pub use engine::entangled_average;
pub use oracle::entangled_average_oracle;
pub use single::{
    adjoint_average, adjoint_average_schedule, diagonal_average, diagonal_average_schedule,
    mean_ergodic_average, mean_ergodic_average_schedule, power_chain_average,
    power_chain_average_schedule, rank_one_factorized_weak_average, RankOneFactor,
};

use std::time::Instant;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::num_core::{ComplexMatrix, ComplexVector};
use crate::spectral::{Partition, UnitaryOperator};

/// Flop budget for one matrix-mode (or weak-mode) entangled mean.
pub const CHAIN_FLOP_BUDGET: f64 = 1e11;
/// Largest power table, counted in complex entries.
pub const POWER_TABLE_BUDGET: f64 = 1e8;
/// Largest oracle run, counted in tuples times slots.
pub const ORACLE_BUDGET: f64 = 1e6;

/// `U^{n_{α(1)}} A_1 U^{n_{α(2)}} ⋯ A_{m−1} U^{n_{α(m)}}` as data.
#[derive(Clone, Debug)]
pub struct OperatorChain {
    unitary: ComplexMatrix,
    partition: Partition,
    operators: Vec<ComplexMatrix>,
}

impl OperatorChain {
    pub fn new(
        unitary: &UnitaryOperator,
        partition: Partition,
        operators: Vec<ComplexMatrix>,
    ) -> Result<Self> {
        Self::from_matrix(unitary.matrix().clone(), partition, operators)
    }

    pub fn from_matrix(
        unitary: ComplexMatrix,
        partition: Partition,
        operators: Vec<ComplexMatrix>,
    ) -> Result<Self> {
        if !unitary.is_square() {
            return Err(Error::InvalidArgument("unitary must be square".into()));
        }
        if operators.len() + 1 != partition.slots() {
            return Err(Error::InvalidArgument(format!(
                "a partition of {} slots needs {} operators, got {}",
                partition.slots(),
                partition.slots() - 1,
                operators.len()
            )));
        }
        let d = unitary.rows();
        if let Some(bad) = operators.iter().position(|a| a.rows() != d || a.cols() != d) {
            return Err(Error::InvalidArgument(format!(
                "operator {} is not {d}x{d}",
                bad + 1
            )));
        }
        Ok(Self {
            unitary,
            partition,
            operators,
        })
    }

    pub fn unitary(&self) -> &ComplexMatrix {
        &self.unitary
    }

    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    pub fn operators(&self) -> &[ComplexMatrix] {
        &self.operators
    }

    pub fn dim(&self) -> usize {
        self.unitary.rows()
    }
}

/// Full matrix, or the matrix element `<Γ x, y>`.
#[derive(Clone, Debug)]
pub enum AverageMode {
    Matrix,
    Weak { x: ComplexVector, y: ComplexVector },
}

impl AverageMode {
    fn check_dim(&self, d: usize) -> Result<()> {
        match self {
            AverageMode::Weak { x, y } if x.dim() != d || y.dim() != d => Err(
                Error::InvalidArgument(format!("weak-mode vectors must have dimension {d}")),
            ),
            _ => Ok(()),
        }
    }
}

#[derive(Clone, Debug)]
pub enum AverageValue {
    Matrix(ComplexMatrix),
    Scalar(Complex64),
}

impl AverageValue {
    pub fn as_matrix(&self) -> Option<&ComplexMatrix> {
        match self {
            AverageValue::Matrix(m) => Some(m),
            AverageValue::Scalar(_) => None,
        }
    }

    pub fn as_scalar(&self) -> Option<Complex64> {
        match self {
            AverageValue::Scalar(z) => Some(*z),
            AverageValue::Matrix(_) => None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct AverageResult {
    pub n: usize,
    pub value: AverageValue,
    pub elapsed_seconds: f64,
}

impl AverageResult {
    pub(crate) fn timed(n: usize, start: Instant, value: AverageValue) -> Self {
        Self {
            n,
            value,
            elapsed_seconds: start.elapsed().as_secs_f64(),
        }
    }

    /// The matrix value; panics in weak mode.
    pub fn matrix(&self) -> &ComplexMatrix {
        self.value.as_matrix().expect("matrix-mode result")
    }

    /// The scalar value; panics in matrix mode.
    pub fn scalar(&self) -> Complex64 {
        self.value.as_scalar().expect("weak-mode result")
    }
}

pub(crate) fn require_positive(n: usize) -> Result<()> {
    if n == 0 {
        Err(Error::InvalidArgument("N must be at least 1".into()))
    } else {
        Ok(())
    }
}

/// `U^0, …, U^{n−1}` by repeated multiplication.
pub(crate) fn power_table(u: &ComplexMatrix, n: usize) -> Vec<ComplexMatrix> {
    let mut table = Vec::with_capacity(n);
    let mut current = ComplexMatrix::identity(u.rows());
    for t in 0..n {
        if t + 1 < n {
            let next = current.matmul(u);
            table.push(std::mem::replace(&mut current, next));
        } else {
            table.push(current.clone());
        }
    }
    table
}
