//! Memoized entangled-mean engine.
//!
//! Index tuples are visited in odometer order with the block of slot 1
//! outermost and blocks nested by first appearance. Advancing the odometer
//! at depth `d` only changes slots at or after the first appearance of that
//! block, so the product of all factors left of that slot is reused. Each
//! slot's factor `U^t A_p` comes from a precomputed table.
//!
//! The outermost index is distributed over the rayon pool; each outer value
//! produces its own partial sum and the partials are added in index order,
//! so the result does not depend on the thread count.

use std::time::Instant;

use num_complex::Complex64;
use rayon::prelude::*;

use super::{
    power_table, require_positive, AverageMode, AverageResult, AverageValue, OperatorChain,
    CHAIN_FLOP_BUDGET, POWER_TABLE_BUDGET,
};
use crate::error::{check_budget, Result};
use crate::num_core::ComplexMatrix;

struct Layout {
    /// Odometer depth of every slot.
    slot_depth: Vec<usize>,
    /// First slot whose index lives at each depth.
    first_slot: Vec<usize>,
}

impl Layout {
    fn new(chain: &OperatorChain) -> Self {
        let partition = chain.partition();
        let mut depth_of_block = vec![usize::MAX; partition.blocks()];
        let mut first_slot = Vec::with_capacity(partition.blocks());
        for p in 0..partition.slots() {
            let b = partition.block_of(p);
            if depth_of_block[b] == usize::MAX {
                depth_of_block[b] = first_slot.len();
                first_slot.push(p);
            }
        }
        let slot_depth = (0..partition.slots())
            .map(|p| depth_of_block[partition.block_of(p)])
            .collect();
        Self {
            slot_depth,
            first_slot,
        }
    }
}

/// Slot factor tables: `U^t A_p` for inner slots, `U^t` for the last.
fn factor_tables(chain: &OperatorChain, n: usize) -> Vec<Vec<ComplexMatrix>> {
    let powers = power_table(chain.unitary(), n);
    let mut tables: Vec<Vec<ComplexMatrix>> = chain
        .operators()
        .iter()
        .map(|a| powers.iter().map(|pw| pw.matmul(a)).collect())
        .collect();
    tables.push(powers);
    tables
}

/// Exact finite entangled mean
/// `(1/N^k) Σ_{n_1..n_k} U^{n_{α(1)}} A_1 ⋯ A_{m−1} U^{n_{α(m)}}`.
pub fn entangled_average(
    chain: &OperatorChain,
    n: usize,
    mode: &AverageMode,
) -> Result<AverageResult> {
    require_positive(n)?;
    let d = chain.dim();
    mode.check_dim(d)?;
    let m = chain.partition().slots();
    let k = chain.partition().blocks();
    let tuples = (n as f64).powi(k as i32);
    let per_tuple = match mode {
        AverageMode::Matrix => (m * d * d * d) as f64,
        AverageMode::Weak { .. } => (m * d * d) as f64,
    };
    check_budget("entangled mean flops N^k·m·dim^p", tuples * per_tuple, CHAIN_FLOP_BUDGET)?;
    check_budget(
        "power table N·dim²",
        (m * n * d * d) as f64,
        POWER_TABLE_BUDGET,
    )?;

    let start = Instant::now();
    let layout = Layout::new(chain);
    let tables = factor_tables(chain, n);
    let scale = 1.0 / tuples;

    let value = match mode {
        AverageMode::Matrix => {
            let partials: Vec<ComplexMatrix> = (0..n)
                .into_par_iter()
                .map(|outer| matrix_partial(&layout, &tables, n, outer, d))
                .collect();
            let mut total = ComplexMatrix::zeros(d, d);
            for p in &partials {
                total.add_assign(p);
            }
            AverageValue::Matrix(total.scale_real(scale))
        }
        AverageMode::Weak { x, y } => {
            let y_row: Vec<Complex64> = y.as_slice().iter().map(|z| z.conj()).collect();
            let partials: Vec<Complex64> = (0..n)
                .into_par_iter()
                .map(|outer| weak_partial(&layout, &tables, n, outer, &y_row, x.as_slice()))
                .collect();
            let mut total = Complex64::new(0.0, 0.0);
            for p in partials {
                total += p;
            }
            AverageValue::Scalar(total * scale)
        }
    };
    Ok(AverageResult::timed(n, start, value))
}

/// Advances the inner odometer; returns the shallowest changed depth.
fn advance(idx: &mut [usize], n: usize) -> Option<usize> {
    for depth in (1..idx.len()).rev() {
        if idx[depth] + 1 < n {
            idx[depth] += 1;
            for deeper in &mut idx[depth + 1..] {
                *deeper = 0;
            }
            return Some(depth);
        }
    }
    None
}

fn matrix_partial(
    layout: &Layout,
    tables: &[Vec<ComplexMatrix>],
    n: usize,
    outer: usize,
    d: usize,
) -> ComplexMatrix {
    let m = tables.len();
    let mut idx = vec![0usize; layout.first_slot.len()];
    idx[0] = outer;
    // prefix[p] holds the product of the factors of slots 0..p.
    let mut prefix: Vec<ComplexMatrix> = (0..=m).map(|_| ComplexMatrix::zeros(d, d)).collect();
    let mut acc = ComplexMatrix::zeros(d, d);
    let mut from = 0;
    loop {
        for p in from..m {
            let factor = &tables[p][idx[layout.slot_depth[p]]];
            if p == 0 {
                prefix[1].as_mut_slice().copy_from_slice(factor.as_slice());
            } else {
                let (done, rest) = prefix.split_at_mut(p + 1);
                ComplexMatrix::mul_into(&done[p], factor, &mut rest[0]);
            }
        }
        acc.add_assign(&prefix[m]);
        match advance(&mut idx, n) {
            Some(depth) => from = layout.first_slot[depth],
            None => return acc,
        }
    }
}

fn weak_partial(
    layout: &Layout,
    tables: &[Vec<ComplexMatrix>],
    n: usize,
    outer: usize,
    y_row: &[Complex64],
    x: &[Complex64],
) -> Complex64 {
    let m = tables.len();
    let d = y_row.len();
    let mut idx = vec![0usize; layout.first_slot.len()];
    idx[0] = outer;
    // rows[p] = y* · (factors of slots 0..p).
    let mut rows: Vec<Vec<Complex64>> = vec![vec![Complex64::new(0.0, 0.0); d]; m + 1];
    rows[0].copy_from_slice(y_row);
    let mut acc = Complex64::new(0.0, 0.0);
    let mut from = 0;
    loop {
        for p in from..m {
            let factor = &tables[p][idx[layout.slot_depth[p]]];
            let (done, rest) = rows.split_at_mut(p + 1);
            ComplexMatrix::row_mul_into(&done[p], factor, &mut rest[0]);
        }
        let mut term = Complex64::new(0.0, 0.0);
        for (r, xi) in rows[m].iter().zip(x) {
            term += r * xi;
        }
        acc += term;
        match advance(&mut idx, n) {
            Some(depth) => from = layout.first_slot[depth],
            None => return acc,
        }
    }
}
