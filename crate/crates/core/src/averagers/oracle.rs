use std::time::Instant;

use num_complex::Complex64;

use super::{require_positive, AverageMode, AverageResult, AverageValue, OperatorChain, ORACLE_BUDGET};
use crate::error::{check_budget, Result};
use crate::num_core::ComplexMatrix;

/// Reference entangled mean: every tuple's product is formed from scratch,
/// with each power computed by repeated squaring. No tables, no caching.
pub fn entangled_average_oracle(
    chain: &OperatorChain,
    n: usize,
    mode: &AverageMode,
) -> Result<AverageResult> {
    require_positive(n)?;
    let d = chain.dim();
    mode.check_dim(d)?;
    let partition = chain.partition();
    let (m, k) = (partition.slots(), partition.blocks());
    let tuples = (n as f64).powi(k as i32);
    check_budget("oracle N^k·m", tuples * m as f64, ORACLE_BUDGET)?;

    let start = Instant::now();
    let mut matrix_sum = ComplexMatrix::zeros(d, d);
    let mut scalar_sum = Complex64::new(0.0, 0.0);
    let mut idx = vec![0usize; k];
    loop {
        let mut product = chain.unitary().pow(idx[partition.block_of(0)] as u64);
        for p in 1..m {
            product = product.matmul(&chain.operators()[p - 1]);
            product = product.matmul(&chain.unitary().pow(idx[partition.block_of(p)] as u64));
        }
        match mode {
            AverageMode::Matrix => matrix_sum.add_assign(&product),
            AverageMode::Weak { x, y } => scalar_sum += product.mul_vec(x).inner(y),
        }
        // Lexicographic in block labels, last block fastest.
        let mut j = k;
        loop {
            if j == 0 {
                let value = match mode {
                    AverageMode::Matrix => AverageValue::Matrix(matrix_sum.scale_real(1.0 / tuples)),
                    AverageMode::Weak { .. } => AverageValue::Scalar(scalar_sum / tuples),
                };
                return Ok(AverageResult::timed(n, start, value));
            }
            j -= 1;
            idx[j] += 1;
            if idx[j] < n {
                break;
            }
            idx[j] = 0;
        }
    }
}
