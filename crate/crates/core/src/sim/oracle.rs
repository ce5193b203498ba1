//! Exhaustive maximum-likelihood group detector, used as a reference for
//! the magnitude-sum index detector.

use crate::codec::{index_to_bits, Constellation, LookupTable};
use crate::error::{Error, Result};
use crate::numerics::Complex64;

pub const MAX_HYPOTHESES: usize = 1024;

/// Number of (row, symbol tuple) hypotheses for one group.
pub fn hypothesis_count(table: &LookupTable, cons: &Constellation) -> Option<usize> {
    (0..table.active()).try_fold(table.len(), |acc, _| acc.checked_mul(cons.order()))
}

/// Jointly searches every table row and every QAM tuple on its positions
/// for the hypothesis minimising `sum_n |observed[n] - gain[n] * d[n]|^2`.
/// Ties go to the first hypothesis in (row, label) order.
pub fn ml_oracle_decode(
    observed: &[Complex64],
    table: &LookupTable,
    cons: &Constellation,
    gain: &[Complex64],
) -> Result<Vec<bool>> {
    let n = table.group_size();
    if observed.len() != n || gain.len() != n {
        return Err(Error::Dimension(format!(
            "observation {} and gain {} for a group of {n}",
            observed.len(),
            gain.len()
        )));
    }
    let count = hypothesis_count(table, cons).filter(|&c| c <= MAX_HYPOTHESES);
    if count.is_none() {
        return Err(Error::InvalidParameter(format!(
            "hypothesis space exceeds {MAX_HYPOTHESES}"
        )));
    }
    let k = table.active();
    let m = cons.order();
    let idle: f64 = observed.iter().map(|z| z.norm_sqr()).sum();

    let mut best = (f64::INFINITY, 0usize, 0usize);
    for (row_idx, row) in table.rows().enumerate() {
        // active positions replace their idle term with the symbol residual
        let base = idle - row.iter().map(|&i| observed[i].norm_sqr()).sum::<f64>();
        for tuple in 0..m.pow(k as u32) {
            let mut cost = base;
            let mut rest = tuple;
            for &pos in row.iter().rev() {
                let label = rest % m;
                rest /= m;
                cost += (observed[pos] - gain[pos] * cons.points()[label]).norm_sqr();
            }
            if cost < best.0 {
                best = (cost, row_idx, tuple);
            }
        }
    }
    let (_, row, tuple) = best;
    let mut bits = Vec::with_capacity(table.index_bits() + k * cons.bits_per_symbol());
    index_to_bits(row, table.index_bits(), &mut bits);
    index_to_bits(tuple, k * cons.bits_per_symbol(), &mut bits);
    Ok(bits)
}
