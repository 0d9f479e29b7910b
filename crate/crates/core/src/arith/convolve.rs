use super::{Builtin, FunctionTable};
use crate::error::Result;
use crate::scalar::Scalar;

/// `(F ∗ G)(n) = Σ_{d|n} F(d)·G(n/d)` on `[1, n_max]`.
///
/// Runs over pairs `(d, k)` with `d·k ≤ n_max`, so the cost is
/// `O(n_max log n_max)` exact multiplications.
pub fn dirichlet_convolve(
    left: &FunctionTable,
    right: &FunctionTable,
    n_max: u64,
) -> Result<FunctionTable> {
    left.require(n_max)?;
    right.require(n_max)?;
    let mut out = vec![Scalar::zero(); n_max as usize];
    for d in 1..=n_max {
        let fd = left.at(d);
        if fd.is_zero() {
            continue;
        }
        for k in 1..=n_max / d {
            let gk = right.at(k);
            if gk.is_zero() {
                continue;
            }
            out[(d * k - 1) as usize] += &(fd * gk);
        }
    }
    Ok(FunctionTable::new(out))
}

/// `F′ = F ∗ μ`, the inverse of summing over divisors.
pub fn eratosthenes_transform(table: &FunctionTable, n_max: u64) -> Result<FunctionTable> {
    table.require(n_max)?;
    dirichlet_convolve(table, &Builtin::Mobius.tabulate(n_max), n_max)
}
