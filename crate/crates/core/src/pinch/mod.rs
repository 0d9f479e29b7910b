//! Main-term evaluators for the averaged short correlations, each paired with
//! the brute-force left side so that every remainder is an exact number.
//!
//! Fractional parts never leave the integers: for integer `x` and `q ≥ 1`,
//! `{x/q} = (x mod q)/q`, so `{x/q} ≤ {H/q}` is `x mod q ≤ H mod q` and
//! `{x/q} ≤ H/q` is `x mod q ≤ H`.

mod long;
mod report;
mod short;

pub use long::{theorem3_decompose, theorem3_envelope, Theorem3Form};
pub use report::{DecompositionReport, Identity, Term};
pub use short::{
    corollary_residuals, lemma_first_decompose, lemma_second_decompose, remark4_decompose,
    shifted_divisor_mass, theorem0_decompose, theorem1_decompose, theorem1_main_terms,
    theorem2_decompose, upper_divisor_sum,
};

use serde::Serialize;

use crate::arith::ArithmeticFunction;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// How a fractional-part comparison is read.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FracVariant {
    /// `{x/q} ≤ {H/q}`
    FracFrac,
    /// `{x/q} ≤ H/q`
    FracRatio,
}

pub fn fractional_condition(x: u64, shifts: u64, q: u64, variant: FracVariant) -> bool {
    assert!(q >= 1, "modulus must be positive");
    match variant {
        FracVariant::FracFrac => x % q <= shifts % q,
        FracVariant::FracRatio => x % q <= shifts,
    }
}

/// The single possible term of a residue-class sum over an interval shorter
/// than the modulus: `n = q·m + a` with `x < n ≤ x + h`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SporadicTerm {
    pub n: u64,
    pub m: u64,
    pub value: Scalar,
}

/// Expands `Σ_{x<n≤x+h, n≡a mod q} f(n)` for `q > h` through the two
/// indicator cases: with `r = x mod q`,
///
/// * `r < a ≤ r + h` gives `n = q⌊x/q⌋ + a`,
/// * `a ≤ r + h − q` gives `n = q⌊x/q⌋ + q + a`,
///
/// and the two are mutually exclusive since `h < q`. Requires `1 ≤ a ≤ q`
/// and `a < x`, the latter forcing `m ≥ 1`.
pub fn sporadic_expansion<F: ArithmeticFunction + ?Sized>(
    f: &F,
    x: u64,
    h: u64,
    a: u64,
    q: u64,
) -> Result<Vec<SporadicTerm>> {
    if q <= h {
        return Err(Error::Precondition(format!("sporadic sums need q > h (q = {q}, h = {h})")));
    }
    if a == 0 || a > q {
        return Err(Error::Precondition(format!("residue a must lie in [1, q] (a = {a}, q = {q})")));
    }
    if a >= x {
        return Err(Error::Precondition(format!("residue a must be below x (a = {a}, x = {x})")));
    }
    let base = x / q;
    let r = x % q;
    // Signed: r + h − q is usually negative.
    let (a_s, r_s, h_s, q_s) = (a as i128, r as i128, h as i128, q as i128);
    let mut out = Vec::with_capacity(1);
    if r_s < a_s && a_s <= r_s + h_s {
        let n = q * base + a;
        out.push(SporadicTerm { n, m: base, value: f.value(n)? });
    }
    if a_s <= r_s + h_s - q_s {
        let n = q * (base + 1) + a;
        out.push(SporadicTerm { n, m: base + 1, value: f.value(n)? });
    }
    debug_assert!(out.len() <= 1);
    Ok(out)
}
