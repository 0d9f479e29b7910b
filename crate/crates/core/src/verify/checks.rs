use serde::Serialize;

use crate::arith::divisor_count;
use crate::error::{Error, Result};

/// A direct count next to the divisor-sum majorant that bounds it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct CountCheck {
    pub count: u64,
    pub bound: u64,
}

impl CountCheck {
    pub fn holds(&self) -> bool {
        self.count <= self.bound
    }
}

/// The three exceptional-modulus counts behind the pinch remainders.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct DivisorChecks {
    /// `#{h<q≤H : ∃ 0≤a<h, x+a ≡ H mod q}` against `Σ_{0≤a<h} d(x+a−H)`
    pub near_shift_class: CountCheck,
    /// `#{h<q≤H : q−h < q{x/q} < q}` against `Σ_{0<a<h} d(x+a)`
    pub near_wrap: CountCheck,
    /// `#{H<q≤Q : H−h < q{x/q} ≤ H}` against `Σ_{0≤a<h} d(x+a−H)`
    pub large_moduli: CountCheck,
}

impl DivisorChecks {
    pub fn all(&self) -> [CountCheck; 3] {
        [self.near_shift_class, self.near_wrap, self.large_moduli]
    }
}

/// Counts by integer loops, majorants by divisor counts. Requires
/// `1 ≤ h ≤ H < Q` and `H + h < x`, so every divisor-count argument is
/// positive.
pub fn divisor_count_checks(x: u64, h: u64, shifts: u64, q_max: u64) -> Result<DivisorChecks> {
    if h == 0 || h > shifts || shifts >= q_max {
        return Err(Error::Hypothesis(format!(
            "1 <= h <= H < Q (h = {h}, H = {shifts}, Q = {q_max})"
        )));
    }
    if shifts + h >= x {
        return Err(Error::Hypothesis(format!("H + h < x (H = {shifts}, h = {h}, x = {x})")));
    }

    let first = (h + 1..=shifts)
        .filter(|&q| (0..h).any(|a| (x + a - shifts) % q == 0))
        .count() as u64;
    let second = (h + 1..=shifts)
        .filter(|&q| {
            let r = x % q;
            q - h < r && r < q
        })
        .count() as u64;
    let third = (shifts + 1..=q_max)
        .filter(|&q| {
            let r = x % q;
            shifts - h < r && r <= shifts
        })
        .count() as u64;

    let shifted_bound: u64 = (0..h).map(|a| divisor_count(x + a - shifts)).sum();
    let wrap_bound: u64 = (1..h).map(|a| divisor_count(x + a)).sum();

    let checks = DivisorChecks {
        near_shift_class: CountCheck { count: first, bound: shifted_bound },
        near_wrap: CountCheck { count: second, bound: wrap_bound },
        large_moduli: CountCheck { count: third, bound: shifted_bound },
    };
    if let Some(bad) = checks.all().iter().find(|c| !c.holds()) {
        return Err(Error::BoundViolated(format!(
            "count {} exceeds divisor bound {} at x = {x}, h = {h}, H = {shifts}, Q = {q_max}",
            bad.count, bad.bound
        )));
    }
    Ok(checks)
}
