//! Brute-force evaluation of the summatory objects.
//!
//! These are the ground truth every decomposition is measured against, so
//! they are written as plain loops over the defining ranges and are never
//! optimized beyond that.

use serde::{Deserialize, Serialize};

use crate::arith::{ArithmeticFunction, FunctionWindow, SieveFunction};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Parameters of one evaluation.
///
/// `x`, `h`, `H` drive the short averages; `Q` is the sieve range; `N` the
/// dyadic scale of long correlations. `x` and `N` are independent inputs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ParameterTuple {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x: Option<u64>,
    pub h: u64,
    #[serde(rename = "H")]
    pub shifts: u64,
    #[serde(rename = "Q", default, skip_serializing_if = "Option::is_none")]
    pub range: Option<u64>,
    #[serde(rename = "N", default, skip_serializing_if = "Option::is_none")]
    pub n: Option<u64>,
}

impl ParameterTuple {
    /// A short-average tuple `(x, h, H)`.
    pub fn short(x: u64, h: u64, shifts: u64) -> Self {
        Self { x: Some(x), h, shifts, range: None, n: None }
    }

    /// A long-correlation tuple `(N, H, h)`.
    pub fn long(n: u64, shifts: u64, h: u64) -> Self {
        Self { x: None, h, shifts, range: None, n: Some(n) }
    }

    pub fn with_range(mut self, q: u64) -> Self {
        self.range = Some(q);
        self
    }

    pub fn x(&self) -> Result<u64> {
        self.x.ok_or_else(|| Error::Hypothesis("x is required".into()))
    }

    pub fn big_n(&self) -> Result<u64> {
        self.n.ok_or_else(|| Error::Hypothesis("N is required".into()))
    }

    pub fn q(&self) -> Result<u64> {
        self.range.ok_or_else(|| Error::Hypothesis("Q is required".into()))
    }

    /// `1 ≤ h ≤ H` and `H + h < x`; the latter keeps every `n − a ≥ 1`.
    /// Returns `x`.
    pub fn check_short(&self) -> Result<u64> {
        let x = self.x()?;
        if self.h == 0 {
            return Err(Error::Hypothesis("h >= 1".into()));
        }
        if self.h > self.shifts {
            return Err(Error::Hypothesis(format!("h <= H (h = {}, H = {})", self.h, self.shifts)));
        }
        if self.shifts + self.h >= x {
            return Err(Error::Hypothesis(format!(
                "H + h < x (H = {}, h = {}, x = {x})",
                self.shifts, self.h
            )));
        }
        Ok(x)
    }

    /// `Q ≤ c·scale`, the checkable stand-in for `Q ≪ x`.
    pub fn check_scale(q: u64, scale: u64, c: f64, what: &str) -> Result<()> {
        if q as f64 > c * scale as f64 {
            return Err(Error::Hypothesis(format!("{what} <= c*x (value {q}, scale {scale}, c = {c})")));
        }
        Ok(())
    }
}

/// `Σ_{x<n≤x+h} f(n)`.
pub fn interval_sum<F: ArithmeticFunction + ?Sized>(f: &F, x: u64, h: u64) -> Result<Scalar> {
    let mut acc = Scalar::zero();
    for n in x + 1..=x + h {
        acc += &f.value(n)?;
    }
    Ok(acc)
}

/// `Σ_{x<n≤x+h, n≡a mod q} f(n)`.
pub fn ap_sum<F: ArithmeticFunction + ?Sized>(f: &F, x: u64, h: u64, a: u64, q: u64) -> Result<Scalar> {
    if q == 0 {
        return Err(Error::Domain("modulus q must be >= 1".into()));
    }
    let class = a % q;
    let mut acc = Scalar::zero();
    for n in x + 1..=x + h {
        if n % q == class {
            acc += &f.value(n)?;
        }
    }
    Ok(acc)
}

/// `C_{f,g}(N, a) = Σ_{N<n≤2N} f(n)·g(n−a)`, without conjugating `g`.
pub fn correlation<F, G>(f: &F, g: &G, big_n: u64, a: u64) -> Result<Scalar>
where
    F: ArithmeticFunction + ?Sized,
    G: ArithmeticFunction + ?Sized,
{
    if a == 0 {
        return Err(Error::Domain("shift a must be >= 1".into()));
    }
    if a > big_n {
        return Err(Error::Domain(format!("g-argument N + 1 - a < 1 (N = {big_n}, a = {a})")));
    }
    let mut acc = Scalar::zero();
    for n in big_n + 1..=2 * big_n {
        acc += &(&f.value(n)? * &g.value(n - a)?);
    }
    Ok(acc)
}

/// `Σ_{a≤H} C_{f,g}(N, a)`.
pub fn long_corr_average<F, G>(f: &F, g: &G, big_n: u64, shifts: u64) -> Result<Scalar>
where
    F: ArithmeticFunction + ?Sized,
    G: ArithmeticFunction + ?Sized,
{
    if shifts == 0 {
        return Err(Error::Domain("H must be >= 1".into()));
    }
    if big_n < shifts {
        return Err(Error::Domain(format!("N >= H required (N = {big_n}, H = {shifts})")));
    }
    let mut acc = Scalar::zero();
    for a in 1..=shifts {
        acc += &correlation(f, g, big_n, a)?;
    }
    Ok(acc)
}

/// `Σ_{a≤H} Σ_{x<n≤x+h} f(n)·g(n−a)`, the left side of every short identity.
pub fn short_corr_average<F, G>(f: &F, g: &G, t: &ParameterTuple) -> Result<Scalar>
where
    F: ArithmeticFunction + ?Sized,
    G: ArithmeticFunction + ?Sized,
{
    let x = t.x()?;
    if t.shifts > x {
        return Err(Error::Domain(format!("g-argument x + 1 - H < 1 (x = {x}, H = {})", t.shifts)));
    }
    let mut acc = Scalar::zero();
    for a in 1..=t.shifts {
        for n in x + 1..=x + t.h {
            acc += &(&f.value(n)? * &g.value(n - a)?);
        }
    }
    Ok(acc)
}

/// `Σ_{a≤H} Σ_{q≤Q} g′(q) Σ_{x<n≤x+h, n≡a mod q} f(n)` with `Q` the range
/// of `g`. Equal to [`short_corr_average`] for the realized `g`, exactly.
pub fn ap_expansion<F: ArithmeticFunction + ?Sized>(
    f: &F,
    g: &SieveFunction,
    t: &ParameterTuple,
) -> Result<Scalar> {
    let x = t.x()?;
    let mut acc = Scalar::zero();
    for a in 1..=t.shifts {
        for q in 1..=g.range() {
            let gq = g.transform().at(q);
            if gq.is_zero() {
                continue;
            }
            let inner = ap_sum(f, x, t.h, a, q)?;
            if !inner.is_zero() {
                acc += &(gq * &inner);
            }
        }
    }
    Ok(acc)
}

/// `f` on `(x, x+h]`, with residue-class sums answered by stepping through
/// the class instead of scanning the interval.
pub(crate) struct ShortInterval {
    window: FunctionWindow,
    total: Scalar,
}

impl ShortInterval {
    pub(crate) fn new<F: ArithmeticFunction + ?Sized>(f: &F, x: u64, h: u64) -> Result<Self> {
        let window = FunctionWindow::capture(f, x + 1, x + h)?;
        let total = window.values().iter().sum();
        Ok(Self { window, total })
    }

    /// `Σ_{x<n≤x+h} f(n)`.
    pub(crate) fn total(&self) -> &Scalar {
        &self.total
    }

    /// Same value as [`ap_sum`].
    pub(crate) fn class_sum(&self, a: u64, q: u64) -> Scalar {
        let first = self.window.start();
        let values = self.window.values();
        let offset = (a % q + q - first % q) % q;
        let mut acc = Scalar::zero();
        let mut i = offset as usize;
        while i < values.len() {
            acc += &values[i];
            i += q as usize;
        }
        acc
    }
}

impl ArithmeticFunction for ShortInterval {
    fn value(&self, n: u64) -> Result<Scalar> {
        self.window.value(n)
    }

    fn horizon(&self) -> Option<u64> {
        self.window.horizon()
    }
}
