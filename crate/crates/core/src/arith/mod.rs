//! Arithmetic functions `f: ℕ → ℂ` and their algebra.
//!
//! Everything evaluates to an exact [`Scalar`]. Arguments start at 1; a zero
//! argument is always a domain error rather than a silent zero.

mod builtin;
mod convolve;
mod random;
mod sieve;
mod spec;

pub use builtin::{divisor_count, euler_phi, factorize, mobius, Builtin};
pub use convolve::{dirichlet_convolve, eratosthenes_transform};
pub use random::RandomFunction;
pub use sieve::SieveFunction;
pub use spec::FunctionSpec;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Anything that can be evaluated at a positive integer.
pub trait ArithmeticFunction {
    fn value(&self, n: u64) -> Result<Scalar>;

    /// Largest admissible argument, if the function is only known on a
    /// finite prefix.
    fn horizon(&self) -> Option<u64> {
        None
    }
}

impl<F: ArithmeticFunction + ?Sized> ArithmeticFunction for &F {
    fn value(&self, n: u64) -> Result<Scalar> {
        (**self).value(n)
    }

    fn horizon(&self) -> Option<u64> {
        (**self).horizon()
    }
}

pub(crate) fn check_positive(n: u64) -> Result<()> {
    if n == 0 {
        Err(Error::Domain("arithmetic functions are defined for n >= 1".into()))
    } else {
        Ok(())
    }
}

/// Values `f(1), …, f(N_max)`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct FunctionTable {
    values: Vec<Scalar>,
}

impl FunctionTable {
    pub fn new(values: Vec<Scalar>) -> Self {
        Self { values }
    }

    pub fn from_fn(n_max: u64, mut f: impl FnMut(u64) -> Scalar) -> Self {
        Self { values: (1..=n_max).map(&mut f).collect() }
    }

    /// Tabulates any function on `[1, n_max]`.
    pub fn tabulate<F: ArithmeticFunction + ?Sized>(f: &F, n_max: u64) -> Result<Self> {
        let values = (1..=n_max).map(|n| f.value(n)).collect::<Result<_>>()?;
        Ok(Self { values })
    }

    pub fn n_max(&self) -> u64 {
        self.values.len() as u64
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[Scalar] {
        &self.values
    }

    /// `f(n)`; panics outside `[1, N_max]`.
    pub fn at(&self, n: u64) -> &Scalar {
        &self.values[(n - 1) as usize]
    }

    pub fn get(&self, n: u64) -> Option<&Scalar> {
        if n == 0 {
            return None;
        }
        self.values.get((n - 1) as usize)
    }

    /// The first `n_max` entries.
    pub fn truncated(&self, n_max: u64) -> Result<Self> {
        self.require(n_max)?;
        Ok(Self { values: self.values[..n_max as usize].to_vec() })
    }

    pub(crate) fn require(&self, n_max: u64) -> Result<()> {
        if self.n_max() < n_max {
            Err(Error::Domain(format!(
                "table covers [1, {}] but [1, {n_max}] is required",
                self.n_max()
            )))
        } else {
            Ok(())
        }
    }
}

impl ArithmeticFunction for FunctionTable {
    fn value(&self, n: u64) -> Result<Scalar> {
        check_positive(n)?;
        self.get(n)
            .cloned()
            .ok_or(Error::Horizon { n, horizon: self.n_max() })
    }

    fn horizon(&self) -> Option<u64> {
        Some(self.n_max())
    }
}

/// Values of a function on a contiguous range `[start, start + len)`.
///
/// Short-interval sums only ever touch a few thousand arguments near `x`;
/// windows avoid tabulating everything below.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FunctionWindow {
    start: u64,
    values: Vec<Scalar>,
}

impl FunctionWindow {
    pub fn new(start: u64, values: Vec<Scalar>) -> Result<Self> {
        check_positive(start)?;
        Ok(Self { start, values })
    }

    /// Evaluates `f` on `[lo, hi]`.
    pub fn capture<F: ArithmeticFunction + ?Sized>(f: &F, lo: u64, hi: u64) -> Result<Self> {
        check_positive(lo)?;
        let values = (lo..=hi).map(|n| f.value(n)).collect::<Result<_>>()?;
        Ok(Self { start: lo, values })
    }

    pub fn start(&self) -> u64 {
        self.start
    }

    /// Last covered argument.
    pub fn end(&self) -> u64 {
        self.start + self.values.len() as u64 - 1
    }

    pub fn values(&self) -> &[Scalar] {
        &self.values
    }
}

impl ArithmeticFunction for FunctionWindow {
    fn value(&self, n: u64) -> Result<Scalar> {
        check_positive(n)?;
        if n < self.start {
            return Err(Error::Domain(format!("argument {n} precedes window start {}", self.start)));
        }
        self.values
            .get((n - self.start) as usize)
            .cloned()
            .ok_or(Error::Horizon { n, horizon: self.end() })
    }

    fn horizon(&self) -> Option<u64> {
        Some(self.end())
    }
}

/// `max_{n ≤ N_max} |F(n)| / n^ε`, the smallest constant certifying
/// `|F(n)| ≤ C·n^ε` on the table. Says nothing about larger `n`.
pub fn essential_bound_constant(table: &FunctionTable, epsilon: f64) -> Result<f64> {
    if table.is_empty() {
        return Err(Error::Domain("empty table".into()));
    }
    if !(epsilon > 0.0) {
        return Err(Error::Domain(format!("epsilon must be positive, got {epsilon}")));
    }
    Ok(table
        .values()
        .iter()
        .enumerate()
        .map(|(i, v)| v.abs_f64() / ((i + 1) as f64).powf(epsilon))
        .fold(0.0, f64::max))
}
