//! Fixtures shared by the benchmarks.

use pinchsum_core::scalar::rational;
use pinchsum_core::{RandomFunction, SieveFunction};

pub fn random_function(seed: u64) -> RandomFunction {
    RandomFunction::new(seed, rational(1, 1)).expect("unit bound is valid")
}

/// A sieve function of range `q` with a random unit-bounded transform.
pub fn random_sieve(seed: u64, q: u64) -> SieveFunction {
    SieveFunction::new(random_function(seed).tabulate(q)).expect("q >= 1")
}
