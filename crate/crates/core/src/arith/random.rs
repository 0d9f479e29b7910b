use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{check_positive, ArithmeticFunction, FunctionTable};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Fractional bits of every random value.
pub const DYADIC_BITS: u32 = 8;

/// Seeded, bounded, complex-valued function with dyadic components
/// `k / 2^DYADIC_BITS`, `|k| ≤ ⌊B·2^DYADIC_BITS⌋`.
///
/// `f(n)` is read from a fixed position of the ChaCha8 keystream, so values
/// do not depend on evaluation order and every prefix of a tabulation is
/// stable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RandomFunction {
    seed: u64,
    bound: BigRational,
    max_numer: u64,
}

impl RandomFunction {
    pub fn new(seed: u64, bound: BigRational) -> Result<Self> {
        if !bound.is_positive() {
            return Err(Error::Domain("random function bound must be positive".into()));
        }
        let scaled = (&bound * BigRational::from_integer(BigInt::from(1u64 << DYADIC_BITS))).floor();
        let max_numer = scaled
            .to_integer()
            .to_u64()
            .filter(|m| *m < (1 << 62))
            .ok_or_else(|| Error::Domain("random function bound too large".into()))?;
        Ok(Self { seed, bound, max_numer })
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn bound(&self) -> &BigRational {
        &self.bound
    }

    fn component(&self, word: u64) -> BigRational {
        let span = 2 * self.max_numer + 1;
        let k = (word % span) as i64 - self.max_numer as i64;
        BigRational::new(BigInt::from(k), BigInt::from(1u64 << DYADIC_BITS))
    }

    pub fn tabulate(&self, n_max: u64) -> FunctionTable {
        FunctionTable::from_fn(n_max, |n| self.sample(n))
    }

    fn sample(&self, n: u64) -> Scalar {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        // two u64 draws (four 32-bit words) per argument
        rng.set_word_pos(4 * (n as u128 - 1));
        let re = rng.next_u64();
        let im = rng.next_u64();
        Scalar::new(self.component(re), self.component(im))
    }
}

impl ArithmeticFunction for RandomFunction {
    fn value(&self, n: u64) -> Result<Scalar> {
        check_positive(n)?;
        Ok(self.sample(n))
    }
}
