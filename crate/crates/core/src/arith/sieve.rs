use super::{check_positive, ArithmeticFunction, FunctionTable, FunctionWindow};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// A sieve function of range `Q`: `g(n) = Σ_{q|n, q≤Q} g′(q)`.
///
/// Stores the transform `g′(1..=Q)`; the support bound is the table length.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SieveFunction {
    transform: FunctionTable,
}

impl SieveFunction {
    pub fn new(transform: FunctionTable) -> Result<Self> {
        if transform.is_empty() {
            return Err(Error::Domain("sieve function needs range Q >= 1".into()));
        }
        Ok(Self { transform })
    }

    /// Restricts an arbitrary `g′` to `[1, range]`.
    pub fn from_transform<F: ArithmeticFunction + ?Sized>(transform: &F, range: u64) -> Result<Self> {
        Self::new(FunctionTable::tabulate(transform, range)?)
    }

    /// The constant function 1, as the range-1 sieve with `g′ = δ`.
    pub fn one() -> Self {
        Self { transform: FunctionTable::new(vec![Scalar::one()]) }
    }

    pub fn range(&self) -> u64 {
        self.transform.n_max()
    }

    pub fn transform(&self) -> &FunctionTable {
        &self.transform
    }

    /// `g′(q)`, zero beyond the range.
    pub fn transform_at(&self, q: u64) -> Scalar {
        self.transform.get(q).cloned().unwrap_or_default()
    }

    /// True when only `g′(1)` can be nonzero, so `g` is constant.
    pub fn is_constant(&self) -> bool {
        self.transform.values()[1..].iter().all(Scalar::is_zero)
    }

    /// Direct evaluation by divisor enumeration up to `min(Q, √n)`.
    pub fn eval(&self, n: u64) -> Result<Scalar> {
        check_positive(n)?;
        let q_max = self.range();
        let mut acc = Scalar::zero();
        if q_max * q_max <= n {
            for q in 1..=q_max {
                if n % q == 0 {
                    acc += self.transform.at(q);
                }
            }
            return Ok(acc);
        }
        let mut d = 1u64;
        while d * d <= n {
            if n % d == 0 {
                if d <= q_max {
                    acc += self.transform.at(d);
                }
                let co = n / d;
                if co != d && co <= q_max {
                    acc += self.transform.at(co);
                }
            }
            d += 1;
        }
        Ok(acc)
    }

    /// `g` on `[lo, hi]` by one divisor-sieve pass: each `g′(q)` is added at
    /// the multiples of `q` inside the window.
    pub fn window(&self, lo: u64, hi: u64) -> Result<FunctionWindow> {
        check_positive(lo)?;
        let len = (hi + 1).saturating_sub(lo) as usize;
        let mut values = vec![Scalar::zero(); len];
        for (i, gq) in self.transform.values().iter().enumerate() {
            if gq.is_zero() {
                continue;
            }
            let q = i as u64 + 1;
            let mut m = lo.div_ceil(q) * q;
            while m <= hi {
                values[(m - lo) as usize] += gq;
                m += q;
            }
        }
        FunctionWindow::new(lo, values)
    }

    pub fn tabulate(&self, n_max: u64) -> FunctionTable {
        let w = self.window(1, n_max).expect("window starting at 1");
        FunctionTable::new(w.values().to_vec())
    }
}

impl ArithmeticFunction for SieveFunction {
    fn value(&self, n: u64) -> Result<Scalar> {
        self.eval(n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{dirichlet_convolve, eratosthenes_transform, Builtin, RandomFunction};
    use crate::scalar::rational;
    use proptest::prelude::*;

    fn ones(q: u64) -> SieveFunction {
        SieveFunction::from_transform(&Builtin::One, q).unwrap()
    }

    fn divisors_up_to(n: u64, q: u64) -> i64 {
        (1..=q.min(n)).filter(|d| n % d == 0).count() as i64
    }

    #[test]
    fn truncated_divisor_counts() {
        let g = ones(5);
        assert_eq!(g.eval(30).unwrap(), Scalar::from_int(divisors_up_to(30, 5)));
        assert_eq!(g.eval(30).unwrap(), Scalar::from_int(4));
        assert_eq!(g.eval(28).unwrap(), Scalar::from_int(3));
        assert_eq!(g.eval(101).unwrap(), Scalar::one());
        assert!(g.eval(0).is_err());
    }

    #[test]
    fn delta_transform_is_constant_one() {
        let g = SieveFunction::from_transform(&Builtin::Delta, 7).unwrap();
        assert!(g.is_constant());
        for n in [1, 2, 97, 1_000_000] {
            assert_eq!(g.eval(n).unwrap(), Scalar::one());
        }
        assert_eq!(SieveFunction::one().eval(12).unwrap(), Scalar::one());
    }

    #[test]
    fn window_matches_eval_far_out() {
        let g = SieveFunction::new(RandomFunction::new(5, rational(2, 1)).unwrap().tabulate(300)).unwrap();
        let w = g.window(99_000, 99_400).unwrap();
        for n in 99_000..=99_400 {
            assert_eq!(w.value(n).unwrap(), g.eval(n).unwrap());
        }
    }

    #[test]
    fn transform_round_trip() {
        let q = 40;
        let n_max = 300;
        let g = SieveFunction::new(RandomFunction::new(9, rational(1, 1)).unwrap().tabulate(q)).unwrap();
        let back = eratosthenes_transform(&g.tabulate(n_max), n_max).unwrap();
        for n in 1..=n_max {
            assert_eq!(*back.at(n), g.transform_at(n));
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn realization_equals_convolution_with_one(seed in any::<u64>(), q in 1u64..60) {
            let n_max = 240;
            let g = SieveFunction::new(RandomFunction::new(seed, rational(1, 1)).unwrap().tabulate(q)).unwrap();
            let padded = FunctionTable::from_fn(n_max, |n| g.transform_at(n));
            let conv = dirichlet_convolve(&padded, &Builtin::One.tabulate(n_max), n_max).unwrap();
            let table = g.tabulate(n_max);
            for n in 1..=n_max {
                prop_assert_eq!(g.eval(n).unwrap(), conv.at(n).clone());
                prop_assert_eq!(table.at(n), conv.at(n));
            }
        }
    }
}
