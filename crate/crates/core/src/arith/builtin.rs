use serde::{Deserialize, Serialize};

use super::{check_positive, ArithmeticFunction, FunctionTable};
use crate::error::Result;
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Builtin {
    /// The constant function 1.
    One,
    /// 1 at n = 1, else 0; the Dirichlet identity.
    Delta,
    Identity,
    Mobius,
    DivisorCount,
    EulerPhi,
}

impl Builtin {
    pub const ALL: [Builtin; 6] = [
        Builtin::One,
        Builtin::Delta,
        Builtin::Identity,
        Builtin::Mobius,
        Builtin::DivisorCount,
        Builtin::EulerPhi,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Builtin::One => "one",
            Builtin::Delta => "delta",
            Builtin::Identity => "identity",
            Builtin::Mobius => "mobius",
            Builtin::DivisorCount => "divisor-count",
            Builtin::EulerPhi => "euler-phi",
        }
    }

    pub fn from_name(name: &str) -> Option<Builtin> {
        Self::ALL.into_iter().find(|b| b.name() == name)
    }

    fn int_value(self, n: u64) -> i64 {
        match self {
            Builtin::One => 1,
            Builtin::Delta => (n == 1) as i64,
            Builtin::Identity => n as i64,
            Builtin::Mobius => mobius(n),
            Builtin::DivisorCount => divisor_count(n) as i64,
            Builtin::EulerPhi => euler_phi(n) as i64,
        }
    }

    /// Tabulates on `[1, n_max]`. The multiplicative builtins go through a
    /// linear sieve instead of factorizing every `n`.
    pub fn tabulate(self, n_max: u64) -> FunctionTable {
        match self {
            Builtin::Mobius | Builtin::DivisorCount | Builtin::EulerPhi => {
                let t = LinearSieve::new(n_max as usize);
                let pick = |n: usize| match self {
                    Builtin::Mobius => t.mobius[n] as i64,
                    Builtin::DivisorCount => t.divisors[n] as i64,
                    _ => t.phi[n] as i64,
                };
                FunctionTable::from_fn(n_max, |n| Scalar::from_int(pick(n as usize)))
            }
            _ => FunctionTable::from_fn(n_max, |n| Scalar::from_int(self.int_value(n))),
        }
    }
}

impl ArithmeticFunction for Builtin {
    fn value(&self, n: u64) -> Result<Scalar> {
        check_positive(n)?;
        Ok(Scalar::from_int(self.int_value(n)))
    }
}

/// Prime factorization by trial division, primes ascending.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn mobius(n: u64) -> i64 {
    let f = factorize(n);
    if f.iter().any(|&(_, e)| e > 1) {
        0
    } else if f.len() % 2 == 0 {
        1
    } else {
        -1
    }
}

pub fn divisor_count(n: u64) -> u64 {
    factorize(n).iter().map(|&(_, e)| e as u64 + 1).product()
}

pub fn euler_phi(n: u64) -> u64 {
    factorize(n)
        .iter()
        .map(|&(p, e)| (p - 1) * p.pow(e - 1))
        .product()
}

/// Linear sieve carrying μ, d and φ. Index 0 is unused.
struct LinearSieve {
    mobius: Vec<i8>,
    divisors: Vec<u32>,
    phi: Vec<u64>,
}

impl LinearSieve {
    fn new(n: usize) -> Self {
        let mut mobius = vec![0i8; n + 1];
        let mut divisors = vec![0u32; n + 1];
        let mut phi = vec![0u64; n + 1];
        // exponent of the smallest prime factor
        let mut spf_exp = vec![0u32; n + 1];
        let mut is_composite = vec![false; n + 1];
        let mut primes: Vec<usize> = Vec::new();
        if n >= 1 {
            mobius[1] = 1;
            divisors[1] = 1;
            phi[1] = 1;
        }
        for i in 2..=n {
            if !is_composite[i] {
                primes.push(i);
                mobius[i] = -1;
                divisors[i] = 2;
                phi[i] = i as u64 - 1;
                spf_exp[i] = 1;
            }
            for &p in &primes {
                let m = i * p;
                if m > n {
                    break;
                }
                is_composite[m] = true;
                if i % p == 0 {
                    mobius[m] = 0;
                    spf_exp[m] = spf_exp[i] + 1;
                    divisors[m] = divisors[i] / (spf_exp[i] + 1) * (spf_exp[m] + 1);
                    phi[m] = phi[i] * p as u64;
                    break;
                }
                mobius[m] = -mobius[i];
                spf_exp[m] = 1;
                divisors[m] = divisors[i] * 2;
                phi[m] = phi[i] * (p as u64 - 1);
            }
        }
        Self { mobius, divisors, phi }
    }
}
