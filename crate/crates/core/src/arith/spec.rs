//! Declarative function specs and their JSON form.
//!
//! ```json
//! {"kind":"builtin","name":"mobius"}
//! {"kind":"table","values":[[1,1,0,1],[-1,2,3,4]]}
//! {"kind":"sieve","transform":{"kind":"builtin","name":"one"},"range":5}
//! {"kind":"random","seed":7,"bound":"1/1"}
//! {"kind":"convolution","left":{...},"right":{...}}
//! ```
//!
//! Table entries are `[re_num, re_den, im_num, im_den]`; each entry may be a
//! JSON integer or a decimal string (for values beyond `i64`).

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use super::{
    check_positive, dirichlet_convolve, ArithmeticFunction, Builtin, FunctionTable,
    RandomFunction, SieveFunction,
};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum FunctionSpec {
    Builtin {
        name: Builtin,
    },
    Table {
        #[serde(with = "table_values")]
        values: Vec<Scalar>,
    },
    Sieve {
        transform: Box<FunctionSpec>,
        range: u64,
    },
    Random {
        seed: u64,
        #[serde(with = "rational_literal")]
        bound: BigRational,
    },
    Convolution {
        left: Box<FunctionSpec>,
        right: Box<FunctionSpec>,
    },
}

impl FunctionSpec {
    pub fn builtin(b: Builtin) -> Self {
        FunctionSpec::Builtin { name: b }
    }

    pub fn random(seed: u64, bound: BigRational) -> Self {
        FunctionSpec::Random { seed, bound }
    }

    pub fn sieve(transform: FunctionSpec, range: u64) -> Self {
        FunctionSpec::Sieve { transform: Box::new(transform), range }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let spec: Self = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("specs always serialize")
    }

    /// Structural checks that serde cannot express.
    pub fn validate(&self) -> Result<()> {
        match self {
            FunctionSpec::Builtin { .. } | FunctionSpec::Table { .. } => Ok(()),
            FunctionSpec::Sieve { transform, range } => {
                if *range == 0 {
                    return Err(Error::Parse("sieve range must be >= 1".into()));
                }
                transform.validate()
            }
            FunctionSpec::Random { seed, bound } => RandomFunction::new(*seed, bound.clone())
                .map(|_| ())
                .map_err(|e| Error::Parse(e.to_string())),
            FunctionSpec::Convolution { left, right } => {
                left.validate()?;
                right.validate()
            }
        }
    }

    /// Shifts the seed of every random leaf; used to reseed a whole spec tree
    /// from one command-line seed.
    pub fn with_seed_offset(&self, offset: u64) -> Self {
        match self {
            FunctionSpec::Random { seed, bound } => {
                FunctionSpec::Random { seed: seed.wrapping_add(offset), bound: bound.clone() }
            }
            FunctionSpec::Sieve { transform, range } => FunctionSpec::Sieve {
                transform: Box::new(transform.with_seed_offset(offset)),
                range: *range,
            },
            FunctionSpec::Convolution { left, right } => FunctionSpec::Convolution {
                left: Box::new(left.with_seed_offset(offset)),
                right: Box::new(right.with_seed_offset(offset)),
            },
            other => other.clone(),
        }
    }

    pub fn tabulate(&self, n_max: u64) -> Result<FunctionTable> {
        match self {
            FunctionSpec::Builtin { name } => Ok(name.tabulate(n_max)),
            FunctionSpec::Table { values } => {
                if (values.len() as u64) < n_max {
                    return Err(Error::Horizon { n: n_max, horizon: values.len() as u64 });
                }
                Ok(FunctionTable::new(values[..n_max as usize].to_vec()))
            }
            FunctionSpec::Sieve { transform, range } => {
                Ok(SieveFunction::new(transform.tabulate(*range)?)?.tabulate(n_max))
            }
            FunctionSpec::Random { seed, bound } => {
                Ok(RandomFunction::new(*seed, bound.clone())?.tabulate(n_max))
            }
            FunctionSpec::Convolution { left, right } => {
                dirichlet_convolve(&left.tabulate(n_max)?, &right.tabulate(n_max)?, n_max)
            }
        }
    }

    /// The sieve function this spec describes, when it is of sieve kind.
    pub fn sieve_function(&self) -> Option<Result<SieveFunction>> {
        match self {
            FunctionSpec::Sieve { transform, range } => {
                Some(transform.tabulate(*range).and_then(SieveFunction::new))
            }
            _ => None,
        }
    }
}

impl ArithmeticFunction for FunctionSpec {
    fn value(&self, n: u64) -> Result<Scalar> {
        check_positive(n)?;
        match self {
            FunctionSpec::Builtin { name } => name.value(n),
            FunctionSpec::Table { values } => values
                .get((n - 1) as usize)
                .cloned()
                .ok_or(Error::Horizon { n, horizon: values.len() as u64 }),
            FunctionSpec::Sieve { transform, range } => {
                let mut acc = Scalar::zero();
                for q in (1..=(*range).min(n)).filter(|q| n % q == 0) {
                    acc += &transform.value(q)?;
                }
                Ok(acc)
            }
            FunctionSpec::Random { seed, bound } => RandomFunction::new(*seed, bound.clone())?.value(n),
            FunctionSpec::Convolution { left, right } => {
                let mut acc = Scalar::zero();
                for d in (1..=n).filter(|d| n % d == 0) {
                    acc += &(&left.value(d)? * &right.value(n / d)?);
                }
                Ok(acc)
            }
        }
    }

    fn horizon(&self) -> Option<u64> {
        match self {
            FunctionSpec::Table { values } => Some(values.len() as u64),
            FunctionSpec::Convolution { left, right } => match (left.horizon(), right.horizon()) {
                (Some(a), Some(b)) => Some(a.min(b)),
                (a, b) => a.or(b),
            },
            _ => None,
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum IntLiteral {
    Int(i64),
    Text(String),
}

impl IntLiteral {
    fn parse(&self) -> std::result::Result<num_bigint::BigInt, String> {
        match self {
            IntLiteral::Int(i) => Ok((*i).into()),
            IntLiteral::Text(s) => s.trim().parse().map_err(|_| format!("invalid integer {s:?}")),
        }
    }

    fn from_big(b: &num_bigint::BigInt) -> Self {
        i64::try_from(b).map(IntLiteral::Int).unwrap_or_else(|_| IntLiteral::Text(b.to_string()))
    }
}

mod table_values {
    use super::*;
    use num_traits::Zero;
    use serde::de::Error as _;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(values: &[Scalar], s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<[IntLiteral; 4]> = values
            .iter()
            .map(|v| {
                [
                    IntLiteral::from_big(v.re.numer()),
                    IntLiteral::from_big(v.re.denom()),
                    IntLiteral::from_big(v.im.numer()),
                    IntLiteral::from_big(v.im.denom()),
                ]
            })
            .collect();
        rows.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Scalar>, D::Error> {
        let rows = Vec::<[IntLiteral; 4]>::deserialize(d)?;
        rows.iter()
            .map(|[a, b, c, e]| {
                let (a, b, c, e) = (a.parse(), b.parse(), c.parse(), e.parse());
                let (a, b, c, e) = (
                    a.map_err(D::Error::custom)?,
                    b.map_err(D::Error::custom)?,
                    c.map_err(D::Error::custom)?,
                    e.map_err(D::Error::custom)?,
                );
                if b.is_zero() || e.is_zero() {
                    return Err(D::Error::custom("zero denominator in table entry"));
                }
                Ok(Scalar::new(BigRational::new(a, b), BigRational::new(c, e)))
            })
            .collect()
    }
}

mod rational_literal {
    use super::*;
    use crate::scalar::{format_rational, parse_rational};
    use serde::de::Error as _;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<BigRational, D::Error> {
        match IntLiteral::deserialize(d)? {
            IntLiteral::Int(i) => Ok(BigRational::from_integer(i.into())),
            IntLiteral::Text(s) => parse_rational(&s).map_err(D::Error::custom),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rational;
    use proptest::prelude::*;

    #[test]
    fn parse_each_kind() {
        let b = FunctionSpec::from_json(r#"{"kind":"builtin","name":"divisor-count"}"#).unwrap();
        assert_eq!(b, FunctionSpec::builtin(Builtin::DivisorCount));

        let t = FunctionSpec::from_json(r#"{"kind":"table","values":[[1,2,0,1],["-3","4",5,6]]}"#).unwrap();
        assert_eq!(t.value(2).unwrap(), Scalar::new(rational(-3, 4), rational(5, 6)));
        assert_eq!(t.horizon(), Some(2));
        assert!(matches!(t.value(3), Err(Error::Horizon { .. })));

        let r = FunctionSpec::from_json(r#"{"kind":"random","seed":3,"bound":"1/2"}"#).unwrap();
        assert_eq!(r, FunctionSpec::random(3, rational(1, 2)));
        let r2 = FunctionSpec::from_json(r#"{"kind":"random","seed":3,"bound":2}"#).unwrap();
        assert_eq!(r2, FunctionSpec::random(3, rational(2, 1)));

        let c = FunctionSpec::from_json(
            r#"{"kind":"convolution","left":{"kind":"builtin","name":"one"},"right":{"kind":"builtin","name":"one"}}"#,
        )
        .unwrap();
        assert_eq!(c.value(12).unwrap(), Scalar::from_int(6));
    }

    #[test]
    fn malformed_specs_are_parse_errors() {
        for bad in [
            "{",
            r#"{"kind":"builtin","name":"lambda"}"#,
            r#"{"kind":"sieve","transform":{"kind":"builtin","name":"one"},"range":0}"#,
            r#"{"kind":"random","seed":1,"bound":"0/1"}"#,
            r#"{"kind":"table","values":[[1,0,0,1]]}"#,
        ] {
            assert!(matches!(FunctionSpec::from_json(bad), Err(Error::Parse(_))), "{bad}");
        }
    }

    #[test]
    fn sieve_spec_eval() {
        let g = FunctionSpec::sieve(FunctionSpec::builtin(Builtin::One), 5);
        assert_eq!(g.value(30).unwrap(), Scalar::from_int(4));
        assert_eq!(g.value(28).unwrap(), Scalar::from_int(3));
        let sf = g.sieve_function().unwrap().unwrap();
        assert_eq!(sf.range(), 5);
        assert_eq!(g.tabulate(60).unwrap(), sf.tabulate(60));
    }

    #[test]
    fn seed_offset_reaches_nested_leaves() {
        let g = FunctionSpec::sieve(FunctionSpec::random(10, rational(1, 1)), 4);
        match g.with_seed_offset(5) {
            FunctionSpec::Sieve { transform, .. } => {
                assert_eq!(*transform, FunctionSpec::random(15, rational(1, 1)))
            }
            _ => unreachable!(),
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        #[test]
        fn json_round_trip_and_tabulate_agrees_with_eval(seed in any::<u64>(), q in 1u64..30) {
            let spec = FunctionSpec::Convolution {
                left: Box::new(FunctionSpec::sieve(FunctionSpec::random(seed, rational(3, 2)), q)),
                right: Box::new(FunctionSpec::Table {
                    values: RandomFunction::new(seed ^ 1, rational(1, 1)).unwrap().tabulate(80).values().to_vec(),
                }),
            };
            let back = FunctionSpec::from_json(&spec.to_json()).unwrap();
            prop_assert_eq!(&back, &spec);
            let table = spec.tabulate(80).unwrap();
            for n in 1..=80 {
                prop_assert_eq!(table.at(n).clone(), spec.value(n).unwrap());
            }
        }
    }
}
