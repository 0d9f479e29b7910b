//! Exact complex scalars with rational components.

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::Error;

/// A complex number `re + i·im` whose parts are reduced rationals.
///
/// Every arithmetic operation is exact; `BigRational` keeps both parts in
/// lowest terms with a positive denominator.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Scalar {
    pub re: BigRational,
    pub im: BigRational,
}

impl Scalar {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        Self { re, im }
    }

    pub fn real(re: BigRational) -> Self {
        Self { re, im: BigRational::zero() }
    }

    pub fn from_int(n: i64) -> Self {
        Self::real(BigRational::from_integer(BigInt::from(n)))
    }

    /// `num/den` as a real scalar. Panics on a zero denominator.
    pub fn ratio(num: i64, den: i64) -> Self {
        Self::real(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    /// Exact division by a positive integer.
    pub fn div_int(&self, d: u64) -> Self {
        assert!(d > 0, "division by zero");
        let d = BigRational::from_integer(BigInt::from(d));
        Self { re: &self.re / &d, im: &self.im / &d }
    }

    pub fn mul_int(&self, k: i64) -> Self {
        let k = BigRational::from_integer(BigInt::from(k));
        Self { re: &self.re * &k, im: &self.im * &k }
    }

    /// Modulus `|z|` in floating point. Only used for reporting.
    pub fn abs_f64(&self) -> f64 {
        let re = ratio_to_f64(&self.re);
        let im = ratio_to_f64(&self.im);
        re.hypot(im)
    }

    /// Largest of `|re|` and `|im|`, exactly.
    pub fn max_component(&self) -> BigRational {
        let re = self.re.abs();
        let im = self.im.abs();
        if re >= im {
            re
        } else {
            im
        }
    }
}

pub(crate) fn ratio_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        if r.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}

/// Formats a rational as `num/den`, always showing the denominator.
pub fn format_rational(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Parses `num/den` or a bare integer.
pub fn parse_rational(s: &str) -> Result<BigRational, Error> {
    let s = s.trim();
    let bad = || Error::Parse(format!("invalid rational {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n = BigInt::from_str(n.trim()).map_err(|_| bad())?;
            let d = BigInt::from_str(d.trim()).map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(BigRational::new(n, d))
        }
        None => Ok(BigRational::from_integer(BigInt::from_str(s).map_err(|_| bad())?)),
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            write!(f, "{}", format_rational(&self.re))
        } else {
            let sign = if self.im.is_negative() { '-' } else { '+' };
            write!(f, "{}{}{}i", format_rational(&self.re), sign, format_rational(&self.im.abs()))
        }
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Self::from_int(n)
    }
}

impl From<BigRational> for Scalar {
    fn from(r: BigRational) -> Self {
        Self::real(r)
    }
}

impl Add for Scalar {
    type Output = Scalar;
    fn add(mut self, rhs: Scalar) -> Scalar {
        self += &rhs;
        self
    }
}

impl Add<&Scalar> for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        Scalar { re: &self.re + &rhs.re, im: &self.im + &rhs.im }
    }
}

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, rhs: &Scalar) {
        if rhs.re.is_zero() && rhs.im.is_zero() {
            return;
        }
        self.re += &rhs.re;
        self.im += &rhs.im;
    }
}

impl AddAssign for Scalar {
    fn add_assign(&mut self, rhs: Scalar) {
        *self += &rhs;
    }
}

impl Sub for Scalar {
    type Output = Scalar;
    fn sub(mut self, rhs: Scalar) -> Scalar {
        self -= &rhs;
        self
    }
}

impl Sub<&Scalar> for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        Scalar { re: &self.re - &rhs.re, im: &self.im - &rhs.im }
    }
}

impl SubAssign<&Scalar> for Scalar {
    fn sub_assign(&mut self, rhs: &Scalar) {
        self.re -= &rhs.re;
        self.im -= &rhs.im;
    }
}

impl Mul<&Scalar> for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        // Real operands are the common case; skip the cross terms.
        if self.im.is_zero() && rhs.im.is_zero() {
            return Scalar::real(&self.re * &rhs.re);
        }
        Scalar {
            re: &self.re * &rhs.re - &self.im * &rhs.im,
            im: &self.re * &rhs.im + &self.im * &rhs.re,
        }
    }
}

impl Mul for Scalar {
    type Output = Scalar;
    fn mul(self, rhs: Scalar) -> Scalar {
        &self * &rhs
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar { re: -self.re, im: -self.im }
    }
}

impl Sum for Scalar {
    fn sum<I: Iterator<Item = Scalar>>(iter: I) -> Scalar {
        iter.fold(Scalar::zero(), |mut acc, x| {
            acc += &x;
            acc
        })
    }
}

impl<'a> Sum<&'a Scalar> for Scalar {
    fn sum<I: Iterator<Item = &'a Scalar>>(iter: I) -> Scalar {
        iter.fold(Scalar::zero(), |mut acc, x| {
            acc += x;
            acc
        })
    }
}

impl serde::Serialize for Scalar {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("Scalar", 2)?;
        st.serialize_field("re", &format_rational(&self.re))?;
        st.serialize_field("im", &format_rational(&self.im))?;
        st.end()
    }
}

impl<'de> serde::Deserialize<'de> for Scalar {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(serde::Deserialize)]
        struct Parts {
            re: String,
            im: String,
        }
        let p = Parts::deserialize(d)?;
        let re = parse_rational(&p.re).map_err(serde::de::Error::custom)?;
        let im = parse_rational(&p.im).map_err(serde::de::Error::custom)?;
        Ok(Scalar { re, im })
    }
}

/// Builds a rational from an `i64` pair; handy in tests and tables.
pub fn rational(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn arb_scalar() -> impl Strategy<Value = Scalar> {
        (any::<i32>(), 1..1000i64, any::<i32>(), 1..1000i64).prop_map(|(a, b, c, d)| {
            Scalar::new(rational(a as i64, b), rational(c as i64, d))
        })
    }

    #[test]
    fn display_always_shows_denominator() {
        assert_eq!(Scalar::zero().to_string(), "0/1");
        assert_eq!(Scalar::ratio(-6, 4).to_string(), "-3/2");
    }

    #[test]
    fn parse_rational_forms() {
        assert_eq!(parse_rational("3/6").unwrap(), rational(1, 2));
        assert_eq!(parse_rational("-7").unwrap(), rational(-7, 1));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn json_form() {
        let z = Scalar::new(rational(1, 2), rational(-3, 1));
        let text = serde_json::to_string(&z).unwrap();
        assert_eq!(text, r#"{"re":"1/2","im":"-3/1"}"#);
        assert_eq!(serde_json::from_str::<Scalar>(&text).unwrap(), z);
        assert_eq!(z.to_string(), "1/2-3/1i");
    }

    #[test]
    fn complex_product() {
        let i = Scalar::new(rational(0, 1), rational(1, 1));
        assert_eq!(&i * &i, Scalar::from_int(-1));
    }

    #[test]
    fn abs_of_three_four() {
        let z = Scalar::new(rational(3, 1), rational(4, 1));
        assert!((z.abs_f64() - 5.0).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn add_then_sub_is_exact(a in arb_scalar(), b in arb_scalar()) {
            prop_assert_eq!((a.clone() + b.clone()) - b, a);
        }

        #[test]
        fn multiplication_distributes(a in arb_scalar(), b in arb_scalar(), c in arb_scalar()) {
            let lhs = &a * &(&b + &c);
            let rhs = &(&a * &b) + &(&a * &c);
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn formatted_parts_roundtrip(a in arb_scalar()) {
            prop_assert_eq!(parse_rational(&format_rational(&a.re)).unwrap(), a.re.clone());
        }
    }
}
