//! Exact dyadic rationals `numerator / 2^exponent`.

use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Neg, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::bits::BitString;
use crate::error::ParseError;

/// `numerator / 2^exponent`, kept canonical: the numerator is odd, or zero
/// with exponent 0.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Dyadic {
    numerator: BigInt,
    exponent: i64,
}

impl Dyadic {
    pub fn new(numerator: impl Into<BigInt>, exponent: i64) -> Self {
        let mut numerator = numerator.into();
        let mut exponent = exponent;
        if numerator.is_zero() {
            return Self::zero();
        }
        let tz = numerator.trailing_zeros().unwrap_or(0) as i64;
        if tz > 0 {
            numerator >>= tz as usize;
            exponent -= tz;
        }
        Self { numerator, exponent }
    }

    pub fn zero() -> Self {
        Self {
            numerator: BigInt::zero(),
            exponent: 0,
        }
    }

    pub fn one() -> Self {
        Self::new(1, 0)
    }

    /// `2^k` for any integer `k`.
    pub fn pow2(k: i64) -> Self {
        Self::new(1, -k)
    }

    pub fn from_int(v: i64) -> Self {
        Self::new(v, 0)
    }

    pub fn numerator(&self) -> &BigInt {
        &self.numerator
    }

    pub fn exponent(&self) -> i64 {
        self.exponent
    }

    pub fn is_zero(&self) -> bool {
        self.numerator.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.numerator.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.numerator.is_negative()
    }

    /// `self · 2^k`.
    pub fn mul_pow2(&self, k: i64) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        Self {
            numerator: self.numerator.clone(),
            exponent: self.exponent - k,
        }
    }

    /// Numerator scaled to the common exponent `exp >= self.exponent`.
    fn scaled(&self, exp: i64) -> BigInt {
        &self.numerator << (exp - self.exponent) as usize
    }

    /// `⌊self · 2^j⌋`.
    pub fn floor_scaled(&self, j: i64) -> BigInt {
        let e = self.exponent - j;
        if e <= 0 {
            &self.numerator << (-e) as usize
        } else {
            self.numerator.div_floor(&(BigInt::one() << e as usize))
        }
    }

    /// `⌈self · 2^j⌉`.
    pub fn ceil_scaled(&self, j: i64) -> BigInt {
        let e = self.exponent - j;
        if e <= 0 {
            &self.numerator << (-e) as usize
        } else {
            self.numerator.div_ceil(&(BigInt::one() << e as usize))
        }
    }

    /// The first `j` bits of the binary expansion of a value in `[0, 1]`,
    /// by truncation. The value 1 expands as `0.111…`.
    pub fn truncate_bits(&self, j: usize) -> BitString {
        let top = (BigInt::one() << j) - 1;
        let v = self.floor_scaled(j as i64).clamp(BigInt::zero(), top);
        big_to_bits(&v, j)
    }

    /// `⌈self · 2^j⌉` written with `j` bits; `None` if it does not fit.
    pub fn ceil_bits(&self, j: usize) -> Option<BitString> {
        let v = self.ceil_scaled(j as i64);
        if v.is_negative() || v >= (BigInt::one() << j) {
            return None;
        }
        Some(big_to_bits(&v, j))
    }

    /// `⌈−log₂ self⌉` for a positive value: the least integer `b` with
    /// `2^-b <= self`.
    pub fn neg_log2_ceil(&self) -> Option<i64> {
        if !self.is_positive() {
            return None;
        }
        // self = num · 2^-e with num odd: −log₂ self = e − log₂ num.
        let floor_log = self.numerator.bits() as i64 - 1;
        Some(self.exponent - floor_log)
    }

    /// The value of a word read as a binary fraction `0.w`.
    pub fn from_fraction_bits(w: &BitString) -> Self {
        let mut num = BigInt::zero();
        for b in w.iter() {
            num <<= 1;
            if b {
                num += 1;
            }
        }
        Self::new(num, w.len() as i64)
    }

    pub fn to_f64(&self) -> f64 {
        let n = self.numerator.to_f64().unwrap_or(f64::NAN);
        n * 2f64.powi(-(self.exponent.clamp(i32::MIN as i64, i32::MAX as i64) as i32))
    }
}

fn big_to_bits(v: &BigInt, width: usize) -> BitString {
    let mut bits = vec![false; width];
    for (i, slot) in bits.iter_mut().enumerate() {
        *slot = v.bit((width - 1 - i) as u64);
    }
    BitString::from_bits(bits)
}

impl Default for Dyadic {
    fn default() -> Self {
        Self::zero()
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let e = self.exponent.max(other.exponent);
        self.scaled(e).cmp(&other.scaled(e))
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Add for &Dyadic {
    type Output = Dyadic;
    fn add(self, rhs: &Dyadic) -> Dyadic {
        let e = self.exponent.max(rhs.exponent);
        Dyadic::new(self.scaled(e) + rhs.scaled(e), e)
    }
}

impl Add for Dyadic {
    type Output = Dyadic;
    fn add(self, rhs: Dyadic) -> Dyadic {
        &self + &rhs
    }
}

impl AddAssign<&Dyadic> for Dyadic {
    fn add_assign(&mut self, rhs: &Dyadic) {
        *self = &*self + rhs;
    }
}

impl Sub for &Dyadic {
    type Output = Dyadic;
    fn sub(self, rhs: &Dyadic) -> Dyadic {
        let e = self.exponent.max(rhs.exponent);
        Dyadic::new(self.scaled(e) - rhs.scaled(e), e)
    }
}

impl Sub for Dyadic {
    type Output = Dyadic;
    fn sub(self, rhs: Dyadic) -> Dyadic {
        &self - &rhs
    }
}

impl Neg for Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        Dyadic {
            numerator: -self.numerator,
            exponent: self.exponent,
        }
    }
}

impl<'a> Sum<&'a Dyadic> for Dyadic {
    fn sum<I: Iterator<Item = &'a Dyadic>>(iter: I) -> Self {
        iter.fold(Dyadic::zero(), |acc, x| &acc + x)
    }
}

impl Sum for Dyadic {
    fn sum<I: Iterator<Item = Dyadic>>(iter: I) -> Self {
        iter.fold(Dyadic::zero(), |acc, x| &acc + &x)
    }
}

/// `num/2^exp`, the form used in database headers.
impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/2^{}", self.numerator, self.exponent)
    }
}

impl fmt::Debug for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl FromStr for Dyadic {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ParseError::new(format!("expected <num>/2^<exp>, got {s:?}"));
        let (num, exp) = s.split_once("/2^").ok_or_else(bad)?;
        let num: BigInt = num.parse().map_err(|_| bad())?;
        let exp: i64 = exp.parse().map_err(|_| bad())?;
        Ok(Dyadic::new(num, exp))
    }
}

impl serde::Serialize for Dyadic {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> serde::Deserialize<'de> for Dyadic {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Sign helper for reports: `-1`, `0` or `1`.
pub fn sign(d: &Dyadic) -> i8 {
    match d.numerator.sign() {
        Sign::Minus => -1,
        Sign::NoSign => 0,
        Sign::Plus => 1,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::bs;
    use proptest::prelude::*;

    fn d(num: i64, exp: i64) -> Dyadic {
        Dyadic::new(num, exp)
    }

    #[test]
    fn canonical_form() {
        assert_eq!(d(4, 3), d(1, 1));
        assert_eq!(d(4, 3).numerator(), &BigInt::from(1));
        assert_eq!(d(0, 17), Dyadic::zero());
        assert_eq!(d(0, 17).exponent(), 0);
        assert_eq!(d(6, 0).exponent(), -1);
    }

    #[test]
    fn truncation_of_one_eighth() {
        let v = Dyadic::pow2(-3);
        assert_eq!(v.truncate_bits(3), bs("001"));
        assert_eq!(v.truncate_bits(5), bs("00100"));
        assert_eq!(v.truncate_bits(1), bs("0"));
        assert_eq!(v.truncate_bits(2), bs("00"));
        assert_eq!(Dyadic::one().truncate_bits(3), bs("111"));
    }

    #[test]
    fn neg_log_ceiling() {
        assert_eq!(Dyadic::one().neg_log2_ceil(), Some(0));
        assert_eq!(d(1, 3).neg_log2_ceil(), Some(3));
        assert_eq!(d(3, 3).neg_log2_ceil(), Some(2)); // 3/8 >= 1/4
        assert_eq!(d(5, 4).neg_log2_ceil(), Some(2)); // 5/16 >= 1/4
        assert_eq!(d(7, 3).neg_log2_ceil(), Some(1));
        assert_eq!(Dyadic::zero().neg_log2_ceil(), None);
    }

    #[test]
    fn header_form_round_trips() {
        for v in [d(0, 0), d(1, 3), d(9, 6), d(-5, 2), d(3, -4)] {
            assert_eq!(v.to_string().parse::<Dyadic>().unwrap(), v);
        }
        assert_eq!(d(1, 3).to_string(), "1/2^3");
        assert!("1/3".parse::<Dyadic>().is_err());
    }

    #[test]
    fn ceil_bits_rounds_up() {
        assert_eq!(d(1, 4).ceil_bits(3), Some(bs("001")));
        assert_eq!(d(1, 2).ceil_bits(3), Some(bs("010")));
        assert_eq!(Dyadic::one().ceil_bits(3), None);
    }

    proptest! {
        #[test]
        fn field_laws(a in -1000i64..1000, ea in -5i64..12, b in -1000i64..1000, eb in -5i64..12) {
            let (x, y) = (d(a, ea), d(b, eb));
            prop_assert_eq!(&(&x + &y) - &y, x.clone());
            prop_assert_eq!(&x + &y, &y + &x);
            let fx = a as f64 / 2f64.powi(ea as i32);
            let fy = b as f64 / 2f64.powi(eb as i32);
            prop_assert_eq!(x.cmp(&y), fx.partial_cmp(&fy).unwrap());
            prop_assert!((x.to_f64() - fx).abs() < 1e-9);
        }

        #[test]
        fn fraction_bits_round_trip(bits in proptest::collection::vec(any::<bool>(), 0..40)) {
            let w = BitString::from_bits(bits);
            let v = Dyadic::from_fraction_bits(&w);
            prop_assert_eq!(v.truncate_bits(w.len()), w);
        }
    }
}
