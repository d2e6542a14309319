//! Exact rational scalars.
//!
//! Every verdict-relevant quantity in this crate is a [`Scalar`]. The
//! textual form is `"num/den"`, or `"num"` when the denominator is one,
//! and that is also the JSON representation.

use std::cmp::Ordering;
use std::fmt;
use std::iter::{Product, Sum};
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::GptError;

/// An exact rational number kept in lowest terms with a positive denominator.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Scalar(BigRational);

impl Scalar {
    /// `num / den`. Panics if `den == 0`.
    pub fn new(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Scalar(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn from_bigints(num: BigInt, den: BigInt) -> Result<Self, GptError> {
        if den.is_zero() {
            return Err(GptError::Parse("zero denominator".into()));
        }
        Ok(Scalar(BigRational::new(num, den)))
    }

    pub fn int(n: i64) -> Self {
        Scalar(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn zero() -> Self {
        Scalar(BigRational::zero())
    }

    pub fn one() -> Self {
        Scalar(BigRational::one())
    }

    pub fn half() -> Self {
        Scalar::new(1, 2)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn abs(&self) -> Self {
        Scalar(self.0.abs())
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn recip(&self) -> Self {
        assert!(!self.is_zero(), "reciprocal of zero");
        Scalar(self.0.recip())
    }

    pub fn square(&self) -> Self {
        Scalar(&self.0 * &self.0)
    }

    /// `2^-exp`.
    pub fn pow2_recip(exp: usize) -> Self {
        Scalar(BigRational::new(BigInt::one(), BigInt::one() << exp))
    }

    pub fn pow(&self, exp: u32) -> Self {
        let mut acc = Scalar::one();
        for _ in 0..exp {
            acc = &acc * self;
        }
        acc
    }

    /// Nearest `f64`; only for search heuristics, never for verdicts.
    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or_else(|| {
            if self.is_negative() {
                f64::NEG_INFINITY
            } else {
                f64::INFINITY
            }
        })
    }

    /// The rational `round(x * 2^bits) / 2^bits`. Non-finite input maps to zero.
    pub fn from_f64_dyadic(x: f64, bits: u32) -> Self {
        if !x.is_finite() {
            return Scalar::zero();
        }
        let scaled = (x * 2f64.powi(bits as i32)).round();
        let num = BigRational::from_float(scaled)
            .map(|r| r.to_integer())
            .unwrap_or_default();
        Scalar(BigRational::new(num, BigInt::one() << bits))
    }

    /// Exact square root when `self` is the square of a rational.
    pub fn exact_sqrt(&self) -> Option<Self> {
        if self.is_negative() {
            return None;
        }
        let n = self.numer().sqrt();
        let d = self.denom().sqrt();
        (&n * &n == *self.numer() && &d * &d == *self.denom())
            .then(|| Scalar(BigRational::new(n, d)))
    }

    /// A rational `r` with `r >= 0` and `r^2 <= self`; exact when possible.
    pub fn sqrt_lower(&self) -> Self {
        assert!(!self.is_negative(), "square root of a negative scalar");
        if let Some(r) = self.exact_sqrt() {
            return r;
        }
        let r = self.sqrt_floor_dyadic(SQRT_BITS);
        debug_assert!(r.square() <= *self);
        r
    }

    /// A rational `r` with `r^2 >= self`; exact when possible.
    pub fn sqrt_upper(&self) -> Self {
        assert!(!self.is_negative(), "square root of a negative scalar");
        if let Some(r) = self.exact_sqrt() {
            return r;
        }
        let unit = Scalar::pow2_recip(SQRT_BITS as usize);
        let r = &self.sqrt_floor_dyadic(SQRT_BITS) + &unit;
        debug_assert!(r.square() >= *self);
        r
    }

    // floor(sqrt(self) * 2^bits) / 2^bits, computed with integer roots.
    fn sqrt_floor_dyadic(&self, bits: u32) -> Self {
        let scale = BigInt::one() << (2 * bits as usize);
        let floor = (self.numer() * scale) / self.denom();
        Scalar(BigRational::new(floor.sqrt(), BigInt::one() << bits as usize))
    }

    pub fn signum(&self) -> i32 {
        match self.0.numer().sign() {
            Sign::Minus => -1,
            Sign::NoSign => 0,
            Sign::Plus => 1,
        }
    }

    pub fn max(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    pub fn min(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }
}

const SQRT_BITS: u32 = 48;

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.denom().is_one() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Scalar {
    type Err = GptError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let bad = || GptError::Parse(format!("invalid rational {s:?}"));
        let (num, den) = match s.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (s, "1"),
        };
        let num: BigInt = num.replace('\u{2212}', "-").parse().map_err(|_| bad())?;
        let den: BigInt = den.parse().map_err(|_| bad())?;
        Scalar::from_bigints(num, den)
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::int(n)
    }
}

impl From<BigRational> for Scalar {
    fn from(r: BigRational) -> Self {
        Scalar(r)
    }
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct ScalarVisitor;

        impl Visitor<'_> for ScalarVisitor {
            type Value = Scalar;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a rational string \"num/den\" or an integer")
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<Scalar, E> {
                v.parse().map_err(E::custom)
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Scalar, E> {
                Ok(Scalar::int(v))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Scalar, E> {
                Ok(Scalar(BigRational::from_integer(BigInt::from(v))))
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Scalar, E> {
                Err(E::custom(format!(
                    "floating-point value {v} not accepted; write it as \"num/den\""
                )))
            }
        }

        deserializer.deserialize_any(ScalarVisitor)
    }
}

macro_rules! forward_binop {
    ($Trait:ident, $method:ident) => {
        impl $Trait<&Scalar> for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                Scalar((&self.0).$method(&rhs.0))
            }
        }
        impl $Trait<Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                Scalar(self.0.$method(rhs.0))
            }
        }
        impl $Trait<&Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                Scalar(self.0.$method(&rhs.0))
            }
        }
        impl $Trait<Scalar> for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                Scalar((&self.0).$method(rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
forward_binop!(Div, div);

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, rhs: &Scalar) {
        self.0 += &rhs.0;
    }
}

impl SubAssign<&Scalar> for Scalar {
    fn sub_assign(&mut self, rhs: &Scalar) {
        self.0 -= &rhs.0;
    }
}

impl MulAssign<&Scalar> for Scalar {
    fn mul_assign(&mut self, rhs: &Scalar) {
        self.0 *= &rhs.0;
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar(-self.0)
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar(-&self.0)
    }
}

impl Sum for Scalar {
    fn sum<I: Iterator<Item = Scalar>>(iter: I) -> Scalar {
        iter.fold(Scalar::zero(), |acc, x| acc + x)
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

impl Product for Scalar {
    fn product<I: Iterator<Item = Scalar>>(iter: I) -> Scalar {
        iter.fold(Scalar::one(), |acc, x| acc * x)
    }
}

impl PartialEq<i64> for Scalar {
    fn eq(&self, other: &i64) -> bool {
        *self == Scalar::int(*other)
    }
}

impl PartialOrd<i64> for Scalar {
    fn partial_cmp(&self, other: &i64) -> Option<Ordering> {
        Some(self.cmp(&Scalar::int(*other)))
    }
}

/// Shorthand for building rational literals in tests and constructions.
pub fn q(num: i64, den: i64) -> Scalar {
    Scalar::new(num, den)
}

/// `sum x*y` over the pairs, reduced to lowest terms once at the end.
pub fn sum_of_products<'a>(pairs: impl IntoIterator<Item = (&'a Scalar, &'a Scalar)>) -> Scalar {
    let mut num = BigInt::zero();
    let mut den = BigInt::one();
    for (x, y) in pairs {
        if x.is_zero() || y.is_zero() {
            continue;
        }
        let n = x.numer() * y.numer();
        let d = x.denom() * y.denom();
        if d == den {
            num += n;
        } else if d.is_one() {
            num += n * &den;
        } else {
            num = num * &d + n * &den;
            den *= d;
        }
    }
    Scalar(BigRational::new(num, den))
}

/// Euclidean dot product of two equal-length slices.
pub fn dot(a: &[Scalar], b: &[Scalar]) -> Scalar {
    debug_assert_eq!(a.len(), b.len());
    sum_of_products(a.iter().zip(b))
}

/// Squared Euclidean norm.
pub fn norm_sq(a: &[Scalar]) -> Scalar {
    a.iter().map(Scalar::square).sum()
}
