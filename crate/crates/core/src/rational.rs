//! Exact rationals, the projective line over them, and p-adic valuations.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{parse_err, Error, Result};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Rational(BigRational);

impl Rational {
    pub fn new(num: i64, den: i64) -> Result<Self> {
        if den == 0 {
            return Err(parse_err(&format!("{num}/{den}"), "zero denominator"));
        }
        Ok(Rational(BigRational::new(num.into(), den.into())))
    }

    pub fn integer(n: i64) -> Self {
        Rational(BigRational::from_integer(n.into()))
    }

    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    /// `p^e`, for any integer `e`.
    pub fn power(p: u64, e: i64) -> Self {
        let base = BigInt::from(p).pow(e.unsigned_abs() as u32);
        if e >= 0 {
            Rational(BigRational::from_integer(base))
        } else {
            Rational(BigRational::new(BigInt::one(), base))
        }
    }

    pub fn checked_div(&self, other: &Rational) -> Option<Rational> {
        (!other.is_zero()).then(|| Rational(&self.0 / &other.0))
    }

    pub fn abs(&self) -> Self {
        Rational(self.0.abs())
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident) => {
        impl $tr for &Rational {
            type Output = Rational;
            fn $m(self, rhs: &Rational) -> Rational {
                Rational($tr::$m(&self.0, &rhs.0))
            }
        }
        impl $tr for Rational {
            type Output = Rational;
            fn $m(self, rhs: Rational) -> Rational {
                Rational($tr::$m(self.0, rhs.0))
            }
        }
    };
}
binop!(Add, add);
binop!(Sub, sub);
binop!(Mul, mul);

impl Div for &Rational {
    type Output = Rational;
    /// Panics on a zero divisor; see [`Rational::checked_div`].
    fn div(self, rhs: &Rational) -> Rational {
        Rational(&self.0 / &rhs.0)
    }
}

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-&self.0)
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::integer(n)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.denom().is_one() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Rational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        let (n, d) = match t.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (t, "1"),
        };
        let n: BigInt = n.parse().map_err(|_| parse_err(s, "bad numerator"))?;
        let d: BigInt = d.parse().map_err(|_| parse_err(s, "bad denominator"))?;
        if d.is_zero() {
            return Err(parse_err(s, "zero denominator"));
        }
        Ok(Rational(BigRational::new(n, d)))
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

/// A point of the projective line over the rationals.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ProjPoint {
    Finite(Rational),
    Infinity,
}

impl ProjPoint {
    pub fn finite(&self) -> Option<&Rational> {
        match self {
            ProjPoint::Finite(q) => Some(q),
            ProjPoint::Infinity => None,
        }
    }
}

impl From<Rational> for ProjPoint {
    fn from(q: Rational) -> Self {
        ProjPoint::Finite(q)
    }
}

impl From<i64> for ProjPoint {
    fn from(n: i64) -> Self {
        ProjPoint::Finite(n.into())
    }
}

impl fmt::Display for ProjPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProjPoint::Finite(q) => q.fmt(f),
            ProjPoint::Infinity => f.write_str("inf"),
        }
    }
}

impl fmt::Debug for ProjPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for ProjPoint {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.trim() == "inf" {
            Ok(ProjPoint::Infinity)
        } else {
            s.parse().map(ProjPoint::Finite)
        }
    }
}

/// A p-adic valuation; `Infinite` sorts above every finite value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Valuation {
    Finite(i64),
    Infinite,
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::Infinite => f.write_str("inf"),
        }
    }
}

/// A prime, checked on construction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u64", into = "u64")]
pub struct Prime(u64);

impl Prime {
    pub fn new(p: u64) -> Result<Self> {
        if is_prime(p) {
            Ok(Prime(p))
        } else {
            Err(Error::NotPrime(p))
        }
    }

    pub fn get(self) -> u64 {
        self.0
    }
}

impl TryFrom<u64> for Prime {
    type Error = Error;
    fn try_from(p: u64) -> Result<Self> {
        Prime::new(p)
    }
}

impl From<Prime> for u64 {
    fn from(p: Prime) -> u64 {
        p.0
    }
}

impl fmt::Display for Prime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn multiplicity(n: &BigInt, p: u64) -> i64 {
    if let Some(mut m) = n.abs().to_u128() {
        let p = p as u128;
        let mut k = 0;
        while m % p == 0 {
            m /= p;
            k += 1;
        }
        return k;
    }
    let pb = BigInt::from(p);
    let mut n = n.abs();
    let mut k = 0;
    loop {
        let (q, r) = n.div_rem(&pb);
        if !r.is_zero() {
            return k;
        }
        n = q;
        k += 1;
    }
}

pub fn v_p(p: Prime, q: &Rational) -> Valuation {
    if q.is_zero() {
        return Valuation::Infinite;
    }
    Valuation::Finite(multiplicity(q.numer(), p.0) - multiplicity(q.denom(), p.0))
}

/// `v_p(x - y)`, computed from the unreduced fraction.
pub fn v_p_of_difference(p: Prime, x: &Rational, y: &Rational) -> Valuation {
    let num = x.numer() * y.denom() - y.numer() * x.denom();
    if num.is_zero() {
        return Valuation::Infinite;
    }
    let den = x.denom() * y.denom();
    Valuation::Finite(multiplicity(&num, p.0) - multiplicity(&den, p.0))
}

/// [`v_p`] with the prime checked.
pub fn v_p_checked(p: u64, q: &Rational) -> Result<Valuation> {
    Ok(v_p(Prime::new(p)?, q))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> Rational {
        s.parse().unwrap()
    }

    #[test]
    fn valuations() {
        let two = Prime::new(2).unwrap();
        assert_eq!(v_p(two, &q("4")), Valuation::Finite(2));
        assert_eq!(v_p(two, &q("3/8")), Valuation::Finite(-3));
        assert_eq!(v_p(two, &q("0")), Valuation::Infinite);
        assert_eq!(v_p_checked(4, &q("1")), Err(Error::NotPrime(4)));
        assert!(Valuation::Finite(1_000) < Valuation::Infinite);
        let big = &Rational::power(3, 90) + &q("1/9");
        assert_eq!(v_p_of_difference(Prime::new(3).unwrap(), &big, &q("1/9")), Valuation::Finite(90));
        assert_eq!(v_p(Prime::new(3).unwrap(), &(&big - &q("1/9"))), Valuation::Finite(90));
    }

    #[test]
    fn valuation_is_additive() {
        for p in [2, 3, 5, 7] {
            let p = Prime::new(p).unwrap();
            for a in [-12i64, -9, 1, 6, 50, 125] {
                for b in [1i64, 7, 10, 27] {
                    for c in [-4i64, 3, 45] {
                        let x = Rational::new(a, b).unwrap();
                        let y = Rational::new(c, 2).unwrap();
                        let (Valuation::Finite(vx), Valuation::Finite(vy)) = (v_p(p, &x), v_p(p, &y)) else {
                            unreachable!()
                        };
                        assert_eq!(v_p(p, &(&x * &y)), Valuation::Finite(vx + vy));
                    }
                }
            }
        }
    }

    #[test]
    fn parse_and_display() {
        assert_eq!(q("6/-4").to_string(), "-3/2");
        assert_eq!(q(" 10 / 5 ").to_string(), "2");
        assert!("1/0".parse::<Rational>().is_err());
        assert!("x".parse::<Rational>().is_err());
        assert_eq!("inf".parse::<ProjPoint>().unwrap(), ProjPoint::Infinity);
        assert_eq!(serde_json::to_string(&q("1/3")).unwrap(), "\"1/3\"");
    }

    #[test]
    fn primes() {
        let ps: Vec<u64> = (0..30).filter(|&n| is_prime(n)).collect();
        assert_eq!(ps, [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
        assert_eq!(Rational::power(2, -3), q("1/8"));
    }
}
