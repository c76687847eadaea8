//! Exact rationals viewed inside `Q_p`.
//!
//! Values that fit in `i64` are kept inline and combined through `i128`
//! intermediates; anything larger falls back to `BigInt`. The representation
//! is always normalized (reduced, positive denominator, small whenever the
//! value fits), so derived equality and hashing are value equality.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

use super::prime::Prime;
use crate::error::Error;

/// p-adic valuation; `Infinite` is the valuation of zero and sorts above
/// every finite value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Valuation {
    Finite(i64),
    Infinite,
}

impl Valuation {
    pub fn finite(self) -> Option<i64> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinite => None,
        }
    }

    pub fn is_integral(self) -> bool {
        self >= Valuation::Finite(0)
    }
}

#[derive(Clone, PartialEq, Eq)]
enum Repr {
    Small(i64, i64),
    Big(BigInt, BigInt),
}

#[derive(Clone, PartialEq, Eq)]
pub struct Rational(Repr);

fn gcd_u128(mut a: u128, mut b: u128) -> u128 {
    if a == 0 {
        return b;
    }
    if b == 0 {
        return a;
    }
    let shift = (a | b).trailing_zeros();
    a >>= a.trailing_zeros();
    loop {
        b >>= b.trailing_zeros();
        if a > b {
            std::mem::swap(&mut a, &mut b);
        }
        b -= a;
        if b == 0 {
            return a << shift;
        }
    }
}

#[inline]
fn fits(v: i128) -> bool {
    v > i64::MIN as i128 && v <= i64::MAX as i128
}

impl Rational {
    #[inline]
    pub fn zero() -> Self {
        Rational(Repr::Small(0, 1))
    }

    #[inline]
    pub fn one() -> Self {
        Rational(Repr::Small(1, 1))
    }

    #[inline]
    pub fn from_int(n: i64) -> Self {
        if n == i64::MIN {
            return Self::from_bigs(BigInt::from(n), BigInt::one());
        }
        Rational(Repr::Small(n, 1))
    }

    /// `num/den`; panics on a zero denominator.
    pub fn new(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Self::from_i128(num as i128, den as i128)
    }

    fn from_i128(mut n: i128, mut d: i128) -> Self {
        debug_assert!(d != 0);
        if d < 0 {
            // |values| here are < 2^127 so negation is safe.
            n = -n;
            d = -d;
        }
        if n == 0 {
            return Self::zero();
        }
        let g = gcd_u128(n.unsigned_abs(), d as u128) as i128;
        if g > 1 {
            n /= g;
            d /= g;
        }
        if fits(n) && fits(d) {
            Rational(Repr::Small(n as i64, d as i64))
        } else {
            Rational(Repr::Big(BigInt::from(n), BigInt::from(d)))
        }
    }

    pub fn from_bigs(num: BigInt, den: BigInt) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        if num.is_zero() {
            return Self::zero();
        }
        let (mut n, mut d) = (num, den);
        if d.is_negative() {
            n = -n;
            d = -d;
        }
        let g = n.gcd(&d);
        if !g.is_one() {
            n /= &g;
            d /= &g;
        }
        match (n.to_i64(), d.to_i64()) {
            (Some(a), Some(b)) if a != i64::MIN => Rational(Repr::Small(a, b)),
            _ => Rational(Repr::Big(n, d)),
        }
    }

    fn to_bigs(&self) -> (BigInt, BigInt) {
        match &self.0 {
            Repr::Small(n, d) => (BigInt::from(*n), BigInt::from(*d)),
            Repr::Big(n, d) => (n.clone(), d.clone()),
        }
    }

    pub fn numer(&self) -> BigInt {
        self.to_bigs().0
    }

    pub fn denom(&self) -> BigInt {
        self.to_bigs().1
    }

    #[inline]
    pub fn is_zero(&self) -> bool {
        matches!(self.0, Repr::Small(0, _))
    }

    #[inline]
    pub fn is_one(&self) -> bool {
        matches!(self.0, Repr::Small(1, 1))
    }

    pub fn is_integer(&self) -> bool {
        matches!(self.0, Repr::Small(_, 1))
    }

    pub fn signum(&self) -> i32 {
        match &self.0 {
            Repr::Small(n, _) => n.signum() as i32,
            Repr::Big(n, _) => match n.sign() {
                Sign::Minus => -1,
                Sign::NoSign => 0,
                Sign::Plus => 1,
            },
        }
    }

    pub fn abs(&self) -> Self {
        if self.signum() < 0 {
            -self
        } else {
            self.clone()
        }
    }

    pub fn recip(&self) -> Option<Self> {
        match &self.0 {
            Repr::Small(0, _) => None,
            Repr::Small(n, d) => Some(Self::from_i128(*d as i128, *n as i128)),
            Repr::Big(n, d) => Some(Self::from_bigs(d.clone(), n.clone())),
        }
    }

    pub fn to_f64(&self) -> f64 {
        match &self.0 {
            Repr::Small(n, d) => *n as f64 / *d as f64,
            Repr::Big(n, d) => {
                // Scale down before converting so huge operands do not overflow.
                let bits = n.bits().max(d.bits()) as i64;
                let shift = (bits - 60).max(0) as usize;
                let nf = (n >> shift).to_f64().unwrap_or(0.0);
                let df = (d >> shift).to_f64().unwrap_or(1.0);
                if df == 0.0 {
                    f64::INFINITY * nf.signum()
                } else {
                    nf / df
                }
            }
        }
    }

    /// `p^e` for any integer exponent.
    pub fn p_pow(p: Prime, e: i64) -> Self {
        let pp = p.get();
        let mag = e.unsigned_abs();
        let mut acc: i128 = 1;
        let mut small = true;
        for _ in 0..mag {
            match acc.checked_mul(pp as i128) {
                Some(v) if fits(v) => acc = v,
                _ => {
                    small = false;
                    break;
                }
            }
        }
        if small {
            return if e >= 0 {
                Self::from_i128(acc, 1)
            } else {
                Self::from_i128(1, acc)
            };
        }
        let big = num_traits::pow::pow(BigInt::from(pp), mag as usize);
        if e >= 0 {
            Self::from_bigs(big, BigInt::one())
        } else {
            Self::from_bigs(BigInt::one(), big)
        }
    }

    /// `v_p(self)`.
    pub fn valuation(&self, p: Prime) -> Valuation {
        match &self.0 {
            Repr::Small(0, _) => Valuation::Infinite,
            Repr::Small(n, d) => {
                let pp = p.get();
                let count = |mut x: u64| {
                    let mut c = 0i64;
                    while x.is_multiple_of(pp) {
                        x /= pp;
                        c += 1;
                    }
                    c
                };
                Valuation::Finite(count(n.unsigned_abs()) - count(*d as u64))
            }
            Repr::Big(n, d) => {
                let pb = BigInt::from(p.get());
                let count = |x: &BigInt| {
                    let mut x = x.abs();
                    let mut c = 0i64;
                    loop {
                        let (q, r) = x.div_rem(&pb);
                        if !r.is_zero() {
                            return c;
                        }
                        x = q;
                        c += 1;
                    }
                };
                Valuation::Finite(count(n) - count(d))
            }
        }
    }

    /// True iff the value lies in `Z_(p)`.
    pub fn is_p_integral(&self, p: Prime) -> bool {
        match &self.0 {
            Repr::Small(_, d) => !(*d as u64).is_multiple_of(p.get()),
            Repr::Big(_, d) => !(d % BigInt::from(p.get())).is_zero(),
        }
    }

    /// Canonical representative of the class of `self` modulo `p^a Z_(p)`:
    /// zero when `v_p(self) >= a`, otherwise the unique rational in `[0, p^a)`
    /// whose denominator is `p^s`, `s = max(0, -v_p(self))`.
    pub fn residue(&self, a: i64, p: Prime) -> Self {
        let v = match self.valuation(p) {
            Valuation::Infinite => return Self::zero(),
            Valuation::Finite(v) if v >= a => return Self::zero(),
            Valuation::Finite(v) => v,
        };
        let s = (-v).max(0);
        let scaled = self * &Self::p_pow(p, s);
        let (num, den) = scaled.to_bigs();
        let modulus = num_traits::pow::pow(BigInt::from(p.get()), (a + s) as usize);
        let inv = mod_inverse(&den.mod_floor(&modulus), &modulus)
            .expect("denominator is a unit modulo a p-power");
        let m = (num.mod_floor(&modulus) * inv).mod_floor(&modulus);
        Self::from_bigs(m, num_traits::pow::pow(BigInt::from(p.get()), s as usize))
    }

    /// Fractional part `{x}_p`: the unique `m/p^r` in `[0,1)` with
    /// `x - {x}_p` in `Z_(p)`.
    pub fn frac_part(&self, p: Prime) -> Self {
        self.residue(0, p)
    }

    /// The standard additive character `exp(2 pi i {x}_p)`.
    pub fn char_value(&self, p: Prime) -> Complex64 {
        let f = self.frac_part(p);
        if f.is_zero() {
            return Complex64::new(1.0, 0.0);
        }
        let (n, d) = f.to_bigs();
        // f = n/d in [0,1): reduce exactly before converting to float.
        let angle = std::f64::consts::TAU * ratio_f64(&n, &d);
        Complex64::from_polar(1.0, angle)
    }
}

fn ratio_f64(n: &BigInt, d: &BigInt) -> f64 {
    match (n.to_f64(), d.to_f64()) {
        (Some(a), Some(b)) if b.is_finite() && b != 0.0 && d.bits() < 1000 => a / b,
        _ => Rational::from_bigs(n.clone(), d.clone()).to_f64(),
    }
}

fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let e = a.extended_gcd(m);
    if e.gcd.is_one() {
        Some(e.x.mod_floor(m))
    } else if m.is_one() {
        Some(BigInt::zero())
    } else {
        None
    }
}

impl Hash for Rational {
    fn hash<H: Hasher>(&self, state: &mut H) {
        match &self.0 {
            Repr::Small(n, d) => {
                0u8.hash(state);
                n.hash(state);
                d.hash(state);
            }
            Repr::Big(n, d) => {
                1u8.hash(state);
                n.hash(state);
                d.hash(state);
            }
        }
    }
}

impl Default for Rational {
    fn default() -> Self {
        Self::zero()
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Self::from_int(n)
    }
}

impl From<i32> for Rational {
    fn from(n: i32) -> Self {
        Self::from_int(n as i64)
    }
}

impl<'a> Add<&'a Rational> for &'a Rational {
    type Output = Rational;
    fn add(self, rhs: &Rational) -> Rational {
        match (&self.0, &rhs.0) {
            (Repr::Small(0, _), _) => rhs.clone(),
            (_, Repr::Small(0, _)) => self.clone(),
            (Repr::Small(a, 1), Repr::Small(c, 1)) => {
                Rational::from_i128(*a as i128 + *c as i128, 1)
            }
            (Repr::Small(a, b), Repr::Small(c, d)) => {
                if b == d {
                    Rational::from_i128(*a as i128 + *c as i128, *b as i128)
                } else {
                    let n = *a as i128 * *d as i128 + *c as i128 * *b as i128;
                    Rational::from_i128(n, *b as i128 * *d as i128)
                }
            }
            _ => {
                let (a, b) = self.to_bigs();
                let (c, d) = rhs.to_bigs();
                Rational::from_bigs(a * &d + c * &b, b * d)
            }
        }
    }
}

impl<'a> Sub<&'a Rational> for &'a Rational {
    type Output = Rational;
    fn sub(self, rhs: &Rational) -> Rational {
        self + &(-rhs)
    }
}

impl<'a> Mul<&'a Rational> for &'a Rational {
    type Output = Rational;
    fn mul(self, rhs: &Rational) -> Rational {
        match (&self.0, &rhs.0) {
            (Repr::Small(0, _), _) | (_, Repr::Small(0, _)) => Rational::zero(),
            (Repr::Small(1, 1), _) => rhs.clone(),
            (_, Repr::Small(1, 1)) => self.clone(),
            (Repr::Small(a, 1), Repr::Small(c, 1)) => {
                Rational::from_i128(*a as i128 * *c as i128, 1)
            }
            (Repr::Small(a, b), Repr::Small(c, d)) => {
                Rational::from_i128(*a as i128 * *c as i128, *b as i128 * *d as i128)
            }
            _ => {
                let (a, b) = self.to_bigs();
                let (c, d) = rhs.to_bigs();
                Rational::from_bigs(a * c, b * d)
            }
        }
    }
}

impl<'a> Div<&'a Rational> for &'a Rational {
    type Output = Rational;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: &Rational) -> Rational {
        let inv = rhs.recip().expect("division by zero");
        self * &inv
    }
}

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        match &self.0 {
            Repr::Small(n, d) => Rational(Repr::Small(-n, *d)),
            Repr::Big(n, d) => Rational::from_bigs(-n, d.clone()),
        }
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        -&self
    }
}

macro_rules! owned_binop {
    ($tr:ident, $m:ident) => {
        impl $tr<Rational> for Rational {
            type Output = Rational;
            fn $m(self, rhs: Rational) -> Rational {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a Rational> for Rational {
            type Output = Rational;
            fn $m(self, rhs: &Rational) -> Rational {
                (&self).$m(rhs)
            }
        }
    };
}
owned_binop!(Add, add);
owned_binop!(Sub, sub);
owned_binop!(Mul, mul);
owned_binop!(Div, div);

impl AddAssign<&Rational> for Rational {
    fn add_assign(&mut self, rhs: &Rational) {
        *self = &*self + rhs;
    }
}

impl SubAssign<&Rational> for Rational {
    fn sub_assign(&mut self, rhs: &Rational) {
        *self = &*self - rhs;
    }
}

impl MulAssign<&Rational> for Rational {
    fn mul_assign(&mut self, rhs: &Rational) {
        *self = &*self * rhs;
    }
}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Rational {
    fn cmp(&self, other: &Self) -> Ordering {
        match (&self.0, &other.0) {
            (Repr::Small(a, b), Repr::Small(c, d)) => {
                (*a as i128 * *d as i128).cmp(&(*c as i128 * *b as i128))
            }
            _ => {
                let (a, b) = self.to_bigs();
                let (c, d) = other.to_bigs();
                (a * d).cmp(&(c * b))
            }
        }
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            Repr::Small(n, 1) => write!(f, "{n}"),
            Repr::Small(n, d) => write!(f, "{n}/{d}"),
            Repr::Big(n, d) if d.is_one() => write!(f, "{n}"),
            Repr::Big(n, d) => write!(f, "{n}/{d}"),
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

    fn from_str(s: &str) -> Result<Self, Error> {
        let s = s.trim();
        let parse = |t: &str| {
            t.trim()
                .parse::<BigInt>()
                .map_err(|_| Error::Parse(format!("bad rational literal {s:?}")))
        };
        match s.split_once('/') {
            Some((n, d)) => {
                let d = parse(d)?;
                if d.is_zero() {
                    return Err(Error::Parse(format!("zero denominator in {s:?}")));
                }
                Ok(Rational::from_bigs(parse(n)?, d))
            }
            None => Ok(Rational::from_bigs(parse(s)?, BigInt::one())),
        }
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct Visitor;
        impl de::Visitor<'_> for Visitor {
            type Value = Rational;
            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a rational literal such as \"-3/7\" or an integer")
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<Rational, E> {
                v.parse().map_err(E::custom)
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Rational, E> {
                Ok(Rational::from_int(v))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Rational, E> {
                Ok(Rational::from_bigs(BigInt::from(v), BigInt::one()))
            }
        }
        deserializer.deserialize_any(Visitor)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    fn pr(p: u64) -> Prime {
        Prime::new(p).unwrap()
    }

    #[test]
    fn valuation_examples() {
        assert_eq!(q(18, 1).valuation(pr(3)), Valuation::Finite(2));
        assert_eq!(q(7, 25).valuation(pr(5)), Valuation::Finite(-2));
        assert_eq!(Rational::zero().valuation(pr(7)), Valuation::Infinite);
        assert!(Valuation::Infinite > Valuation::Finite(i64::MAX));
    }

    #[test]
    fn frac_part_examples() {
        assert_eq!(q(7, 25).frac_part(pr(5)), q(7, 25));
        assert_eq!(q(5, 3).frac_part(pr(3)), q(2, 3));
        assert_eq!(q(4, 1).frac_part(pr(7)), Rational::zero());
        // 1/2 + 1/3 = 5/6; 5/6 - 1/3 = 1/2 has 3-adic valuation 0.
        let x = &q(1, 2) + &q(1, 3);
        assert!((&x - &q(1, 3)).valuation(pr(3)) >= Valuation::Finite(0));
        assert_eq!(x.frac_part(pr(3)), q(1, 3));
        assert_eq!(q(-1, 9).frac_part(pr(3)), q(8, 9));
    }

    #[test]
    fn char_value_examples() {
        let z = q(1, 3).char_value(pr(3));
        assert!((z.re + 0.5).abs() < 1e-12 && (z.im - 0.8660254037844386).abs() < 1e-12);
        let one = q(2, 1).char_value(pr(5));
        assert!((one.re - 1.0).abs() < 1e-15 && one.im.abs() < 1e-15);
        let w = (&q(1, 2) + &q(1, 3)).char_value(pr(3));
        assert!((w - z).norm() < 1e-12);
    }

    #[test]
    fn residue_is_canonical() {
        let p = pr(3);
        // 10 = 1 + 9: residue mod 9 is 1
        assert_eq!(q(10, 1).residue(2, p), q(1, 1));
        // classes mod p^{-1}: 5/9 = 2/9 + 1/3
        assert_eq!(q(5, 9).residue(-1, p), q(2, 9));
        assert_eq!(q(1, 3).residue(-1, p), Rational::zero());
        // unit with denominator prime to p
        let r = q(1, 2).residue(1, p);
        assert_eq!(r, q(2, 1));
    }

    #[test]
    fn big_fallback_round_trips() {
        let big = Rational::from_int(i64::MAX);
        let sq = &big * &big;
        let back = &sq / &big;
        assert_eq!(back, big);
        assert_eq!(&sq - &sq, Rational::zero());
        let parsed: Rational = sq.to_string().parse().unwrap();
        assert_eq!(parsed, sq);
        assert_eq!(sq.valuation(pr(7)), Valuation::Finite(2 * 2));
    }

    #[test]
    fn parse_and_display() {
        assert_eq!("-3/7".parse::<Rational>().unwrap(), q(-3, 7));
        assert_eq!("6/-4".parse::<Rational>().unwrap(), q(-3, 2));
        assert_eq!(q(4, 2).to_string(), "2");
        assert!("1/0".parse::<Rational>().is_err());
        assert!("x".parse::<Rational>().is_err());
    }
}
