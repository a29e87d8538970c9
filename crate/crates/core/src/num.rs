//! Real parameters that remember an exact rational value when they have one.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A real number: its `f64` value plus, when known, the exact rational it came from.
#[derive(Clone, Debug)]
pub struct Num {
    v: f64,
    exact: Option<BigRational>,
}

impl Num {
    pub fn from_rational(r: BigRational) -> Num {
        let v = r.to_f64().unwrap_or(f64::NAN);
        Num { v, exact: Some(r) }
    }

    pub fn int(i: i64) -> Num {
        Num::from_rational(BigRational::from_integer(BigInt::from(i)))
    }

    pub fn ratio(p: i64, q: i64) -> Num {
        Num::from_rational(BigRational::new(BigInt::from(p), BigInt::from(q)))
    }

    pub fn zero() -> Num {
        Num::int(0)
    }

    pub fn one() -> Num {
        Num::int(1)
    }

    /// An `f64` without exact provenance.
    pub fn inexact(v: f64) -> Num {
        Num { v, exact: None }
    }

    /// Exact value of a float via its shortest round-trip decimal.
    pub fn from_f64_decimal(v: f64) -> Num {
        if !v.is_finite() {
            return Num::inexact(v);
        }
        let s = format!("{v:e}");
        match parse_decimal(&s) {
            Some(r) => Num { v, exact: Some(r) },
            None => Num::inexact(v),
        }
    }

    #[inline]
    pub fn f(&self) -> f64 {
        self.v
    }

    pub fn exact(&self) -> Option<&BigRational> {
        self.exact.as_ref()
    }

    pub fn is_exact(&self) -> bool {
        self.exact.is_some()
    }

    pub fn is_finite(&self) -> bool {
        self.v.is_finite()
    }

    pub fn is_positive(&self) -> bool {
        match &self.exact {
            Some(r) => r.is_positive(),
            None => self.v > 0.0,
        }
    }

    pub fn is_negative(&self) -> bool {
        match &self.exact {
            Some(r) => r.is_negative(),
            None => self.v < 0.0,
        }
    }

    pub fn is_zero(&self) -> bool {
        match &self.exact {
            Some(r) => r.is_zero(),
            None => self.v == 0.0,
        }
    }

    pub fn min(self, other: Num) -> Num {
        if other < self {
            other
        } else {
            self
        }
    }

    pub fn max(self, other: Num) -> Num {
        if other > self {
            other
        } else {
            self
        }
    }

    pub fn abs(&self) -> Num {
        if self.is_negative() {
            -self
        } else {
            self.clone()
        }
    }

    fn binop(
        &self,
        o: &Num,
        fr: impl Fn(&BigRational, &BigRational) -> Option<BigRational>,
        ff: impl Fn(f64, f64) -> f64,
    ) -> Num {
        if let (Some(a), Some(b)) = (&self.exact, &o.exact) {
            if let Some(r) = fr(a, b) {
                return Num::from_rational(r);
            }
        }
        Num::inexact(ff(self.v, o.v))
    }
}

impl From<f64> for Num {
    fn from(v: f64) -> Num {
        Num::inexact(v)
    }
}

impl From<i64> for Num {
    fn from(i: i64) -> Num {
        Num::int(i)
    }
}

impl From<BigRational> for Num {
    fn from(r: BigRational) -> Num {
        Num::from_rational(r)
    }
}

/// Parses `[-]digits[.digits][e[-]digits]` into an exact rational.
fn parse_decimal(s: &str) -> Option<BigRational> {
    let s = s.trim();
    let (neg, body) = match s.strip_prefix('-') {
        Some(r) => (true, r),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (mant, exp) = match body.find(['e', 'E']) {
        Some(i) => (&body[..i], body[i + 1..].parse::<i32>().ok()?),
        None => (body, 0),
    };
    let (ip, fp) = match mant.find('.') {
        Some(i) => (&mant[..i], &mant[i + 1..]),
        None => (mant, ""),
    };
    if ip.is_empty() && fp.is_empty() {
        return None;
    }
    if !ip.bytes().chain(fp.bytes()).all(|b| b.is_ascii_digit()) {
        return None;
    }
    // Exponents this large have no business in a parameter file.
    if exp.abs() > 1000 {
        return None;
    }
    let digits = format!("{ip}{fp}");
    let mut num: BigInt = if digits.is_empty() {
        BigInt::zero()
    } else {
        digits.parse().ok()?
    };
    if neg {
        num = -num;
    }
    let e = exp as i64 - fp.len() as i64;
    let ten = BigInt::from(10);
    let r = if e >= 0 {
        BigRational::from_integer(num * num_traits::pow(ten, e as usize))
    } else {
        BigRational::new(num, num_traits::pow(ten, (-e) as usize))
    };
    Some(r)
}

impl FromStr for Num {
    type Err = Error;

    fn from_str(s: &str) -> Result<Num> {
        let t = s.trim();
        if let Some((p, q)) = t.split_once('/') {
            let p: BigInt = p.trim().parse().map_err(|_| bad(s))?;
            let q: BigInt = q.trim().parse().map_err(|_| bad(s))?;
            if q.is_zero() {
                return Err(bad(s));
            }
            return Ok(Num::from_rational(BigRational::new(p, q)));
        }
        if let Some(r) = parse_decimal(t) {
            let v = t.parse::<f64>().map_err(|_| bad(s))?;
            return Ok(Num { v, exact: Some(r) });
        }
        match t.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(Num::inexact(v)),
            _ => Err(bad(s)),
        }
    }
}

fn bad(s: &str) -> Error {
    Error::Parse(format!("not a real number: {s:?}"))
}

fn terminating_decimal(r: &BigRational) -> Option<String> {
    let mut d = r.denom().clone();
    let two = BigInt::from(2);
    let five = BigInt::from(5);
    let (mut a, mut b) = (0usize, 0usize);
    while d.is_even() {
        d /= &two;
        a += 1;
    }
    while (&d % &five).is_zero() {
        d /= &five;
        b += 1;
    }
    if !d.is_one() {
        return None;
    }
    let k = a.max(b);
    if k > 60 {
        return None;
    }
    let scaled = r.numer() * num_traits::pow(BigInt::from(10), k) / r.denom();
    let neg = scaled.is_negative();
    let digits = scaled.abs().to_string();
    let body = if k == 0 {
        digits
    } else if digits.len() > k {
        let (i, f) = digits.split_at(digits.len() - k);
        format!("{i}.{f}")
    } else {
        format!("0.{}{}", "0".repeat(k - digits.len()), digits)
    };
    Some(if neg { format!("-{body}") } else { body })
}

impl fmt::Display for Num {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.exact {
            Some(r) => match terminating_decimal(r) {
                Some(s) => f.write_str(&s),
                None => write!(f, "{}/{}", r.numer(), r.denom()),
            },
            None => write!(f, "{:?}", self.v),
        }
    }
}

impl PartialEq for Num {
    fn eq(&self, o: &Num) -> bool {
        self.partial_cmp(o) == Some(Ordering::Equal)
    }
}

impl PartialOrd for Num {
    fn partial_cmp(&self, o: &Num) -> Option<Ordering> {
        match (&self.exact, &o.exact) {
            (Some(a), Some(b)) => Some(a.cmp(b)),
            _ => self.v.partial_cmp(&o.v),
        }
    }
}

impl Neg for &Num {
    type Output = Num;
    fn neg(self) -> Num {
        Num {
            v: -self.v,
            exact: self.exact.as_ref().map(|r| -r),
        }
    }
}

impl Neg for Num {
    type Output = Num;
    fn neg(self) -> Num {
        -&self
    }
}

macro_rules! arith {
    ($tr:ident, $m:ident, $fr:expr, $ff:expr) => {
        impl $tr<&Num> for &Num {
            type Output = Num;
            fn $m(self, o: &Num) -> Num {
                self.binop(o, $fr, $ff)
            }
        }
        impl $tr<Num> for Num {
            type Output = Num;
            fn $m(self, o: Num) -> Num {
                (&self).$m(&o)
            }
        }
        impl $tr<&Num> for Num {
            type Output = Num;
            fn $m(self, o: &Num) -> Num {
                (&self).$m(o)
            }
        }
        impl $tr<Num> for &Num {
            type Output = Num;
            fn $m(self, o: Num) -> Num {
                self.$m(&o)
            }
        }
    };
}

arith!(Add, add, |a, b| Some(a + b), |a, b| a + b);
arith!(Sub, sub, |a, b| Some(a - b), |a, b| a - b);
arith!(Mul, mul, |a, b| Some(a * b), |a, b| a * b);
arith!(
    Div,
    div,
    |a: &BigRational, b: &BigRational| if b.is_zero() { None } else { Some(a / b) },
    |a, b| a / b
);

impl Serialize for Num {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

struct NumVisitor;

impl<'de> Visitor<'de> for NumVisitor {
    type Value = Num;

    fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str("a decimal string, a p/q string or a number")
    }

    fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Num, E> {
        v.parse().map_err(|e: Error| E::custom(e.to_string()))
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Num, E> {
        Ok(Num::int(v))
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Num, E> {
        Ok(Num::from_rational(BigRational::from_integer(BigInt::from(v))))
    }

    fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<Num, E> {
        if !v.is_finite() {
            return Err(E::custom("non-finite number"));
        }
        Ok(Num::from_f64_decimal(v))
    }
}

impl<'de> Deserialize<'de> for Num {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Num, D::Error> {
        d.deserialize_any(NumVisitor)
    }
}

/// Extended real: a finite [`Num`] or one of the two infinities.
#[derive(Clone, Debug, PartialEq)]
pub enum Ext {
    NegInf,
    Fin(Num),
    PosInf,
}

impl Ext {
    pub fn f(&self) -> f64 {
        match self {
            Ext::NegInf => f64::NEG_INFINITY,
            Ext::Fin(x) => x.f(),
            Ext::PosInf => f64::INFINITY,
        }
    }

    pub fn finite(&self) -> Option<&Num> {
        match self {
            Ext::Fin(x) => Some(x),
            _ => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Ext::Fin(_))
    }

    fn rank(&self) -> i8 {
        match self {
            Ext::NegInf => -1,
            Ext::Fin(_) => 0,
            Ext::PosInf => 1,
        }
    }

    /// Scales by a positive factor.
    pub fn scale(&self, k: &Num) -> Ext {
        match self {
            Ext::Fin(x) => Ext::Fin(x * k),
            e => e.clone(),
        }
    }

    pub fn shift(&self, k: &Num) -> Ext {
        match self {
            Ext::Fin(x) => Ext::Fin(x + k),
            e => e.clone(),
        }
    }

    pub fn neg(&self) -> Ext {
        match self {
            Ext::NegInf => Ext::PosInf,
            Ext::Fin(x) => Ext::Fin(-x),
            Ext::PosInf => Ext::NegInf,
        }
    }

    /// Sum where at most one side is infinite, or both infinite with the same sign.
    pub fn add(&self, o: &Ext) -> Ext {
        match (self, o) {
            (Ext::Fin(a), Ext::Fin(b)) => Ext::Fin(a + b),
            (Ext::Fin(_), e) | (e, Ext::Fin(_)) => e.clone(),
            (a, _) => a.clone(),
        }
    }

    pub fn min(self, o: Ext) -> Ext {
        if o < self {
            o
        } else {
            self
        }
    }
}

impl PartialOrd for Ext {
    fn partial_cmp(&self, o: &Ext) -> Option<Ordering> {
        match (self, o) {
            (Ext::Fin(a), Ext::Fin(b)) => a.partial_cmp(b),
            _ => self.rank().partial_cmp(&o.rank()),
        }
    }
}

impl fmt::Display for Ext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ext::NegInf => f.write_str("-inf"),
            Ext::Fin(x) => x.fmt(f),
            Ext::PosInf => f.write_str("inf"),
        }
    }
}

impl Serialize for Ext {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Ext {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Ext, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        match &v {
            serde_json::Value::String(s) if s == "inf" || s == "+inf" => Ok(Ext::PosInf),
            serde_json::Value::String(s) if s == "-inf" => Ok(Ext::NegInf),
            _ => Num::deserialize(v)
                .map(Ext::Fin)
                .map_err(de::Error::custom),
        }
    }
}

/// Open interval `(lo, hi)` of admissible `Re(s)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MellinStrip {
    pub lo: Ext,
    pub hi: Ext,
}

impl MellinStrip {
    pub fn new(lo: Ext, hi: Ext) -> MellinStrip {
        MellinStrip { lo, hi }
    }

    pub fn is_empty(&self) -> bool {
        self.lo >= self.hi
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo.f() < x && x < self.hi.f()
    }

    /// Interval of `x / w` for `x` in the strip, `w > 0`.
    pub fn divide(&self, w: &Num) -> MellinStrip {
        let inv = Num::one() / w;
        MellinStrip::new(self.lo.scale(&inv), self.hi.scale(&inv))
    }

    pub fn intersect(&self, o: &MellinStrip) -> MellinStrip {
        let lo = if o.lo > self.lo { o.lo.clone() } else { self.lo.clone() };
        let hi = self.hi.clone().min(o.hi.clone());
        MellinStrip::new(lo, hi)
    }

    /// A few interior points: quartiles of a finite strip, or steps off the finite end.
    pub fn sample_points(&self) -> Vec<f64> {
        let (lo, hi) = (self.lo.f(), self.hi.f());
        match (lo.is_finite(), hi.is_finite()) {
            (true, true) => [0.25, 0.5, 0.75].iter().map(|u| lo + u * (hi - lo)).collect(),
            (true, false) => vec![lo + 0.5, lo + 1.0, lo + 1.5],
            (false, true) => vec![hi - 0.5, hi - 1.0, hi - 1.5],
            (false, false) => vec![-0.5, 0.0, 0.5],
        }
    }
}

impl fmt::Display for MellinStrip {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.lo, self.hi)
    }
}
