//! Scalar fields used by polynomials, moments and solvers.
//!
//! Each scalar type is a separate Rust type, so mixing exact and floating
//! arithmetic is a compile error. Conversions go through [`Scalar::from_rational`]
//! and [`RealScalar::to_f64`] / [`RealScalar::to_extended`].

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use crate::error::{Error, Result};

/// Exact rational scalar (always in lowest terms with positive denominator).
pub type Rational = num_rational::BigRational;

/// Working precision of [`Extended`], in bits (about 115 decimal digits).
pub const EXTENDED_PREC: u32 = 384;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScalarMode {
    Exact,
    Double,
    Complex,
    Extended,
    Surd,
}

impl ScalarMode {
    pub fn is_exact(self) -> bool {
        matches!(self, ScalarMode::Exact | ScalarMode::Surd)
    }
}

/// A field of scalars.
pub trait Scalar:
    Clone
    + fmt::Debug
    + PartialEq
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    const MODE: ScalarMode;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_rational(q: &Rational) -> Self;
    fn is_zero(&self) -> bool;
    /// Absolute value as an `f64`, used only for tolerance decisions.
    fn magnitude(&self) -> f64;
    /// Value as a double-precision complex number.
    fn to_complex(&self) -> Complex64;
    /// Coefficient string for JSON output.
    fn to_json_string(&self) -> String;

    fn from_i64(v: i64) -> Self {
        Self::from_rational(&Rational::from_integer(BigInt::from(v)))
    }

    fn is_exact() -> bool {
        Self::MODE.is_exact()
    }

    /// Zero test: exact equality in exact modes, `|self| <= rel * scale` otherwise.
    fn is_negligible(&self, scale: f64, rel: f64) -> bool {
        if Self::is_exact() {
            self.is_zero()
        } else {
            self.magnitude() <= rel * scale
        }
    }
}

/// Ordered real scalars.
pub trait RealScalar: Scalar + PartialOrd {
    fn to_f64(&self) -> f64;
    fn to_extended(&self) -> Extended;
    fn from_f64(x: f64) -> Self;

    fn is_positive(&self) -> bool {
        *self > Self::zero()
    }

    fn abs(&self) -> Self {
        if *self < Self::zero() {
            -self.clone()
        } else {
            self.clone()
        }
    }
}

/// Real scalars with elementary functions (floating types only).
pub trait Transcendental: RealScalar {
    /// Approximate relative precision of the type.
    const EPSILON: f64;
    fn pi() -> Self;
    fn exp(&self) -> Self;
    fn ln(&self) -> Self;
    fn sqrt(&self) -> Self;
    fn sin(&self) -> Self;
    fn cos(&self) -> Self;
    fn sinh(&self) -> Self;
    fn cosh(&self) -> Self;
    fn tanh(&self) -> Self;
    fn powi(&self, k: i32) -> Self;
    fn powf(&self, e: &Self) -> Self;
    fn is_finite_value(&self) -> bool;
}

pub fn rational_from_str(s: &str) -> Result<Rational> {
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let p = rational_from_str(p)?;
        let q = rational_from_str(q)?;
        if num_traits::Zero::is_zero(&q) {
            return Err(Error::Parse(format!("zero denominator in {s:?}")));
        }
        return Ok(p / q);
    }
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(pos) => {
            let e: i32 = s[pos + 1..].parse().map_err(|_| Error::Parse(format!("bad exponent in {s:?}")))?;
            (&s[..pos], e)
        }
        None => (s, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty()
        || !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit())
    {
        return Err(Error::Parse(format!("not a rational literal: {s:?}")));
    }
    let all = format!("{int_part}{frac_part}");
    let num = BigInt::from_str(if all.is_empty() { "0" } else { &all })
        .map_err(|_| Error::Parse(format!("not a rational literal: {s:?}")))?;
    let shift = exp - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let mut q = Rational::from_integer(num);
    if shift >= 0 {
        q *= Rational::from_integer(num_traits::pow(ten, shift as usize));
    } else {
        q /= Rational::from_integer(num_traits::pow(ten, (-shift) as usize));
    }
    Ok(if neg { -q } else { q })
}

pub fn rational_to_string(q: &Rational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

fn rational_to_f64(q: &Rational) -> f64 {
    match ToPrimitive::to_f64(q) {
        Some(v) if v.is_finite() => v,
        _ => rational_to_rug(q).to_f64(),
    }
}

fn rational_to_rug(q: &Rational) -> rug::Rational {
    let n = rug::Integer::from_str_radix(&q.numer().to_str_radix(16), 16).expect("hex digits");
    let d = rug::Integer::from_str_radix(&q.denom().to_str_radix(16), 16).expect("hex digits");
    rug::Rational::from((n, d))
}

impl Scalar for Rational {
    const MODE: ScalarMode = ScalarMode::Exact;
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn from_rational(q: &Rational) -> Self {
        q.clone()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn magnitude(&self) -> f64 {
        rational_to_f64(self).abs()
    }
    fn to_complex(&self) -> Complex64 {
        Complex64::new(rational_to_f64(self), 0.0)
    }
    fn to_json_string(&self) -> String {
        rational_to_string(self)
    }
}

impl RealScalar for Rational {
    fn to_f64(&self) -> f64 {
        rational_to_f64(self)
    }
    fn to_extended(&self) -> Extended {
        Extended(rug::Float::with_val(EXTENDED_PREC, rational_to_rug(self)))
    }
    fn from_f64(x: f64) -> Self {
        Rational::from_float(x).expect("finite float")
    }
    fn abs(&self) -> Self {
        Signed::abs(self)
    }
}

impl Scalar for f64 {
    const MODE: ScalarMode = ScalarMode::Double;
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_rational(q: &Rational) -> Self {
        rational_to_f64(q)
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn magnitude(&self) -> f64 {
        f64::abs(*self)
    }
    fn to_complex(&self) -> Complex64 {
        Complex64::new(*self, 0.0)
    }
    fn to_json_string(&self) -> String {
        format!("{self:e}")
    }
}

impl RealScalar for f64 {
    fn to_f64(&self) -> f64 {
        *self
    }
    fn to_extended(&self) -> Extended {
        Extended(rug::Float::with_val(EXTENDED_PREC, *self))
    }
    fn from_f64(x: f64) -> Self {
        x
    }
}

impl Transcendental for f64 {
    const EPSILON: f64 = f64::EPSILON;
    fn pi() -> Self {
        std::f64::consts::PI
    }
    fn exp(&self) -> Self {
        f64::exp(*self)
    }
    fn ln(&self) -> Self {
        f64::ln(*self)
    }
    fn sqrt(&self) -> Self {
        f64::sqrt(*self)
    }
    fn sin(&self) -> Self {
        f64::sin(*self)
    }
    fn cos(&self) -> Self {
        f64::cos(*self)
    }
    fn sinh(&self) -> Self {
        f64::sinh(*self)
    }
    fn cosh(&self) -> Self {
        f64::cosh(*self)
    }
    fn tanh(&self) -> Self {
        f64::tanh(*self)
    }
    fn powi(&self, k: i32) -> Self {
        f64::powi(*self, k)
    }
    fn powf(&self, e: &Self) -> Self {
        f64::powf(*self, *e)
    }
    fn is_finite_value(&self) -> bool {
        self.is_finite()
    }
}

impl Scalar for Complex64 {
    const MODE: ScalarMode = ScalarMode::Complex;
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn from_rational(q: &Rational) -> Self {
        Complex64::new(rational_to_f64(q), 0.0)
    }
    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
    fn to_complex(&self) -> Complex64 {
        *self
    }
    fn to_json_string(&self) -> String {
        if self.im == 0.0 {
            format!("{:e}", self.re)
        } else {
            format!("{:e}{:+e}i", self.re, self.im)
        }
    }
}

/// Extended-precision real, [`EXTENDED_PREC`] bits.
#[derive(Clone, PartialEq, PartialOrd)]
pub struct Extended(pub rug::Float);

impl Extended {
    pub fn new(x: f64) -> Self {
        Extended(rug::Float::with_val(EXTENDED_PREC, x))
    }

    pub fn from_rug(x: rug::Float) -> Self {
        Extended(rug::Float::with_val(EXTENDED_PREC, x))
    }
}

impl fmt::Debug for Extended {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0.to_string_radix(10, Some(40)))
    }
}

macro_rules! ext_binop {
    ($tr:ident, $m:ident) => {
        impl $tr for Extended {
            type Output = Extended;
            fn $m(self, rhs: Extended) -> Extended {
                Extended($tr::$m(self.0, rhs.0))
            }
        }
    };
}
ext_binop!(Add, add);
ext_binop!(Sub, sub);
ext_binop!(Mul, mul);
ext_binop!(Div, div);

impl Neg for Extended {
    type Output = Extended;
    fn neg(self) -> Extended {
        Extended(-self.0)
    }
}

impl Scalar for Extended {
    const MODE: ScalarMode = ScalarMode::Extended;
    fn zero() -> Self {
        Extended::new(0.0)
    }
    fn one() -> Self {
        Extended::new(1.0)
    }
    fn from_rational(q: &Rational) -> Self {
        q.to_extended()
    }
    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
    fn magnitude(&self) -> f64 {
        self.0.to_f64().abs()
    }
    fn to_complex(&self) -> Complex64 {
        Complex64::new(self.0.to_f64(), 0.0)
    }
    fn to_json_string(&self) -> String {
        self.0.to_string_radix(10, Some(40))
    }
}

impl RealScalar for Extended {
    fn to_f64(&self) -> f64 {
        self.0.to_f64()
    }
    fn to_extended(&self) -> Extended {
        self.clone()
    }
    fn from_f64(x: f64) -> Self {
        Extended::new(x)
    }
}

impl Transcendental for Extended {
    const EPSILON: f64 = 2.5e-116;
    fn pi() -> Self {
        Extended(rug::Float::with_val(EXTENDED_PREC, rug::float::Constant::Pi))
    }
    fn exp(&self) -> Self {
        Extended(self.0.clone().exp())
    }
    fn ln(&self) -> Self {
        Extended(self.0.clone().ln())
    }
    fn sqrt(&self) -> Self {
        Extended(self.0.clone().sqrt())
    }
    fn sin(&self) -> Self {
        Extended(self.0.clone().sin())
    }
    fn cos(&self) -> Self {
        Extended(self.0.clone().cos())
    }
    fn sinh(&self) -> Self {
        Extended(self.0.clone().sinh())
    }
    fn cosh(&self) -> Self {
        Extended(self.0.clone().cosh())
    }
    fn tanh(&self) -> Self {
        Extended(self.0.clone().tanh())
    }
    fn powi(&self, k: i32) -> Self {
        Extended(rug::ops::Pow::pow(self.0.clone(), k))
    }
    fn powf(&self, e: &Self) -> Self {
        Extended(rug::ops::Pow::pow(self.0.clone(), &e.0))
    }
    fn is_finite_value(&self) -> bool {
        self.0.is_finite()
    }
}

/// Element a + b·√d of the quadratic field ℚ(√d).
///
/// `d` is a squarefree integer > 1, or 0 when `b == 0`. Arithmetic between
/// two irrational values with different `d` panics: callers keep one field per
/// computation.
#[derive(Clone, PartialEq, Eq)]
pub struct Surd {
    pub a: Rational,
    pub b: Rational,
    pub d: BigInt,
}

impl Surd {
    pub fn new(a: Rational, b: Rational, d: BigInt) -> Self {
        Surd { a, b, d }.normalized()
    }

    pub fn rational(a: Rational) -> Self {
        Surd { a, b: Zero::zero(), d: Zero::zero() }
    }

    fn normalized(mut self) -> Self {
        if Zero::is_zero(&self.b) {
            self.d = Zero::zero();
        }
        self
    }

    fn field(&self, other: &Surd) -> BigInt {
        match (Zero::is_zero(&self.d), Zero::is_zero(&other.d)) {
            (true, _) => other.d.clone(),
            (_, true) => self.d.clone(),
            _ => {
                assert_eq!(self.d, other.d, "arithmetic across different quadratic fields");
                self.d.clone()
            }
        }
    }

    pub fn conjugate(&self) -> Surd {
        Surd { a: self.a.clone(), b: -self.b.clone(), d: self.d.clone() }
    }

    /// Field norm a² − d·b².
    pub fn norm(&self) -> Rational {
        &self.a * &self.a - Rational::from_integer(self.d.clone()) * &self.b * &self.b
    }

    pub fn signum(&self) -> Ordering {
        let sa = self.a.cmp(&Zero::zero());
        let sb = self.b.cmp(&Zero::zero());
        if sb == Ordering::Equal {
            return sa;
        }
        if sa == Ordering::Equal || sa == sb {
            return sb;
        }
        let a2 = &self.a * &self.a;
        let b2d = &self.b * &self.b * Rational::from_integer(self.d.clone());
        if a2 > b2d {
            sa
        } else {
            sb
        }
    }
}

/// Squarefree decomposition n = s²·d of a positive integer, returning d.
/// Factors are found by trial division up to 10⁶; a larger cofactor is kept
/// in d unless it is a perfect square.
pub fn squarefree_part(n: &BigInt) -> BigInt {
    assert!(n.is_positive());
    let mut rest = n.clone();
    let mut d = BigInt::one();
    let mut p = BigInt::from(2u32);
    let limit = BigInt::from(1_000_000u32);
    while &p * &p <= rest && p <= limit {
        let mut count = 0u32;
        while rest.is_multiple_of(&p) {
            rest /= &p;
            count += 1;
        }
        if count % 2 == 1 {
            d *= &p;
        }
        p += 1;
    }
    if rest > BigInt::one() {
        let s = rest.sqrt();
        if &s * &s != rest {
            d *= rest;
        }
    }
    d
}

impl fmt::Debug for Surd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_json_string())
    }
}

impl Add for Surd {
    type Output = Surd;
    fn add(self, rhs: Surd) -> Surd {
        let d = self.field(&rhs);
        Surd::new(self.a + rhs.a, self.b + rhs.b, d)
    }
}

impl Sub for Surd {
    type Output = Surd;
    fn sub(self, rhs: Surd) -> Surd {
        let d = self.field(&rhs);
        Surd::new(self.a - rhs.a, self.b - rhs.b, d)
    }
}

impl Mul for Surd {
    type Output = Surd;
    fn mul(self, rhs: Surd) -> Surd {
        let d = self.field(&rhs);
        let dq = Rational::from_integer(d.clone());
        let a = &self.a * &rhs.a + &self.b * &rhs.b * dq;
        let b = &self.a * &rhs.b + &self.b * &rhs.a;
        Surd::new(a, b, d)
    }
}

impl Div for Surd {
    type Output = Surd;
    fn div(self, rhs: Surd) -> Surd {
        let n = rhs.norm();
        assert!(!Zero::is_zero(&n), "division by zero in quadratic field");
        let num = self * rhs.conjugate();
        Surd::new(num.a / &n, num.b / &n, num.d)
    }
}

impl Neg for Surd {
    type Output = Surd;
    fn neg(self) -> Surd {
        Surd { a: -self.a, b: -self.b, d: self.d }
    }
}

impl PartialOrd for Surd {
    fn partial_cmp(&self, other: &Surd) -> Option<Ordering> {
        Some((self.clone() - other.clone()).signum())
    }
}

impl Scalar for Surd {
    const MODE: ScalarMode = ScalarMode::Surd;
    fn zero() -> Self {
        Surd::rational(Zero::zero())
    }
    fn one() -> Self {
        Surd::rational(One::one())
    }
    fn from_rational(q: &Rational) -> Self {
        Surd::rational(q.clone())
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(&self.a) && Zero::is_zero(&self.b)
    }
    fn magnitude(&self) -> f64 {
        self.to_f64().abs()
    }
    fn to_complex(&self) -> Complex64 {
        Complex64::new(self.to_f64(), 0.0)
    }
    fn to_json_string(&self) -> String {
        if Zero::is_zero(&self.b) {
            rational_to_string(&self.a)
        } else {
            format!("{}+({})*sqrt({})", rational_to_string(&self.a), rational_to_string(&self.b), self.d)
        }
    }
}

impl RealScalar for Surd {
    fn to_f64(&self) -> f64 {
        self.to_extended().to_f64()
    }
    fn to_extended(&self) -> Extended {
        let a = self.a.to_extended();
        if Zero::is_zero(&self.b) {
            return a;
        }
        let d = Rational::from_integer(self.d.clone()).to_extended();
        a + self.b.to_extended() * Transcendental::sqrt(&d)
    }
    fn from_f64(x: f64) -> Self {
        Surd::rational(Rational::from_float(x).expect("finite float"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> Rational {
        rational_from_str(s).unwrap()
    }

    #[test]
    fn parses_rational_literals() {
        assert_eq!(q("-1/2"), Rational::new((-1).into(), 2.into()));
        assert_eq!(q("0.25"), Rational::new(1.into(), 4.into()));
        assert_eq!(q("1e-3"), Rational::new(1.into(), 1000.into()));
        assert_eq!(q("3/6"), Rational::new(1.into(), 2.into()));
        assert!(rational_from_str("abc").is_err());
        assert!(rational_from_str("1/0").is_err());
    }

    #[test]
    fn surd_arithmetic() {
        let three = BigInt::from(3);
        let s = Surd::new(q("2"), q("1"), three.clone());
        let inv = Surd::one() / s.clone();
        assert_eq!(inv, Surd::new(q("2"), q("-1"), three.clone()));
        assert!((s.to_f64() - (2.0 + 3f64.sqrt())).abs() < 1e-15);
        let neg = Surd::new(q("1"), q("-1"), three);
        assert_eq!(neg.signum(), Ordering::Less);
        assert!(neg < Surd::zero());
    }

    #[test]
    fn squarefree() {
        assert_eq!(squarefree_part(&BigInt::from(12)), BigInt::from(3));
        assert_eq!(squarefree_part(&BigInt::from(49)), BigInt::from(1));
        assert_eq!(squarefree_part(&BigInt::from(90)), BigInt::from(10));
    }

    #[test]
    fn extended_has_more_digits_than_double() {
        let third = Extended::from_rational(&q("1/3"));
        let back = third.clone() * Extended::new(3.0) - Extended::one();
        assert!(back.0.to_f64().abs() < 1e-100);
        let e = Transcendental::exp(&Extended::one());
        assert!((e.to_f64() - std::f64::consts::E).abs() < 1e-15);
    }
}
