//! Dense univariate polynomials, lowest degree first.

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::scalar::{rational_from_str, Rational, Scalar};

/// Relative remainder tolerance of [`Polynomial::div_exact`] in floating modes.
pub const DIV_EXACT_TOL: f64 = 1e-9;

#[derive(Clone, PartialEq)]
pub struct Polynomial<T> {
    coeffs: Vec<T>,
}

impl<T: Scalar> Polynomial<T> {
    /// Builds a polynomial from coefficients `c[i]` of `x^i`, trimming trailing zeros.
    pub fn new(coeffs: Vec<T>) -> Self {
        let mut p = Polynomial { coeffs };
        p.trim();
        p
    }

    pub fn zero() -> Self {
        Polynomial { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(T::one())
    }

    pub fn constant(c: T) -> Self {
        Self::new(vec![c])
    }

    /// `c·x^k`.
    pub fn monomial(k: usize, c: T) -> Self {
        let mut v = vec![T::zero(); k + 1];
        v[k] = c;
        Self::new(v)
    }

    pub fn x() -> Self {
        Self::monomial(1, T::one())
    }

    /// Monic polynomial with the given roots.
    pub fn from_roots(roots: &[T]) -> Self {
        roots.iter().fold(Self::one(), |acc, r| acc.mul(&Self::new(vec![-r.clone(), T::one()])))
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<T> {
        self.coeffs
    }

    /// Coefficient of `x^i` (zero beyond the degree).
    pub fn coeff(&self, i: usize) -> T {
        self.coeffs.get(i).cloned().unwrap_or_else(T::zero)
    }

    /// Degree, `None` for the zero polynomial (degree −∞).
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn leading(&self) -> Option<&T> {
        self.coeffs.last()
    }

    pub fn is_monic(&self) -> bool {
        self.leading().is_some_and(|c| *c == T::one())
    }

    /// Max-abs coefficient.
    pub fn norm_inf(&self) -> f64 {
        self.coeffs.iter().map(|c| c.magnitude()).fold(0.0, f64::max)
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> Polynomial<U> {
        Polynomial::new(self.coeffs.iter().map(f).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::new((0..n).map(|i| self.coeff(i) + other.coeff(i)).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::new((0..n).map(|i| self.coeff(i) - other.coeff(i)).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![T::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].clone() + a.clone() * b.clone();
            }
        }
        Self::new(out)
    }

    pub fn scale(&self, c: &T) -> Self {
        Self::new(self.coeffs.iter().map(|a| a.clone() * c.clone()).collect())
    }

    /// Multiplication by `x^k`.
    pub fn shift(&self, k: usize) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut v = vec![T::zero(); k];
        v.extend(self.coeffs.iter().cloned());
        Self::new(v)
    }

    /// Divides by the leading coefficient. The zero polynomial is returned unchanged.
    pub fn monic(&self) -> Self {
        match self.leading() {
            Some(l) => {
                let inv = T::one() / l.clone();
                let mut p = self.scale(&inv);
                if let Some(last) = p.coeffs.last_mut() {
                    *last = T::one();
                }
                p
            }
            None => Self::zero(),
        }
    }

    /// k-th derivative.
    pub fn differentiate(&self, k: usize) -> Self {
        if k == 0 {
            return self.clone();
        }
        if self.coeffs.len() <= k {
            return Self::zero();
        }
        let v = (k..self.coeffs.len())
            .map(|i| {
                let f: i64 = ((i - k + 1)..=i).map(|t| t as i64).product();
                self.coeffs[i].clone() * T::from_i64(f)
            })
            .collect();
        Self::new(v)
    }

    /// Antiderivative `F` with `F(c) = 0`.
    pub fn antiderivative_from(&self, c: &T) -> Self {
        let mut v = Vec::with_capacity(self.coeffs.len() + 1);
        v.push(T::zero());
        for (i, a) in self.coeffs.iter().enumerate() {
            v.push(a.clone() / T::from_i64(i as i64 + 1));
        }
        let f = Self::new(v);
        let at_c = f.evaluate(c);
        f.sub(&Self::constant(at_c))
    }

    /// Horner evaluation.
    pub fn evaluate(&self, x: &T) -> T {
        self.coeffs.iter().rev().fold(T::zero(), |acc, c| acc * x.clone() + c.clone())
    }

    /// Euclidean division `self = q·d + r` with `deg r < deg d`.
    pub fn div_rem(&self, d: &Self) -> Result<(Self, Self)> {
        let dl = d.leading().ok_or_else(|| Error::InvalidParameter("division by the zero polynomial".into()))?.clone();
        let dd = d.coeffs.len() - 1;
        let mut r = self.coeffs.clone();
        if r.len() <= dd {
            return Ok((Self::zero(), self.clone()));
        }
        let mut q = vec![T::zero(); r.len() - dd];
        for k in (0..q.len()).rev() {
            let c = r[k + dd].clone() / dl.clone();
            if !c.is_zero() {
                for (j, dj) in d.coeffs.iter().enumerate() {
                    r[k + j] = r[k + j].clone() - c.clone() * dj.clone();
                }
            }
            r[k + dd] = T::zero();
            q[k] = c;
        }
        r.truncate(dd);
        Ok((Self::new(q), Self::new(r)))
    }

    /// Exact quotient `self / d`; the remainder must vanish (exactly, or below
    /// `DIV_EXACT_TOL·‖self‖∞` in floating modes).
    pub fn div_exact(&self, d: &Self) -> Result<Self> {
        let (q, r) = self.div_rem(d)?;
        let rn = r.norm_inf();
        let ok = if T::is_exact() { r.is_zero() } else { rn <= DIV_EXACT_TOL * self.norm_inf() };
        if ok {
            Ok(q)
        } else {
            Err(Error::NonDivisible { remainder: rn })
        }
    }

    /// Monic greatest common divisor (meaningful in exact modes).
    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b).expect("nonzero divisor");
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn to_chebyshev(&self) -> ChebyshevExpansion<T> {
        let Some(deg) = self.degree() else {
            return ChebyshevExpansion { coeffs: Vec::new() };
        };
        let basis = monic_chebyshev_basis::<T>(deg);
        let mut rest = self.clone();
        let mut out = vec![T::zero(); deg + 1];
        for k in (0..=deg).rev() {
            let c = rest.coeff(k);
            if !c.is_zero() {
                rest = rest.sub(&basis[k].scale(&c));
                // drop the cancelled leading term exactly
                rest.coeffs.truncate(k);
                rest.trim();
            }
            out[k] = c;
        }
        ChebyshevExpansion { coeffs: out }
    }
}

impl Polynomial<Rational> {
    /// Parses a JSON-style list of coefficient strings.
    pub fn parse_strs<S: AsRef<str>>(items: &[S]) -> Result<Self> {
        items.iter().map(|s| rational_from_str(s.as_ref())).collect::<Result<Vec<_>>>().map(Self::new)
    }
}

/// Monic first-kind Chebyshev polynomials T̂_0, …, T̂_n.
pub fn monic_chebyshev_basis<T: Scalar>(n: usize) -> Vec<Polynomial<T>> {
    let mut out: Vec<Polynomial<T>> = Vec::with_capacity(n + 1);
    out.push(Polynomial::one());
    if n >= 1 {
        out.push(Polynomial::x());
    }
    let half = T::one() / T::from_i64(2);
    let quarter = T::one() / T::from_i64(4);
    for k in 1..n {
        let c = if k == 1 { half.clone() } else { quarter.clone() };
        let next = out[k].shift(1).sub(&out[k - 1].scale(&c));
        out.push(next);
    }
    out
}

/// Monic first-kind Chebyshev polynomial T̂_n.
pub fn monic_chebyshev<T: Scalar>(n: usize) -> Polynomial<T> {
    monic_chebyshev_basis(n).pop().expect("nonempty basis")
}

/// Coefficients in the monic first-kind Chebyshev basis T̂_i.
#[derive(Clone, Debug, PartialEq)]
pub struct ChebyshevExpansion<T> {
    pub coeffs: Vec<T>,
}

impl<T: Scalar> ChebyshevExpansion<T> {
    pub fn from_chebyshev(&self) -> Polynomial<T> {
        if self.coeffs.is_empty() {
            return Polynomial::zero();
        }
        let basis = monic_chebyshev_basis::<T>(self.coeffs.len() - 1);
        self.coeffs.iter().zip(basis.iter()).fold(Polynomial::zero(), |acc, (c, t)| acc.add(&t.scale(c)))
    }

    pub fn coeff(&self, i: usize) -> T {
        self.coeffs.get(i).cloned().unwrap_or_else(T::zero)
    }
}

impl<T: Scalar> fmt::Debug for Polynomial<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl<T: Scalar> fmt::Display for Polynomial<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let s = c.to_json_string();
            match i {
                0 => write!(f, "{s}")?,
                1 => write!(f, "({s})*x")?,
                _ => write!(f, "({s})*x^{i}")?,
            }
        }
        Ok(())
    }
}

impl<T: Scalar> Serialize for Polynomial<T> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let v: Vec<String> = self.coeffs.iter().map(|c| c.to_json_string()).collect();
        v.serialize(s)
    }
}

impl<'de, T: Scalar> Deserialize<'de> for Polynomial<T> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v: Vec<String> = Vec::deserialize(d)?;
        let q = v
            .iter()
            .map(|s| rational_from_str(s).map(|q| T::from_rational(&q)))
            .collect::<Result<Vec<T>>>()
            .map_err(D::Error::custom)?;
        Ok(Polynomial::new(q))
    }
}

impl<T: Scalar> Add for &Polynomial<T> {
    type Output = Polynomial<T>;
    fn add(self, rhs: Self) -> Polynomial<T> {
        Polynomial::add(self, rhs)
    }
}

impl<T: Scalar> Sub for &Polynomial<T> {
    type Output = Polynomial<T>;
    fn sub(self, rhs: Self) -> Polynomial<T> {
        Polynomial::sub(self, rhs)
    }
}

impl<T: Scalar> Mul for &Polynomial<T> {
    type Output = Polynomial<T>;
    fn mul(self, rhs: Self) -> Polynomial<T> {
        Polynomial::mul(self, rhs)
    }
}

impl<T: Scalar> Neg for &Polynomial<T> {
    type Output = Polynomial<T>;
    fn neg(self) -> Polynomial<T> {
        Polynomial::new(self.coeffs.iter().map(|c| -c.clone()).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(s: &str) -> Rational {
        rational_from_str(s).unwrap()
    }

    fn p(v: &[&str]) -> Polynomial<Rational> {
        Polynomial::parse_strs(v).unwrap()
    }

    #[test]
    fn arithmetic_examples() {
        assert_eq!(&p(&["1", "1"]) * &p(&["1", "-1"]), p(&["1", "0", "-1"]));
        assert!((&p(&["3", "2"]) * &Polynomial::zero()).is_zero());
        assert_eq!(&p(&["0", "-3/2", "0", "1"]) + &p(&["0", "3/2"]), p(&["0", "0", "0", "1"]));
        assert_eq!(Polynomial::<Rational>::zero().degree(), None);
    }

    #[test]
    fn derivatives_and_antiderivatives() {
        assert_eq!(p(&["-1/2", "0", "1"]).differentiate(2), p(&["2"]));
        assert!(p(&["0", "0", "1"]).differentiate(3).is_zero());
        assert_eq!(p(&["1"]).antiderivative_from(&q("0")), p(&["0", "1"]));
        assert_eq!(p(&["0", "1"]).antiderivative_from(&q("2")), p(&["-2", "0", "1/2"]));
        assert_eq!(p(&["0", "0", "3"]).antiderivative_from(&q("-1")), p(&["1", "0", "0", "1"]));
    }

    #[test]
    fn division() {
        assert_eq!(p(&["-1", "0", "1"]).div_exact(&p(&["-1", "1"])).unwrap(), p(&["1", "1"]));
        assert!(matches!(p(&["0", "0", "0", "1"]).div_exact(&p(&["-1", "1"])), Err(Error::NonDivisible { .. })));
        let f = Polynomial::<f64>::new(vec![-1.0, 0.0, 1.0 + 1e-13]);
        assert!(f.div_exact(&Polynomial::new(vec![-1.0, 1.0])).is_ok());
    }

    #[test]
    fn chebyshev_basis() {
        let t2 = monic_chebyshev::<Rational>(2);
        assert_eq!(t2.evaluate(&q("1")), q("1/2"));
        assert_eq!(monic_chebyshev::<Rational>(3), p(&["0", "-3/4", "0", "1"]));
        let e = p(&["0", "0", "1"]).to_chebyshev();
        assert_eq!(e.coeffs, vec![q("1/2"), q("0"), q("1")]);
        assert_eq!(p(&["1"]).to_chebyshev().coeffs, vec![q("1")]);
        // T̂_n = T_n / 2^(n-1): check T̂_5(cos t) = cos(5t)/16
        let t5 = monic_chebyshev::<f64>(5);
        let t = 0.37f64;
        assert!((t5.evaluate(&t.cos()) - (5.0 * t).cos() / 16.0).abs() < 1e-14);
    }

    #[test]
    fn gcd_is_monic() {
        let a = &p(&["-1", "1"]) * &p(&["2", "1"]);
        let b = &p(&["-1", "1"]) * &p(&["5", "0", "3"]);
        assert_eq!(a.gcd(&b), p(&["-1", "1"]));
    }

    #[test]
    fn json_round_trip() {
        let a = p(&["-1/2", "0", "1"]);
        let s = serde_json::to_string(&a).unwrap();
        assert_eq!(s, r#"["-1/2","0","1"]"#);
        let b: Polynomial<Rational> = serde_json::from_str(&s).unwrap();
        assert_eq!(a, b);
        let f = Polynomial::<f64>::new(vec![0.1, -2.5e-7]);
        let g: Polynomial<f64> = serde_json::from_str(&serde_json::to_string(&f).unwrap()).unwrap();
        assert_eq!(f, g);
    }

    fn rat() -> impl Strategy<Value = Rational> {
        (-20i64..=20, 1i64..=6).prop_map(|(a, b)| Rational::new(a.into(), b.into()))
    }

    fn poly(max_deg: usize) -> impl Strategy<Value = Polynomial<Rational>> {
        proptest::collection::vec(rat(), 0..=max_deg + 1).prop_map(Polynomial::new)
    }

    proptest! {
        #[test]
        fn ring_axioms(a in poly(20), b in poly(20), c in poly(20)) {
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!(&a + &b, &b + &a);
        }

        #[test]
        fn antiderivative_inverts_derivative(a in poly(15), c in rat()) {
            let f = a.antiderivative_from(&c);
            prop_assert_eq!(f.differentiate(1), a);
            prop_assert!(f.evaluate(&c) == Rational::from_integer(0.into()));
        }

        #[test]
        fn chebyshev_round_trip(a in poly(30)) {
            prop_assert_eq!(a.to_chebyshev().from_chebyshev(), a);
        }

        #[test]
        fn exact_division_round_trip(a in poly(10), b in poly(6)) {
            prop_assume!(!b.is_zero());
            prop_assert_eq!((&a * &b).div_exact(&b).unwrap(), a);
        }
    }
}
