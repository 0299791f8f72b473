//! Polar polynomials and Bernstein–Szegő measures dμ_T/ρ on [−1, 1].
//!
//! Conventions: moments of dμ_T = dx/√(1−x²) are divided by π, and the
//! polar polynomial Q_n is normalized monic, so that
//! (z−ζ)·Q_n(z) = (n+1)·∫_ζ^z P_n(t) dt.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::Signed;
use rug::Complex as RugComplex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::moments::{classical_moments, ClassicalMeasure, MomentSequence, OrthogonalFamily};
use crate::poly::Polynomial;
use crate::quad;
use crate::scalar::{squarefree_part, Extended, Rational, RealScalar, Scalar, Surd, Transcendental, EXTENDED_PREC};
use crate::zeros;

/// φ(z) = z + √(z²−1) on the branch with |φ| ≥ 1; on [−1, 1] the limit from
/// the upper half plane.
pub fn joukowski(z: Complex64) -> Complex64 {
    let one = Complex64::new(1.0, 0.0);
    let s = (z - one).sqrt() * (z + one).sqrt();
    let phi = z + s;
    if phi.norm() < 1.0 {
        z - s
    } else {
        phi
    }
}

fn joukowski_ext(z: &RugComplex) -> RugComplex {
    let prec = EXTENDED_PREC;
    let s = RugComplex::with_val(prec, z - 1u32).sqrt() * RugComplex::with_val(prec, z + 1u32).sqrt();
    let phi = RugComplex::with_val(prec, z + &s);
    if phi.clone().abs().real() < &1u32 {
        RugComplex::with_val(prec, z - &s)
    } else {
        phi
    }
}

/// Q_n from P_n: div_exact((n+1)·∫_ζ P_n, x − ζ).
pub fn polar_from<T: Scalar>(p_n: &Polynomial<T>, zeta: &T) -> Result<Polynomial<T>> {
    let n = p_n.degree().ok_or_else(|| Error::InvalidParameter("P_n is zero".into()))?;
    let f = p_n.antiderivative_from(zeta).scale(&T::from_i64(n as i64 + 1));
    let lin = Polynomial::new(vec![-zeta.clone(), T::one()]);
    f.div_exact(&lin)
}

/// The monic polar polynomial of degree n for the measure with moments `ms`.
pub fn polar_polynomial<T: RealScalar>(ms: &MomentSequence<T>, zeta: &T, n: usize) -> Result<Polynomial<T>> {
    let fam = OrthogonalFamily::new(ms, n)?;
    polar_from(fam.get(n)?, zeta)
}

/// dμ_T/ρ with ρ = r·∏(x − ν_i) positive on [−1, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct BernsteinSzegoMeasure {
    pub rho: Polynomial<Rational>,
    pub nu: Vec<Complex64>,
    pub r: f64,
}

impl BernsteinSzegoMeasure {
    pub fn from_rho(rho: Polynomial<Rational>) -> Result<Self> {
        let m = rho.degree().ok_or_else(|| Error::InvalidParameter("rho must be nonzero".into()))?;
        let r = rho.leading().expect("nonzero").to_f64();
        let nu = if m == 0 {
            Vec::new()
        } else {
            let rs = zeros::roots(&rho, 0)?;
            zeros::polish(&rho, &rs, 50).roots
        };
        if let Some(v) = nu.iter().find(|v| v.im.abs() < 1e-12 && v.re.abs() <= 1.0) {
            return Err(Error::InvalidParameter(format!("rho vanishes at {v} in [-1, 1]")));
        }
        let samples = 257;
        for k in 0..samples {
            let x = (std::f64::consts::PI * (k as f64 + 0.5) / samples as f64).cos();
            let v = rho.map(|c| c.to_f64()).evaluate(&x);
            if v <= 0.0 {
                return Err(Error::InvalidParameter(format!("rho is not positive at x = {x}")));
            }
        }
        Ok(BernsteinSzegoMeasure { rho, nu, r })
    }

    pub fn m(&self) -> usize {
        self.nu.len()
    }

    /// (1/π)∫x^k/ρ(x) dμ_T by tanh-sinh in extended precision.
    pub fn moments_extended(&self, count: usize, tol: f64) -> Result<MomentSequence<Extended>> {
        let rho: Polynomial<Extended> = self.rho.map(Extended::from_rational);
        let v = quad::tanh_sinh_chebyshev(
            |x: &Extended| {
                let mut acc = Extended::one() / rho.evaluate(x);
                let mut out = Vec::with_capacity(count);
                for _ in 0..count {
                    out.push(acc.clone());
                    acc = acc * x.clone();
                }
                out
            },
            count,
            tol,
        )?;
        let pi = Extended::pi();
        MomentSequence::with_description(
            v.into_iter().map(|m| m / pi.clone()).collect(),
            &format!("chebyshev1/({})", self.rho),
            "pi",
        )
    }

    /// Exact moments in ℚ(√d) for ρ of degree ≤ 2 with simple rational roots,
    /// from partial fractions of 1/ρ and (1/π)∫dμ_T/(x−ν) = −sign(ν)/√(ν²−1).
    pub fn moments_surd(&self, count: usize) -> Result<MomentSequence<Surd>> {
        let cheb = classical_moments(&ClassicalMeasure::Chebyshev1, count)?;
        let m = self.m();
        if m > 2 {
            return Err(Error::Unsupported("exact moments need deg rho <= 2".into()));
        }
        if m == 0 {
            let c = self.rho.coeff(0);
            return MomentSequence::with_description(
                cheb.values().iter().map(|v| Surd::rational(v / &c)).collect(),
                "chebyshev1/const",
                "pi",
            );
        }
        let roots = rational_roots(&self.rho)?;
        let drho = self.rho.differentiate(1);
        let mut total = vec![Surd::zero(); count];
        for nu in &roots {
            let w = Surd::rational(Rational::one() / drho.evaluate(nu));
            let mut j = cauchy_chebyshev(nu);
            for (k, slot) in total.iter_mut().enumerate() {
                if k > 0 {
                    j = Surd::rational(nu.clone()) * j + Surd::rational(cheb.values()[k - 1].clone());
                }
                if slot.d != BigInt::from(0) && j.d != BigInt::from(0) && slot.d != j.d {
                    return Err(Error::Unsupported("roots of rho lead to different quadratic fields".into()));
                }
                *slot = slot.clone() + w.clone() * j.clone();
            }
        }
        MomentSequence::with_description(total, &format!("chebyshev1/({})", self.rho), "pi")
    }

    pub fn model(&self) -> Result<AsymptoticModel> {
        AsymptoticModel::new(self)
    }
}

fn rational_roots(rho: &Polynomial<Rational>) -> Result<Vec<Rational>> {
    let c = rho.coeffs();
    match c.len() {
        2 => Ok(vec![-c[0].clone() / c[1].clone()]),
        3 => {
            let (a, b, cc) = (&c[2], &c[1], &c[0]);
            let disc = b * b - Rational::from_integer(4.into()) * a * cc;
            let num = disc.numer() * disc.denom();
            let s = num.sqrt();
            if disc.is_negative() || disc.is_zero() || &s * &s != num {
                return Err(Error::Unsupported("exact moments need simple rational roots".into()));
            }
            let sq = Rational::new(s, disc.denom().clone());
            let two_a = a * Rational::from_integer(2.into());
            Ok(vec![(-b + &sq) / &two_a, (-b - sq) / two_a])
        }
        _ => Err(Error::Unsupported("exact moments need deg rho <= 2".into())),
    }
}

/// (1/π)∫dμ_T/(x − ν) for rational |ν| > 1.
fn cauchy_chebyshev(nu: &Rational) -> Surd {
    // √(ν²−1) = √(p²−q²)/q = (s/q)·√d
    let p = nu.numer().clone();
    let q = nu.denom().clone();
    let rad: BigInt = &p * &p - &q * &q;
    let d = squarefree_part(&rad);
    let s = (&rad / &d).sqrt();
    let sign = if nu.is_negative() { Rational::one() } else { -Rational::one() };
    if d == BigInt::from(1) {
        Surd::rational(sign * Rational::new(q, s))
    } else {
        // 1/((s/q)√d) = q√d/(s·d)
        let b = sign * Rational::new(q, s * &d);
        Surd::new(Rational::zero(), b, d)
    }
}

/// Limit objects for dμ_T/ρ: G(u) = ∏(1 − 1/(u·φ(ν_k))) is the limit of
/// 2^n·P_n(z)/u^n at z = (u + 1/u)/2, and ℓ_k = (−1/2)^k·e_k(1/φ(ν)) the limit
/// of the Chebyshev coefficient b_{n,n−k}.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticModel {
    pub u_nu: Vec<Complex64>,
    pub limits: Vec<Complex64>,
    /// exp((1/2π)∫log ρ(t)(1−t²)^{−1/2}dt) by quadrature.
    pub szego_quadrature: f64,
    /// √(|r|·∏|φ(ν_k)|/2^m).
    pub szego_closed_form: f64,
}

impl AsymptoticModel {
    pub fn new(bs: &BernsteinSzegoMeasure) -> Result<Self> {
        let u_nu: Vec<Complex64> = bs.nu.iter().map(|&v| joukowski(v)).collect();
        let inv: Vec<Complex64> = u_nu.iter().map(|u| u.inv()).collect();
        let mut e = vec![Complex64::new(1.0, 0.0)];
        for x in &inv {
            let mut next = e.clone();
            next.push(Complex64::new(0.0, 0.0));
            for k in 1..next.len() {
                next[k] += e[k - 1] * x;
            }
            e = next;
        }
        let limits = e.iter().enumerate().map(|(k, ek)| ek * (-0.5f64).powi(k as i32)).collect();
        Ok(AsymptoticModel {
            u_nu,
            limits,
            szego_quadrature: szego_constant_quadrature(&bs.rho)?,
            szego_closed_form: szego_constant_closed_form(bs),
        })
    }

    pub fn g(&self, u: Complex64) -> Complex64 {
        self.u_nu.iter().fold(Complex64::new(1.0, 0.0), |acc, un| acc * (Complex64::new(1.0, 0.0) - (u * un).inv()))
    }

    fn g_ext(&self, u: &RugComplex) -> RugComplex {
        let prec = EXTENDED_PREC;
        let mut acc = RugComplex::with_val(prec, 1);
        for un in &self.u_nu {
            let prod = RugComplex::with_val(prec, u * RugComplex::with_val(prec, (un.re, un.im)));
            acc *= RugComplex::with_val(prec, 1) - prod.recip();
        }
        acc
    }
}

/// exp((1/2π)∫_{−1}^{1} log ρ(t)/√(1−t²) dt).
pub fn szego_constant_quadrature(rho: &Polynomial<Rational>) -> Result<f64> {
    let rf = rho.map(|c| c.to_f64());
    let v = quad::tanh_sinh_chebyshev(|t: &f64| vec![rf.evaluate(t).ln()], 1, 1e-14)?;
    Ok((v[0] / (2.0 * std::f64::consts::PI)).exp())
}

/// Closed form of the Szegő constant for a polynomial weight.
pub fn szego_constant_closed_form(bs: &BernsteinSzegoMeasure) -> f64 {
    let prod: f64 = bs.nu.iter().map(|&v| joukowski(v).norm()).product();
    (bs.r.abs() * prod / 2f64.powi(bs.m() as i32)).sqrt()
}

/// Chebyshev coefficients b_{n,n−k}, k = 0..=m, of P_n; every coefficient
/// below the tail must vanish (exactly, or ≤ 1e-8 in floating modes).
pub fn chebyshev_tail<T: Scalar>(p_n: &Polynomial<T>, m: usize) -> Result<Vec<T>> {
    let n = p_n.degree().ok_or_else(|| Error::InvalidParameter("P_n is zero".into()))?;
    let e = p_n.to_chebyshev();
    for i in 0..n.saturating_sub(m) {
        let c = e.coeff(i);
        if !c.is_negligible(1.0, 1e-8) {
            return Err(Error::TailViolation { index: i, value: c.magnitude() });
        }
    }
    Ok((0..=m.min(n)).map(|k| e.coeff(n - k)).collect())
}

/// |2^n·P_n(z)/φ(z)^n − G(φ(z))| at each point, in extended precision.
pub fn strong_asymptotics_check<T: RealScalar>(
    model: &AsymptoticModel,
    p_n: &Polynomial<T>,
    z_points: &[Complex64],
) -> Result<Vec<f64>> {
    let prec = EXTENDED_PREC;
    let n = p_n.degree().ok_or_else(|| Error::InvalidParameter("P_n is zero".into()))?;
    let coeffs: Vec<rug::Float> = p_n.coeffs().iter().map(|c| c.to_extended().0).collect();
    z_points
        .iter()
        .map(|z| {
            if joukowski(*z).norm() < 1.2 {
                return Err(Error::Precondition(format!("|phi({z})| < 1.2")));
            }
            let zr = RugComplex::with_val(prec, (z.re, z.im));
            let mut pv = RugComplex::with_val(prec, 0);
            for c in coeffs.iter().rev() {
                pv = pv * &zr + c;
            }
            let u = joukowski_ext(&zr);
            let two_n = RugComplex::with_val(prec, rug::ops::Pow::pow(RugComplex::with_val(prec, 2), n as u32));
            let un = RugComplex::with_val(prec, rug::ops::Pow::pow(u.clone(), n as u32));
            let scaled = pv * two_n / un;
            let dev = scaled - model.g_ext(&u);
            Ok(dev.abs().real().to_f64())
        })
        .collect()
}

/// Confocal ellipse |φ(z)| = |φ(ζ)| with foci ±1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EllipseE {
    pub eta: f64,
    pub semi_major: f64,
    pub semi_minor: f64,
}

pub fn ellipse(zeta: Complex64) -> Result<EllipseE> {
    if zeta.im == 0.0 && zeta.re.abs() <= 1.0 {
        return Err(Error::InvalidParameter(format!("zeta = {zeta} lies on [-1, 1]")));
    }
    let eta = joukowski(zeta).norm().ln();
    Ok(EllipseE { eta, semi_major: eta.cosh(), semi_minor: eta.sinh() })
}

/// Distance from z to the ellipse together with the segment [−1, 1].
pub fn dist_to_e(z: Complex64, e: &EllipseE) -> f64 {
    let seg = if z.re.abs() <= 1.0 { z.im.abs() } else { Complex64::new(z.re.abs() - 1.0, z.im).norm() };
    let (a, b) = (e.semi_major, e.semi_minor);
    let point = |t: f64| Complex64::new(a * t.cos(), b * t.sin());
    let samples = 720;
    let mut best_t = 0.0;
    let mut best = f64::INFINITY;
    for k in 0..samples {
        let t = std::f64::consts::TAU * k as f64 / samples as f64;
        let d = (point(t) - z).norm();
        if d < best {
            best = d;
            best_t = t;
        }
    }
    // Newton on f(t) = (P(t) − z)·P′(t)
    let mut t = best_t;
    for _ in 0..3 {
        let p = point(t);
        let dp = Complex64::new(-a * t.sin(), b * t.cos());
        let diff = p - z;
        let f = diff.re * dp.re + diff.im * dp.im;
        let fp = dp.norm_sqr() - (diff.re * p.re + diff.im * p.im);
        if fp.abs() < 1e-300 {
            break;
        }
        let next = t - f / fp;
        let d = (point(next) - z).norm();
        if d < best {
            best = d;
            t = next;
        } else {
            break;
        }
    }
    best.min(seg)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SobolevReport {
    pub max_off_diagonal: f64,
    pub min_diagonal: f64,
    /// All off-diagonal entries are exactly zero (exact modes only).
    pub exact_zero: bool,
    /// Π′_{n+1} = (n+1)·P_n for every n checked.
    pub derivative_identity: bool,
}

/// Gram matrix ∫Π′_j·Π′_k dμ for Π_j = (x − ζ)·Q_{j−1}, 1 ≤ j, k ≤ `up_to`.
pub fn sobolev_orthogonality_check<T: RealScalar>(
    zeta: &T,
    ms: &MomentSequence<T>,
    up_to: usize,
) -> Result<SobolevReport> {
    if up_to == 0 {
        return Err(Error::InvalidParameter("up_to must be at least 1".into()));
    }
    let fam = OrthogonalFamily::new(ms, up_to - 1)?;
    let lin = Polynomial::new(vec![-zeta.clone(), T::one()]);
    let mut derivs = Vec::with_capacity(up_to);
    let mut derivative_identity = true;
    for j in 1..=up_to {
        let p = fam.get(j - 1)?;
        let pi = lin.mul(&polar_from(p, zeta)?);
        let d = pi.differentiate(1);
        let expect = p.scale(&T::from_i64(j as i64));
        let gap = d.sub(&expect);
        if !gap.is_zero() && !(!T::is_exact() && gap.norm_inf() <= 1e-9 * expect.norm_inf()) {
            derivative_identity = false;
        }
        derivs.push(d);
    }
    let mut max_off: f64 = 0.0;
    let mut min_diag = f64::INFINITY;
    let mut exact_zero = T::is_exact();
    for j in 0..up_to {
        for k in j..up_to {
            let g = ms.pair(&derivs[j], &derivs[k])?;
            if j == k {
                min_diag = min_diag.min(g.to_f64());
            } else {
                max_off = max_off.max(g.magnitude());
                exact_zero &= g.is_zero();
            }
        }
    }
    Ok(SobolevReport { max_off_diagonal: max_off, min_diagonal: min_diag, exact_zero, derivative_identity })
}
