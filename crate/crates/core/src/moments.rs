//! Moment sequences, Hankel determinants and monic orthogonal polynomials.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::linalg::{self, Mat};
use crate::operator::ExactlySolvableOperator;
use crate::poly::Polynomial;
use crate::quad;
use crate::scalar::{rational_from_str, Extended, Rational, RealScalar, Scalar};

/// Default relative tolerance for quadrature moments.
pub const DEFAULT_QUAD_TOL: f64 = 1e-12;
/// Evaluation budget for adaptive Gauss–Kronrod.
pub const MAX_QUAD_EVALS: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq)]
pub enum ClassicalMeasure {
    /// e^{−x²} on ℝ.
    Hermite,
    /// x^α e^{−x} on [0, ∞).
    Laguerre { alpha: Rational },
    /// (1−x)^α (1+x)^β on [−1, 1].
    Jacobi { alpha: Rational, beta: Rational },
    /// (1−x²)^{−1/2} on [−1, 1].
    Chebyshev1,
}

impl ClassicalMeasure {
    pub fn legendre() -> Self {
        ClassicalMeasure::Jacobi { alpha: Rational::from_integer(0.into()), beta: Rational::from_integer(0.into()) }
    }

    fn validate(&self) -> Result<()> {
        let minus_one = -<Rational as num_traits::One>::one();
        let bad = |p: &Rational| *p <= minus_one;
        match self {
            ClassicalMeasure::Laguerre { alpha } if bad(alpha) => {
                Err(Error::InvalidParameter(format!("laguerre alpha must exceed -1, got {alpha}")))
            }
            ClassicalMeasure::Jacobi { alpha, beta } if bad(alpha) || bad(beta) => {
                Err(Error::InvalidParameter(format!("jacobi parameters must exceed -1, got ({alpha}, {beta})")))
            }
            _ => Ok(()),
        }
    }

    pub fn scale_note(&self) -> String {
        match self {
            ClassicalMeasure::Hermite => "sqrt(pi)".into(),
            ClassicalMeasure::Laguerre { alpha } => format!("Gamma({alpha}+1)"),
            ClassicalMeasure::Jacobi { alpha, beta } => {
                format!("2^({alpha}+{beta}+1)*B({alpha}+1,{beta}+1)")
            }
            ClassicalMeasure::Chebyshev1 => "pi".into(),
        }
    }
}

/// Moments μ_0, …, μ_{N−1} of a positive measure, defined up to a common
/// positive factor recorded in `scale`.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentSequence<T> {
    values: Vec<T>,
    pub description: String,
    pub scale: String,
}

impl<T: Scalar> MomentSequence<T> {
    pub fn explicit(values: Vec<T>) -> Result<Self> {
        Self::with_description(values, "explicit", "1")
    }

    pub fn with_description(values: Vec<T>, description: &str, scale: &str) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidParameter("empty moment sequence".into()));
        }
        Ok(MomentSequence { values, description: description.into(), scale: scale.into() })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn get(&self, k: usize) -> Result<&T> {
        self.values.get(k).ok_or(Error::InsufficientMoments { needed: k + 1, available: self.values.len() })
    }

    pub fn require(&self, count: usize) -> Result<()> {
        if self.values.len() < count {
            Err(Error::InsufficientMoments { needed: count, available: self.values.len() })
        } else {
            Ok(())
        }
    }

    /// The sequence c·μ.
    pub fn scaled(&self, c: &T) -> Self {
        MomentSequence {
            values: self.values.iter().map(|v| v.clone() * c.clone()).collect(),
            description: format!("{} scaled", self.description),
            scale: self.scale.clone(),
        }
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> MomentSequence<U> {
        MomentSequence {
            values: self.values.iter().map(f).collect(),
            description: self.description.clone(),
            scale: self.scale.clone(),
        }
    }

    /// ∫p dμ.
    pub fn integrate(&self, p: &Polynomial<T>) -> Result<T> {
        if let Some(d) = p.degree() {
            self.require(d + 1)?;
        }
        Ok(p.coeffs().iter().zip(&self.values).fold(T::zero(), |acc, (c, m)| acc + c.clone() * m.clone()))
    }

    /// ∫p·q dμ.
    pub fn pair(&self, p: &Polynomial<T>, q: &Polynomial<T>) -> Result<T> {
        self.integrate(&p.mul(q))
    }

    /// Sum of |c_i μ_i| for the terms of ∫p dμ; the natural scale for float zero tests.
    pub fn integrate_abs(&self, p: &Polynomial<T>) -> f64 {
        p.coeffs().iter().zip(&self.values).map(|(c, m)| c.magnitude() * m.magnitude()).sum()
    }
}

/// Exact moments of a classical measure with the transcendental scale factored out.
pub fn classical_moments(m: &ClassicalMeasure, count: usize) -> Result<MomentSequence<Rational>> {
    m.validate()?;
    let q = |n: i64| Rational::from_integer(n.into());
    let mut v: Vec<Rational> = Vec::with_capacity(count);
    for n in 0..count {
        let val = match m {
            ClassicalMeasure::Hermite => {
                // μ_n = (n−1)/2 · μ_{n−2}
                match n {
                    0 => q(1),
                    1 => q(0),
                    _ => v[n - 2].clone() * q(n as i64 - 1) / q(2),
                }
            }
            ClassicalMeasure::Laguerre { alpha } => {
                if n == 0 {
                    q(1)
                } else {
                    v[n - 1].clone() * (alpha.clone() + q(n as i64))
                }
            }
            ClassicalMeasure::Jacobi { alpha, beta } => {
                // (n+1+α+β+1)·μ_{n+1} = n·μ_{n−1} + (β−α)·μ_n
                match n {
                    0 => q(1),
                    _ => {
                        let k = n as i64 - 1;
                        let prev2 = if k >= 1 { v[n - 2].clone() * q(k) } else { q(0) };
                        (prev2 + (beta.clone() - alpha.clone()) * v[n - 1].clone())
                            / (q(k + 2) + alpha.clone() + beta.clone())
                    }
                }
            }
            ClassicalMeasure::Chebyshev1 => match n {
                0 => q(1),
                1 => q(0),
                _ => v[n - 2].clone() * q(n as i64 - 1) / q(n as i64),
            },
        };
        v.push(val);
    }
    let desc = format!("{m:?}");
    MomentSequence::with_description(v, &desc, &m.scale_note())
}

/// A weight function on an interval (ends may be infinite).
#[derive(Debug, Clone)]
pub struct Weight {
    pub expr: Expr,
    pub source: String,
    pub a: f64,
    pub b: f64,
    /// Algebraic endpoint singularities: use tanh-sinh on a finite interval.
    pub singular_endpoints: bool,
}

impl Weight {
    pub fn parse(expr: &str, a: &str, b: &str, singular_endpoints: bool) -> Result<Self> {
        let end = |s: &str| -> Result<f64> {
            match s.trim() {
                "inf" | "+inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                other => Ok(rational_from_str(other)?.to_f64()),
            }
        };
        let w = Weight { expr: Expr::parse(expr)?, source: expr.into(), a: end(a)?, b: end(b)?, singular_endpoints };
        if w.a >= w.b {
            return Err(Error::InvalidParameter(format!("empty interval [{a}, {b}]")));
        }
        if singular_endpoints && !(w.a.is_finite() && w.b.is_finite()) {
            return Err(Error::InvalidParameter("endpoint-singular weights need a finite interval".into()));
        }
        Ok(w)
    }

    fn sample_points(&self) -> Vec<f64> {
        (1..100)
            .map(|i| {
                let t = i as f64 / 100.0;
                match (self.a.is_finite(), self.b.is_finite()) {
                    (true, true) => self.a + (self.b - self.a) * t,
                    (true, false) => self.a + t / (1.0 - t),
                    (false, true) => self.b - t / (1.0 - t),
                    (false, false) => (2.0 * t - 1.0) / (1.0 - (2.0 * t - 1.0).powi(2)),
                }
            })
            .collect()
    }

    fn check_nonnegative(&self) -> Result<()> {
        for x in self.sample_points() {
            let v: f64 = self.expr.eval(&x);
            if v < 0.0 {
                return Err(Error::InvalidParameter(format!("weight {} is negative at x = {x}", self.source)));
            }
        }
        Ok(())
    }
}

fn moment_powers<T: Scalar>(x: &T, w: T, count: usize) -> Vec<T> {
    let mut out = Vec::with_capacity(count);
    let mut acc = w;
    for _ in 0..count {
        out.push(acc.clone());
        acc = acc * x.clone();
    }
    out
}

/// Floating moments of a weight by adaptive quadrature.
pub fn weight_moments(w: &Weight, count: usize, tol: f64) -> Result<MomentSequence<f64>> {
    w.check_nonnegative()?;
    let values = if w.singular_endpoints {
        weight_moments_extended_raw(w, count, (tol * 1e-3).max(1e-40))?.into_iter().map(|v| v.to_f64()).collect()
    } else {
        quad::gauss_kronrod(
            |x, out: &mut [f64]| {
                let wx: f64 = w.expr.eval(&x);
                let mut acc = wx;
                for o in out.iter_mut() {
                    *o = acc;
                    acc *= x;
                }
            },
            count,
            w.a,
            w.b,
            tol,
            MAX_QUAD_EVALS,
        )?
    };
    MomentSequence::with_description(values, &format!("weight {}", w.source), "1")
}

fn weight_moments_extended_raw(w: &Weight, count: usize, tol: f64) -> Result<Vec<Extended>> {
    let a = Extended::new(w.a);
    let b = Extended::new(w.b);
    quad::tanh_sinh(
        |x: &Extended| {
            let wx: Extended = w.expr.eval(x);
            Some(moment_powers(x, wx, count))
        },
        count,
        &a,
        &b,
        tol,
    )
}

/// Extended-precision moments of a weight on a finite interval (tanh-sinh).
pub fn weight_moments_extended(w: &Weight, count: usize, tol: f64) -> Result<MomentSequence<Extended>> {
    if !(w.a.is_finite() && w.b.is_finite()) {
        return Err(Error::Unsupported("extended-precision weight moments need a finite interval".into()));
    }
    w.check_nonnegative()?;
    let v = weight_moments_extended_raw(w, count, tol)?;
    MomentSequence::with_description(v, &format!("weight {}", w.source), "1")
}

/// The (n+1)×(n+1) Hankel matrix (μ_{i+j}).
pub fn hankel_matrix<T: Scalar>(ms: &MomentSequence<T>, n: usize) -> Result<Mat<T>> {
    ms.require(2 * n + 1)?;
    Ok((0..=n).map(|i| (0..=n).map(|j| ms.values[i + j].clone()).collect()).collect())
}

/// Δ_n = det(μ_{i+j})_{0≤i,j≤n}.
pub fn hankel_det<T: Scalar>(ms: &MomentSequence<T>, n: usize) -> Result<T> {
    Ok(linalg::determinant(&hankel_matrix(ms, n)?))
}

/// Δ_n with a 1-norm condition estimate of the Hankel matrix.
pub fn hankel_det_with_condition(ms: &MomentSequence<f64>, n: usize) -> Result<(f64, f64)> {
    Ok(linalg::det_with_condition(&hankel_matrix(ms, n)?))
}

/// Minors Δ_{n,i}: the n×(n+1) matrix with rows (μ_r, …, μ_{r+n}), r < n,
/// with column i deleted. Δ_{0,0} is the empty determinant 1.
#[derive(Debug, Clone, PartialEq)]
pub struct HankelMinors<T> {
    pub n: usize,
    pub minors: Vec<T>,
}

impl<T: Scalar> HankelMinors<T> {
    /// Δ_{n,n} = Δ_{n−1}.
    pub fn leading(&self) -> &T {
        &self.minors[self.n]
    }

    /// (−1)^{n+i}·Δ_{n,i}: the coefficient of x^i in Δ_{n,n}·P_n.
    pub fn signed(&self, i: usize) -> T {
        if (self.n + i) % 2 == 0 {
            self.minors[i].clone()
        } else {
            -self.minors[i].clone()
        }
    }
}

pub fn hankel_minors<T: Scalar>(ms: &MomentSequence<T>, n: usize) -> Result<HankelMinors<T>> {
    if n > 0 {
        ms.require(2 * n)?;
    }
    let minors = (0..=n)
        .map(|i| {
            let m: Mat<T> =
                (0..n).map(|r| (0..=n).filter(|&c| c != i).map(|c| ms.values[r + c].clone()).collect()).collect();
            linalg::determinant(&m)
        })
        .collect();
    Ok(HankelMinors { n, minors })
}

/// P_n from Heine's determinant formula.
pub fn heine_polynomial<T: Scalar>(ms: &MomentSequence<T>, n: usize) -> Result<Polynomial<T>> {
    let h = hankel_minors(ms, n)?;
    let lead = h.leading().clone();
    if lead.is_zero() {
        return Err(Error::NotPositiveDefinite { index: n.saturating_sub(1) });
    }
    let mut c: Vec<T> = (0..=n).map(|i| h.signed(i) / lead.clone()).collect();
    c[n] = T::one();
    Ok(Polynomial::new(c))
}

/// Monic orthogonal polynomials P_0, …, P_N with their three-term recurrence
/// P_{k+1} = (x − α_k)·P_k − β_k·P_{k−1}, computed from the moments by the
/// Chebyshev algorithm, i.e. an O(N²) solver of the Hankel systems.
#[derive(Debug, Clone)]
pub struct OrthogonalFamily<T: Scalar> {
    polys: Vec<Polynomial<T>>,
    pub alpha: Vec<T>,
    pub beta: Vec<T>,
    /// σ_k = ∫P_k² dμ = Δ_k/Δ_{k−1}.
    pub norms: Vec<T>,
}

impl<T: RealScalar> OrthogonalFamily<T> {
    /// Needs μ_0 … μ_{2N−1}; when μ_{2N} is present Δ_N > 0 is checked too.
    pub fn new(ms: &MomentSequence<T>, n_max: usize) -> Result<Self> {
        ms.require((2 * n_max).max(1))?;
        let mu = &ms.values;
        let len = mu.len().min(2 * n_max + 1);
        let mut alpha: Vec<T> = Vec::new();
        let mut beta: Vec<T> = Vec::new();
        let mut norms: Vec<T> = Vec::new();
        let mut sig_prev2: Vec<T> = vec![T::zero(); len];
        let mut sig_prev: Vec<T> = vec![T::zero(); len];
        let mut polys = vec![Polynomial::one()];
        for k in 0..=n_max {
            let sig = if k == 0 {
                mu[..len].to_vec()
            } else {
                let mut s = vec![T::zero(); len];
                for l in k..len.saturating_sub(k) {
                    s[l] = sig_prev[l + 1].clone()
                        - alpha[k - 1].clone() * sig_prev[l].clone()
                        - beta[k - 1].clone() * sig_prev2[l].clone();
                }
                s
            };
            if k + k >= len {
                break;
            }
            let skk = sig[k].clone();
            if !skk.is_positive() {
                return Err(Error::NotPositiveDefinite { index: k });
            }
            norms.push(skk.clone());
            if k == n_max {
                break;
            }
            let a = if k == 0 {
                sig[1].clone() / skk.clone()
            } else {
                sig[k + 1].clone() / skk.clone() - sig_prev[k].clone() / norms[k - 1].clone()
            };
            let b = if k == 0 { skk.clone() } else { skk.clone() / norms[k - 1].clone() };
            let next = polys[k].shift(1).sub(&polys[k].scale(&a));
            let next = if k == 0 { next } else { next.sub(&polys[k - 1].scale(&b)) };
            polys.push(next);
            alpha.push(a);
            beta.push(b);
            sig_prev2 = std::mem::replace(&mut sig_prev, sig);
        }
        Ok(OrthogonalFamily { polys, alpha, beta, norms })
    }

    pub fn max_index(&self) -> usize {
        self.polys.len() - 1
    }

    pub fn get(&self, n: usize) -> Result<&Polynomial<T>> {
        self.polys.get(n).ok_or_else(|| Error::Precondition(format!("P_{n} not computed")))
    }

    pub fn polys(&self) -> &[Polynomial<T>] {
        &self.polys
    }
}

/// Monic orthogonal polynomial P_n.
pub fn monic_orthogonal<T: RealScalar>(ms: &MomentSequence<T>, n: usize) -> Result<Polynomial<T>> {
    let fam = OrthogonalFamily::new(ms, n)?;
    Ok(fam.polys.into_iter().nth(n).expect("family built up to n"))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BilinearReport {
    pub symmetric: bool,
    pub positive_definite: bool,
    pub witness: Option<String>,
}

/// Gram matrix G_{ij} = ∫L[x^i]·x^j dμ, 0 ≤ i, j ≤ N; symmetry and positivity
/// of all leading principal minors.
pub fn bilinear_form_check<T: RealScalar>(
    op: &ExactlySolvableOperator,
    ms: &MomentSequence<T>,
    n: usize,
) -> Result<BilinearReport> {
    ms.require(2 * n + 1)?;
    let mut g: Mat<T> = linalg::zeros(n + 1, n + 1);
    for i in 0..=n {
        let li = op.apply(&Polynomial::<T>::monomial(i, T::one()));
        for j in 0..=n {
            g[i][j] = ms.integrate(&li.shift(j))?;
        }
    }
    let mut witness = None;
    let mut symmetric = true;
    'outer: for i in 0..=n {
        for j in i + 1..=n {
            let d = g[i][j].clone() - g[j][i].clone();
            let scale = g[i][j].magnitude().max(g[j][i].magnitude());
            if !d.is_negligible(scale, 1e-8) {
                symmetric = false;
                witness = Some(format!("G[{i}][{j}] != G[{j}][{i}]"));
                break 'outer;
            }
        }
    }
    let mut positive_definite = true;
    for k in 1..=n + 1 {
        let block: Mat<T> = g[..k].iter().map(|r| r[..k].to_vec()).collect();
        let d = linalg::determinant(&block);
        if !d.is_positive() {
            positive_definite = false;
            if witness.is_none() {
                witness = Some(format!("leading minor of order {k} is {}", d.to_json_string()));
            }
            break;
        }
    }
    Ok(BilinearReport { symmetric, positive_definite, witness })
}

/// Measure specification as accepted on the command line and in JSON files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum MeasureSpec {
    Hermite,
    Laguerre {
        #[serde(default = "zero_str")]
        alpha: String,
    },
    Jacobi {
        #[serde(default = "zero_str")]
        alpha: String,
        #[serde(default = "zero_str")]
        beta: String,
    },
    Chebyshev1,
    Moments {
        values: Vec<String>,
    },
    Weight {
        expr: String,
        interval: [String; 2],
        #[serde(default)]
        singular_endpoints: bool,
    },
    /// dμ_T/ρ with ρ given by its coefficients, lowest degree first.
    BernsteinSzego {
        rho: Vec<String>,
    },
}

fn zero_str() -> String {
    "0".into()
}

impl MeasureSpec {
    pub fn classical(&self) -> Result<Option<ClassicalMeasure>> {
        Ok(match self {
            MeasureSpec::Hermite => Some(ClassicalMeasure::Hermite),
            MeasureSpec::Laguerre { alpha } => Some(ClassicalMeasure::Laguerre { alpha: rational_from_str(alpha)? }),
            MeasureSpec::Jacobi { alpha, beta } => {
                Some(ClassicalMeasure::Jacobi { alpha: rational_from_str(alpha)?, beta: rational_from_str(beta)? })
            }
            MeasureSpec::Chebyshev1 => Some(ClassicalMeasure::Chebyshev1),
            _ => None,
        })
    }

    /// True when exact rational moments are available.
    pub fn is_rational(&self) -> bool {
        match self {
            MeasureSpec::Moments { values } => values.iter().all(|v| rational_from_str(v).is_ok()),
            MeasureSpec::Weight { .. } | MeasureSpec::BernsteinSzego { .. } => false,
            _ => true,
        }
    }

    pub fn exact_moments(&self, count: usize) -> Result<MomentSequence<Rational>> {
        if let Some(c) = self.classical()? {
            return classical_moments(&c, count);
        }
        match self {
            MeasureSpec::Moments { values } => {
                let v = values.iter().map(|s| rational_from_str(s)).collect::<Result<Vec<_>>>()?;
                if v.first().is_some_and(|m| !m.is_positive()) {
                    return Err(Error::NotPositiveDefinite { index: 0 });
                }
                MomentSequence::explicit(v)
            }
            _ => Err(Error::Unsupported("exact precision needs a measure with rational moments".into())),
        }
    }

    fn weight(&self) -> Result<Weight> {
        match self {
            MeasureSpec::Weight { expr, interval, singular_endpoints } => {
                Weight::parse(expr, &interval[0], &interval[1], *singular_endpoints)
            }
            _ => Err(Error::Precondition("not a weight measure".into())),
        }
    }

    fn bernstein_szego(&self) -> Result<crate::polar::BernsteinSzegoMeasure> {
        match self {
            MeasureSpec::BernsteinSzego { rho } => {
                crate::polar::BernsteinSzegoMeasure::from_rho(Polynomial::parse_strs(rho)?)
            }
            _ => Err(Error::Precondition("not a Bernstein-Szego measure".into())),
        }
    }

    pub fn double_moments(&self, count: usize, tol: f64) -> Result<MomentSequence<f64>> {
        match self {
            MeasureSpec::Weight { .. } => weight_moments(&self.weight()?, count, tol),
            MeasureSpec::BernsteinSzego { .. } => {
                Ok(self.bernstein_szego()?.moments_extended(count, 1e-40)?.map(|v| v.to_f64()))
            }
            _ => Ok(self.exact_moments(count)?.map(|v| v.to_f64())),
        }
    }

    pub fn extended_moments(&self, count: usize, tol: f64) -> Result<MomentSequence<Extended>> {
        match self {
            MeasureSpec::Weight { .. } => weight_moments_extended(&self.weight()?, count, tol.min(1e-40)),
            MeasureSpec::BernsteinSzego { .. } => self.bernstein_szego()?.moments_extended(count, tol.min(1e-90)),
            _ => Ok(self.exact_moments(count)?.map(|v| v.to_extended())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::monic_chebyshev;

    fn q(s: &str) -> Rational {
        rational_from_str(s).unwrap()
    }

    /// Monic Hermite polynomials from their three-term recurrence.
    fn monic_hermite(n: usize) -> Polynomial<Rational> {
        let mut a = Polynomial::one();
        let mut b = Polynomial::x();
        if n == 0 {
            return a;
        }
        for k in 1..n {
            let c = b.shift(1).sub(&a.scale(&(q(&k.to_string()) / q("2"))));
            a = b;
            b = c;
        }
        b
    }

    #[test]
    fn classical_examples() {
        let h = classical_moments(&ClassicalMeasure::Hermite, 5).unwrap();
        assert_eq!(h.values(), &[q("1"), q("0"), q("1/2"), q("0"), q("3/4")]);
        let c = classical_moments(&ClassicalMeasure::Chebyshev1, 5).unwrap();
        assert_eq!((c.values()[0].clone(), c.values()[2].clone(), c.values()[4].clone()), (q("1"), q("1/2"), q("3/8")));
        let l = classical_moments(&ClassicalMeasure::Laguerre { alpha: q("0") }, 7).unwrap();
        assert_eq!(l.values()[6], q("720"));
        let j = classical_moments(&ClassicalMeasure::legendre(), 5).unwrap();
        // ∫x^k dx / 2
        assert_eq!(j.values(), &[q("1"), q("0"), q("1/3"), q("0"), q("1/5")]);
        // Jacobi(−1/2,−1/2) is the Chebyshev measure
        let jc = classical_moments(&ClassicalMeasure::Jacobi { alpha: q("-1/2"), beta: q("-1/2") }, 9).unwrap();
        assert_eq!(jc.values(), classical_moments(&ClassicalMeasure::Chebyshev1, 9).unwrap().values());
        assert!(classical_moments(&ClassicalMeasure::Laguerre { alpha: q("-1") }, 3).is_err());
    }

    #[test]
    fn jacobi_moments_match_quadrature() {
        let j = classical_moments(&ClassicalMeasure::Jacobi { alpha: q("1/2"), beta: q("2") }, 8).unwrap();
        let w = Weight::parse("(1-x)^(1/2)*(1+x)^2", "-1", "1", true).unwrap();
        let m = weight_moments(&w, 8, 1e-13).unwrap();
        for k in 0..8 {
            let ratio = m.values()[k] / m.values()[0];
            assert!((ratio - j.values()[k].to_f64()).abs() < 1e-12, "k={k}");
        }
    }

    #[test]
    fn weight_examples() {
        let w = Weight::parse("exp(-x^2)/(1+x^2)", "-inf", "inf", false).unwrap();
        let m = weight_moments(&w, 6, 1e-12).unwrap();
        assert!(m.values()[1].abs() < 1e-12);
        let w = Weight::parse("1", "-1", "1", false).unwrap();
        let m = weight_moments(&w, 7, 1e-12).unwrap();
        for k in 0..4 {
            assert!((m.values()[2 * k] - 2.0 / (2 * k + 1) as f64).abs() < 1e-13);
        }
        let w = Weight::parse("1/((2-x)*sqrt(1-x^2))", "-1", "1", true).unwrap();
        let m = weight_moments(&w, 1, 1e-12).unwrap();
        assert!((m.values()[0] - std::f64::consts::PI / 3f64.sqrt()).abs() < 1e-13);
        assert!(Weight::parse("x", "-1", "1", false).unwrap().check_nonnegative().is_err());
    }

    #[test]
    fn hankel_examples() {
        let ms = MomentSequence::explicit(vec![q("1"), q("0"), q("1/2")]).unwrap();
        assert_eq!(hankel_det(&ms, 1).unwrap(), q("1/2"));
        assert_eq!(hankel_det(&ms, 0).unwrap(), q("1"));
        let ms = MomentSequence::explicit(vec![q("3"), q("5")]).unwrap();
        let h = hankel_minors(&ms, 1).unwrap();
        assert_eq!(h.minors, vec![q("5"), q("3")]);
        let f = MomentSequence::explicit(vec![1.0, 0.0, 0.5]).unwrap();
        let (d, cond) = hankel_det_with_condition(&f, 1).unwrap();
        assert!((d - 0.5).abs() < 1e-15 && (cond - 2.0).abs() < 1e-12);
    }

    #[test]
    fn monic_orthogonal_examples() {
        let h = classical_moments(&ClassicalMeasure::Hermite, 40).unwrap();
        assert_eq!(monic_orthogonal(&h, 2).unwrap(), Polynomial::parse_strs(&["-1/2", "0", "1"]).unwrap());
        let c = classical_moments(&ClassicalMeasure::Chebyshev1, 10).unwrap();
        assert_eq!(monic_orthogonal(&c, 3).unwrap(), monic_chebyshev(3));
        assert_eq!(monic_orthogonal(&c, 0).unwrap(), Polynomial::one());
        for n in 0..15 {
            assert_eq!(monic_orthogonal(&h, n).unwrap(), monic_hermite(n));
        }
    }

    #[test]
    fn heine_agrees_with_hankel_solve() {
        let measures = [
            ClassicalMeasure::Hermite,
            ClassicalMeasure::Laguerre { alpha: q("1/2") },
            ClassicalMeasure::Jacobi { alpha: q("1"), beta: q("-1/3") },
            ClassicalMeasure::Chebyshev1,
        ];
        for m in &measures {
            let ms = classical_moments(m, 14).unwrap();
            for n in 0..=6 {
                assert_eq!(heine_polynomial(&ms, n).unwrap(), monic_orthogonal(&ms, n).unwrap(), "{m:?} n={n}");
                let h = hankel_minors(&ms, n).unwrap();
                if n > 0 {
                    assert_eq!(h.leading().clone(), hankel_det(&ms, n - 1).unwrap());
                }
            }
        }
    }

    #[test]
    fn orthogonality_and_positivity() {
        let measures = [
            ClassicalMeasure::Hermite,
            ClassicalMeasure::Laguerre { alpha: q("0") },
            ClassicalMeasure::legendre(),
            ClassicalMeasure::Chebyshev1,
        ];
        for m in &measures {
            let ms = classical_moments(m, 26).unwrap();
            let fam = OrthogonalFamily::new(&ms, 12).unwrap();
            for n in 0..=12 {
                assert!(hankel_det(&ms, n).unwrap().is_positive());
                for k in 0..n {
                    assert_eq!(ms.pair(fam.get(n).unwrap(), fam.get(k).unwrap()).unwrap(), q("0"));
                }
            }
            let scaled = ms.scaled(&q("7/3"));
            assert_eq!(monic_orthogonal(&scaled, 9).unwrap(), monic_orthogonal(&ms, 9).unwrap());
        }
    }

    #[test]
    fn detects_non_positive_definite() {
        let ms = MomentSequence::explicit(vec![q("1"), q("1"), q("1"), q("1"), q("1")]).unwrap();
        assert!(matches!(monic_orthogonal(&ms, 2), Err(Error::NotPositiveDefinite { index: 1 })));
    }

    #[test]
    fn measure_spec_json() {
        let s: MeasureSpec = serde_json::from_str(r#"{"type":"laguerre","alpha":"0"}"#).unwrap();
        assert_eq!(s, MeasureSpec::Laguerre { alpha: "0".into() });
        let s: MeasureSpec =
            serde_json::from_str(r#"{"type":"weight","expr":"exp(-x^2)/(1+x^2)","interval":["-inf","inf"]}"#).unwrap();
        assert!(!s.is_rational());
        let back: MeasureSpec = serde_json::from_str(&serde_json::to_string(&s).unwrap()).unwrap();
        assert_eq!(s, back);
    }

    #[test]
    fn signed_minors_give_coefficients() {
        let ms = classical_moments(&ClassicalMeasure::Laguerre { alpha: q("0") }, 8).unwrap();
        let p = monic_orthogonal(&ms, 3).unwrap();
        let h = hankel_minors(&ms, 3).unwrap();
        for i in 0..=3 {
            assert_eq!(h.signed(i) / h.leading().clone(), p.coeff(i));
        }
    }
}
