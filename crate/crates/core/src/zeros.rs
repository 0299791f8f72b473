//! Polynomial zeros by Aberth–Ehrlich iteration, and the zero-location
//! experiments for factorized operators.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rug::Complex as RugComplex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::moments::MomentSequence;
use crate::operator::FactorizedOperator;
use crate::poly::Polynomial;
use crate::scalar::{Extended, RealScalar, EXTENDED_PREC};
use crate::solver;

pub const MAX_SWEEPS: usize = 200;
pub const STEP_TOL: f64 = 1e-13;
/// Slack on the |root| ≤ R comparison.
pub const BOUND_TOL: f64 = 1e-8;
/// Extended-precision sweeps allowed after a failed double run.
pub const POLISH_SWEEPS: usize = 300;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RootSet {
    pub roots: Vec<Complex64>,
    /// max_k |p(z_k)| / Σ_i |a_i|·|z_k|^i (backward error).
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
}

impl RootSet {
    pub fn max_modulus(&self) -> f64 {
        self.roots.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

/// Roots of a real polynomial. Coefficients go through extended precision
/// and are scaled by the largest magnitude before rounding to doubles.
pub fn roots<T: RealScalar>(p: &Polynomial<T>, seed: u64) -> Result<RootSet> {
    let ext: Vec<Extended> = p.coeffs().iter().map(|c| c.to_extended()).collect();
    let coeffs = scaled_complex(&ext)?;
    aberth(&coeffs, seed)
}

/// Roots of a polynomial with complex double coefficients.
pub fn roots_complex(p: &Polynomial<Complex64>, seed: u64) -> Result<RootSet> {
    let big = p.coeffs().iter().map(|c| c.norm()).fold(0.0, f64::max);
    if big == 0.0 {
        return Err(Error::InvalidParameter("roots of the zero polynomial".into()));
    }
    let coeffs: Vec<Complex64> = p.coeffs().iter().map(|c| c / big).collect();
    aberth(&coeffs, seed)
}

fn scaled_complex(ext: &[Extended]) -> Result<Vec<Complex64>> {
    let mut big = rug::Float::with_val(EXTENDED_PREC, 0);
    for c in ext {
        let a = c.0.clone().abs();
        if a > big {
            big = a;
        }
    }
    if big.is_zero() {
        return Err(Error::InvalidParameter("roots of the zero polynomial".into()));
    }
    Ok(ext.iter().map(|c| Complex64::new((c.0.clone() / &big).to_f64(), 0.0)).collect())
}

/// Positive root of |a_d|x^d − Σ_{i<d} |a_i| x^i.
fn cauchy_radius(c: &[Complex64]) -> f64 {
    let d = c.len() - 1;
    let lead = c[d].norm();
    let b: Vec<f64> = c[..d].iter().map(|a| a.norm() / lead).collect();
    // divided by x^d so large x cannot overflow; increasing in x
    let f = |x: f64| 1.0 - b.iter().enumerate().map(|(i, bi)| bi * x.powi(i as i32 - d as i32)).sum::<f64>();
    let mut hi = 1.0 + b.iter().cloned().fold(0.0, f64::max);
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// p(z)/p′(z); for |z| > 1 the reversed polynomial is used to avoid overflow.
fn newton_ratio(c: &[Complex64], z: Complex64) -> Complex64 {
    let d = c.len() - 1;
    if z.norm() <= 1.0 {
        let mut p = c[d];
        let mut dp = Complex64::new(0.0, 0.0);
        for a in c[..d].iter().rev() {
            dp = dp * z + p;
            p = p * z + a;
        }
        if p == Complex64::new(0.0, 0.0) {
            return p;
        }
        p / dp
    } else {
        // p(z) = z^d q(w), w = 1/z, q(w) = Σ a_{d−i} w^i
        let w = z.inv();
        let mut q = c[0];
        let mut dq = Complex64::new(0.0, 0.0);
        for a in c[1..].iter() {
            dq = dq * w + q;
            q = q * w + a;
        }
        if q == Complex64::new(0.0, 0.0) {
            return q;
        }
        // p′/p = (d − w·q′/q)/z
        z / (Complex64::new(d as f64, 0.0) - w * dq / q)
    }
}

fn backward_error(c: &[Complex64], z: Complex64) -> f64 {
    let r = z.norm();
    let mut p = Complex64::new(0.0, 0.0);
    let mut s = 0.0;
    if r <= 1.0 {
        for a in c.iter().rev() {
            p = p * z + a;
            s = s * r + a.norm();
        }
    } else {
        // same ratio via the reversed polynomial in w = 1/z
        let w = z.inv();
        for a in c.iter() {
            p = p * w + a;
            s = s / r + a.norm();
        }
    }
    if s == 0.0 || !p.is_finite() {
        if p.is_finite() {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        p.norm() / s
    }
}

fn initial_circle(c: &[Complex64], d: usize, seed: u64) -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let phase: f64 = rng.gen::<f64>() * std::f64::consts::TAU;
    let radius = 0.8 * cauchy_radius(c);
    (0..d).map(|k| Complex64::from_polar(radius, phase + std::f64::consts::TAU * k as f64 / d as f64)).collect()
}

fn aberth(coeffs: &[Complex64], seed: u64) -> Result<RootSet> {
    let mut c: Vec<Complex64> = coeffs.to_vec();
    while c.last().is_some_and(|a| *a == Complex64::new(0.0, 0.0)) {
        c.pop();
    }
    if c.len() < 2 {
        return Err(Error::InvalidParameter("root finding needs degree >= 1".into()));
    }
    let zeros_at_origin = c.iter().take_while(|a| **a == Complex64::new(0.0, 0.0)).count();
    let c = c.split_off(zeros_at_origin);
    let mut roots = vec![Complex64::new(0.0, 0.0); zeros_at_origin];
    let d = c.len() - 1;
    if d == 0 {
        return Ok(RootSet { roots, residual: 0.0, iterations: 0, converged: true });
    }
    let mut z = initial_circle(&c, d, seed);
    let mut done = vec![false; d];
    let mut iterations = 0;
    while iterations < MAX_SWEEPS && done.iter().any(|f| !f) {
        iterations += 1;
        for k in 0..d {
            if done[k] {
                continue;
            }
            let ratio = newton_ratio(&c, z[k]);
            let s: Complex64 = (0..d).filter(|&j| j != k).map(|j| (z[k] - z[j]).inv()).sum();
            let w = ratio / (Complex64::new(1.0, 0.0) - ratio * s);
            let w = if w.is_finite() { w } else { Complex64::new(0.0, 0.0) };
            z[k] -= w;
            if w.norm() < STEP_TOL * (1.0 + z[k].norm()) {
                done[k] = true;
            }
        }
    }
    let converged = done.iter().all(|f| *f);
    let residual = z.iter().map(|&r| backward_error(&c, r)).fold(0.0, f64::max);
    roots.extend(z);
    Ok(RootSet { roots, residual, iterations, converged })
}

/// Further Aberth sweeps at extended precision on the exact coefficients.
/// Used for ill-conditioned high-degree polynomials.
pub fn polish<T: RealScalar>(p: &Polynomial<T>, rs: &RootSet, max_sweeps: usize) -> RootSet {
    let prec = EXTENDED_PREC;
    let coeffs: Vec<RugComplex> =
        p.coeffs().iter().map(|c| RugComplex::with_val(prec, (c.to_extended().0, 0))).collect();
    let d = coeffs.len().saturating_sub(1);
    if d == 0 || rs.roots.len() != d {
        return rs.clone();
    }
    // every root lies inside the Cauchy radius; anything outside is restarted
    let fc: Vec<Complex64> = coeffs.iter().map(|a| Complex64::new(a.real().to_f64(), 0.0)).collect();
    let big = fc.iter().map(|a| a.norm()).fold(0.0, f64::max);
    let fc: Vec<Complex64> = fc.iter().map(|a| a / big).collect();
    let bound = cauchy_radius(&fc) * (1.0 + 1e-6);
    let restart = initial_circle(&fc, d, 0);
    let mut z: Vec<RugComplex> = rs
        .roots
        .iter()
        .zip(&restart)
        .map(|(r, fresh)| {
            let r = if r.is_finite() && r.norm() <= bound { r } else { fresh };
            RugComplex::with_val(prec, (r.re, r.im))
        })
        .collect();
    let tol = rug::Float::with_val(prec, 1e-60);
    let mut done = vec![false; d];
    let mut sweeps = 0;
    while sweeps < max_sweeps && done.iter().any(|f| !f) {
        sweeps += 1;
        for k in 0..d {
            if done[k] {
                continue;
            }
            let mut pv = coeffs[d].clone();
            let mut dp = RugComplex::with_val(prec, 0);
            for a in coeffs[..d].iter().rev() {
                dp = dp * &z[k] + &pv;
                pv = pv * &z[k] + a;
            }
            if pv.is_zero() {
                done[k] = true;
                continue;
            }
            let ratio = pv / dp;
            let mut s = RugComplex::with_val(prec, 0);
            for j in 0..d {
                if j != k {
                    let diff = RugComplex::with_val(prec, &z[k] - &z[j]);
                    if diff.is_zero() {
                        continue;
                    }
                    s += diff.recip();
                }
            }
            let denom = RugComplex::with_val(prec, 1) - RugComplex::with_val(prec, &ratio * &s);
            let w = ratio / denom;
            if !w.real().is_finite() || !w.imag().is_finite() {
                continue;
            }
            z[k] -= &w;
            let step = w.abs().real().clone();
            let size = z[k].clone().abs().real().clone() + 1u32;
            if step < tol.clone() * size {
                done[k] = true;
            }
        }
    }
    let roots: Vec<Complex64> = z.iter().map(|r| Complex64::new(r.real().to_f64(), r.imag().to_f64())).collect();
    let residual = roots.iter().map(|&r| backward_error(&fc, r)).fold(0.0, f64::max);
    RootSet { roots, residual, iterations: rs.iterations + sweeps, converged: done.iter().all(|f| *f) }
}

/// Double-precision Aberth, falling back to extended-precision sweeps when
/// the double run stalls or leaves a large backward error.
pub fn roots_robust<T: RealScalar>(p: &Polynomial<T>, seed: u64) -> Result<RootSet> {
    let rs = roots(p, seed)?;
    if rs.converged && rs.residual <= 1e-12 {
        return Ok(rs);
    }
    let stripped = rs.roots.iter().filter(|z| **z == Complex64::new(0.0, 0.0)).count();
    if stripped > 0 {
        // polish works on the full coefficient list; keep exact zeros aside
        let k = p.coeffs().iter().take_while(|c| c.is_zero()).count();
        let q = Polynomial::new(p.coeffs()[k..].to_vec());
        let inner = RootSet { roots: rs.roots[k..].to_vec(), ..rs.clone() };
        let mut out = polish(&q, &inner, POLISH_SWEEPS);
        let mut all = rs.roots[..k].to_vec();
        all.append(&mut out.roots);
        out.roots = all;
        return Ok(out);
    }
    Ok(polish(p, &rs, POLISH_SWEEPS))
}

/// |Σ z_k + a_{d−1}/a_d| relative to max(1, Σ|z_k|).
pub fn vieta_error(p: &Polynomial<Complex64>, rs: &RootSet) -> f64 {
    let d = p.coeffs().len() - 1;
    let target = -p.coeffs()[d - 1] / p.coeffs()[d];
    let sum: Complex64 = rs.roots.iter().sum();
    let scale = rs.roots.iter().map(|z| z.norm()).sum::<f64>().max(1.0);
    (sum - target).norm() / scale
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroBoundRow {
    pub n: usize,
    pub max_modulus: f64,
    #[serde(rename = "R")]
    pub r: f64,
    pub pass: bool,
    pub roots: Vec<Complex64>,
}

/// For each n in the range, builds Q_n (unique when the partial sums are
/// nonnegative, otherwise pinned by `constraints(n)`), and compares the
/// largest root modulus with R = 3^M·d. Constraint points enlarge the hull.
pub fn zero_bound_check<T: RealScalar>(
    fop: &FactorizedOperator,
    ms: &MomentSequence<T>,
    n_range: std::ops::RangeInclusive<usize>,
    constraints: &dyn Fn(usize) -> Option<Vec<T>>,
    seed: u64,
) -> Result<Vec<ZeroBoundRow>> {
    let op = fop.expand()?;
    let mut rows = Vec::new();
    for n in n_range {
        let pts = constraints(n);
        let q = match &pts {
            Some(p) => solver::unique_with_constraints(&op, ms, n, p)?,
            None => {
                let sol = solver::solve_index(&op, ms, n)?;
                if !sol.kernel_basis.is_empty() {
                    return Err(Error::Precondition(format!(
                        "Q_{n} is not unique and no interpolation points were given"
                    )));
                }
                sol.particular.ok_or_else(|| Error::NoSolution(format!("no degree-{n} solution")))?
            }
        };
        let extra: Vec<f64> = pts.iter().flatten().map(|t| t.to_f64()).collect();
        let bound = fop.hull_and_bound(&extra)?;
        let rs = if q.degree().unwrap_or(0) >= 1 {
            roots_robust(&q, seed)?
        } else {
            RootSet { roots: vec![], residual: 0.0, iterations: 0, converged: true }
        };
        let max_modulus = rs.max_modulus();
        rows.push(ZeroBoundRow {
            n,
            max_modulus,
            r: bound.r,
            pass: max_modulus <= bound.r + BOUND_TOL,
            roots: rs.roots,
        });
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CircleTest {
    pub bound: f64,
    pub max_modulus: f64,
    pub pass: bool,
}

/// F = iterated antiderivative of p, the j-th integration starting at
/// `base_points[j]`; all roots of F must lie in |z| ≤ 3^{len}·r.
pub fn iterated_integral_circle_test(
    p: &Polynomial<Complex64>,
    base_points: &[Complex64],
    r: f64,
    seed: u64,
) -> Result<CircleTest> {
    let slack = 1e-9 * (1.0 + r);
    if let Some(z) = base_points.iter().find(|z| z.norm() > r + slack) {
        return Err(Error::Precondition(format!("base point {z} outside |z| <= {r}")));
    }
    if p.degree().unwrap_or(0) >= 1 {
        let rs = roots_complex(p, seed)?;
        if rs.max_modulus() > r + 1e-6 * (1.0 + r) {
            return Err(Error::Precondition(format!("p has a root of modulus {} > {r}", rs.max_modulus())));
        }
    }
    let f = base_points.iter().fold(p.clone(), |acc, c| acc.antiderivative_from(c));
    let bound = 3f64.powi(base_points.len() as i32) * r;
    let max_modulus = if f.degree().unwrap_or(0) >= 1 { roots_complex(&f, seed)?.max_modulus() } else { 0.0 };
    Ok(CircleTest { bound, max_modulus, pass: max_modulus <= bound + BOUND_TOL })
}

/// The randomized suite: `cases` polynomials of degree ≤ 8 with roots in the
/// unit disk and 1–3 base points in the unit disk. Returns the failures.
pub fn random_circle_suite(cases: usize, seed: u64) -> Result<Vec<(usize, CircleTest)>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let disk = |rng: &mut ChaCha8Rng| {
        let r: f64 = rng.gen::<f64>().sqrt();
        Complex64::from_polar(r, rng.gen::<f64>() * std::f64::consts::TAU)
    };
    let mut failures = Vec::new();
    for case in 0..cases {
        let deg = rng.gen_range(1..=8);
        let rts: Vec<Complex64> = (0..deg).map(|_| disk(&mut rng)).collect();
        let p = Polynomial::from_roots(&rts);
        let nb = rng.gen_range(1..=3);
        let base: Vec<Complex64> = (0..nb).map(|_| disk(&mut rng)).collect();
        let t = iterated_integral_circle_test(&p, &base, 1.0, seed.wrapping_add(case as u64))?;
        if !t.pass {
            failures.push((case, t));
        }
    }
    Ok(failures)
}
