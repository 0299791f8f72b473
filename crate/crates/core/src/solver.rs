//! Solution sets of L[y] = λ_n·P_n, normality of indices, interpolating
//! constraints, and the difference systems that classify admissible measures.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Signed;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, Mat};
use crate::moments::{
    classical_moments, hankel_minors, monic_orthogonal, ClassicalMeasure, MomentSequence, OrthogonalFamily,
};
use crate::operator::{falling_factorial, ExactlySolvableOperator};
use crate::oracle;
use crate::poly::Polynomial;
use crate::scalar::{rational_to_string, Rational, RealScalar, Scalar};

/// Relative zero threshold for floating decisions.
pub const FLOAT_TOL: f64 = 1e-8;
/// Relative gaps between `FLOAT_TOL` and this are reported as indeterminate.
pub const INDETERMINATE_TOL: f64 = 1e-6;

mod rational_str {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(q: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&rational_to_string(q))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        crate::scalar::rational_from_str(&s).map_err(serde::de::Error::custom)
    }
}

/// Monic particular solution of L[y] = λ_n·P_n plus the monic kernel basis of
/// L restricted to polynomials of degree ≤ n.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct SolutionSet<T: Scalar> {
    pub n: usize,
    #[serde(with = "rational_str")]
    pub lambda_n: Rational,
    pub p_n: Polynomial<T>,
    /// Chosen orthogonal (in L²(μ)) to the kernel, so zero kernel coefficients
    /// give the canonical member.
    pub particular: Option<Polynomial<T>>,
    /// Monic, strictly increasing degrees.
    pub kernel_basis: Vec<Polynomial<T>>,
    /// Largest relative residual of ∫L[Q]·x^j dμ, j < n, over the checked members.
    pub certificate: f64,
}

impl<T: Scalar> SolutionSet<T> {
    /// Dimension of the space of solutions of degree ≤ n.
    pub fn dimension(&self) -> usize {
        self.kernel_basis.len() + usize::from(self.particular.is_some())
    }

    /// Some member has exact degree n.
    pub fn has_degree_n_member(&self) -> bool {
        self.particular.is_some() || self.kernel_basis.iter().any(|k| k.degree() == Some(self.n))
    }
}

pub fn solve_index<T: RealScalar>(
    op: &ExactlySolvableOperator,
    ms: &MomentSequence<T>,
    n: usize,
) -> Result<SolutionSet<T>> {
    ms.require(2 * n + 1)?;
    let p_n = monic_orthogonal(ms, n)?;
    solve_with(op, ms, n, p_n)
}

/// As [`solve_index`] with P_n supplied by the caller.
pub fn solve_with<T: RealScalar>(
    op: &ExactlySolvableOperator,
    ms: &MomentSequence<T>,
    n: usize,
    p_n: Polynomial<T>,
) -> Result<SolutionSet<T>> {
    let lambda = op.lambda(n);
    let a: Mat<T> = op.build_matrix(n).dense().iter().map(|r| r.iter().map(T::from_rational).collect()).collect();
    let rr = linalg::rref(&a);
    let kernel_basis: Vec<Polynomial<T>> = rr.nullspace().into_iter().map(Polynomial::new).collect();
    let particular = if lambda.is_zero() {
        None
    } else {
        let lam = T::from_rational(&lambda);
        let rhs: Vec<T> = (0..=n).map(|i| p_n.coeff(i) * lam.clone()).collect();
        let c = linalg::mat_vec(&rr.e, &rhs);
        let rhs_max = rhs.iter().map(Scalar::magnitude).fold(0.0, f64::max);
        let consistent = (rr.rank()..=n).all(|i| {
            // bound by ‖b‖∞ so noise in a vanishing coefficient of P_n reads as zero
            let scale: f64 = rr.e[i].iter().map(Scalar::magnitude).sum::<f64>() * rhs_max;
            c[i].is_negligible(scale, FLOAT_TOL)
        });
        if consistent {
            let mut y = vec![T::zero(); n + 1];
            for (row, &pc) in rr.pivots.iter().enumerate() {
                y[pc] = c[row].clone();
            }
            Some(orthogonalize(Polynomial::new(y), &kernel_basis, ms))
        } else {
            None
        }
    };
    let mut members: Vec<Polynomial<T>> = kernel_basis.clone();
    if let Some(p) = &particular {
        members.push(p.clone());
        members.push(kernel_basis.iter().fold(p.clone(), |acc, k| acc.add(k)));
    }
    let mut certificate: f64 = 0.0;
    for q in &members {
        let lq = op.apply(q);
        for j in 0..n {
            let t = lq.shift(j);
            let v = ms.integrate(&t)?;
            let scale = ms.integrate_abs(&t);
            let rel = if scale == 0.0 { v.magnitude() } else { v.magnitude() / scale };
            certificate = certificate.max(rel);
        }
    }
    Ok(SolutionSet { n, lambda_n: lambda, p_n, particular, kernel_basis, certificate })
}

fn orthogonalize<T: RealScalar>(y: Polynomial<T>, kernel: &[Polynomial<T>], ms: &MomentSequence<T>) -> Polynomial<T> {
    if kernel.is_empty() {
        return y;
    }
    let gram: Option<Mat<T>> =
        kernel.iter().map(|a| kernel.iter().map(|b| ms.pair(a, b).ok()).collect::<Option<Vec<T>>>()).collect();
    let rhs: Option<Vec<T>> = kernel.iter().map(|k| ms.pair(&y, k).ok()).collect();
    match (gram, rhs) {
        (Some(g), Some(r)) => match linalg::solve(&g, &r) {
            Some(c) => kernel.iter().zip(&c).fold(y, |acc, (k, ci)| acc.sub(&k.scale(ci))),
            None => y,
        },
        _ => y,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Normal,
    NotNormal,
    Indeterminate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    /// deg L[x^k] = k for every k ≤ n.
    I,
    /// Some k ≤ n has deg L[x^k] < k.
    Ii,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalityReport {
    pub n: usize,
    pub verdict: Verdict,
    pub branch: Branch,
    /// Indexes k ≤ n with deg L[x^k] < k.
    pub drop_indexes: Vec<usize>,
    /// rank{L[1], …, L[x^{n_k}]} = n_k; absent in branch i.
    pub rank_condition_ok: Option<bool>,
    /// b_{n_k} + Σ γ_i b_{n_k+i} ≠ 0; absent unless n_k < n.
    pub moment_condition_ok: Option<bool>,
    pub gamma: Vec<String>,
    /// Σ γ_i b_{n_k+i}.
    pub moment_lhs: Option<String>,
    /// −b_{n_k}.
    pub moment_rhs: Option<String>,
    /// |lhs − rhs| relative to the size of the terms (floating mode).
    pub moment_relative_gap: Option<f64>,
    pub oracle_verdict: Verdict,
    pub oracle_dimension: usize,
}

/// Decides whether n is a normal index by the rank and moment conditions,
/// and records the brute-force dimension count alongside.
pub fn normality_report<T: RealScalar>(
    op: &ExactlySolvableOperator,
    ms: &MomentSequence<T>,
    n: usize,
) -> Result<NormalityReport> {
    let p_n = monic_orthogonal(ms, n)?;
    normality_report_with(op, n, &p_n)
}

pub fn normality_report_with<T: RealScalar>(
    op: &ExactlySolvableOperator,
    n: usize,
    p_n: &Polynomial<T>,
) -> Result<NormalityReport> {
    let mat = op.build_matrix(n);
    let dense = mat.dense();
    let oracle_dimension = oracle::solution_space_dimension(&dense, p_n);
    let oracle_verdict = if oracle_dimension == 1 { Verdict::Normal } else { Verdict::NotNormal };
    let drop_indexes: Vec<usize> = (0..=n).filter(|&k| mat.entry(k, k).is_zero()).collect();
    let mut report = NormalityReport {
        n,
        verdict: Verdict::Normal,
        branch: Branch::I,
        drop_indexes: drop_indexes.clone(),
        rank_condition_ok: None,
        moment_condition_ok: None,
        gamma: Vec::new(),
        moment_lhs: None,
        moment_rhs: None,
        moment_relative_gap: None,
        oracle_verdict,
        oracle_dimension,
    };
    let Some(&nk) = drop_indexes.last() else {
        return Ok(report);
    };
    report.branch = Branch::Ii;
    let block: Mat<Rational> = dense[..=nk].iter().map(|r| r[..=nk].to_vec()).collect();
    let rank_ok = linalg::rank(&block) == nk;
    report.rank_condition_ok = Some(rank_ok);
    if nk == n {
        report.verdict = if rank_ok { Verdict::Normal } else { Verdict::NotNormal };
        return Ok(report);
    }
    // γ·B = −(a_{n_k, n_k+1}, …, a_{n_k, n}); B is upper triangular with
    // nonzero diagonal λ_{n_k+1}, …, λ_n.
    let s = n - nk;
    let mut gamma: Vec<Rational> = Vec::with_capacity(s);
    for j in 0..s {
        let col = nk + 1 + j;
        let mut acc = -mat.entry(nk, col);
        for (i, g) in gamma.iter().enumerate() {
            acc -= g * mat.entry(nk + 1 + i, col);
        }
        gamma.push(acc / mat.entry(col, col));
    }
    let b = |i: usize| p_n.coeff(i);
    let terms: Vec<T> = gamma.iter().enumerate().map(|(i, g)| T::from_rational(g) * b(nk + 1 + i)).collect();
    let lhs = terms.iter().fold(T::zero(), |acc, t| acc + t.clone());
    let rhs = -b(nk);
    let diff = lhs.clone() - rhs.clone();
    let moment_ok = if T::is_exact() {
        Some(!diff.is_zero())
    } else {
        let gsum: f64 = gamma.iter().map(|g| g.to_f64().abs()).sum();
        let scale = (1.0 + gsum) * p_n.norm_inf();
        let gap = if scale == 0.0 { 0.0 } else { diff.magnitude() / scale };
        report.moment_relative_gap = Some(gap);
        if gap <= FLOAT_TOL {
            Some(false)
        } else if gap <= INDETERMINATE_TOL {
            None
        } else {
            Some(true)
        }
    };
    report.gamma = gamma.iter().map(rational_to_string).collect();
    report.moment_lhs = Some(lhs.to_json_string());
    report.moment_rhs = Some(rhs.to_json_string());
    report.moment_condition_ok = moment_ok;
    report.verdict = match (rank_ok, moment_ok) {
        (false, _) => Verdict::NotNormal,
        (true, Some(true)) => Verdict::Normal,
        (true, Some(false)) => Verdict::NotNormal,
        (true, None) => Verdict::Indeterminate,
    };
    Ok(report)
}

/// The member of the solution set whose free kernel part vanishes at the
/// given points (a repeated point imposes derivative conditions).
///
/// With an empty kernel the unique solution is returned and the points are
/// ignored. Without a particular solution, the degree-n kernel element plays
/// its role and the lower kernel elements are the free part.
pub fn unique_with_constraints<T: RealScalar>(
    op: &ExactlySolvableOperator,
    ms: &MomentSequence<T>,
    n: usize,
    points: &[T],
) -> Result<Polynomial<T>> {
    let sol = solve_index(op, ms, n)?;
    let (base, free): (Polynomial<T>, Vec<Polynomial<T>>) = match sol.particular {
        Some(p) => (p, sol.kernel_basis),
        None => {
            let mut k = sol.kernel_basis;
            match k.last() {
                Some(top) if top.degree() == Some(n) => {
                    let top = k.pop().expect("nonempty");
                    (top, k)
                }
                _ => return Err(Error::NoSolution(format!("no solution of degree {n}"))),
            }
        }
    };
    if free.is_empty() {
        return Ok(base);
    }
    if points.len() != free.len() {
        return Err(Error::WrongPointCount { expected: free.len(), got: points.len() });
    }
    // confluent rows: the d-th repetition of a point asks for the d-th derivative
    let mut rows: Mat<T> = Vec::new();
    let mut rhs: Vec<T> = Vec::new();
    for (idx, p) in points.iter().enumerate() {
        let order = points[..idx].iter().filter(|q| *q == p).count();
        rows.push(free.iter().map(|k| k.differentiate(order).evaluate(p)).collect());
        rhs.push(-base.differentiate(order).evaluate(p));
    }
    let det = linalg::determinant(&rows);
    let singular = if T::is_exact() {
        det.is_zero()
    } else {
        let hadamard: f64 = rows.iter().map(|r| r.iter().map(|v| v.magnitude().powi(2)).sum::<f64>().sqrt()).product();
        det.magnitude() <= FLOAT_TOL * hadamard
    };
    if singular {
        return Err(Error::NotInterpolating);
    }
    let c = linalg::solve(&rows, &rhs).ok_or(Error::NotInterpolating)?;
    Ok(free.iter().zip(&c).fold(base, |acc, (k, ci)| acc.add(&k.scale(ci))))
}

/// One term c(n)·(±Δ_{n_j,i})·μ_{n+v} of a difference equation; the sign
/// (−1)^{i+n_j} is folded into `coeff`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemTerm {
    pub v: i64,
    pub i: usize,
    pub coeff: Polynomial<Rational>,
}

/// A concrete equation for a small n where some μ_{n+v} would have negative index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InitialEquation {
    pub n: usize,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DifferenceEquation {
    /// The exceptional index this equation comes from.
    pub n_j: usize,
    /// Normalized form: common factor in n removed, primitive integer content.
    pub terms: Vec<SystemTerm>,
    /// ∫L[x^n]·Δ_{n_j,n_j}P_{n_j} dμ expanded in moments.
    pub raw_terms: Vec<SystemTerm>,
    /// Common factor removed from `raw_terms`.
    pub common_factor: Polynomial<Rational>,
    pub valid_from: usize,
    pub excluded: Vec<usize>,
    pub initial: Vec<InitialEquation>,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DifferenceSystem {
    pub operator: ExactlySolvableOperator,
    /// S = {n : λ_n = 0}.
    pub exceptional: Vec<usize>,
    pub equations: Vec<DifferenceEquation>,
}

impl DifferenceSystem {
    /// One line per equation followed by its initial instances.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for eq in &self.equations {
            let _ = writeln!(out, "{}", eq.text);
            for init in &eq.initial {
                let _ = writeln!(out, "{}", init.text);
            }
        }
        out
    }
}

fn minor_symbol(n_j: usize, i: usize) -> Option<String> {
    match n_j {
        0 => None,
        1 => Some(if i == 0 { "mu[1]".into() } else { "mu[0]".into() }),
        _ => Some(format!("D[{n_j},{i}]")),
    }
}

fn index_symbol(v: i64) -> String {
    match v {
        0 => "n".into(),
        v if v > 0 => format!("n+{v}"),
        v => format!("n{v}"),
    }
}

fn render_npoly(p: &Polynomial<Rational>) -> String {
    let mut s = String::new();
    for (k, c) in p.coeffs().iter().enumerate().rev() {
        if c.is_zero() {
            continue;
        }
        let neg = c.is_negative();
        let mag = Signed::abs(c);
        if s.is_empty() {
            if neg {
                s.push('-');
            }
        } else {
            s.push(if neg { '-' } else { '+' });
        }
        let num = rational_to_string(&mag);
        match k {
            0 => s.push_str(&num),
            _ => {
                if mag != Rational::from_integer(1.into()) {
                    s.push_str(&num);
                    s.push('*');
                }
                s.push('n');
                if k > 1 {
                    let _ = write!(s, "^{k}");
                }
            }
        }
    }
    if s.is_empty() {
        s.push('0');
    }
    s
}

/// Renders Σ terms = 0 given (sign-carrying coefficient text, factors) pairs.
fn render_sum(parts: &[(bool, String, Vec<String>)]) -> String {
    let mut s = String::new();
    for (idx, (neg, coeff, factors)) in parts.iter().enumerate() {
        if idx == 0 {
            if *neg {
                s.push('-');
            }
        } else {
            s.push_str(if *neg { " - " } else { " + " });
        }
        let mut f: Vec<String> = Vec::new();
        if !coeff.is_empty() {
            f.push(coeff.clone());
        }
        f.extend(factors.iter().cloned());
        s.push_str(&f.join("*"));
    }
    s.push_str(" = 0");
    s
}

fn term_part(t: &SystemTerm, n_j: usize) -> (bool, String, Vec<String>) {
    let lead = t.coeff.leading().cloned().unwrap_or_else(Rational::zero);
    let neg = lead.is_negative();
    let mag = if neg { t.coeff.scale(&-Rational::one()) } else { t.coeff.clone() };
    let nonzero = mag.coeffs().iter().filter(|c| !c.is_zero()).count();
    let coeff = if mag.degree() == Some(0) && mag.coeffs()[0] == Rational::from_integer(1.into()) {
        String::new()
    } else if nonzero > 1 {
        format!("({})", render_npoly(&mag))
    } else {
        render_npoly(&mag)
    };
    let mut factors: Vec<String> = minor_symbol(n_j, t.i).into_iter().collect();
    factors.push(format!("mu[{}]", index_symbol(t.v)));
    (neg, coeff, factors)
}

/// Clears denominators and divides by the integer content.
fn primitive(polys: &mut [Polynomial<Rational>]) {
    let mut lcm = BigInt::from(1);
    let mut gcd = BigInt::from(0);
    for p in polys.iter() {
        for c in p.coeffs() {
            lcm = lcm.lcm(c.denom());
        }
    }
    for p in polys.iter() {
        for c in p.coeffs() {
            let num = (c * Rational::from_integer(lcm.clone())).to_integer();
            gcd = gcd.gcd(&num);
        }
    }
    if gcd == BigInt::from(0) {
        return;
    }
    let f = Rational::new(lcm, gcd);
    for p in polys.iter_mut() {
        *p = p.scale(&f);
    }
}

/// Orders terms by descending v then descending i, and flips the overall
/// sign so the first term's leading coefficient is positive.
fn orient(terms: &mut [SystemTerm]) {
    terms.sort_by(|a, b| b.v.cmp(&a.v).then(b.i.cmp(&a.i)));
    if let Some(first) = terms.first() {
        if first.coeff.leading().is_some_and(|c| c.is_negative()) {
            for t in terms.iter_mut() {
                t.coeff = t.coeff.scale(&-Rational::one());
            }
        }
    }
}

fn nonnegative_integer_roots(p: &Polynomial<Rational>) -> Vec<usize> {
    let Some(lead) = p.leading().cloned() else { return Vec::new() };
    if p.degree() == Some(0) {
        return Vec::new();
    }
    let bound = p.coeffs().iter().map(|c| (c / &lead).to_f64().abs()).fold(0.0, f64::max) + 1.0;
    (0..=bound.ceil() as usize).filter(|&k| p.evaluate(&Rational::from_integer(k.into())).is_zero()).collect()
}

/// The moment equations ∫L[x^n]·P_{n_j} dμ = 0 (n ∉ S) for every
/// exceptional index n_j, with coefficients as polynomials in n.
pub fn generate_systq(op: &ExactlySolvableOperator) -> DifferenceSystem {
    let s = op.exceptional_indexes();
    let m = op.order() as i64;
    let equations = s
        .iter()
        .map(|&n_j| {
            let mut raw: Vec<SystemTerm> = Vec::new();
            for i in 0..=n_j {
                let sign = if (i + n_j) % 2 == 0 { Rational::one() } else { -Rational::one() };
                for v in (i as i64 - m)..=(i as i64) {
                    // q_{v,i}(n) = Σ_k ρ_{k, v−i+k}·(n)_k
                    let mut q = Polynomial::<Rational>::zero();
                    for k in 0..=op.order() {
                        let u = v - i as i64 + k as i64;
                        if u < 0 {
                            continue;
                        }
                        let r = op.rho_coeff(k, u as usize);
                        if !r.is_zero() {
                            q = q.add(&falling_factorial(k).scale(&r));
                        }
                    }
                    if !q.is_zero() {
                        raw.push(SystemTerm { v, i, coeff: q.scale(&sign) });
                    }
                }
            }
            build_equation(n_j, raw, &s)
        })
        .collect();
    DifferenceSystem { operator: op.clone(), exceptional: s, equations }
}

fn build_equation(n_j: usize, mut raw: Vec<SystemTerm>, s: &[usize]) -> DifferenceEquation {
    orient(&mut raw);
    let g = raw.iter().fold(Polynomial::<Rational>::zero(), |acc, t| acc.gcd(&t.coeff));
    let g = if g.is_zero() { Polynomial::one() } else { g };
    let mut polys: Vec<Polynomial<Rational>> =
        raw.iter().map(|t| t.coeff.div_exact(&g).expect("gcd divides every coefficient")).collect();
    primitive(&mut polys);
    let mut terms: Vec<SystemTerm> =
        raw.iter().zip(polys).map(|(t, p)| SystemTerm { v: t.v, i: t.i, coeff: p }).collect();
    orient(&mut terms);
    let mut valid_from = terms.iter().map(|t| (-t.v).max(0) as usize).max().unwrap_or(0);
    while s.contains(&valid_from) {
        valid_from += 1;
    }
    let mut excluded: Vec<usize> =
        s.iter().cloned().chain(nonnegative_integer_roots(&g)).filter(|&k| k > valid_from).collect();
    excluded.sort_unstable();
    excluded.dedup();
    let mut text = render_sum(&terms.iter().map(|t| term_part(t, n_j)).collect::<Vec<_>>());
    let _ = write!(text, " for n >= {valid_from}");
    for k in &excluded {
        let _ = write!(text, ", n != {k}");
    }
    let initial = (0..valid_from).filter(|n| !s.contains(n)).filter_map(|n| initial_instance(n_j, &raw, n)).collect();
    DifferenceEquation { n_j, terms, raw_terms: raw, common_factor: g, valid_from, excluded, initial, text }
}

fn initial_instance(n_j: usize, raw: &[SystemTerm], n: usize) -> Option<InitialEquation> {
    let nq = Rational::from_integer(n.into());
    let mut inst: Vec<SystemTerm> = raw
        .iter()
        .filter(|t| n as i64 + t.v >= 0)
        .map(|t| SystemTerm { v: t.v, i: t.i, coeff: Polynomial::constant(t.coeff.evaluate(&nq)) })
        .filter(|t| !t.coeff.is_zero())
        .collect();
    if inst.is_empty() {
        return None;
    }
    let mut polys: Vec<Polynomial<Rational>> = inst.iter().map(|t| t.coeff.clone()).collect();
    primitive(&mut polys);
    for (t, p) in inst.iter_mut().zip(polys) {
        t.coeff = p;
    }
    orient(&mut inst);
    let parts: Vec<(bool, String, Vec<String>)> = inst
        .iter()
        .map(|t| {
            let (neg, coeff, mut factors) = term_part(t, n_j);
            factors.pop();
            factors.push(format!("mu[{}]", n as i64 + t.v));
            (neg, coeff, factors)
        })
        .collect();
    Some(InitialEquation { n, text: render_sum(&parts) })
}

/// Value of the raw equation for `n_j` at a concrete n, and the sum of the
/// magnitudes of its terms. Terms with n + v < 0 are dropped.
pub fn evaluate_equation<T: Scalar>(eq: &DifferenceEquation, ms: &MomentSequence<T>, n: usize) -> Result<(T, f64)> {
    let minors = hankel_minors(ms, eq.n_j)?;
    let nq = Rational::from_integer(n.into());
    let mut acc = T::zero();
    let mut scale = 0.0;
    for t in &eq.raw_terms {
        let idx = n as i64 + t.v;
        if idx < 0 {
            continue;
        }
        let c = T::from_rational(&t.coeff.evaluate(&nq));
        let term = c * minors.minors[t.i].clone() * ms.get(idx as usize)?.clone();
        scale += term.magnitude();
        acc = acc + term;
    }
    Ok((acc, scale))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MembershipViolation {
    pub n_j: usize,
    pub n: usize,
    pub value: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MembershipReport {
    pub pass: bool,
    /// Largest n checked (limited by the horizon and the moments available).
    pub checked_up_to: Option<usize>,
    pub first_violation: Option<MembershipViolation>,
}

/// Checks every equation for n ≤ horizon, n ∉ S.
pub fn check_membership<T: Scalar>(
    ds: &DifferenceSystem,
    ms: &MomentSequence<T>,
    horizon: usize,
) -> Result<MembershipReport> {
    let mut checked_up_to = None;
    for n in 0..=horizon {
        if ds.exceptional.contains(&n) {
            continue;
        }
        let mut all_available = true;
        for eq in &ds.equations {
            let top = eq.raw_terms.iter().map(|t| t.v).max().unwrap_or(0);
            if n as i64 + top >= ms.len() as i64 || 2 * eq.n_j > ms.len() {
                all_available = false;
                continue;
            }
            let (value, scale) = evaluate_equation(eq, ms, n)?;
            if !value.is_negligible(scale, FLOAT_TOL) {
                return Ok(MembershipReport {
                    pass: false,
                    checked_up_to,
                    first_violation: Some(MembershipViolation { n_j: eq.n_j, n, value: value.to_json_string() }),
                });
            }
        }
        if !all_available {
            break;
        }
        checked_up_to = Some(n);
    }
    Ok(MembershipReport { pass: true, checked_up_to, first_violation: None })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExistenceReport {
    /// Largest n with ∫P_n dμ* ≠ 0; absent when the value at the horizon is nonzero.
    pub threshold: Option<usize>,
    pub values: Vec<String>,
    pub vanishing: Vec<bool>,
}

/// ∫P_n dμ* for n ≤ `n_max`, with P_n orthogonal for `ms` and μ* classical.
pub fn classical_existence<T: RealScalar>(
    star: &ClassicalMeasure,
    ms: &MomentSequence<T>,
    n_max: usize,
) -> Result<ExistenceReport> {
    let fam = OrthogonalFamily::new(ms, n_max)?;
    let star_m = classical_moments(star, 2 * n_max + 1)?.map(T::from_rational);
    let mu0 = star_m.values()[0].to_f64().abs();
    let mut values = Vec::new();
    let mut vanishing = Vec::new();
    for n in 0..=n_max {
        let p = fam.get(n)?;
        let v = star_m.integrate(p)?;
        // |∫x^k dμ*| ≤ √(μ*_0·μ*_2k), so this scale stays away from zero
        let scale: f64 = p
            .coeffs()
            .iter()
            .enumerate()
            .map(|(k, c)| c.to_f64().abs() * (mu0 * star_m.values()[2 * k].to_f64().abs()).sqrt())
            .sum();
        vanishing.push(v.is_negligible(scale, FLOAT_TOL));
        values.push(v.to_json_string());
    }
    let threshold = if vanishing[n_max] { vanishing.iter().rposition(|z| !z) } else { None };
    Ok(ExistenceReport { threshold, values, vanishing })
}

/// Groups the terms of a system by moment offset, for display and tests.
pub fn coefficients_by_offset(eq: &DifferenceEquation) -> BTreeMap<(i64, usize), Polynomial<Rational>> {
    eq.terms.iter().map(|t| ((t.v, t.i), t.coeff.clone())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moments::{weight_moments, Weight};
    use crate::operator::q;
    use crate::poly::monic_chebyshev;
    use proptest::prelude::*;

    fn hermite_ms(count: usize) -> MomentSequence<Rational> {
        classical_moments(&ClassicalMeasure::Hermite, count).unwrap()
    }

    fn example31() -> ExactlySolvableOperator {
        ExactlySolvableOperator::parse(&[&["2"], &["0", "-2"], &["1"]]).unwrap()
    }

    #[test]
    fn identity_gives_pn() {
        let ms = hermite_ms(20);
        let s = solve_index(&ExactlySolvableOperator::identity(), &ms, 4).unwrap();
        assert_eq!(s.particular.as_ref(), Some(&s.p_n));
        assert!(s.kernel_basis.is_empty());
        assert_eq!(s.certificate, 0.0);
    }

    #[test]
    fn hermite_operator_has_constant_kernel() {
        let ms = hermite_ms(20);
        let s = solve_index(&ExactlySolvableOperator::hermite(), &ms, 4).unwrap();
        assert_eq!(s.particular.unwrap(), Polynomial::parse_strs(&["3/4", "0", "-3", "0", "1"]).unwrap());
        assert_eq!(s.kernel_basis, vec![Polynomial::one()]);
    }

    #[test]
    fn example31_kernel_only_at_one() {
        let ms = hermite_ms(20);
        let s = solve_index(&example31(), &ms, 1).unwrap();
        assert!(s.particular.is_none());
        assert_eq!(s.kernel_basis, vec![Polynomial::x()]);
    }

    #[test]
    fn constrained_members() {
        let ms = hermite_ms(20);
        let op = ExactlySolvableOperator::hermite();
        let qn = unique_with_constraints(&op, &ms, 4, &[q("0")]).unwrap();
        assert_eq!(qn, Polynomial::parse_strs(&["0", "0", "-3", "0", "1"]).unwrap());
        let nu = q("5/7");
        let h4 = Polynomial::parse_strs(&["3/4", "0", "-3", "0", "1"]).unwrap();
        let qn = unique_with_constraints(&op, &ms, 4, &[nu.clone()]).unwrap();
        assert_eq!(qn, h4.sub(&Polynomial::constant(h4.evaluate(&nu))));
        assert_eq!(
            unique_with_constraints(&op, &ms, 4, &[q("0"), q("1")]),
            Err(Error::WrongPointCount { expected: 1, got: 2 })
        );
    }

    #[test]
    fn example31_constraint_at_zero_is_not_interpolating() {
        let w = Weight::parse("exp(-x^2)/(1+x^2)", "-inf", "inf", false).unwrap();
        let ms = weight_moments(&w, 12, 1e-12).unwrap();
        let r = unique_with_constraints(&example31(), &ms, 5, &[0.0]);
        assert_eq!(r, Err(Error::NotInterpolating));
    }

    #[test]
    fn confluent_points_use_derivatives() {
        // (x² − 3/5)f'' on degree ≤ 3: kernel {1, x}; a double point at 1 pins value and slope
        let op = ExactlySolvableOperator::parse(&[&["0"], &["0"], &["-3/5", "0", "1"]]).unwrap();
        let ms = classical_moments(&ClassicalMeasure::legendre(), 10).unwrap();
        let qn = unique_with_constraints(&op, &ms, 3, &[q("1"), q("1")]).unwrap();
        assert!(qn.evaluate(&q("1")).is_zero());
        assert!(qn.differentiate(1).evaluate(&q("1")).is_zero());
        assert_eq!(qn.degree(), Some(3));
    }

    #[test]
    fn normality_branches() {
        let ms = classical_moments(&ClassicalMeasure::legendre(), 20).unwrap();
        let r = normality_report(&ExactlySolvableOperator::identity(), &ms, 5).unwrap();
        assert_eq!((r.verdict, r.branch), (Verdict::Normal, Branch::I));
        let r = normality_report(&ExactlySolvableOperator::hermite(), &ms, 3).unwrap();
        assert_eq!(r.drop_indexes, vec![0]);
        assert_eq!(r.rank_condition_ok, Some(true));
        assert_eq!(r.verdict, r.oracle_verdict);
        assert_eq!(r.verdict, Verdict::NotNormal);
    }

    #[test]
    fn systq_strings() {
        let ds = generate_systq(&ExactlySolvableOperator::hermite());
        assert_eq!(ds.exceptional, vec![0]);
        assert_eq!(ds.equations[0].text, "2*mu[n] - (n-1)*mu[n-2] = 0 for n >= 2");
        assert_eq!(ds.equations[0].initial[0].text, "mu[1] = 0");
        let op = ExactlySolvableOperator::parse(&[&["-1"], &["0", "1"]]).unwrap();
        let ds = generate_systq(&op);
        assert_eq!(ds.equations[0].text, "mu[0]*mu[n+1] - mu[1]*mu[n] = 0 for n >= 0, n != 1");
        let ec = ExactlySolvableOperator::parse(&[&["0"], &["0", "1"], &["0", "0", "1"]]).unwrap();
        assert_eq!(generate_systq(&ec).equations[0].text, "mu[n] = 0 for n >= 1");
    }

    #[test]
    fn systq_matches_direct_integral() {
        let op = ExactlySolvableOperator::parse(&[&["0"], &["1", "-3"], &["2", "0", "3/2"]]).unwrap();
        let ds = generate_systq(&op);
        let ms = classical_moments(&ClassicalMeasure::legendre(), 40).unwrap();
        for eq in &ds.equations {
            let minors = hankel_minors(&ms, eq.n_j).unwrap();
            let scaled_p = Polynomial::new((0..=eq.n_j).map(|i| minors.signed(i)).collect());
            for n in [5usize, 9, 17] {
                let direct = ms.pair(&op.apply(&Polynomial::monomial(n, q("1"))), &scaled_p).unwrap();
                assert_eq!(evaluate_equation(eq, &ms, n).unwrap().0, direct);
            }
        }
    }

    #[test]
    fn membership_and_perturbation() {
        let ds = generate_systq(&ExactlySolvableOperator::hermite());
        let ms = hermite_ms(45).scaled(&q("7/3"));
        let rep = check_membership(&ds, &ms, 40).unwrap();
        assert!(rep.pass);
        assert_eq!(rep.checked_up_to, Some(40));
        let mut v = ms.values().to_vec();
        v[2] += q("1");
        let bad = MomentSequence::explicit(v).unwrap();
        let rep = check_membership(&ds, &bad, 40).unwrap();
        assert_eq!(rep.first_violation.unwrap().n, 2);
    }

    #[test]
    fn existence_thresholds() {
        let ms = hermite_ms(30);
        let r = classical_existence(&ClassicalMeasure::Hermite, &ms, 10).unwrap();
        assert_eq!(r.threshold, Some(0));
        let w = Weight::parse("exp(-x^2)/(1+x^2)", "-inf", "inf", false).unwrap();
        let ms = weight_moments(&w, 22, 1e-12).unwrap().map(|v| v * std::f64::consts::PI.sqrt().recip());
        let r = classical_existence(&ClassicalMeasure::Hermite, &ms, 10).unwrap();
        assert_eq!(r.threshold, Some(2));
    }

    #[test]
    fn solution_members_are_orthogonal() {
        let ms = classical_moments(&ClassicalMeasure::Chebyshev1, 30).unwrap();
        let op = ExactlySolvableOperator::parse(&[&["0"], &["0", "1"], &["-1", "0", "1"]]).unwrap();
        for n in 0..10 {
            let s = solve_index(&op, &ms, n).unwrap();
            assert_eq!(s.certificate, 0.0);
            if let Some(p) = &s.particular {
                assert!(p.is_monic());
                assert_eq!(op.apply(p), s.p_n.scale(&s.lambda_n));
            }
            for k in &s.kernel_basis {
                assert!(op.apply(k).is_zero() && k.is_monic());
            }
        }
        let _ = monic_chebyshev::<Rational>(2);
    }

    fn small_rational() -> impl Strategy<Value = Rational> {
        (-6i64..=6).prop_map(|k| Rational::new(k.into(), 2.into()))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]
        #[test]
        fn verdict_matches_oracle(c in proptest::collection::vec(small_rational(), 9), n in 0usize..8) {
            let rho = vec![
                Polynomial::new(vec![c[0].clone()]),
                Polynomial::new(vec![c[1].clone(), c[2].clone()]),
                Polynomial::new(vec![c[3].clone(), c[4].clone(), c[5].clone()]),
                Polynomial::new(vec![c[6].clone(), c[7].clone(), c[8].clone(), Rational::one()]),
            ];
            let op = ExactlySolvableOperator::new(rho).unwrap();
            let ms = classical_moments(&ClassicalMeasure::legendre(), 2 * n + 2).unwrap();
            let r = normality_report(&op, &ms, n).unwrap();
            prop_assert_eq!(r.verdict, r.oracle_verdict);
        }

        #[test]
        fn unique_operators_have_no_kernel(n in 0usize..12) {
            // ((x−2)f)′: λ_n = n + 1 never vanishes
            let op = ExactlySolvableOperator::parse(&[&["1"], &["-2", "1"]]).unwrap();
            let ms = classical_moments(&ClassicalMeasure::Chebyshev1, 2 * n + 2).unwrap();
            let s = solve_index(&op, &ms, n).unwrap();
            prop_assert!(s.particular.is_some() && s.kernel_basis.is_empty());
        }
    }
}
