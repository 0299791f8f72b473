//! Exactly solvable operators L = Σ ρ_k(x)·d^k/dx^k and factorized operators.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::poly::Polynomial;
use crate::scalar::{rational_from_str, Rational, RealScalar, Scalar};

/// Operator with coefficient polynomials ρ_0, …, ρ_M, deg ρ_k ≤ k, with
/// equality for at least one k.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "OperatorJson", into = "OperatorJson")]
pub struct ExactlySolvableOperator {
    rho: Vec<Polynomial<Rational>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// deg ρ_k > k.
    DegreeTooHigh { k: usize, degree: usize },
    /// No k with deg ρ_k = k.
    NoEquality,
}

#[derive(Serialize, Deserialize)]
struct OperatorJson {
    rho: Vec<Vec<String>>,
}

impl TryFrom<OperatorJson> for ExactlySolvableOperator {
    type Error = Error;
    fn try_from(j: OperatorJson) -> Result<Self> {
        let rho = j.rho.iter().map(|c| Polynomial::parse_strs(c)).collect::<Result<Vec<_>>>()?;
        ExactlySolvableOperator::new(rho)
    }
}

impl From<ExactlySolvableOperator> for OperatorJson {
    fn from(op: ExactlySolvableOperator) -> Self {
        OperatorJson { rho: op.rho.iter().map(|p| p.coeffs().iter().map(Scalar::to_json_string).collect()).collect() }
    }
}

/// Checks deg ρ_k ≤ k for all k and deg ρ_k = k for some k.
pub fn validate(rho: &[Polynomial<Rational>]) -> Vec<Violation> {
    let mut out: Vec<Violation> = rho
        .iter()
        .enumerate()
        .filter_map(|(k, p)| match p.degree() {
            Some(d) if d > k => Some(Violation::DegreeTooHigh { k, degree: d }),
            _ => None,
        })
        .collect();
    if !rho.iter().enumerate().any(|(k, p)| p.degree() == Some(k)) {
        out.push(Violation::NoEquality);
    }
    out
}

/// (n)_k = n(n−1)…(n−k+1) as a polynomial in n.
pub fn falling_factorial(k: usize) -> Polynomial<Rational> {
    (0..k).fold(Polynomial::one(), |acc, j| {
        acc.mul(&Polynomial::new(vec![Rational::from_integer((-(j as i64)).into()), Rational::from_integer(1.into())]))
    })
}

fn falling_value(n: usize, k: usize) -> Rational {
    if k > n {
        return Rational::from_integer(0.into());
    }
    Rational::from_integer(((n - k + 1)..=n).map(|t| num_bigint::BigInt::from(t)).product())
}

impl ExactlySolvableOperator {
    pub fn new(rho: Vec<Polynomial<Rational>>) -> Result<Self> {
        let mut rho = rho;
        while rho.len() > 1 && rho.last().is_some_and(|p| p.is_zero()) {
            rho.pop();
        }
        match validate(&rho).first() {
            None => Ok(ExactlySolvableOperator { rho }),
            Some(Violation::DegreeTooHigh { k, degree }) => {
                Err(Error::InvalidOperator(format!("deg rho_{k} = {degree} exceeds {k}")))
            }
            Some(Violation::NoEquality) => {
                Err(Error::InvalidOperator("no coefficient rho_k has degree exactly k".into()))
            }
        }
    }

    /// From coefficient strings, `rho[k]` lowest degree first.
    pub fn parse(rho: &[&[&str]]) -> Result<Self> {
        Self::new(rho.iter().map(|c| Polynomial::parse_strs(c)).collect::<Result<Vec<_>>>()?)
    }

    pub fn identity() -> Self {
        Self::new(vec![Polynomial::one()]).expect("valid")
    }

    /// f″ − 2x f′.
    pub fn hermite() -> Self {
        Self::parse(&[&[], &["0", "-2"], &["1"]]).expect("valid")
    }

    /// x f″ + (α + 1 − x) f′.
    pub fn laguerre(alpha: &Rational) -> Self {
        let one = Rational::from_integer(1.into());
        Self::new(vec![
            Polynomial::zero(),
            Polynomial::new(vec![alpha.clone() + one.clone(), -one.clone()]),
            Polynomial::x(),
        ])
        .expect("valid")
    }

    /// (1 − x²) f″ + (β − α − (α + β + 2) x) f′.
    pub fn jacobi(alpha: &Rational, beta: &Rational) -> Self {
        let q = |n: i64| Rational::from_integer(n.into());
        Self::new(vec![
            Polynomial::zero(),
            Polynomial::new(vec![beta.clone() - alpha.clone(), -(alpha.clone() + beta.clone() + q(2))]),
            Polynomial::new(vec![q(1), q(0), q(-1)]),
        ])
        .expect("valid")
    }

    pub fn rho(&self) -> &[Polynomial<Rational>] {
        &self.rho
    }

    pub fn order(&self) -> usize {
        self.rho.len() - 1
    }

    /// ρ_{k,j}: coefficient of x^j in ρ_k.
    pub fn rho_coeff(&self, k: usize, j: usize) -> Rational {
        self.rho.get(k).map_or_else(|| Rational::from_integer(0.into()), |p| p.coeff(j))
    }

    pub fn apply<T: Scalar>(&self, p: &Polynomial<T>) -> Polynomial<T> {
        self.rho.iter().enumerate().fold(Polynomial::zero(), |acc, (k, r)| {
            if r.is_zero() {
                return acc;
            }
            let rt = r.map(T::from_rational);
            acc.add(&rt.mul(&p.differentiate(k)))
        })
    }

    /// λ_n = Σ_k ρ_{k,k}·n!/(n−k)!.
    pub fn lambda(&self, n: usize) -> Rational {
        (0..=self.order()).map(|k| self.rho_coeff(k, k) * falling_value(n, k)).sum()
    }

    /// λ as a polynomial in n.
    pub fn lambda_poly(&self) -> Polynomial<Rational> {
        (0..=self.order())
            .fold(Polynomial::zero(), |acc, k| acc.add(&falling_factorial(k).scale(&self.rho_coeff(k, k))))
    }

    /// Nonnegative integers n with λ_n = 0.
    pub fn exceptional_indexes(&self) -> Vec<usize> {
        let lp = self.lambda_poly();
        let Some(lead) = lp.leading().cloned() else {
            return Vec::new();
        };
        // Cauchy bound on the roots of λ(n)
        let bound = lp.coeffs().iter().map(|c| (c.clone() / lead.clone()).to_f64().abs()).fold(0.0, f64::max) + 1.0;
        (0..=bound.ceil() as usize).filter(|&n| self.lambda(n) == Rational::from_integer(0.into())).collect()
    }

    /// A_{n+1} by the closed formula
    /// a[r][c] = Σ_{k=c−r}^{min(M,c)} ρ_{k, r+k−c}·c!/(c−k)!  (0-based r ≤ c).
    pub fn build_matrix(&self, n: usize) -> OperatorMatrix {
        let m = self.order();
        let cols = (0..=n)
            .map(|c| {
                (0..=c)
                    .map(|r| ((c - r)..=m.min(c)).map(|k| self.rho_coeff(k, r + k - c) * falling_value(c, k)).sum())
                    .collect()
            })
            .collect();
        OperatorMatrix { n, cols }
    }
}

/// Upper triangular A_{n+1}: column c holds the coefficients of L[x^c]
/// (rows 0..=c).
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    pub n: usize,
    cols: Vec<Vec<Rational>>,
}

impl OperatorMatrix {
    pub fn size(&self) -> usize {
        self.n + 1
    }

    /// Coefficient of x^r in L[x^c] (0-based).
    pub fn entry(&self, r: usize, c: usize) -> Rational {
        if r > c {
            Rational::from_integer(0.into())
        } else {
            self.cols[c][r].clone()
        }
    }

    pub fn column(&self, c: usize) -> &[Rational] {
        &self.cols[c]
    }

    pub fn diagonal(&self) -> Vec<Rational> {
        (0..=self.n).map(|j| self.entry(j, j)).collect()
    }

    pub fn dense(&self) -> Mat<Rational> {
        (0..=self.n).map(|r| (0..=self.n).map(|c| self.entry(r, c)).collect()).collect()
    }
}

/// One stage f ↦ (ρ·f)^{(n)} with deg ρ = m.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Stage {
    pub m: usize,
    pub n: usize,
    pub rho: Polynomial<Rational>,
}

impl Stage {
    pub fn apply<T: Scalar>(&self, f: &Polynomial<T>) -> Polynomial<T> {
        self.rho.map(T::from_rational).mul(f).differentiate(self.n)
    }
}

/// L = L_J ∘ … ∘ L_1 with real-rooted stage polynomials and Σm = Σn.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FactorizedJson", into = "FactorizedJson")]
pub struct FactorizedOperator {
    stages: Vec<Stage>,
}

#[derive(Serialize, Deserialize)]
struct FactorizedJson {
    stages: Vec<Stage>,
}

impl TryFrom<FactorizedJson> for FactorizedOperator {
    type Error = Error;
    fn try_from(j: FactorizedJson) -> Result<Self> {
        FactorizedOperator::new(j.stages)
    }
}

impl From<FactorizedOperator> for FactorizedJson {
    fn from(f: FactorizedOperator) -> Self {
        FactorizedJson { stages: f.stages }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactorConditions {
    pub exact_ok: bool,
    pub unique_ok: bool,
    /// 1-based index of the last stage with a negative partial sum.
    pub j0: Option<usize>,
    /// The kernel is span{1, …, x^{n′}}.
    pub n_prime: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HullBound {
    pub c_min: f64,
    pub c_max: f64,
    pub d: f64,
    pub r: f64,
}

/// Composition S∘R of operators given by coefficient lists (index = derivative order).
fn compose(s: &[Polynomial<Rational>], r: &[Polynomial<Rational>]) -> Vec<Polynomial<Rational>> {
    let mut out = vec![Polynomial::zero(); s.len() + r.len() - 1];
    for (j, sj) in s.iter().enumerate() {
        if sj.is_zero() {
            continue;
        }
        for (i, ri) in r.iter().enumerate() {
            for l in 0..=j {
                let c = Rational::from_integer(binomial(j, l).into());
                let term = sj.mul(&ri.differentiate(j - l)).scale(&c);
                out[i + l] = out[i + l].add(&term);
            }
        }
    }
    out
}

fn binomial(n: usize, k: usize) -> i64 {
    (0..k).fold(1i64, |acc, i| acc * (n - i) as i64 / (i + 1) as i64)
}

impl FactorizedOperator {
    pub fn new(stages: Vec<Stage>) -> Result<Self> {
        if stages.is_empty() {
            return Err(Error::InvalidOperator("factorized operator needs at least one stage".into()));
        }
        for (j, s) in stages.iter().enumerate() {
            if s.rho.degree() != Some(s.m) {
                return Err(Error::InvalidOperator(format!(
                    "stage {}: deg rho = {:?} but m = {}",
                    j + 1,
                    s.rho.degree(),
                    s.m
                )));
            }
            if s.m > 0 {
                // square-free part keeps repeated roots from splitting off the real axis
                let g = s.rho.gcd(&s.rho.differentiate(1));
                let sf = if g.degree() == Some(0) { s.rho.clone() } else { s.rho.div_exact(&g)? };
                let rs = crate::zeros::roots(&sf, 0)?;
                if let Some(z) = rs.roots.iter().find(|z| z.im.abs() >= 1e-9 * (1.0 + z.re.abs())) {
                    return Err(Error::InvalidOperator(format!("stage {}: rho has a non-real root {z}", j + 1)));
                }
            }
        }
        let sm: usize = stages.iter().map(|s| s.m).sum();
        let sn: usize = stages.iter().map(|s| s.n).sum();
        if sm != sn {
            return Err(Error::InvalidOperator(format!("sum of m ({sm}) differs from sum of n ({sn})")));
        }
        Ok(FactorizedOperator { stages })
    }

    /// Shorthand for stages given as (m, n, ρ coefficient strings).
    pub fn parse(stages: &[(usize, usize, &[&str])]) -> Result<Self> {
        Self::new(
            stages
                .iter()
                .map(|(m, n, c)| Ok(Stage { m: *m, n: *n, rho: Polynomial::parse_strs(c)? }))
                .collect::<Result<Vec<_>>>()?,
        )
    }

    pub fn stages(&self) -> &[Stage] {
        &self.stages
    }

    /// M = Σ n_j.
    pub fn order(&self) -> usize {
        self.stages.iter().map(|s| s.n).sum()
    }

    pub fn apply_stagewise<T: Scalar>(&self, f: &Polynomial<T>) -> Polynomial<T> {
        self.stages.iter().fold(f.clone(), |acc, s| s.apply(&acc))
    }

    pub fn expand(&self) -> Result<ExactlySolvableOperator> {
        let stage_coeffs = |s: &Stage| -> Vec<Polynomial<Rational>> {
            (0..=s.n)
                .map(|i| s.rho.differentiate(s.n - i).scale(&Rational::from_integer(binomial(s.n, i).into())))
                .collect()
        };
        let mut total = stage_coeffs(&self.stages[0]);
        for s in &self.stages[1..] {
            total = compose(&stage_coeffs(s), &total);
        }
        let op = ExactlySolvableOperator::new(total).map_err(|e| Error::ExpansionMismatch(e.to_string()))?;
        for d in 0..=2 * self.order() {
            let x = Polynomial::<Rational>::monomial(d, Rational::from_integer(1.into()));
            if op.apply(&x) != self.apply_stagewise(&x) {
                return Err(Error::ExpansionMismatch(format!("disagreement on x^{d}")));
            }
        }
        Ok(op)
    }

    pub fn conditions(&self) -> FactorConditions {
        let mut partial = 0i64;
        let mut j0 = None;
        let mut lowest = 0i64;
        for (j, s) in self.stages.iter().enumerate() {
            partial += s.m as i64 - s.n as i64;
            if partial < 0 {
                j0 = Some(j + 1);
            }
            lowest = lowest.min(partial);
        }
        // x^i dies at the first stage where i + partial < 0, so the kernel
        // is governed by the lowest partial sum, not the one at j0
        FactorConditions {
            exact_ok: partial == 0,
            unique_ok: j0.is_none(),
            j0,
            n_prime: j0.map(|_| (-lowest - 1) as usize),
        }
    }

    /// C = hull of the real roots of ∏ρ_{m_j} and `extra_roots`,
    /// d = max(1, sup|C|), R = 3^M·d.
    pub fn hull_and_bound(&self, extra_roots: &[f64]) -> Result<HullBound> {
        let mut pts: Vec<f64> = extra_roots.to_vec();
        for s in &self.stages {
            if s.m > 0 {
                pts.extend(crate::zeros::roots(&s.rho, 0)?.roots.iter().map(|z| z.re));
            }
        }
        if pts.is_empty() {
            return Err(Error::InvalidParameter("no stage roots: the operator has order 0".into()));
        }
        let c_min = pts.iter().cloned().fold(f64::INFINITY, f64::min);
        let c_max = pts.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let d = 1f64.max(c_min.abs()).max(c_max.abs());
        Ok(HullBound { c_min, c_max, d, r: 3f64.powi(self.order() as i32) * d })
    }
}

/// Parses an operator given either as `{"rho": …}` or `{"stages": …}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OperatorSpec {
    Factorized(FactorizedOperator),
    Plain(ExactlySolvableOperator),
}

impl OperatorSpec {
    pub fn operator(&self) -> Result<ExactlySolvableOperator> {
        match self {
            OperatorSpec::Plain(op) => Ok(op.clone()),
            OperatorSpec::Factorized(f) => f.expand(),
        }
    }
}

/// Parses a rational; convenience for tests and examples.
pub fn q(s: &str) -> Rational {
    rational_from_str(s).expect("rational literal")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(v: &[&str]) -> Polynomial<Rational> {
        Polynomial::parse_strs(v).unwrap()
    }

    fn example31() -> ExactlySolvableOperator {
        ExactlySolvableOperator::parse(&[&["2"], &["0", "-2"], &["1"]]).unwrap()
    }

    #[test]
    fn validation() {
        assert!(validate(ExactlySolvableOperator::hermite().rho()).is_empty());
        assert_eq!(validate(&[p(&["1"]), p(&["0", "0", "1"])]), vec![Violation::DegreeTooHigh { k: 1, degree: 2 }]);
        assert!(validate(&[p(&["1"])]).is_empty());
        assert_eq!(validate(&[p(&[]), p(&["1"])]), vec![Violation::NoEquality]);
    }

    #[test]
    fn apply_examples() {
        let h = ExactlySolvableOperator::hermite();
        assert_eq!(h.apply(&p(&["0", "0", "1"])), p(&["2", "0", "-4"]));
        let xd = ExactlySolvableOperator::parse(&[&[], &["0", "1"]]).unwrap();
        let xd1 = ExactlySolvableOperator::parse(&[&["-1"], &["0", "1"]]).unwrap();
        for n in 0..6 {
            let xn = Polynomial::<Rational>::monomial(n, q("1"));
            assert_eq!(xd.apply(&xn), xn.scale(&q(&n.to_string())));
            assert_eq!(xd1.apply(&xn), xn.scale(&(q(&n.to_string()) - q("1"))));
        }
    }

    #[test]
    fn lambda_examples() {
        let e = example31();
        for n in 0..10 {
            assert_eq!(e.lambda(n), q("2") * (q("1") - q(&n.to_string())));
        }
        assert_eq!(e.lambda(3), q("-4"));
        assert_eq!(ExactlySolvableOperator::hermite().lambda(0), q("0"));
        let xd1 = ExactlySolvableOperator::parse(&[&["-1"], &["0", "1"]]).unwrap();
        assert_eq!((xd1.lambda(0), xd1.lambda(1)), (q("-1"), q("0")));
        assert_eq!(xd1.exceptional_indexes(), vec![1]);
        assert_eq!(ExactlySolvableOperator::hermite().exceptional_indexes(), vec![0]);
        assert_eq!(e.exceptional_indexes(), vec![1]);
    }

    #[test]
    fn hermite_matrix() {
        let a = ExactlySolvableOperator::hermite().build_matrix(3);
        assert_eq!(a.diagonal(), vec![q("0"), q("-2"), q("-4"), q("-6")]);
        assert_eq!(a.entry(0, 2), q("2"));
        assert_eq!(a.entry(1, 3), q("6"));
        let nonzero = a.dense().iter().flatten().filter(|v| **v != q("0")).count();
        assert_eq!(nonzero, 5);
        let id = ExactlySolvableOperator::identity().build_matrix(4);
        assert_eq!(id.dense(), crate::linalg::identity::<Rational>(5));
    }

    #[test]
    fn expansion_examples() {
        let f = FactorizedOperator::parse(&[(1, 1, &["-2", "1"])]).unwrap();
        assert_eq!(f.expand().unwrap().rho(), &[p(&["1"]), p(&["-2", "1"])]);
        let f = FactorizedOperator::parse(&[(2, 2, &["-1", "0", "1"])]).unwrap();
        assert_eq!(f.expand().unwrap().rho(), &[p(&["2"]), p(&["0", "4"]), p(&["-1", "0", "1"])]);
        let f = FactorizedOperator::parse(&[(1, 1, &["0", "1"])]).unwrap();
        assert_eq!(f.expand().unwrap().rho(), &[p(&["1"]), p(&["0", "1"])]);
        assert!(FactorizedOperator::parse(&[(2, 2, &["1", "0", "1"])]).is_err());
        assert!(FactorizedOperator::parse(&[(1, 2, &["0", "1"])]).is_err());
    }

    #[test]
    fn condition_examples() {
        let f = FactorizedOperator::parse(&[(1, 1, &["-2", "1"])]).unwrap();
        assert!(f.conditions().unique_ok);
        let f = FactorizedOperator::parse(&[(1, 2, &["-2", "1"]), (2, 1, &["-1", "0", "1"])]).unwrap();
        let c = f.conditions();
        assert_eq!((c.unique_ok, c.j0, c.n_prime), (false, Some(1), Some(0)));
        let op = f.expand().unwrap();
        assert!(op.apply(&Polynomial::<Rational>::one()).is_zero());
        assert!(!op.apply(&Polynomial::<Rational>::x()).is_zero());
        let f = FactorizedOperator::parse(&[(2, 1, &["-1", "0", "1"]), (1, 2, &["-2", "1"])]).unwrap();
        assert!(f.conditions().unique_ok);
    }

    #[test]
    fn hull_examples() {
        let f = FactorizedOperator::parse(&[(1, 1, &["-2", "1"])]).unwrap();
        let h = f.hull_and_bound(&[]).unwrap();
        assert!((h.d - 2.0).abs() < 1e-12 && (h.r - 6.0).abs() < 1e-12);
        let f = FactorizedOperator::parse(&[(2, 2, &["-1", "0", "1"])]).unwrap();
        let h = f.hull_and_bound(&[]).unwrap();
        assert!((h.d - 1.0).abs() < 1e-12 && (h.r - 9.0).abs() < 1e-12);
        let h = f.hull_and_bound(&[-4.0]).unwrap();
        assert!((h.r - 36.0).abs() < 1e-12);
    }

    #[test]
    fn json_forms() {
        let op: ExactlySolvableOperator = serde_json::from_str(r#"{"rho": [[], ["0","-2"], ["1"]]}"#).unwrap();
        assert_eq!(op, ExactlySolvableOperator::hermite());
        let s = serde_json::to_string(&op).unwrap();
        assert_eq!(serde_json::from_str::<ExactlySolvableOperator>(&s).unwrap(), op);
        let spec: OperatorSpec = serde_json::from_str(r#"{"stages": [{"m":1,"n":1,"rho":["-2","1"]}]}"#).unwrap();
        assert!(matches!(spec, OperatorSpec::Factorized(_)));
        assert!(serde_json::from_str::<ExactlySolvableOperator>(r#"{"rho": [["0","0","1"]]}"#).is_err());
    }

    fn rat() -> impl Strategy<Value = Rational> {
        (-3i64..=3, 1i64..=3).prop_map(|(a, b)| Rational::new(a.into(), b.into()))
    }

    fn operator() -> impl Strategy<Value = ExactlySolvableOperator> {
        (1usize..=3)
            .prop_flat_map(|m| proptest::collection::vec(proptest::collection::vec(rat(), m + 1), m + 1))
            .prop_filter_map("exactly solvable", |rows| {
                let rho = rows
                    .into_iter()
                    .enumerate()
                    .map(|(k, c)| Polynomial::new(c.into_iter().take(k + 1).collect()))
                    .collect();
                ExactlySolvableOperator::new(rho).ok()
            })
    }

    fn stage() -> impl Strategy<Value = (usize, Vec<Rational>)> {
        (0usize..=2).prop_flat_map(|m| (Just(m), proptest::collection::vec(rat(), m)))
    }

    proptest! {
        #[test]
        fn matrix_columns_are_images_of_monomials(op in operator()) {
            let a = op.build_matrix(15);
            for j in 0..=15 {
                let img = op.apply(&Polynomial::<Rational>::monomial(j, q("1")));
                let col: Vec<Rational> = (0..=15).map(|r| a.entry(r, j)).collect();
                let want: Vec<Rational> = (0..=15).map(|r| img.coeff(r)).collect();
                prop_assert_eq!(col, want);
                prop_assert_eq!(a.entry(j, j), op.lambda(j));
                prop_assert!(img.degree().map_or(true, |d| d <= j));
            }
        }

        #[test]
        fn expansion_matches_stagewise(
            roots in proptest::collection::vec(stage(), 1..=3),
            coeffs in proptest::collection::vec(rat(), 0..=13),
            perm in 0usize..6,
        ) {
            // build stages with real roots; derivative orders are a rotation of the degrees
            let ms: Vec<usize> = roots.iter().map(|(m, _)| *m).collect();
            let k = ms.len();
            let ns: Vec<usize> = (0..k).map(|i| ms[(i + perm) % k]).collect();
            let stages: Vec<Stage> = roots
                .iter()
                .zip(&ns)
                .map(|((m, rs), n)| Stage { m: *m, n: *n, rho: Polynomial::from_roots(rs) })
                .collect();
            prop_assume!(ms.iter().sum::<usize>() > 0);
            let f = FactorizedOperator::new(stages).unwrap();
            let op = f.expand().unwrap();
            let poly = Polynomial::new(coeffs);
            prop_assert_eq!(op.apply(&poly), f.apply_stagewise(&poly));
            let c = f.conditions();
            if c.unique_ok {
                for n in 0..=40 {
                    prop_assert!(op.lambda(n) != q("0"));
                }
            } else {
                let np = c.n_prime.unwrap();
                for i in 0..=np {
                    prop_assert!(op.apply(&Polynomial::<Rational>::monomial(i, q("1"))).is_zero());
                }
                prop_assert!(!op.apply(&Polynomial::<Rational>::monomial(np + 1, q("1"))).is_zero());
            }
        }
    }
}
