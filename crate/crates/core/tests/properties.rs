use num_complex::Complex64;
use opdop::moments::{
    classical_moments, hankel_det, heine_polynomial, monic_orthogonal, ClassicalMeasure, MomentSequence,
};
use opdop::operator::q;
use opdop::polar::{self, BernsteinSzegoMeasure};
use opdop::scalar::{RealScalar, Scalar};
use opdop::solver;
use opdop::zeros;
use opdop::{ExactlySolvableOperator, OrthogonalFamily, Polynomial, Rational};
use proptest::prelude::*;

fn rat() -> impl Strategy<Value = Rational> {
    (-6i64..=6, 1i64..=4).prop_map(|(a, b)| Rational::new(a.into(), b.into()))
}

fn positive_rat() -> impl Strategy<Value = Rational> {
    (1i64..=20, 1i64..=7).prop_map(|(a, b)| Rational::new(a.into(), b.into()))
}

fn classical_measures() -> Vec<ClassicalMeasure> {
    vec![
        ClassicalMeasure::Hermite,
        ClassicalMeasure::Chebyshev1,
        ClassicalMeasure::Laguerre { alpha: q("0") },
        ClassicalMeasure::Laguerre { alpha: q("3/2") },
        ClassicalMeasure::legendre(),
        ClassicalMeasure::Jacobi { alpha: q("1/2"), beta: q("-1/2") },
        ClassicalMeasure::Jacobi { alpha: q("2"), beta: q("1") },
    ]
}

/// Classical operator paired with its measure.
fn classical_pairs() -> Vec<(ExactlySolvableOperator, ClassicalMeasure)> {
    vec![
        (ExactlySolvableOperator::hermite(), ClassicalMeasure::Hermite),
        (ExactlySolvableOperator::laguerre(&q("0")), ClassicalMeasure::Laguerre { alpha: q("0") }),
        (ExactlySolvableOperator::laguerre(&q("3/2")), ClassicalMeasure::Laguerre { alpha: q("3/2") }),
        (ExactlySolvableOperator::jacobi(&q("0"), &q("0")), ClassicalMeasure::legendre()),
        (
            ExactlySolvableOperator::jacobi(&q("1/2"), &q("-1/2")),
            ClassicalMeasure::Jacobi { alpha: q("1/2"), beta: q("-1/2") },
        ),
        (ExactlySolvableOperator::jacobi(&q("2"), &q("1")), ClassicalMeasure::Jacobi { alpha: q("2"), beta: q("1") }),
    ]
}

/// Discrete measure Σ w_i δ_{x_i} with distinct nodes.
fn discrete_measure(nodes: usize) -> impl Strategy<Value = MomentSequence<Rational>> {
    (proptest::collection::btree_set(-12i64..=12, nodes), proptest::collection::vec(positive_rat(), nodes)).prop_map(
        move |(xs, ws)| {
            let values = (0..2 * nodes + 1)
                .map(|k| {
                    xs.iter()
                        .zip(&ws)
                        .fold(q("0"), |acc, (x, w)| acc + w * Rational::new((*x).into(), 3.into()).pow(k as i32))
                })
                .collect();
            MomentSequence::explicit(values).unwrap()
        },
    )
}

fn operator() -> impl Strategy<Value = ExactlySolvableOperator> {
    proptest::collection::vec(proptest::collection::vec(rat(), 3), 3).prop_filter_map("exactly solvable", |rows| {
        let rho =
            rows.into_iter().enumerate().map(|(k, c)| Polynomial::new(c.into_iter().take(k + 1).collect())).collect();
        ExactlySolvableOperator::new(rho).ok()
    })
}

/// max_j |∫L[Q]·x^j dμ| over j < n.
fn orthogonality_residual(
    op: &ExactlySolvableOperator,
    ms: &MomentSequence<Rational>,
    qn: &Polynomial<Rational>,
    n: usize,
) -> Rational {
    let lq = op.apply(qn);
    (0..n).fold(q("0"), |acc, j| {
        let v = ms.integrate(&lq.shift(j)).unwrap();
        if v > acc.clone() {
            v
        } else if -v.clone() > acc {
            -v
        } else {
            acc
        }
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn scale_invariance(c in positive_rat(), which in 0usize..7, n in 0usize..9) {
        let m = &classical_measures()[which];
        let ms = classical_moments(m, 2 * n + 1).unwrap();
        prop_assert_eq!(monic_orthogonal(&ms.scaled(&c), n).unwrap(), monic_orthogonal(&ms, n).unwrap());
    }

    #[test]
    fn heine_ratio_equals_hankel_solve(ms in discrete_measure(7), n in 0usize..=6) {
        prop_assert_eq!(heine_polynomial(&ms, n).unwrap(), monic_orthogonal(&ms, n).unwrap());
    }

    #[test]
    fn discrete_measures_are_positive_definite(ms in discrete_measure(8)) {
        for n in 0..8 {
            prop_assert!(hankel_det(&ms, n).unwrap() > q("0"));
        }
    }

    #[test]
    fn solution_members_satisfy_orthogonality(op in operator(), n in 0usize..8, c in proptest::collection::vec(rat(), 3)) {
        let ms = classical_moments(&ClassicalMeasure::legendre(), 2 * n + 3).unwrap();
        let sol = solver::solve_index(&op, &ms, n).unwrap();
        let mut members: Vec<Polynomial<Rational>> = sol.kernel_basis.clone();
        if let Some(p) = &sol.particular {
            members.push(p.clone());
            let combo = sol.kernel_basis.iter().zip(&c).fold(p.clone(), |acc, (k, ci)| &acc + &k.scale(ci));
            members.push(combo);
        }
        for m in &members {
            prop_assert_eq!(orthogonality_residual(&op, &ms, m, n), q("0"));
        }
    }

    #[test]
    fn verdict_matches_oracle_on_legendre(op in operator(), n in 0usize..=8) {
        let ms = classical_moments(&ClassicalMeasure::legendre(), 2 * n + 1).unwrap();
        let r = solver::normality_report(&op, &ms, n).unwrap();
        prop_assert_eq!(r.verdict, r.oracle_verdict);
    }

    #[test]
    fn zero_eigenvalue_breaks_uniqueness(op in operator(), n in 1usize..8) {
        // shift ρ_0 so that λ_n = 0
        let shifted = {
            let mut rho = op.rho().to_vec();
            rho[0] = &rho[0] - &Polynomial::constant(op.lambda(n));
            ExactlySolvableOperator::new(rho).unwrap()
        };
        prop_assert!(shifted.lambda(n).is_zero());
        let ms = classical_moments(&ClassicalMeasure::Hermite, 2 * n + 1).unwrap();
        let sol = solver::solve_index(&shifted, &ms, n).unwrap();
        prop_assert!(sol.particular.is_none() || !sol.kernel_basis.is_empty());
    }

    #[test]
    fn polar_derivative_identity(coeffs in proptest::collection::vec(rat(), 0..10), zeta in rat()) {
        let mut c = coeffs;
        c.push(q("1"));
        let p_n = Polynomial::new(c);
        let n = p_n.degree().unwrap();
        let qn = polar::polar_from(&p_n, &zeta).unwrap();
        let pi = &Polynomial::new(vec![-zeta.clone(), q("1")]) * &qn;
        prop_assert_eq!(pi.differentiate(1), p_n.scale(&Rational::from_integer((n as i64 + 1).into())));
        prop_assert!(qn.is_monic());
    }

    #[test]
    fn roots_are_deterministic_and_satisfy_vieta(coeffs in proptest::collection::vec(-5.0f64..5.0, 2..12), seed in 0u64..50) {
        let mut c = coeffs;
        c.push(1.0);
        let p = Polynomial::new(c);
        let a = zeros::roots(&p, seed).unwrap();
        let b = zeros::roots(&p, seed).unwrap();
        prop_assert_eq!(&a, &b);
        let pc = p.map(|x| Complex64::new(*x, 0.0));
        prop_assert!(zeros::vieta_error(&pc, &a) < 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn joukowski_branch(re in -4.0f64..4.0, im in -4.0f64..4.0) {
        prop_assume!(im.abs() > 1e-9 || re.abs() > 1.0 + 1e-9);
        let u = polar::joukowski(Complex64::new(re, im));
        prop_assert!(u.norm() > 1.0);
        let back = (u + u.inv()) / 2.0;
        prop_assert!((back - Complex64::new(re, im)).norm() < 1e-9 * (1.0 + u.norm()));
    }
}

#[test]
fn orthogonality_certificate_for_classical_measures() {
    for m in classical_measures() {
        let ms = classical_moments(&m, 25).unwrap();
        let fam = OrthogonalFamily::new(&ms, 12).unwrap();
        for n in 0..=12 {
            let pn = fam.get(n).unwrap();
            for k in 0..n {
                assert!(ms.pair(pn, fam.get(k).unwrap()).unwrap().is_zero(), "{m:?}: <P_{n}, P_{k}> != 0");
            }
            assert!(ms.pair(pn, pn).unwrap() > q("0"));
            assert!(hankel_det(&ms, n).unwrap() > q("0"), "{m:?}: hankel determinant {n}");
        }
    }
}

#[test]
fn unique_operators_solve_to_forty() {
    // ρ_0 = 1/3 keeps λ_n = n(n−1) + 2n + 1/3 away from zero
    let op = ExactlySolvableOperator::parse(&[&["1/3"], &["1", "2"], &["0", "0", "1"]]).unwrap();
    assert!((0..=40).all(|n| !op.lambda(n).is_zero()));
    let ms = classical_moments(&ClassicalMeasure::legendre(), 81).unwrap();
    for n in 0..=40 {
        let sol = solver::solve_index(&op, &ms, n).unwrap();
        assert!(sol.particular.is_some() && sol.kernel_basis.is_empty(), "n = {n}");
    }
}

#[test]
fn classical_membership_and_perturbation() {
    for (op, m) in classical_pairs() {
        let ds = solver::generate_systq(&op);
        let ms = classical_moments(&m, 44).unwrap();
        let r = solver::check_membership(&ds, &ms, 40).unwrap();
        assert!(r.pass && r.checked_up_to.unwrap() >= 30, "{m:?}: {r:?}");
        let mut values = ms.values().to_vec();
        values[2] = &values[2] + q("1");
        let bumped = MomentSequence::explicit(values).unwrap();
        let r = solver::check_membership(&ds, &bumped, 40).unwrap();
        let v = r.first_violation.unwrap_or_else(|| panic!("{m:?}: perturbation not detected"));
        // the first equation reading μ_2 sits at n ≤ 2
        assert!(v.n <= 2, "{m:?}: first violation at {}", v.n);
    }
}

#[test]
fn bernstein_szego_tail_structure() {
    for rho in [vec!["2", "-1"], vec!["5/2", "1"], vec!["2", "-1/3", "-1/3"], vec!["3", "0", "1"]] {
        let bs = BernsteinSzegoMeasure::from_rho(Polynomial::parse_strs(&rho).unwrap()).unwrap();
        let m = bs.m();
        let ms = bs.moments_extended(41, 1e-40).unwrap();
        let fam = OrthogonalFamily::new(&ms, 20).unwrap();
        let model = bs.model().unwrap();
        let mut prev: Option<f64> = None;
        for n in m + 1..=20 {
            let tail = polar::chebyshev_tail(fam.get(n).unwrap(), m).unwrap();
            assert_eq!(tail.len(), m + 1);
            assert!((tail[0].to_f64() - 1.0).abs() < 1e-30);
            let gap = tail.iter().zip(&model.limits).map(|(b, l)| (b.to_f64() - l.re).abs()).fold(0.0, f64::max);
            if n > 2 * m {
                if let Some(p) = prev {
                    assert!(gap <= 1.5 * p + 1e-14, "rho {rho:?}: gap grew at n = {n}: {gap:e} > {p:e}");
                }
                prev = Some(gap);
            }
        }
    }
}
