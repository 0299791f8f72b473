//! Brute-force normality decision, kept independent of the clause-by-clause
//! test in [`crate::solver::normality_report`].
//!
//! With b the coefficient vector of P_n, the solution space
//! V = {y : deg y ≤ n, L[y] ∈ span(P_n)} has dimension
//! (n + 2) − rank([A | b]), and n is normal iff that dimension is 1.

use nalgebra::DMatrix;

use crate::linalg::{Mat, RANK_TOL};
use crate::poly::Polynomial;
use crate::scalar::{Rational, RealScalar, Scalar};

pub fn solution_space_dimension<T: RealScalar>(a: &Mat<Rational>, p_n: &Polynomial<T>) -> usize {
    let size = a.len();
    let aug: Vec<Vec<T>> = (0..size)
        .map(|r| {
            let mut row: Vec<T> = a[r].iter().map(T::from_rational).collect();
            row.push(p_n.coeff(r));
            row
        })
        .collect();
    let rank = if T::is_exact() { exact_rank(aug) } else { svd_rank(&aug) };
    size + 1 - rank
}

pub fn is_normal<T: RealScalar>(a: &Mat<Rational>, p_n: &Polynomial<T>) -> bool {
    solution_space_dimension(a, p_n) == 1
}

/// Plain Gaussian elimination with exact zero tests.
fn exact_rank<T: Scalar>(mut m: Vec<Vec<T>>) -> usize {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows).find(|&r| !m[r][c].is_zero()) else { continue };
        m.swap(rank, p);
        for r in rank + 1..rows {
            if m[r][c].is_zero() {
                continue;
            }
            let f = m[r][c].clone() / m[rank][c].clone();
            for j in c..cols {
                let v = m[rank][j].clone() * f.clone();
                m[r][j] = m[r][j].clone() - v;
            }
        }
        rank += 1;
        if rank == rows {
            break;
        }
    }
    rank
}

/// Numerical rank from singular values after scaling each column to unit norm.
fn svd_rank<T: RealScalar>(m: &[Vec<T>]) -> usize {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut d = DMatrix::<f64>::from_fn(rows, cols, |r, c| m[r][c].to_f64());
    for mut col in d.column_iter_mut() {
        let norm = col.norm();
        if norm > 0.0 {
            col /= norm;
        }
    }
    let sv = d.singular_values();
    let top = sv.iter().cloned().fold(0.0, f64::max);
    if top == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > RANK_TOL * top).count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::{q, ExactlySolvableOperator};

    #[test]
    fn identity_operator_is_always_normal() {
        let op = ExactlySolvableOperator::identity();
        let p = Polynomial::parse_strs(&["-1/3", "0", "1"]).unwrap();
        assert!(is_normal(&op.build_matrix(2).dense(), &p));
        let pf = p.map(|c| c.to_f64());
        assert!(is_normal(&op.build_matrix(2).dense(), &pf));
    }

    #[test]
    fn kernel_counts_towards_dimension() {
        // f'' − 2x f': L[1] = 0, so every P_n + c solves the problem
        let op = ExactlySolvableOperator::hermite();
        let p = Polynomial::parse_strs(&["0", "-3/2", "0", "1"]).unwrap();
        assert_eq!(solution_space_dimension(&op.build_matrix(3).dense(), &p), 2);
        let _ = q("1");
    }
}
