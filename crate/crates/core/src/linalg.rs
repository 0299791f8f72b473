//! Small dense linear algebra over a [`Scalar`] field.

use crate::scalar::Scalar;

/// Row-major dense matrix.
pub type Mat<T> = Vec<Vec<T>>;

/// Relative threshold below which floating pivots count as zero.
pub const RANK_TOL: f64 = 1e-8;

pub fn zeros<T: Scalar>(rows: usize, cols: usize) -> Mat<T> {
    vec![vec![T::zero(); cols]; rows]
}

pub fn identity<T: Scalar>(n: usize) -> Mat<T> {
    let mut m = zeros(n, n);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = T::one();
    }
    m
}

fn max_abs<T: Scalar>(m: &Mat<T>) -> f64 {
    m.iter().flatten().map(|x| x.magnitude()).fold(0.0, f64::max)
}

/// Determinant. Exact modes use fraction-free Bareiss elimination; floating
/// modes use partial-pivot LU.
pub fn determinant<T: Scalar>(m: &Mat<T>) -> T {
    let n = m.len();
    if n == 0 {
        return T::one();
    }
    let mut a = m.clone();
    let mut negate = false;
    if T::is_exact() {
        let mut prev = T::one();
        for k in 0..n {
            if a[k][k].is_zero() {
                match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                    Some(i) => {
                        a.swap(k, i);
                        negate = !negate;
                    }
                    None => return T::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    a[i][j] = (a[i][j].clone() * a[k][k].clone() - a[i][k].clone() * a[k][j].clone()) / prev.clone();
                }
                a[i][k] = T::zero();
            }
            prev = a[k][k].clone();
        }
        let d = a[n - 1][n - 1].clone();
        if negate {
            -d
        } else {
            d
        }
    } else {
        let mut det = T::one();
        for k in 0..n {
            let p =
                (k..n).max_by(|&i, &j| a[i][k].magnitude().total_cmp(&a[j][k].magnitude())).expect("nonempty range");
            if a[p][k].is_zero() {
                return T::zero();
            }
            if p != k {
                a.swap(k, p);
                negate = !negate;
            }
            let piv = a[k][k].clone();
            for i in k + 1..n {
                let f = a[i][k].clone() / piv.clone();
                for j in k..n {
                    a[i][j] = a[i][j].clone() - f.clone() * a[k][j].clone();
                }
            }
            det = det * piv;
        }
        if negate {
            -det
        } else {
            det
        }
    }
}

/// Solves the square system `m·x = rhs`; `None` when singular.
pub fn solve<T: Scalar>(m: &Mat<T>, rhs: &[T]) -> Option<Vec<T>> {
    let n = m.len();
    let scale = max_abs(m);
    let mut a: Mat<T> = m
        .iter()
        .zip(rhs)
        .map(|(row, b)| {
            let mut r = row.clone();
            r.push(b.clone());
            r
        })
        .collect();
    for k in 0..n {
        let p = if T::is_exact() {
            (k..n).find(|&i| !a[i][k].is_zero())?
        } else {
            (k..n).max_by(|&i, &j| a[i][k].magnitude().total_cmp(&a[j][k].magnitude()))?
        };
        if a[p][k].is_negligible(scale, 1e-14) {
            return None;
        }
        a.swap(k, p);
        for i in 0..n {
            if i != k && !a[i][k].is_zero() {
                let f = a[i][k].clone() / a[k][k].clone();
                for j in k..=n {
                    a[i][j] = a[i][j].clone() - f.clone() * a[k][j].clone();
                }
            }
        }
    }
    Some((0..n).map(|i| a[i][n].clone() / a[i][i].clone()).collect())
}

/// Reduced row echelon form `r = e·m` with its transform `e`.
#[derive(Debug, Clone)]
pub struct Rref<T> {
    pub r: Mat<T>,
    pub e: Mat<T>,
    /// Pivot column of each of the first `rank` rows.
    pub pivots: Vec<usize>,
    pub cols: usize,
}

impl<T: Scalar> Rref<T> {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn free_columns(&self) -> Vec<usize> {
        (0..self.cols).filter(|c| !self.pivots.contains(c)).collect()
    }

    /// Null-space basis, one vector per free column `f`, with entry 1 at `f`
    /// and zeros at every other free column.
    pub fn nullspace(&self) -> Vec<Vec<T>> {
        self.free_columns()
            .into_iter()
            .map(|f| {
                let mut v = vec![T::zero(); self.cols];
                v[f] = T::one();
                for (row, &pc) in self.pivots.iter().enumerate() {
                    v[pc] = -self.r[row][f].clone();
                }
                v
            })
            .collect()
    }
}

pub fn rref<T: Scalar>(m: &Mat<T>) -> Rref<T> {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let scale = max_abs(m);
    let mut r = m.clone();
    let mut e = identity::<T>(rows);
    let mut pivots = Vec::new();
    let mut row = 0;
    for c in 0..cols {
        if row == rows {
            break;
        }
        let cand = if T::is_exact() {
            (row..rows).find(|&i| !r[i][c].is_zero())
        } else {
            (row..rows)
                .max_by(|&i, &j| r[i][c].magnitude().total_cmp(&r[j][c].magnitude()))
                .filter(|&i| !r[i][c].is_negligible(scale, RANK_TOL))
        };
        let Some(p) = cand else { continue };
        r.swap(row, p);
        e.swap(row, p);
        let inv = T::one() / r[row][c].clone();
        for j in 0..cols {
            r[row][j] = r[row][j].clone() * inv.clone();
        }
        for j in 0..rows {
            e[row][j] = e[row][j].clone() * inv.clone();
        }
        for i in 0..rows {
            if i != row && !r[i][c].is_zero() {
                let f = r[i][c].clone();
                for j in 0..cols {
                    r[i][j] = r[i][j].clone() - f.clone() * r[row][j].clone();
                }
                for j in 0..rows {
                    e[i][j] = e[i][j].clone() - f.clone() * e[row][j].clone();
                }
            }
        }
        pivots.push(c);
        row += 1;
    }
    Rref { r, e, pivots, cols }
}

pub fn rank<T: Scalar>(m: &Mat<T>) -> usize {
    rref(m).rank()
}

pub fn mat_vec<T: Scalar>(m: &Mat<T>, v: &[T]) -> Vec<T> {
    m.iter().map(|row| row.iter().zip(v).fold(T::zero(), |acc, (a, b)| acc + a.clone() * b.clone())).collect()
}

/// Determinant and a 1-norm condition estimate ‖m‖₁·‖m⁻¹‖₁ (infinite when singular).
pub fn det_with_condition(m: &Mat<f64>) -> (f64, f64) {
    let n = m.len();
    let det = determinant(m);
    if n == 0 {
        return (det, 1.0);
    }
    let norm1 = |a: &Mat<f64>| (0..n).map(|j| (0..n).map(|i| a[i][j].abs()).sum::<f64>()).fold(0.0, f64::max);
    let mut inv = zeros::<f64>(n, n);
    for j in 0..n {
        let mut ej = vec![0.0; n];
        ej[j] = 1.0;
        match solve(m, &ej) {
            Some(col) => (0..n).for_each(|i| inv[i][j] = col[i]),
            None => return (det, f64::INFINITY),
        }
    }
    (det, norm1(m) * norm1(&inv))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rational_from_str, Rational};

    fn q(s: &str) -> Rational {
        rational_from_str(s).unwrap()
    }

    #[test]
    fn bareiss_matches_cofactor() {
        let m = vec![vec![q("2"), q("-1"), q("0")], vec![q("1/2"), q("3"), q("4")], vec![q("0"), q("0"), q("0")]];
        assert_eq!(determinant(&m), q("0"));
        let m = vec![vec![q("0"), q("1"), q("2")], vec![q("3"), q("4"), q("5")], vec![q("6"), q("7"), q("9")]];
        // cofactor expansion: 0*(36-35) - 1*(27-30) + 2*(21-24) = -3
        assert_eq!(determinant(&m), q("-3"));
        let f: Mat<f64> = m.iter().map(|r| r.iter().map(crate::scalar::RealScalar::to_f64).collect()).collect();
        assert!((determinant(&f) + 3.0).abs() < 1e-12);
    }

    #[test]
    fn rref_nullspace() {
        let m = vec![vec![q("1"), q("2"), q("3")], vec![q("2"), q("4"), q("6")]];
        let r = rref(&m);
        assert_eq!(r.rank(), 1);
        let ns = r.nullspace();
        assert_eq!(ns.len(), 2);
        for v in ns {
            assert!(mat_vec(&m, &v).iter().all(|x| *x == q("0")));
        }
        // transform reproduces r
        for (i, erow) in r.e.iter().enumerate() {
            for j in 0..3 {
                let s = (0..2).fold(q("0"), |acc, k| acc + erow[k].clone() * m[k][j].clone());
                assert_eq!(s, r.r[i][j]);
            }
        }
    }

    #[test]
    fn solve_and_condition() {
        let m = vec![vec![4.0, 1.0], vec![1.0, 3.0]];
        let x = solve(&m, &[1.0, 2.0]).unwrap();
        assert!((4.0 * x[0] + x[1] - 1.0).abs() < 1e-14);
        let (d, c) = det_with_condition(&m);
        assert!((d - 11.0).abs() < 1e-12);
        assert!(c > 1.0 && c < 3.0);
        assert!(solve(&vec![vec![1.0, 2.0], vec![2.0, 4.0]], &[1.0, 1.0]).is_none());
    }
}
