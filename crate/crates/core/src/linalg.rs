//! Fraction-free row reduction over ℚ.
//!
//! Rows are cleared of denominators up front and every elimination step is
//! an integer combination `pivot·row − entry·pivot_row` followed by removal
//! of the row content, so no rational arithmetic happens inside the sweep.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

fn integer_row(row: &[BigRational]) -> Vec<BigInt> {
    let den = row.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    row.iter().map(|c| c.numer() * (&den / c.denom())).collect()
}

fn make_primitive(row: &mut [BigInt]) {
    let g = row.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
    if !g.is_zero() && !g.is_one() {
        for c in row.iter_mut() {
            *c = &*c / &g;
        }
    }
}

/// Reduced echelon form: `(rows, pivot_columns)`; zero rows are dropped and
/// each pivot row is the only row with a nonzero entry in its pivot column.
pub fn echelon(rows: &[Vec<BigRational>], ncols: usize) -> (Vec<Vec<BigInt>>, Vec<usize>) {
    let mut m: Vec<Vec<BigInt>> = rows
        .iter()
        .map(|r| {
            assert_eq!(r.len(), ncols, "ragged matrix");
            integer_row(r)
        })
        .filter(|r| r.iter().any(|c| !c.is_zero()))
        .collect();
    for r in m.iter_mut() {
        make_primitive(r);
    }
    let mut pivots = Vec::new();
    let mut rank = 0;
    for col in 0..ncols {
        let Some(p) = (rank..m.len()).find(|&i| !m[i][col].is_zero()) else {
            continue;
        };
        m.swap(rank, p);
        let pivot_row = m[rank].clone();
        let piv = &pivot_row[col];
        for (i, row) in m.iter_mut().enumerate() {
            if i == rank || row[col].is_zero() {
                continue;
            }
            let e = row[col].clone();
            for (c, pc) in row.iter_mut().zip(&pivot_row) {
                *c = &*c * piv - &e * pc;
            }
            make_primitive(row);
        }
        pivots.push(col);
        rank += 1;
        m.retain(|r| r.iter().any(|c| !c.is_zero()));
    }
    m.truncate(rank);
    (m, pivots)
}

#[cfg(test)]
pub fn rank(rows: &[Vec<BigRational>], ncols: usize) -> usize {
    echelon(rows, ncols).1.len()
}

/// A basis of `{v : M·v = 0}`, one vector per free column, with a `1` in
/// that column.
pub fn nullspace(rows: &[Vec<BigRational>], ncols: usize) -> Vec<Vec<BigRational>> {
    let (m, pivots) = echelon(rows, ncols);
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![BigRational::zero(); ncols];
            v[f] = BigRational::one();
            for (row, &pc) in m.iter().zip(&pivots) {
                if !row[f].is_zero() {
                    v[pc] = -BigRational::new(row[f].clone(), row[pc].clone());
                }
            }
            v
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn mat(rows: &[&[i64]]) -> Vec<Vec<BigRational>> {
        rows.iter()
            .map(|r| r.iter().map(|&c| q(c, 1)).collect())
            .collect()
    }

    fn apply(rows: &[Vec<BigRational>], v: &[BigRational]) -> Vec<BigRational> {
        rows.iter()
            .map(|r| r.iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    #[test]
    fn rank_of_small_matrices() {
        assert_eq!(rank(&mat(&[&[1, 2], &[2, 4]]), 2), 1);
        assert_eq!(rank(&mat(&[&[1, 2], &[3, 4]]), 2), 2);
        assert_eq!(rank(&mat(&[&[0, 0]]), 2), 0);
        assert_eq!(rank(&[], 3), 0);
    }

    #[test]
    fn nullspace_vectors_are_in_kernel() {
        let m = vec![
            vec![q(1, 2), q(1, 3), q(1, 1), q(0, 1)],
            vec![q(2, 1), q(-1, 5), q(0, 1), q(7, 3)],
        ];
        let ns = nullspace(&m, 4);
        assert_eq!(ns.len(), 2);
        for v in &ns {
            assert!(apply(&m, v).iter().all(|c| c.is_zero()));
        }
    }

    #[test]
    fn zero_column_is_free() {
        let ns = nullspace(&mat(&[&[0, 1, 0], &[0, 0, 1]]), 3);
        assert_eq!(ns, vec![vec![q(1, 1), q(0, 1), q(0, 1)]]);
    }
}
