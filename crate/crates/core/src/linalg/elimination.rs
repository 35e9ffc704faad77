//! Fraction-free (Bareiss) elimination on integer-scaled rows.
//!
//! Each row of a rational matrix is multiplied by the lcm of its
//! denominators, which changes neither the rank nor the solution set of a
//! linear system. Pivots are the first nonzero entry in column order so
//! that elimination transcripts are reproducible.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exact::Rational;
use crate::linalg::{gram, ExactMatrix};

fn integer_rows(m: &ExactMatrix) -> Vec<Vec<BigInt>> {
    m.row_iter()
        .map(|row| {
            let scale = row.iter().fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
            row.iter()
                .map(|v| v.numer() * (&scale / v.denom()))
                .collect()
        })
        .collect()
}

/// Row echelon form in place; returns the pivot column of each pivot row.
fn bareiss(rows: &mut [Vec<BigInt>], pivot_limit: usize) -> Vec<usize> {
    let height = rows.len();
    let width = rows.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut prev = BigInt::one();
    for col in 0..pivot_limit.min(width) {
        let rank = pivots.len();
        if rank == height {
            break;
        }
        let Some(p) = (rank..height).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, p);
        let (head, tail) = rows.split_at_mut(rank + 1);
        let pivot_row = &head[rank];
        let pivot = &pivot_row[col];
        for row in tail.iter_mut() {
            let factor = row[col].clone();
            for c in col + 1..width {
                let v = &row[c] * pivot - &factor * &pivot_row[c];
                // Exact by Sylvester's identity.
                row[c] = v / &prev;
            }
            row[col] = BigInt::zero();
        }
        prev = pivot_row[col].clone();
        pivots.push(col);
    }
    pivots
}

fn rank_direct(m: &ExactMatrix) -> usize {
    let mut rows = integer_rows(m);
    bareiss(&mut rows, m.cols()).len()
}

/// Exact rank over the rationals.
///
/// Tall matrices go through the Gram matrix: `rank(AᵀA) = rank(A)` for real
/// (hence rational) `A`, and `AᵀA` is only `cols x cols`.
pub fn rank_exact(m: &ExactMatrix) -> usize {
    if m.rows() > m.cols() {
        rank_direct(&gram(m))
    } else {
        rank_direct(m)
    }
}

/// Solve `S X = B` for square `S` and any number of right-hand sides.
pub fn solve_exact_multi(s: &ExactMatrix, b: &ExactMatrix) -> Result<ExactMatrix> {
    let n = s.rows();
    if s.cols() != n {
        return Err(Error::mismatch(
            "square matrix",
            format!("{} x {}", n, s.cols()),
        ));
    }
    if b.rows() != n {
        return Err(Error::mismatch(
            format!("{n} right-hand-side rows"),
            b.rows(),
        ));
    }
    let rhs_cols = b.cols();
    let augmented = ExactMatrix::from_fn(n, n + rhs_cols, |r, c| {
        if c < n {
            s[(r, c)].clone()
        } else {
            b[(r, c - n)].clone()
        }
    });
    let mut rows = integer_rows(&augmented);
    let pivots = bareiss(&mut rows, n);
    if pivots.len() < n {
        return Err(Error::Singular);
    }
    // Upper triangular with pivots on the diagonal; back-substitute.
    let mut x = ExactMatrix::zeros(n, rhs_cols);
    for j in 0..rhs_cols {
        for r in (0..n).rev() {
            let mut acc = Rational::from_integer(rows[r][n + j].clone());
            for c in r + 1..n {
                if !rows[r][c].is_zero() {
                    acc -= Rational::from_integer(rows[r][c].clone()) * &x[(c, j)];
                }
            }
            x[(r, j)] = acc / Rational::from_integer(rows[r][r].clone());
        }
    }
    Ok(x)
}

pub fn solve_exact(s: &ExactMatrix, b: &[Rational]) -> Result<Vec<Rational>> {
    let x = solve_exact_multi(s, &ExactMatrix::column_vector(b))?;
    Ok(x.column(0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, rat};

    #[test]
    fn ranks() {
        let a = ExactMatrix::from_i64_rows(&[[1, 1], [0, 2], [1, 0], [0, 1], [1, 2]]);
        assert_eq!(rank_exact(&a), 2);
        assert_eq!(rank_exact(&ExactMatrix::zeros(3, 2)), 0);
        assert_eq!(rank_exact(&ExactMatrix::identity(4)), 4);
        let dependent = ExactMatrix::from_i64_rows(&[[1, 2, 3], [2, 4, 6], [1, 0, 1]]);
        assert_eq!(rank_exact(&dependent), 2);
        // Wide matrices use direct elimination.
        let wide = ExactMatrix::from_i64_rows(&[[0, 0, 1, 2], [0, 0, 2, 4]]);
        assert_eq!(rank_exact(&wide), 1);
    }

    #[test]
    fn rank_with_fractions() {
        let a =
            ExactMatrix::from_rows(vec![vec![rat(1, 2), rat(1, 3)], vec![rat(1, 4), rat(1, 6)]])
                .unwrap();
        assert_eq!(rank_exact(&a), 1);
    }

    #[test]
    fn solves_gram_system() {
        let s = ExactMatrix::from_i64_rows(&[[3, 3], [3, 10]]);
        let x = solve_exact(&s, &[int(3), int(6)]).unwrap();
        assert_eq!(x, vec![rat(4, 7), rat(3, 7)]);
    }

    #[test]
    fn identity_solve_returns_rhs() {
        let b = vec![rat(-5, 3), int(0), rat(9, 2)];
        assert_eq!(solve_exact(&ExactMatrix::identity(3), &b).unwrap(), b);
    }

    #[test]
    fn needs_row_swap() {
        let s = ExactMatrix::from_i64_rows(&[[0, 1], [2, 0]]);
        assert_eq!(
            solve_exact(&s, &[int(3), int(4)]).unwrap(),
            vec![int(2), int(3)]
        );
    }

    #[test]
    fn singular_is_reported() {
        let s = ExactMatrix::from_i64_rows(&[[1, 2], [2, 4]]);
        assert_eq!(solve_exact(&s, &[int(1), int(2)]), Err(Error::Singular));
        assert!(solve_exact(&ExactMatrix::zeros(2, 3), &[int(1), int(2)]).is_err());
    }

    #[test]
    fn inverse_via_multi_rhs() {
        let s = ExactMatrix::from_rows(vec![
            vec![rat(1, 2), rat(1, 3), int(1)],
            vec![int(0), rat(2, 5), int(-1)],
            vec![int(4), int(1), rat(1, 7)],
        ])
        .unwrap();
        let inv = solve_exact_multi(&s, &ExactMatrix::identity(3)).unwrap();
        assert_eq!(s.matmul(&inv).unwrap(), ExactMatrix::identity(3));
    }
}
