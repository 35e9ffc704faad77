use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::Rational;
use crate::linalg::{rank_exact, solve_exact_multi, ExactMatrix};

/// `AᵀA`, accumulated over rows in order.
pub fn gram(a: &ExactMatrix) -> ExactMatrix {
    let n = a.cols();
    let mut g = ExactMatrix::zeros(n, n);
    for row in a.row_iter() {
        for p in 0..n {
            if row[p].is_zero() {
                continue;
            }
            for q in p..n {
                if !row[q].is_zero() {
                    g[(p, q)] += &row[p] * &row[q];
                }
            }
        }
    }
    for p in 0..n {
        for q in 0..p {
            g[(p, q)] = g[(q, p)].clone();
        }
    }
    g
}

fn require_full_column_rank(a: &ExactMatrix) -> Result<()> {
    if a.is_empty() {
        return Err(Error::InvalidInput("empty matrix".into()));
    }
    let rank = rank_exact(a);
    if rank < a.cols() {
        return Err(Error::RankDeficient {
            rank,
            cols: a.cols(),
        });
    }
    Ok(())
}

/// Moore–Penrose inverse `(AᵀA)⁻¹Aᵀ` of a full-column-rank matrix.
/// Rank-deficient input is an error, never silently regularized.
pub fn pseudoinverse(a: &ExactMatrix) -> Result<ExactMatrix> {
    require_full_column_rank(a)?;
    solve_exact_multi(&gram(a), &a.transpose())
}

/// Orthogonal projection `A A⁺` onto the column space of `A`.
pub fn projection(a: &ExactMatrix) -> Result<ExactMatrix> {
    let pinv = pseudoinverse(a)?;
    a.matmul(&pinv)
}

/// Outcome of the four Penrose identities, in the usual order:
/// `AXA = A`, `XAX = X`, `(AX)ᵀ = AX`, `(XA)ᵀ = XA`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PenroseReport {
    pub identities: [bool; 4],
}

impl PenroseReport {
    pub fn all_hold(&self) -> bool {
        self.identities.iter().all(|&b| b)
    }

    /// 1-based indices of the identities that fail.
    pub fn falsified(&self) -> Vec<usize> {
        (0..4)
            .filter(|&i| !self.identities[i])
            .map(|i| i + 1)
            .collect()
    }
}

pub fn penrose_check(a: &ExactMatrix, x: &ExactMatrix) -> Result<PenroseReport> {
    if x.rows() != a.cols() || x.cols() != a.rows() {
        return Err(Error::mismatch(
            format!("{} x {} candidate inverse", a.cols(), a.rows()),
            format!("{} x {}", x.rows(), x.cols()),
        ));
    }
    let ax = a.matmul(x)?;
    let xa = x.matmul(a)?;
    Ok(PenroseReport {
        identities: [
            ax.matmul(a)? == *a,
            xa.matmul(x)? == *x,
            ax.transpose() == ax,
            xa.transpose() == xa,
        ],
    })
}

/// Trace of a square matrix.
pub fn trace(m: &ExactMatrix) -> Rational {
    (0..m.rows().min(m.cols())).map(|i| m[(i, i)].clone()).sum()
}


/// `‖A A⁺‖_∞` without materializing the projection.
///
/// Columns are first scaled to integers (the column space, hence the
/// projection, is unchanged). With `G⁻¹ = K / D` for an integer matrix `K`
/// and integer `D`, `P_ij = r_i K r_jᵀ / D`, so each row sum needs one
/// integer matrix-vector product per row pair.
pub fn projection_norm_inf_exact(a: &ExactMatrix) -> Result<Rational> {
    use num_bigint::BigInt;
    use num_integer::Integer;
    use num_traits::{One, Signed};

    require_full_column_rank(a)?;
    let cols = a.cols();
    let scales: Vec<BigInt> = (0..cols)
        .map(|c| (0..a.rows()).fold(BigInt::one(), |acc, r| acc.lcm(a[(r, c)].denom())))
        .collect();
    let int_rows: Vec<Vec<BigInt>> = a
        .row_iter()
        .map(|row| {
            row.iter()
                .zip(&scales)
                .map(|(v, s)| v.numer() * (s / v.denom()))
                .collect()
        })
        .collect();
    let scaled = ExactMatrix::from_fn(a.rows(), cols, |r, c| {
        Rational::from_integer(int_rows[r][c].clone())
    });
    let inverse = solve_exact_multi(&gram(&scaled), &ExactMatrix::identity(cols))?;
    let denom = inverse
        .entries()
        .iter()
        .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
    let kernel: Vec<Vec<BigInt>> = inverse
        .row_iter()
        .map(|row| {
            row.iter()
                .map(|v| v.numer() * (&denom / v.denom()))
                .collect()
        })
        .collect();
    let mut best = BigInt::zero();
    for r_i in &int_rows {
        let u: Vec<BigInt> = kernel
            .iter()
            .map(|k_row| k_row.iter().zip(r_i).map(|(k, x)| k * x).sum())
            .collect();
        let row_sum: BigInt = int_rows
            .iter()
            .map(|r_j| r_j.iter().zip(&u).map(|(x, y)| x * y).sum::<BigInt>().abs())
            .sum();
        if row_sum > best {
            best = row_sum;
        }
    }
    Ok(Rational::new(best, denom))
}

/// Float projection `A (AᵀA)⁻¹ Aᵀ` for instances too large to hold exactly.
/// The rank is still checked exactly.
pub fn projection_float(a: &ExactMatrix) -> Result<crate::linalg::FloatMatrix> {
    require_full_column_rank(a)?;
    let af = a.to_float();
    let g = gram(a).to_float();
    let ginv = float_inverse(&g)?;
    let pinv = ginv.matmul(&af.transpose())?;
    af.matmul(&pinv)
}

fn float_inverse(g: &crate::linalg::FloatMatrix) -> Result<crate::linalg::FloatMatrix> {
    let n = g.rows();
    let mut m = crate::linalg::FloatMatrix::from_fn(n, 2 * n, |r, c| {
        if c < n {
            g[(r, c)]
        } else if c - n == r {
            1.0
        } else {
            0.0
        }
    });
    for col in 0..n {
        let p = (col..n)
            .max_by(|&x, &y| m[(x, col)].abs().total_cmp(&m[(y, col)].abs()))
            .expect("nonempty range");
        if m[(p, col)] == 0.0 {
            return Err(Error::Singular);
        }
        for c in 0..2 * n {
            let t = m[(p, c)];
            m[(p, c)] = m[(col, c)];
            m[(col, c)] = t;
        }
        let piv = m[(col, col)];
        for c in 0..2 * n {
            m[(col, c)] /= piv;
        }
        for r in 0..n {
            if r != col {
                let f = m[(r, col)];
                if f != 0.0 {
                    for c in 0..2 * n {
                        m[(r, c)] -= f * m[(col, c)];
                    }
                }
            }
        }
    }
    Ok(crate::linalg::FloatMatrix::from_fn(n, n, |r, c| {
        m[(r, c + n)]
    }))
}

#[cfg(test)]
mod projection_norm_tests {
    use super::*;
    use crate::exact::rat;
    use crate::linalg::op_norm_inf_exact;
    use crate::sequences::{build_matrix, Convention, ResidueSpec};

    #[test]
    fn matches_materialized_projection() {
        for (n, conv) in [
            (3, Convention::Residue),
            (4, Convention::Fractional),
            (5, Convention::Residue),
        ] {
            let a = build_matrix(&ResidueSpec::full_period(n, conv).unwrap()).unwrap();
            let direct = op_norm_inf_exact(&projection(&a).unwrap());
            assert_eq!(projection_norm_inf_exact(&a).unwrap(), direct, "n = {n}");
        }
        let a = build_matrix(&ResidueSpec::new(3, 5, Convention::Residue).unwrap()).unwrap();
        assert_eq!(projection_norm_inf_exact(&a).unwrap(), rat(10, 7));
    }

    #[test]
    fn float_projection_mirrors_exact() {
        let a = build_matrix(&ResidueSpec::full_period(4, Convention::Residue).unwrap()).unwrap();
        let exact = projection(&a).unwrap().to_float();
        let float = projection_float(&a).unwrap();
        for (e, f) in exact.entries().iter().zip(float.entries()) {
            assert!((e - f).abs() < 1e-12);
        }
    }
}
