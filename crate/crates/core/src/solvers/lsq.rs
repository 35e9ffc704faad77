use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::Rational;
use crate::linalg::{gram, rank_exact, solve_exact, ExactMatrix, FloatMatrix};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LsqResult {
    #[serde(serialize_with = "crate::exact::serde_rational::serialize_vec")]
    pub coefficients: Vec<Rational>,
    /// `A a - c`.
    #[serde(serialize_with = "crate::exact::serde_rational::serialize_vec")]
    pub residual: Vec<Rational>,
}

/// `a = A⁺c` from the normal equations `AᵀA a = Aᵀc`, exactly.
pub fn lsq_unweighted(a: &ExactMatrix, c: &[Rational]) -> Result<LsqResult> {
    if a.rows() != c.len() {
        return Err(Error::mismatch(format!("{} targets", a.rows()), c.len()));
    }
    let coefficients = match solve_exact(&gram(a), &a.tr_mul_vec(c)?) {
        Ok(x) => x,
        Err(Error::Singular) => {
            return Err(Error::RankDeficient {
                rank: rank_exact(a),
                cols: a.cols(),
            })
        }
        Err(e) => return Err(e),
    };
    let residual = a
        .mul_vec(&coefficients)?
        .into_iter()
        .zip(c)
        .map(|(ax, ci)| ax - ci)
        .collect();
    Ok(LsqResult {
        coefficients,
        residual,
    })
}

/// Cholesky factor of a symmetric positive definite matrix, row-major lower.
pub(crate) fn cholesky(s: &FloatMatrix) -> Result<FloatMatrix> {
    let n = s.rows();
    let mut l = FloatMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let mut acc = s[(i, j)];
            for k in 0..j {
                acc -= l[(i, k)] * l[(j, k)];
            }
            if i == j {
                if acc.is_nan() || acc <= 0.0 {
                    return Err(Error::Singular);
                }
                l[(i, i)] = acc.sqrt();
            } else {
                l[(i, j)] = acc / l[(j, j)];
            }
        }
    }
    Ok(l)
}

pub(crate) fn cholesky_solve(l: &FloatMatrix, b: &[f64]) -> Vec<f64> {
    let n = l.rows();
    let mut y = vec![0.0; n];
    for i in 0..n {
        let s: f64 = (0..i).map(|k| l[(i, k)] * y[k]).sum();
        y[i] = (b[i] - s) / l[(i, i)];
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|k| l[(k, i)] * x[k]).sum();
        x[i] = (y[i] - s) / l[(i, i)];
    }
    x
}

/// Float mirror of [`lsq_unweighted`]; returns coefficients only. Rank is
/// not decided here: a non-positive pivot is reported as `Singular`.
pub fn lsq_unweighted_float(a: &FloatMatrix, c: &[f64]) -> Result<Vec<f64>> {
    if a.rows() != c.len() {
        return Err(Error::mismatch(format!("{} targets", a.rows()), c.len()));
    }
    let g = a.transpose().matmul(a)?;
    let l = cholesky(&g)?;
    Ok(cholesky_solve(&l, &a.tr_mul_vec(c)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, rat, to_f64};

    fn a3() -> ExactMatrix {
        ExactMatrix::from_i64_rows(&[[1, 1], [0, 2], [1, 0], [0, 1], [1, 2]])
    }

    #[test]
    fn n3_golden_values() {
        let r = lsq_unweighted(&a3(), &vec![int(1); 5]).unwrap();
        assert_eq!(r.coefficients, vec![rat(4, 7), rat(3, 7)]);
        assert_eq!(
            r.residual,
            vec![int(0), rat(-1, 7), rat(-3, 7), rat(-4, 7), rat(3, 7)]
        );
    }

    #[test]
    fn trivial_and_consistent() {
        let one = ExactMatrix::from_i64_rows(&[[1]]);
        let r = lsq_unweighted(&one, &[int(1)]).unwrap();
        assert_eq!((r.coefficients, r.residual), (vec![int(1)], vec![int(0)]));

        let a = a3();
        let c = a.mul_vec(&[int(1), int(1)]).unwrap();
        let r = lsq_unweighted(&a, &c).unwrap();
        assert!(r.residual.iter().all(|v| *v == int(0)));
    }

    #[test]
    fn rank_deficient() {
        let a = ExactMatrix::from_i64_rows(&[[1, 2], [2, 4], [0, 0]]);
        assert_eq!(
            lsq_unweighted(&a, &vec![int(1); 3]),
            Err(Error::RankDeficient { rank: 1, cols: 2 })
        );
    }

    #[test]
    fn float_path_agrees() {
        let a = a3();
        let exact = lsq_unweighted(&a, &vec![int(1); 5]).unwrap();
        let float = lsq_unweighted_float(&a.to_float(), &[1.0; 5]).unwrap();
        for (e, f) in exact.coefficients.iter().zip(&float) {
            assert!((to_f64(e) - f).abs() <= 1e-12);
        }
    }
}
