use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::exact::Rational;
use crate::linalg::{ExactMatrix, FloatMatrix};

pub const DEFAULT_POWER_ITERATIONS: usize = 10_000;

/// Operator norm for the sup norm: the largest absolute row sum.
pub fn op_norm_inf_exact(p: &ExactMatrix) -> Rational {
    p.row_iter()
        .map(|row| row.iter().map(Signed::abs).sum::<Rational>())
        .max()
        .unwrap_or_else(Rational::zero)
}

pub fn op_norm_inf_float(p: &FloatMatrix) -> f64 {
    p.row_iter()
        .map(|row| row.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Largest singular value by power iteration on `PᵀP`.
///
/// Starts from the all-ones vector; if that lies in the kernel, retries
/// from a fixed non-symmetric perturbation. Convergence is declared when
/// successive estimates of `σ²` agree to relative tolerance `tol`.
pub fn op_norm_2(p: &FloatMatrix, tol: f64, max_iter: usize) -> Result<f64> {
    if p.is_empty() {
        return Err(Error::InvalidInput("empty matrix".into()));
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidInput(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let n = p.cols();
    let apply = |v: &[f64]| -> Vec<f64> {
        let pv = p.mul_vec(v).expect("square shapes");
        p.tr_mul_vec(&pv).expect("square shapes")
    };

    let starts = [
        vec![1.0; n],
        (0..n)
            .map(|i| 1.0 + (i + 1) as f64 / (n + 1) as f64)
            .collect::<Vec<_>>(),
    ];
    let mut v = Vec::new();
    for start in starts {
        let s = norm(&start);
        let candidate: Vec<f64> = start.iter().map(|x| x / s).collect();
        if norm(&apply(&candidate)) > 0.0 {
            v = candidate;
            break;
        }
    }
    if v.is_empty() {
        // Both starts annihilated: treat as the zero operator unless some entry is nonzero.
        if p.entries().iter().all(|&x| x == 0.0) {
            return Ok(0.0);
        }
        v = vec![0.0; n];
        let (idx, _) = (0..n)
            .map(|c| (c, p.column(c).iter().map(|x| x * x).sum::<f64>()))
            .fold(
                (0, -1.0),
                |best, cur| if cur.1 > best.1 { cur } else { best },
            );
        v[idx] = 1.0;
    }

    let mut estimate = 0.0f64;
    for _ in 0..max_iter {
        let w = apply(&v);
        let lambda = norm(&w);
        if lambda == 0.0 {
            return Ok(0.0);
        }
        let converged = (lambda - estimate).abs() <= tol * lambda;
        estimate = lambda;
        v = w.iter().map(|x| x / lambda).collect();
        if converged {
            return Ok(estimate.sqrt());
        }
    }
    Err(Error::NonConvergence(max_iter))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;
    use crate::linalg::projection;

    #[test]
    fn inf_norms() {
        assert_eq!(op_norm_inf_exact(&ExactMatrix::identity(3)), rat(1, 1));
        assert_eq!(op_norm_inf_exact(&ExactMatrix::zeros(2, 2)), rat(0, 1));
        let a = ExactMatrix::from_i64_rows(&[[1, 1], [0, 2], [1, 0], [0, 1], [1, 2]]);
        let p = projection(&a).unwrap();
        assert_eq!(op_norm_inf_exact(&p), rat(10, 7));
        let float = op_norm_inf_float(&p.to_float());
        assert!((float - 10.0 / 7.0).abs() <= 1e-12 * 10.0 / 7.0);
    }

    #[test]
    fn spectral_norms() {
        let tol = 1e-12;
        let id = FloatMatrix::identity(4);
        assert!((op_norm_2(&id, tol, 100).unwrap() - 1.0).abs() <= 1e-10);

        let a = ExactMatrix::from_i64_rows(&[[1, 1], [0, 2], [1, 0], [0, 1], [1, 2]]);
        let p = projection(&a).unwrap().to_float();
        assert!((op_norm_2(&p, tol, 1000).unwrap() - 1.0).abs() <= 1e-8);

        let d = FloatMatrix::from_rows(vec![vec![3.0, 0.0], vec![0.0, 1.0]]).unwrap();
        assert!((op_norm_2(&d, tol, 1000).unwrap() - 3.0).abs() <= 1e-9);

        assert_eq!(op_norm_2(&FloatMatrix::zeros(2, 2), tol, 10).unwrap(), 0.0);
    }

    #[test]
    fn degenerate_start_is_perturbed() {
        // All-ones vector lies in the kernel.
        let m = FloatMatrix::from_rows(vec![vec![1.0, -1.0], vec![1.0, -1.0]]).unwrap();
        let s = op_norm_2(&m, 1e-12, 100).unwrap();
        assert!((s - 2.0).abs() <= 1e-9, "{s}");
    }

    #[test]
    fn non_convergence_and_bad_tolerance() {
        let d = FloatMatrix::from_rows(vec![vec![1.0, 0.0], vec![0.0, 0.999]]).unwrap();
        assert_eq!(op_norm_2(&d, 1e-15, 2), Err(Error::NonConvergence(2)));
        assert!(op_norm_2(&d, 0.0, 2).is_err());
    }
}
