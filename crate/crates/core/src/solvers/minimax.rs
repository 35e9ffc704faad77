//! Chebyshev fit `min_a max_i |(A a - c)_i|`.
//!
//! Solved through its LP dual, which has only `cols + 1` equality rows:
//!
//! ```text
//! min  Σ c_i (p_i - q_i)
//! s.t. Σ (p_i + q_i) = 1,   Aᵀ(q - p) = 0,   p, q ≥ 0
//! ```
//!
//! The simplex multipliers of an optimal basis are `(-t, -a)`, where `t` is
//! the optimal level and `a` the primal coefficients. Every basic column is
//! a primal constraint that holds with equality, which yields the
//! equioscillation-style certificate of at least `cols + 1` active rows.

use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::Rational;
use crate::linalg::{solve_exact, ExactMatrix, FloatMatrix, Matrix};
use crate::sequences::{build_matrix, constant_vector, Convention, ResidueSpec};
use crate::solvers::simplex::{solve, LpScalar, StandardForm};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MinimaxOptions {
    /// Instances with at most this many rows pivot in exact arithmetic.
    pub exact_threshold: usize,
    pub max_iterations: usize,
}

impl Default for MinimaxOptions {
    fn default() -> Self {
        Self {
            exact_threshold: 1000,
            max_iterations: 1_000_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolvePath {
    Exact,
    /// Float pivots whose final basis passed the exact certificate check.
    FloatVerified,
    /// Float basis failed the exact check; re-solved exactly.
    FloatFallback,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MinimaxResult {
    #[serde(serialize_with = "crate::exact::serde_rational::serialize_vec")]
    pub coefficients: Vec<Rational>,
    /// `max_i |(A a - c)_i|` for the returned `a`, exactly.
    #[serde(serialize_with = "crate::exact::serde_rational::serialize")]
    pub eps_star: Rational,
    /// 1-based rows where the residual magnitude equals `eps_star`.
    pub active_rows: Vec<usize>,
    pub iterations: usize,
    pub path: SolvePath,
}

/// Unverified output of the float pivoting path.
#[derive(Debug, Clone, PartialEq)]
pub struct FloatFit {
    pub eps_star: f64,
    pub coefficients: Vec<f64>,
    pub basis: Vec<usize>,
    pub iterations: usize,
}

fn dual_lp<T: LpScalar>(a: &Matrix<T>, target: &[T]) -> StandardForm<T> {
    let (rows, cols) = (a.rows(), a.cols());
    let constraints = Matrix::from_fn(cols + 1, 2 * rows, |r, j| {
        let (i, is_q) = (j / 2, j % 2 == 1);
        if r == 0 {
            T::lp_one()
        } else if is_q {
            a[(i, r - 1)].clone()
        } else {
            T::lp_zero().sub(&a[(i, r - 1)])
        }
    });
    let cost = (0..2 * rows)
        .map(|j| {
            let c = &target[j / 2];
            if j % 2 == 1 {
                T::lp_zero().sub(c)
            } else {
                c.clone()
            }
        })
        .collect();
    let mut rhs = vec![T::lp_zero(); cols + 1];
    rhs[0] = T::lp_one();
    StandardForm {
        constraints,
        cost,
        rhs,
    }
}

fn check_shapes<T>(a: &Matrix<T>, target: &[T]) -> Result<()> {
    if a.is_empty() {
        return Err(Error::InvalidInput("empty matrix".into()));
    }
    if a.rows() != target.len() {
        return Err(Error::mismatch(
            format!("{} targets", a.rows()),
            target.len(),
        ));
    }
    Ok(())
}

pub fn chebyshev_fit_float_raw(
    a: &FloatMatrix,
    target: &[f64],
    max_iterations: usize,
) -> Result<FloatFit> {
    check_shapes(a, target)?;
    let out = solve(&dual_lp(a, target), max_iterations)?;
    Ok(FloatFit {
        eps_star: -out.duals[0],
        coefficients: out.duals[1..].iter().map(|y| -y).collect(),
        basis: out.basis,
        iterations: out.iterations,
    })
}

/// Recover `(t, a)` from a basis exactly and check it is optimal: the dual
/// point must be feasible (all basic values nonnegative, artificials zero)
/// and the primal point must satisfy every constraint.
fn certify_basis(
    lp: &StandardForm<Rational>,
    basis: &[usize],
) -> Option<(Rational, Vec<Rational>)> {
    let m = lp.rhs.len();
    let n = lp.cost.len();
    let column = |j: usize| -> Vec<Rational> {
        if j < n {
            lp.constraints.column(j)
        } else {
            (0..m)
                .map(|r| {
                    if r == j - n {
                        Rational::from_integer(1.into())
                    } else {
                        Rational::zero()
                    }
                })
                .collect()
        }
    };
    let cols: Vec<Vec<Rational>> = basis.iter().map(|&j| column(j)).collect();
    let b = ExactMatrix::from_fn(m, m, |r, c| cols[c][r].clone());
    let x = solve_exact(&b, &lp.rhs).ok()?;
    for (&j, v) in basis.iter().zip(&x) {
        if v.is_negative() || (j >= n && !v.is_zero()) {
            return None;
        }
    }
    let basic_cost: Vec<Rational> = basis
        .iter()
        .map(|&j| {
            if j < n {
                lp.cost[j].clone()
            } else {
                Rational::zero()
            }
        })
        .collect();
    let y = solve_exact(&b.transpose(), &basic_cost).ok()?;
    // Bᵀy ≤ g on every structural column.
    for j in 0..n {
        let lhs: Rational = lp
            .constraints
            .column(j)
            .iter()
            .zip(&y)
            .map(|(a, yk)| a * yk)
            .sum();
        if lhs > lp.cost[j] {
            return None;
        }
    }
    let t = -y[0].clone();
    let coefficients = y[1..].iter().map(|v| -v.clone()).collect();
    Some((t, coefficients))
}

fn finish(
    a: &ExactMatrix,
    target: &[Rational],
    level: Rational,
    coefficients: Vec<Rational>,
    iterations: usize,
    path: SolvePath,
) -> Result<MinimaxResult> {
    let residual: Vec<Rational> = a
        .mul_vec(&coefficients)?
        .into_iter()
        .zip(target)
        .map(|(ax, c)| ax - c)
        .collect();
    let eps_star = crate::exact::max_abs(&residual);
    if eps_star != level {
        return Err(Error::Verification(format!(
            "max residual {eps_star} differs from LP level {level}"
        )));
    }
    let active_rows = residual
        .iter()
        .enumerate()
        .filter(|(_, r)| r.abs() == eps_star)
        .map(|(i, _)| i + 1)
        .collect();
    Ok(MinimaxResult {
        coefficients,
        eps_star,
        active_rows,
        iterations,
        path,
    })
}

fn solve_exactly(
    a: &ExactMatrix,
    target: &[Rational],
    lp: &StandardForm<Rational>,
    opts: &MinimaxOptions,
    path: SolvePath,
    prior_iterations: usize,
) -> Result<MinimaxResult> {
    let out = solve(lp, opts.max_iterations)?;
    let (level, coefficients) = certify_basis(lp, &out.basis)
        .ok_or_else(|| Error::Verification("exact simplex basis failed certification".into()))?;
    debug_assert_eq!(level, -out.duals[0].clone());
    debug_assert_eq!(out.objective, -level.clone());
    finish(
        a,
        target,
        level,
        coefficients,
        prior_iterations + out.iterations,
        path,
    )
}

/// Minimal `ε` for which `|(A a - target)_i| ≤ ε` is solvable, with an optimal `a`.
pub fn chebyshev_fit(
    a: &ExactMatrix,
    target: &[Rational],
    opts: &MinimaxOptions,
) -> Result<MinimaxResult> {
    check_shapes(a, target)?;
    let lp = dual_lp(a, target);
    if a.rows() <= opts.exact_threshold {
        return solve_exactly(a, target, &lp, opts, SolvePath::Exact, 0);
    }
    let float_target: Vec<f64> = target.iter().map(crate::exact::to_f64).collect();
    let raw = chebyshev_fit_float_raw(&a.to_float(), &float_target, opts.max_iterations);
    match raw {
        Ok(fit) => match certify_basis(&lp, &fit.basis) {
            Some((level, coefficients)) => finish(
                a,
                target,
                level,
                coefficients,
                fit.iterations,
                SolvePath::FloatVerified,
            ),
            None => solve_exactly(
                a,
                target,
                &lp,
                opts,
                SolvePath::FloatFallback,
                fit.iterations,
            ),
        },
        Err(_) => solve_exactly(a, target, &lp, opts, SolvePath::FloatFallback, 0),
    }
}

/// Whether the system `|Σ a_k (i mod k) - 1| ≤ eps, i = 1..=rows` is solvable.
pub fn feasibility(eps: &Rational, n: u64, rows: usize, opts: &MinimaxOptions) -> Result<bool> {
    if eps.is_negative() {
        return Err(Error::InvalidInput(format!(
            "eps must be nonnegative, got {eps}"
        )));
    }
    let a = build_matrix(&ResidueSpec::new(n, rows, Convention::Residue)?)?;
    let fit = chebyshev_fit(&a, &constant_vector(rows), opts)?;
    Ok(*eps >= fit.eps_star)
}
