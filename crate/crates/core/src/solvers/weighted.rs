//! Distance from the constant sequence to the span of `γ_2, ..., γ_n` in the
//! weighted space.
//!
//! With `L = L_n` the residual `A a - 1` is `L`-periodic, vanishes nowhere
//! on the class `i ≡ 0 (mod L)` (it equals `-1` there), and the squared norm
//! is `Σ_{j<L} s(j, L) r_j² + s(L, L)`. Minimizing over `a` is a weighted
//! least-squares problem on the first `L - 1` rows.

use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{from_f64, Rational};
use crate::hilbert::{Interval, WeightedSpace};
use crate::linalg::{rank_exact, solve_exact, ExactMatrix, FloatMatrix};
use crate::sequences::{build_matrix, Convention, ResidueSpec};
use crate::solvers::lsq::{cholesky, cholesky_solve};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightedOptions {
    /// Problems with at most this many rows are solved in exact arithmetic
    /// at the (dyadic) weight midpoints.
    pub exact_threshold: usize,
    /// Float-path condition estimate above which the result is flagged.
    pub condition_limit: f64,
}

impl Default for WeightedOptions {
    fn default() -> Self {
        Self {
            exact_threshold: 1000,
            condition_limit: 1e12,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistanceResult {
    pub n: u64,
    #[serde(serialize_with = "crate::exact::serde_rational::serialize_vec")]
    pub coefficients: Vec<Rational>,
    /// Enclosure of `min_a ‖Σ a_k γ_k - γ‖²`.
    pub d_sq: Interval,
    /// Per-class contributions `s(j, L) r_j²`, `j = 1..=L`; the last entry is the forced tail.
    pub terms: Vec<Interval>,
    pub exact: bool,
    pub condition_estimate: Option<f64>,
    pub ill_conditioned: bool,
}

fn relative_half_width(weights: &[Interval]) -> f64 {
    weights
        .iter()
        .map(|w| ((w.mid() - w.lo) / w.mid()).next_up())
        .fold(0.0, f64::max)
}

/// Minimize `Σ_j s_j (A a - 1)_j² + tail` over `a`.
///
/// `class_weights[j]` encloses the weight of row `j + 1`. The returned
/// `d_sq` encloses the true minimum for every weight vector inside the
/// given intervals: the upper end is the objective at the computed `a`
/// with upper weights, the lower end uses `Σ lo_j r_j² ≥ (1 - ρ) Σ mid_j r_j²`
/// with `ρ` the largest relative half-width.
pub fn weighted_lsq(
    a: &ExactMatrix,
    class_weights: &[Interval],
    forced_tail: Interval,
    opts: &WeightedOptions,
) -> Result<DistanceResult> {
    if a.is_empty() {
        return Err(Error::InvalidInput("empty matrix".into()));
    }
    if class_weights.len() != a.rows() {
        return Err(Error::mismatch(
            format!("{} class weights", a.rows()),
            class_weights.len(),
        ));
    }
    if class_weights.iter().any(|w| w.lo.is_nan() || w.lo <= 0.0) {
        return Err(Error::InvalidInput("class weights must be positive".into()));
    }
    if a.rows() <= opts.exact_threshold {
        weighted_exact(a, class_weights, forced_tail)
    } else {
        weighted_float(a, class_weights, forced_tail, opts)
    }
}

fn weighted_exact(a: &ExactMatrix, weights: &[Interval], tail: Interval) -> Result<DistanceResult> {
    let cols = a.cols();
    let mids: Vec<Rational> = weights
        .iter()
        .map(|w| from_f64(w.mid()))
        .collect::<Result<_>>()?;
    let mut normal = ExactMatrix::zeros(cols, cols);
    let mut rhs = vec![Rational::zero(); cols];
    for (row, w) in a.row_iter().zip(&mids) {
        for p in 0..cols {
            if row[p].is_zero() {
                continue;
            }
            let wp = w * &row[p];
            rhs[p] += &wp;
            for q in p..cols {
                if !row[q].is_zero() {
                    normal[(p, q)] += &wp * &row[q];
                }
            }
        }
    }
    for p in 0..cols {
        for q in 0..p {
            normal[(p, q)] = normal[(q, p)].clone();
        }
    }
    let coefficients = match solve_exact(&normal, &rhs) {
        Ok(x) => x,
        Err(Error::Singular) => {
            return Err(Error::RankDeficient {
                rank: rank_exact(a),
                cols,
            })
        }
        Err(e) => return Err(e),
    };
    let squares: Vec<Rational> = a
        .mul_vec(&coefficients)?
        .into_iter()
        .map(|v| {
            let r = v - Rational::one();
            &r * &r
        })
        .collect();
    let q_mid: Rational = squares.iter().zip(&mids).map(|(r2, w)| r2 * w).sum();

    let mut terms: Vec<Interval> = squares
        .iter()
        .zip(weights)
        .map(|(r2, w)| Interval::from_rational(r2).mul_nonneg(*w))
        .collect();
    terms.push(tail);
    let upper = terms.iter().fold(0.0f64, |acc, t| (acc + t.hi).next_up());
    let rho = relative_half_width(weights);
    let lower = (Interval::from_rational(&q_mid).lo * (1.0 - rho).next_down())
        .next_down()
        .max(0.0);
    let lower = (lower + tail.lo).next_down();
    Ok(DistanceResult {
        n: cols as u64 + 1,
        coefficients,
        d_sq: Interval::new(lower, upper),
        terms,
        exact: true,
        condition_estimate: None,
        ill_conditioned: false,
    })
}

fn weighted_float(
    a: &ExactMatrix,
    weights: &[Interval],
    tail: Interval,
    opts: &WeightedOptions,
) -> Result<DistanceResult> {
    let af: FloatMatrix = a.to_float();
    let cols = af.cols();
    let mids: Vec<f64> = weights.iter().map(Interval::mid).collect();
    let mut normal = FloatMatrix::zeros(cols, cols);
    let mut rhs = vec![0.0; cols];
    for (row, w) in af.row_iter().zip(&mids) {
        for p in 0..cols {
            rhs[p] += w * row[p];
            for q in 0..cols {
                normal[(p, q)] += w * row[p] * row[q];
            }
        }
    }
    let chol = match cholesky(&normal) {
        Ok(l) => l,
        Err(_) => {
            return Err(Error::RankDeficient {
                rank: rank_exact(a),
                cols,
            })
        }
    };
    let coef = cholesky_solve(&chol, &rhs);
    let diag: Vec<f64> = (0..cols).map(|i| chol[(i, i)]).collect();
    let dmax = diag.iter().cloned().fold(0.0, f64::max);
    let dmin = diag.iter().cloned().fold(f64::INFINITY, f64::min);
    let condition = (dmax / dmin).powi(2);

    let residual: Vec<f64> = af.mul_vec(&coef)?.into_iter().map(|v| v - 1.0).collect();
    let q: f64 = residual.iter().zip(&mids).map(|(r, w)| w * r * r).sum();
    // Distance of `coef` from the midpoint optimum: Q(a) - Q* = gᵀ G⁻¹ g.
    let grad: Vec<f64> = (0..cols)
        .map(|p| {
            af.row_iter()
                .zip(&residual)
                .zip(&mids)
                .map(|((row, r), w)| w * row[p] * r)
                .sum()
        })
        .collect();
    let step = cholesky_solve(&chol, &grad);
    let gap: f64 = grad
        .iter()
        .zip(&step)
        .map(|(g, s)| g * s)
        .sum::<f64>()
        .abs();

    let rounding = 8.0 * a.rows() as f64 * f64::EPSILON;
    let ill_conditioned = condition > opts.condition_limit;
    let widen = if ill_conditioned {
        condition * f64::EPSILON
    } else {
        0.0
    };
    let rho = relative_half_width(weights);
    let lower = ((q - gap) * (1.0 - rho - rounding - widen)).max(0.0) + tail.lo;
    let mut terms: Vec<Interval> = residual
        .iter()
        .zip(weights)
        .map(|(r, w)| {
            let r2 = r * r;
            Interval::new(r2 * (1.0 - rounding), r2 * (1.0 + rounding)).mul_nonneg(*w)
        })
        .collect();
    terms.push(tail);
    let upper = terms.iter().map(|t| t.hi).sum::<f64>() * (1.0 + rounding + widen);
    Ok(DistanceResult {
        n: cols as u64 + 1,
        coefficients: coef.iter().map(|&v| from_f64(v)).collect::<Result<_>>()?,
        d_sq: Interval::new(lower.next_down(), upper.next_up()),
        terms,
        exact: false,
        condition_estimate: Some(condition),
        ill_conditioned,
    })
}

/// `d_n²` for the full period `L_n`, with coefficients in `convention`.
pub fn distance(
    n: u64,
    convention: Convention,
    space: &WeightedSpace,
    tol: f64,
    opts: &WeightedOptions,
) -> Result<DistanceResult> {
    let spec = ResidueSpec::full_period(n, convention)?;
    let a = build_matrix(&spec)?;
    let period = spec.rows() as u64 + 1;
    let sums = space.class_weight_sums(period, tol)?;
    let (weights, tail) = sums.split_at(spec.rows());
    weighted_lsq(&a, weights, tail[0], opts)
}
