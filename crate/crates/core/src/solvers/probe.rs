use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::exact::{from_f64, Rational};
use crate::hilbert::Interval;
use crate::linalg::ExactMatrix;

/// Quadratic fit objective, evaluated exactly.
#[derive(Debug, Clone)]
pub enum Objective {
    /// `‖A a - c‖²`.
    Unweighted {
        a: ExactMatrix,
        target: Vec<Rational>,
    },
    /// `Σ w_j (A a - c)_j²` with the weights taken at their midpoints.
    Weighted {
        a: ExactMatrix,
        target: Vec<Rational>,
        weights: Vec<Rational>,
    },
}

impl Objective {
    pub fn weighted(a: ExactMatrix, target: Vec<Rational>, weights: &[Interval]) -> Result<Self> {
        let weights = weights
            .iter()
            .map(|w| from_f64(w.mid()))
            .collect::<Result<Vec<_>>>()?;
        Ok(Objective::Weighted { a, target, weights })
    }

    fn parts(&self) -> (&ExactMatrix, &[Rational]) {
        match self {
            Objective::Unweighted { a, target } | Objective::Weighted { a, target, .. } => {
                (a, target)
            }
        }
    }

    pub fn evaluate(&self, coefficients: &[Rational]) -> Result<Rational> {
        let (a, target) = self.parts();
        if target.len() != a.rows() {
            return Err(Error::mismatch(
                format!("{} targets", a.rows()),
                target.len(),
            ));
        }
        let residual = a.mul_vec(coefficients)?;
        let sq = residual.iter().zip(target).map(|(ax, c)| {
            let r = ax - c;
            &r * &r
        });
        Ok(match self {
            Objective::Unweighted { .. } => sq.sum(),
            Objective::Weighted { weights, .. } => sq.zip(weights).map(|(r2, w)| r2 * w).sum(),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeOutcome {
    pub optimal: bool,
    pub trials: usize,
    /// First perturbed point with a strictly smaller objective.
    pub violation: Option<Vec<Rational>>,
}

/// Check `objective(a') ≥ objective(a*)` for seeded random perturbations
/// `a'` of `a*` at several scales.
pub fn optimality_probe(
    objective: &Objective,
    a_star: &[Rational],
    trials: usize,
    seed: u64,
) -> Result<ProbeOutcome> {
    let base = objective.evaluate(a_star)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scales = [
        Rational::one(),
        Rational::new(BigInt::one(), BigInt::from(1000)),
        Rational::new(BigInt::one(), BigInt::from(1_000_000)),
    ];
    for trial in 0..trials {
        let scale = &scales[trial % scales.len()];
        let candidate: Vec<Rational> = a_star
            .iter()
            .map(|v| {
                let step = Rational::new(
                    BigInt::from(rng.gen_range(-1000i64..=1000)),
                    BigInt::from(1000),
                );
                v + step * scale
            })
            .collect();
        if candidate.iter().zip(a_star).all(|(c, v)| (c - v).is_zero()) {
            continue;
        }
        if objective.evaluate(&candidate)? < base {
            return Ok(ProbeOutcome {
                optimal: false,
                trials: trial + 1,
                violation: Some(candidate),
            });
        }
    }
    Ok(ProbeOutcome {
        optimal: true,
        trials,
        violation: None,
    })
}
