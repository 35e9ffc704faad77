//! The weighted sequence space with `⟨a, b⟩ = Σ aᵢ bᵢ w(i)`, `w(i) = 1/(i(i+1))`.
//!
//! Residuals built from denominators `k ≤ n` are periodic with period
//! `L = L_n`, so their norms reduce to finitely many residue-class weight
//! sums `s(j, L) = Σ_{m≥0} w(j + mL)`. These are irrational in general and
//! are returned as certified [`Interval`]s.
//!
//! Enclosure of a class tail: since `w` is decreasing, each term
//! `w(j + mL)` lies between the averages of `w` over the `L` indices just
//! after and just before it. Summing those windows and telescoping
//! `Σ_{i≥x} w(i) = 1/x` gives, with `x = j + KL`,
//!
//! ```text
//! 1/(L x)  ≤  Σ_{m≥K} w(j + mL)  ≤  1/(L (x - L + 1))
//! ```

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use num_bigint::BigInt;
use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{to_f64, Rational};

type ClassSumCache = HashMap<(u64, u64), Arc<Vec<Interval>>>;

const UNIT_ROUNDOFF: f64 = f64::EPSILON / 2.0;

/// Closed interval `[lo, hi]` of reals with outward-rounded arithmetic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        debug_assert!(lo <= hi, "inverted interval [{lo}, {hi}]");
        Self { lo, hi }
    }

    pub fn point(x: f64) -> Self {
        Self { lo: x, hi: x }
    }

    pub fn zero() -> Self {
        Self::point(0.0)
    }

    /// Enclosure of an exact rational.
    pub fn from_rational(value: &Rational) -> Self {
        if value.is_zero() {
            return Self::zero();
        }
        let x = to_f64(value);
        let (mut lo, mut hi) = (x.next_down(), x.next_up());
        while Rational::from_float(lo).is_some_and(|v| &v > value) {
            lo = lo.next_down();
        }
        while Rational::from_float(hi).is_some_and(|v| &v < value) {
            hi = hi.next_up();
        }
        Self::new(lo, hi)
    }

    pub fn mid(&self) -> f64 {
        self.lo + (self.hi - self.lo) / 2.0
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    /// Product of two intervals whose endpoints are nonnegative.
    pub fn mul_nonneg(self, other: Self) -> Self {
        debug_assert!(self.lo >= 0.0 && other.lo >= 0.0);
        let hi = if self.hi == 0.0 || other.hi == 0.0 {
            0.0
        } else {
            (self.hi * other.hi).next_up()
        };
        Self::new((self.lo * other.lo).next_down().max(0.0), hi)
    }

    pub fn scale_nonneg(self, factor: f64) -> Self {
        self.mul_nonneg(Self::point(factor))
    }
}

impl std::ops::Add for Interval {
    type Output = Self;

    fn add(self, other: Self) -> Self {
        Self::new(
            (self.lo + other.lo).next_down(),
            (self.hi + other.hi).next_up(),
        )
    }
}

impl std::iter::Sum for Interval {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Interval::zero(), |acc, x| acc + x)
    }
}

pub fn weight(i: u64) -> Result<Rational> {
    if i < 1 {
        return Err(Error::InvalidInput("weights are indexed from i = 1".into()));
    }
    let i = BigInt::from(i);
    Ok(Rational::new(BigInt::from(1), &i * (&i + 1)))
}

fn weight_f64(i: u64) -> f64 {
    let i = i as f64;
    1.0 / (i * (i + 1.0))
}

/// `Σ_{i=1..N} a_i b_i w(i)`, exact.
pub fn inner_truncated(a: &[Rational], b: &[Rational], terms: usize) -> Result<Rational> {
    if a.len() < terms || b.len() < terms {
        return Err(Error::mismatch(
            format!("vectors covering indices 1..={terms}"),
            format!("lengths {} and {}", a.len(), b.len()),
        ));
    }
    (0..terms).try_fold(Rational::zero(), |acc, t| {
        Ok(acc + &a[t] * &b[t] * weight(t as u64 + 1)?)
    })
}

pub fn inner_truncated_f64(a: &[f64], b: &[f64], terms: usize) -> Result<f64> {
    if a.len() < terms || b.len() < terms {
        return Err(Error::mismatch(
            format!("vectors covering indices 1..={terms}"),
            format!("lengths {} and {}", a.len(), b.len()),
        ));
    }
    Ok((0..terms)
        .map(|t| a[t] * b[t] * weight_f64(t as u64 + 1))
        .sum())
}

fn check_tol(tol: f64) -> Result<()> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    Ok(())
}

/// Neumaier-compensated running sum.
#[derive(Clone, Copy, Default)]
struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

/// All class sums `s(1, L), ..., s(L, L)` in one sweep over `i = 1..=K·L`.
fn compute_class_sums(period: u64, tol: f64) -> Vec<Interval> {
    let l = period as f64;
    // Tail width is below (L-1)/(L x (x-L+1)); x ≥ L - 1 + sqrt(2/tol) keeps it under tol/2.
    let x_min = (period - 1) as f64 + (2.0 / tol).sqrt().ceil();
    let periods = (x_min / l).ceil() as u64 + 1;
    let mut sums = vec![CompensatedSum::default(); period as usize];
    let mut bucket = 0usize;
    for i in 1..=periods * period {
        sums[bucket].add(weight_f64(i));
        bucket += 1;
        if bucket == period as usize {
            bucket = 0;
        }
    }
    let terms = periods as f64;
    sums.iter()
        .enumerate()
        .map(|(idx, s)| {
            let j = idx as u64 + 1;
            let partial = s.value();
            // Term rounding (u each), compensated summation (2u + n u²), final add (u).
            let slack = (4.0 * UNIT_ROUNDOFF + 2.0 * terms * UNIT_ROUNDOFF * UNIT_ROUNDOFF)
                * partial
                + f64::MIN_POSITIVE;
            let x = (j + periods * period) as f64;
            let tail_lo = (1.0 / (l * x)).next_down();
            let tail_hi = (1.0 / (l * (x - l + 1.0))).next_up();
            Interval::new(
                (partial - slack + tail_lo).next_down().max(0.0),
                (partial + slack + tail_hi).next_up(),
            )
        })
        .collect()
}

/// Weight function plus a cache of certified class sums keyed by `(L, tol)`.
/// Safe to share between threads; concurrent fills of the same key are
/// idempotent.
#[derive(Debug, Default)]
pub struct WeightedSpace {
    cache: RwLock<ClassSumCache>,
}

impl WeightedSpace {
    pub fn new() -> Self {
        Self::default()
    }

    /// `s(j, L)` for every `j = 1..=L`; index `j - 1`.
    pub fn class_weight_sums(&self, period: u64, tol: f64) -> Result<Arc<Vec<Interval>>> {
        if period < 1 {
            return Err(Error::InvalidInput("period must be at least 1".into()));
        }
        check_tol(tol)?;
        let key = (period, tol.to_bits());
        if let Some(hit) = self.cache.read().expect("cache lock").get(&key) {
            return Ok(Arc::clone(hit));
        }
        let sums = Arc::new(compute_class_sums(period, tol));
        let mut cache = self.cache.write().expect("cache lock");
        Ok(Arc::clone(cache.entry(key).or_insert(sums)))
    }

    pub fn class_weight_sum(&self, j: u64, period: u64, tol: f64) -> Result<Interval> {
        if j < 1 || j > period {
            return Err(Error::InvalidInput(format!(
                "class index {j} outside 1..={period}"
            )));
        }
        Ok(self.class_weight_sums(period, tol)?[(j - 1) as usize])
    }

    /// `Σ_{j=1..L} r_j² s(j, L)` for a period-`L` residual given on one period.
    pub fn periodic_norm_sq(&self, residual: &[Rational], tol: f64) -> Result<Interval> {
        if residual.is_empty() {
            return Err(Error::InvalidInput("residual must cover one period".into()));
        }
        let sums = self.class_weight_sums(residual.len() as u64, tol)?;
        Ok(residual
            .iter()
            .zip(sums.iter())
            .filter(|(r, _)| !r.is_zero())
            .map(|(r, s)| Interval::from_rational(&(r * r)).mul_nonneg(*s))
            .sum())
    }

    /// `Σ_{i≥1} w(iL)`, the weight of the rows where every Beurling entry vanishes.
    pub fn tail_term(&self, period: u64, tol: f64) -> Result<Interval> {
        self.class_weight_sum(period, period, tol)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, rat};
    use std::f64::consts::LN_2;

    #[test]
    fn weights() {
        assert_eq!(weight(1).unwrap(), rat(1, 2));
        assert_eq!(weight(2).unwrap(), rat(1, 6));
        assert_eq!(weight(10).unwrap(), rat(1, 110));
        assert!(weight(0).is_err());
    }

    #[test]
    fn weights_telescope() {
        for n in [1u64, 5, 17, 100] {
            let total: Rational = (1..=n).map(|i| weight(i).unwrap()).sum();
            assert_eq!(total, int(1) - rat(1, n as i64 + 1));
        }
    }

    #[test]
    fn truncated_inner_products() {
        let ones = vec![int(1); 3];
        assert_eq!(inner_truncated(&ones, &ones, 3).unwrap(), rat(3, 4));
        let e1 = vec![int(1)];
        assert_eq!(inner_truncated(&e1, &e1, 1).unwrap(), rat(1, 2));
        let gamma2 = vec![rat(1, 2), int(0), rat(1, 2)];
        assert_eq!(inner_truncated(&gamma2, &gamma2, 3).unwrap(), rat(7, 48));
        assert!(inner_truncated(&e1, &ones, 3).is_err());
        let f = inner_truncated_f64(&[1.0; 3], &[1.0; 3], 3).unwrap();
        assert!((f - 0.75).abs() < 1e-15);
    }

    #[test]
    fn class_sums_small_periods() {
        let space = WeightedSpace::new();
        let tol = 1e-10;
        let s11 = space.class_weight_sum(1, 1, tol).unwrap();
        assert!(s11.contains(1.0) && s11.width() <= tol);
        let s12 = space.class_weight_sum(1, 2, tol).unwrap();
        assert!(s12.contains(LN_2), "{s12:?}");
        assert!(s12.width() <= tol);
        let s22 = space.class_weight_sum(2, 2, tol).unwrap();
        assert!(s22.contains(1.0 - LN_2), "{s22:?}");
        assert!(space.class_weight_sum(0, 2, tol).is_err());
        assert!(space.class_weight_sum(3, 2, tol).is_err());
        assert!(space.class_weight_sum(1, 2, 0.0).is_err());
    }

    #[test]
    fn periodic_norms() {
        let space = WeightedSpace::new();
        let tol = 1e-10;
        assert_eq!(
            space.periodic_norm_sq(&vec![int(0); 4], tol).unwrap(),
            Interval::zero()
        );
        let r = space.periodic_norm_sq(&[int(0), int(-1)], tol).unwrap();
        assert!(r.contains(1.0 - LN_2) && r.width() <= 2.0 * tol);
        let c = space.periodic_norm_sq(&[rat(3, 2)], tol).unwrap();
        assert!(c.contains(2.25), "{c:?}");
    }

    #[test]
    fn tail_terms() {
        let space = WeightedSpace::new();
        let tol = 1e-10;
        assert!(space.tail_term(1, tol).unwrap().contains(1.0));
        assert!(space.tail_term(2, tol).unwrap().contains(1.0 - LN_2));
        let t6 = space.tail_term(6, tol).unwrap();
        assert!(t6.hi <= std::f64::consts::PI.powi(2) / (6.0 * 36.0));
        assert_eq!(t6, space.class_weight_sum(6, 6, tol).unwrap());
    }

    #[test]
    fn cache_returns_same_values() {
        let space = WeightedSpace::new();
        let a = space.class_weight_sums(12, 1e-9).unwrap();
        let b = space.class_weight_sums(12, 1e-9).unwrap();
        assert!(Arc::ptr_eq(&a, &b));
    }

    #[test]
    fn interval_ops_round_outward() {
        let third = Interval::from_rational(&rat(1, 3));
        assert!(third.lo < 1.0 / 3.0 && third.hi > 1.0 / 3.0);
        let sum = third + third + third;
        assert!(sum.contains(1.0));
        let sq = third.mul_nonneg(third);
        assert!(sq.lo <= 1.0 / 9.0 && 1.0 / 9.0 <= sq.hi);
    }
}
