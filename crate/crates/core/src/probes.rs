//! One verifier per structural claim about the residue matrices.
//!
//! Finite computations cannot decide limit statements; those probes are
//! labelled [`Verdict::Measured`] and only report the numbers. Claims that
//! are decidable on a finite instance get `Holds` or `Fails`, and a `Fails`
//! always carries the inputs that reproduce it.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::exact::{format_rational, max_abs, serde_rational, to_f64, Rational};
use crate::hilbert::{Interval, WeightedSpace};
use crate::linalg::{
    op_norm_2, op_norm_inf_float, projection_float, projection_norm_inf_exact, rank_exact,
    ExactMatrix, DEFAULT_POWER_ITERATIONS,
};
use crate::sequences::{
    build_matrix, classify_rows, constant_vector, lcm_upto_u64, Convention, ResidueSpec,
};
use crate::solvers::{
    chebyshev_fit, lsq_unweighted, weighted_lsq, DistanceResult, MinimaxOptions, WeightedOptions,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Holds,
    Fails,
    Measured,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeReport {
    pub claim: String,
    pub params: BTreeMap<String, Value>,
    pub verdict: Verdict,
    pub evidence: Value,
}

impl ProbeReport {
    fn new(claim: &str, params: &[(&str, Value)], verdict: Verdict, evidence: Value) -> Self {
        Self {
            claim: claim.to_string(),
            params: params
                .iter()
                .map(|(k, v)| (k.to_string(), v.clone()))
                .collect(),
            verdict,
            evidence,
        }
    }
}

/// Shared knobs for the scans.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LabOptions {
    pub tol: f64,
    pub minimax: MinimaxOptions,
    pub weighted: WeightedOptions,
    /// Largest row count for which `‖P_n‖_∞` is computed exactly.
    pub exact_norm_rows: usize,
}

impl Default for LabOptions {
    fn default() -> Self {
        Self {
            tol: crate::DEFAULT_TOL,
            minimax: MinimaxOptions::default(),
            weighted: WeightedOptions::default(),
            exact_norm_rows: 1000,
        }
    }
}

fn full_period_matrix(n: u64) -> Result<(ResidueSpec, ExactMatrix)> {
    let spec = ResidueSpec::full_period(n, Convention::Residue)?;
    let a = build_matrix(&spec)?;
    Ok((spec, a))
}

fn check_range(n_range: &[u64]) -> Result<()> {
    if n_range.is_empty() {
        return Err(Error::InvalidInput("empty n range".into()));
    }
    if let Some(bad) = n_range.iter().find(|&&n| n < 2) {
        return Err(Error::InvalidInput(format!(
            "n must be at least 2, got {bad}"
        )));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Rank

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RankRow {
    pub n: u64,
    pub rows: usize,
    pub rank: usize,
    pub expected: usize,
}

impl RankRow {
    pub fn holds(&self) -> bool {
        self.rank == self.expected
    }
}

pub fn rank_scan(n_range: &[u64]) -> Result<Vec<RankRow>> {
    check_range(n_range)?;
    n_range
        .par_iter()
        .map(|&n| {
            let (spec, a) = full_period_matrix(n)?;
            Ok(RankRow {
                n,
                rows: spec.rows(),
                rank: rank_exact(&a),
                expected: spec.cols(),
            })
        })
        .collect()
}

/// `rank A(n, L_n - 1) = n - 1` for `n = 2..=n_max`.
pub fn verify_rank_claim(n_max: u64) -> Result<ProbeReport> {
    let range: Vec<u64> = (2..=n_max).collect();
    let rows = rank_scan(&range)?;
    let failure = rows.iter().find(|r| !r.holds());
    let verdict = if failure.is_some() {
        Verdict::Fails
    } else {
        Verdict::Holds
    };
    Ok(ProbeReport::new(
        "rank",
        &[("n_max", json!(n_max))],
        verdict,
        json!({ "ranks": rows, "first_failure": failure }),
    ))
}

// ---------------------------------------------------------------------------
// Monotone map

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MonotoneCheck {
    Holds,
    /// `x ≥ y` with `x ≠ y` does not hold, so there is nothing to check.
    Vacuous,
    /// Negative entry or an all-zero column.
    PreconditionViolated,
    Counterexample,
}

/// `A ≥ 0` with no zero column and `x ≥ y`, `x ≠ y` imply `Ax ≥ Ay`, `Ax ≠ Ay`.
pub fn check_monotone(a: &ExactMatrix, x: &[Rational], y: &[Rational]) -> Result<MonotoneCheck> {
    if x.len() != a.cols() || y.len() != a.cols() {
        return Err(Error::mismatch(
            format!("vectors of length {}", a.cols()),
            format!("{} and {}", x.len(), y.len()),
        ));
    }
    if x == y || x.iter().zip(y).any(|(xi, yi)| xi < yi) {
        return Ok(MonotoneCheck::Vacuous);
    }
    let nonneg = a.entries().iter().all(|v| !v.is_negative());
    let columns_ok = (0..a.cols()).all(|c| (0..a.rows()).any(|r| !a[(r, c)].is_zero()));
    if !nonneg || !columns_ok {
        return Ok(MonotoneCheck::PreconditionViolated);
    }
    let ax = a.mul_vec(x)?;
    let ay = a.mul_vec(y)?;
    let ge = ax.iter().zip(&ay).all(|(p, q)| p >= q);
    Ok(if ge && ax != ay {
        MonotoneCheck::Holds
    } else {
        MonotoneCheck::Counterexample
    })
}

fn int_vec(values: &[i64]) -> Vec<Rational> {
    values
        .iter()
        .map(|&v| Rational::from_integer(BigInt::from(v)))
        .collect()
}

fn random_pair(rng: &mut ChaCha8Rng, len: usize) -> (Vec<i64>, Vec<i64>) {
    let y: Vec<i64> = (0..len).map(|_| rng.gen_range(-5..=5)).collect();
    let mut gap: Vec<i64> = (0..len).map(|_| rng.gen_range(0..=3)).collect();
    if gap.iter().all(|&g| g == 0) {
        gap[rng.gen_range(0..len)] = rng.gen_range(1..=3);
    }
    let x = y.iter().zip(&gap).map(|(a, b)| a + b).collect();
    (x, y)
}

/// Seeded random nonnegative instances plus the residue matrices
/// `A(n, L_n - 1)` for `n = 2..=n_max`.
pub fn monotone_map_property(trials: usize, n_max: u64, seed: u64) -> Result<ProbeReport> {
    if trials == 0 {
        return Err(Error::InvalidInput("trials must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checked = 0usize;
    let mut counterexample = None;
    for _ in 0..trials {
        let cols = rng.gen_range(1..=6usize);
        let rows = rng.gen_range(cols + 1..=cols + 6);
        let mut entries: Vec<i64> = (0..rows * cols).map(|_| rng.gen_range(0..=5)).collect();
        for c in 0..cols {
            if (0..rows).all(|r| entries[r * cols + c] == 0) {
                entries[rng.gen_range(0..rows) * cols + c] = rng.gen_range(1..=5);
            }
        }
        let a = ExactMatrix::from_vec(rows, cols, int_vec(&entries))?;
        let (x, y) = random_pair(&mut rng, cols);
        if check_monotone(&a, &int_vec(&x), &int_vec(&y))? == MonotoneCheck::Counterexample {
            counterexample.get_or_insert(json!({ "matrix": a.to_text(), "x": x, "y": y }));
        }
        checked += 1;
    }
    let mut residue_checked = 0usize;
    for n in 2..=n_max {
        let (_, a) = full_period_matrix(n)?;
        let cols = a.cols();
        let mut pairs: Vec<(Vec<i64>, Vec<i64>)> = (0..cols)
            .map(|k| {
                let y = vec![0; cols];
                let mut x = y.clone();
                x[k] = 1;
                (x, y)
            })
            .collect();
        pairs.extend((0..50).map(|_| random_pair(&mut rng, cols)));
        for (x, y) in pairs {
            if check_monotone(&a, &int_vec(&x), &int_vec(&y))? == MonotoneCheck::Counterexample {
                counterexample.get_or_insert(json!({ "n": n, "x": x, "y": y }));
            }
            residue_checked += 1;
        }
    }
    let verdict = if counterexample.is_some() {
        Verdict::Fails
    } else {
        Verdict::Holds
    };
    Ok(ProbeReport::new(
        "monotone",
        &[
            ("trials", json!(trials)),
            ("n_max", json!(n_max)),
            ("seed", json!(seed)),
        ],
        verdict,
        json!({
            "random_instances": checked,
            "residue_instances": residue_checked,
            "counterexample": counterexample,
        }),
    ))
}

// ---------------------------------------------------------------------------
// Positive image

/// `(A v)_i > 0` on every row with a positive entry and `= 0` exactly on the
/// rows `i ≡ 0 (mod L_n)`, for a strictly positive `v`.
pub fn positive_image_check(n: u64, rows: usize, v: &[Rational]) -> Result<ProbeReport> {
    let spec = ResidueSpec::new(n, rows, Convention::Residue)?;
    if v.len() != spec.cols() {
        return Err(Error::mismatch(
            format!("v of length {}", spec.cols()),
            v.len(),
        ));
    }
    if v.iter().any(|x| !x.is_positive()) {
        return Err(Error::InvalidInput("v must be strictly positive".into()));
    }
    let a = build_matrix(&spec)?;
    let image = a.mul_vec(v)?;
    let partition = classify_rows(n, rows)?;
    let mut bad_rows = Vec::new();
    let mut zero_rows = Vec::new();
    for (idx, value) in image.iter().enumerate() {
        let row = idx + 1;
        let expect_zero = partition.zero_rows.binary_search(&row).is_ok();
        if value.is_zero() {
            zero_rows.push(row);
        }
        if expect_zero != value.is_zero() || value.is_negative() {
            bad_rows.push(row);
        }
    }
    let min_positive = image.iter().filter(|x| x.is_positive()).min().cloned();
    let verdict = if bad_rows.is_empty() {
        Verdict::Holds
    } else {
        Verdict::Fails
    };
    Ok(ProbeReport::new(
        "positive-image",
        &[
            ("n", json!(n)),
            ("rows", json!(rows)),
            (
                "v",
                json!(v.iter().map(format_rational).collect::<Vec<_>>()),
            ),
        ],
        verdict,
        json!({
            "image": image.iter().map(format_rational).collect::<Vec<_>>(),
            "zero_rows": zero_rows,
            "expected_zero_rows": partition.zero_rows,
            "min_positive": min_positive.as_ref().map(format_rational),
            "offending_rows": bad_rows,
        }),
    ))
}

// ---------------------------------------------------------------------------
// Projection norms

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PnNormRow {
    pub n: u64,
    pub rows: usize,
    /// Exact `‖P_n‖_∞` when the instance is small enough.
    #[serde(serialize_with = "serde_rational::serialize_option")]
    pub inf_norm: Option<Rational>,
    pub inf_norm_float: f64,
    pub two_norm: f64,
}

fn pn_norms(n: u64, opts: &LabOptions) -> Result<PnNormRow> {
    let (spec, a) = full_period_matrix(n)?;
    let p = projection_float(&a)?;
    let inf_norm = if spec.rows() <= opts.exact_norm_rows {
        Some(projection_norm_inf_exact(&a)?)
    } else {
        None
    };
    Ok(PnNormRow {
        n,
        rows: spec.rows(),
        inf_norm_float: inf_norm
            .as_ref()
            .map_or_else(|| op_norm_inf_float(&p), to_f64),
        inf_norm,
        two_norm: op_norm_2(&p, 1e-12, DEFAULT_POWER_ITERATIONS)?,
    })
}

/// `(n, ‖P_n‖_∞, ‖P_n‖₂)` with `P_n = A A⁺` on the full period.
pub fn pn_norm_scan(n_range: &[u64], opts: &LabOptions) -> Result<Vec<PnNormRow>> {
    check_range(n_range)?;
    n_range.par_iter().map(|&n| pn_norms(n, opts)).collect()
}

pub fn pn_norm_report(n_range: &[u64], opts: &LabOptions) -> Result<ProbeReport> {
    let rows = pn_norm_scan(n_range, opts)?;
    let exceeds_one: Vec<u64> = rows
        .iter()
        .filter(|r| r.inf_norm_float > 1.0)
        .map(|r| r.n)
        .collect();
    Ok(ProbeReport::new(
        "projection-norm",
        &[("n", json!(n_range))],
        Verdict::Measured,
        json!({ "norms": rows, "sup_norm_above_one": exceeds_one }),
    ))
}

// ---------------------------------------------------------------------------
// Strong convergence (finite truncations)

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub n: u64,
    pub rows: usize,
    /// `‖P_n x̂ - x̂‖_∞` over the truncation to `L_n - 1` rows.
    #[serde(serialize_with = "serde_rational::serialize")]
    pub deviation: Rational,
}

pub fn strong_convergence_probe(
    sequence: &(dyn Fn(u64) -> Rational + Sync),
    n_range: &[u64],
) -> Result<Vec<ConvergenceRow>> {
    check_range(n_range)?;
    n_range
        .par_iter()
        .map(|&n| {
            let (spec, a) = full_period_matrix(n)?;
            let x: Vec<Rational> = (1..=spec.rows() as u64).map(sequence).collect();
            let fit = lsq_unweighted(&a, &x)?;
            Ok(ConvergenceRow {
                n,
                rows: spec.rows(),
                deviation: max_abs(&fit.residual),
            })
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Error decomposition and distance scan

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecompositionReport {
    pub n: u64,
    #[serde(serialize_with = "serde_rational::serialize")]
    pub eps_star: Rational,
    /// `Σ_{j<L} s(j, L) (A a* - c)_j²` for the minimax-optimal `a*`.
    pub minimax_term: Interval,
    /// `Σ_{j<L} s(j, L) ((P_n - I) c)_j²`.
    pub projection_term: Interval,
    /// `s(L, L)`: the rows where every entry vanishes.
    pub tail: Interval,
    /// `Σ_{j<L} s(j, L) (|A a* - P_n c|_j + |P_n c - c|_j)² + tail`.
    pub total_bound: Interval,
    pub d_sq: Interval,
}

impl DecompositionReport {
    pub fn dominates(&self) -> bool {
        self.total_bound.hi >= self.d_sq.lo
    }
}

fn weighted_sum(values: &[Rational], weights: &[Interval]) -> Interval {
    values
        .iter()
        .zip(weights)
        .filter(|(v, _)| !v.is_zero())
        .map(|(v, w)| Interval::from_rational(&(v * v)).mul_nonneg(*w))
        .sum()
}

pub fn error_decomposition(
    n: u64,
    space: &WeightedSpace,
    opts: &LabOptions,
) -> Result<DecompositionReport> {
    let (spec, a) = full_period_matrix(n)?;
    let rows = spec.rows();
    let c = constant_vector(rows);
    let sums = space.class_weight_sums(rows as u64 + 1, opts.tol)?;
    let (weights, tail) = (&sums[..rows], sums[rows]);

    let fit = chebyshev_fit(&a, &c, &opts.minimax)?;
    let ax = a.mul_vec(&fit.coefficients)?;
    let projected = a.mul_vec(&lsq_unweighted(&a, &c)?.coefficients)?;

    let minimax_residual: Vec<Rational> = ax.iter().zip(&c).map(|(v, ci)| v - ci).collect();
    let projection_residual: Vec<Rational> =
        projected.iter().zip(&c).map(|(v, ci)| v - ci).collect();
    let triangle: Vec<Rational> = ax
        .iter()
        .zip(&projected)
        .zip(&projection_residual)
        .map(|((v, p), q)| (v - p).abs() + q.abs())
        .collect();

    let distance = weighted_lsq(&a, weights, tail, &opts.weighted)?;
    Ok(DecompositionReport {
        n,
        eps_star: fit.eps_star,
        minimax_term: weighted_sum(&minimax_residual, weights),
        projection_term: weighted_sum(&projection_residual, weights),
        tail,
        total_bound: weighted_sum(&triangle, weights) + tail,
        d_sq: distance.d_sq,
    })
}

pub fn decomposition_report(
    n_range: &[u64],
    space: &WeightedSpace,
    opts: &LabOptions,
) -> Result<ProbeReport> {
    check_range(n_range)?;
    let reports: Vec<DecompositionReport> = n_range
        .par_iter()
        .map(|&n| error_decomposition(n, space, opts))
        .collect::<Result<_>>()?;
    let failure = reports.iter().find(|r| !r.dominates()).map(|r| r.n);
    Ok(ProbeReport::new(
        "decomposition",
        &[("n", json!(n_range)), ("tol", json!(opts.tol))],
        if failure.is_some() {
            Verdict::Fails
        } else {
            Verdict::Holds
        },
        json!({ "decompositions": reports, "first_failure": failure }),
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanRow {
    pub n: u64,
    pub rows: usize,
    #[serde(serialize_with = "serde_rational::serialize")]
    pub eps_star: Rational,
    pub d_sq: Interval,
    pub tail: Interval,
    pub pn: PnNormRow,
}

impl ScanRow {
    pub fn pn_inf_norm_text(&self) -> String {
        match &self.pn.inf_norm {
            Some(v) => format_rational(v),
            None => crate::exact::format_decimal(self.pn.inf_norm_float),
        }
    }
}

pub fn dn_scan(n_range: &[u64], space: &WeightedSpace, opts: &LabOptions) -> Result<Vec<ScanRow>> {
    check_range(n_range)?;
    n_range
        .par_iter()
        .map(|&n| {
            let (spec, a) = full_period_matrix(n)?;
            let rows = spec.rows();
            let sums = space.class_weight_sums(rows as u64 + 1, opts.tol)?;
            let DistanceResult { d_sq, .. } =
                weighted_lsq(&a, &sums[..rows], sums[rows], &opts.weighted)?;
            let fit = chebyshev_fit(&a, &constant_vector(rows), &opts.minimax)?;
            Ok(ScanRow {
                n,
                rows,
                eps_star: fit.eps_star,
                d_sq,
                tail: sums[rows],
                pn: pn_norms(n, opts)?,
            })
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Minimax gap

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EpsRow {
    pub n: u64,
    pub rows: usize,
    /// Best level against the constant vector `c`.
    #[serde(serialize_with = "serde_rational::serialize")]
    pub eps_vs_c: Rational,
    /// Best level against `A A⁺ c`.
    #[serde(serialize_with = "serde_rational::serialize")]
    pub eps_vs_projected: Rational,
    /// `‖A A⁺ c - c‖_∞`.
    #[serde(serialize_with = "serde_rational::serialize")]
    pub lsq_sup_residual: Rational,
}

/// `ε*(n, L_n - 1)` against both `c` and `A A⁺ c`.
pub fn minimax_gap_report(n_range: &[u64], opts: &LabOptions) -> Result<ProbeReport> {
    check_range(n_range)?;
    let rows: Vec<EpsRow> = n_range
        .par_iter()
        .map(|&n| {
            let (spec, a) = full_period_matrix(n)?;
            let c = constant_vector(spec.rows());
            let lsq = lsq_unweighted(&a, &c)?;
            let projected: Vec<Rational> = lsq
                .residual
                .iter()
                .map(|r| r + Rational::from_integer(1.into()))
                .collect();
            Ok(EpsRow {
                n,
                rows: spec.rows(),
                eps_vs_c: chebyshev_fit(&a, &c, &opts.minimax)?.eps_star,
                eps_vs_projected: chebyshev_fit(&a, &projected, &opts.minimax)?.eps_star,
                lsq_sup_residual: max_abs(&lsq.residual),
            })
        })
        .collect::<Result<_>>()?;
    Ok(ProbeReport::new(
        "minimax-gap",
        &[("n", json!(n_range))],
        Verdict::Measured,
        json!({ "levels": rows }),
    ))
}

/// Convergence probe report for the constant sequence.
pub fn strong_convergence_report(n_range: &[u64]) -> Result<ProbeReport> {
    let one = Rational::from_integer(1.into());
    let rows = strong_convergence_probe(&move |_| one.clone(), n_range)?;
    Ok(ProbeReport::new(
        "strong-convergence",
        &[("n", json!(n_range)), ("sequence", json!("constant"))],
        Verdict::Measured,
        json!({ "deviations": rows }),
    ))
}

/// `L_n` as a `u64`, or an error when it does not fit.
pub fn period(n: u64) -> Result<u64> {
    lcm_upto_u64(n)?.ok_or_else(|| Error::InvalidInput(format!("L_{n} does not fit in 64 bits")))
}
