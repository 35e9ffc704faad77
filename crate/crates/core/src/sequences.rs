//! Residues, Beurling sequence entries, lcm periods and residue matrices.
//!
//! Rows are indexed `i = 1..=M` and columns by the denominators
//! `k = 2..=n` in ascending order. Two entry conventions are supported:
//! the integer residue `i mod k` and the fractional part `{i/k}`. A
//! coefficient vector `a` in one convention corresponds to `a_k / k`
//! (fractional to residue) in the other, which leaves `Σ a_k γ_k` fixed.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::Rational;
use crate::linalg::ExactMatrix;

/// Largest number of matrix entries `build_matrix` accepts by default.
pub const DEFAULT_ENTRY_CAP: u128 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Convention {
    /// `i mod k`.
    Residue,
    /// `{i/k} = (i mod k) / k`.
    Fractional,
}

impl fmt::Display for Convention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Convention::Residue => f.write_str("residue"),
            Convention::Fractional => f.write_str("fractional"),
        }
    }
}

impl FromStr for Convention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "residue" => Ok(Convention::Residue),
            "fractional" => Ok(Convention::Fractional),
            other => Err(Error::Parse(format!("unknown convention {other:?}"))),
        }
    }
}

/// Which residue matrix to build.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResidueSpec {
    n: u64,
    rows: usize,
    convention: Convention,
}

impl ResidueSpec {
    pub fn new(n: u64, rows: usize, convention: Convention) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidInput(format!(
                "n must be at least 2, got {n}"
            )));
        }
        if rows < 1 {
            return Err(Error::InvalidInput("row count must be at least 1".into()));
        }
        Ok(Self {
            n,
            rows,
            convention,
        })
    }

    /// The full period: rows `1..=L_n - 1`.
    pub fn full_period(n: u64, convention: Convention) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidInput(format!(
                "n must be at least 2, got {n}"
            )));
        }
        let period = lcm_upto(n)?;
        let rows = (&period - 1u32).to_usize().ok_or(Error::SizeCap {
            rows: u128::MAX,
            cols: u128::from(n - 1),
            cap: DEFAULT_ENTRY_CAP,
        })?;
        Self::new(n, rows, convention)
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        (self.n - 1) as usize
    }

    pub fn convention(&self) -> Convention {
        self.convention
    }
}

/// Coefficients `a_2..a_n` tagged with the convention they multiply.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoefficientVector {
    values: Vec<Rational>,
    convention: Convention,
}

impl CoefficientVector {
    pub fn new(values: Vec<Rational>, convention: Convention) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidInput(
                "coefficient vector needs at least one entry (k = 2)".into(),
            ));
        }
        Ok(Self { values, convention })
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Rational> {
        self.values
    }

    pub fn convention(&self) -> Convention {
        self.convention
    }

    /// Largest denominator `n`; the vector holds `n - 1` values.
    pub fn n(&self) -> u64 {
        self.values.len() as u64 + 1
    }

    /// Re-express in `target`, keeping `Σ a_k γ_k` unchanged.
    pub fn convert(&self, target: Convention) -> CoefficientVector {
        if target == self.convention {
            return self.clone();
        }
        let values = self
            .values
            .iter()
            .zip(2i64..)
            .map(|(v, k)| {
                let k = Rational::from_integer(BigInt::from(k));
                match target {
                    Convention::Residue => v / k,
                    Convention::Fractional => v * k,
                }
            })
            .collect();
        CoefficientVector {
            values,
            convention: target,
        }
    }
}

/// `convert_coefficients`: free-function form of [`CoefficientVector::convert`].
pub fn convert_coefficients(a: &CoefficientVector, target: Convention) -> CoefficientVector {
    a.convert(target)
}

/// `L_n = lcm(1, ..., n)`.
pub fn lcm_upto(n: u64) -> Result<BigUint> {
    if n == 0 {
        return Err(Error::InvalidInput("lcm_upto needs n >= 1".into()));
    }
    Ok((1..=n).fold(BigUint::one(), |acc, k| acc.lcm(&BigUint::from(k))))
}

/// `L_n` when it fits in a `u64`.
pub fn lcm_upto_u64(n: u64) -> Result<Option<u64>> {
    Ok(lcm_upto(n)?.to_u64())
}

pub fn residue(i: u64, k: u64) -> Result<u64> {
    if k == 0 {
        return Err(Error::InvalidInput(
            "residue modulus must be positive".into(),
        ));
    }
    Ok(i % k)
}

/// `{i/k}` as an exact rational.
pub fn beurling_entry(i: u64, k: u64) -> Result<Rational> {
    if i < 1 {
        return Err(Error::InvalidInput("Beurling index i starts at 1".into()));
    }
    if k < 2 {
        return Err(Error::InvalidInput(format!(
            "Beurling denominator must be at least 2, got {k}"
        )));
    }
    Ok(Rational::new(BigInt::from(i % k), BigInt::from(k)))
}

fn entry(i: u64, k: u64, convention: Convention) -> Rational {
    match convention {
        Convention::Residue => Rational::from_integer(BigInt::from(i % k)),
        Convention::Fractional => Rational::new(BigInt::from(i % k), BigInt::from(k)),
    }
}

pub fn build_matrix(spec: &ResidueSpec) -> Result<ExactMatrix> {
    build_matrix_capped(spec, DEFAULT_ENTRY_CAP)
}

pub fn build_matrix_capped(spec: &ResidueSpec, cap: u128) -> Result<ExactMatrix> {
    let (rows, cols) = (spec.rows(), spec.cols());
    check_cap(rows as u128, cols as u128, cap)?;
    Ok(ExactMatrix::from_fn(rows, cols, |r, c| {
        entry(r as u64 + 1, c as u64 + 2, spec.convention())
    }))
}

pub(crate) fn check_cap(rows: u128, cols: u128, cap: u128) -> Result<()> {
    if rows.saturating_mul(cols) > cap {
        return Err(Error::SizeCap { rows, cols, cap });
    }
    Ok(())
}

pub fn constant_vector(rows: usize) -> Vec<Rational> {
    vec![Rational::one(); rows]
}

/// Split of the row indices `1..=M` by whether the row vanishes identically.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RowPartition {
    /// Rows with `i mod L_n != 0`.
    pub j_rows: Vec<usize>,
    /// Rows with `i ≡ 0 (mod L_n)`: every entry is zero there.
    pub zero_rows: Vec<usize>,
}

pub fn classify_rows(n: u64, rows: usize) -> Result<RowPartition> {
    if n < 2 {
        return Err(Error::InvalidInput(format!(
            "n must be at least 2, got {n}"
        )));
    }
    let period = lcm_upto(n)?;
    let mut partition = RowPartition {
        j_rows: Vec::new(),
        zero_rows: Vec::new(),
    };
    let period = period.to_usize();
    for i in 1..=rows {
        match period {
            Some(p) if i % p == 0 => partition.zero_rows.push(i),
            _ => partition.j_rows.push(i),
        }
    }
    Ok(partition)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, rat};

    #[test]
    fn lcm_values() {
        assert_eq!(lcm_upto(1).unwrap(), BigUint::from(1u32));
        assert_eq!(lcm_upto(3).unwrap(), BigUint::from(6u32));
        assert_eq!(lcm_upto(10).unwrap(), BigUint::from(2520u32));
        assert!(lcm_upto(0).is_err());
    }

    #[test]
    fn lcm_matches_iterated_gcd() {
        fn gcd(a: u64, b: u64) -> u64 {
            if b == 0 {
                a
            } else {
                gcd(b, a % b)
            }
        }
        let mut acc = 1u64;
        for n in 1..=30u64 {
            acc = acc / gcd(acc, n) * n;
            assert_eq!(lcm_upto(n).unwrap(), BigUint::from(acc), "n = {n}");
        }
    }

    #[test]
    fn residues() {
        assert_eq!(residue(5, 3).unwrap(), 2);
        assert_eq!(residue(6, 2).unwrap(), 0);
        assert_eq!(residue(1, 7).unwrap(), 1);
        assert!(residue(3, 0).is_err());
    }

    #[test]
    fn beurling_entries() {
        assert_eq!(beurling_entry(1, 2).unwrap(), rat(1, 2));
        assert_eq!(beurling_entry(4, 2).unwrap(), int(0));
        assert_eq!(beurling_entry(5, 3).unwrap(), rat(2, 3));
        assert!(beurling_entry(5, 1).is_err());
        assert!(beurling_entry(0, 3).is_err());
    }

    #[test]
    fn residue_matrix_n3() {
        let spec = ResidueSpec::new(3, 5, Convention::Residue).unwrap();
        let a = build_matrix(&spec).unwrap();
        let expected = [[1, 1], [0, 2], [1, 0], [0, 1], [1, 2]];
        for (r, row) in expected.iter().enumerate() {
            for (c, v) in row.iter().enumerate() {
                assert_eq!(a[(r, c)], int(*v));
            }
        }
    }

    #[test]
    fn fractional_matrix_n3() {
        let spec = ResidueSpec::new(3, 5, Convention::Fractional).unwrap();
        let a = build_matrix(&spec).unwrap();
        let expected = [
            [rat(1, 2), rat(1, 3)],
            [int(0), rat(2, 3)],
            [rat(1, 2), int(0)],
            [int(0), rat(1, 3)],
            [rat(1, 2), rat(2, 3)],
        ];
        for (r, row) in expected.iter().enumerate() {
            assert_eq!(a.row(r), row.as_slice());
        }
    }

    #[test]
    fn smallest_matrix() {
        let a = build_matrix(&ResidueSpec::new(2, 1, Convention::Residue).unwrap()).unwrap();
        assert_eq!((a.rows(), a.cols()), (1, 1));
        assert_eq!(a[(0, 0)], int(1));
    }

    #[test]
    fn size_cap_is_enforced() {
        let spec = ResidueSpec::new(5, 100, Convention::Residue).unwrap();
        assert!(matches!(
            build_matrix_capped(&spec, 399),
            Err(Error::SizeCap {
                rows: 100,
                cols: 4,
                ..
            })
        ));
        assert!(build_matrix_capped(&spec, 400).is_ok());
    }

    #[test]
    fn spec_validation() {
        assert!(ResidueSpec::new(1, 5, Convention::Residue).is_err());
        assert!(ResidueSpec::new(3, 0, Convention::Residue).is_err());
        assert_eq!(
            ResidueSpec::full_period(4, Convention::Residue)
                .unwrap()
                .rows(),
            11
        );
    }

    #[test]
    fn constant_vectors() {
        assert_eq!(constant_vector(1), vec![int(1)]);
        assert_eq!(constant_vector(3), vec![int(1); 3]);
        assert_eq!(constant_vector(5).len(), 5);
    }

    #[test]
    fn row_classification() {
        let p = classify_rows(2, 4).unwrap();
        assert_eq!(p.j_rows, vec![1, 3]);
        assert_eq!(p.zero_rows, vec![2, 4]);
        let p = classify_rows(3, 6).unwrap();
        assert_eq!(p.j_rows, vec![1, 2, 3, 4, 5]);
        assert_eq!(p.zero_rows, vec![6]);
        let p = classify_rows(2, 1).unwrap();
        assert_eq!(p.j_rows, vec![1]);
        assert!(p.zero_rows.is_empty());
    }

    #[test]
    fn coefficient_conversion() {
        let frac = CoefficientVector::new(vec![int(1), rat(3, 2)], Convention::Fractional).unwrap();
        let res = frac.convert(Convention::Residue);
        assert_eq!(res.values(), &[rat(1, 2), rat(1, 2)]);

        // Both forms give the same combination on rows 1..5.
        for i in 1..=5u64 {
            let lhs: Rational = frac
                .values()
                .iter()
                .zip(2u64..)
                .map(|(a, k)| a * beurling_entry(i, k).unwrap())
                .sum();
            let rhs: Rational = res
                .values()
                .iter()
                .zip(2u64..)
                .map(|(a, k)| a * int(residue(i, k).unwrap() as i64))
                .sum();
            assert_eq!(lhs, rhs, "row {i}");
        }

        let zero = CoefficientVector::new(vec![int(0); 4], Convention::Residue).unwrap();
        assert_eq!(
            zero.convert(Convention::Fractional).values(),
            &vec![int(0); 4]
        );

        let one = CoefficientVector::new(vec![int(1)], Convention::Residue).unwrap();
        assert_eq!(one.convert(Convention::Fractional).values(), &[int(2)]);
        assert_eq!(one.n(), 2);
    }
}
