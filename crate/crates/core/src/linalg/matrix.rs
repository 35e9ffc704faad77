use std::fmt;
use std::ops::{Index, IndexMut, Mul};

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exact::{parse_rational, to_f64, Rational};

/// Row-major dense matrix. The scalar type is the domain tag:
/// [`ExactMatrix`] for rationals, [`FloatMatrix`] for the binary64 mirror.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

pub type ExactMatrix = Matrix<Rational>;
pub type FloatMatrix = Matrix<f64>;

impl<T> Matrix<T> {
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if rows * cols != data.len() {
            return Err(Error::mismatch(
                format!("{} entries", rows * cols),
                format!("{} entries", data.len()),
            ));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let n_rows = rows.len();
        let mut data = Vec::with_capacity(n_rows * cols);
        for (r, row) in rows.into_iter().enumerate() {
            if row.len() != cols {
                return Err(Error::mismatch(
                    format!("{cols} columns"),
                    format!("{} columns in row {}", row.len(), r + 1),
                ));
            }
            data.extend(row);
        }
        Ok(Self {
            rows: n_rows,
            cols,
            data,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn row(&self, r: usize) -> &[T] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_iter(&self) -> impl Iterator<Item = &[T]> {
        // chunks(0) panics, and a matrix with zero columns has no entries anyway.
        self.data.chunks(self.cols.max(1)).take(self.rows)
    }

    pub fn entries(&self) -> &[T] {
        &self.data
    }

    pub fn map<U>(&self, f: impl FnMut(&T) -> U) -> Matrix<U> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }
}

impl<T: Clone> Matrix<T> {
    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].clone())
    }

    pub fn column(&self, c: usize) -> Vec<T> {
        (0..self.rows).map(|r| self[(r, c)].clone()).collect()
    }

    /// Column vector (`len x 1`).
    pub fn column_vector(values: &[T]) -> Self {
        Self {
            rows: values.len(),
            cols: 1,
            data: values.to_vec(),
        }
    }
}

impl<T: Clone + Zero> Matrix<T>
where
    for<'a> &'a T: Mul<&'a T, Output = T>,
{
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |_, _| T::zero())
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::mismatch(
                format!("{} rows on the right", self.cols),
                format!("{}", other.rows),
            ));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            let lhs = self.row(r);
            let dst = &mut out.data[r * other.cols..(r + 1) * other.cols];
            for (t, a) in lhs.iter().enumerate() {
                if a.is_zero() {
                    continue;
                }
                for (d, b) in dst.iter_mut().zip(other.row(t)) {
                    *d = d.clone() + a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[T]) -> Result<Vec<T>> {
        if self.cols != v.len() {
            return Err(Error::mismatch(
                format!("vector of length {}", self.cols),
                format!("length {}", v.len()),
            ));
        }
        Ok(self
            .row_iter()
            .map(|row| row.iter().zip(v).fold(T::zero(), |acc, (a, b)| acc + a * b))
            .collect())
    }

    /// `Aᵀ v` without materializing the transpose.
    pub fn tr_mul_vec(&self, v: &[T]) -> Result<Vec<T>> {
        if self.rows != v.len() {
            return Err(Error::mismatch(
                format!("vector of length {}", self.rows),
                format!("length {}", v.len()),
            ));
        }
        let mut out = vec![T::zero(); self.cols];
        for (row, x) in self.row_iter().zip(v) {
            if x.is_zero() {
                continue;
            }
            for (o, a) in out.iter_mut().zip(row) {
                *o = o.clone() + a * x;
            }
        }
        Ok(out)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }
}

impl<T: Clone + Zero + One> Matrix<T>
where
    for<'a> &'a T: Mul<&'a T, Output = T>,
{
    pub fn identity(size: usize) -> Self {
        Self::from_fn(size, size, |r, c| if r == c { T::one() } else { T::zero() })
    }
}

impl ExactMatrix {
    /// Nearest-binary64 mirror.
    pub fn to_float(&self) -> FloatMatrix {
        self.map(to_f64)
    }

    /// Integer matrix from a nested array, mostly for tests.
    pub fn from_i64_rows<const C: usize>(rows: &[[i64; C]]) -> Self {
        Self::from_fn(rows.len(), C, |r, c| {
            Rational::from_integer(rows[r][c].into())
        })
    }

    /// Plain-text form: `ROWS COLS` then one line per row.
    pub fn to_text(&self) -> String {
        self.to_string()
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty matrix file".into()))?;
        let dims: Vec<usize> = header
            .split_whitespace()
            .map(|t| {
                t.parse()
                    .map_err(|_| Error::Parse(format!("bad dimension {t:?}")))
            })
            .collect::<Result<_>>()?;
        let [rows, cols] = dims[..] else {
            return Err(Error::Parse(format!(
                "header must be `ROWS COLS`, got {header:?}"
            )));
        };
        let mut data = Vec::with_capacity(rows * cols);
        let mut seen = 0;
        for line in lines {
            let before = data.len();
            for token in line.split_whitespace() {
                data.push(parse_rational(token)?);
            }
            if data.len() - before != cols {
                return Err(Error::Parse(format!(
                    "row {} has {} entries, expected {cols}",
                    seen + 1,
                    data.len() - before
                )));
            }
            seen += 1;
        }
        if seen != rows {
            return Err(Error::Parse(format!("expected {rows} rows, found {seen}")));
        }
        Self::from_vec(rows, cols, data)
    }
}

impl fmt::Display for ExactMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} {}", self.rows, self.cols)?;
        for row in self.row_iter() {
            let mut first = true;
            for v in row {
                if !first {
                    f.write_str(" ")?;
                }
                first = false;
                write!(f, "{v}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;

    fn index(&self, (r, c): (usize, usize)) -> &T {
        debug_assert!(r < self.rows && c < self.cols);
        &self.data[r * self.cols + c]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut T {
        debug_assert!(r < self.rows && c < self.cols);
        &mut self.data[r * self.cols + c]
    }
}
