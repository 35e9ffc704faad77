//! Dense two-phase tableau simplex for `min gᵀx, Bx = b, x ≥ 0` with `b ≥ 0`.
//!
//! Bland's rule (lowest entering index, lowest leaving basic index on ratio
//! ties) rules out cycling. The scalar type picks the arithmetic: exact
//! rationals, or `f64` with fixed zero thresholds.

use std::fmt::Debug;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exact::Rational;
use crate::linalg::Matrix;

pub(crate) trait LpScalar: Clone + Debug {
    fn lp_zero() -> Self;
    fn lp_one() -> Self;
    fn is_zero_ish(&self) -> bool;
    fn is_pos(&self) -> bool;
    fn is_neg(&self) -> bool;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn div(&self, other: &Self) -> Self;
    fn less(&self, other: &Self) -> bool;
    fn equal(&self, other: &Self) -> bool;
}

impl LpScalar for Rational {
    fn lp_zero() -> Self {
        Zero::zero()
    }
    fn lp_one() -> Self {
        One::one()
    }
    fn is_zero_ish(&self) -> bool {
        Zero::is_zero(self)
    }
    fn is_pos(&self) -> bool {
        Signed::is_positive(self)
    }
    fn is_neg(&self) -> bool {
        Signed::is_negative(self)
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn div(&self, other: &Self) -> Self {
        self / other
    }
    fn less(&self, other: &Self) -> bool {
        self < other
    }
    fn equal(&self, other: &Self) -> bool {
        self == other
    }
}

const FLOAT_ZERO: f64 = 1e-11;

impl LpScalar for f64 {
    fn lp_zero() -> Self {
        0.0
    }
    fn lp_one() -> Self {
        1.0
    }
    fn is_zero_ish(&self) -> bool {
        self.abs() <= FLOAT_ZERO
    }
    fn is_pos(&self) -> bool {
        *self > FLOAT_ZERO
    }
    fn is_neg(&self) -> bool {
        *self < -FLOAT_ZERO
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn div(&self, other: &Self) -> Self {
        self / other
    }
    fn less(&self, other: &Self) -> bool {
        self < other
    }
    fn equal(&self, other: &Self) -> bool {
        (self - other).abs() <= FLOAT_ZERO * (1.0 + self.abs().max(other.abs()))
    }
}

pub(crate) struct StandardForm<T> {
    pub constraints: Matrix<T>,
    pub cost: Vec<T>,
    pub rhs: Vec<T>,
}

#[derive(Debug, Clone)]
pub(crate) struct SimplexOutcome<T> {
    /// Basic column of each row; indices `>= n` are artificials (redundant rows).
    pub basis: Vec<usize>,
    /// Simplex multipliers `y = c_Bᵀ B⁻¹`.
    pub duals: Vec<T>,
    pub objective: T,
    pub iterations: usize,
}

struct Tableau<T> {
    m: usize,
    n: usize,
    width: usize,
    cells: Vec<T>,
    objective: Vec<T>,
    basis: Vec<usize>,
    iterations: usize,
    cap: usize,
}

impl<T: LpScalar> Tableau<T> {
    fn new(lp: &StandardForm<T>, cap: usize) -> Self {
        let m = lp.constraints.rows();
        let n = lp.constraints.cols();
        let width = n + m + 1;
        let mut cells = vec![T::lp_zero(); m * width];
        for r in 0..m {
            cells[r * width..r * width + n].clone_from_slice(lp.constraints.row(r));
            cells[r * width + n + r] = T::lp_one();
            cells[r * width + n + m] = lp.rhs[r].clone();
        }
        Self {
            m,
            n,
            width,
            cells,
            objective: vec![T::lp_zero(); width],
            basis: (n..n + m).collect(),
            iterations: 0,
            cap,
        }
    }

    fn at(&self, r: usize, c: usize) -> &T {
        &self.cells[r * self.width + c]
    }

    fn rhs(&self, r: usize) -> &T {
        self.at(r, self.width - 1)
    }

    /// Reduced costs for a full cost vector over structural + artificial columns.
    fn price(&mut self, cost: &[T]) {
        for j in 0..self.width {
            let mut z = if j < self.width - 1 {
                cost[j].clone()
            } else {
                T::lp_zero()
            };
            for r in 0..self.m {
                let cb = &cost[self.basis[r]];
                let a = self.at(r, j);
                if !cb.is_zero_ish() && !a.is_zero_ish() {
                    z = z.sub(&cb.mul(a));
                }
            }
            self.objective[j] = z;
        }
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let w = self.width;
        let piv = self.at(row, col).clone();
        for c in 0..w {
            let v = self.cells[row * w + c].div(&piv);
            self.cells[row * w + c] = v;
        }
        self.cells[row * w + col] = T::lp_one();
        let pivot_row: Vec<T> = self.cells[row * w..(row + 1) * w].to_vec();
        for r in 0..self.m {
            if r == row {
                continue;
            }
            let factor = self.cells[r * w + col].clone();
            if factor.is_zero_ish() {
                self.cells[r * w + col] = T::lp_zero();
                continue;
            }
            for (c, p) in pivot_row.iter().enumerate() {
                if !p.is_zero_ish() {
                    let v = self.cells[r * w + c].sub(&factor.mul(p));
                    self.cells[r * w + c] = v;
                }
            }
            self.cells[r * w + col] = T::lp_zero();
        }
        let factor = self.objective[col].clone();
        if !factor.is_zero_ish() {
            for (c, p) in pivot_row.iter().enumerate() {
                if !p.is_zero_ish() {
                    self.objective[c] = self.objective[c].sub(&factor.mul(p));
                }
            }
        }
        self.objective[col] = T::lp_zero();
        self.basis[row] = col;
        self.iterations += 1;
    }

    /// Bland's rule over structural columns until optimal.
    fn optimize(&mut self) -> Result<()> {
        loop {
            let Some(col) = (0..self.n).find(|&j| self.objective[j].is_neg()) else {
                return Ok(());
            };
            let mut best: Option<(usize, T)> = None;
            for r in 0..self.m {
                let a = self.at(r, col);
                if !a.is_pos() {
                    continue;
                }
                let ratio = self.rhs(r).div(a);
                let better = match &best {
                    None => true,
                    Some((br, bv)) => {
                        ratio.less(bv) || (ratio.equal(bv) && self.basis[r] < self.basis[*br])
                    }
                };
                if better {
                    best = Some((r, ratio));
                }
            }
            let Some((row, _)) = best else {
                return Err(Error::Unbounded);
            };
            if self.iterations >= self.cap {
                return Err(Error::IterationCap(self.cap));
            }
            self.pivot(row, col);
        }
    }
}

pub(crate) fn solve<T: LpScalar>(lp: &StandardForm<T>, cap: usize) -> Result<SimplexOutcome<T>> {
    let mut tab = Tableau::new(lp, cap);
    let (m, n) = (tab.m, tab.n);

    let mut phase_one = vec![T::lp_zero(); n];
    phase_one.extend(std::iter::repeat_with(T::lp_one).take(m));
    tab.price(&phase_one);
    tab.optimize()?;
    let infeasibility = tab.objective[tab.width - 1].clone();
    if infeasibility.is_neg() {
        return Err(Error::Infeasible);
    }

    // Drive artificials out of the basis where the row allows it.
    for r in 0..m {
        if tab.basis[r] < n {
            continue;
        }
        if let Some(col) = (0..n).find(|&j| !tab.at(r, j).is_zero_ish() && !tab.basis.contains(&j))
        {
            tab.pivot(r, col);
        }
    }

    let mut phase_two = lp.cost.clone();
    phase_two.extend(std::iter::repeat_with(T::lp_zero).take(m));
    tab.price(&phase_two);
    tab.optimize()?;

    let duals = (0..m)
        .map(|k| T::lp_zero().sub(&tab.objective[n + k]))
        .collect();
    Ok(SimplexOutcome {
        basis: tab.basis.clone(),
        duals,
        objective: T::lp_zero().sub(&tab.objective[tab.width - 1]),
        iterations: tab.iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::int;

    #[test]
    fn small_lp_exact() {
        // min -x - y  s.t. x + s1 = 2, y + s2 = 3, x + y + s3 = 4
        let constraints = Matrix::from_rows(vec![
            vec![int(1), int(0), int(1), int(0), int(0)],
            vec![int(0), int(1), int(0), int(1), int(0)],
            vec![int(1), int(1), int(0), int(0), int(1)],
        ])
        .unwrap();
        let lp = StandardForm {
            constraints,
            cost: vec![int(-1), int(-1), int(0), int(0), int(0)],
            rhs: vec![int(2), int(3), int(4)],
        };
        let out = solve(&lp, 100).unwrap();
        assert_eq!(out.objective, int(-4));
        // Dual objective bᵀy equals the primal optimum.
        let dual_obj: Rational = out.duals.iter().zip(&lp.rhs).map(|(y, b)| y * b).sum();
        assert_eq!(dual_obj, int(-4));
    }

    #[test]
    fn infeasible_and_unbounded() {
        let lp = StandardForm {
            constraints: Matrix::from_rows(vec![vec![int(1), int(1)], vec![int(1), int(1)]])
                .unwrap(),
            cost: vec![int(0), int(0)],
            rhs: vec![int(1), int(2)],
        };
        assert_eq!(solve(&lp, 100).unwrap_err(), Error::Infeasible);

        let lp = StandardForm {
            constraints: Matrix::from_rows(vec![vec![int(1), int(-1)]]).unwrap(),
            cost: vec![int(0), int(-1)],
            rhs: vec![int(1)],
        };
        assert_eq!(solve(&lp, 100).unwrap_err(), Error::Unbounded);
    }

    #[test]
    fn redundant_rows_keep_artificial() {
        let lp = StandardForm {
            constraints: Matrix::from_rows(vec![vec![int(1), int(1)], vec![int(2), int(2)]])
                .unwrap(),
            cost: vec![int(1), int(2)],
            rhs: vec![int(1), int(2)],
        };
        let out = solve(&lp, 100).unwrap();
        assert_eq!(out.objective, int(1));
        assert_eq!(out.basis.iter().filter(|&&b| b >= 2).count(), 1);
    }

    #[test]
    fn float_matches_exact() {
        let rows = vec![vec![2.0, 1.0, 1.0, 0.0], vec![1.0, 3.0, 0.0, 1.0]];
        let lp = StandardForm {
            constraints: Matrix::from_rows(rows).unwrap(),
            cost: vec![-3.0, -2.0, 0.0, 0.0],
            rhs: vec![4.0, 6.0],
        };
        let out = solve(&lp, 100).unwrap();
        // x = 6/5, y = 8/5.
        assert!((out.objective - (-3.0 * 1.2 - 2.0 * 1.6)).abs() < 1e-12);
    }

    #[test]
    fn iteration_cap() {
        let constraints = Matrix::from_rows(vec![
            vec![int(1), int(0), int(1), int(0)],
            vec![int(0), int(1), int(0), int(1)],
        ])
        .unwrap();
        let lp = StandardForm {
            constraints,
            cost: vec![int(-1), int(-1), int(0), int(0)],
            rhs: vec![int(1), int(1)],
        };
        assert_eq!(solve(&lp, 1).unwrap_err(), Error::IterationCap(1));
    }
}
