//! Dense exact linear algebra over the rationals, just enough for the
//! coefficient systems produced by ansatz searches and gauge stripping.

use num::{BigRational, One, Zero};

#[derive(Debug, Clone, PartialEq)]
pub struct QMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigRational>,
}

impl QMatrix {
    pub fn zeros(rows: usize, cols: usize) -> QMatrix {
        QMatrix { rows, cols, data: vec![BigRational::zero(); rows * cols] }
    }

    pub fn from_rows(rows: Vec<Vec<BigRational>>) -> QMatrix {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        QMatrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &BigRational {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: BigRational) {
        self.data[r * self.cols + c] = v;
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    /// In-place reduced row echelon form; returns the pivot columns.
    pub fn rref(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..self.cols {
            if row == self.rows {
                break;
            }
            let Some(p) = (row..self.rows).find(|&r| !self.get(r, col).is_zero()) else {
                continue;
            };
            self.swap_rows(row, p);
            let inv = self.get(row, col).recip();
            for c in col..self.cols {
                let v = self.get(row, c) * &inv;
                self.set(row, c, v);
            }
            for r in 0..self.rows {
                if r != row && !self.get(r, col).is_zero() {
                    let factor = self.get(r, col).clone();
                    for c in col..self.cols {
                        let v = self.get(r, c) - &factor * self.get(row, c);
                        self.set(r, c, v);
                    }
                }
            }
            pivots.push(col);
            row += 1;
        }
        pivots
    }

    /// One solution of self·x = rhs with free variables set to zero, or None
    /// if the system is inconsistent.
    pub fn solve(&self, rhs: &[BigRational]) -> Option<Vec<BigRational>> {
        assert_eq!(rhs.len(), self.rows);
        let mut aug = QMatrix::zeros(self.rows, self.cols + 1);
        for r in 0..self.rows {
            for c in 0..self.cols {
                aug.set(r, c, self.get(r, c).clone());
            }
            aug.set(r, self.cols, rhs[r].clone());
        }
        let pivots = aug.rref();
        if pivots.contains(&self.cols) {
            return None;
        }
        let mut x = vec![BigRational::zero(); self.cols];
        for (r, &col) in pivots.iter().enumerate() {
            x[col] = aug.get(r, self.cols).clone();
        }
        Some(x)
    }

    /// Basis of the right nullspace.
    pub fn nullspace(&self) -> Vec<Vec<BigRational>> {
        let mut m = self.clone();
        let pivots = m.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![BigRational::zero(); self.cols];
                v[f] = BigRational::one();
                for (r, &p) in pivots.iter().enumerate() {
                    v[p] = -m.get(r, f).clone();
                }
                v
            })
            .collect()
    }
}

/// Coefficient matrix of a family of polynomials over their shared monomial
/// basis: one row per monomial appearing in any column, entry = coefficient
/// of that monomial in the column's polynomial.
pub fn coefficient_matrix(cols: &[crate::expr::Poly]) -> QMatrix {
    use std::collections::BTreeSet;
    let monomials: BTreeSet<_> = cols
        .iter()
        .flat_map(|p| p.terms().iter().map(|(m, _)| m.clone()))
        .collect();
    let mut m = QMatrix::zeros(monomials.len(), cols.len());
    for (r, mono) in monomials.iter().enumerate() {
        for (c, p) in cols.iter().enumerate() {
            if let Some((_, coeff)) = p.terms().iter().find(|(pm, _)| pm == mono) {
                m.set(r, c, coeff.clone());
            }
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    #[test]
    fn solves_square_systems() {
        // x + 2y = 5, 3x + 4y = 11 → x = 1, y = 2.
        let m = QMatrix::from_rows(vec![vec![q(1), q(2)], vec![q(3), q(4)]]);
        assert_eq!(m.solve(&[q(5), q(11)]).unwrap(), vec![q(1), q(2)]);
    }

    #[test]
    fn detects_inconsistency() {
        let m = QMatrix::from_rows(vec![vec![q(1), q(1)], vec![q(2), q(2)]]);
        assert!(m.solve(&[q(1), q(3)]).is_none());
        assert!(m.solve(&[q(1), q(2)]).is_some());
    }

    #[test]
    fn underdetermined_solution_zeroes_free_variables() {
        let m = QMatrix::from_rows(vec![vec![q(1), q(1), q(0)], vec![q(0), q(0), q(1)]]);
        assert_eq!(m.solve(&[q(4), q(7)]).unwrap(), vec![q(4), q(0), q(7)]);
    }

    #[test]
    fn nullspace_basis() {
        let m = QMatrix::from_rows(vec![vec![q(1), q(1)]]);
        assert_eq!(m.nullspace(), vec![vec![q(-1), q(1)]]);
        let full = QMatrix::from_rows(vec![vec![q(1), q(0)], vec![q(0), q(1)]]);
        assert!(full.nullspace().is_empty());
        // Rank-1 2x3: two free columns.
        let wide = QMatrix::from_rows(vec![vec![q(1), q(2), q(3)], vec![q(2), q(4), q(6)]]);
        let ns = wide.nullspace();
        assert_eq!(ns.len(), 2);
        for v in &ns {
            let dot: BigRational =
                (0..3).map(|c| wide.get(0, c) * &v[c]).fold(q(0), |a, b| a + b);
            assert!(dot.is_zero());
        }
    }

    #[test]
    fn rref_pivots() {
        let mut m = QMatrix::from_rows(vec![
            vec![q(0), q(2), q(4)],
            vec![q(1), q(1), q(1)],
        ]);
        let pivots = m.rref();
        assert_eq!(pivots, vec![0, 1]);
        assert_eq!(m.get(0, 0), &q(1));
        assert_eq!(m.get(1, 1), &q(1));
        assert_eq!(m.get(0, 1), &q(0));
    }
}
