//! Dense exact linear algebra over the Gaussian rationals. No
//! tolerances anywhere; pivoting is the first nonzero entry in column
//! order, so reduced forms are canonical.

use serde::{Deserialize, Serialize};

use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScalarMatrix {
    pub rows: usize,
    pub cols: usize,
    data: Vec<Scalar>,
}

impl ScalarMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        ScalarMatrix {
            rows,
            cols,
            data: vec![Scalar::zero(); rows * cols],
        }
    }

    pub fn from_rows(rows: Vec<Vec<Scalar>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            data.extend(row);
        }
        ScalarMatrix { rows: r, cols: c, data }
    }

    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Scalar) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Scalar] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn mul_vec(&self, v: &[Scalar]) -> Vec<Scalar> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                let mut acc = Scalar::zero();
                for j in 0..self.cols {
                    let a = self.get(i, j);
                    if !a.is_zero() {
                        acc = &acc + &(a * &v[j]);
                    }
                }
                acc
            })
            .collect()
    }

    /// In-place reduced row echelon form; returns the pivot columns.
    pub fn rref(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let pivot_row = (r..self.rows).find(|&i| !self.get(i, c).is_zero());
            let p = match pivot_row {
                Some(p) => p,
                None => continue,
            };
            self.swap_rows(r, p);
            let inv = self.get(r, c).inv().unwrap();
            for j in c..self.cols {
                let v = self.get(r, j) * &inv;
                self.set(r, j, v);
            }
            for i in 0..self.rows {
                if i == r || self.get(i, c).is_zero() {
                    continue;
                }
                let f = self.get(i, c).clone();
                for j in c..self.cols {
                    let v = self.get(i, j) - &(&f * self.get(r, j));
                    self.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        m.rref().len()
    }
}

/// Kernel basis of M (right nullspace), from the canonical RREF: one
/// basis vector per free column, free coordinate set to 1.
pub fn rref_nullspace(m: &ScalarMatrix) -> Vec<Vec<Scalar>> {
    let mut r = m.clone();
    let pivots = r.rref();
    let pivot_set: std::collections::BTreeSet<usize> = pivots.iter().copied().collect();
    let mut basis = Vec::new();
    for free in 0..m.cols {
        if pivot_set.contains(&free) {
            continue;
        }
        let mut v = vec![Scalar::zero(); m.cols];
        v[free] = Scalar::one();
        for (row, &pc) in pivots.iter().enumerate() {
            v[pc] = -r.get(row, free);
        }
        basis.push(v);
    }
    basis
}

/// Exact affine solution set of A x = b.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AffineSolutionSpace {
    /// Absent when the system is inconsistent.
    pub particular: Option<Vec<Scalar>>,
    pub kernel: Vec<Vec<Scalar>>,
    pub dimension: usize,
    /// Index (in input order) of the first constraint that made the
    /// system inconsistent, when it is.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub inconsistent_row: Option<usize>,
}

impl AffineSolutionSpace {
    pub fn is_consistent(&self) -> bool {
        self.particular.is_some()
    }
}

/// Solves A x = b exactly. Elimination is incremental over the input
/// rows, so the reported inconsistent constraint is the first one (in
/// input order) that conflicts with its predecessors.
pub fn solve_affine(a: &ScalarMatrix, b: &[Scalar]) -> AffineSolutionSpace {
    assert_eq!(a.rows, b.len());
    let n = a.cols;
    // reduced rows: (coefficients, rhs, pivot column)
    let mut reduced: Vec<(Vec<Scalar>, Scalar, usize)> = Vec::new();
    let mut inconsistent_row = None;

    for i in 0..a.rows {
        let mut row: Vec<Scalar> = a.row(i).to_vec();
        let mut rhs = b[i].clone();
        for (coef, r, p) in &reduced {
            if row[*p].is_zero() {
                continue;
            }
            let f = row[*p].clone();
            for j in 0..n {
                if !coef[j].is_zero() {
                    row[j] = &row[j] - &(&f * &coef[j]);
                }
            }
            rhs = &rhs - &(&f * r);
        }
        match row.iter().position(|v| !v.is_zero()) {
            Some(p) => {
                let inv = row[p].inv().unwrap();
                for v in row.iter_mut() {
                    *v = &*v * &inv;
                }
                rhs = &rhs * &inv;
                // back-substitute into earlier rows to keep them reduced
                for (coef, r, _) in reduced.iter_mut() {
                    if coef[p].is_zero() {
                        continue;
                    }
                    let f = coef[p].clone();
                    for j in 0..n {
                        if !row[j].is_zero() {
                            coef[j] = &coef[j] - &(&f * &row[j]);
                        }
                    }
                    *r = &*r - &(&f * &rhs);
                }
                reduced.push((row, rhs, p));
            }
            None => {
                if !rhs.is_zero() && inconsistent_row.is_none() {
                    inconsistent_row = Some(i);
                }
            }
        }
    }

    let pivot_set: std::collections::BTreeSet<usize> =
        reduced.iter().map(|(_, _, p)| *p).collect();
    let mut kernel = Vec::new();
    for free in 0..n {
        if pivot_set.contains(&free) {
            continue;
        }
        let mut v = vec![Scalar::zero(); n];
        v[free] = Scalar::one();
        for (coef, _, p) in &reduced {
            v[*p] = -&coef[free];
        }
        kernel.push(v);
    }
    let particular = if inconsistent_row.is_none() {
        let mut x = vec![Scalar::zero(); n];
        for (_, r, p) in &reduced {
            x[*p] = r.clone();
        }
        Some(x)
    } else {
        None
    };
    let dimension = kernel.len();
    AffineSolutionSpace {
        particular,
        kernel,
        dimension,
        inconsistent_row,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(n: i64) -> Scalar {
        Scalar::from_int(n)
    }

    #[test]
    fn nullspace_identity_empty() {
        let mut m = ScalarMatrix::zero(2, 2);
        m.set(0, 0, s(1));
        m.set(1, 1, s(1));
        assert!(rref_nullspace(&m).is_empty());
    }

    #[test]
    fn nullspace_zero_full() {
        let m = ScalarMatrix::zero(2, 2);
        assert_eq!(rref_nullspace(&m).len(), 2);
    }

    #[test]
    fn nullspace_one_constraint() {
        let m = ScalarMatrix::from_rows(vec![vec![s(1), s(1)]]);
        let basis = rref_nullspace(&m);
        assert_eq!(basis.len(), 1);
        // proportional to (1, -1)
        let v = &basis[0];
        assert_eq!(&v[0] + &v[1], s(0));
        assert!(!v[0].is_zero());
    }

    #[test]
    fn nullspace_residual_zero() {
        let m = ScalarMatrix::from_rows(vec![
            vec![s(2), s(4), s(-2)],
            vec![s(1), s(2), s(-1)],
            vec![s(0), s(3), s(3)],
        ]);
        for v in rref_nullspace(&m) {
            for r in m.mul_vec(&v) {
                assert!(r.is_zero());
            }
        }
    }

    #[test]
    fn solve_consistent() {
        // x + y = 3, x - y = 1 -> x = 2, y = 1
        let a = ScalarMatrix::from_rows(vec![vec![s(1), s(1)], vec![s(1), s(-1)]]);
        let sol = solve_affine(&a, &[s(3), s(1)]);
        assert_eq!(sol.particular, Some(vec![s(2), s(1)]));
        assert!(sol.kernel.is_empty());
    }

    #[test]
    fn solve_inconsistent_reports_first_bad_row() {
        let a = ScalarMatrix::from_rows(vec![
            vec![s(1), s(1)],
            vec![s(2), s(2)],
            vec![s(1), s(1)],
        ]);
        let sol = solve_affine(&a, &[s(1), s(3), s(9)]);
        assert!(sol.particular.is_none());
        assert_eq!(sol.inconsistent_row, Some(1));
    }

    #[test]
    fn solve_underdetermined() {
        let a = ScalarMatrix::from_rows(vec![vec![s(1), s(1), s(0)]]);
        let sol = solve_affine(&a, &[s(5)]);
        assert_eq!(sol.dimension, 2);
        let p = sol.particular.unwrap();
        assert_eq!(&p[0] + &p[1], s(5));
        for k in &sol.kernel {
            assert!((&k[0] + &k[1]).is_zero());
        }
    }
}
