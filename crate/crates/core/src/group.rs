//! Finitely generated abelian groups Z^r x Z_{m_1} x ... x Z_{m_t},
//! Smith normal form, and the "generating system" decision.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::CoreError;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupSpec {
    pub free_rank: usize,
    #[serde(rename = "torsion")]
    pub torsion_orders: Vec<u64>,
}

impl GroupSpec {
    pub fn new(free_rank: usize, torsion_orders: Vec<u64>) -> Result<Self, CoreError> {
        if torsion_orders.iter().any(|&m| m < 2) {
            return Err(CoreError::InvalidInput(
                "torsion orders must be >= 2".into(),
            ));
        }
        Ok(GroupSpec {
            free_rank,
            torsion_orders,
        })
    }

    /// Z^d.
    pub fn free(d: usize) -> Self {
        GroupSpec {
            free_rank: d,
            torsion_orders: Vec::new(),
        }
    }

    pub fn is_free(&self) -> bool {
        self.torsion_orders.is_empty()
    }

    /// Rank of the lift Z^{r+t} used for lattice computations.
    pub fn lifted_rank(&self) -> usize {
        self.free_rank + self.torsion_orders.len()
    }

    pub fn is_trivial(&self) -> bool {
        self.free_rank == 0 && self.torsion_orders.is_empty()
    }

    pub fn identity(&self) -> GroupElement {
        GroupElement {
            free: vec![0; self.free_rank],
            torsion: vec![0; self.torsion_orders.len()],
        }
    }

    pub fn check_element(&self, e: &GroupElement) -> Result<(), CoreError> {
        if e.free.len() != self.free_rank {
            return Err(CoreError::DimensionMismatch {
                expected: self.free_rank,
                got: e.free.len(),
            });
        }
        if e.torsion.len() != self.torsion_orders.len() {
            return Err(CoreError::DimensionMismatch {
                expected: self.torsion_orders.len(),
                got: e.torsion.len(),
            });
        }
        Ok(())
    }

    pub fn reduce(&self, e: &GroupElement) -> GroupElement {
        GroupElement {
            free: e.free.clone(),
            torsion: e
                .torsion
                .iter()
                .zip(&self.torsion_orders)
                .map(|(&v, &m)| v.rem_euclid(m as i64))
                .collect(),
        }
    }

    pub fn add(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        let free = a.free.iter().zip(&b.free).map(|(x, y)| x + y).collect();
        let torsion = a
            .torsion
            .iter()
            .zip(&b.torsion)
            .zip(&self.torsion_orders)
            .map(|((x, y), &m)| (x + y).rem_euclid(m as i64))
            .collect();
        GroupElement { free, torsion }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupElement {
    pub free: Vec<i64>,
    pub torsion: Vec<i64>,
}

impl GroupElement {
    pub fn free_vec(free: Vec<i64>) -> Self {
        GroupElement {
            free,
            torsion: Vec::new(),
        }
    }

    /// Coordinates in the lift Z^{r+t}.
    fn lifted(&self) -> Vec<BigInt> {
        self.free
            .iter()
            .chain(self.torsion.iter())
            .map(|&v| BigInt::from(v))
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntMatrix {
    pub rows: usize,
    pub cols: usize,
    entries: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            entries: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntMatrix::zero(n, n);
        for i in 0..n {
            m.set(i, i, BigInt::one());
        }
        m
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let mut m = IntMatrix::zero(r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged rows");
            for (j, &v) in row.iter().enumerate() {
                m.set(i, j, BigInt::from(v));
            }
        }
        m
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.entries[i * self.cols + j] = v;
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows);
        let mut out = IntMatrix::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let v = out.get(i, j) + a * other.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j) * &v[j]).sum())
            .collect()
    }

    /// Determinant by cofactor expansion; fine for the small square
    /// matrices this library works with.
    pub fn det(&self) -> BigInt {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        if n == 1 {
            return self.get(0, 0).clone();
        }
        let mut acc = BigInt::zero();
        for j in 0..n {
            let a = self.get(0, j);
            if a.is_zero() {
                continue;
            }
            let mut minor = IntMatrix::zero(n - 1, n - 1);
            for i in 1..n {
                let mut jj = 0;
                for k in 0..n {
                    if k == j {
                        continue;
                    }
                    minor.set(i - 1, jj, self.get(i, k).clone());
                    jj += 1;
                }
            }
            let term = a * minor.det();
            if j % 2 == 0 {
                acc += term;
            } else {
                acc -= term;
            }
        }
        acc
    }

    /// Inverse of a unimodular integer matrix (Gauss-Jordan over Q,
    /// entries guaranteed integral).
    pub fn inverse_unimodular(&self) -> IntMatrix {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut a: Vec<Vec<BigRational>> = (0..n)
            .map(|i| {
                (0..2 * n)
                    .map(|j| {
                        if j < n {
                            BigRational::from_integer(self.get(i, j).clone())
                        } else if j - n == i {
                            BigRational::one()
                        } else {
                            BigRational::zero()
                        }
                    })
                    .collect()
            })
            .collect();
        for col in 0..n {
            let pivot = (col..n)
                .find(|&i| !a[i][col].is_zero())
                .expect("singular matrix passed to inverse_unimodular");
            a.swap(col, pivot);
            let p = a[col][col].clone();
            for j in 0..2 * n {
                a[col][j] = &a[col][j] / &p;
            }
            for i in 0..n {
                if i == col || a[i][col].is_zero() {
                    continue;
                }
                let f = a[i][col].clone();
                for j in 0..2 * n {
                    a[i][j] = &a[i][j] - &f * &a[col][j];
                }
            }
        }
        let mut out = IntMatrix::zero(n, n);
        for i in 0..n {
            for j in 0..n {
                let v = &a[i][n + j];
                assert!(v.is_integer(), "unimodular inverse must be integral");
                out.set(i, j, v.to_integer());
            }
        }
        out
    }
}

/// Smith normal form: U * M * V = D with U, V unimodular and D diagonal
/// with nonnegative divisors d_1 | d_2 | ...
///
/// Pivoting is smallest absolute value with lexicographic (row, col)
/// tie-break, so the output is deterministic.
pub fn smith_normal_form(m: &IntMatrix) -> (IntMatrix, IntMatrix, IntMatrix) {
    let rows = m.rows;
    let cols = m.cols;
    let mut d = m.clone();
    let mut u = IntMatrix::identity(rows);
    let mut v = IntMatrix::identity(cols);

    let swap_rows = |d: &mut IntMatrix, u: &mut IntMatrix, a: usize, b: usize| {
        if a == b {
            return;
        }
        for j in 0..cols {
            let x = d.get(a, j).clone();
            let y = d.get(b, j).clone();
            d.set(a, j, y);
            d.set(b, j, x);
        }
        for j in 0..rows {
            let x = u.get(a, j).clone();
            let y = u.get(b, j).clone();
            u.set(a, j, y);
            u.set(b, j, x);
        }
    };
    let swap_cols = |d: &mut IntMatrix, v: &mut IntMatrix, a: usize, b: usize| {
        if a == b {
            return;
        }
        for i in 0..rows {
            let x = d.get(i, a).clone();
            let y = d.get(i, b).clone();
            d.set(i, a, y);
            d.set(i, b, x);
        }
        for i in 0..cols {
            let x = v.get(i, a).clone();
            let y = v.get(i, b).clone();
            v.set(i, a, y);
            v.set(i, b, x);
        }
    };
    // row[a] -= q * row[b]
    let row_sub = |d: &mut IntMatrix, u: &mut IntMatrix, a: usize, b: usize, q: &BigInt| {
        for j in 0..cols {
            let x = d.get(a, j) - q * d.get(b, j);
            d.set(a, j, x);
        }
        for j in 0..rows {
            let x = u.get(a, j) - q * u.get(b, j);
            u.set(a, j, x);
        }
    };
    let col_sub = |d: &mut IntMatrix, v: &mut IntMatrix, a: usize, b: usize, q: &BigInt| {
        for i in 0..rows {
            let x = d.get(i, a) - q * d.get(i, b);
            d.set(i, a, x);
        }
        for i in 0..cols {
            let x = v.get(i, a) - q * v.get(i, b);
            v.set(i, a, x);
        }
    };

    let n = rows.min(cols);
    for t in 0..n {
        'pivot: loop {
            // smallest nonzero |entry| in the trailing submatrix,
            // lexicographic tie-break
            let mut best: Option<(usize, usize)> = None;
            for i in t..rows {
                for j in t..cols {
                    if d.get(i, j).is_zero() {
                        continue;
                    }
                    match &best {
                        None => best = Some((i, j)),
                        Some((bi, bj)) => {
                            let (bi, bj) = (*bi, *bj);
                            let cur = d.get(i, j).abs();
                            let old = d.get(bi, bj).abs();
                            if cur < old {
                                best = Some((i, j));
                            }
                        }
                    }
                }
            }
            let (pi, pj) = match best {
                Some(p) => p,
                None => break 'pivot, // trailing submatrix all zero
            };
            swap_rows(&mut d, &mut u, t, pi);
            swap_cols(&mut d, &mut v, t, pj);

            let mut clean = true;
            for i in t + 1..rows {
                if !d.get(i, t).is_zero() {
                    let q = d.get(i, t).div_floor(d.get(t, t));
                    row_sub(&mut d, &mut u, i, t, &q);
                    if !d.get(i, t).is_zero() {
                        clean = false;
                    }
                }
            }
            for j in t + 1..cols {
                if !d.get(t, j).is_zero() {
                    let q = d.get(t, j).div_floor(d.get(t, t));
                    col_sub(&mut d, &mut v, j, t, &q);
                    if !d.get(t, j).is_zero() {
                        clean = false;
                    }
                }
            }
            if !clean {
                continue 'pivot;
            }
            // divisibility: pivot must divide every trailing entry
            let pivot = d.get(t, t).clone();
            let mut fixed = false;
            'scan: for i in t + 1..rows {
                for j in t + 1..cols {
                    if !(d.get(i, j) % &pivot).is_zero() {
                        let one = BigInt::from(-1);
                        row_sub(&mut d, &mut u, t, i, &one); // row t += row i
                        fixed = true;
                        break 'scan;
                    }
                }
            }
            if !fixed {
                break 'pivot;
            }
        }
        if d.get(t, t).is_negative() {
            for j in 0..cols {
                let x = -d.get(t, j);
                d.set(t, j, x);
            }
            for j in 0..rows {
                let x = -u.get(t, j);
                u.set(t, j, x);
            }
        }
    }
    (u, d, v)
}

/// Diagonal of the SNF, padded with zeros to min(rows, cols).
pub fn snf_divisors(m: &IntMatrix) -> Vec<BigInt> {
    let (_, d, _) = smith_normal_form(m);
    (0..m.rows.min(m.cols)).map(|i| d.get(i, i).clone()).collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SubgroupIndex {
    Finite(BigUint),
    Infinite,
}

impl SubgroupIndex {
    pub fn is_one(&self) -> bool {
        matches!(self, SubgroupIndex::Finite(n) if n.is_one())
    }
}

/// Columns of the lifted lattice matrix: one column per step (in the
/// Z^{r+t} lift) plus one relation column m_i * e_{r+i} per torsion factor.
fn lifted_lattice_matrix(g: &GroupSpec, steps: &[GroupElement]) -> Result<IntMatrix, CoreError> {
    for s in steps {
        g.check_element(s)?;
    }
    let n = g.lifted_rank();
    let t = g.torsion_orders.len();
    let mut m = IntMatrix::zero(n, steps.len() + t);
    for (j, s) in steps.iter().enumerate() {
        for (i, v) in s.lifted().into_iter().enumerate() {
            m.set(i, j, v);
        }
    }
    for (k, &ord) in g.torsion_orders.iter().enumerate() {
        m.set(g.free_rank + k, steps.len() + k, BigInt::from(ord));
    }
    Ok(m)
}

/// SNF divisors of the lifted lattice matrix behind a generation check.
pub fn generation_divisors(
    g: &GroupSpec,
    steps: &[GroupElement],
) -> Result<Vec<BigInt>, CoreError> {
    let m = lifted_lattice_matrix(g, steps)?;
    Ok(snf_divisors(&m))
}

/// True iff the steps generate the whole group.
pub fn generates(g: &GroupSpec, steps: &[GroupElement]) -> Result<bool, CoreError> {
    Ok(subgroup_index(g, steps)?.is_one())
}

/// Index of the subgroup generated by the steps; `Infinite` when the
/// free-part rank is deficient.
pub fn subgroup_index(g: &GroupSpec, steps: &[GroupElement]) -> Result<SubgroupIndex, CoreError> {
    if g.is_trivial() {
        return Ok(SubgroupIndex::Finite(BigUint::one()));
    }
    let m = lifted_lattice_matrix(g, steps)?;
    let divisors = snf_divisors(&m);
    let n = g.lifted_rank();
    let nonzero: Vec<&BigInt> = divisors.iter().filter(|d| !d.is_zero()).collect();
    if nonzero.len() < n {
        return Ok(SubgroupIndex::Infinite);
    }
    let mut idx = BigUint::one();
    for d in nonzero {
        idx *= d.magnitude();
    }
    Ok(SubgroupIndex::Finite(idx))
}

/// Precomputed coset data for a finite-index subgroup.
pub struct CosetTable {
    group: GroupSpec,
    u: IntMatrix,
    u_inv: IntMatrix,
    /// all strictly positive; length = lifted rank
    pub divisors: Vec<BigInt>,
}

impl CosetTable {
    pub fn new(g: &GroupSpec, steps: &[GroupElement]) -> Result<Self, CoreError> {
        let m = lifted_lattice_matrix(g, steps)?;
        let (u, d, _v) = smith_normal_form(&m);
        let n = g.lifted_rank();
        let mut divisors = Vec::with_capacity(n);
        for i in 0..n {
            let di = if i < m.cols { d.get(i, i).clone() } else { BigInt::zero() };
            if di.is_zero() {
                return Err(CoreError::InfiniteIndex);
            }
            divisors.push(di);
        }
        let u_inv = u.inverse_unimodular();
        Ok(CosetTable {
            group: g.clone(),
            u,
            u_inv,
            divisors,
        })
    }

    pub fn index(&self) -> BigUint {
        self.divisors
            .iter()
            .map(|d| d.magnitude().clone())
            .product()
    }

    /// Canonical key of the coset of x: (U x) reduced mod the divisors.
    pub fn coset_key(&self, x: &GroupElement) -> Result<Vec<BigInt>, CoreError> {
        self.group.check_element(x)?;
        let ux = self.u.mul_vec(&x.lifted());
        Ok(ux
            .iter()
            .zip(&self.divisors)
            .map(|(v, d)| v.mod_floor(d))
            .collect())
    }

    /// Rank of the coset of x in the lexicographic enumeration of keys.
    pub fn coset_rank(&self, x: &GroupElement) -> Result<BigUint, CoreError> {
        let key = self.coset_key(x)?;
        let mut rank = BigUint::zero();
        for (k, d) in key.iter().zip(&self.divisors) {
            rank = rank * d.magnitude() + k.magnitude();
        }
        Ok(rank)
    }

    /// Complete transversal, identity first, in key order.
    pub fn representatives(&self) -> Vec<GroupElement> {
        let n = self.divisors.len();
        let mut reps = Vec::new();
        let mut key = vec![BigInt::zero(); n];
        loop {
            let x = self.u_inv.mul_vec(&key);
            let free: Vec<i64> = x[..self.group.free_rank]
                .iter()
                .map(|v| v.to_i64().expect("representative coordinate overflow"))
                .collect();
            let torsion: Vec<i64> = x[self.group.free_rank..]
                .iter()
                .zip(&self.group.torsion_orders)
                .map(|(v, &m)| v.mod_floor(&BigInt::from(m)).to_i64().unwrap())
                .collect();
            reps.push(GroupElement { free, torsion });
            // odometer over the mixed-radix key space
            let mut i = n;
            loop {
                if i == 0 {
                    return reps;
                }
                i -= 1;
                key[i] += 1;
                if key[i] < self.divisors[i] {
                    break;
                }
                key[i] = BigInt::zero();
            }
        }
    }
}

/// Transversal of G modulo the subgroup generated by the steps.
pub fn coset_representatives(
    g: &GroupSpec,
    steps: &[GroupElement],
) -> Result<Vec<GroupElement>, CoreError> {
    let table = CosetTable::new(g, steps)?;
    Ok(table.representatives())
}
