//! Chains of forward-difference operators, exact grid functions on
//! finite windows of Z^d, and the mixed/unmixed equation checks.

use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

use crate::error::CoreError;
use crate::exppoly::ExpPoly;
use crate::scalar::Scalar;

/// A composed operator Delta_{h_1} ... Delta_{h_n}; the steps form a
/// multiset (composition order is irrelevant), stored sorted.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DiffChain {
    steps: Vec<Vec<i64>>,
}

impl DiffChain {
    pub fn new(mut steps: Vec<Vec<i64>>) -> Result<Self, CoreError> {
        if let Some(first) = steps.first() {
            let d = first.len();
            if steps.iter().any(|s| s.len() != d) {
                return Err(CoreError::InvalidInput("ragged chain steps".into()));
            }
        }
        steps.sort();
        Ok(DiffChain { steps })
    }

    pub fn single(step: Vec<i64>) -> Self {
        DiffChain { steps: vec![step] }
    }

    /// Delta_h^order.
    pub fn power(step: Vec<i64>, order: usize) -> Self {
        DiffChain {
            steps: vec![step; order],
        }
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn steps(&self) -> &[Vec<i64>] {
        &self.steps
    }

    pub fn num_vars(&self) -> Option<usize> {
        self.steps.first().map(Vec::len)
    }

    /// Inclusion-exclusion stencil: the 2^n signed offsets of
    /// Delta_{h_1}...Delta_{h_n}, with coincident offsets merged.
    /// Signed coefficients sum to zero for n >= 1.
    pub fn expand(&self) -> Vec<(Vec<i64>, BigInt)> {
        let d = self.num_vars().unwrap_or(0);
        let mut acc: BTreeMap<Vec<i64>, BigInt> = BTreeMap::new();
        acc.insert(vec![0; d], BigInt::from(1));
        for h in &self.steps {
            let mut next: BTreeMap<Vec<i64>, BigInt> = BTreeMap::new();
            for (off, c) in &acc {
                let shifted: Vec<i64> = off.iter().zip(h).map(|(a, b)| a + b).collect();
                *next.entry(shifted).or_insert_with(BigInt::zero) += c;
                *next.entry(off.clone()).or_insert_with(BigInt::zero) -= c;
            }
            acc = next;
        }
        acc.retain(|_, c| !c.is_zero());
        acc.into_iter().collect()
    }

    pub fn apply_exppoly(&self, f: &ExpPoly) -> Result<ExpPoly, CoreError> {
        let mut out = f.clone();
        for h in &self.steps {
            out = out.delta(h)?;
        }
        Ok(out)
    }

    pub fn apply_grid(&self, g: &GridFunction) -> Result<GridFunction, CoreError> {
        if self.is_empty() {
            return Ok(g.clone());
        }
        if self.num_vars() != Some(g.window.dim()) {
            return Err(CoreError::DimensionMismatch {
                expected: g.window.dim(),
                got: self.num_vars().unwrap_or(0),
            });
        }
        let stencil = self.expand();
        let window = valid_window(&stencil, &g.window)?;
        let mut values = Vec::with_capacity(window.volume());
        for x in window.points() {
            let mut acc = Scalar::zero();
            for (off, c) in &stencil {
                let y: Vec<i64> = x.iter().zip(off).map(|(a, b)| a + b).collect();
                let v = g.value_at(&y)?;
                acc = &acc + &(v * &Scalar::from_bigint(c.clone()));
            }
            values.push(acc);
        }
        Ok(GridFunction { window, values })
    }
}

/// Largest sub-box on which every stencil offset stays inside `window`.
fn valid_window(
    stencil: &[(Vec<i64>, BigInt)],
    window: &GridWindow,
) -> Result<GridWindow, CoreError> {
    let d = window.dim();
    let mut lower = window.lower.clone();
    let mut upper = window.upper.clone();
    for (off, _) in stencil {
        for i in 0..d {
            lower[i] = lower[i].max(window.lower[i] - off[i]);
            upper[i] = upper[i].min(window.upper[i] - off[i]);
        }
    }
    if lower.iter().zip(&upper).any(|(l, u)| l >= u) {
        return Err(CoreError::EmptyValidWindow);
    }
    Ok(GridWindow { lower, upper })
}

/// A finite half-open box of Z^d.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridWindow {
    pub lower: Vec<i64>,
    pub upper: Vec<i64>,
}

impl GridWindow {
    pub fn new(lower: Vec<i64>, upper: Vec<i64>) -> Result<Self, CoreError> {
        if lower.len() != upper.len() {
            return Err(CoreError::DimensionMismatch {
                expected: lower.len(),
                got: upper.len(),
            });
        }
        if lower.iter().zip(&upper).any(|(l, u)| l >= u) {
            return Err(CoreError::InvalidInput(
                "window lower bound must be < upper bound componentwise".into(),
            ));
        }
        Ok(GridWindow { lower, upper })
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn volume(&self) -> usize {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(l, u)| (u - l) as usize)
            .product()
    }

    pub fn sizes(&self) -> Vec<i64> {
        self.lower.iter().zip(&self.upper).map(|(l, u)| u - l).collect()
    }

    pub fn contains(&self, x: &[i64]) -> bool {
        x.len() == self.dim()
            && x.iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(v, (l, u))| l <= v && v < u)
    }

    /// Row-major point iteration, last coordinate fastest.
    pub fn points(&self) -> impl Iterator<Item = Vec<i64>> + '_ {
        let d = self.dim();
        let total = self.volume();
        let mut current = self.lower.clone();
        let mut emitted = 0;
        std::iter::from_fn(move || {
            if emitted == total {
                return None;
            }
            let out = current.clone();
            emitted += 1;
            let mut i = d;
            while i > 0 {
                i -= 1;
                current[i] += 1;
                if current[i] < self.upper[i] {
                    break;
                }
                current[i] = self.lower[i];
            }
            Some(out)
        })
    }

    /// Row-major linear index of a contained point.
    pub fn index_of(&self, x: &[i64]) -> Result<usize, CoreError> {
        if !self.contains(x) {
            return Err(CoreError::InvalidInput(format!(
                "point {x:?} outside window"
            )));
        }
        let mut idx = 0usize;
        for i in 0..self.dim() {
            idx = idx * (self.upper[i] - self.lower[i]) as usize + (x[i] - self.lower[i]) as usize;
        }
        Ok(idx)
    }
}

/// Exact-valued function on a window, row-major, last coordinate fastest.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridFunction {
    pub window: GridWindow,
    pub values: Vec<Scalar>,
}

impl GridFunction {
    pub fn new(window: GridWindow, values: Vec<Scalar>) -> Result<Self, CoreError> {
        if values.len() != window.volume() {
            return Err(CoreError::DimensionMismatch {
                expected: window.volume(),
                got: values.len(),
            });
        }
        Ok(GridFunction { window, values })
    }

    pub fn sample(f: &ExpPoly, window: GridWindow) -> Result<Self, CoreError> {
        let values = window
            .points()
            .map(|x| f.evaluate(&x))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(GridFunction { window, values })
    }

    pub fn value_at(&self, x: &[i64]) -> Result<&Scalar, CoreError> {
        Ok(&self.values[self.window.index_of(x)?])
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(Scalar::is_zero)
    }
}

/// Delta_h^order f = 0, checked identically on the symbolic side.
pub fn frechet_check_unmixed_exppoly(
    f: &ExpPoly,
    h: &[i64],
    order: usize,
) -> Result<bool, CoreError> {
    assert!(order >= 1);
    let chain = DiffChain::power(h.to_vec(), order);
    Ok(chain.apply_exppoly(f)?.is_zero())
}

/// Delta_h^order g = 0 on the valid sub-window.
pub fn frechet_check_unmixed_grid(
    g: &GridFunction,
    h: &[i64],
    order: usize,
) -> Result<bool, CoreError> {
    assert!(order >= 1);
    let chain = DiffChain::power(h.to_vec(), order);
    Ok(chain.apply_grid(g)?.is_zero())
}

/// Outcome of the sampled mixed/unmixed equivalence check. This is an
/// empirical check over the supplied trials, not a proof: the universal
/// quantifier over all of G is not finitely checkable.
#[derive(Clone, Debug, Serialize)]
pub struct DjokovicReport {
    pub unmixed_ok: bool,
    pub mixed_ok: bool,
    /// First step h with Delta_h^{bound+1} f != 0, if any.
    pub unmixed_witness: Option<Vec<i64>>,
    /// First step tuple whose mixed chain does not annihilate f, if any.
    pub mixed_witness: Option<Vec<Vec<i64>>>,
    pub note: String,
}

pub fn djokovic_crosscheck(
    f: &ExpPoly,
    degree_bound: usize,
    trial_tuples: &[Vec<Vec<i64>>],
    trial_steps: &[Vec<i64>],
) -> Result<DjokovicReport, CoreError> {
    for t in trial_tuples {
        if t.len() != degree_bound + 1 {
            return Err(CoreError::InvalidInput(format!(
                "trial tuple has {} steps, expected degree_bound + 1 = {}",
                t.len(),
                degree_bound + 1
            )));
        }
    }
    let mut unmixed_witness = None;
    for h in trial_steps {
        if !frechet_check_unmixed_exppoly(f, h, degree_bound + 1)? {
            unmixed_witness = Some(h.clone());
            break;
        }
    }
    let mut mixed_witness = None;
    for tuple in trial_tuples {
        let chain = DiffChain::new(tuple.clone())?;
        if !chain.apply_exppoly(f)?.is_zero() {
            mixed_witness = Some(tuple.clone());
            break;
        }
    }
    Ok(DjokovicReport {
        unmixed_ok: unmixed_witness.is_none(),
        mixed_ok: mixed_witness.is_none(),
        unmixed_witness,
        mixed_witness,
        note: "sampled empirical equivalence check over the supplied trials; not a proof"
            .to_string(),
    })
}
