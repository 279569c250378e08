//! Exponential polynomials on Z^d: finite sums p_lambda(x) * lambda^x
//! with Gaussian-rational frequencies, plus the translation and
//! forward-difference operators.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::CoreError;
use crate::linalg::ScalarMatrix;
use crate::poly::Polynomial;
use crate::scalar::Scalar;

/// A character lambda^x = prod_i lambda_i^{x_i}; every base is nonzero.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Frequency(Vec<Scalar>);

impl Frequency {
    pub fn new(bases: Vec<Scalar>) -> Result<Self, CoreError> {
        if bases.iter().any(Scalar::is_zero) {
            return Err(CoreError::InvalidInput("zero frequency base".into()));
        }
        Ok(Frequency(bases))
    }

    /// The all-ones frequency: the polynomial sector.
    pub fn unit(num_vars: usize) -> Self {
        Frequency(vec![Scalar::one(); num_vars])
    }

    pub fn is_unit(&self) -> bool {
        self.0.iter().all(Scalar::is_one)
    }

    pub fn num_vars(&self) -> usize {
        self.0.len()
    }

    pub fn bases(&self) -> &[Scalar] {
        &self.0
    }

    /// lambda^h for an integer vector h (negative entries fine).
    pub fn pow(&self, h: &[i64]) -> Result<Scalar, CoreError> {
        if h.len() != self.0.len() {
            return Err(CoreError::DimensionMismatch {
                expected: self.0.len(),
                got: h.len(),
            });
        }
        let mut acc = Scalar::one();
        for (b, &e) in self.0.iter().zip(h) {
            acc = &acc * &b.pow(e)?;
        }
        Ok(acc)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExpPoly {
    num_vars: usize,
    parts: BTreeMap<Frequency, Polynomial>,
}

impl ExpPoly {
    pub fn zero(num_vars: usize) -> Self {
        ExpPoly {
            num_vars,
            parts: BTreeMap::new(),
        }
    }

    pub fn from_polynomial(p: Polynomial) -> Self {
        let mut e = ExpPoly::zero(p.num_vars());
        e.add_part(Frequency::unit(p.num_vars()), p);
        e
    }

    pub fn constant(num_vars: usize, c: Scalar) -> Self {
        ExpPoly::from_polynomial(Polynomial::constant(num_vars, c))
    }

    /// p(x) * lambda^x as a single part.
    pub fn exp_part(freq: Frequency, p: Polynomial) -> Self {
        assert_eq!(freq.num_vars(), p.num_vars());
        let mut e = ExpPoly::zero(p.num_vars());
        e.add_part(freq, p);
        e
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn is_zero(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn parts(&self) -> impl Iterator<Item = (&Frequency, &Polynomial)> {
        self.parts.iter()
    }

    pub fn frequencies(&self) -> impl Iterator<Item = &Frequency> {
        self.parts.keys()
    }

    fn add_part(&mut self, freq: Frequency, p: Polynomial) {
        assert_eq!(freq.num_vars(), self.num_vars);
        if p.is_zero() {
            return;
        }
        match self.parts.entry(freq) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(p);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = e.get().add(&p);
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn add(&self, other: &ExpPoly) -> ExpPoly {
        assert_eq!(self.num_vars, other.num_vars);
        let mut out = self.clone();
        for (f, p) in &other.parts {
            out.add_part(f.clone(), p.clone());
        }
        out
    }

    pub fn sub(&self, other: &ExpPoly) -> ExpPoly {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> ExpPoly {
        ExpPoly {
            num_vars: self.num_vars,
            parts: self
                .parts
                .iter()
                .map(|(f, p)| (f.clone(), p.neg()))
                .collect(),
        }
    }

    pub fn scale(&self, c: &Scalar) -> ExpPoly {
        if c.is_zero() {
            return ExpPoly::zero(self.num_vars);
        }
        ExpPoly {
            num_vars: self.num_vars,
            parts: self
                .parts
                .iter()
                .map(|(f, p)| (f.clone(), p.scale(c)))
                .collect(),
        }
    }

    /// tau_h f: each part p(x) lambda^x maps to lambda^h p(x+h) lambda^x.
    pub fn translate(&self, h: &[i64]) -> Result<ExpPoly, CoreError> {
        if h.len() != self.num_vars {
            return Err(CoreError::DimensionMismatch {
                expected: self.num_vars,
                got: h.len(),
            });
        }
        let mut out = ExpPoly::zero(self.num_vars);
        for (f, p) in &self.parts {
            let factor = f.pow(h)?;
            out.add_part(f.clone(), p.shift(h).scale(&factor));
        }
        Ok(out)
    }

    /// Delta_h f = tau_h f - f.
    pub fn delta(&self, h: &[i64]) -> Result<ExpPoly, CoreError> {
        Ok(self.translate(h)?.sub(self))
    }

    pub fn evaluate(&self, x: &[i64]) -> Result<Scalar, CoreError> {
        if x.len() != self.num_vars {
            return Err(CoreError::DimensionMismatch {
                expected: self.num_vars,
                got: x.len(),
            });
        }
        let mut acc = Scalar::zero();
        for (f, p) in &self.parts {
            acc = &acc + &(&p.eval(x) * &f.pow(x)?);
        }
        Ok(acc)
    }

    pub fn is_polynomial(&self) -> bool {
        self.parts.keys().all(Frequency::is_unit)
    }

    /// Max part degree; None is the -infinity sentinel of zero.
    pub fn total_degree(&self) -> Option<u32> {
        self.parts.values().filter_map(Polynomial::total_degree).max()
    }

    /// Exact dimension of span{tau_h f : h in Z^d}, by ranking the
    /// coefficient matrix of translates over boxes of growing radius.
    /// Equal ranks at radii r and r+1 make the radius-r span invariant
    /// under every unit translation, so it is the whole span and the
    /// rank is exact.
    pub fn tau_span_dimension(&self) -> usize {
        if self.is_zero() {
            return 0;
        }
        let rank_at = |r: i64| {
            let translates = self.box_translates(r);
            let (_, matrix) = vectorize(&translates);
            matrix.rank()
        };
        let mut radius = self.total_degree().unwrap_or(0) as i64 + 1;
        let mut rank = rank_at(radius);
        loop {
            let next = rank_at(radius + 1);
            if next == rank {
                return rank;
            }
            radius += 1;
            rank = next;
        }
    }

    /// All translates tau_h f for h in [-radius, radius]^d.
    pub fn box_translates(&self, radius: i64) -> Vec<ExpPoly> {
        let d = self.num_vars;
        let mut out = Vec::new();
        let mut h = vec![-radius; d];
        if d == 0 {
            return vec![self.clone()];
        }
        loop {
            out.push(self.translate(&h).unwrap());
            let mut i = d;
            loop {
                if i == 0 {
                    return out;
                }
                i -= 1;
                h[i] += 1;
                if h[i] <= radius {
                    break;
                }
                h[i] = -radius;
            }
        }
    }
}

/// Coordinate key of one (frequency, monomial) coefficient.
pub type CoeffKey = (Frequency, Vec<u32>);

/// Lays a family of ExpPolys out as rows of a coefficient matrix over
/// the union of their (frequency, monomial) coordinates.
pub fn vectorize(family: &[ExpPoly]) -> (Vec<CoeffKey>, ScalarMatrix) {
    let mut keys: BTreeSet<CoeffKey> = BTreeSet::new();
    for f in family {
        for (freq, p) in f.parts() {
            for (e, _) in p.terms() {
                keys.insert((freq.clone(), e.clone()));
            }
        }
    }
    let keys: Vec<CoeffKey> = keys.into_iter().collect();
    let index: BTreeMap<&CoeffKey, usize> = keys.iter().zip(0..).collect();
    let mut m = ScalarMatrix::zero(family.len(), keys.len());
    for (i, f) in family.iter().enumerate() {
        for (freq, p) in f.parts() {
            for (e, c) in p.terms() {
                let key = (freq.clone(), e.clone());
                m.set(i, index[&key], c.clone());
            }
        }
    }
    (keys, m)
}

/// Rebuilds an ExpPoly from a coefficient vector over the given keys.
pub fn from_coeff_vector(num_vars: usize, keys: &[CoeffKey], v: &[Scalar]) -> ExpPoly {
    assert_eq!(keys.len(), v.len());
    let mut out = ExpPoly::zero(num_vars);
    for ((freq, exps), c) in keys.iter().zip(v) {
        if !c.is_zero() {
            out.add_part(
                freq.clone(),
                Polynomial::monomial(num_vars, exps.clone(), c.clone()),
            );
        }
    }
    out
}

#[derive(Serialize, Deserialize)]
struct PartJson {
    freq: Vec<Scalar>,
    poly: Polynomial,
}

impl Serialize for ExpPoly {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let parts: Vec<PartJson> = self
            .parts
            .iter()
            .map(|(f, p)| PartJson {
                freq: f.bases().to_vec(),
                poly: p.clone(),
            })
            .collect();
        parts.serialize(s)
    }
}

impl<'de> Deserialize<'de> for ExpPoly {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let parts = Vec::<PartJson>::deserialize(d)?;
        let num_vars = parts.first().map_or(0, |p| p.freq.len());
        let mut out = ExpPoly::zero(num_vars);
        for part in parts {
            let freq = Frequency::new(part.freq).map_err(D::Error::custom)?;
            if freq.num_vars() != num_vars {
                return Err(D::Error::custom("ragged frequency vectors"));
            }
            let poly = part.poly.with_num_vars(num_vars).map_err(D::Error::custom)?;
            out.add_part(freq, poly);
        }
        Ok(out)
    }
}

impl fmt::Display for ExpPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (freq, p) in &self.parts {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if freq.is_unit() {
                write!(f, "{}", p)?;
            } else {
                let bases: Vec<String> = freq.bases().iter().map(|b| b.to_string()).collect();
                write!(f, "[{}] * ({})^x", p, bases.join(","))?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> ExpPoly {
        ExpPoly::from_polynomial(Polynomial::var(1, 0))
    }

    fn two_pow_x() -> ExpPoly {
        ExpPoly::exp_part(
            Frequency::new(vec![Scalar::from_int(2)]).unwrap(),
            Polynomial::constant(1, Scalar::one()),
        )
    }

    #[test]
    fn translate_examples() {
        // x shifted by 1 -> x + 1
        let t = x().translate(&[1]).unwrap();
        let expected = x().add(&ExpPoly::constant(1, Scalar::one()));
        assert_eq!(t, expected);
        // 2^x shifted by 1 -> 2 * 2^x
        let t = two_pow_x().translate(&[1]).unwrap();
        assert_eq!(t, two_pow_x().scale(&Scalar::from_int(2)));
        // identity shift
        assert_eq!(x().translate(&[0]).unwrap(), x());
    }

    #[test]
    fn delta_examples() {
        // Delta_1 x^2 = 2x + 1
        let x2 = ExpPoly::from_polynomial(Polynomial::var(1, 0).mul(&Polynomial::var(1, 0)));
        let d = x2.delta(&[1]).unwrap();
        let expected = x()
            .scale(&Scalar::from_int(2))
            .add(&ExpPoly::constant(1, Scalar::one()));
        assert_eq!(d, expected);
        // Delta_1 2^x = 2^x
        assert_eq!(two_pow_x().delta(&[1]).unwrap(), two_pow_x());
        // Delta of a constant is zero
        let c = ExpPoly::constant(1, Scalar::from_int(7));
        assert!(c.delta(&[3]).unwrap().is_zero());
        // Delta_0 f = 0
        assert!(x().delta(&[0]).unwrap().is_zero());
    }

    #[test]
    fn evaluate_examples() {
        let x2p1 = ExpPoly::from_polynomial(
            Polynomial::var(1, 0)
                .mul(&Polynomial::var(1, 0))
                .add(&Polynomial::constant(1, Scalar::one())),
        );
        assert_eq!(x2p1.evaluate(&[3]).unwrap(), Scalar::from_int(10));
        assert_eq!(two_pow_x().evaluate(&[5]).unwrap(), Scalar::from_int(32));
        let x_two_pow_x = ExpPoly::exp_part(
            Frequency::new(vec![Scalar::from_int(2)]).unwrap(),
            Polynomial::var(1, 0),
        );
        assert_eq!(x_two_pow_x.evaluate(&[3]).unwrap(), Scalar::from_int(24));
        // negative coordinates are exact
        assert_eq!(
            two_pow_x().evaluate(&[-2]).unwrap(),
            Scalar::from_parts(1, 4, 0, 1)
        );
    }

    #[test]
    fn polynomial_predicate_and_degree() {
        let x3px = ExpPoly::from_polynomial(
            Polynomial::monomial(1, vec![3], Scalar::one()).add(&Polynomial::var(1, 0)),
        );
        assert!(x3px.is_polynomial());
        assert_eq!(x3px.total_degree(), Some(3));
        assert!(!two_pow_x().is_polynomial());
        let z = ExpPoly::zero(1);
        assert!(z.is_polynomial());
        assert_eq!(z.total_degree(), None);
    }

    #[test]
    fn tau_span_dimensions() {
        assert_eq!(x().tau_span_dimension(), 2);
        assert_eq!(two_pow_x().tau_span_dimension(), 1);
        let x2 = ExpPoly::from_polynomial(Polynomial::var(1, 0).mul(&Polynomial::var(1, 0)));
        assert_eq!(x2.tau_span_dimension(), 3);
        assert_eq!(ExpPoly::zero(1).tau_span_dimension(), 0);
    }

    #[test]
    fn translate_composes() {
        let f = x().add(&two_pow_x());
        let a = f.translate(&[3]).unwrap().translate(&[-5]).unwrap();
        let b = f.translate(&[-2]).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn structural_equality_is_function_equality() {
        // x + 2^x built in two different orders
        let a = x().add(&two_pow_x());
        let b = two_pow_x().add(&x());
        assert_eq!(a, b);
        // cancelling parts are dropped
        let c = a.sub(&two_pow_x());
        assert!(c.is_polynomial());
    }

    #[test]
    fn json_round_trip() {
        let f = x().add(&two_pow_x().scale(&Scalar::from_parts(1, 2, -1, 3)));
        let s = serde_json::to_string(&f).unwrap();
        let g: ExpPoly = serde_json::from_str(&s).unwrap();
        assert_eq!(f, g);
    }
}
