//! Multivariate polynomials over the Gaussian rationals, in canonical
//! form (no stored zero coefficients).

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::binomial;
use serde::{Deserialize, Serialize};

use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Polynomial {
    num_vars: usize,
    terms: BTreeMap<Vec<u32>, Scalar>,
}

impl Polynomial {
    pub fn zero(num_vars: usize) -> Self {
        Polynomial {
            num_vars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(num_vars: usize, c: Scalar) -> Self {
        let mut p = Polynomial::zero(num_vars);
        p.add_term(vec![0; num_vars], c);
        p
    }

    pub fn monomial(num_vars: usize, exps: Vec<u32>, coeff: Scalar) -> Self {
        assert_eq!(exps.len(), num_vars);
        let mut p = Polynomial::zero(num_vars);
        p.add_term(exps, coeff);
        p
    }

    /// The variable x_i.
    pub fn var(num_vars: usize, i: usize) -> Self {
        let mut exps = vec![0; num_vars];
        exps[i] = 1;
        Polynomial::monomial(num_vars, exps, Scalar::one())
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &Scalar)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, exps: &[u32]) -> Scalar {
        self.terms.get(exps).cloned().unwrap_or_else(Scalar::zero)
    }

    /// None is the -infinity sentinel of the zero polynomial.
    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    pub fn add_term(&mut self, exps: Vec<u32>, c: Scalar) {
        assert_eq!(exps.len(), self.num_vars);
        if c.is_zero() {
            return;
        }
        match self.terms.entry(exps) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = e.get() + &c;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        assert_eq!(self.num_vars, other.num_vars);
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Polynomial) -> Polynomial {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Polynomial {
        Polynomial {
            num_vars: self.num_vars,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }

    pub fn scale(&self, c: &Scalar) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero(self.num_vars);
        }
        Polynomial {
            num_vars: self.num_vars,
            terms: self.terms.iter().map(|(e, k)| (e.clone(), k * c)).collect(),
        }
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        assert_eq!(self.num_vars, other.num_vars);
        let mut out = Polynomial::zero(self.num_vars);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let exps = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(exps, ca * cb);
            }
        }
        out
    }

    pub fn eval(&self, x: &[i64]) -> Scalar {
        assert_eq!(x.len(), self.num_vars);
        let mut acc = Scalar::zero();
        for (e, c) in &self.terms {
            let mut term = c.clone();
            for (i, &k) in e.iter().enumerate() {
                if k > 0 {
                    let xi = Scalar::from_int(x[i]);
                    term = &term * &xi.pow(k as i64).unwrap();
                }
            }
            acc = &acc + &term;
        }
        acc
    }

    /// p(x + h), expanded exactly via binomials.
    pub fn shift(&self, h: &[i64]) -> Polynomial {
        assert_eq!(h.len(), self.num_vars);
        let mut out = Polynomial::zero(self.num_vars);
        for (e, c) in &self.terms {
            let mut term = Polynomial::constant(self.num_vars, c.clone());
            for (i, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                if h[i] == 0 {
                    let mut exps = vec![0; self.num_vars];
                    exps[i] = k;
                    term = term.mul(&Polynomial::monomial(self.num_vars, exps, Scalar::one()));
                    continue;
                }
                // (x_i + h_i)^k
                let mut expansion = Polynomial::zero(self.num_vars);
                let hi = BigInt::from(h[i]);
                for j in 0..=k {
                    let b = binomial(BigInt::from(k), BigInt::from(j));
                    let hpow = hi.pow(k - j);
                    let mut exps = vec![0; self.num_vars];
                    exps[i] = j;
                    expansion.add_term(exps, Scalar::from_bigint(b * hpow));
                }
                term = term.mul(&expansion);
            }
            out = out.add(&term);
        }
        out
    }
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    exps: Vec<u32>,
    coeff: Scalar,
}

impl Serialize for Polynomial {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let terms: Vec<TermJson> = self
            .terms
            .iter()
            .map(|(e, c)| TermJson {
                exps: e.clone(),
                coeff: c.clone(),
            })
            .collect();
        terms.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Polynomial {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let terms = Vec::<TermJson>::deserialize(d)?;
        let num_vars = terms.first().map_or(0, |t| t.exps.len());
        let mut p = Polynomial::zero(num_vars);
        for t in terms {
            if t.exps.len() != num_vars {
                return Err(serde::de::Error::custom("ragged exponent vectors"));
            }
            p.add_term(t.exps, t.coeff);
        }
        Ok(p)
    }
}

impl Polynomial {
    /// Re-tags the variable count; only valid for widening a polynomial
    /// deserialized with inferred arity (all exponent vectors must match).
    pub(crate) fn with_num_vars(self, num_vars: usize) -> Result<Polynomial, crate::error::CoreError> {
        if self.terms.is_empty() {
            return Ok(Polynomial::zero(num_vars));
        }
        if self.num_vars != num_vars {
            return Err(crate::error::CoreError::DimensionMismatch {
                expected: num_vars,
                got: self.num_vars,
            });
        }
        Ok(self)
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in self.terms.iter().rev() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({})", c)?;
            for (i, &k) in e.iter().enumerate() {
                if k == 1 {
                    write!(f, "*x{}", i)?;
                } else if k > 1 {
                    write!(f, "*x{}^{}", i, k)?;
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> Polynomial {
        Polynomial::var(1, 0)
    }

    #[test]
    fn degree_and_canonical_form() {
        let p = x().mul(&x()).add(&Polynomial::constant(1, Scalar::from_int(1)));
        assert_eq!(p.total_degree(), Some(2));
        let z = p.sub(&p);
        assert!(z.is_zero());
        assert_eq!(z.total_degree(), None);
        assert_eq!(z.num_terms(), 0);
    }

    #[test]
    fn shift_univariate() {
        // (x+1)^2 = x^2 + 2x + 1
        let p = x().mul(&x());
        let s = p.shift(&[1]);
        assert_eq!(s.coeff(&[0]), Scalar::from_int(1));
        assert_eq!(s.coeff(&[1]), Scalar::from_int(2));
        assert_eq!(s.coeff(&[2]), Scalar::from_int(1));
    }

    #[test]
    fn shift_bivariate() {
        // x1*x2 shifted by (1,1) -> x1*x2 + x1 + x2 + 1
        let p = Polynomial::var(2, 0).mul(&Polynomial::var(2, 1));
        let s = p.shift(&[1, 1]);
        assert_eq!(s.coeff(&[1, 1]), Scalar::from_int(1));
        assert_eq!(s.coeff(&[1, 0]), Scalar::from_int(1));
        assert_eq!(s.coeff(&[0, 1]), Scalar::from_int(1));
        assert_eq!(s.coeff(&[0, 0]), Scalar::from_int(1));
        assert_eq!(s.num_terms(), 4);
    }

    #[test]
    fn eval_matches_shift() {
        let p = x().mul(&x()).mul(&x()).add(&x());
        for h in [-3i64, 0, 2] {
            let s = p.shift(&[h]);
            for v in -4..4 {
                assert_eq!(s.eval(&[v]), p.eval(&[v + h]));
            }
        }
    }

    #[test]
    fn negative_shift() {
        let p = x().mul(&x());
        let s = p.shift(&[-2]);
        assert_eq!(s.eval(&[5]), p.eval(&[3]));
    }
}
