//! Power series truncated at an explicit order.
//!
//! Two truncation modes are supported: by total degree, and by the degree of
//! one designated variable (used for the weight ring `K[t1,t2][[z]]`, where
//! series are truncated in `z` while `t1, t2` stay polynomial). All binary
//! operations require both operands to carry the same truncation.

use std::collections::BTreeMap;

use num::{One, Zero};
use serde_json::{json, Value};

use crate::monomial::Monomial;
use crate::polynomial::Polynomial;
use crate::rational::{binomial, rat_to_string, Rational};
use crate::Error;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Truncation {
    /// Keep monomials of total degree `<= order`.
    Total(u32),
    /// Keep monomials whose degree in variable `var` is `<= order`.
    Var { var: usize, order: u32 },
}

impl Truncation {
    pub fn keeps(&self, m: &Monomial) -> bool {
        match *self {
            Truncation::Total(n) => m.degree() <= n,
            Truncation::Var { var, order } => m.exp(var) <= order,
        }
    }

    pub fn order(&self) -> u32 {
        match *self {
            Truncation::Total(n) => n,
            Truncation::Var { order, .. } => order,
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TruncatedSeries {
    arity: usize,
    trunc: Truncation,
    terms: BTreeMap<Monomial, Rational>,
}

impl TruncatedSeries {
    pub fn zero(arity: usize, trunc: Truncation) -> Self {
        TruncatedSeries {
            arity,
            trunc,
            terms: BTreeMap::new(),
        }
    }

    pub fn from_poly(p: &Polynomial, trunc: Truncation) -> Self {
        let mut s = Self::zero(p.arity(), trunc);
        for (m, c) in p.terms() {
            if trunc.keeps(m) {
                s.terms.insert(m.clone(), c.clone());
            }
        }
        s
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn truncation(&self) -> Truncation {
        self.trunc
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() || !self.trunc.keeps(&m) {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let sum = o.get() + &c;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.trunc, other.trunc, "truncation mismatch");
        assert_eq!(self.arity, other.arity, "series arity mismatch");
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.trunc, other.trunc, "truncation mismatch");
        assert_eq!(self.arity, other.arity, "series arity mismatch");
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero(self.arity, self.trunc);
        }
        TruncatedSeries {
            arity: self.arity,
            trunc: self.trunc,
            terms: self
                .terms
                .iter()
                .map(|(m, k)| (m.clone(), k * c))
                .collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.trunc, other.trunc, "truncation mismatch");
        assert_eq!(self.arity, other.arity, "series arity mismatch");
        let mut out = Self::zero(self.arity, self.trunc);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                let m = m1.mul(m2);
                if out.trunc.keeps(&m) {
                    out.add_term(m, c1 * c2);
                }
            }
        }
        out
    }

    /// The geometric series `1/(1-m)^mult` up to the truncation order.
    ///
    /// The factor must be series-invertible for the truncation in use:
    /// a nonconstant monomial for total-degree truncation, and a monomial
    /// with positive degree in the truncation variable otherwise.
    pub fn geometric(
        arity: usize,
        trunc: Truncation,
        m: &Monomial,
        mult: u32,
    ) -> crate::Result<Self> {
        assert_eq!(m.arity(), arity, "series arity mismatch");
        let step = match trunc {
            Truncation::Total(_) => m.degree(),
            Truncation::Var { var, .. } => m.exp(var),
        };
        if step == 0 || mult == 0 {
            if mult == 0 {
                let mut s = Self::zero(arity, trunc);
                s.terms.insert(Monomial::one(arity), Rational::one());
                return Ok(s);
            }
            return Err(Error::NonInvertibleFactor(format!(
                "factor (1 - {m}) has no growth in the truncation direction"
            )));
        }
        let mut s = Self::zero(arity, trunc);
        let bound = trunc.order();
        let mut j = 0u32;
        loop {
            if j.checked_mul(step).map(|v| v > bound).unwrap_or(true) {
                break;
            }
            let c = Rational::from_integer(binomial((j + mult - 1) as u64, (mult - 1) as u64));
            s.terms.insert(m.pow(j), c);
            j += 1;
        }
        Ok(s)
    }

    /// Coefficient slice: terms with `exp(var) == n`, with that variable's
    /// exponent cleared, as a polynomial in the remaining variables.
    pub fn var_slice(&self, var: usize, n: u32) -> Polynomial {
        let mut p = Polynomial::zero(self.arity);
        for (m, c) in &self.terms {
            if m.exp(var) == n {
                let mut exps = m.exps().to_vec();
                exps[var] = 0;
                p.add_term(Monomial::from_exps(exps), c.clone());
            }
        }
        p
    }

    /// Coefficients of a univariate series as a dense vector `0..=order`.
    pub fn dense_coeffs(&self) -> Vec<Rational> {
        assert_eq!(self.arity, 1, "dense coefficients need arity 1");
        let order = self.trunc.order() as usize;
        let mut out = vec![Rational::zero(); order + 1];
        for (m, c) in &self.terms {
            out[m.degree() as usize] = c.clone();
        }
        out
    }

    /// JSON list for weight-ring series:
    /// `[{"coeff": "...", "t1": a, "t2": b, "z": n}, ...]` in canonical order.
    pub fn to_json_weights(&self) -> Value {
        assert_eq!(self.arity, 3, "weight-series JSON needs arity 3");
        let items: Vec<Value> = self
            .terms
            .iter()
            .map(|(m, c)| {
                json!({
                    "coeff": rat_to_string(c),
                    "t1": m.exp(0),
                    "t2": m.exp(1),
                    "z": m.exp(2),
                })
            })
            .collect();
        Value::Array(items)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn m1(e: u32) -> Monomial {
        Monomial::from_exps(vec![e])
    }

    #[test]
    fn geometric_coefficients() {
        // 1/(1-z)^2 = sum (n+1) z^n
        let s = TruncatedSeries::geometric(1, Truncation::Total(5), &m1(1), 2).unwrap();
        let coeffs = s.dense_coeffs();
        let expect: Vec<Rational> = (1..=6).map(rat).collect();
        assert_eq!(coeffs, expect);
    }

    #[test]
    fn constant_factor_is_rejected() {
        let err = TruncatedSeries::geometric(1, Truncation::Total(5), &m1(0), 1);
        assert!(err.is_err());
    }

    #[test]
    fn var_truncation_needs_growth_in_that_variable() {
        // 1/(1 - t1) cannot be expanded under z-truncation
        let t1 = Monomial::from_exps(vec![1, 0, 0]);
        let trunc = Truncation::Var { var: 2, order: 4 };
        assert!(TruncatedSeries::geometric(3, trunc, &t1, 1).is_err());
        // but 1/(1 - t1*z) can, and has unbounded t1-degree within z <= 4
        let t1z = Monomial::from_exps(vec![1, 0, 1]);
        let s = TruncatedSeries::geometric(3, trunc, &t1z, 1).unwrap();
        assert_eq!(s.coeff(&Monomial::from_exps(vec![4, 0, 4])), rat(1));
        assert_eq!(s.coeff(&Monomial::from_exps(vec![5, 0, 5])), rat(0));
    }

    #[test]
    fn mul_respects_truncation() {
        let a = TruncatedSeries::geometric(1, Truncation::Total(4), &m1(1), 1).unwrap();
        let b = a.mul(&a);
        assert_eq!(b, TruncatedSeries::geometric(1, Truncation::Total(4), &m1(1), 2).unwrap());
    }

    #[test]
    fn slice_extraction() {
        let trunc = Truncation::Var { var: 2, order: 3 };
        let t1z = Monomial::from_exps(vec![1, 0, 1]);
        let s = TruncatedSeries::geometric(3, trunc, &t1z, 1).unwrap();
        let slice = s.var_slice(2, 2);
        assert_eq!(slice.to_string(), "x1^2");
    }
}
