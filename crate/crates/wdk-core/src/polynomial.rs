//! Sparse multivariate polynomials over exact rationals.
//!
//! Terms are kept in a `BTreeMap` keyed by the canonical monomial order, so
//! iteration, rendering and JSON output are deterministic. Zero coefficients
//! are never stored.

use std::collections::BTreeMap;
use std::fmt;

use num::Zero;
use serde_json::{json, Value};

use crate::monomial::{x_names, Monomial};
use crate::rational::{rat_parse, rat_to_string, Rational};
use crate::Error;

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Polynomial {
    arity: usize,
    terms: BTreeMap<Monomial, Rational>,
}

impl Polynomial {
    pub fn zero(arity: usize) -> Self {
        Polynomial {
            arity,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(arity: usize) -> Self {
        Self::constant(arity, Rational::from_integer(1.into()))
    }

    pub fn constant(arity: usize, c: Rational) -> Self {
        let mut p = Self::zero(arity);
        p.add_term(Monomial::one(arity), c);
        p
    }

    pub fn variable(arity: usize, idx: usize) -> Self {
        let mut p = Self::zero(arity);
        p.add_term(
            Monomial::var(arity, idx),
            Rational::from_integer(1.into()),
        );
        p
    }

    pub fn monomial(m: Monomial, c: Rational) -> Self {
        let mut p = Self::zero(m.arity());
        p.add_term(m, c);
        p
    }

    pub fn from_terms<I: IntoIterator<Item = (Monomial, Rational)>>(
        arity: usize,
        terms: I,
    ) -> Self {
        let mut p = Self::zero(arity);
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    /// First term in the canonical order, if any.
    pub fn leading_term(&self) -> Option<(&Monomial, &Rational)> {
        self.terms.iter().next()
    }

    pub fn coeff(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.degree()).max()
    }

    /// Degree in a single variable; `None` for the zero polynomial.
    pub fn var_degree(&self, var: usize) -> Option<u32> {
        self.terms.keys().map(|m| m.exp(var)).max()
    }

    /// Adds `c * m` in place, pruning the term if it cancels.
    pub fn add_term(&mut self, m: Monomial, c: Rational) {
        assert_eq!(m.arity(), self.arity, "polynomial arity mismatch");
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(m);
        match entry {
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
        assert_eq!(self.arity, other.arity, "polynomial arity mismatch");
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.arity, other.arity, "polynomial arity mismatch");
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        Polynomial {
            arity: self.arity,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), -c.clone()))
                .collect(),
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero(self.arity);
        }
        Polynomial {
            arity: self.arity,
            terms: self
                .terms
                .iter()
                .map(|(m, k)| (m.clone(), k * c))
                .collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.arity, other.arity, "polynomial arity mismatch");
        let mut out = Self::zero(self.arity);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }

    pub fn mul_monomial(&self, m: &Monomial, c: &Rational) -> Self {
        let mut out = Self::zero(self.arity);
        if c.is_zero() {
            return out;
        }
        for (m1, c1) in &self.terms {
            out.add_term(m1.mul(m), c1 * c);
        }
        out
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one(self.arity);
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    /// Ring homomorphism sending `x_i` to `images[i]`. All images must share
    /// one arity, which becomes the arity of the result.
    pub fn substitute(&self, images: &[Polynomial]) -> Polynomial {
        assert_eq!(images.len(), self.arity, "substitution arity mismatch");
        let out_arity = images.first().map(|p| p.arity()).unwrap_or(0);
        for im in images {
            assert_eq!(im.arity(), out_arity, "substitution image arity mismatch");
        }
        let mut out = Polynomial::zero(out_arity);
        for (m, c) in &self.terms {
            let mut term = Polynomial::constant(out_arity, c.clone());
            for (i, &e) in m.exps().iter().enumerate() {
                if e > 0 {
                    term = term.mul(&images[i].pow(e));
                }
            }
            out = out.add(&term);
        }
        out
    }

    /// Substitution by monomial images (a monomial map on terms).
    pub fn substitute_monomials(&self, images: &[Monomial]) -> Polynomial {
        assert_eq!(images.len(), self.arity, "substitution arity mismatch");
        let out_arity = images.first().map(|m| m.arity()).unwrap_or(0);
        let mut out = Polynomial::zero(out_arity);
        for (m, c) in &self.terms {
            out.add_term(m.substitute(images), c.clone());
        }
        out
    }

    /// Swaps two variables.
    pub fn swap_vars(&self, i: usize, j: usize) -> Polynomial {
        let mut out = Polynomial::zero(self.arity);
        for (m, c) in &self.terms {
            let mut exps = m.exps().to_vec();
            exps.swap(i, j);
            out.add_term(Monomial::from_exps(exps), c.clone());
        }
        out
    }

    /// Terms of one total degree, as a polynomial.
    pub fn homogeneous_component(&self, n: u32) -> Polynomial {
        Polynomial {
            arity: self.arity,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree() == n)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn extend_arity(&self, arity: usize) -> Polynomial {
        Polynomial {
            arity,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.extend_arity(arity), c.clone()))
                .collect(),
        }
    }

    /// Renders with explicit variable names, terms in canonical order, e.g.
    /// `x2^2 - 2*x1*x3`.
    pub fn render(&self, names: &[&str]) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (i, (m, c)) in self.terms.iter().enumerate() {
            let neg = c < &Rational::zero();
            let abs = if neg { -c.clone() } else { c.clone() };
            if i == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let coeff_one = abs == Rational::from_integer(1.into());
            if m.is_one() {
                out.push_str(&rat_to_string(&abs));
            } else if coeff_one {
                out.push_str(&m.render(names));
            } else {
                out.push_str(&format!("{}*{}", rat_to_string(&abs), m.render(names)));
            }
        }
        out
    }

    /// JSON form `{"arity": d, "terms": [["coeff", [e1..ed]], ...]}` with
    /// terms in canonical order.
    pub fn to_json(&self) -> Value {
        let terms: Vec<Value> = self
            .terms
            .iter()
            .map(|(m, c)| json!([rat_to_string(c), m.exps()]))
            .collect();
        json!({ "arity": self.arity, "terms": terms })
    }

    pub fn from_json(v: &Value) -> crate::Result<Polynomial> {
        let arity = v["arity"]
            .as_u64()
            .ok_or_else(|| Error::Json("polynomial missing arity".into()))?
            as usize;
        let mut p = Polynomial::zero(arity);
        let terms = v["terms"]
            .as_array()
            .ok_or_else(|| Error::Json("polynomial missing terms".into()))?;
        for t in terms {
            let pair = t
                .as_array()
                .filter(|a| a.len() == 2)
                .ok_or_else(|| Error::Json("bad polynomial term".into()))?;
            let c = rat_parse(
                pair[0]
                    .as_str()
                    .ok_or_else(|| Error::Json("bad coefficient".into()))?,
            )?;
            let exps: Vec<u32> = pair[1]
                .as_array()
                .ok_or_else(|| Error::Json("bad exponent vector".into()))?
                .iter()
                .map(|e| e.as_u64().map(|x| x as u32))
                .collect::<Option<_>>()
                .ok_or_else(|| Error::Json("bad exponent".into()))?;
            if exps.len() != arity {
                return Err(Error::Json("exponent vector length mismatch".into()));
            }
            p.add_term(Monomial::from_exps(exps), c);
        }
        Ok(p)
    }
}

/// Parses a polynomial in variables `x1..xd`, e.g. `x2^2 - 2*x1*x3 + 1/2`.
pub fn parse_x_polynomial(s: &str, arity: usize) -> crate::Result<Polynomial> {
    let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if compact.is_empty() {
        return Err(Error::Parse("empty polynomial".into()));
    }
    let mut out = Polynomial::zero(arity);
    let mut rest: &str = &compact;
    let mut sign = Rational::from_integer(1.into());
    if let Some(r) = rest.strip_prefix('-') {
        sign = -sign;
        rest = r;
    } else if let Some(r) = rest.strip_prefix('+') {
        rest = r;
    }
    loop {
        let end = rest
            .char_indices()
            .find(|&(i, c)| (c == '+' || c == '-') && i > 0)
            .map(|(i, _)| i)
            .unwrap_or(rest.len());
        let (term, tail) = rest.split_at(end);
        let (m, c) = parse_term(term, arity)?;
        out.add_term(m, c * &sign);
        if tail.is_empty() {
            return Ok(out);
        }
        sign = if tail.starts_with('-') {
            -Rational::from_integer(1.into())
        } else {
            Rational::from_integer(1.into())
        };
        rest = &tail[1..];
    }
}

fn parse_term(term: &str, arity: usize) -> crate::Result<(Monomial, Rational)> {
    let mut coeff = Rational::from_integer(1.into());
    let mut mono = Monomial::one(arity);
    for factor in term.split('*') {
        if factor.is_empty() {
            return Err(Error::Parse(format!("empty factor in {term:?}")));
        }
        if let Some(varpart) = factor.strip_prefix('x') {
            let (idx_s, exp) = match varpart.split_once('^') {
                Some((i, e)) => (
                    i,
                    e.parse::<u32>()
                        .map_err(|_| Error::Parse(format!("bad exponent in {factor:?}")))?,
                ),
                None => (varpart, 1),
            };
            let idx: usize = idx_s
                .parse()
                .map_err(|_| Error::Parse(format!("bad variable in {factor:?}")))?;
            if idx == 0 || idx > arity {
                return Err(Error::Parse(format!(
                    "variable x{idx} out of range 1..={arity}"
                )));
            }
            mono = mono.mul_var(idx - 1, exp);
        } else {
            coeff *= rat_parse(factor)?;
        }
    }
    Ok((mono, coeff))
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = x_names(self.arity());
        let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
        write!(f, "{}", self.render(&refs))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, rat_of};
    use proptest::prelude::*;

    fn xp(s: &str, arity: usize) -> Polynomial {
        parse_x_polynomial(s, arity).unwrap()
    }

    #[test]
    fn zero_terms_are_pruned() {
        let p = xp("x1 + x2", 2).sub(&xp("x1", 2));
        assert_eq!(p, xp("x2", 2));
        let q = p.sub(&xp("x2", 2));
        assert!(q.is_zero());
        assert_eq!(q.num_terms(), 0);
    }

    #[test]
    fn render_golden() {
        let p = xp("x2^2 - 2*x1*x3", 3);
        assert_eq!(p.to_string(), "x2^2 - 2*x1*x3");
        assert_eq!(xp("-1/2*x1 + 1", 1).to_string(), "1 - 1/2*x1");
        assert_eq!(Polynomial::zero(2).to_string(), "0");
    }

    #[test]
    fn parse_rejects_bad_input() {
        assert!(parse_x_polynomial("x4", 3).is_err());
        assert!(parse_x_polynomial("", 2).is_err());
        assert!(parse_x_polynomial("x1^", 2).is_err());
    }

    #[test]
    fn json_round_trip() {
        let p = xp("x2^2 - 2*x1*x3 + 1/3", 3);
        let v = p.to_json();
        assert_eq!(Polynomial::from_json(&v).unwrap(), p);
        // terms appear in canonical order in the JSON
        let terms = v["terms"].as_array().unwrap();
        assert_eq!(terms[0][0], "1/3");
    }

    #[test]
    #[should_panic(expected = "arity mismatch")]
    fn arity_mismatch_panics() {
        let _ = Polynomial::one(2).add(&Polynomial::one(3));
    }

    #[test]
    fn substitution_golden() {
        // x1*x2 with x1 -> x1 + x2, x2 -> x1 - x2 gives x1^2 - x2^2
        let p = xp("x1*x2", 2);
        let images = vec![xp("x1+x2", 2), xp("x1-x2", 2)];
        assert_eq!(p.substitute(&images), xp("x1^2 - x2^2", 2));
    }

    fn arb_poly(arity: usize, max_terms: usize) -> impl Strategy<Value = Polynomial> {
        proptest::collection::vec(
            (
                proptest::collection::vec(0u32..3, arity),
                -4i64..=4,
                1i64..=3,
            ),
            0..=max_terms,
        )
        .prop_map(move |terms| {
            Polynomial::from_terms(
                arity,
                terms
                    .into_iter()
                    .map(|(e, n, d)| (Monomial::from_exps(e), rat_of(n, d))),
            )
        })
    }

    proptest! {
        #[test]
        fn ring_axioms(a in arb_poly(3, 4), b in arb_poly(3, 4), c in arb_poly(3, 4)) {
            prop_assert_eq!(a.add(&b), b.add(&a));
            prop_assert_eq!(a.mul(&b), b.mul(&a));
            prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
            prop_assert_eq!(a.mul(&b.mul(&c)), a.mul(&b).mul(&c));
            prop_assert!(a.sub(&a).is_zero());
        }

        #[test]
        fn substitution_is_a_homomorphism(
            a in arb_poly(2, 3),
            b in arb_poly(2, 3),
            i0 in arb_poly(2, 2),
            i1 in arb_poly(2, 2),
        ) {
            let images = vec![i0, i1];
            prop_assert_eq!(
                a.mul(&b).substitute(&images),
                a.substitute(&images).mul(&b.substitute(&images))
            );
            prop_assert_eq!(
                a.add(&b).substitute(&images),
                a.substitute(&images).add(&b.substitute(&images))
            );
        }

        #[test]
        fn scale_by_content_then_restore(a in arb_poly(3, 5)) {
            let two = rat(2);
            let half = rat_of(1, 2);
            prop_assert_eq!(a.scale(&two).scale(&half), a);
        }
    }
}
