//! Rational series in factored form: `num / prod_i (1 - m_i)^{k_i}` with a
//! polynomial numerator and a multiset of binomial denominator factors.
//!
//! This is the shape Hilbert series naturally arrive in and stay in: sums,
//! differences and products pool denominator factors without ever needing a
//! polynomial gcd. Equality is decided exactly by cross-multiplication.
//! `normalize` cancels only denominator factors `(1 - m)` that divide the
//! numerator exactly.

use std::collections::BTreeMap;

use num::One;
use serde_json::{json, Value};

use crate::monomial::Monomial;
use crate::polynomial::Polynomial;
use crate::series::{TruncatedSeries, Truncation};
use crate::Error;

#[derive(Clone, Debug)]
pub struct NiceRational {
    num: Polynomial,
    /// Factor monomial -> multiplicity; every key is a nonconstant monomial.
    den: BTreeMap<Monomial, u32>,
}

impl NiceRational {
    pub fn zero(arity: usize) -> Self {
        NiceRational {
            num: Polynomial::zero(arity),
            den: BTreeMap::new(),
        }
    }

    pub fn one(arity: usize) -> Self {
        NiceRational {
            num: Polynomial::one(arity),
            den: BTreeMap::new(),
        }
    }

    pub fn from_poly(p: Polynomial) -> Self {
        NiceRational {
            num: p,
            den: BTreeMap::new(),
        }
    }

    /// Builds `num / prod (1 - m)^k`. Constant factor monomials are
    /// rejected: `(1 - 1)` is not series-invertible.
    pub fn with_den<I: IntoIterator<Item = (Monomial, u32)>>(
        num: Polynomial,
        factors: I,
    ) -> crate::Result<Self> {
        let mut den = BTreeMap::new();
        for (m, k) in factors {
            assert_eq!(m.arity(), num.arity(), "denominator arity mismatch");
            if m.is_one() {
                return Err(Error::NonInvertibleFactor(
                    "constant denominator factor (1 - 1)".into(),
                ));
            }
            if k > 0 {
                *den.entry(m).or_insert(0) += k;
            }
        }
        let mut out = NiceRational { num, den };
        out.prune();
        Ok(out)
    }

    fn prune(&mut self) {
        if self.num.is_zero() {
            self.den.clear();
        }
    }

    pub fn arity(&self) -> usize {
        self.num.arity()
    }

    pub fn num(&self) -> &Polynomial {
        &self.num
    }

    pub fn den_factors(&self) -> impl Iterator<Item = (&Monomial, u32)> {
        self.den.iter().map(|(m, &k)| (m, k))
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// The denominator expanded as a polynomial.
    pub fn den_poly(&self) -> Polynomial {
        let arity = self.arity();
        let mut acc = Polynomial::one(arity);
        for (m, &k) in &self.den {
            let factor = Polynomial::one(arity).sub(&Polynomial::monomial(
                m.clone(),
                num::BigRational::one(),
            ));
            for _ in 0..k {
                acc = acc.mul(&factor);
            }
        }
        acc
    }

    /// Pools denominators: returns numerator multipliers `(a, b)` such that
    /// `self = (num*a)/D` and `other = (other.num*b)/D` over the common `D`.
    fn pool(&self, other: &Self) -> (Polynomial, Polynomial, BTreeMap<Monomial, u32>) {
        let arity = self.arity();
        let mut pooled: BTreeMap<Monomial, u32> = self.den.clone();
        for (m, &k) in &other.den {
            let e = pooled.entry(m.clone()).or_insert(0);
            *e = (*e).max(k);
        }
        let mut a = Polynomial::one(arity);
        let mut b = Polynomial::one(arity);
        for (m, &k) in &pooled {
            let factor = Polynomial::one(arity).sub(&Polynomial::monomial(
                m.clone(),
                num::BigRational::one(),
            ));
            let ka = k - self.den.get(m).copied().unwrap_or(0);
            let kb = k - other.den.get(m).copied().unwrap_or(0);
            for _ in 0..ka {
                a = a.mul(&factor);
            }
            for _ in 0..kb {
                b = b.mul(&factor);
            }
        }
        (a, b, pooled)
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.arity(), other.arity(), "arity mismatch");
        let (a, b, pooled) = self.pool(other);
        let num = self.num.mul(&a).add(&other.num.mul(&b));
        let mut out = NiceRational { num, den: pooled };
        out.prune();
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        NiceRational {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.arity(), other.arity(), "arity mismatch");
        let mut den = self.den.clone();
        for (m, &k) in &other.den {
            *den.entry(m.clone()).or_insert(0) += k;
        }
        let mut out = NiceRational {
            num: self.num.mul(&other.num),
            den,
        };
        out.prune();
        out
    }

    pub fn mul_poly(&self, p: &Polynomial) -> Self {
        let mut out = NiceRational {
            num: self.num.mul(p),
            den: self.den.clone(),
        };
        out.prune();
        out
    }

    pub fn scale(&self, c: &num::BigRational) -> Self {
        let mut out = NiceRational {
            num: self.num.scale(c),
            den: self.den.clone(),
        };
        out.prune();
        out
    }

    /// Exact value equality by cross-multiplication.
    pub fn equals(&self, other: &Self) -> bool {
        assert_eq!(self.arity(), other.arity(), "arity mismatch");
        let (a, b, _) = self.pool(other);
        self.num.mul(&a) == other.num.mul(&b)
    }

    /// Divides the numerator by `(1 - m)` if the division is exact.
    fn try_divide_num(num: &Polynomial, m: &Monomial) -> Option<Polynomial> {
        let bound = num.degree()?;
        if m.degree() == 0 || m.degree() > bound {
            return None;
        }
        let mut q = Polynomial::zero(num.arity());
        let mut r = num.clone();
        let qbound = bound - m.degree();
        while let Some((t_m, t_c)) = r.leading_term() {
            if t_m.degree() > qbound {
                return None;
            }
            let (t_m, t_c) = (t_m.clone(), t_c.clone());
            q.add_term(t_m.clone(), t_c.clone());
            // r -= t*(1 - m) = t - t*m
            r.add_term(t_m.clone(), -t_c.clone());
            r.add_term(t_m.mul(m), t_c);
        }
        Some(q)
    }

    /// Cancels denominator factors that divide the numerator exactly;
    /// no polynomial gcd beyond that.
    pub fn normalize(&self) -> Self {
        let mut num = self.num.clone();
        let mut den = BTreeMap::new();
        for (m, &k) in &self.den {
            let mut left = k;
            while left > 0 {
                match Self::try_divide_num(&num, m) {
                    Some(q) => {
                        num = q;
                        left -= 1;
                    }
                    None => break,
                }
            }
            if left > 0 {
                den.insert(m.clone(), left);
            }
        }
        let mut out = NiceRational { num, den };
        out.prune();
        out
    }

    /// Divides the numerator by one power of a variable. Fails if some
    /// numerator term lacks it.
    pub fn divide_num_by_var(&self, var: usize) -> crate::Result<Self> {
        let arity = self.arity();
        let mut num = Polynomial::zero(arity);
        for (m, c) in self.num.terms() {
            match m.try_div(&Monomial::var(arity, var)) {
                Some(q) => num.add_term(q, c.clone()),
                None => {
                    return Err(Error::NotDivisible(format!("variable index {var}")));
                }
            }
        }
        Ok(NiceRational {
            num,
            den: self.den.clone(),
        })
    }

    /// Monomial substitution on numerator and denominator factors. Image
    /// factors must stay nonconstant.
    pub fn substitute_monomials(&self, images: &[Monomial]) -> crate::Result<Self> {
        let num = self.num.substitute_monomials(images);
        let mut den = BTreeMap::new();
        for (m, &k) in &self.den {
            let im = m.substitute(images);
            if im.is_one() {
                return Err(Error::NonInvertibleFactor(format!(
                    "factor (1 - {m}) maps to a constant"
                )));
            }
            *den.entry(im).or_insert(0) += k;
        }
        let mut out = NiceRational { num, den };
        out.prune();
        Ok(out)
    }

    /// Sets one variable to 1 (dropping it from every monomial). Fails if a
    /// denominator factor collapses to a constant.
    pub fn set_var_to_one(&self, var: usize) -> crate::Result<Self> {
        let arity = self.arity();
        let mut images = Vec::with_capacity(arity);
        for i in 0..arity {
            if i == var {
                images.push(Monomial::one(arity));
            } else {
                images.push(Monomial::var(arity, i));
            }
        }
        self.substitute_monomials(&images)
    }

    /// Keeps only the designated variables, e.g. the graded series in `z`
    /// from a bigraded one. Variables are re-indexed in the given order.
    pub fn project_to_vars(&self, vars: &[usize]) -> crate::Result<Self> {
        let arity = self.arity();
        let out_arity = vars.len();
        let images: Vec<Monomial> = (0..arity)
            .map(|i| match vars.iter().position(|&v| v == i) {
                Some(j) => Monomial::var(out_arity, j),
                None => Monomial::one(out_arity),
            })
            .collect();
        let num = self.num.substitute_monomials(&images);
        let mut den = BTreeMap::new();
        for (m, &k) in &self.den {
            let im = m.substitute(&images);
            if im.is_one() {
                return Err(Error::NonInvertibleFactor(format!(
                    "factor (1 - {m}) collapses under projection"
                )));
            }
            *den.entry(im).or_insert(0) += k;
        }
        let mut out = NiceRational { num, den };
        out.prune();
        Ok(out)
    }

    /// Expands to a truncated series.
    pub fn expand(&self, trunc: Truncation) -> crate::Result<TruncatedSeries> {
        let arity = self.arity();
        let mut acc = TruncatedSeries::from_poly(&self.num, trunc);
        for (m, &k) in &self.den {
            let g = TruncatedSeries::geometric(arity, trunc, m, k)?;
            acc = acc.mul(&g);
        }
        Ok(acc)
    }

    /// Renders as `num / ((1-t1*z)^2*(1-t1*t2*z^2))`; a trivial denominator
    /// renders as just the numerator.
    pub fn render(&self, names: &[&str]) -> String {
        let num = self.num.render(names);
        if self.den.is_empty() {
            return num;
        }
        let factors: Vec<String> = self
            .den
            .iter()
            .map(|(m, &k)| {
                let base = format!("(1-{})", m.render(names));
                if k == 1 {
                    base
                } else {
                    format!("{base}^{k}")
                }
            })
            .collect();
        let num_wrapped = if self.num.num_terms() > 1 {
            format!("({num})")
        } else {
            num
        };
        format!("{num_wrapped} / ({})", factors.join("*"))
    }

    /// JSON form `{"num": poly, "den": [[[e..], k], ...]}`.
    pub fn to_json(&self) -> Value {
        let den: Vec<Value> = self
            .den
            .iter()
            .map(|(m, &k)| json!([m.exps(), k]))
            .collect();
        json!({ "num": self.num.to_json(), "den": den })
    }

    pub fn from_json(v: &Value) -> crate::Result<Self> {
        let num = Polynomial::from_json(&v["num"])?;
        let arity = num.arity();
        let mut factors = Vec::new();
        for f in v["den"]
            .as_array()
            .ok_or_else(|| Error::Json("missing den".into()))?
        {
            let pair = f
                .as_array()
                .filter(|a| a.len() == 2)
                .ok_or_else(|| Error::Json("bad den factor".into()))?;
            let exps: Vec<u32> = pair[0]
                .as_array()
                .ok_or_else(|| Error::Json("bad factor exponents".into()))?
                .iter()
                .map(|e| e.as_u64().map(|x| x as u32))
                .collect::<Option<_>>()
                .ok_or_else(|| Error::Json("bad factor exponent".into()))?;
            if exps.len() != arity {
                return Err(Error::Json("factor arity mismatch".into()));
            }
            let k = pair[1]
                .as_u64()
                .ok_or_else(|| Error::Json("bad factor multiplicity".into()))? as u32;
            factors.push((Monomial::from_exps(exps), k));
        }
        Self::with_den(num, factors)
    }

    /// Sums many forms with balanced pairwise combination, normalizing along
    /// the way to keep numerators small.
    pub fn sum(arity: usize, items: Vec<NiceRational>) -> NiceRational {
        if items.is_empty() {
            return NiceRational::zero(arity);
        }
        let mut layer = items;
        while layer.len() > 1 {
            let mut next = Vec::with_capacity(layer.len() / 2 + 1);
            let mut it = layer.into_iter();
            while let Some(a) = it.next() {
                match it.next() {
                    Some(b) => next.push(a.add(&b).normalize()),
                    None => next.push(a),
                }
            }
            layer = next;
        }
        layer.pop().unwrap()
    }
}

impl PartialEq for NiceRational {
    fn eq(&self, other: &Self) -> bool {
        self.equals(other)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polynomial::parse_x_polynomial;
    use crate::rational::rat;

    fn zmon(e: u32) -> Monomial {
        Monomial::from_exps(vec![e])
    }

    fn zpoly(s: &str) -> Polynomial {
        parse_x_polynomial(s, 1).unwrap()
    }

    #[test]
    fn equality_by_cross_multiplication() {
        // (1 - z^2)/(1 - z) == 1 + z
        let a = NiceRational::with_den(zpoly("1 - x1^2"), [(zmon(1), 1)]).unwrap();
        let b = NiceRational::from_poly(zpoly("1 + x1"));
        assert!(a.equals(&b));
        assert_eq!(a, b);
        let c = NiceRational::from_poly(zpoly("1 - x1"));
        assert!(!a.equals(&c));
    }

    #[test]
    fn normalize_cancels_exact_factors_only() {
        let a = NiceRational::with_den(zpoly("1 - x1^2"), [(zmon(1), 1)]).unwrap();
        let n = a.normalize();
        assert_eq!(n.den_factors().count(), 0);
        assert_eq!(n.num(), &zpoly("1 + x1"));
        // (1 + z)/(1 - z^2) is a unit fraction but (1 - z^2) does not divide 1 + z
        let b = NiceRational::with_den(zpoly("1 + x1"), [(zmon(2), 1)]).unwrap();
        let nb = b.normalize();
        assert_eq!(nb.den_factors().count(), 1);
    }

    #[test]
    fn constant_factor_rejected() {
        assert!(NiceRational::with_den(zpoly("1"), [(zmon(0), 1)]).is_err());
    }

    #[test]
    fn arithmetic_pools_denominators() {
        // 1/(1-z) + z/(1-z)^2 == 1/(1-z)^2
        let a = NiceRational::with_den(zpoly("1"), [(zmon(1), 1)]).unwrap();
        let b = NiceRational::with_den(zpoly("x1"), [(zmon(1), 2)]).unwrap();
        let want = NiceRational::with_den(zpoly("1"), [(zmon(1), 2)]).unwrap();
        assert_eq!(a.add(&b), want);
        // product multiplies multiplicities
        let sq = a.mul(&a);
        assert_eq!(sq, NiceRational::with_den(zpoly("1"), [(zmon(1), 2)]).unwrap());
    }

    #[test]
    fn expansion_matches_known_series() {
        let s = NiceRational::with_den(zpoly("1"), [(zmon(1), 2)])
            .unwrap()
            .expand(Truncation::Total(4))
            .unwrap();
        assert_eq!(s.dense_coeffs(), (1..=5).map(rat).collect::<Vec<_>>());
    }

    #[test]
    fn sum_of_many() {
        // sum_{k=1..4} z^k/(1-z)^k at z, telescopes to something checkable
        let items: Vec<NiceRational> = (1..=4)
            .map(|k| {
                NiceRational::with_den(
                    Polynomial::monomial(zmon(k), rat(1)),
                    [(zmon(1), k)],
                )
                .unwrap()
            })
            .collect();
        let total = NiceRational::sum(1, items.clone());
        let mut direct = NiceRational::zero(1);
        for it in &items {
            direct = direct.add(it);
        }
        assert_eq!(total, direct);
    }

    #[test]
    fn division_by_variable() {
        let a = NiceRational::with_den(zpoly("x1 + x1^2"), [(zmon(1), 1)]).unwrap();
        let d = a.divide_num_by_var(0).unwrap();
        assert_eq!(d.num(), &zpoly("1 + x1"));
        let b = NiceRational::from_poly(zpoly("1 + x1"));
        assert!(b.divide_num_by_var(0).is_err());
    }

    #[test]
    fn render_shapes() {
        let a = NiceRational::with_den(zpoly("1 + x1"), [(zmon(1), 2), (zmon(2), 1)]).unwrap();
        assert_eq!(a.render(&["z"]), "(1 + z) / ((1-z)^2*(1-z^2))");
        assert_eq!(NiceRational::from_poly(zpoly("x1")).render(&["z"]), "z");
    }

    #[test]
    fn json_round_trip() {
        let a = NiceRational::with_den(zpoly("1 + x1"), [(zmon(1), 2)]).unwrap();
        let v = a.to_json();
        let back = NiceRational::from_json(&v).unwrap();
        assert_eq!(a, back);
    }
}
