//! The free metabelian Lie algebra `M_d` of rank `d` through its embedding
//! into an abelian wreath product.
//!
//! The wreath product is spanned by `a_1, .., a_d` over the polynomial ring
//! `K[x1..xd]` together with `b_1, .., b_d` over `K`, with multiplication
//! `[a_i f, b_j] = a_i f x_j` and all other products zero. The embedding
//! sends the free generator `y_j` of `M_d` to `a_j + b_j`; a left-normed
//! commutator `[y_{j1}, y_{j2}, y_{j3}, .., y_{jk}]` lands on
//! `(a_{j1} x_{j2} - a_{j2} x_{j1}) x_{j3} .. x_{jk}`. An element
//! `sum_j a_j f_j` of the wreath product is the image of a commutator-ideal
//! element exactly when `sum_j x_j f_j = 0`, so all algebra here is done in
//! wreath coordinates and converted back only on demand.
//!
//! A basis of the commutator ideal is given by the left-normed monomials
//! `[y_{j1}, y_{j2}, .., y_{jk}]` with `j1 > j2 <= j3 <= .. <= jk`.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num::{One, Zero};
use serde_json::{json, Value};

use crate::linalg;
use crate::monomial::Monomial;
use crate::polynomial::Polynomial;
use crate::rational::{rat_parse, rat_to_string, Rational};
use crate::Error;

/// A normal-form basis monomial of the commutator ideal: head pair
/// `(j1, j2)` with `j1 > j2` and a sorted tail with entries `>= j2`.
/// Indices are 0-based internally and 1-based in rendered and JSON form.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct LieMonomial {
    arity: usize,
    j1: usize,
    j2: usize,
    tail: Vec<usize>,
}

impl LieMonomial {
    pub fn new(arity: usize, j1: usize, j2: usize, tail: Vec<usize>) -> crate::Result<Self> {
        if j1 >= arity || j2 >= arity || tail.iter().any(|&t| t >= arity) {
            return Err(Error::Parse(format!(
                "generator index out of range for rank {arity}"
            )));
        }
        let mut tail = tail;
        tail.sort_unstable();
        if j1 <= j2 {
            return Err(Error::Parse(
                "head of a normal-form monomial needs j1 > j2".into(),
            ));
        }
        if tail.first().is_some_and(|&t| t < j2) {
            return Err(Error::Parse(
                "tail entries of a normal-form monomial must be >= j2".into(),
            ));
        }
        Ok(LieMonomial {
            arity,
            j1,
            j2,
            tail,
        })
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn head(&self) -> (usize, usize) {
        (self.j1, self.j2)
    }

    pub fn tail(&self) -> &[usize] {
        &self.tail
    }

    pub fn degree(&self) -> u32 {
        2 + self.tail.len() as u32
    }

    /// The word `[j1, j2, tail..]` with 1-based indices.
    pub fn word(&self) -> Vec<usize> {
        let mut w = vec![self.j1 + 1, self.j2 + 1];
        w.extend(self.tail.iter().map(|&t| t + 1));
        w
    }

    pub fn multidegree(&self) -> Vec<u32> {
        let mut md = vec![0u32; self.arity];
        md[self.j1] += 1;
        md[self.j2] += 1;
        for &t in &self.tail {
            md[t] += 1;
        }
        md
    }

    pub fn extend_arity(&self, arity: usize) -> LieMonomial {
        assert!(arity >= self.arity);
        LieMonomial {
            arity,
            j1: self.j1,
            j2: self.j2,
            tail: self.tail.clone(),
        }
    }
}

impl Ord for LieMonomial {
    fn cmp(&self, other: &Self) -> Ordering {
        assert_eq!(self.arity, other.arity, "rank mismatch");
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.j1.cmp(&other.j1))
            .then_with(|| self.j2.cmp(&other.j2))
            .then_with(|| self.tail.cmp(&other.tail))
    }
}

impl PartialOrd for LieMonomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for LieMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = self.word().iter().map(|j| format!("x{j}")).collect();
        write!(f, "[{}]", names.join(","))
    }
}

/// An element of the free metabelian Lie algebra: a linear part over the
/// free generators plus a combination of normal-form commutator monomials.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LieElement {
    arity: usize,
    linear: Vec<Rational>,
    terms: BTreeMap<LieMonomial, Rational>,
}

impl LieElement {
    pub fn zero(arity: usize) -> Self {
        LieElement {
            arity,
            linear: vec![Rational::zero(); arity],
            terms: BTreeMap::new(),
        }
    }

    pub fn generator(arity: usize, j: usize) -> Self {
        let mut e = Self::zero(arity);
        e.linear[j] = Rational::one();
        e
    }

    pub fn from_terms<I: IntoIterator<Item = (LieMonomial, Rational)>>(
        arity: usize,
        terms: I,
    ) -> Self {
        let mut e = Self::zero(arity);
        for (m, c) in terms {
            e.add_term(m, c);
        }
        e
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn linear(&self) -> &[Rational] {
        &self.linear
    }

    pub fn terms(&self) -> impl Iterator<Item = (&LieMonomial, &Rational)> {
        self.terms.iter()
    }

    pub fn add_term(&mut self, m: LieMonomial, c: Rational) {
        assert_eq!(m.arity(), self.arity, "rank mismatch");
        if c.is_zero() {
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

    pub fn is_zero(&self) -> bool {
        self.linear.iter().all(|c| c.is_zero()) && self.terms.is_empty()
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.arity, other.arity, "rank mismatch");
        let mut out = self.clone();
        for (c, d) in out.linear.iter_mut().zip(&other.linear) {
            *c += d;
        }
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero(self.arity);
        }
        LieElement {
            arity: self.arity,
            linear: self.linear.iter().map(|k| k * c).collect(),
            terms: self
                .terms
                .iter()
                .map(|(m, k)| (m.clone(), k * c))
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-Rational::one()))
    }

    pub fn extend_arity(&self, arity: usize) -> LieElement {
        let mut linear = self.linear.clone();
        linear.resize(arity, Rational::zero());
        LieElement {
            arity,
            linear,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.extend_arity(arity), c.clone()))
                .collect(),
        }
    }

    /// Coefficient vector over a given ordered slice basis. Panics when a
    /// term is outside the basis.
    pub fn coords(&self, basis: &[LieMonomial]) -> Vec<Rational> {
        let index: BTreeMap<&LieMonomial, usize> =
            basis.iter().enumerate().map(|(i, m)| (m, i)).collect();
        let mut v = vec![Rational::zero(); basis.len()];
        for (m, c) in &self.terms {
            let i = *index.get(m).expect("term outside the slice basis");
            v[i] = c.clone();
        }
        v
    }

    /// JSON form
    /// `{"linear": ["0", ..], "terms": [{"coeff": "..", "word": [j1, j2, ..]}]}`
    /// with 1-based words.
    pub fn to_json(&self) -> Value {
        let linear: Vec<Value> = self
            .linear
            .iter()
            .map(|c| Value::String(rat_to_string(c)))
            .collect();
        let terms: Vec<Value> = self
            .terms
            .iter()
            .map(|(m, c)| json!({ "coeff": rat_to_string(c), "word": m.word() }))
            .collect();
        json!({ "linear": linear, "terms": terms })
    }

    /// Reads the JSON form back. Words may be arbitrary left-normed bracket
    /// words; they are normalized through wreath coordinates.
    pub fn from_json(v: &Value, arity: usize) -> crate::Result<Self> {
        let mut linear = vec![Rational::zero(); arity];
        if let Some(lin) = v["linear"].as_array() {
            if lin.len() != arity {
                return Err(Error::Json("linear part length mismatch".into()));
            }
            for (i, c) in lin.iter().enumerate() {
                linear[i] = rat_parse(
                    c.as_str()
                        .ok_or_else(|| Error::Json("bad linear coefficient".into()))?,
                )?;
            }
        }
        let mut words = Vec::new();
        for t in v["terms"]
            .as_array()
            .ok_or_else(|| Error::Json("missing terms".into()))?
        {
            let c = rat_parse(
                t["coeff"]
                    .as_str()
                    .ok_or_else(|| Error::Json("bad term coefficient".into()))?,
            )?;
            let word: Vec<usize> = t["word"]
                .as_array()
                .ok_or_else(|| Error::Json("bad word".into()))?
                .iter()
                .map(|j| j.as_u64().map(|x| x as usize))
                .collect::<Option<_>>()
                .ok_or_else(|| Error::Json("bad word entry".into()))?;
            words.push((c, word));
        }
        let mut e = lie_from_words(arity, &words)?;
        for (i, c) in linear.into_iter().enumerate() {
            e.linear[i] += c;
        }
        Ok(e)
    }
}

impl fmt::Display for LieElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<(String, Rational)> = Vec::new();
        for (i, c) in self.linear.iter().enumerate() {
            if !c.is_zero() {
                parts.push((format!("x{}", i + 1), c.clone()));
            }
        }
        for (m, c) in &self.terms {
            parts.push((m.to_string(), c.clone()));
        }
        if parts.is_empty() {
            return write!(f, "0");
        }
        let mut out = String::new();
        for (i, (txt, c)) in parts.iter().enumerate() {
            let neg = c < &Rational::zero();
            let abs = if neg { -c.clone() } else { c.clone() };
            if i == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            if abs.is_one() {
                out.push_str(txt);
            } else {
                out.push_str(&format!("{}*{}", rat_to_string(&abs), txt));
            }
        }
        write!(f, "{out}")
    }
}

/// Wreath-product element: `sum_i a_i f_i + sum_i beta_i b_i` with
/// polynomial `f_i` and scalar `beta_i`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct WreathElement {
    arity: usize,
    a: Vec<Polynomial>,
    b: Vec<Rational>,
}

impl WreathElement {
    pub fn zero(arity: usize) -> Self {
        WreathElement {
            arity,
            a: (0..arity).map(|_| Polynomial::zero(arity)).collect(),
            b: vec![Rational::zero(); arity],
        }
    }

    pub fn from_parts(arity: usize, a: Vec<Polynomial>, b: Vec<Rational>) -> Self {
        assert_eq!(a.len(), arity);
        assert_eq!(b.len(), arity);
        assert!(a.iter().all(|f| f.arity() == arity));
        WreathElement { arity, a, b }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn a(&self) -> &[Polynomial] {
        &self.a
    }

    pub fn b(&self) -> &[Rational] {
        &self.b
    }

    pub fn is_zero(&self) -> bool {
        self.a.iter().all(|f| f.is_zero()) && self.b.iter().all(|c| c.is_zero())
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.arity, other.arity, "rank mismatch");
        WreathElement {
            arity: self.arity,
            a: self
                .a
                .iter()
                .zip(&other.a)
                .map(|(f, g)| f.add(g))
                .collect(),
            b: self
                .b
                .iter()
                .zip(&other.b)
                .map(|(c, d)| c + d)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-Rational::one()))
    }

    pub fn scale(&self, c: &Rational) -> Self {
        WreathElement {
            arity: self.arity,
            a: self.a.iter().map(|f| f.scale(c)).collect(),
            b: self.b.iter().map(|k| k * c).collect(),
        }
    }

    /// The Lie bracket. Only the `a`-part survives:
    /// `[sum a_i f_i + sum beta_i b_i, sum a_i g_i + sum gamma_i b_i]`
    /// has `a_i`-coordinate `f_i * (sum_j gamma_j x_j) - g_i * (sum_j beta_j x_j)`.
    pub fn bracket(&self, other: &Self) -> Self {
        assert_eq!(self.arity, other.arity, "rank mismatch");
        let arity = self.arity;
        let xu = linear_poly(arity, &self.b);
        let xv = linear_poly(arity, &other.b);
        WreathElement {
            arity,
            a: self
                .a
                .iter()
                .zip(&other.a)
                .map(|(f, g)| f.mul(&xv).sub(&g.mul(&xu)))
                .collect(),
            b: vec![Rational::zero(); arity],
        }
    }

    /// Right action of a polynomial in the free generators on an element of
    /// the commutator ideal: repeated bracketing by generators becomes
    /// multiplication of the `a`-coordinates. Requires `b = 0`.
    pub fn module_action(&self, p: &Polynomial) -> Self {
        assert!(
            self.b.iter().all(|c| c.is_zero()),
            "module action needs a commutator-ideal element (b = 0)"
        );
        assert_eq!(p.arity(), self.arity, "rank mismatch");
        WreathElement {
            arity: self.arity,
            a: self.a.iter().map(|f| f.mul(p)).collect(),
            b: vec![Rational::zero(); self.arity],
        }
    }

    /// Flattened coordinates `(a-index, monomial) -> coefficient`, used to
    /// build matrices.
    pub fn flat_coords(&self) -> BTreeMap<(usize, Monomial), Rational> {
        let mut out = BTreeMap::new();
        for (i, f) in self.a.iter().enumerate() {
            for (m, c) in f.terms() {
                out.insert((i, m.clone()), c.clone());
            }
        }
        out
    }
}

fn linear_poly(arity: usize, coeffs: &[Rational]) -> Polynomial {
    let mut p = Polynomial::zero(arity);
    for (i, c) in coeffs.iter().enumerate() {
        p.add_term(Monomial::var(arity, i), c.clone());
    }
    p
}

/// Embedding of a general left-normed bracket word `[y_{w0}, y_{w1}, ..]`
/// (0-based indices, any values) scaled by `coeff`. A single letter embeds
/// as `a_j + b_j`.
pub fn embed_word(arity: usize, coeff: &Rational, word: &[usize]) -> WreathElement {
    assert!(!word.is_empty(), "empty bracket word");
    assert!(word.iter().all(|&j| j < arity), "generator index out of range");
    let mut out = WreathElement::zero(arity);
    if word.len() == 1 {
        out.a[word[0]].add_term(Monomial::one(arity), coeff.clone());
        out.b[word[0]] = coeff.clone();
        return out;
    }
    let (j1, j2) = (word[0], word[1]);
    let mut tail_mono = Monomial::one(arity);
    for &t in &word[2..] {
        tail_mono = tail_mono.mul_var(t, 1);
    }
    out.a[j1].add_term(tail_mono.mul_var(j2, 1), coeff.clone());
    out.a[j2].add_term(tail_mono.mul_var(j1, 1), -coeff.clone());
    out
}

/// Embedding of a Lie element into the wreath product.
pub fn embed(e: &LieElement) -> WreathElement {
    let arity = e.arity();
    let mut out = WreathElement::zero(arity);
    for (j, c) in e.linear().iter().enumerate() {
        if !c.is_zero() {
            out.a[j].add_term(Monomial::one(arity), c.clone());
            out.b[j] = c.clone();
        }
    }
    for (m, c) in e.terms() {
        out = out.add(&embed_word(arity, c, &word0(m)));
    }
    out
}

fn word0(m: &LieMonomial) -> Vec<usize> {
    let mut w = vec![m.head().0, m.head().1];
    w.extend_from_slice(m.tail());
    w
}

/// Membership test for the image of the commutator ideal: `b = 0` and
/// `sum_j x_j a_j = 0`.
pub fn in_commutator_image(w: &WreathElement) -> bool {
    if w.b().iter().any(|c| !c.is_zero()) {
        return false;
    }
    let arity = w.arity();
    let mut acc = Polynomial::zero(arity);
    for (j, f) in w.a().iter().enumerate() {
        acc = acc.add(&f.mul(&Polynomial::variable(arity, j)));
    }
    acc.is_zero()
}

/// Normal-form basis of the commutator ideal in one multidegree.
pub fn basis_slice_multi(arity: usize, mdeg: &[u32]) -> Vec<LieMonomial> {
    assert_eq!(mdeg.len(), arity, "rank mismatch");
    let mut out = Vec::new();
    for j2 in 0..arity {
        if mdeg[j2] == 0 {
            continue;
        }
        for j1 in (j2 + 1)..arity {
            if mdeg[j1] == 0 {
                continue;
            }
            let mut rem = mdeg.to_vec();
            rem[j1] -= 1;
            rem[j2] -= 1;
            if (0..j2).any(|i| rem[i] > 0) {
                continue;
            }
            let mut tail = Vec::new();
            for (i, &k) in rem.iter().enumerate() {
                for _ in 0..k {
                    tail.push(i);
                }
            }
            out.push(LieMonomial::new(arity, j1, j2, tail).expect("constructed normal form"));
        }
    }
    out.sort();
    out
}

/// Normal-form basis of the commutator ideal in one total degree,
/// canonically ordered.
pub fn basis_slice_total(arity: usize, degree: u32) -> Vec<LieMonomial> {
    assert!(degree >= 2, "commutator ideal starts in degree 2");
    let mut out = Vec::new();
    let k = (degree - 2) as usize;
    for j2 in 0..arity {
        for j1 in (j2 + 1)..arity {
            // tails: multisets of size k over {j2, .., arity-1}
            let alphabet: Vec<usize> = (j2..arity).collect();
            push_multisets(&alphabet, k, &mut Vec::new(), &mut |tail| {
                out.push(
                    LieMonomial::new(arity, j1, j2, tail.to_vec())
                        .expect("constructed normal form"),
                );
            });
        }
    }
    out.sort();
    out
}

fn push_multisets(
    alphabet: &[usize],
    k: usize,
    acc: &mut Vec<usize>,
    f: &mut impl FnMut(&[usize]),
) {
    if k == 0 {
        f(acc);
        return;
    }
    if alphabet.is_empty() {
        return;
    }
    for (i, &x) in alphabet.iter().enumerate() {
        acc.push(x);
        push_multisets(&alphabet[i..], k - 1, acc, f);
        acc.pop();
    }
}

/// Converts a wreath element back to a Lie element, solving one exact
/// linear system per multidegree against embedded normal-form monomials.
pub fn lie_from_wreath(w: &WreathElement) -> crate::Result<LieElement> {
    let arity = w.arity();
    let mut out = LieElement::zero(arity);
    // linear part: read off b, subtract its embedding
    let mut residual = w.clone();
    for j in 0..arity {
        let beta = w.b()[j].clone();
        if !beta.is_zero() {
            out.linear[j] = beta.clone();
            residual.a[j].add_term(Monomial::one(arity), -beta.clone());
            residual.b[j] = Rational::zero();
        }
    }
    if !in_commutator_image(&residual) {
        return Err(Error::NotInImage(
            "wreath element is not a Lie element".into(),
        ));
    }
    // group the residual by Lie multidegree: a_j-term with monomial mu
    // belongs to the slice mu + e_j
    let mut slices: BTreeMap<Vec<u32>, Vec<(usize, Monomial, Rational)>> = BTreeMap::new();
    for (j, f) in residual.a.iter().enumerate() {
        for (m, c) in f.terms() {
            let mut key = m.exps().to_vec();
            key[j] += 1;
            slices
                .entry(key)
                .or_default()
                .push((j, m.clone(), c.clone()));
        }
    }
    for (mdeg, entries) in slices {
        let basis = basis_slice_multi(arity, &mdeg);
        // rows: positions (j, mdeg - e_j) with mdeg_j > 0
        let mut row_keys = Vec::new();
        for (j, &k) in mdeg.iter().enumerate() {
            if k > 0 {
                let mut e = mdeg.clone();
                e[j] -= 1;
                row_keys.push((j, Monomial::from_exps(e)));
            }
        }
        let row_index: BTreeMap<&(usize, Monomial), usize> =
            row_keys.iter().enumerate().map(|(i, k)| (k, i)).collect();
        let mut matrix = vec![vec![Rational::zero(); basis.len()]; row_keys.len()];
        for (col, bm) in basis.iter().enumerate() {
            let im = embed_word(arity, &Rational::one(), &word0(bm));
            for ((j, m), c) in im.flat_coords() {
                let i = row_index[&(j, m)];
                matrix[i][col] = c;
            }
        }
        let mut rhs = vec![Rational::zero(); row_keys.len()];
        for (j, m, c) in entries {
            let i = row_index[&(j, m)];
            rhs[i] = c;
        }
        let sol = linalg::solve(&matrix, &rhs, basis.len()).ok_or_else(|| {
            Error::NotInImage(format!("no normal form in multidegree {mdeg:?}"))
        })?;
        for (bm, c) in basis.into_iter().zip(sol) {
            out.add_term(bm, c);
        }
    }
    Ok(out)
}

/// Builds a Lie element from `(coeff, 1-based word)` pairs through the
/// wreath product, normalizing arbitrary left-normed words.
pub fn lie_from_words(arity: usize, words: &[(Rational, Vec<usize>)]) -> crate::Result<LieElement> {
    let mut acc = WreathElement::zero(arity);
    for (c, word) in words {
        if word.is_empty() || word.iter().any(|&j| j == 0 || j > arity) {
            return Err(Error::Parse(format!(
                "bad bracket word {word:?} for rank {arity}"
            )));
        }
        let w0: Vec<usize> = word.iter().map(|&j| j - 1).collect();
        acc = acc.add(&embed_word(arity, c, &w0));
    }
    lie_from_wreath(&acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, rat_of};
    use proptest::prelude::*;

    fn one() -> Rational {
        rat(1)
    }

    #[test]
    fn embedding_of_a_commutator() {
        // [y2, y1] -> a_2 x_1 - a_1 x_2
        let w = embed_word(3, &one(), &[1, 0]);
        assert!(in_commutator_image(&w));
        assert_eq!(w.a()[1].to_string(), "x1");
        assert_eq!(w.a()[0].to_string(), "-x2");
        assert!(w.a()[2].is_zero());
    }

    #[test]
    fn membership_rejects_non_commutators() {
        // a_1 x_1 alone has sum x_j f_j = x_1^2 != 0
        let mut w = WreathElement::zero(2);
        w.a[0] = Polynomial::variable(2, 0);
        assert!(!in_commutator_image(&w));
        // generators themselves are not in the commutator ideal
        assert!(!in_commutator_image(&embed_word(2, &one(), &[0])));
    }

    #[test]
    fn bracket_matches_left_normed_embedding() {
        // [[y3, y2], y1] computed by the wreath bracket equals the direct
        // embedding of the word [3, 2, 1]
        let y3 = embed_word(3, &one(), &[2]);
        let y2 = embed_word(3, &one(), &[1]);
        let y1 = embed_word(3, &one(), &[0]);
        let direct = embed_word(3, &one(), &[2, 1, 0]);
        assert_eq!(y3.bracket(&y2).bracket(&y1), direct);
    }

    #[test]
    fn jacobi_rewrite_of_an_out_of_order_word() {
        // [y3, y2, y1] = [y3, y1, y2] - [y2, y1, y3]
        let lhs = embed_word(3, &one(), &[2, 1, 0]);
        let a = embed_word(3, &one(), &[2, 0, 1]);
        let b = embed_word(3, &one(), &[1, 0, 2]);
        assert_eq!(lhs, a.sub(&b));
        // and lie_from_wreath returns exactly that normal form
        let e = lie_from_wreath(&lhs).unwrap();
        assert_eq!(e.to_string(), "-[x2,x1,x3] + [x3,x1,x2]");
    }

    #[test]
    fn metabelian_law_kills_double_commutators() {
        // [[y2,y1],[y3,y1]] = 0 in the wreath product
        let u = embed_word(3, &one(), &[1, 0]);
        let v = embed_word(3, &one(), &[2, 0]);
        assert!(u.bracket(&v).is_zero());
    }

    #[test]
    fn basis_slices_are_normal_forms_in_order() {
        let b = basis_slice_total(3, 2);
        let listed: Vec<String> = b.iter().map(|m| m.to_string()).collect();
        assert_eq!(
            listed,
            ["[x2,x1]", "[x3,x1]", "[x3,x2]"]
        );
        let b3 = basis_slice_total(2, 3);
        let listed3: Vec<String> = b3.iter().map(|m| m.to_string()).collect();
        assert_eq!(listed3, ["[x2,x1,x1]", "[x2,x1,x2]"]);
        // multidegree slice
        let bm = basis_slice_multi(3, &[1, 1, 1]);
        let listedm: Vec<String> = bm.iter().map(|m| m.to_string()).collect();
        assert_eq!(listedm, ["[x2,x1,x3]", "[x3,x1,x2]"]);
    }

    #[test]
    fn round_trip_through_wreath_coordinates() {
        let m1 = LieMonomial::new(3, 2, 0, vec![1, 2]).unwrap();
        let m2 = LieMonomial::new(3, 1, 0, vec![0]).unwrap();
        let e = LieElement::from_terms(3, [(m1, rat_of(2, 3)), (m2, rat(-1))]);
        let mut with_linear = e.clone();
        with_linear.linear[2] = rat(5);
        let back = lie_from_wreath(&embed(&with_linear)).unwrap();
        assert_eq!(back, with_linear);
    }

    #[test]
    fn lie_from_wreath_rejects_outsiders() {
        let mut w = WreathElement::zero(2);
        w.a[0] = Polynomial::variable(2, 1);
        assert!(lie_from_wreath(&w).is_err());
    }

    #[test]
    fn json_round_trip_with_non_normal_word() {
        // 2[x4,x3,x1] stored as a raw word normalizes on load
        let v = serde_json::json!({
            "linear": ["0", "0", "0", "0"],
            "terms": [{"coeff": "2", "word": [4, 3, 1]}]
        });
        let e = LieElement::from_json(&v, 4).unwrap();
        // [y4,y3,y1] = [y4,y1,y3] - [y3,y1,y4]
        let want = lie_from_words(
            4,
            &[(rat(2), vec![4, 1, 3]), (rat(-2), vec![3, 1, 4])],
        )
        .unwrap();
        assert_eq!(e, want);
        let back = LieElement::from_json(&e.to_json(), 4).unwrap();
        assert_eq!(back, e);
    }

    fn arb_word(arity: usize) -> impl Strategy<Value = Vec<usize>> {
        proptest::collection::vec(0..arity, 1..=4)
    }

    proptest! {
        #[test]
        fn bracket_is_bilinear_and_antisymmetric(
            w1 in arb_word(3), w2 in arb_word(3),
            c in -3i64..=3,
        ) {
            let u = embed_word(3, &one(), &w1);
            let v = embed_word(3, &one(), &w2);
            prop_assert_eq!(u.bracket(&v), v.bracket(&u).scale(&rat(-1)));
            let cu = u.scale(&rat(c));
            prop_assert_eq!(cu.bracket(&v), u.bracket(&v).scale(&rat(c)));
            prop_assert!(u.bracket(&u).is_zero());
        }

        #[test]
        fn jacobi_identity_on_embedded_words(
            w1 in arb_word(3), w2 in arb_word(3), w3 in arb_word(3),
        ) {
            let u = embed_word(3, &one(), &w1);
            let v = embed_word(3, &one(), &w2);
            let t = embed_word(3, &one(), &w3);
            let total = u.bracket(&v).bracket(&t)
                .add(&v.bracket(&t).bracket(&u))
                .add(&t.bracket(&u).bracket(&v));
            prop_assert!(total.is_zero());
        }

        #[test]
        fn metabelian_law_on_products(
            w1 in arb_word(4), w2 in arb_word(4), w3 in arb_word(4), w4 in arb_word(4),
        ) {
            let c1 = embed_word(4, &one(), &w1).bracket(&embed_word(4, &one(), &w2));
            let c2 = embed_word(4, &one(), &w3).bracket(&embed_word(4, &one(), &w4));
            prop_assert!(c1.bracket(&c2).is_zero());
        }

        #[test]
        fn membership_is_closed_under_action_and_sums(
            w1 in arb_word(3), w2 in arb_word(3),
            exps in proptest::collection::vec(0u32..2, 3),
        ) {
            let u = embed_word(3, &one(), &[&w1[..], &[0]].concat());
            // any word of length >= 2 embeds into the commutator image
            let c1 = {
                let mut w = w1.clone();
                w.push(1);
                embed_word(3, &one(), &w)
            };
            let c2 = {
                let mut w = w2.clone();
                w.push(2);
                embed_word(3, &one(), &w)
            };
            prop_assert!(in_commutator_image(&c1));
            prop_assert!(in_commutator_image(&c2));
            prop_assert!(in_commutator_image(&c1.add(&c2)));
            let p = Polynomial::monomial(Monomial::from_exps(exps), rat(3));
            prop_assert!(in_commutator_image(&c1.module_action(&p)));
            let _ = u;
        }

        #[test]
        fn wreath_round_trip(
            words in proptest::collection::vec((arb_word(3), -3i64..=3), 1..=3),
        ) {
            let mut e = LieElement::zero(3);
            for (w, c) in &words {
                if *c == 0 { continue; }
                let term = lie_from_wreath(&embed_word(3, &rat(*c), &[&w[..], &[0, 1]].concat())).unwrap();
                e = e.add(&term);
            }
            let back = lie_from_wreath(&embed(&e)).unwrap();
            prop_assert_eq!(back, e);
        }
    }
}
