//! Character arithmetic: from a Hilbert series to the Hilbert series of a
//! Weitzenbock kernel, in closed form.
//!
//! The pipeline: substitute the cell weights into a Hilbert series in the
//! generators (variables become `t1^a t2^b z`), multiply by `(t1 - t2)`,
//! take the part with nonnegative exponents of an auxiliary variable `xi`
//! that tracks `t1/t2` imbalance, set `xi = 1` and divide by `t1`. The
//! result is the bigraded Hilbert series of the kernel: the coefficient of
//! `t1^a t2^b z^n` counts irreducible summands of highest weight `(a, b)`
//! in degree `n`, equivalently kernel elements of that bidegree.
//!
//! The nonnegative part is extracted exactly with Elliott reduction, which
//! rewrites `1/((1 - A)(1 - B))` for factors of opposite `xi` sign as
//! `(1/(1-A) + 1/(1-B) - 1) / (1 - AB)` until every surviving denominator
//! is sign-pure, and the sign-pure pieces are summed in factored form.
//! A step budget guards against pathological inputs; when it trips, a
//! denominator-guessing reconstruction from the truncated series is
//! available as a fallback.

use std::collections::BTreeMap;

use num::{One, Zero};

use crate::monomial::{Monomial, T1, T2, Z};
use crate::nice::NiceRational;
use crate::polynomial::Polynomial;
use crate::rational::{binomial, rat, Rational};
use crate::series::{TruncatedSeries, Truncation};
use crate::{Error, Space};

/// Default cap on Elliott reduction steps.
pub const DEFAULT_OMEGA_BUDGET: usize = 200_000;

/// Number of generators a partition acts on.
pub fn partition_arity(partition: &[u32]) -> crate::Result<usize> {
    if partition.is_empty() {
        return Err(Error::InvalidPartition("empty partition".into()));
    }
    Ok(partition.iter().map(|&p| p as usize + 1).sum())
}

/// Hilbert series of the polynomial algebra `K[x1..xd]`, one variable per
/// generator.
pub fn hilbert_polynomial_ring(d: usize) -> NiceRational {
    NiceRational::with_den(Polynomial::one(d), (0..d).map(|j| (Monomial::var(d, j), 1)))
        .expect("variables are nonconstant")
}

/// Hilbert series of the commutator ideal of the free metabelian Lie
/// algebra of rank `d`.
pub fn hilbert_commutator(d: usize) -> NiceRational {
    let den: Vec<(Monomial, u32)> = (0..d).map(|j| (Monomial::var(d, j), 1)).collect();
    let den_poly = NiceRational::with_den(Polynomial::one(d), den.clone())
        .expect("variables are nonconstant")
        .den_poly();
    let mut linear = Polynomial::zero(d);
    for j in 0..d {
        linear.add_term(Monomial::var(d, j), Rational::one());
    }
    let num = den_poly.add(&linear).sub(&Polynomial::one(d));
    NiceRational::with_den(num, den).expect("variables are nonconstant")
}

/// Hilbert series of the whole free metabelian Lie algebra of rank `d`.
pub fn hilbert_free_metabelian(d: usize) -> NiceRational {
    let mut linear = Polynomial::zero(d);
    for j in 0..d {
        linear.add_term(Monomial::var(d, j), Rational::one());
    }
    hilbert_commutator(d).add(&NiceRational::from_poly(linear))
}

pub fn hilbert_for_space(space: Space, d: usize) -> NiceRational {
    match space {
        Space::Polynomial => hilbert_polynomial_ring(d),
        Space::Commutator => hilbert_commutator(d),
        Space::WholeLie => hilbert_free_metabelian(d),
    }
}

/// Weight monomials of the generators: the `k`-th generator of a cell of
/// part `p` carries `t1^(p-k) t2^k z`.
pub fn cell_monomials(partition: &[u32]) -> Vec<Monomial> {
    let mut out = Vec::new();
    for &p in partition {
        for k in 0..=p {
            out.push(Monomial::from_exps(vec![p - k, k, 1]));
        }
    }
    out
}

/// Substitutes cell weights into a Hilbert series over the generators,
/// producing a series in `t1, t2, z`.
pub fn gl2_substitute(h: &NiceRational, partition: &[u32]) -> crate::Result<NiceRational> {
    let d = partition_arity(partition)?;
    if h.arity() != d {
        return Err(Error::InvalidPartition(format!(
            "partition needs {d} generators, series has {}",
            h.arity()
        )));
    }
    h.substitute_monomials(&cell_monomials(partition))
}

fn xi_exp(m: &Monomial) -> i64 {
    m.exp(T1) as i64 - m.exp(T2) as i64
}

/// Denominator as a multiset of `(monomial, xi-exponent)` factors.
type XiDen = BTreeMap<(Monomial, i64), u32>;

fn is_mixed(den: &XiDen) -> bool {
    den.keys().any(|(_, e)| *e > 0) && den.keys().any(|(_, e)| *e < 0)
}

fn add_count(map: &mut BTreeMap<XiDen, i64>, den: XiDen, c: i64) {
    let e = map.entry(den).or_insert(0);
    *e += c;
}

fn dec(den: &mut XiDen, key: &(Monomial, i64)) {
    match den.get_mut(key) {
        Some(k) if *k > 1 => *k -= 1,
        _ => {
            den.remove(key);
        }
    }
}

fn inc(den: &mut XiDen, key: (Monomial, i64)) {
    *den.entry(key).or_insert(0) += 1;
}

/// Picks the extreme positive and negative factors: largest `xi`-exponent
/// against smallest, ties broken by the monomial order.
fn pick_pair(den: &XiDen) -> ((Monomial, i64), (Monomial, i64)) {
    let mut pos: Option<&(Monomial, i64)> = None;
    let mut neg: Option<&(Monomial, i64)> = None;
    for key in den.keys() {
        let e = key.1;
        if e > 0 && pos.is_none_or(|p| e > p.1 || (e == p.1 && key.0 < p.0)) {
            pos = Some(key);
        }
        if e < 0 && neg.is_none_or(|n| e < n.1 || (e == n.1 && key.0 < n.0)) {
            neg = Some(key);
        }
    }
    (
        pos.expect("mixed denominator").clone(),
        neg.expect("mixed denominator").clone(),
    )
}

/// Rewrites a denominator multiset into sign-pure ones with signed counts.
fn elliott_reduce(start: XiDen, budget: usize) -> crate::Result<Vec<(XiDen, i64)>> {
    let mut mixed: BTreeMap<XiDen, i64> = BTreeMap::new();
    let mut done: BTreeMap<XiDen, i64> = BTreeMap::new();
    if is_mixed(&start) {
        mixed.insert(start, 1);
    } else {
        done.insert(start, 1);
    }
    let mut steps = 0usize;
    while let Some((den, count)) = mixed.pop_first() {
        if count == 0 {
            continue;
        }
        steps += 1;
        if steps > budget {
            return Err(Error::OmegaBudget(budget));
        }
        let (a, b) = pick_pair(&den);
        let ab = (a.0.mul(&b.0), a.1 + b.1);
        let mut base = den;
        dec(&mut base, &a);
        dec(&mut base, &b);
        let mut c1 = base.clone();
        inc(&mut c1, a);
        inc(&mut c1, ab.clone());
        let mut c2 = base.clone();
        inc(&mut c2, b);
        inc(&mut c2, ab.clone());
        let mut c3 = base;
        inc(&mut c3, ab);
        for (child, sign) in [(c1, 1), (c2, 1), (c3, -1)] {
            let target = if is_mixed(&child) { &mut mixed } else { &mut done };
            add_count(target, child, sign * count);
        }
    }
    Ok(done.into_iter().filter(|(_, c)| *c != 0).collect())
}

/// `sum_{k=0}^{upto-1}` of the `xi^k` coefficients of
/// `prod 1/(1 - m_i xi^{e_i})^{mult_i}` with all `e_i >= 1`; a polynomial
/// in `t1, t2, z`.
fn xi_slice_sum(factors: &[(Monomial, u32, u32)], upto: u32) -> Polynomial {
    let arity = 3;
    if upto == 0 {
        return Polynomial::zero(arity);
    }
    let mut dp: Vec<Polynomial> = (0..upto).map(|_| Polynomial::zero(arity)).collect();
    dp[0] = Polynomial::one(arity);
    for (m, e, mult) in factors {
        let mut next: Vec<Polynomial> = (0..upto).map(|_| Polynomial::zero(arity)).collect();
        for k in 0..upto {
            if dp[k as usize].is_zero() {
                continue;
            }
            let mut j = 0u32;
            while k + j * e < upto {
                let c = Rational::from_integer(binomial(
                    (j + mult - 1) as u64,
                    (mult - 1) as u64,
                ));
                let shifted = dp[k as usize].mul_monomial(&m.pow(j), &c);
                let slot = (k + j * e) as usize;
                next[slot] = next[slot].add(&shifted);
                j += 1;
            }
        }
        dp = next;
    }
    let mut total = Polynomial::zero(arity);
    for p in dp {
        total = total.add(&p);
    }
    total
}

/// Pieces of the nonnegative-`xi` part of `num / den` for a sign-pure
/// denominator, with `xi` already set to 1.
fn finalize_terminal(num: &Polynomial, den: &XiDen) -> crate::Result<Vec<NiceRational>> {
    let mut pos: Vec<(Monomial, u32, u32)> = Vec::new();
    let mut neg: Vec<(Monomial, u32, u32)> = Vec::new();
    let mut zero_den: BTreeMap<Monomial, u32> = BTreeMap::new();
    for ((m, e), &k) in den {
        match e.cmp(&0) {
            std::cmp::Ordering::Greater => pos.push((m.clone(), *e as u32, k)),
            std::cmp::Ordering::Less => neg.push((m.clone(), (-e) as u32, k)),
            std::cmp::Ordering::Equal => *zero_den.entry(m.clone()).or_insert(0) += k,
        }
    }
    assert!(
        pos.is_empty() || neg.is_empty(),
        "denominator is not sign-pure"
    );
    let mut pieces = Vec::new();
    if neg.is_empty() {
        // every denominator term has xi-degree >= 0: a numerator term of
        // xi-exponent xe keeps everything when xe >= 0, and otherwise
        // loses the slices of xi-degree < -xe
        let mut full: BTreeMap<Monomial, u32> = zero_den.clone();
        for (m, _, k) in &pos {
            *full.entry(m.clone()).or_insert(0) += k;
        }
        for (m0, c0) in num.terms() {
            let xe = xi_exp(m0);
            pieces.push(NiceRational::with_den(
                Polynomial::monomial(m0.clone(), c0.clone()),
                full.clone(),
            )?);
            if xe < 0 {
                let h = xi_slice_sum(&pos, (-xe) as u32);
                let corr = h.mul_monomial(m0, &-c0.clone());
                pieces.push(NiceRational::with_den(corr, zero_den.clone())?);
            }
        }
    } else {
        // every denominator term has xi-degree <= 0: only the slices of
        // xi-degree in 0..=xe survive, a finite sum
        for (m0, c0) in num.terms() {
            let xe = xi_exp(m0);
            if xe < 0 {
                continue;
            }
            let h = xi_slice_sum(&neg, xe as u32 + 1);
            pieces.push(NiceRational::with_den(
                h.mul_monomial(m0, c0),
                zero_den.clone(),
            )?);
        }
    }
    Ok(pieces)
}

/// The nonnegative-`xi` part of a series in `t1, t2, z`, where the
/// `xi`-exponent of a monomial is its `t1`-exponent minus its
/// `t2`-exponent, evaluated at `xi = 1`.
pub fn omega_nonneg(f: &NiceRational, budget: usize) -> crate::Result<NiceRational> {
    assert_eq!(f.arity(), 3, "weight series needs arity 3");
    let den: XiDen = f
        .den_factors()
        .map(|(m, k)| ((m.clone(), xi_exp(m)), k))
        .collect();
    let terminal = elliott_reduce(den, budget)?;
    let mut pieces = Vec::new();
    for (d, count) in terminal {
        for p in finalize_terminal(f.num(), &d)? {
            pieces.push(p.scale(&rat(count)));
        }
    }
    Ok(NiceRational::sum(3, pieces))
}

fn check_t_symmetric(h: &NiceRational) -> crate::Result<()> {
    let swap = [
        Monomial::var(3, T2),
        Monomial::var(3, T1),
        Monomial::var(3, Z),
    ];
    let swapped = h.substitute_monomials(&swap)?;
    if swapped.equals(h) {
        Ok(())
    } else {
        Err(Error::NotSymmetric)
    }
}

/// Closed-form multiplicity series of a `t1 <-> t2` symmetric Hilbert
/// series: `(1/t1) * omega_nonneg((t1 - t2) * h)`.
pub fn multiplicity_series_closed(h: &NiceRational, budget: usize) -> crate::Result<NiceRational> {
    assert_eq!(h.arity(), 3, "weight series needs arity 3");
    check_t_symmetric(h)?;
    let mut t1_minus_t2 = Polynomial::zero(3);
    t1_minus_t2.add_term(Monomial::var(3, T1), Rational::one());
    t1_minus_t2.add_term(Monomial::var(3, T2), -Rational::one());
    let om = omega_nonneg(&h.mul_poly(&t1_minus_t2), budget)?;
    Ok(om.divide_num_by_var(T1)?.normalize())
}

/// Truncated multiplicity series, extracted slice by slice with Schur
/// decompositions; an independent check on the closed form.
pub fn multiplicity_series_truncated(
    h: &NiceRational,
    order: u32,
) -> crate::Result<TruncatedSeries> {
    assert_eq!(h.arity(), 3, "weight series needs arity 3");
    let trunc = Truncation::Var { var: Z, order };
    let s = h.expand(trunc)?;
    let mut acc = Polynomial::zero(3);
    for n in 0..=order {
        let slice = s.var_slice(Z, n);
        for ((l1, l2), mult) in schur_decompose(&slice)? {
            acc.add_term(Monomial::from_exps(vec![l1, l2, n]), mult);
        }
    }
    Ok(TruncatedSeries::from_poly(&acc, trunc))
}

/// The character of the irreducible of highest weight `(l1, l2)`:
/// `sum_j t1^(l1-j) t2^(l2+j)` for `j` up to `l1 - l2`, as a polynomial in
/// the weight ring with no `z`.
pub fn schur_polynomial(l1: u32, l2: u32) -> Polynomial {
    assert!(l1 >= l2, "highest weight needs l1 >= l2");
    let mut p = Polynomial::zero(3);
    for j in 0..=(l1 - l2) {
        p.add_term(Monomial::from_exps(vec![l1 - j, l2 + j, 0]), Rational::one());
    }
    p
}

/// Writes a symmetric polynomial in `t1, t2` as a combination of
/// characters; the multiplicity of `(l1, l2)` is the coefficient of
/// `t1^l1 t2^l2` minus that of `t1^(l1+1) t2^(l2-1)`.
pub fn schur_decompose(p: &Polynomial) -> crate::Result<Vec<((u32, u32), Rational)>> {
    assert_eq!(p.arity(), 3, "weight polynomial needs arity 3");
    if p.swap_vars(T1, T2) != *p {
        return Err(Error::NotSymmetric);
    }
    let mut weights: std::collections::BTreeSet<(u32, u32)> = std::collections::BTreeSet::new();
    for (m, _) in p.terms() {
        assert_eq!(m.exp(Z), 0, "slice polynomial still has z");
        let (a, b) = (m.exp(T1), m.exp(T2));
        if a >= b {
            weights.insert((a, b));
        }
        // a zero coefficient at (a-1, b+1) still yields a multiplicity
        // through the subtracted position
        if a >= b + 2 {
            weights.insert((a - 1, b + 1));
        }
    }
    let mut out = Vec::new();
    for (a, b) in weights {
        let c = p.coeff(&Monomial::from_exps(vec![a, b, 0]));
        let mult = if b == 0 {
            c
        } else {
            c - p.coeff(&Monomial::from_exps(vec![a + 1, b - 1, 0]))
        };
        if !mult.is_zero() {
            out.push(((a, b), mult));
        }
    }
    Ok(out)
}

/// Bigraded kernel Hilbert series in closed form.
pub fn kernel_bigraded_closed(
    space: Space,
    partition: &[u32],
    budget: usize,
) -> crate::Result<NiceRational> {
    let d = partition_arity(partition)?;
    let h = gl2_substitute(&hilbert_for_space(space, d), partition)?;
    multiplicity_series_closed(&h, budget)
}

/// Bigraded kernel Hilbert series as a `z`-truncated series, computed
/// without Elliott reduction.
pub fn kernel_bigraded_truncated(
    space: Space,
    partition: &[u32],
    order: u32,
) -> crate::Result<TruncatedSeries> {
    let d = partition_arity(partition)?;
    let h = gl2_substitute(&hilbert_for_space(space, d), partition)?;
    multiplicity_series_truncated(&h, order)
}

/// Forgets the bigrading: `t1 = t2 = 1`, keeping `z` only.
pub fn graded_from_bigraded(m: &NiceRational) -> crate::Result<NiceRational> {
    m.set_var_to_one(T1)?
        .set_var_to_one(T2)?
        .project_to_vars(&[Z])
}

/// Forgets the bigrading of a truncated weight series: the dimensions per
/// `z`-degree, which must come out as nonnegative integers.
pub fn dimensions_from_weights(series: &TruncatedSeries) -> crate::Result<Vec<usize>> {
    use num::ToPrimitive;
    assert_eq!(series.arity(), 3, "weight series needs arity 3");
    let order = series.truncation().order();
    let mut out = vec![Rational::zero(); order as usize + 1];
    for (m, c) in series.terms() {
        out[m.exp(Z) as usize] += c.clone();
    }
    out.into_iter()
        .enumerate()
        .map(|(n, total)| {
            if !total.is_integer() {
                return Err(Error::NotDivisible(format!(
                    "non-integer dimension {total} in degree {n}"
                )));
            }
            total.to_integer().to_usize().ok_or_else(|| {
                Error::NotDivisible(format!("negative dimension {total} in degree {n}"))
            })
        })
        .collect()
}

/// Reconstructs a closed form from the truncated series by trying
/// candidate denominators: a candidate fits when the product of series and
/// denominator is a polynomial supported below `fit_order` and stays one
/// up to `confirm_order`.
pub fn reconstruct_closed_form(
    h: &NiceRational,
    candidates: &[BTreeMap<Monomial, u32>],
    fit_order: u32,
    confirm_order: u32,
) -> crate::Result<NiceRational> {
    assert!(fit_order < confirm_order, "confirmation needs extra orders");
    let series = multiplicity_series_truncated(h, confirm_order)?;
    for den in candidates {
        let den_poly = NiceRational::with_den(Polynomial::one(3), den.clone())?.den_poly();
        let prod = series.mul(&TruncatedSeries::from_poly(&den_poly, series.truncation()));
        let mut num = Polynomial::zero(3);
        let mut fits = true;
        for (m, c) in prod.terms() {
            if m.exp(Z) > fit_order {
                fits = false;
                break;
            }
            num.add_term(m.clone(), c.clone());
        }
        if fits {
            return Ok(NiceRational::with_den(num, den.clone())?.normalize());
        }
    }
    Err(Error::OmegaBudget(0))
}
