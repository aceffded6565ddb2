//! Kernel slices of a Weitzenbock derivation and generator discovery.
//!
//! The kernel is computed degree by degree as an exact nullspace, split
//! into bidegree blocks so every solve stays small. On the polynomial side
//! this yields generators of the algebra of constants; on the Lie side it
//! yields generating sets of the commutator constants as a module over the
//! polynomial constants, together with module relations. The module work
//! happens in flattened wreath coordinates, where the action of the
//! polynomial constants is plain multiplication.

use std::collections::BTreeMap;

use num::{BigInt, Integer, One, Signed, Zero};
use rayon::prelude::*;

use crate::linalg::{self, RowSpan};
use crate::metabelian::{basis_slice_total, embed, embed_word, LieElement, LieMonomial, WreathElement};
use crate::monomial::Monomial;
use crate::polynomial::Polynomial;
use crate::rational::{rat, Rational};
use crate::weitzenbock::{Bidegree, Derivation};
use crate::{Error, Space};

/// All monomials of the given total degree, in increasing monomial order.
pub fn monomials_of_degree(arity: usize, degree: u32) -> Vec<Monomial> {
    fn rec(exps: &mut [u32], pos: usize, left: u32, out: &mut Vec<Monomial>) {
        if pos + 1 == exps.len() {
            exps[pos] = left;
            out.push(Monomial::from_exps(exps.to_vec()));
            exps[pos] = 0;
            return;
        }
        for e in 0..=left {
            exps[pos] = e;
            rec(exps, pos + 1, left - e, out);
        }
        exps[pos] = 0;
    }
    assert!(arity > 0, "rank must be positive");
    let mut out = Vec::new();
    rec(&mut vec![0u32; arity], 0, degree, &mut out);
    out.sort();
    out
}

fn word0(m: &LieMonomial) -> Vec<usize> {
    let (j1, j2) = m.head();
    let mut w = vec![j1, j2];
    w.extend_from_slice(m.tail());
    w
}

/// Flattened wreath coordinates of a Lie element with zero linear part.
fn flat_of_lie(e: &LieElement) -> BTreeMap<(usize, Monomial), Rational> {
    embed(e).flat_coords()
}

type FlatKey = (usize, Monomial);

/// Assembles sparse coordinate maps into a dense matrix whose columns are
/// the maps, rows the union of their keys in increasing order.
fn dense_columns(maps: &[BTreeMap<FlatKey, Rational>]) -> (Vec<Vec<Rational>>, usize) {
    let mut row_index: BTreeMap<&FlatKey, usize> = BTreeMap::new();
    for m in maps {
        for k in m.keys() {
            let next = row_index.len();
            row_index.entry(k).or_insert(next);
        }
    }
    let mut matrix = vec![vec![Rational::zero(); maps.len()]; row_index.len()];
    for (col, m) in maps.iter().enumerate() {
        for (k, c) in m {
            matrix[row_index[k]][col] = c.clone();
        }
    }
    (matrix, maps.len())
}

/// Kernel of the derivation on the homogeneous polynomials of the given
/// degree, split into bidegree blocks; empty blocks are dropped.
pub fn poly_kernel_blocks(deriv: &Derivation, degree: u32) -> BTreeMap<Bidegree, Vec<Polynomial>> {
    let d = deriv.arity();
    let mut blocks: BTreeMap<Bidegree, Vec<Monomial>> = BTreeMap::new();
    for m in monomials_of_degree(d, degree) {
        blocks.entry(deriv.monomial_bidegree(&m)).or_default().push(m);
    }
    let solved: Vec<(Bidegree, Vec<Polynomial>)> = blocks
        .into_iter()
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|(bd, mons)| (bd, poly_block_kernel(deriv, &mons)))
        .collect();
    solved.into_iter().filter(|(_, v)| !v.is_empty()).collect()
}

fn poly_block_kernel(deriv: &Derivation, mons: &[Monomial]) -> Vec<Polynomial> {
    let arity = deriv.arity();
    let images: Vec<Polynomial> = mons
        .iter()
        .map(|m| deriv.apply_poly(&Polynomial::monomial(m.clone(), Rational::one())))
        .collect();
    let mut row_index: BTreeMap<&Monomial, usize> = BTreeMap::new();
    for im in &images {
        for (m, _) in im.terms() {
            let next = row_index.len();
            row_index.entry(m).or_insert(next);
        }
    }
    let mut matrix = vec![vec![Rational::zero(); mons.len()]; row_index.len()];
    for (col, im) in images.iter().enumerate() {
        for (m, c) in im.terms() {
            matrix[row_index[m]][col] = c.clone();
        }
    }
    linalg::nullspace(&matrix, mons.len())
        .into_iter()
        .map(|v| Polynomial::from_terms(arity, mons.iter().cloned().zip(v)))
        .collect()
}

/// Kernel of the derivation on the degree-`n` slice of the commutator
/// ideal, split into bidegree blocks; empty blocks are dropped.
pub fn commutator_kernel_blocks(
    deriv: &Derivation,
    degree: u32,
) -> BTreeMap<Bidegree, Vec<LieElement>> {
    let d = deriv.arity();
    if degree < 2 {
        return BTreeMap::new();
    }
    let mut blocks: BTreeMap<Bidegree, Vec<LieMonomial>> = BTreeMap::new();
    for m in basis_slice_total(d, degree) {
        blocks.entry(deriv.lie_bidegree(&m)).or_default().push(m);
    }
    let solved: Vec<(Bidegree, Vec<LieElement>)> = blocks
        .into_iter()
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|(bd, mons)| (bd, lie_block_kernel(deriv, &mons)))
        .collect();
    solved.into_iter().filter(|(_, v)| !v.is_empty()).collect()
}

fn lie_block_kernel(deriv: &Derivation, mons: &[LieMonomial]) -> Vec<LieElement> {
    let arity = deriv.arity();
    let images: Vec<BTreeMap<FlatKey, Rational>> = mons
        .iter()
        .map(|m| {
            let w = embed_word(arity, &Rational::one(), &word0(m));
            deriv.apply_wreath(&w).flat_coords()
        })
        .collect();
    let (matrix, cols) = dense_columns(&images);
    linalg::nullspace(&matrix, cols)
        .into_iter()
        .map(|v| LieElement::from_terms(arity, mons.iter().cloned().zip(v)))
        .collect()
}

/// Kernel on the whole algebra: the fixed generators in degree 1, the
/// commutator kernel in degrees at least 2.
pub fn whole_kernel_blocks(deriv: &Derivation, degree: u32) -> BTreeMap<Bidegree, Vec<LieElement>> {
    match degree {
        0 => BTreeMap::new(),
        1 => linear_kernel_blocks(deriv),
        n => commutator_kernel_blocks(deriv, n),
    }
}

fn linear_kernel_blocks(deriv: &Derivation) -> BTreeMap<Bidegree, Vec<LieElement>> {
    let d = deriv.arity();
    let mut blocks: BTreeMap<Bidegree, Vec<usize>> = BTreeMap::new();
    for j in 0..d {
        blocks.entry(deriv.bidegree(j)).or_default().push(j);
    }
    let mut out = BTreeMap::new();
    for (bd, vars) in blocks {
        let mut matrix = vec![vec![Rational::zero(); vars.len()]; d];
        for (col, &j) in vars.iter().enumerate() {
            for (m, c) in deriv.apply_var(j).terms() {
                let i = (0..d).find(|&i| m.exp(i) == 1).expect("linear image");
                matrix[i][col] = c.clone();
            }
        }
        let kernel: Vec<LieElement> = linalg::nullspace(&matrix, vars.len())
            .into_iter()
            .map(|v| {
                let mut e = LieElement::zero(d);
                for (&j, c) in vars.iter().zip(v) {
                    e = e.add(&LieElement::generator(d, j).scale(&c));
                }
                e
            })
            .collect();
        if !kernel.is_empty() {
            out.insert(bd, kernel);
        }
    }
    out
}

fn block_dims<T>(blocks: BTreeMap<Bidegree, Vec<T>>) -> BTreeMap<Bidegree, usize> {
    blocks.into_iter().map(|(bd, v)| (bd, v.len())).collect()
}

/// Kernel dimension of each bidegree block, per degree `0..=max_degree`.
pub fn kernel_bidegree_dimensions(
    deriv: &Derivation,
    space: Space,
    max_degree: u32,
) -> Vec<BTreeMap<Bidegree, usize>> {
    (0..=max_degree)
        .into_par_iter()
        .map(|n| match space {
            Space::Polynomial => block_dims(poly_kernel_blocks(deriv, n)),
            Space::Commutator => block_dims(commutator_kernel_blocks(deriv, n)),
            Space::WholeLie => block_dims(whole_kernel_blocks(deriv, n)),
        })
        .collect()
}

/// Total kernel dimension per degree `0..=max_degree`.
pub fn kernel_dimensions(deriv: &Derivation, space: Space, max_degree: u32) -> Vec<usize> {
    kernel_bidegree_dimensions(deriv, space, max_degree)
        .into_iter()
        .map(|blocks| blocks.values().sum())
        .collect()
}

/// Rescales so the coefficients are coprime integers and the first one in
/// term order is positive. Returns the multiplier.
fn primitive_multiplier<'a, I: Iterator<Item = &'a Rational>>(coeffs: I) -> Rational {
    let mut den_lcm = BigInt::one();
    let mut num_gcd = BigInt::zero();
    let mut first_sign = 0i32;
    for c in coeffs {
        den_lcm = den_lcm.lcm(c.denom());
        num_gcd = num_gcd.gcd(c.numer());
        if first_sign == 0 && !c.is_zero() {
            first_sign = if c.numer().is_negative() { -1 } else { 1 };
        }
    }
    if num_gcd.is_zero() {
        return rat(1);
    }
    let mult = Rational::new(den_lcm, num_gcd);
    if first_sign < 0 { -mult } else { mult }
}

/// Primitive integer form of a polynomial: coprime integer coefficients,
/// first coefficient in term order positive.
pub fn primitive_poly(p: &Polynomial) -> Polynomial {
    p.scale(&primitive_multiplier(p.terms().map(|(_, c)| c)))
}

/// Primitive integer form of a commutator-ideal Lie element.
pub fn primitive_lie(e: &LieElement) -> LieElement {
    assert!(e.linear().iter().all(|c| c.is_zero()), "expected a commutator element");
    e.scale(&primitive_multiplier(e.terms().map(|(_, c)| c)))
}

/// Product of the invariant generators prescribed by a formal exponent
/// monomial.
fn eval_formal(invariants: &[Polynomial], mu: &Monomial) -> Polynomial {
    let d = invariants[0].arity();
    let mut p = Polynomial::one(d);
    for (i, &e) in mu.exps().iter().enumerate() {
        if e > 0 {
            p = p.mul(&invariants[i].pow(e));
        }
    }
    p
}

/// Minimal generators of the polynomial constants up to a degree bound:
/// each kernel slice is reduced against the products of the generators
/// already found, and whatever extends the span is a new generator.
pub fn invariant_generators(deriv: &Derivation, max_degree: u32) -> Vec<Polynomial> {
    let d = deriv.arity();
    let mut gens: Vec<Polynomial> = Vec::new();
    for n in 1..=max_degree {
        let mons = monomials_of_degree(d, n);
        let index: BTreeMap<&Monomial, usize> =
            mons.iter().enumerate().map(|(i, m)| (m, i)).collect();
        let coords = |p: &Polynomial| {
            let mut v = vec![Rational::zero(); mons.len()];
            for (m, c) in p.terms() {
                v[index[m]] = c.clone();
            }
            v
        };
        let mut span = RowSpan::new(mons.len());
        for p in degree_products(&gens, n) {
            span.insert(coords(&p));
        }
        for block in poly_kernel_blocks(deriv, n).values() {
            for p in block {
                if span.insert(coords(p)) {
                    gens.push(primitive_poly(p));
                }
            }
        }
    }
    gens
}

/// Checks that products of the given constants span the polynomial kernel
/// slice in every degree up to the bound.
pub fn generates_algebra(deriv: &Derivation, invariants: &[Polynomial], max_degree: u32) -> bool {
    let d = deriv.arity();
    for f in invariants {
        assert!(deriv.apply_poly(f).is_zero(), "generator is not a constant");
    }
    for n in 1..=max_degree {
        let mons = monomials_of_degree(d, n);
        let index: BTreeMap<&Monomial, usize> =
            mons.iter().enumerate().map(|(i, m)| (m, i)).collect();
        let mut span = RowSpan::new(mons.len());
        for p in degree_products(invariants, n) {
            let mut v = vec![Rational::zero(); mons.len()];
            for (m, c) in p.terms() {
                v[index[m]] = c.clone();
            }
            span.insert(v);
        }
        let dim: usize = poly_kernel_blocks(deriv, n).values().map(Vec::len).sum();
        if span.rank() != dim {
            return false;
        }
    }
    true
}

/// All products of the given polynomials with the given total degree.
fn degree_products(gens: &[Polynomial], target: u32) -> Vec<Polynomial> {
    fn rec(
        gens: &[Polynomial],
        degs: &[u32],
        i: usize,
        left: u32,
        acc: &Polynomial,
        out: &mut Vec<Polynomial>,
    ) {
        if left == 0 {
            out.push(acc.clone());
            return;
        }
        if i == gens.len() {
            return;
        }
        rec(gens, degs, i + 1, left, acc, out);
        if degs[i] > 0 {
            let mut used = degs[i];
            let mut cur = acc.mul(&gens[i]);
            while used <= left {
                rec(gens, degs, i + 1, left - used, &cur, out);
                used += degs[i];
                if used <= left {
                    cur = cur.mul(&gens[i]);
                }
            }
        }
    }
    let degs: Vec<u32> = gens.iter().map(|g| g.degree().unwrap_or(0)).collect();
    let mut out = Vec::new();
    if target > 0 {
        let arity = gens.first().map_or(1, |g| g.arity());
        rec(gens, &degs, 0, target, &Polynomial::one(arity), &mut out);
    }
    out
}

/// Tabulated generating sets of the polynomial constants for the partition
/// shapes with classically known answers. Fixed generators (zero parts)
/// split off as free variables; parts of size one give the cell heads and
/// the two-by-two determinants of pairs of cells; a single part of size
/// two or three has an explicit list. Anything else is an error.
pub fn builtin_invariants(partition: &[u32]) -> crate::Result<Vec<Polynomial>> {
    let deriv = Derivation::from_partition(partition)?;
    let d = deriv.arity();
    let has_zero = partition.iter().any(|&p| p == 0);
    let all_zero = partition.iter().all(|&p| p == 0);
    let gens: Vec<Polynomial> = if all_zero {
        (0..d).map(|j| Polynomial::variable(d, j)).collect()
    } else if has_zero {
        let nonzero: Vec<u32> = partition.iter().copied().filter(|&p| p > 0).collect();
        let base = builtin_invariants(&nonzero)?;
        let mut map: Vec<usize> = Vec::new();
        let mut fixed: Vec<usize> = Vec::new();
        let mut off = 0usize;
        for &p in partition {
            let w = p as usize + 1;
            if p == 0 {
                fixed.push(off);
            } else {
                map.extend(off..off + w);
            }
            off += w;
        }
        let images: Vec<Monomial> = map.iter().map(|&j| Monomial::var(d, j)).collect();
        let mut gens: Vec<Polynomial> =
            base.iter().map(|f| f.substitute_monomials(&images)).collect();
        gens.extend(fixed.into_iter().map(|j| Polynomial::variable(d, j)));
        gens
    } else if partition.iter().all(|&p| p == 1) {
        let heads: Vec<usize> = (0..partition.len()).map(|i| 2 * i).collect();
        let var = |j: usize| Polynomial::variable(d, j);
        let mut gens: Vec<Polynomial> = heads.iter().map(|&u| var(u)).collect();
        for i in 0..heads.len() {
            for j in (i + 1)..heads.len() {
                let (u, v) = (heads[i], heads[j]);
                gens.push(var(u).mul(&var(v + 1)).sub(&var(u + 1).mul(&var(v))));
            }
        }
        gens
    } else if partition == [2] {
        vec![
            Polynomial::variable(3, 0),
            crate::polynomial::parse_x_polynomial("x2^2 - 2*x1*x3", 3)?,
        ]
    } else if partition == [3] {
        vec![
            Polynomial::variable(4, 0),
            crate::polynomial::parse_x_polynomial("x2^2 - 2*x1*x3", 4)?,
            crate::polynomial::parse_x_polynomial("x2^3 - 3*x1*x2*x3 + 3*x1^2*x4", 4)?,
            crate::polynomial::parse_x_polynomial(
                "x2^2*x3^2 - 2*x2^3*x4 + 6*x1*x2*x3*x4 - 8/3*x1*x3^3 - 3*x1^2*x4^2",
                4,
            )?,
        ]
    } else {
        return Err(Error::NoBuiltinInvariants(partition.to_vec()));
    };
    for f in &gens {
        assert!(deriv.apply_poly(f).is_zero(), "tabulated generator is not a constant");
    }
    Ok(gens)
}

/// Lift of a polynomial on `d - 1` generators into the wreath product over
/// `d` generators: a monomial `m` of degree `n` maps to
/// `n a_d m - x_d sum_j m_j a_j (m / x_j)`.
pub fn pi_map(f: &Polynomial) -> WreathElement {
    let base = f.arity();
    let d = base + 1;
    let mut a: Vec<Polynomial> = (0..d).map(|_| Polynomial::zero(d)).collect();
    for (m, c) in f.terms() {
        let me = m.extend_arity(d);
        let n = m.degree();
        if n > 0 {
            a[d - 1].add_term(me.clone(), c * &rat(n as i64));
        }
        for j in 0..base {
            let e = m.exp(j);
            if e > 0 {
                let shifted = me.try_div(&Monomial::var(d, j)).expect("divisible").mul_var(d - 1, 1);
                a[j].add_term(shifted, -(c * &rat(e as i64)));
            }
        }
    }
    WreathElement::from_parts(d, a, vec![Rational::zero(); d])
}

/// The same lift landing back in the Lie algebra.
pub fn pi_lie(f: &Polynomial) -> crate::Result<LieElement> {
    crate::metabelian::lie_from_wreath(&pi_map(f))
}

/// Lifts module generators along one added fixed generator: the old
/// generators extended by one rank, plus the lift of each old polynomial
/// invariant.
pub fn lift_module_generators(
    base_invariants: &[Polynomial],
    base_module_gens: &[LieElement],
) -> crate::Result<Vec<LieElement>> {
    let base = base_invariants
        .first()
        .map(|f| f.arity())
        .or_else(|| base_module_gens.first().map(|e| e.arity()))
        .expect("empty lift input");
    assert!(base_invariants.iter().all(|f| f.arity() == base), "rank mismatch");
    assert!(base_module_gens.iter().all(|e| e.arity() == base), "rank mismatch");
    let d = base + 1;
    let mut out: Vec<LieElement> = base_module_gens.iter().map(|c| c.extend_arity(d)).collect();
    for f in base_invariants {
        out.push(pi_lie(f)?);
    }
    Ok(out)
}

/// A generator of the commutator constants over the polynomial constants.
#[derive(Clone, Debug)]
pub struct ModuleGenerator {
    pub element: LieElement,
    pub degree: u32,
    pub bidegree: Bidegree,
}

/// A module relation `sum_i coefficients[i](f_1, .., f_m) . c_i = 0`; the
/// coefficients are polynomials in one formal variable per polynomial
/// invariant.
#[derive(Clone, Debug)]
pub struct ModuleRelation {
    pub coefficients: Vec<Polynomial>,
    pub degree: u32,
    pub bidegree: Bidegree,
}

/// Generators and relations of the commutator constants as a module over
/// the polynomial constants, certified up to a degree bound.
#[derive(Clone, Debug)]
pub struct ModulePresentation {
    pub generators: Vec<ModuleGenerator>,
    pub relations: Vec<ModuleRelation>,
    pub certified_to: u32,
}

struct InvariantData {
    degrees: Vec<u32>,
    bidegrees: Vec<Bidegree>,
}

fn invariant_data(deriv: &Derivation, invariants: &[Polynomial]) -> InvariantData {
    assert!(!invariants.is_empty(), "need at least one invariant");
    let mut degrees = Vec::new();
    let mut bidegrees = Vec::new();
    for f in invariants {
        assert_eq!(f.arity(), deriv.arity(), "rank mismatch");
        assert!(deriv.apply_poly(f).is_zero(), "invariant is not a constant");
        let deg = f.degree().expect("nonzero invariant");
        assert!(deg > 0, "constants of degree zero are not generators");
        let (m0, _) = f.leading_term().expect("nonzero invariant");
        let bd = deriv.monomial_bidegree(m0);
        for (m, _) in f.terms() {
            assert_eq!(m.degree(), deg, "invariant is not homogeneous");
            assert_eq!(deriv.monomial_bidegree(m), bd, "invariant is not bihomogeneous");
        }
        degrees.push(deg);
        bidegrees.push(bd);
    }
    InvariantData { degrees, bidegrees }
}

/// Formal exponent monomials with the prescribed total degree and bidegree
/// after weighting by the invariant degrees.
fn formal_slice(data: &InvariantData, xdeg: u32, bid: Bidegree) -> Vec<Monomial> {
    fn rec(
        degs: &[u32],
        bids: &[Bidegree],
        i: usize,
        left: u32,
        la: u32,
        lb: u32,
        exps: &mut [u32],
        out: &mut Vec<Monomial>,
    ) {
        if i == degs.len() {
            if left == 0 && la == 0 && lb == 0 {
                out.push(Monomial::from_exps(exps.to_vec()));
            }
            return;
        }
        let max_e = left / degs[i];
        for e in 0..=max_e {
            let (a, b) = bids[i];
            if e * a > la || e * b > lb {
                break;
            }
            exps[i] = e;
            rec(degs, bids, i + 1, left - e * degs[i], la - e * a, lb - e * b, exps, out);
        }
        exps[i] = 0;
    }
    let m = data.degrees.len();
    let mut out = Vec::new();
    rec(
        &data.degrees,
        &data.bidegrees,
        0,
        xdeg,
        bid.0,
        bid.1,
        &mut vec![0u32; m],
        &mut out,
    );
    out.sort();
    out
}

fn gen_degree_bidegree(deriv: &Derivation, e: &LieElement) -> (u32, Bidegree) {
    assert!(
        e.linear().iter().all(|c| c.is_zero()),
        "module generators live in the commutator ideal"
    );
    let mut it = e.terms();
    let (m0, _) = it.next().expect("zero module generator");
    let degree = m0.degree();
    let bidegree = deriv.lie_bidegree(m0);
    for (m, _) in e.terms() {
        assert_eq!(m.degree(), degree, "generator is not homogeneous");
        assert_eq!(deriv.lie_bidegree(m), bidegree, "generator is not bihomogeneous");
    }
    (degree, bidegree)
}

/// Basis of the linear dependencies among the evaluations of the given
/// formal monomials at the invariants.
fn algebra_syzygies(invariants: &[Polynomial], mus: &[Monomial]) -> Vec<Vec<Rational>> {
    let evals: Vec<Polynomial> = mus.iter().map(|mu| eval_formal(invariants, mu)).collect();
    let mut row_index: BTreeMap<&Monomial, usize> = BTreeMap::new();
    for p in &evals {
        for (m, _) in p.terms() {
            let next = row_index.len();
            row_index.entry(m).or_insert(next);
        }
    }
    let mut matrix = vec![vec![Rational::zero(); mus.len()]; row_index.len()];
    for (col, p) in evals.iter().enumerate() {
        for (m, c) in p.terms() {
            matrix[row_index[m]][col] = c.clone();
        }
    }
    linalg::nullspace(&matrix, mus.len())
}

struct RelationRec {
    degree: u32,
    bidegree: Bidegree,
    entries: Vec<(usize, Monomial, Rational)>,
}

/// Discovers a generating set and generating relations of the commutator
/// constants over the given polynomial invariants, degree by degree up to
/// the bound. Relations induced by the relations of the invariants
/// themselves, and by lower-degree module relations, are filtered out.
pub fn module_generators(
    deriv: &Derivation,
    invariants: &[Polynomial],
    max_degree: u32,
) -> ModulePresentation {
    let data = invariant_data(deriv, invariants);
    let nf = invariants.len();
    let mut gens: Vec<ModuleGenerator> = Vec::new();
    let mut embedded: Vec<WreathElement> = Vec::new();
    let mut relations: Vec<RelationRec> = Vec::new();
    let mut syzygy_cache: BTreeMap<(u32, Bidegree), Vec<Monomial>> = BTreeMap::new();
    let mut syzygy_null: BTreeMap<(u32, Bidegree), Vec<Vec<Rational>>> = BTreeMap::new();

    for n in 2..=max_degree {
        for (bd, kernel) in commutator_kernel_blocks(deriv, n) {
            // candidate products of lower-degree generators
            let mut pairs: Vec<(usize, Monomial)> = Vec::new();
            for (i, g) in gens.iter().enumerate() {
                if g.degree >= n || g.bidegree.0 > bd.0 || g.bidegree.1 > bd.1 {
                    continue;
                }
                let slice = formal_slice(
                    &data,
                    n - g.degree,
                    (bd.0 - g.bidegree.0, bd.1 - g.bidegree.1),
                );
                pairs.extend(slice.into_iter().map(|mu| (i, mu)));
            }
            let mut cand_flat: Vec<BTreeMap<FlatKey, Rational>> = pairs
                .iter()
                .map(|(i, mu)| {
                    embedded[*i]
                        .module_action(&eval_formal(invariants, mu))
                        .flat_coords()
                })
                .collect();
            let kernel_flat: Vec<BTreeMap<FlatKey, Rational>> =
                kernel.iter().map(flat_of_lie).collect();

            // shared dense coordinates for the whole block
            let all: Vec<BTreeMap<FlatKey, Rational>> = cand_flat
                .iter()
                .cloned()
                .chain(kernel_flat.iter().cloned())
                .collect();
            let (matrix, _) = dense_columns(&all);
            let rows = matrix.len();
            let col_of = |r: usize, c: usize, m: &[Vec<Rational>]| m[r][c].clone();
            let n_cands = pairs.len();
            let mut span = RowSpan::new(rows);
            for c in 0..n_cands {
                span.insert((0..rows).map(|r| col_of(r, c, &matrix)).collect());
            }
            for (k, e) in kernel.iter().enumerate() {
                let c = n_cands + k;
                let v: Vec<Rational> = (0..rows).map(|r| col_of(r, c, &matrix)).collect();
                if span.insert(v) {
                    let element = primitive_lie(e);
                    gens.push(ModuleGenerator { element: element.clone(), degree: n, bidegree: bd });
                    embedded.push(embed(&element));
                    pairs.push((gens.len() - 1, Monomial::one(nf)));
                    cand_flat.push(flat_of_lie(&element));
                }
            }

            // relations among the candidate products at this slice
            if pairs.len() < 2 {
                continue;
            }
            let (cand_matrix, cols) = dense_columns(&cand_flat);
            let null = linalg::nullspace(&cand_matrix, cols);
            if null.is_empty() {
                continue;
            }
            let pair_index: BTreeMap<&(usize, Monomial), usize> =
                pairs.iter().enumerate().map(|(k, p)| (p, k)).collect();
            let mut trivial = RowSpan::new(pairs.len());
            for rel in &relations {
                if rel.bidegree.0 > bd.0 || rel.bidegree.1 > bd.1 || rel.degree > n {
                    continue;
                }
                let shifts = formal_slice(
                    &data,
                    n - rel.degree,
                    (bd.0 - rel.bidegree.0, bd.1 - rel.bidegree.1),
                );
                for nu in shifts {
                    let mut v = vec![Rational::zero(); pairs.len()];
                    for (i, mu, c) in &rel.entries {
                        let key = (*i, mu.mul(&nu));
                        v[pair_index[&key]] = c.clone();
                    }
                    trivial.insert(v);
                }
            }
            for (i, g) in gens.iter().enumerate() {
                if g.degree > n || g.bidegree.0 > bd.0 || g.bidegree.1 > bd.1 {
                    continue;
                }
                let key = (n - g.degree, (bd.0 - g.bidegree.0, bd.1 - g.bidegree.1));
                let mus = syzygy_cache
                    .entry(key)
                    .or_insert_with(|| formal_slice(&data, key.0, key.1))
                    .clone();
                let syz = syzygy_null
                    .entry(key)
                    .or_insert_with(|| algebra_syzygies(invariants, &mus))
                    .clone();
                for s in syz {
                    let mut v = vec![Rational::zero(); pairs.len()];
                    for (mu, c) in mus.iter().zip(s) {
                        let key = (i, mu.clone());
                        if let Some(&k) = pair_index.get(&key) {
                            v[k] = c;
                        } else {
                            assert!(c.is_zero(), "syzygy support outside the slice");
                        }
                    }
                    trivial.insert(v);
                }
            }
            for v in null {
                if trivial.insert(v.clone()) {
                    let mult = primitive_multiplier(v.iter());
                    let entries: Vec<(usize, Monomial, Rational)> = pairs
                        .iter()
                        .zip(&v)
                        .filter(|(_, c)| !c.is_zero())
                        .map(|((i, mu), c)| (*i, mu.clone(), c * &mult))
                        .collect();
                    relations.push(RelationRec { degree: n, bidegree: bd, entries });
                }
            }
        }
    }

    let generators = gens;
    let relations = relations
        .into_iter()
        .map(|rel| {
            let mut coefficients = vec![Polynomial::zero(nf); generators.len()];
            for (i, mu, c) in rel.entries {
                coefficients[i].add_term(mu, c);
            }
            ModuleRelation { coefficients, degree: rel.degree, bidegree: rel.bidegree }
        })
        .collect();
    ModulePresentation { generators, relations, certified_to: max_degree }
}

/// Checks a relation by substituting the invariants into its formal
/// coefficients and summing the module action against the generators.
pub fn verify_relation(
    invariants: &[Polynomial],
    gens: &[LieElement],
    relation: &ModuleRelation,
) -> bool {
    assert_eq!(relation.coefficients.len(), gens.len(), "coefficient count mismatch");
    let d = invariants.first().expect("need invariants").arity();
    let mut acc = WreathElement::zero(d);
    for (u, g) in relation.coefficients.iter().zip(gens) {
        assert_eq!(u.arity(), invariants.len(), "formal arity mismatch");
        let ux = u.substitute(invariants);
        if ux.is_zero() {
            continue;
        }
        acc = acc.add(&embed(g).module_action(&ux));
    }
    acc.is_zero()
}

/// Checks that the given constants generate the commutator constants as a
/// module over the invariants in every degree up to the bound.
pub fn generates_module(
    deriv: &Derivation,
    invariants: &[Polynomial],
    gens: &[LieElement],
    max_degree: u32,
) -> bool {
    let data = invariant_data(deriv, invariants);
    let meta: Vec<(u32, Bidegree, WreathElement)> = gens
        .iter()
        .map(|g| {
            assert!(deriv.apply_lie(g).is_zero(), "generator is not a constant");
            let (deg, bd) = gen_degree_bidegree(deriv, g);
            (deg, bd, embed(g))
        })
        .collect();
    for n in 2..=max_degree {
        for (bd, kernel) in commutator_kernel_blocks(deriv, n) {
            let mut cand_flat: Vec<BTreeMap<FlatKey, Rational>> = Vec::new();
            for (deg, gbd, w) in &meta {
                if *deg > n || gbd.0 > bd.0 || gbd.1 > bd.1 {
                    continue;
                }
                for mu in formal_slice(&data, n - deg, (bd.0 - gbd.0, bd.1 - gbd.1)) {
                    cand_flat.push(w.module_action(&eval_formal(invariants, &mu)).flat_coords());
                }
            }
            let all: Vec<BTreeMap<FlatKey, Rational>> = cand_flat
                .iter()
                .cloned()
                .chain(kernel.iter().map(flat_of_lie))
                .collect();
            let (matrix, _) = dense_columns(&all);
            let rows = matrix.len();
            let mut span = RowSpan::new(rows);
            for c in 0..cand_flat.len() {
                span.insert((0..rows).map(|r| matrix[r][c].clone()).collect());
            }
            for k in 0..kernel.len() {
                let c = cand_flat.len() + k;
                let v: Vec<Rational> = (0..rows).map(|r| matrix[r][c].clone()).collect();
                if !span.contains(&v) {
                    return false;
                }
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metabelian::lie_from_words;
    use crate::polynomial::parse_x_polynomial;
    use proptest::prelude::*;

    fn deriv(p: &[u32]) -> Derivation {
        Derivation::from_partition(p).unwrap()
    }

    #[test]
    fn monomial_slice_enumeration() {
        let mons = monomials_of_degree(3, 4);
        assert_eq!(mons.len(), 15);
        assert!(mons.windows(2).all(|w| w[0] < w[1]));
        assert!(mons.iter().all(|m| m.degree() == 4));
        assert_eq!(monomials_of_degree(2, 0), vec![Monomial::one(2)]);
    }

    #[test]
    fn polynomial_kernel_dimensions_single_cell() {
        let d = deriv(&[2]);
        // series 1/((1-z)(1-z^2)) after forgetting the bigrading
        assert_eq!(kernel_dimensions(&d, Space::Polynomial, 6), vec![1, 1, 2, 2, 3, 3, 4]);
    }

    #[test]
    fn commutator_kernel_dimensions_single_cell() {
        let d = deriv(&[2]);
        assert_eq!(
            kernel_dimensions(&d, Space::Commutator, 8),
            vec![0, 0, 1, 2, 3, 4, 5, 6, 7]
        );
        assert_eq!(
            kernel_dimensions(&d, Space::WholeLie, 8),
            vec![0, 1, 1, 2, 3, 4, 5, 6, 7]
        );
    }

    #[test]
    fn kernel_slices_are_constants() {
        let d = deriv(&[2, 1]);
        for n in 0..5 {
            for block in poly_kernel_blocks(&d, n).values() {
                for p in block {
                    assert!(d.apply_poly(p).is_zero());
                }
            }
            for block in commutator_kernel_blocks(&d, n).values() {
                for e in block {
                    assert!(d.apply_lie(e).is_zero());
                }
            }
        }
    }

    #[test]
    fn bidegree_blocks_of_the_block_of_four() {
        let d = deriv(&[3]);
        let dims = kernel_bidegree_dimensions(&d, Space::WholeLie, 2);
        assert_eq!(dims[1], BTreeMap::from([((3, 0), 1)]));
        assert_eq!(dims[2], BTreeMap::from([((3, 3), 1), ((5, 1), 1)]));
    }

    #[test]
    fn linear_slice_counts_cells() {
        for p in [vec![1, 1, 1], vec![2, 0], vec![4], vec![2, 2]] {
            let d = deriv(&p);
            let heads = whole_kernel_blocks(&d, 1).values().map(Vec::len).sum::<usize>();
            assert_eq!(heads, p.len());
        }
    }

    #[test]
    fn tabulated_invariants_match_known_lists() {
        let f = builtin_invariants(&[2]).unwrap();
        assert_eq!(f[0], Polynomial::variable(3, 0));
        assert_eq!(f[1], parse_x_polynomial("x2^2 - 2*x1*x3", 3).unwrap());

        let f = builtin_invariants(&[1, 1]).unwrap();
        assert_eq!(f.len(), 3);
        assert_eq!(f[2], parse_x_polynomial("x1*x4 - x2*x3", 4).unwrap());

        let f = builtin_invariants(&[1, 1, 1]).unwrap();
        assert_eq!(f.len(), 6);
        assert_eq!(f[3], parse_x_polynomial("x1*x4 - x2*x3", 6).unwrap());
        assert_eq!(f[4], parse_x_polynomial("x1*x6 - x2*x5", 6).unwrap());
        assert_eq!(f[5], parse_x_polynomial("x3*x6 - x4*x5", 6).unwrap());

        assert_eq!(builtin_invariants(&[3]).unwrap().len(), 4);
        assert_eq!(builtin_invariants(&[0, 0]).unwrap().len(), 2);

        let f = builtin_invariants(&[2, 0]).unwrap();
        assert_eq!(f.len(), 3);
        assert_eq!(f[1], parse_x_polynomial("x2^2 - 2*x1*x3", 4).unwrap());
        assert_eq!(f[2], Polynomial::variable(4, 3));

        assert!(matches!(
            builtin_invariants(&[2, 2]),
            Err(Error::NoBuiltinInvariants(_))
        ));
    }

    #[test]
    fn discovered_invariants_match_tabulated_spans() {
        for p in [vec![2], vec![3], vec![1, 1], vec![2, 0]] {
            let d = deriv(&p);
            let table = builtin_invariants(&p).unwrap();
            let found = invariant_generators(&d, 4);
            let max = table.iter().map(|f| f.degree().unwrap()).max().unwrap();
            assert!(max <= 4);
            let mut t_degs: Vec<u32> = table.iter().map(|f| f.degree().unwrap()).collect();
            let mut f_degs: Vec<u32> = found.iter().map(|f| f.degree().unwrap()).collect();
            t_degs.sort_unstable();
            f_degs.sort_unstable();
            assert_eq!(t_degs, f_degs, "partition {p:?}");
        }
    }

    #[test]
    fn algebra_generation_check_accepts_full_lists_and_rejects_truncated_ones() {
        for p in [vec![2], vec![3], vec![1, 1]] {
            let d = deriv(&p);
            let f = builtin_invariants(&p).unwrap();
            assert!(generates_algebra(&d, &f, 6), "partition {p:?}");
            assert!(!generates_algebra(&d, &f[..f.len() - 1], 6), "partition {p:?}");
        }
    }

    #[test]
    fn lift_of_a_single_variable_is_a_bracket() {
        let f = Polynomial::variable(3, 0);
        let lifted = pi_lie(&f).unwrap();
        let expected = lie_from_words(4, &[(rat(1), vec![4, 1])]).unwrap();
        assert_eq!(lifted, expected);
    }

    #[test]
    fn lift_of_the_quadratic_invariant() {
        let f = parse_x_polynomial("x2^2 - 2*x1*x3", 3).unwrap();
        let lifted = pi_lie(&f).unwrap();
        let expected = lie_from_words(
            4,
            &[
                (rat(2), vec![4, 2, 2]),
                (rat(-2), vec![4, 1, 3]),
                (rat(-2), vec![4, 3, 1]),
            ],
        )
        .unwrap();
        assert_eq!(lifted, expected);
    }

    #[test]
    fn lifted_generators_generate_after_adding_a_fixed_variable() {
        let base_f = builtin_invariants(&[2]).unwrap();
        let pres = module_generators(&deriv(&[2]), &base_f, 4);
        assert_eq!(pres.generators.len(), 2);
        let base_gens: Vec<LieElement> =
            pres.generators.iter().map(|g| g.element.clone()).collect();
        let lifted = lift_module_generators(&base_f, &base_gens).unwrap();
        assert_eq!(lifted.len(), 4);
        let d = deriv(&[2, 0]);
        for g in &lifted {
            assert!(d.apply_lie(g).is_zero());
        }
        let full_f = builtin_invariants(&[2, 0]).unwrap();
        assert!(generates_module(&d, &full_f, &lifted, 5));
    }

    #[test]
    fn free_module_of_the_block_of_three() {
        let d = deriv(&[2]);
        let f = builtin_invariants(&[2]).unwrap();
        let pres = module_generators(&d, &f, 7);
        assert_eq!(pres.generators.len(), 2);
        assert_eq!(pres.generators[0].degree, 2);
        assert_eq!(pres.generators[0].bidegree, (3, 1));
        assert_eq!(pres.generators[1].degree, 3);
        assert_eq!(pres.generators[1].bidegree, (4, 2));
        assert!(pres.relations.is_empty());
        assert_eq!(
            pres.generators[0].element,
            lie_from_words(3, &[(rat(1), vec![2, 1])]).unwrap()
        );
    }

    #[test]
    fn module_of_two_cells_of_size_one() {
        let d = deriv(&[1, 1]);
        let f = builtin_invariants(&[1, 1]).unwrap();
        let pres = module_generators(&d, &f, 5);
        assert_eq!(pres.generators.len(), 4);
        let bids: Vec<Bidegree> = pres.generators.iter().map(|g| g.bidegree).collect();
        assert_eq!(bids, vec![(1, 1), (1, 1), (1, 1), (2, 0)]);
        assert_eq!(pres.relations.len(), 1);
        let rel = &pres.relations[0];
        assert_eq!(rel.degree, 4);
        assert_eq!(rel.bidegree, (3, 1));
        let gens: Vec<LieElement> = pres.generators.iter().map(|g| g.element.clone()).collect();
        assert!(verify_relation(&f, &gens, rel));
    }

    #[test]
    fn verify_relation_rejects_a_perturbed_relation() {
        let f = builtin_invariants(&[1, 1]).unwrap();
        let c1 = lie_from_words(4, &[(rat(1), vec![3, 1])]).unwrap();
        let c2 = lie_from_words(4, &[(rat(1), vec![2, 1])]).unwrap();
        let c3 = lie_from_words(4, &[(rat(1), vec![4, 3])]).unwrap();
        let c4 = lie_from_words(4, &[(rat(1), vec![4, 1]), (rat(-1), vec![3, 2])]).unwrap();
        let gens = [c1, c2, c3, c4];
        // c1 f3 + c2 f2^2 + c3 f1^2 - c4 f1 f2 = 0
        let e = |i: usize| Monomial::var(3, i);
        let rel = ModuleRelation {
            coefficients: vec![
                Polynomial::monomial(e(2), rat(1)),
                Polynomial::monomial(e(1).pow(2), rat(1)),
                Polynomial::monomial(e(0).pow(2), rat(1)),
                Polynomial::monomial(e(0).mul(&e(1)), rat(-1)),
            ],
            degree: 4,
            bidegree: (3, 1),
        };
        assert!(verify_relation(&f, &gens, &rel));
        let mut bad = rel.clone();
        bad.coefficients[2] = Polynomial::monomial(e(0).pow(2), rat(2));
        assert!(!verify_relation(&f, &gens, &bad));
    }

    #[test]
    fn dropping_a_generator_breaks_generation() {
        let d = deriv(&[1, 1]);
        let f = builtin_invariants(&[1, 1]).unwrap();
        let pres = module_generators(&d, &f, 4);
        let gens: Vec<LieElement> = pres.generators.iter().map(|g| g.element.clone()).collect();
        assert!(generates_module(&d, &f, &gens, 5));
        assert!(!generates_module(&d, &f, &gens[..3], 5));
    }

    #[test]
    fn primitive_scaling_clears_denominators() {
        let p = parse_x_polynomial("1/2*x1 - 3/4*x2", 2).unwrap();
        let q = primitive_poly(&p);
        assert_eq!(q, parse_x_polynomial("2*x1 - 3*x2", 2).unwrap());
        let r = primitive_poly(&p.neg());
        assert_eq!(r, parse_x_polynomial("2*x1 - 3*x2", 2).unwrap().neg().neg());
    }

    fn small_poly(arity: usize) -> impl Strategy<Value = Polynomial> {
        let coeff = (-4i64..5).prop_map(rat);
        let mono = proptest::collection::vec(0u32..3, arity)
            .prop_map(move |e| Monomial::from_exps(e));
        proptest::collection::vec((mono, coeff), 0..5)
            .prop_map(move |terms| Polynomial::from_terms(arity, terms))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn lift_satisfies_the_leibniz_rule(u in small_poly(3), v in small_poly(3)) {
            let uv = u.mul(&v);
            let lhs = pi_map(&uv);
            let rhs = pi_map(&u)
                .module_action(&v.extend_arity(4))
                .add(&pi_map(&v).module_action(&u.extend_arity(4)));
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn lift_commutes_with_the_derivation(f in small_poly(3)) {
            let base = deriv(&[2]);
            let full = deriv(&[2, 0]);
            let lhs = pi_map(&base.apply_poly(&f));
            let rhs = full.apply_wreath(&pi_map(&f));
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn lift_lands_in_the_commutator_image(f in small_poly(3)) {
            prop_assert!(crate::metabelian::in_commutator_image(&pi_map(&f)));
            pi_lie(&f).unwrap();
        }
    }
}
