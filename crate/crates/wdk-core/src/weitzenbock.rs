//! Weitzenbock derivations: nilpotent linear derivations acting on the
//! polynomial algebra, the free metabelian Lie algebra and its wreath
//! envelope.
//!
//! A derivation is described by a partition `(p_1, .., p_s)` of `d - s`;
//! the generators split into Jordan cells of sizes `p_i + 1`, the first
//! generator of each cell is killed and every other one maps to its left
//! neighbour. Cells of size one (parts equal to zero) contribute
//! generators in the kernel.
//!
//! The same data grades everything by a bidegree: the generator `k` steps
//! into a cell of part `p` carries bidegree `(p - k, k)`, and the
//! derivation moves bidegrees by `(+1, -1)`. Kernels split along this
//! grading, which is what makes character arithmetic on two variables
//! work downstream.

use num::{One, Zero};

use crate::metabelian::{embed, lie_from_wreath, LieElement, LieMonomial, WreathElement};
use crate::monomial::Monomial;
use crate::polynomial::Polynomial;
use crate::rational::{rat, Rational};
use crate::Error;

/// Bidegree `(left, right)` induced by a partition; the derivation sends
/// `(a, b)` to `(a + 1, b - 1)`.
pub type Bidegree = (u32, u32);

/// A Weitzenbock derivation in Jordan normal form over `d` generators.
#[derive(Clone, Debug)]
pub struct Derivation {
    arity: usize,
    partition: Vec<u32>,
    /// matrix[i][j] = coefficient of generator i in the image of generator j
    matrix: Vec<Vec<Rational>>,
    bidegrees: Vec<Bidegree>,
}

impl Derivation {
    /// Builds the derivation of the partition `(p_1, .., p_s)` acting on
    /// `sum (p_i + 1)` generators. Parts may be zero (fixed generators);
    /// the partition must be non-empty.
    pub fn from_partition(partition: &[u32]) -> crate::Result<Self> {
        if partition.is_empty() {
            return Err(Error::InvalidPartition("empty partition".into()));
        }
        let arity: usize = partition.iter().map(|&p| p as usize + 1).sum();
        let mut matrix = vec![vec![Rational::zero(); arity]; arity];
        let mut bidegrees = Vec::with_capacity(arity);
        let mut base = 0usize;
        for &p in partition {
            for k in 0..=p {
                bidegrees.push((p - k, k));
                if k > 0 {
                    let j = base + k as usize;
                    matrix[j - 1][j] = Rational::one();
                }
            }
            base += p as usize + 1;
        }
        Ok(Derivation {
            arity,
            partition: partition.to_vec(),
            matrix,
            bidegrees,
        })
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn partition(&self) -> &[u32] {
        &self.partition
    }

    /// Image of the generator `j` as a polynomial.
    pub fn apply_var(&self, j: usize) -> Polynomial {
        let mut p = Polynomial::zero(self.arity);
        for i in 0..self.arity {
            if !self.matrix[i][j].is_zero() {
                p.add_term(Monomial::var(self.arity, i), self.matrix[i][j].clone());
            }
        }
        p
    }

    /// Extends the derivation to the polynomial algebra by the Leibniz
    /// rule.
    pub fn apply_poly(&self, p: &Polynomial) -> Polynomial {
        assert_eq!(p.arity(), self.arity, "rank mismatch");
        let mut out = Polynomial::zero(self.arity);
        for (m, c) in p.terms() {
            for j in 0..self.arity {
                let e = m.exp(j);
                if e == 0 {
                    continue;
                }
                for i in 0..self.arity {
                    let a = &self.matrix[i][j];
                    if a.is_zero() {
                        continue;
                    }
                    // c * e * a * (m / x_j) * x_i
                    let reduced = m
                        .try_div(&Monomial::var(self.arity, j))
                        .expect("exponent checked above")
                        .mul_var(i, 1);
                    out.add_term(reduced, c * rat(e as i64) * a);
                }
            }
        }
        out
    }

    /// Action on the wreath product: coefficientwise on the `a`-polynomials
    /// plus the linear action on the `a` and `b` markers themselves.
    pub fn apply_wreath(&self, w: &WreathElement) -> WreathElement {
        assert_eq!(w.arity(), self.arity, "rank mismatch");
        let mut a: Vec<Polynomial> = w.a().iter().map(|f| self.apply_poly(f)).collect();
        let mut b = vec![Rational::zero(); self.arity];
        for j in 0..self.arity {
            for i in 0..self.arity {
                let c = &self.matrix[i][j];
                if c.is_zero() {
                    continue;
                }
                a[i] = a[i].add(&w.a()[j].scale(c));
                b[i] += &w.b()[j] * c;
            }
        }
        WreathElement::from_parts(self.arity, a, b)
    }

    /// Action on a Lie element, through the wreath embedding and back.
    pub fn apply_lie(&self, e: &LieElement) -> LieElement {
        lie_from_wreath(&self.apply_wreath(&embed(e)))
            .expect("derivation preserves the Lie subalgebra")
    }

    /// Bidegree of a generator.
    pub fn bidegree(&self, j: usize) -> Bidegree {
        self.bidegrees[j]
    }

    pub fn bidegrees(&self) -> &[Bidegree] {
        &self.bidegrees
    }

    pub fn monomial_bidegree(&self, m: &Monomial) -> Bidegree {
        let mut a = 0u32;
        let mut b = 0u32;
        for j in 0..self.arity {
            let e = m.exp(j);
            a += e * self.bidegrees[j].0;
            b += e * self.bidegrees[j].1;
        }
        (a, b)
    }

    pub fn lie_bidegree(&self, m: &LieMonomial) -> Bidegree {
        let mut a = 0u32;
        let mut b = 0u32;
        for j in m.word() {
            a += self.bidegrees[j - 1].0;
            b += self.bidegrees[j - 1].1;
        }
        (a, b)
    }

    /// `exp(t delta)` applied to a polynomial, a finite sum because the
    /// derivation is nilpotent. `t` is a rational parameter.
    pub fn exp_poly(&self, p: &Polynomial, t: &Rational) -> Polynomial {
        let mut out = Polynomial::zero(self.arity);
        let mut term = p.clone();
        let mut k = 0i64;
        let mut factor = Rational::one();
        loop {
            out = out.add(&term.scale(&factor));
            if term.is_zero() {
                return out;
            }
            term = self.apply_poly(&term);
            k += 1;
            factor = factor * t / rat(k);
            if k > 4 * self.arity as i64 * (p.degree().unwrap_or(0) as i64 + 1) {
                unreachable!("nilpotency bound exceeded");
            }
        }
    }
}
