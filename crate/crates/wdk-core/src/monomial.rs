//! Monomials as dense exponent vectors with a fixed arity.
//!
//! The canonical order is graded: lower total degree first, ties broken by
//! comparing the exponent vector read from the last variable backwards, so
//! that `x1 < x2 < ... < xd` and, in degree two of three variables, the
//! listing is `x1^2, x1*x2, x2^2, x1*x3, x2*x3, x3^2`. Every deterministic
//! choice in the crate (term order, pivot order, output order) refers to
//! this order.

use std::cmp::Ordering;
use std::fmt;

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Monomial {
    exps: Vec<u32>,
}

impl Monomial {
    pub fn one(arity: usize) -> Self {
        Monomial {
            exps: vec![0; arity],
        }
    }

    pub fn var(arity: usize, idx: usize) -> Self {
        assert!(idx < arity, "variable index {idx} out of range for arity {arity}");
        let mut exps = vec![0; arity];
        exps[idx] = 1;
        Monomial { exps }
    }

    pub fn from_exps(exps: Vec<u32>) -> Self {
        Monomial { exps }
    }

    pub fn arity(&self) -> usize {
        self.exps.len()
    }

    pub fn exp(&self, idx: usize) -> u32 {
        self.exps[idx]
    }

    pub fn exps(&self) -> &[u32] {
        &self.exps
    }

    pub fn degree(&self) -> u32 {
        self.exps.iter().sum()
    }

    pub fn is_one(&self) -> bool {
        self.exps.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.arity(), other.arity(), "monomial arity mismatch");
        Monomial {
            exps: self
                .exps
                .iter()
                .zip(&other.exps)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn pow(&self, k: u32) -> Self {
        Monomial {
            exps: self.exps.iter().map(|e| e * k).collect(),
        }
    }

    /// Exact division; `None` if some exponent would go negative.
    pub fn try_div(&self, other: &Self) -> Option<Self> {
        assert_eq!(self.arity(), other.arity(), "monomial arity mismatch");
        let mut exps = Vec::with_capacity(self.exps.len());
        for (a, b) in self.exps.iter().zip(&other.exps) {
            if a < b {
                return None;
            }
            exps.push(a - b);
        }
        Some(Monomial { exps })
    }

    /// Multiplies variable `idx` in, `k` times.
    pub fn mul_var(&self, idx: usize, k: u32) -> Self {
        let mut exps = self.exps.clone();
        exps[idx] += k;
        Monomial { exps }
    }

    /// Image under a monomial substitution `x_i -> images[i]`.
    pub fn substitute(&self, images: &[Monomial]) -> Monomial {
        assert_eq!(self.arity(), images.len(), "substitution arity mismatch");
        let out_arity = images
            .first()
            .map(|m| m.arity())
            .unwrap_or(0);
        let mut acc = Monomial::one(out_arity);
        for (i, &e) in self.exps.iter().enumerate() {
            if e > 0 {
                acc = acc.mul(&images[i].pow(e));
            }
        }
        acc
    }

    /// Pads the exponent vector with zeros up to a larger arity.
    pub fn extend_arity(&self, arity: usize) -> Monomial {
        assert!(arity >= self.arity());
        let mut exps = self.exps.clone();
        exps.resize(arity, 0);
        Monomial { exps }
    }

    /// Renders with the given variable names, e.g. `x1^2*x3`; the empty
    /// monomial renders as `1`.
    pub fn render(&self, names: &[&str]) -> String {
        assert_eq!(names.len(), self.arity());
        let parts: Vec<String> = self
            .exps
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(i, &e)| {
                if e == 1 {
                    names[i].to_string()
                } else {
                    format!("{}^{}", names[i], e)
                }
            })
            .collect();
        if parts.is_empty() {
            "1".to_string()
        } else {
            parts.join("*")
        }
    }
}

/// Default variable names `x1..xd`.
pub fn x_names(arity: usize) -> Vec<String> {
    (1..=arity).map(|i| format!("x{i}")).collect()
}

/// Variable names for the weight ring: `t1, t2, z`.
pub const SERIES_NAMES: [&str; 3] = ["t1", "t2", "z"];

/// Index of `t1`, `t2` and `z` in the weight ring.
pub const T1: usize = 0;
pub const T2: usize = 1;
pub const Z: usize = 2;

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        assert_eq!(self.arity(), other.arity(), "monomial arity mismatch");
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.exps.iter().rev().cmp(other.exps.iter().rev()))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = x_names(self.arity());
        let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
        write!(f, "{}", self.render(&refs))
    }
}
