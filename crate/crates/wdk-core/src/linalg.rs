//! Exact linear algebra over the rationals.
//!
//! Forward elimination is fraction-free (Bareiss) on integer matrices
//! obtained by clearing row denominators, with deterministic pivoting: the
//! leftmost unfinished column, then the first row with a nonzero entry.
//! Nullspace bases come out in reduced-echelon shape: each basis vector has
//! a 1 at its own free column and 0 at every other free column.

use num::{BigInt, One, Zero};

use crate::rational::Rational;

/// Row-major dense matrix of rationals.
pub type Matrix = Vec<Vec<Rational>>;

struct Echelon {
    /// Integer rows after forward elimination, in pivot order.
    rows: Vec<Vec<BigInt>>,
    /// Pivot column of each eliminated row.
    pivot_cols: Vec<usize>,
}

fn clear_denominators(a: &[Vec<Rational>]) -> Vec<Vec<BigInt>> {
    a.iter()
        .map(|row| {
            let mut lcm = BigInt::one();
            for x in row {
                lcm = num::integer::lcm(lcm, x.denom().clone());
            }
            row.iter().map(|x| x.numer() * (&lcm / x.denom())).collect()
        })
        .collect()
}

fn forward_eliminate(mut rows: Vec<Vec<BigInt>>, cols: usize) -> Echelon {
    let mut pivot_cols = Vec::new();
    let mut r = 0usize;
    let mut prev = BigInt::one();
    for c in 0..cols {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let (head, tail) = rows.split_at_mut(r + 1);
        let piv_row = &head[r];
        let piv = piv_row[c].clone();
        for row in tail.iter_mut() {
            if row[c].is_zero() {
                // still rescale for the Bareiss invariant
                for j in 0..cols {
                    let v = &row[j] * &piv;
                    row[j] = &v / &prev;
                }
            } else {
                let factor = row[c].clone();
                for j in 0..cols {
                    let v = &row[j] * &piv - &factor * &piv_row[j];
                    row[j] = &v / &prev;
                }
            }
        }
        pivot_cols.push(c);
        prev = piv;
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    rows.truncate(r);
    Echelon { rows, pivot_cols }
}

fn echelon(a: &[Vec<Rational>], cols: usize) -> Echelon {
    debug_assert!(a.iter().all(|r| r.len() == cols));
    forward_eliminate(clear_denominators(a), cols)
}

/// Rank of the matrix.
pub fn rank(a: &[Vec<Rational>], cols: usize) -> usize {
    echelon(a, cols).pivot_cols.len()
}

/// Reduced-echelon nullspace basis of `a` (vectors of length `cols`),
/// ordered by free column.
pub fn nullspace(a: &[Vec<Rational>], cols: usize) -> Vec<Vec<Rational>> {
    let ech = echelon(a, cols);
    let pivot_set: Vec<bool> = {
        let mut v = vec![false; cols];
        for &c in &ech.pivot_cols {
            v[c] = true;
        }
        v
    };
    let mut basis = Vec::new();
    for free in 0..cols {
        if pivot_set[free] {
            continue;
        }
        let mut v = vec![Rational::zero(); cols];
        v[free] = Rational::one();
        for (ri, &pc) in ech.pivot_cols.iter().enumerate().rev() {
            let row = &ech.rows[ri];
            let mut acc = Rational::zero();
            for j in (pc + 1)..cols {
                if !row[j].is_zero() && !v[j].is_zero() {
                    acc += Rational::from_integer(row[j].clone()) * &v[j];
                }
            }
            if !acc.is_zero() {
                v[pc] = -acc / Rational::from_integer(row[pc].clone());
            }
        }
        basis.push(v);
    }
    basis
}

/// Solves `a x = b` exactly; `None` when inconsistent. Free variables are
/// set to zero, which makes the answer deterministic.
pub fn solve(a: &[Vec<Rational>], b: &[Rational], cols: usize) -> Option<Vec<Rational>> {
    assert_eq!(a.len(), b.len(), "row count mismatch");
    let augmented: Vec<Vec<Rational>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    let ech = echelon(&augmented, cols + 1);
    if ech.pivot_cols.last() == Some(&cols) {
        return None; // pivot in the right-hand-side column
    }
    let mut x = vec![Rational::zero(); cols];
    for (ri, &pc) in ech.pivot_cols.iter().enumerate().rev() {
        let row = &ech.rows[ri];
        let mut acc = Rational::from_integer(row[cols].clone());
        for j in (pc + 1)..cols {
            if !row[j].is_zero() && !x[j].is_zero() {
                acc -= Rational::from_integer(row[j].clone()) * &x[j];
            }
        }
        x[pc] = acc / Rational::from_integer(row[pc].clone());
    }
    Some(x)
}

/// Incremental row span in reduced echelon form, for rank growth tests,
/// membership tests and canonical residuals.
pub struct RowSpan {
    cols: usize,
    /// Rows with pivot scaled to 1, fully back-reduced, sorted by pivot.
    rows: Vec<Vec<Rational>>,
    pivots: Vec<usize>,
}

impl RowSpan {
    pub fn new(cols: usize) -> Self {
        RowSpan {
            cols,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Canonical residual of `v` modulo the span (zero iff `v` is in it).
    pub fn reduce(&self, mut v: Vec<Rational>) -> Vec<Rational> {
        assert_eq!(v.len(), self.cols, "vector length mismatch");
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if v[p].is_zero() {
                continue;
            }
            let c = v[p].clone();
            for j in p..self.cols {
                if !row[j].is_zero() {
                    let delta = &c * &row[j];
                    v[j] -= delta;
                }
            }
        }
        v
    }

    pub fn contains(&self, v: &[Rational]) -> bool {
        self.reduce(v.to_vec()).iter().all(|x| x.is_zero())
    }

    /// Inserts `v`; returns `true` when it enlarges the span.
    pub fn insert(&mut self, v: Vec<Rational>) -> bool {
        let mut v = self.reduce(v);
        let Some(p) = v.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let lead = v[p].clone();
        for x in v.iter_mut().skip(p) {
            if !x.is_zero() {
                *x /= &lead;
            }
        }
        // back-reduce existing rows against the new pivot
        for row in self.rows.iter_mut() {
            if !row[p].is_zero() {
                let c = row[p].clone();
                for j in p..self.cols {
                    if !v[j].is_zero() {
                        let delta = &c * &v[j];
                        row[j] -= delta;
                    }
                }
            }
        }
        let pos = self.pivots.partition_point(|&q| q < p);
        self.pivots.insert(pos, p);
        self.rows.insert(pos, v);
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, rat_of};
    use proptest::prelude::*;

    fn rv(xs: &[i64]) -> Vec<Rational> {
        xs.iter().map(|&x| rat(x)).collect()
    }

    #[test]
    fn nullspace_known_matrix() {
        // rows: x + y + z = 0, x + 2y + 3z = 0 -> kernel spanned by (1, -2, 1)
        let a = vec![rv(&[1, 1, 1]), rv(&[1, 2, 3])];
        let ns = nullspace(&a, 3);
        assert_eq!(ns.len(), 1);
        assert_eq!(ns[0], vec![rat(1), rat(-2), rat(1)]);
        assert_eq!(rank(&a, 3), 2);
    }

    #[test]
    fn nullspace_reduced_echelon_shape() {
        // one equation in four unknowns: three basis vectors, each with a
        // unit at its own free column and zeros at the others
        let a = vec![rv(&[1, 1, 1, 1])];
        let ns = nullspace(&a, 4);
        assert_eq!(ns.len(), 3);
        for (i, v) in ns.iter().enumerate() {
            for (j, w) in ns.iter().enumerate() {
                let unit = if i == j { rat(1) } else { rat(0) };
                // free columns are 1..=3 here
                assert_eq!(w[i + 1], unit, "v{j} at free col {}", i + 1);
            }
            assert_eq!(v[0], rat(-1));
        }
    }

    #[test]
    fn solve_consistency() {
        let a = vec![rv(&[2, 1]), rv(&[1, -1])];
        let x = solve(&a, &rv(&[5, 1]), 2).unwrap();
        assert_eq!(x, vec![rat(2), rat(1)]);
        let inconsistent = solve(&vec![rv(&[1, 1]), rv(&[1, 1])], &rv(&[1, 2]), 2);
        assert!(inconsistent.is_none());
    }

    #[test]
    fn solve_with_fractions() {
        let a = vec![vec![rat_of(1, 2), rat_of(1, 3)]];
        let x = solve(&a, &[rat(1)], 2).unwrap();
        assert_eq!(x, vec![rat(2), rat(0)]);
    }

    #[test]
    fn row_span_membership_and_rank() {
        let mut span = RowSpan::new(3);
        assert!(span.insert(rv(&[1, 2, 3])));
        assert!(span.insert(rv(&[0, 1, 1])));
        assert!(!span.insert(rv(&[1, 3, 4])));
        assert_eq!(span.rank(), 2);
        assert!(span.contains(&rv(&[2, 5, 7])));
        assert!(!span.contains(&rv(&[0, 0, 1])));
        let res = span.reduce(rv(&[0, 0, 2]));
        assert_eq!(res, rv(&[0, 0, 2]));
    }

    fn arb_matrix() -> impl Strategy<Value = (Vec<Vec<Rational>>, usize)> {
        (1usize..=5, 1usize..=5).prop_flat_map(|(r, c)| {
            proptest::collection::vec(
                proptest::collection::vec((-5i64..=5, 1i64..=3).prop_map(|(n, d)| rat_of(n, d)), c),
                r,
            )
            .prop_map(move |m| (m, c))
        })
    }

    proptest! {
        #[test]
        fn nullspace_vectors_are_annihilated((a, cols) in arb_matrix()) {
            let ns = nullspace(&a, cols);
            for v in &ns {
                for row in &a {
                    let dot: Rational = row.iter().zip(v).map(|(x, y)| x * y).sum();
                    prop_assert!(dot.is_zero());
                }
            }
            prop_assert_eq!(ns.len() + rank(&a, cols), cols);
        }

        #[test]
        fn solve_verifies((a, cols) in arb_matrix(), seed in proptest::collection::vec(-3i64..=3, 1..=5)) {
            // build a consistent rhs from a known solution, then re-solve
            let x0: Vec<Rational> = (0..cols).map(|i| rat(*seed.get(i % seed.len()).unwrap())).collect();
            let b: Vec<Rational> = a.iter()
                .map(|row| row.iter().zip(&x0).map(|(p, q)| p * q).sum())
                .collect();
            let x = solve(&a, &b, cols).expect("consistent system");
            for (row, rhs) in a.iter().zip(&b) {
                let dot: Rational = row.iter().zip(&x).map(|(p, q)| p * q).sum();
                prop_assert_eq!(dot, rhs.clone());
            }
        }
    }
}
