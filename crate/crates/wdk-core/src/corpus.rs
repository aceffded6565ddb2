//! Worked examples with tabulated answers.
//!
//! Each [`Example`] bundles a partition with everything the library should
//! reproduce for it: closed forms of the graded and weight-refined kernel
//! series, generating sets of the polynomial constants, module generators
//! of the commutator constants together with their relation tables, and
//! lift provenance where one example extends another by a fixed generator.
//! [`verify`] recomputes all of it from scratch and compares; the JSON
//! exporters write the tables in a machine-readable form.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use num::ToPrimitive;
use serde_json::{json, Value};

use crate::constants::{
    builtin_invariants, generates_algebra, generates_module, kernel_bidegree_dimensions,
    lift_module_generators, verify_relation, ModuleRelation,
};
use crate::metabelian::{lie_from_words, LieElement};
use crate::nice::NiceRational;
use crate::monomial::Monomial;
use crate::polynomial::{parse_x_polynomial, Polynomial};
use crate::rational::{rat, Rational};
use crate::series::{Truncation, TruncatedSeries};
use crate::weitzenbock::{Bidegree, Derivation};
use crate::{Error, Space};

/// A partition together with every tabulated value for it. Empty fields
/// mean "not tabulated"; [`verify`] skips them.
#[derive(Clone, Debug)]
pub struct Example {
    pub id: &'static str,
    pub partition: Vec<u32>,
    /// Degree bound used by the self-checks.
    pub check_order: u32,
    /// Closed form of the kernel dimension series of the whole algebra,
    /// one variable `z`, as a sum of pieces.
    pub whole_graded: Vec<NiceRational>,
    /// Weight-refined closed form for the whole algebra, variables
    /// `t1, t2, z`.
    pub whole_bigraded: Vec<NiceRational>,
    /// Weight-refined closed form for the polynomial constants.
    pub invariants_bigraded: Vec<NiceRational>,
    /// Weight-refined closed form for the commutator constants.
    pub commutator_bigraded: Vec<NiceRational>,
    /// Generators of the polynomial constants.
    pub invariants: Vec<Polynomial>,
    /// Polynomials in one formal variable per invariant that vanish under
    /// substitution of the invariants.
    pub algebra_relations: Vec<Polynomial>,
    /// Generators of the commutator constants over the invariants.
    pub module_generators: Vec<LieElement>,
    /// Relation table for the module generators.
    pub module_relations: Vec<ModuleRelation>,
    /// Id of the example whose generators lift to this one.
    pub lifted_from: Option<&'static str>,
}

impl Example {
    fn new(id: &'static str, partition: &[u32], check_order: u32) -> Self {
        Example {
            id,
            partition: partition.to_vec(),
            check_order,
            whole_graded: Vec::new(),
            whole_bigraded: Vec::new(),
            invariants_bigraded: Vec::new(),
            commutator_bigraded: Vec::new(),
            invariants: Vec::new(),
            algebra_relations: Vec::new(),
            module_generators: Vec::new(),
            module_relations: Vec::new(),
            lifted_from: None,
        }
    }
}

/// Ids of all bundled examples, in rank order.
pub const EXAMPLE_IDS: [&str; 11] = [
    "delta-1",
    "delta-2",
    "delta-3",
    "delta-1-1",
    "delta-4",
    "delta-2-1",
    "delta-5",
    "delta-3-1",
    "delta-2-2",
    "delta-1-1-1",
    "delta-2-0",
];

/// Looks up a bundled example by id.
pub fn example(id: &str) -> crate::Result<Example> {
    match id {
        "delta-1" => Ok(delta_1()),
        "delta-2" => Ok(delta_2()),
        "delta-3" => Ok(delta_3()),
        "delta-1-1" => Ok(delta_1_1()),
        "delta-4" => Ok(delta_4()),
        "delta-2-1" => Ok(delta_2_1()),
        "delta-5" => Ok(delta_5()),
        "delta-3-1" => Ok(delta_3_1()),
        "delta-2-2" => Ok(delta_2_2()),
        "delta-1-1-1" => Ok(delta_1_1_1()),
        "delta-2-0" => Ok(delta_2_0()),
        _ => Err(Error::UnknownExample(id.to_string())),
    }
}

/// All bundled examples.
pub fn examples() -> Vec<Example> {
    EXAMPLE_IDS.iter().map(|id| example(id).unwrap()).collect()
}

fn m1(n: u32) -> Monomial {
    Monomial::from_exps(vec![n])
}

/// `sum c z^n / prod (1 - z^n)^k` from coefficient lists.
fn nr1(num: &[(i64, u32)], den: &[(u32, u32)]) -> NiceRational {
    let p = Polynomial::from_terms(1, num.iter().map(|&(c, n)| (m1(n), rat(c))));
    NiceRational::with_den(p, den.iter().map(|&(n, k)| (m1(n), k))).unwrap()
}

fn m3(a: u32, b: u32, n: u32) -> Monomial {
    Monomial::from_exps(vec![a, b, n])
}

/// `sum c t1^a t2^b z^n / prod (1 - t1^a t2^b z^n)^k`.
fn nr3(num: &[(i64, u32, u32, u32)], den: &[(u32, u32, u32, u32)]) -> NiceRational {
    let p = Polynomial::from_terms(3, num.iter().map(|&(c, a, b, n)| (m3(a, b, n), rat(c))));
    NiceRational::with_den(p, den.iter().map(|&(a, b, n, k)| (m3(a, b, n), k))).unwrap()
}

/// Linear combination of bracket words, variables numbered from one.
fn lie(arity: usize, words: &[(i64, &[usize])]) -> LieElement {
    let items: Vec<(Rational, Vec<usize>)> =
        words.iter().map(|&(c, w)| (rat(c), w.to_vec())).collect();
    lie_from_words(arity, &items).unwrap()
}

/// Polynomial in formal variables `f1..fm`.
fn fpoly(arity: usize, s: &str) -> Polynomial {
    if s == "0" {
        return Polynomial::zero(arity);
    }
    parse_x_polynomial(&s.replace('f', "x"), arity).unwrap()
}

fn frel(arity: usize, degree: u32, bidegree: Bidegree, coeffs: &[&str]) -> ModuleRelation {
    ModuleRelation {
        coefficients: coeffs.iter().map(|s| fpoly(arity, s)).collect(),
        degree,
        bidegree,
    }
}

fn delta_1() -> Example {
    let mut ex = Example::new("delta-1", &[1], 8);
    ex.whole_graded = vec![nr1(&[(1, 1)], &[]), nr1(&[(1, 2)], &[(1, 1)])];
    ex.whole_bigraded = vec![
        nr3(&[(1, 1, 0, 1)], &[]),
        nr3(&[(1, 1, 1, 2)], &[(1, 0, 1, 1)]),
    ];
    ex
}

fn delta_2() -> Example {
    let mut ex = Example::new("delta-2", &[2], 8);
    ex.whole_graded = vec![nr1(&[(1, 1)], &[]), nr1(&[(1, 2)], &[(1, 2)])];
    ex.whole_bigraded = vec![
        nr3(&[(1, 2, 0, 1)], &[]),
        nr3(&[(1, 3, 1, 2)], &[(2, 0, 1, 1), (1, 1, 1, 1)]),
    ];
    ex.invariants_bigraded = vec![nr3(&[(1, 0, 0, 0)], &[(2, 0, 1, 1), (2, 2, 2, 1)])];
    ex.commutator_bigraded = vec![nr3(
        &[(1, 3, 1, 2), (1, 4, 2, 3)],
        &[(2, 0, 1, 1), (2, 2, 2, 1)],
    )];
    ex.invariants = builtin_invariants(&[2]).unwrap();
    ex.module_generators = vec![
        lie(3, &[(1, &[2, 1])]),
        lie(3, &[(1, &[3, 1, 1]), (-1, &[2, 1, 2])]),
    ];
    ex
}

fn delta_3() -> Example {
    let mut ex = Example::new("delta-3", &[3], 8);
    ex.whole_graded = vec![
        nr1(&[(1, 1)], &[]),
        nr1(&[(2, 2), (1, 4), (1, 5), (-1, 6)], &[(1, 2), (4, 1)]),
    ];
    ex.whole_bigraded = vec![
        nr3(&[(1, 3, 0, 1)], &[]),
        nr3(
            &[
                (1, 5, 1, 2),
                (1, 3, 3, 2),
                (1, 7, 5, 4),
                (1, 8, 7, 5),
                (-1, 11, 7, 6),
            ],
            &[(3, 0, 1, 1), (2, 1, 1, 1), (6, 6, 4, 1)],
        ),
    ];
    ex.invariants_bigraded = vec![nr3(
        &[(1, 0, 0, 0), (1, 6, 3, 3)],
        &[(3, 0, 1, 1), (4, 2, 2, 1), (6, 6, 4, 1)],
    )];
    ex.invariants = builtin_invariants(&[3]).unwrap();
    ex.algebra_relations = vec![fpoly(4, "f3^2 - f2^3 + 3*f1^2*f4")];
    ex.module_generators = vec![
        lie(4, &[(1, &[2, 1])]),
        lie(4, &[(1, &[4, 1]), (-1, &[3, 2])]),
        lie(4, &[(1, &[3, 1, 1]), (-1, &[2, 1, 2])]),
        lie(4, &[(3, &[2, 1, 4]), (-2, &[3, 1, 3]), (1, &[3, 2, 2])]),
        lie(
            4,
            &[
                (-3, &[3, 1, 1, 4]),
                (3, &[2, 1, 2, 4]),
                (3, &[3, 1, 2, 3]),
                (-4, &[2, 1, 3, 3]),
                (-1, &[3, 2, 2, 2]),
            ],
        ),
        lie(
            4,
            &[
                (-9, &[2, 1, 1, 4, 4]),
                (18, &[3, 1, 1, 3, 4]),
                (-12, &[4, 1, 1, 3, 3]),
                (-9, &[3, 1, 2, 2, 4]),
                (12, &[4, 1, 2, 2, 3]),
                (4, &[2, 1, 3, 3, 3]),
                (-6, &[3, 1, 2, 3, 3]),
                (-3, &[4, 2, 2, 2, 2]),
                (3, &[3, 2, 2, 2, 3]),
            ],
        ),
        lie(
            4,
            &[
                (-18, &[3, 1, 1, 1, 4, 4]),
                (18, &[4, 1, 1, 1, 3, 4]),
                (18, &[2, 1, 1, 2, 4, 4]),
                (-9, &[4, 1, 1, 2, 2, 4]),
                (-18, &[2, 1, 1, 3, 3, 4]),
                (18, &[3, 1, 1, 2, 3, 4]),
                (-18, &[4, 1, 1, 2, 3, 3]),
                (8, &[3, 1, 1, 3, 3, 3]),
                (-9, &[2, 1, 2, 2, 3, 4]),
                (-3, &[3, 1, 2, 2, 2, 4]),
                (15, &[4, 1, 2, 2, 2, 3]),
                (10, &[2, 1, 2, 3, 3, 3]),
                (-12, &[3, 1, 2, 2, 3, 3]),
                (-3, &[4, 2, 2, 2, 2, 2]),
                (3, &[3, 2, 2, 2, 2, 3]),
            ],
        ),
    ];
    ex.module_relations = vec![
        frel(4, 5, (11, 4), &["f3", "0", "f2", "-f1^2", "0", "0", "0"]),
        frel(4, 6, (13, 5), &["f2^2", "0", "f3", "0", "f1^2", "0", "0"]),
        frel(4, 6, (11, 7), &["3*f4", "0", "0", "f3", "f2", "0", "0"]),
        frel(
            4,
            6,
            (11, 7),
            &["-3*f4", "3*f2^2", "0", "0", "-3*f2", "f1", "0"],
        ),
        frel(4, 7, (13, 8), &["0", "0", "-3*f4", "f2^2", "f3", "0", "0"]),
        frel(
            4,
            7,
            (13, 8),
            &["0", "3*f2*f3", "-6*f4", "3*f2^2", "0", "0", "f1"],
        ),
        frel(
            4,
            8,
            (14, 10),
            &["0", "0", "0", "-3*f1*f4", "0", "f3", "-f2"],
        ),
        frel(
            4,
            9,
            (16, 11),
            &["0", "-9*f1*f2*f4", "0", "0", "6*f1*f4", "-f2^2", "f3"],
        ),
    ];
    ex
}

fn delta_1_1() -> Example {
    let mut ex = Example::new("delta-1-1", &[1, 1], 8);
    ex.whole_graded = vec![
        nr1(&[(2, 1)], &[]),
        nr1(&[(4, 2), (-1, 4)], &[(1, 2), (2, 1)]),
    ];
    ex.whole_bigraded = vec![
        nr3(&[(2, 1, 0, 1)], &[]),
        nr3(
            &[(1, 2, 0, 2), (3, 1, 1, 2), (-1, 3, 1, 4)],
            &[(1, 0, 1, 2), (1, 1, 2, 1)],
        ),
    ];
    ex.invariants_bigraded = vec![nr3(&[(1, 0, 0, 0)], &[(1, 0, 1, 2), (1, 1, 2, 1)])];
    ex.invariants = builtin_invariants(&[1, 1]).unwrap();
    ex.module_generators = vec![
        lie(4, &[(1, &[3, 1])]),
        lie(4, &[(1, &[2, 1])]),
        lie(4, &[(1, &[4, 3])]),
        lie(4, &[(1, &[4, 1]), (-1, &[3, 2])]),
    ];
    ex.module_relations = vec![frel(3, 4, (3, 1), &["f3", "f2^2", "f1^2", "-f1*f2"])];
    ex
}

fn delta_4() -> Example {
    let mut ex = Example::new("delta-4", &[4], 8);
    ex.whole_graded = vec![
        nr1(&[(1, 1)], &[]),
        nr1(
            &[(2, 2), (2, 3), (1, 4), (-2, 6), (1, 7)],
            &[(1, 2), (2, 1), (3, 1)],
        ),
    ];
    ex
}

fn delta_2_1() -> Example {
    let mut ex = Example::new("delta-2-1", &[2, 1], 8);
    ex.whole_graded = vec![
        nr1(&[(2, 1)], &[]),
        nr1(&[(4, 2), (2, 4), (-3, 5), (1, 6)], &[(1, 3), (3, 1)]),
    ];
    ex
}

fn delta_5() -> Example {
    let mut ex = Example::new("delta-5", &[5], 6);
    ex.whole_graded = vec![
        nr1(&[(1, 1)], &[]),
        nr1(
            &[
                (3, 2),
                (3, 3),
                (7, 4),
                (10, 5),
                (11, 6),
                (14, 7),
                (13, 8),
                (16, 9),
                (12, 10),
                (8, 11),
                (10, 12),
                (3, 13),
                (5, 14),
                (-1, 15),
                (1, 16),
                (-1, 18),
                (2, 19),
                (-1, 20),
            ],
            &[(1, 2), (4, 1), (6, 1), (8, 1)],
        ),
    ];
    ex
}

fn delta_3_1() -> Example {
    let mut ex = Example::new("delta-3-1", &[3, 1], 6);
    ex.whole_graded = vec![
        nr1(&[(2, 1)], &[]),
        nr1(
            &[
                (5, 2),
                (6, 3),
                (8, 4),
                (11, 5),
                (5, 6),
                (-2, 7),
                (3, 8),
                (-2, 9),
                (2, 11),
                (-1, 12),
            ],
            &[(1, 2), (2, 1), (4, 2)],
        ),
    ];
    ex
}

fn delta_2_2() -> Example {
    let mut ex = Example::new("delta-2-2", &[2, 2], 6);
    ex.whole_graded = vec![
        nr1(&[(2, 1)], &[]),
        nr1(
            &[(5, 2), (8, 3), (-6, 5), (2, 6), (2, 7), (-1, 8)],
            &[(1, 2), (2, 3)],
        ),
    ];
    ex
}

fn delta_1_1_1() -> Example {
    let mut ex = Example::new("delta-1-1-1", &[1, 1, 1], 6);
    ex.whole_graded = vec![
        nr1(&[(3, 1)], &[]),
        nr1(
            &[(9, 2), (9, 3), (-6, 5), (2, 6), (2, 7), (-1, 8)],
            &[(1, 2), (2, 3)],
        ),
    ];
    ex.whole_bigraded = vec![
        nr3(&[(3, 1, 0, 1)], &[]),
        nr3(
            &[
                (3, 2, 0, 2),
                (6, 1, 1, 2),
                (-1, 3, 0, 3),
                (1, 2, 1, 3),
                (-9, 3, 1, 4),
                (3, 4, 1, 5),
                (-9, 3, 2, 5),
                (9, 4, 2, 6),
                (-1, 3, 3, 6),
                (3, 4, 3, 7),
                (-3, 5, 2, 7),
                (-3, 5, 3, 8),
                (1, 6, 3, 9),
            ],
            &[(1, 0, 1, 3), (1, 1, 2, 3)],
        ),
    ];
    ex.invariants_bigraded = vec![
        nr3(&[(1, 0, 0, 0)], &[(1, 0, 1, 3), (1, 1, 2, 2)]),
        nr3(&[(1, 1, 1, 2)], &[(1, 0, 1, 2), (1, 1, 2, 3)]),
    ];
    ex.invariants = builtin_invariants(&[1, 1, 1]).unwrap();
    ex.algebra_relations = vec![fpoly(6, "f1*f6 - f2*f5 + f3*f4")];
    ex.module_generators = vec![
        lie(6, &[(1, &[3, 1])]),
        lie(6, &[(1, &[5, 1])]),
        lie(6, &[(1, &[5, 3])]),
        lie(6, &[(1, &[2, 1])]),
        lie(6, &[(1, &[4, 3])]),
        lie(6, &[(1, &[6, 5])]),
        lie(6, &[(1, &[4, 1]), (-1, &[3, 2])]),
        lie(6, &[(1, &[6, 1]), (-1, &[5, 2])]),
        lie(6, &[(1, &[6, 3]), (-1, &[5, 4])]),
        lie(
            6,
            &[
                (1, &[3, 2, 5]),
                (-1, &[5, 2, 3]),
                (-1, &[4, 1, 5]),
                (1, &[5, 1, 4]),
            ],
        ),
    ];
    let r = |deg, bid, coeffs: &[&str]| frel(6, deg, bid, coeffs);
    ex.module_relations = vec![
        r(3, (3, 0), &["f3", "-f2", "f1", "0", "0", "0", "0", "0", "0", "0"]),
        r(
            4,
            (3, 1),
            &["f4", "0", "0", "f2^2", "f1^2", "0", "-f1*f2", "0", "0", "0"],
        ),
        r(
            4,
            (3, 1),
            &[
                "f5", "f4", "0", "2*f2*f3", "0", "0", "-f1*f3", "-f1*f2", "f1^2", "0",
            ],
        ),
        r(
            4,
            (3, 1),
            &[
                "f6", "0", "f4", "0", "-2*f1*f3", "0", "f2*f3", "-f2^2", "f1*f2", "0",
            ],
        ),
        r(
            4,
            (3, 1),
            &[
                "0", "f6", "f5", "0", "0", "2*f1*f2", "f3^2", "-f2*f3", "-f1*f3", "0",
            ],
        ),
        r(
            4,
            (3, 1),
            &["0", "0", "f6", "0", "f3^2", "f2^2", "0", "0", "-f2*f3", "0"],
        ),
        r(
            4,
            (3, 1),
            &["0", "f5", "0", "f3^2", "0", "f1^2", "0", "-f1*f3", "0", "0"],
        ),
        r(
            4,
            (3, 1),
            &["f5", "0", "0", "f2*f3", "0", "0", "0", "-f1*f2", "f1^2", "f1"],
        ),
        r(
            4,
            (3, 1),
            &[
                "f6", "0", "0", "0", "-f1*f3", "0", "f2*f3", "-f2^2", "f1*f2", "f2",
            ],
        ),
        r(
            4,
            (3, 1),
            &["0", "f6", "0", "0", "0", "f1*f2", "f3^2", "-f2*f3", "0", "f3"],
        ),
        r(
            5,
            (4, 1),
            &[
                "f1*f6", "f2*f4", "0", "f2^2*f3", "-f1^2*f3", "0", "0", "-f1*f2^2", "f1^2*f2", "0",
            ],
        ),
        r(
            5,
            (4, 1),
            &[
                "f3*f6",
                "-f2*f6",
                "0",
                "0",
                "-f1*f3^2",
                "-f1*f2^2",
                "0",
                "0",
                "f1*f2*f3",
                "0",
            ],
        ),
        r(
            5,
            (4, 1),
            &[
                "0",
                "f1*f6 + f3*f4",
                "0",
                "f2*f3^2",
                "0",
                "f1^2*f2",
                "0",
                "-f1*f2*f3",
                "0",
                "0",
            ],
        ),
        r(
            5,
            (3, 2),
            &[
                "0",
                "0",
                "0",
                "-f2*f6",
                "-f1*f5",
                "0",
                "f1*f6 + f3*f4",
                "-f2*f4",
                "f1*f4",
                "f4",
            ],
        ),
        r(
            5,
            (3, 2),
            &[
                "0", "0", "0", "-f3*f6", "0", "f1*f4", "f3*f5", "-f3*f4", "0", "f5",
            ],
        ),
        r(
            5,
            (3, 2),
            &["0", "0", "0", "0", "f3*f5", "f2*f4", "0", "0", "-f3*f4", "f6"],
        ),
        r(
            6,
            (4, 2),
            &[
                "f6^2",
                "0",
                "0",
                "0",
                "-f3^2*f4 - 2*f1*f3*f6",
                "-f2^2*f4",
                "f2*f3*f6",
                "-f2^2*f6",
                "f2*f3*f4 + f1*f2*f6",
                "0",
            ],
        ),
        r(
            6,
            (4, 2),
            &[
                "0",
                "f4^2",
                "0",
                "f2*f3*f4 - f1*f2*f6",
                "-f1^2*f5",
                "0",
                "f1^2*f6",
                "-f1*f2*f4",
                "f1^2*f4",
                "0",
            ],
        ),
        r(
            6,
            (4, 2),
            &[
                "0",
                "f4*f6",
                "0",
                "f2*f3*f6",
                "f1*f3*f5",
                "f1*f2*f4",
                "-f1*f3*f6",
                "0",
                "-f1*f3*f4",
                "0",
            ],
        ),
        r(
            6,
            (4, 2),
            &[
                "0",
                "f6^2",
                "0",
                "0",
                "-f3^2*f5",
                "-f2*f3*f4 + f1*f2*f6",
                "f3^2*f6",
                "-f2*f3*f6",
                "f3^2*f4",
                "0",
            ],
        ),
        r(
            6,
            (3, 3),
            &[
                "0", "0", "0", "f6^2", "f5^2", "f4^2", "-f5*f6", "f4*f6", "-f4*f5", "0",
            ],
        ),
    ];
    ex
}

fn delta_2_0() -> Example {
    let mut ex = Example::new("delta-2-0", &[2, 0], 8);
    ex.invariants = builtin_invariants(&[2, 0]).unwrap();
    ex.module_generators = vec![
        lie(4, &[(1, &[2, 1])]),
        lie(4, &[(1, &[3, 1, 1]), (-1, &[2, 1, 2])]),
        lie(4, &[(1, &[4, 1])]),
        lie(4, &[(2, &[4, 2, 2]), (-2, &[4, 1, 3]), (-2, &[4, 3, 1])]),
    ];
    ex.lifted_from = Some("delta-2");
    ex
}

/// Expands a sum of one-variable closed forms into dense coefficients
/// `0..=order`, insisting they are nonnegative integers.
pub fn graded_coefficients(pieces: &[NiceRational], order: u32) -> crate::Result<Vec<usize>> {
    let trunc = Truncation::Total(order);
    let mut s = TruncatedSeries::zero(1, trunc);
    for piece in pieces {
        s = s.add(&piece.expand(trunc)?);
    }
    s.dense_coeffs()
        .iter()
        .map(|c| {
            if !c.is_integer() {
                return Err(Error::CorpusCheck(format!("non-integer coefficient {c}")));
            }
            c.to_integer()
                .to_usize()
                .ok_or_else(|| Error::CorpusCheck(format!("negative coefficient {c}")))
        })
        .collect()
}

/// Expands a sum of three-variable closed forms to the given order in `z`.
pub fn bigraded_series(pieces: &[NiceRational], order: u32) -> crate::Result<TruncatedSeries> {
    let trunc = Truncation::Var { var: 2, order };
    let mut s = TruncatedSeries::zero(3, trunc);
    for piece in pieces {
        s = s.add(&piece.expand(trunc)?);
    }
    Ok(s)
}

/// One kernel slice as a weight polynomial in `t1, t2` (arity three with
/// the `z` exponent cleared, matching [`TruncatedSeries::var_slice`]).
pub fn weight_poly(dims: &BTreeMap<Bidegree, usize>) -> Polynomial {
    let mut p = Polynomial::zero(3);
    for (&(a, b), &k) in dims {
        p.add_term(Monomial::from_exps(vec![a, b, 0]), rat(k as i64));
    }
    p
}

fn check(ok: bool, id: &str, what: &str) -> crate::Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::CorpusCheck(format!("{id}: {what}")))
    }
}

/// Recomputes every tabulated value of the example and compares; the
/// first mismatch comes back as [`Error::CorpusCheck`].
pub fn verify(ex: &Example) -> crate::Result<()> {
    let deriv = Derivation::from_partition(&ex.partition)?;
    let order = ex.check_order;
    if !ex.whole_graded.is_empty() || !ex.whole_bigraded.is_empty() {
        let dims = kernel_bidegree_dimensions(&deriv, Space::WholeLie, order);
        if !ex.whole_graded.is_empty() {
            let expected = graded_coefficients(&ex.whole_graded, order)?;
            let actual: Vec<usize> = dims.iter().map(|m| m.values().sum()).collect();
            check(expected == actual, ex.id, "graded kernel dimensions")?;
        }
        if !ex.whole_bigraded.is_empty() {
            let series = bigraded_series(&ex.whole_bigraded, order)?;
            for (n, slice) in dims.iter().enumerate() {
                check(
                    weight_poly(slice) == series.var_slice(2, n as u32),
                    ex.id,
                    &format!("weighted kernel dimensions in degree {n}"),
                )?;
            }
        }
    }
    for (pieces, space, what) in [
        (
            &ex.invariants_bigraded,
            Space::Polynomial,
            "weighted invariant dimensions",
        ),
        (
            &ex.commutator_bigraded,
            Space::Commutator,
            "weighted commutator dimensions",
        ),
    ] {
        if pieces.is_empty() {
            continue;
        }
        let series = bigraded_series(pieces, order)?;
        let dims = kernel_bidegree_dimensions(&deriv, space, order);
        for (n, slice) in dims.iter().enumerate() {
            check(
                weight_poly(slice) == series.var_slice(2, n as u32),
                ex.id,
                &format!("{what} in degree {n}"),
            )?;
        }
    }
    if !ex.invariants.is_empty() {
        for f in &ex.invariants {
            check(
                deriv.apply_poly(f).is_zero(),
                ex.id,
                "invariant killed by the derivation",
            )?;
        }
        check(
            generates_algebra(&deriv, &ex.invariants, order),
            ex.id,
            "invariants generate the polynomial constants",
        )?;
    }
    for (i, rel) in ex.algebra_relations.iter().enumerate() {
        check(
            rel.substitute(&ex.invariants).is_zero(),
            ex.id,
            &format!("algebra relation {}", i + 1),
        )?;
    }
    if !ex.module_generators.is_empty() {
        for c in &ex.module_generators {
            check(
                deriv.apply_lie(c).is_zero(),
                ex.id,
                "module generator killed by the derivation",
            )?;
        }
        check(
            generates_module(&deriv, &ex.invariants, &ex.module_generators, order),
            ex.id,
            "module generators span every kernel slice",
        )?;
    }
    for (i, rel) in ex.module_relations.iter().enumerate() {
        check(
            verify_relation(&ex.invariants, &ex.module_generators, rel),
            ex.id,
            &format!("module relation {}", i + 1),
        )?;
    }
    if let Some(base_id) = ex.lifted_from {
        let base = example(base_id)?;
        let lifted = lift_module_generators(&base.invariants, &base.module_generators)?;
        check(
            lifted == ex.module_generators,
            ex.id,
            "lifted generators match the table",
        )?;
    }
    Ok(())
}

fn closed_json(pieces: &[NiceRational]) -> Value {
    Value::Array(pieces.iter().map(NiceRational::to_json).collect())
}

/// The example with its expansions as one JSON document.
pub fn example_json(ex: &Example) -> crate::Result<Value> {
    let deriv = Derivation::from_partition(&ex.partition)?;
    let order = ex.check_order;
    let mut doc = serde_json::Map::new();
    doc.insert("id".into(), json!(ex.id));
    doc.insert("partition".into(), json!(ex.partition));
    doc.insert("check_order".into(), json!(order));
    if !ex.whole_graded.is_empty() {
        doc.insert(
            "whole_graded".into(),
            json!({
                "closed": closed_json(&ex.whole_graded),
                "coefficients": graded_coefficients(&ex.whole_graded, order)?,
            }),
        );
    }
    for (pieces, key) in [
        (&ex.whole_bigraded, "whole_bigraded"),
        (&ex.invariants_bigraded, "invariants_bigraded"),
        (&ex.commutator_bigraded, "commutator_bigraded"),
    ] {
        if pieces.is_empty() {
            continue;
        }
        doc.insert(
            key.into(),
            json!({
                "closed": closed_json(pieces),
                "weights": bigraded_series(pieces, order)?.to_json_weights(),
            }),
        );
    }
    if !ex.invariants.is_empty() {
        let items: Vec<Value> = ex
            .invariants
            .iter()
            .map(|f| json!({"poly": f.to_json(), "render": f.to_string()}))
            .collect();
        doc.insert("invariants".into(), Value::Array(items));
    }
    if !ex.algebra_relations.is_empty() {
        let items: Vec<Value> = ex.algebra_relations.iter().map(|r| r.to_json()).collect();
        doc.insert("algebra_relations".into(), Value::Array(items));
    }
    if !ex.module_generators.is_empty() {
        let items: Vec<Value> = ex
            .module_generators
            .iter()
            .map(|c| {
                let m = c.terms().next().expect("nonzero generator").0;
                let (a, b) = deriv.lie_bidegree(m);
                json!({
                    "element": c.to_json(),
                    "render": c.to_string(),
                    "degree": m.degree(),
                    "bidegree": [a, b],
                })
            })
            .collect();
        doc.insert("module_generators".into(), Value::Array(items));
    }
    if !ex.module_relations.is_empty() {
        let items: Vec<Value> = ex
            .module_relations
            .iter()
            .map(|r| {
                let coeffs: Vec<Value> = r.coefficients.iter().map(|c| c.to_json()).collect();
                json!({
                    "coefficients": coeffs,
                    "degree": r.degree,
                    "bidegree": [r.bidegree.0, r.bidegree.1],
                })
            })
            .collect();
        doc.insert("module_relations".into(), Value::Array(items));
    }
    if let Some(base) = ex.lifted_from {
        doc.insert("lifted_from".into(), json!(base));
    }
    Ok(Value::Object(doc))
}

/// Writes `<id>.json` for every example into the directory.
pub fn rebuild_json(dir: &Path) -> crate::Result<()> {
    fs::create_dir_all(dir)?;
    for id in EXAMPLE_IDS {
        let ex = example(id)?;
        let doc = example_json(&ex)?;
        let mut text =
            serde_json::to_string_pretty(&doc).map_err(|e| Error::Json(e.to_string()))?;
        text.push('\n');
        fs::write(dir.join(format!("{id}.json")), text)?;
    }
    Ok(())
}
