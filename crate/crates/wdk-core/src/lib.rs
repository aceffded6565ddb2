//! Exact computation of the constants of Weitzenbock derivations on free
//! metabelian Lie algebras.
//!
//! A Weitzenbock derivation `delta` acts on the polynomial ring `K[x1..xd]`
//! and on the free metabelian Lie algebra of rank `d` as a nilpotent linear
//! derivation whose matrix is a direct sum of Jordan cells with zero
//! eigenvalue. This crate computes the kernel (algebra of constants) of
//! `delta` degree by degree, its graded and bigraded Hilbert series, and
//! finite generating sets of the kernel inside the commutator ideal as a
//! module over the polynomial constants.
//!
//! Everything is exact: scalars are arbitrary-precision rationals, series
//! are either truncated with explicit truncation orders or closed rational
//! forms with factored denominators, and all linear algebra is fraction-free
//! Gaussian elimination with deterministic pivoting.
//!
//! Module map:
//! - [`rational`], [`monomial`], [`polynomial`]: sparse exact arithmetic.
//! - [`nice`], [`series`]: rational forms `num / prod (1 - m_i)^k_i` and
//!   truncated power series.
//! - [`linalg`]: exact nullspaces, ranks and incremental row spans.
//! - [`metabelian`]: the free metabelian Lie algebra through its wreath
//!   product embedding.
//! - [`weitzenbock`]: the derivation itself.
//! - [`omega`]: Hilbert series, GL2 weight substitution, Schur multiplicity
//!   extraction and the Omega-calculus evaluation of multiplicity series.
//! - [`constants`]: kernel slices, invariant generators, module generators
//!   and relation verification.
//! - [`corpus`]: the worked-example corpus with rebuild and verification.

pub mod rational;
pub mod monomial;
pub mod polynomial;
pub mod nice;
pub mod series;
pub mod linalg;
pub mod metabelian;
pub mod weitzenbock;
pub mod omega;
pub mod constants;
pub mod corpus;

pub use monomial::Monomial;
pub use nice::NiceRational;
pub use polynomial::Polynomial;
pub use rational::{rat, rat_of, Rational};
pub use series::{TruncatedSeries, Truncation};

/// Which graded algebra a kernel computation refers to.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Space {
    /// The polynomial algebra on the generators.
    Polynomial,
    /// The commutator ideal of the free metabelian Lie algebra.
    Commutator,
    /// The whole free metabelian Lie algebra.
    WholeLie,
}

/// Crate-wide error type for fallible operations whose failure depends on
/// input data. Structural misuse (mixing arities, out-of-range variable
/// indices) panics instead.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("denominator factor is not series-invertible: {0}")]
    NonInvertibleFactor(String),
    #[error("element is not in the image of the commutator ideal: {0}")]
    NotInImage(String),
    #[error("polynomial is not symmetric in t1, t2")]
    NotSymmetric,
    #[error("Omega reduction budget exceeded ({0} subproblems)")]
    OmegaBudget(usize),
    #[error("numerator is not divisible by {0}")]
    NotDivisible(String),
    #[error("no tabulated invariant generators for partition {0:?}")]
    NoBuiltinInvariants(Vec<u32>),
    #[error("unknown corpus example: {0}")]
    UnknownExample(String),
    #[error("corpus check failed: {0}")]
    CorpusCheck(String),
    #[error("malformed JSON: {0}")]
    Json(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
