//! Error type shared across the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// The curve is singular over Q (discriminant zero); no reduction theory applies.
    #[error("curve is singular over Q (discriminant 0)")]
    SingularCurve,

    #[error("invalid curve specification: {0}")]
    InvalidCurve(String),

    /// Requested an operation at a prime of bad reduction.
    #[error("p = {p} is a bad prime for this curve ({reason})")]
    BadPrime { p: u64, reason: String },

    /// An exhaustive enumeration would exceed the configured budget.
    #[error("oracle budget exceeded: enumeration needs {needed} points, budget is {budget}")]
    OracleBudget { needed: u128, budget: u128 },

    /// The expansion grew past the configured monomial budget.
    #[error("expansion budget exceeded: {monomials} stored monomials, budget is {budget}")]
    ExpansionBudget { monomials: usize, budget: usize },

    /// Symmetric decomposition of an element that is not fixed by u <-> v.
    #[error("element is not symmetric under u <-> v: witness monomial {witness}")]
    NotSymmetric { witness: String },

    /// A specialization (u0, v0, X0, Y0) that does not satisfy u0*v0 = X0.
    #[error("specialization violates uv = X: |u0*v0 - X0| = {deviation:.3e} (relative tolerance {tol:.1e})")]
    RelationViolated { deviation: f64, tol: f64 },

    /// A triple (r, n, m) outside the lattice r + 2n = m.
    #[error("(r, n, m) = ({r}, {n}, {m}) is not in the lattice (requires r + 2n = m with m >= 1)")]
    NotInLattice { r: u32, n: u32, m: u32 },

    /// Evaluation at (or too close to) a pole.
    #[error("pole at s = {s} ({context})")]
    Pole { s: String, context: String },

    /// p^2 = C_p, so lambda_p = (p-1) C_p / (p^2 - C_p) is undefined.
    #[error("lambda_p undefined at p = {p}: p^2 = C_p (degenerate normalization)")]
    DegenerateLambda { p: u64 },

    /// a_p = 0: the continued local factor is constant and has no zero.
    #[error("no local zero at p = {p}: a_p = 0")]
    NoZero { p: u64 },

    #[error("insufficient data: {got} samples, need at least {need}")]
    InsufficientSamples { got: usize, need: usize },

    /// Generic domain violation (argument outside an operation's certified region).
    #[error("{0}")]
    Domain(String),
}
