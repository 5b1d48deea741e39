//! Randomized sieving algorithms for the Shortest Vector Problem and the
//! Closest Vector Problem on full-rank lattices, in any ℓp norm
//! (1 ≤ p ≤ ∞).
//!
//! The crate is organized around five pieces:
//!
//! * [`geometry`] — ℓp norms, ball volumes, uniform sampling inside ℓp
//!   balls, and the ball-overlap exponent.
//! * [`lattice`] — exact lattice arithmetic on arbitrary-precision
//!   rationals: bases, LLL reduction, reduction modulo the fundamental
//!   parallelepiped, the λ₁ guess ladder, and random test lattices.
//! * [`sieve`] — the sieving procedures themselves: the hypercube-bucketed
//!   linear sieve, the classic quadratic sieve, the two-level mixed sieve,
//!   and the fixed-centre birthday variant.
//! * [`solver`] — end-to-end SVP/CVP drivers built on the above.
//! * [`exponents`] — closed-form evaluation and optimization of every
//!   complexity constant governing the sieves, plus a reconciliation table
//!   for the published headline figures.
//! * [`oracle`] — brute-force enumeration ground truth for desk-scale
//!   instances.
//!
//! Scalar-level math (norms, volumes, exponent formulas) is generic over
//! [`num_traits::Float`]; lattice bookkeeping that must be exact is carried
//! by `BigRational`/`BigInt`. The crate-level alias [`Real`] pins the
//! concrete scalar used by the stateful machinery.

pub mod exponents;
pub mod geometry;
pub mod lattice;
pub mod oracle;
pub mod sieve;
pub mod solver;

/// Concrete scalar used by samplers, sieves and solvers.
pub type Real = f64;

/// A point of the ambient space in the concrete scalar.
pub type RealVector = Vec<Real>;

pub use geometry::NormP;
pub use lattice::{Basis, LatticePoint};
pub use sieve::{CellIndex, GridSpec, PairSet};
pub use solver::{SieveVariant, SolveParams, SolveResult};

/// Crate-wide error type.
///
/// The CLI maps these onto its exit codes: invalid parameters → 2,
/// `NotFound` → 3, `TooLarge` → 4.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A parameter is outside its documented domain. The message names the
    /// violated constraint.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A solver finished all its ladder rungs without producing a suitable
    /// nonzero lattice vector. Run statistics are attached so callers can
    /// diagnose starvation and retry with a larger pair budget.
    #[error("no suitable lattice vector found ({} rungs tried, {} pairs sampled)",
            stats.rungs_tried, stats.pairs_sampled)]
    NotFound { stats: solver::RunStats },

    /// The requested computation would exceed the hard size guards of the
    /// brute-force oracle or the pair budget.
    #[error("instance too large: {0}")]
    TooLarge(String),

    /// A sieve input pair violated its precondition beyond tolerance.
    #[error("sieve contract violated: {0}")]
    ContractViolation(String),

    /// A basis or vector file could not be parsed.
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
