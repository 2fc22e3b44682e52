//! Differentially 1-uniform functions and the weighted 2-designs they induce.
//!
//! A function `f: Z/dZ -> B` into a finite abelian group `B` is
//! *differentially 1-uniform* (d1u) if the equation `f(x+a) - f(x) = b`
//! has at most one solution `x` for every `(a, b) != (0, 0)`. Equivalently,
//! each nonzero-shift difference sequence `x -> f(x+a) - f(x)` contains no
//! repeated value. Every d1u function yields a weighted complex projective
//! 2-design in dimension `d` built from `|B| + 1` orthonormal bases, which
//! generalizes a maximal collection of mutually unbiased bases.
//!
//! The crate is organised around that pipeline:
//!
//! - [`groups`]: exact arithmetic on finite abelian groups, enumeration of
//!   isomorphism classes by order, and characters.
//! - [`fields`]: small Galois fields `GF(p^k)`, enough to realise the
//!   discrete-exponential d1u family on `Z/(p^k-1)Z`.
//! - [`diffcalc`]: the differential operator, the optimized d1u checker and
//!   its brute-force oracle.
//! - [`constructions`]: the systematic product constructions with codomain
//!   order `O(d)`, and the planner that picks the best bound for a given `d`.
//! - [`search`]: symmetry-reduced backtracking search for d1u functions into
//!   candidate codomains, to bound the minimal codomain order empirically.
//! - [`design`]: builds the induced bases, solves for design weights and
//!   certifies the 2-design condition numerically.

pub mod constructions;
pub mod design;
pub mod diffcalc;
pub mod fields;
pub mod groups;
pub mod search;

mod arith;

pub use constructions::{build, plan, BaseFamily, Branch, ConstructionPlan};
pub use design::{
    character_bases, frame_potential_gap, haar_point_check, solve_weights, unbiasedness_report,
    BasisSet, WeightedDesign,
};
pub use diffcalc::{D1uVerdict, GroupFunction, Witness};
pub use fields::FiniteField;
pub use groups::{enumerate_abelian_groups, AbelianGroup, Character, GroupElement};
pub use search::{search_group, search_min_order, SearchConfig, SearchOutcome, SearchStatus};

use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// An element does not match the shape of the group it is used with.
    #[error("shape mismatch: expected {expected} residues, got {got}")]
    ShapeMismatch { expected: usize, got: usize },
    /// An argument is outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// An argument is within the domain but beyond the supported scale.
    #[error("capacity error: {0}")]
    Capacity(String),
    /// A structured input fails a semantic precondition.
    #[error("invalid input: {0}")]
    InvalidInput(String),
    /// An internal consistency check failed; indicates a bug.
    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
