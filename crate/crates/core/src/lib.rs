//! Exact computational algebra for unitary Cayley graphs of matrix algebras
//! over finite fields.
//!
//! - [`field`]: GF(p^k) construction and arithmetic.
//! - [`matrix`]: dense linear algebra over a field, plus enumeration of `M_n(F)`.
//! - [`census`]: closed-form counts of shifted `GL_n` intersections and their
//!   brute-force oracles.
//! - [`graph`]: adjacency, common-neighbour counts and the strong-regularity
//!   decision for `Cay(M_n(F), GL_n(F))`.

pub mod census;
pub mod error;
pub mod field;
pub mod graph;
pub mod matrix;

pub use census::{CaseCounts, CensusRecord, Method, SrgParameters};
pub use error::{Error, Result};
pub use field::{make_field, FieldElement, FieldSpec};
pub use graph::{ExplicitGraph, ExplicitVerdict, RegularityMode, SrgReport, Witness};
pub use matrix::{Matrix, MatrixIndex, MatrixSpace, RankFactorization};

/// Default cap on the number of items any full enumeration may visit.
pub const DEFAULT_BUDGET: u64 = 1 << 26;
