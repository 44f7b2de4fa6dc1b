//! Exact verification of codimension-one Ricci soliton subgroups of
//! nilpotent Iwasawa groups.
//!
//! The crate constructs the Iwasawa data `g = k + a + n` of irreducible
//! symmetric spaces of non-compact type from explicit matrix (and folded
//! Chevalley) models, builds codimension-one subalgebras `s = n - R xi`,
//! and decides whether the induced metric is a Ricci soliton by two
//! independent routes that must agree: closed-form curvature operators,
//! and a brute-force left-invariant geometry oracle.
//!
//! See the `book/` guide for the mathematical walkthrough; its code
//! snippets compile as doc-tests through [`guide`].

pub mod algebra;
pub mod classify;
pub mod geometry;
pub mod hypersurface;
pub mod iwasawa;
pub mod lemmas;
pub mod linalg;
pub mod realization;
pub mod rootsys;
pub mod scalar;

pub mod guide;

pub use algebra::{AlgebraError, LinearMap, MetricLieAlgebra};
pub use scalar::{Dd, Exact, Scalar};
