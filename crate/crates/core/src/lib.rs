//! Geometric-calculus engine over the canonical space of a coordinate chart.
//!
//! The crate is organized bottom-up:
//!
//! - [`algebra`] — dense Euclidean Clifford algebra on basis blades: wedge,
//!   scalar product, left/right contraction, geometric product, grading.
//! - [`dsl`] — the `.mvf` expression language: parser, evaluator, and exact
//!   symbolic differentiation with a finite-difference cross-check.
//! - [`domain`] — axis-aligned domain boxes and sampling.
//! - [`field`] — multivector and vector fields defined by expressions.
//! - [`calculus`] — directional ordinary derivatives, the Lie bracket, and
//!   Hestenes derivatives (curl, contracted divergence, gradient).
//! - [`extensor`] — multilinear extensor fields, adjoints, and their
//!   directional derivatives.
//! - [`charts`] — secondary coordinate systems: transition maps, covariant
//!   and contravariant frames, Jacobian fields, and the chain rule.
//! - [`report`] / [`suite`] — machine-readable identity-check reports and
//!   the full verification suite run by the CLI.

pub mod algebra;
pub mod calculus;
pub mod charts;
pub mod domain;
pub mod dsl;
pub mod extensor;
pub mod field;
pub mod report;
pub mod suite;

pub use algebra::{AlgebraError, BasisBlade, Dimension, Multivector};
pub use domain::DomainBox;
pub use dsl::{parse, EvalError, FieldExpr, FieldFile, ParseError, SourceSpan};
pub use field::{Direction, MultivectorField, VectorField};
pub use report::CheckReport;


