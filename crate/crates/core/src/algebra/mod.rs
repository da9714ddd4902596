//! Euclidean Clifford algebra over the canonical space.
//!
//! Values live in the exterior algebra of an n-dimensional real vector space
//! whose fiducial basis `{b_1, ..., b_n}` is declared orthonormal. Basis
//! blades are indexed by bit masks over the directions; multivectors store a
//! dense coefficient per blade. All four products (wedge, scalar, left/right
//! contraction, geometric) are computed by mask loops with reordering signs
//! from transposition counting.

mod blade;
mod multivector;

pub use blade::{blade_geometric, grade_involution_sign, reverse_sign, BasisBlade, Dimension};
pub use multivector::{reciprocal_basis, Multivector};

use thiserror::Error;

/// Errors raised by algebra kernels.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum AlgebraError {
    #[error("dimension must be between 1 and 8, got {0}")]
    InvalidDimension(usize),
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: u8, right: u8 },
    #[error("grade {grade} out of range for dimension {dim}")]
    GradeOutOfRange { grade: usize, dim: u8 },
    #[error("basis index {index} out of range 1..={dim}")]
    IndexOutOfRange { index: usize, dim: u8 },
    #[error("coefficient array has length {found}, expected {expected}")]
    CoefficientLength { expected: usize, found: usize },
}
