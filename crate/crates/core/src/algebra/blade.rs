//! Basis blades as bit masks and the sign bookkeeping for their products.

use super::AlgebraError;

/// Number of canonical directions. Dense storage keeps `2^n` coefficients
/// per multivector, so n is capped at 8.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Dimension(u8);

impl Dimension {
    pub const MAX: u8 = 8;

    pub fn new(n: usize) -> Result<Self, AlgebraError> {
        if (1..=Self::MAX as usize).contains(&n) {
            Ok(Dimension(n as u8))
        } else {
            Err(AlgebraError::InvalidDimension(n))
        }
    }

    /// Number of directions.
    pub fn n(self) -> usize {
        self.0 as usize
    }

    /// Number of basis blades, `2^n`.
    pub fn blade_count(self) -> usize {
        1 << self.0
    }

    pub(crate) fn raw(self) -> u8 {
        self.0
    }
}

impl std::fmt::Display for Dimension {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A wedge product of distinct fiducial basis vectors, identified by the bit
/// set of its factors. Bit `mu - 1` set means `b_mu` is a factor; the empty
/// mask is the unit scalar blade.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BasisBlade {
    mask: u16,
    dimension: Dimension,
}

impl BasisBlade {
    pub fn new(mask: u16, dimension: Dimension) -> Result<Self, AlgebraError> {
        if (mask as usize) < dimension.blade_count() {
            Ok(BasisBlade { mask, dimension })
        } else {
            Err(AlgebraError::IndexOutOfRange {
                index: mask as usize,
                dim: dimension.raw(),
            })
        }
    }

    /// The blade holding the single basis vector `b_index` (1-based).
    pub fn vector(index: usize, dimension: Dimension) -> Result<Self, AlgebraError> {
        if index == 0 || index > dimension.n() {
            return Err(AlgebraError::IndexOutOfRange {
                index,
                dim: dimension.raw(),
            });
        }
        Ok(BasisBlade {
            mask: 1 << (index - 1),
            dimension,
        })
    }

    pub fn mask(self) -> u16 {
        self.mask
    }

    pub fn dimension(self) -> Dimension {
        self.dimension
    }

    /// Number of vector factors.
    pub fn grade(self) -> usize {
        self.mask.count_ones() as usize
    }

    /// Factor indices in ascending order (1-based).
    pub fn factors(self) -> impl Iterator<Item = usize> {
        let mask = self.mask;
        (1..=16usize).filter(move |i| mask & (1 << (i - 1)) != 0)
    }
}

/// Sign of reordering the concatenated factor lists of two blades into a
/// single ascending list, counting transpositions via popcount prefixes.
fn reorder_sign(a: u16, b: u16) -> f64 {
    let mut a = a >> 1;
    let mut swaps = 0u32;
    while a != 0 {
        swaps += (a & b).count_ones();
        a >>= 1;
    }
    if swaps.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// Geometric product of two basis blades in the Euclidean algebra: repeated
/// orthonormal factors square to +1, so the result blade is the symmetric
/// difference of the masks and only a sign survives the contraction.
pub fn blade_geometric(a: u16, b: u16) -> (u16, f64) {
    (a ^ b, reorder_sign(a, b))
}

/// Sign of reversing a grade-k blade: `(-1)^{k(k-1)/2}`.
pub fn reverse_sign(grade: usize) -> f64 {
    match grade % 4 {
        0 | 1 => 1.0,
        _ => -1.0,
    }
}

/// Sign of the grade involution on a grade-k blade: `(-1)^k`.
pub fn grade_involution_sign(grade: usize) -> f64 {
    if grade.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}
