//! Axis-aligned domain boxes in coordinate space.

use rand::Rng;

/// An axis-aligned box `[lo_1, hi_1] x ... x [lo_n, hi_n]`. Fields and charts
/// are only evaluated at points inside their box; everything outside is a
/// domain error rather than an extrapolation.
#[derive(Debug, Clone, PartialEq)]
pub struct DomainBox {
    lo: Vec<f64>,
    hi: Vec<f64>,
}

impl DomainBox {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Self {
        assert_eq!(lo.len(), hi.len(), "bound lengths differ");
        assert!(
            lo.iter().zip(&hi).all(|(a, b)| a <= b),
            "lower bound exceeds upper bound"
        );
        DomainBox { lo, hi }
    }

    /// The default sampling box `[-1, 1]^n` used when a file declares no
    /// domain of its own.
    pub fn default_for(n: usize) -> Self {
        DomainBox {
            lo: vec![-1.0; n],
            hi: vec![1.0; n],
        }
    }

    /// The whole coordinate space; contains every point but cannot be
    /// sampled.
    pub fn unbounded(n: usize) -> Self {
        DomainBox {
            lo: vec![f64::NEG_INFINITY; n],
            hi: vec![f64::INFINITY; n],
        }
    }

    pub fn len(&self) -> usize {
        self.lo.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lo.is_empty()
    }

    pub fn lo(&self) -> &[f64] {
        &self.lo
    }

    pub fn hi(&self) -> &[f64] {
        &self.hi
    }

    pub fn contains(&self, point: &[f64]) -> bool {
        point.len() == self.lo.len()
            && point
                .iter()
                .zip(self.lo.iter().zip(&self.hi))
                .all(|(x, (lo, hi))| *x >= *lo && *x <= *hi)
    }

    /// Uniform sample from the box. Panics on unbounded ranges.
    pub fn sample<R: Rng>(&self, rng: &mut R) -> Vec<f64> {
        self.lo
            .iter()
            .zip(&self.hi)
            .map(|(&lo, &hi)| {
                assert!(lo.is_finite() && hi.is_finite(), "cannot sample an unbounded box");
                if lo == hi {
                    lo
                } else {
                    rng.random_range(lo..hi)
                }
            })
            .collect()
    }

    pub fn center(&self) -> Vec<f64> {
        self.lo
            .iter()
            .zip(&self.hi)
            .map(|(lo, hi)| 0.5 * (lo + hi))
            .collect()
    }

    /// Intersection of two boxes of equal length.
    pub fn intersect(&self, other: &DomainBox) -> DomainBox {
        assert_eq!(self.len(), other.len(), "box lengths differ");
        let lo = self
            .lo
            .iter()
            .zip(&other.lo)
            .map(|(a, b)| a.max(*b))
            .collect();
        let hi = self
            .hi
            .iter()
            .zip(&other.hi)
            .map(|(a, b)| a.min(*b))
            .collect();
        DomainBox { lo, hi }
    }
}
