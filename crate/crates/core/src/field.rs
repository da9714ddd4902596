//! Multivector fields: expressions attached to a domain box.

use crate::algebra::{Dimension, Multivector};
use crate::domain::DomainBox;
use crate::dsl::analysis::{grade_set_bits, homogeneous_grade};
use crate::dsl::{build, differentiate, evaluate, fd_partial, BinOp, EvalError, FieldExpr};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FieldError {
    #[error("expression can produce grades {grades:?}, expected a grade-1 vector field")]
    NotAVectorField { grades: Vec<usize> },
    #[error("constant direction must be a grade-1 vector, got grades {grades:?}")]
    NotAVector { grades: Vec<usize> },
    #[error("domain box has {found} ranges, expected {expected}")]
    DomainLength { expected: usize, found: usize },
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
}

/// A smooth multivector field given by its position-coordinates expression
/// on an axis-aligned domain.
#[derive(Debug, Clone)]
pub struct MultivectorField {
    expr: FieldExpr,
    domain: DomainBox,
}

impl MultivectorField {
    pub fn new(expr: FieldExpr, domain: DomainBox) -> Result<Self, FieldError> {
        if domain.len() != expr.dimension.n() {
            return Err(FieldError::DomainLength {
                expected: expr.dimension.n(),
                found: domain.len(),
            });
        }
        Ok(MultivectorField { expr, domain })
    }

    /// Field on the default `[-1, 1]^n` box.
    pub fn from_expr(expr: FieldExpr) -> Self {
        let domain = DomainBox::default_for(expr.dimension.n());
        MultivectorField { expr, domain }
    }

    pub fn dimension(&self) -> Dimension {
        self.expr.dimension
    }

    pub fn expr(&self) -> &FieldExpr {
        &self.expr
    }

    pub fn domain(&self) -> &DomainBox {
        &self.domain
    }

    /// Evaluate at an in-domain point; points outside the box are errors.
    pub fn evaluate(&self, point: &[f64]) -> Result<Multivector, EvalError> {
        if !self.domain.contains(point) {
            return Err(EvalError::OutOfDomain {
                point: point.to_vec(),
            });
        }
        evaluate(&self.expr, point)
    }

    /// Evaluate without the domain check (finite-difference probes step
    /// slightly past the boundary).
    pub fn evaluate_raw(&self, point: &[f64]) -> Result<Multivector, EvalError> {
        evaluate(&self.expr, point)
    }

    /// Symbolic partial derivative along coordinate `mu` (1-based).
    pub fn partial(&self, mu: usize) -> MultivectorField {
        MultivectorField {
            expr: differentiate(&self.expr, mu),
            domain: self.domain.clone(),
        }
    }

    /// Central finite difference along `mu`, the oracle for [`partial`].
    ///
    /// [`partial`]: MultivectorField::partial
    pub fn fd_partial(&self, mu: usize, point: &[f64], h: f64) -> Result<Multivector, EvalError> {
        fd_partial(&self.expr, mu, point, h)
    }

    /// Grades the expression can produce, from conservative static analysis.
    pub fn grade_set(&self) -> Vec<usize> {
        let bits = grade_set_bits(&self.expr.root, self.expr.dimension.n());
        (0..=self.expr.dimension.n())
            .filter(|k| bits & (1 << k) != 0)
            .collect()
    }

    /// `Some(k)` when the field is provably grade-k homogeneous.
    pub fn homogeneous_grade(&self) -> Option<usize> {
        homogeneous_grade(&self.expr.root, self.expr.dimension.n())
    }
}

impl std::fmt::Display for MultivectorField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.expr.fmt(f)
    }
}

/// A multivector field whose values are grade-1, verified by grade analysis
/// at construction.
#[derive(Debug, Clone)]
pub struct VectorField(MultivectorField);

impl VectorField {
    pub fn new(field: MultivectorField) -> Result<Self, FieldError> {
        let n = field.dimension().n();
        let bits = grade_set_bits(&field.expr.root, n);
        if bits & !0b10 != 0 {
            return Err(FieldError::NotAVectorField {
                grades: field.grade_set(),
            });
        }
        Ok(VectorField(field))
    }

    pub fn field(&self) -> &MultivectorField {
        &self.0
    }

    pub fn dimension(&self) -> Dimension {
        self.0.dimension()
    }

    pub fn expr(&self) -> &FieldExpr {
        &self.0.expr
    }

    pub fn evaluate(&self, point: &[f64]) -> Result<Multivector, EvalError> {
        self.0.evaluate(point)
    }
}

impl std::fmt::Display for VectorField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.0.fmt(f)
    }
}

/// The direction of a directional derivative: either a fixed vector of the
/// canonical space or a smooth vector field.
#[derive(Debug, Clone)]
pub enum Direction {
    Constant(Multivector),
    Field(VectorField),
}

impl Direction {
    /// A constant direction; must be grade-1.
    pub fn constant(vector: Multivector) -> Result<Self, FieldError> {
        let grades = vector.grades();
        if grades.iter().any(|&k| k != 1) {
            return Err(FieldError::NotAVector { grades });
        }
        Ok(Direction::Constant(vector))
    }

    pub fn from_components(
        dimension: Dimension,
        components: &[f64],
    ) -> Result<Self, FieldError> {
        let vector = Multivector::vector(dimension, components).map_err(|_| {
            FieldError::DimensionMismatch {
                left: dimension.n(),
                right: components.len(),
            }
        })?;
        Direction::constant(vector)
    }

    pub fn field(field: VectorField) -> Self {
        Direction::Field(field)
    }

    pub fn dimension(&self) -> Dimension {
        match self {
            Direction::Constant(v) => v.dimension(),
            Direction::Field(f) => f.dimension(),
        }
    }

    pub fn evaluate(&self, point: &[f64]) -> Result<Multivector, EvalError> {
        match self {
            Direction::Constant(v) => Ok(v.clone()),
            Direction::Field(f) => f.evaluate(point),
        }
    }

    /// The scalar coefficient `a . b^mu` as an expression: a plain constant
    /// for fixed directions, a scalar field for field directions.
    pub(crate) fn coefficient_expr(&self, mu: usize) -> crate::dsl::ExprNode {
        match self {
            Direction::Constant(v) => build::constant(v.coefficient(1 << (mu - 1))),
            Direction::Field(f) => build::product(
                BinOp::ScalarProduct,
                f.expr().root.clone(),
                build::basis(mu),
            ),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse_expression;

    fn dim2() -> Dimension {
        Dimension::new(2).unwrap()
    }

    fn field(src: &str) -> MultivectorField {
        MultivectorField::from_expr(parse_expression(src, dim2()).unwrap())
    }

    #[test]
    fn vector_field_accepts_grade_one() {
        assert!(VectorField::new(field("x2*b1 - x1*b2")).is_ok());
        assert!(VectorField::new(field("0")).is_ok());
    }

    #[test]
    fn vector_field_rejects_other_grades() {
        let err = VectorField::new(field("x1 + x2*b1")).unwrap_err();
        assert!(matches!(err, FieldError::NotAVectorField { .. }));
        assert!(VectorField::new(field("b1^b2")).is_err());
    }

    #[test]
    fn out_of_domain_evaluation_fails() {
        let f = MultivectorField::new(
            parse_expression("x1*b1", dim2()).unwrap(),
            DomainBox::new(vec![0.0, 0.0], vec![1.0, 1.0]),
        )
        .unwrap();
        assert!(f.evaluate(&[0.5, 0.5]).is_ok());
        assert!(matches!(
            f.evaluate(&[2.0, 0.5]),
            Err(EvalError::OutOfDomain { .. })
        ));
        assert!(f.evaluate_raw(&[2.0, 0.5]).is_ok());
    }

    #[test]
    fn constant_direction_must_be_grade_one() {
        let scalar = Multivector::scalar(dim2(), 1.0);
        assert!(Direction::constant(scalar).is_err());
        assert!(Direction::from_components(dim2(), &[1.0, 0.0]).is_ok());
    }

    #[test]
    fn homogeneous_grade_reporting() {
        assert_eq!(field("x1*b1 + x2*b2").homogeneous_grade(), Some(1));
        assert_eq!(field("x1 + x2*b1").homogeneous_grade(), None);
        assert_eq!(field("x1*x2*(b1^b2)").homogeneous_grade(), Some(2));
    }
}
