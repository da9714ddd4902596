//! Expression evaluation at coordinate points.

use super::ast::{BinFn, BinOp, ExprKind, ExprNode, FieldExpr, SourceSpan, UnaryFn};
use crate::algebra::{AlgebraError, Multivector};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("point has {found} coordinates, expected {expected}")]
    PointLength { expected: usize, found: usize },
    #[error("{func}: {message}")]
    Domain {
        func: &'static str,
        message: String,
        span: SourceSpan,
    },
    #[error("{func} requires a scalar operand")]
    NonScalarOperand {
        func: &'static str,
        span: SourceSpan,
    },
    #[error("point {point:?} is outside the declared domain")]
    OutOfDomain { point: Vec<f64> },
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// Evaluate a field expression at a coordinate tuple. The result is always a
/// multivector; scalars come out as grade-0 multivectors.
pub fn evaluate(expr: &FieldExpr, point: &[f64]) -> Result<Multivector, EvalError> {
    let n = expr.dimension.n();
    if point.len() != n {
        return Err(EvalError::PointLength {
            expected: n,
            found: point.len(),
        });
    }
    eval_node(&expr.root, expr.dimension, point)
}

/// Evaluate an expression known to be scalar-valued, returning the bare real.
pub fn evaluate_scalar(expr: &FieldExpr, point: &[f64]) -> Result<f64, EvalError> {
    let value = evaluate(expr, point)?;
    if value.is_scalar() {
        Ok(value.scalar_part())
    } else {
        Err(EvalError::NonScalarOperand {
            func: "scalar expression",
            span: expr.root.span,
        })
    }
}

fn eval_node(
    node: &ExprNode,
    dimension: crate::algebra::Dimension,
    point: &[f64],
) -> Result<Multivector, EvalError> {
    match &node.kind {
        ExprKind::Number(v) => Ok(Multivector::scalar(dimension, *v)),
        ExprKind::Coord(mu) => Ok(Multivector::scalar(dimension, point[mu - 1])),
        ExprKind::Basis(mu) => Ok(Multivector::basis_vector(dimension, *mu)?),
        ExprKind::Neg(inner) => Ok(-&eval_node(inner, dimension, point)?),
        ExprKind::Binary(op, lhs, rhs) => {
            let a = eval_node(lhs, dimension, point)?;
            let b = eval_node(rhs, dimension, point)?;
            Ok(match op {
                BinOp::Add => &a + &b,
                BinOp::Sub => &a - &b,
                BinOp::Wedge => a.wedge(&b)?,
                BinOp::Geometric => a.geometric_product(&b)?,
                BinOp::LeftContract => a.left_contraction(&b)?,
                BinOp::RightContract => a.right_contraction(&b)?,
                BinOp::ScalarProduct => Multivector::scalar(dimension, a.scalar_product(&b)?),
            })
        }
        ExprKind::Unary(func, arg) => {
            let operand = scalar_operand(arg, dimension, point, func.name())?;
            let value = match func {
                UnaryFn::Sin => operand.sin(),
                UnaryFn::Cos => operand.cos(),
                UnaryFn::Exp => operand.exp(),
                UnaryFn::Ln => {
                    if operand <= 0.0 {
                        return Err(EvalError::Domain {
                            func: "ln",
                            message: format!("argument {operand} is not positive"),
                            span: node.span,
                        });
                    }
                    operand.ln()
                }
                UnaryFn::Sqrt => {
                    if operand < 0.0 {
                        return Err(EvalError::Domain {
                            func: "sqrt",
                            message: format!("argument {operand} is negative"),
                            span: node.span,
                        });
                    }
                    operand.sqrt()
                }
            };
            Ok(Multivector::scalar(dimension, value))
        }
        ExprKind::Call2(func, a, b) => {
            let x = scalar_operand(a, dimension, point, func.name())?;
            let y = scalar_operand(b, dimension, point, func.name())?;
            let value = match func {
                BinFn::Pow => {
                    let v = x.powf(y);
                    if !v.is_finite() {
                        return Err(EvalError::Domain {
                            func: "pow",
                            message: format!("pow({x}, {y}) is undefined"),
                            span: node.span,
                        });
                    }
                    v
                }
                BinFn::Atan2 => x.atan2(y),
            };
            Ok(Multivector::scalar(dimension, value))
        }
    }
}

fn scalar_operand(
    node: &ExprNode,
    dimension: crate::algebra::Dimension,
    point: &[f64],
    func: &'static str,
) -> Result<f64, EvalError> {
    let value = eval_node(node, dimension, point)?;
    if value.is_scalar() {
        Ok(value.scalar_part())
    } else {
        Err(EvalError::NonScalarOperand {
            func,
            span: node.span,
        })
    }
}

/// Central finite difference of the expression along coordinate `mu` at the
/// given point: `(X(p + h e_mu) - X(p - h e_mu)) / 2h`. Serves as the
/// independent oracle against which symbolic derivatives are validated.
pub fn fd_partial(
    expr: &FieldExpr,
    mu: usize,
    point: &[f64],
    h: f64,
) -> Result<Multivector, EvalError> {
    assert!(h > 0.0, "step must be positive");
    let mut plus = point.to_vec();
    let mut minus = point.to_vec();
    plus[mu - 1] += h;
    minus[mu - 1] -= h;
    let a = evaluate(expr, &plus)?;
    let b = evaluate(expr, &minus)?;
    Ok((&a - &b).scale(0.5 / h))
}
