//! Exact symbolic partial differentiation of expression trees.
//!
//! Differentiation is total on well-formed trees: linear over `+ -`, Leibniz
//! over all five products (scalar chain factors commute with every product),
//! chain rule through the scalar functions, and zero on basis vectors. The
//! only simplification applied is constant folding and zero/one elimination;
//! correctness is judged by evaluation, not by canonical form.

use super::ast::{BinFn, BinOp, ExprKind, ExprNode, FieldExpr, SourceSpan, UnaryFn};

/// The exact symbolic partial derivative with respect to coordinate `mu`
/// (1-based). The result is itself evaluable and differentiable.
pub fn differentiate(expr: &FieldExpr, mu: usize) -> FieldExpr {
    assert!(
        mu >= 1 && mu <= expr.dimension.n(),
        "coordinate index {mu} out of range"
    );
    FieldExpr::new(diff_node(&expr.root, mu), expr.dimension)
}

fn diff_node(node: &ExprNode, mu: usize) -> ExprNode {
    let span = node.span;
    match &node.kind {
        ExprKind::Number(_) | ExprKind::Basis(_) => num(0.0, span),
        ExprKind::Coord(nu) => num(if *nu == mu { 1.0 } else { 0.0 }, span),
        ExprKind::Neg(inner) => neg(diff_node(inner, mu)),
        ExprKind::Binary(op, lhs, rhs) => {
            let da = diff_node(lhs, mu);
            let db = diff_node(rhs, mu);
            match op {
                BinOp::Add => add(da, db),
                BinOp::Sub => sub(da, db),
                // Leibniz rule, valid verbatim for every multivector product
                _ => add(
                    product(*op, da, (**rhs).clone()),
                    product(*op, (**lhs).clone(), db),
                ),
            }
        }
        ExprKind::Unary(func, arg) => {
            let du = diff_node(arg, mu);
            let u = (**arg).clone();
            match func {
                UnaryFn::Sin => product(BinOp::Geometric, unary(UnaryFn::Cos, u), du),
                UnaryFn::Cos => neg(product(
                    BinOp::Geometric,
                    unary(UnaryFn::Sin, u),
                    du,
                )),
                UnaryFn::Exp => product(BinOp::Geometric, unary(UnaryFn::Exp, u), du),
                // d ln(u) = u' / u, written with pow since the grammar has
                // no division operator
                UnaryFn::Ln => product(BinOp::Geometric, pow_const(u, -1.0), du),
                UnaryFn::Sqrt => product(
                    BinOp::Geometric,
                    product(BinOp::Geometric, num(0.5, span), pow_const(u, -0.5)),
                    du,
                ),
            }
        }
        ExprKind::Call2(func, a, b) => {
            let da = diff_node(a, mu);
            let db = diff_node(b, mu);
            let u = (**a).clone();
            let v = (**b).clone();
            match func {
                BinFn::Pow => {
                    if let ExprKind::Number(c) = v.kind {
                        // d u^c = c u^{c-1} u'
                        product(
                            BinOp::Geometric,
                            product(BinOp::Geometric, num(c, span), pow_const(u, c - 1.0)),
                            da,
                        )
                    } else {
                        // d u^v = u^v (v' ln u + v u' / u)
                        let term1 = product(BinOp::Geometric, db, unary(UnaryFn::Ln, u.clone()));
                        let term2 = product(
                            BinOp::Geometric,
                            product(BinOp::Geometric, v.clone(), da),
                            pow_const(u.clone(), -1.0),
                        );
                        product(
                            BinOp::Geometric,
                            call2(BinFn::Pow, u, v),
                            add(term1, term2),
                        )
                    }
                }
                BinFn::Atan2 => {
                    // d atan2(u, v) = (v u' - u v') / (u^2 + v^2)
                    let numerator = sub(
                        product(BinOp::Geometric, v.clone(), da),
                        product(BinOp::Geometric, u.clone(), db),
                    );
                    let denom = add(
                        product(BinOp::Geometric, u.clone(), u),
                        product(BinOp::Geometric, v.clone(), v),
                    );
                    product(BinOp::Geometric, numerator, pow_const(denom, -1.0))
                }
            }
        }
    }
}

pub(crate) fn num(value: f64, span: SourceSpan) -> ExprNode {
    ExprNode::new(ExprKind::Number(value), span)
}

fn is_const(node: &ExprNode, value: f64) -> bool {
    matches!(node.kind, ExprKind::Number(v) if v == value)
}

pub(crate) fn add(a: ExprNode, b: ExprNode) -> ExprNode {
    if is_const(&a, 0.0) {
        return b;
    }
    if is_const(&b, 0.0) {
        return a;
    }
    let span = a.span.merge(b.span);
    if let (ExprKind::Number(x), ExprKind::Number(y)) = (&a.kind, &b.kind) {
        return num(x + y, span);
    }
    ExprNode::new(ExprKind::Binary(BinOp::Add, Box::new(a), Box::new(b)), span)
}

pub(crate) fn sub(a: ExprNode, b: ExprNode) -> ExprNode {
    if is_const(&b, 0.0) {
        return a;
    }
    let span = a.span.merge(b.span);
    if is_const(&a, 0.0) {
        return neg(b);
    }
    if let (ExprKind::Number(x), ExprKind::Number(y)) = (&a.kind, &b.kind) {
        return num(x - y, span);
    }
    ExprNode::new(ExprKind::Binary(BinOp::Sub, Box::new(a), Box::new(b)), span)
}

pub(crate) fn neg(a: ExprNode) -> ExprNode {
    let span = a.span;
    match a.kind {
        ExprKind::Number(v) => num(-v, span),
        ExprKind::Neg(inner) => *inner,
        kind => ExprNode::new(
            ExprKind::Neg(Box::new(ExprNode::new(kind, span))),
            span,
        ),
    }
}

/// Product node with zero/one elimination. A zero factor annihilates every
/// product; a scalar unit drops out of the products that admit it (`1 . X`
/// projects, so the scalar product keeps its units).
pub(crate) fn product(op: BinOp, a: ExprNode, b: ExprNode) -> ExprNode {
    let span = a.span.merge(b.span);
    if is_const(&a, 0.0) || is_const(&b, 0.0) {
        return num(0.0, span);
    }
    if let (ExprKind::Number(x), ExprKind::Number(y)) = (&a.kind, &b.kind) {
        if op != BinOp::ScalarProduct {
            return num(x * y, span);
        }
    }
    let left_unit_drops = matches!(
        op,
        BinOp::Geometric | BinOp::Wedge | BinOp::LeftContract
    );
    let right_unit_drops = matches!(
        op,
        BinOp::Geometric | BinOp::Wedge | BinOp::RightContract
    );
    if left_unit_drops && is_const(&a, 1.0) {
        return b;
    }
    if right_unit_drops && is_const(&b, 1.0) {
        return a;
    }
    ExprNode::new(ExprKind::Binary(op, Box::new(a), Box::new(b)), span)
}

fn unary(func: UnaryFn, arg: ExprNode) -> ExprNode {
    let span = arg.span;
    ExprNode::new(ExprKind::Unary(func, Box::new(arg)), span)
}

fn call2(func: BinFn, a: ExprNode, b: ExprNode) -> ExprNode {
    let span = a.span.merge(b.span);
    ExprNode::new(ExprKind::Call2(func, Box::new(a), Box::new(b)), span)
}

fn pow_const(base: ExprNode, exponent: f64) -> ExprNode {
    let span = base.span;
    call2(BinFn::Pow, base, num(exponent, span))
}

/// Expression-building helpers shared by the calculus and chart layers.
pub(crate) mod build {
    pub(crate) use super::{add, neg, num, product, sub};
    use super::{ExprKind, ExprNode, SourceSpan};
    use crate::algebra::Dimension;

    pub(crate) fn synth_span() -> SourceSpan {
        SourceSpan::new(0, 0)
    }

    pub(crate) fn coord(mu: usize) -> ExprNode {
        ExprNode::new(ExprKind::Coord(mu), synth_span())
    }

    pub(crate) fn basis(mu: usize) -> ExprNode {
        ExprNode::new(ExprKind::Basis(mu), synth_span())
    }

    pub(crate) fn constant(value: f64) -> ExprNode {
        num(value, synth_span())
    }

    /// The unit blade with the given mask as a wedge of basis vectors.
    pub(crate) fn blade(mask: u16, dimension: Dimension) -> ExprNode {
        let mut node: Option<ExprNode> = None;
        for i in 0..dimension.n() {
            if mask & (1 << i) != 0 {
                let b = basis(i + 1);
                node = Some(match node {
                    None => b,
                    Some(acc) => product(super::BinOp::Wedge, acc, b),
                });
            }
        }
        node.unwrap_or_else(|| constant(1.0))
    }

    /// Substitute coordinate variables by the given expressions (1-based:
    /// `x<mu>` becomes `subs[mu-1]`), composing a field through a
    /// coordinate-transition map.
    pub(crate) fn compose_coords(node: &ExprNode, subs: &[ExprNode]) -> ExprNode {
        match &node.kind {
            ExprKind::Coord(mu) => subs[mu - 1].clone(),
            ExprKind::Number(_) | ExprKind::Basis(_) => node.clone(),
            ExprKind::Neg(inner) => neg(compose_coords(inner, subs)),
            ExprKind::Binary(op, lhs, rhs) => {
                let a = compose_coords(lhs, subs);
                let b = compose_coords(rhs, subs);
                if op.is_additive() {
                    if *op == super::BinOp::Add {
                        add(a, b)
                    } else {
                        sub(a, b)
                    }
                } else {
                    product(*op, a, b)
                }
            }
            ExprKind::Unary(func, arg) => ExprNode::new(
                ExprKind::Unary(*func, Box::new(compose_coords(arg, subs))),
                node.span,
            ),
            ExprKind::Call2(func, a, b) => ExprNode::new(
                ExprKind::Call2(
                    *func,
                    Box::new(compose_coords(a, subs)),
                    Box::new(compose_coords(b, subs)),
                ),
                node.span,
            ),
        }
    }
}
