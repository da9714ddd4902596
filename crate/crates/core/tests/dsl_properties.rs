//! Property tests for the expression language: render/parse round-trips,
//! symbolic differentiation against the finite-difference oracle, and the
//! Leibniz rule per product.

use mvf_core::algebra::Dimension;
use mvf_core::dsl::{
    differentiate, evaluate, fd_partial, parse_expression, BinFn, BinOp, ExprKind, ExprNode,
    FieldExpr, SourceSpan, UnaryFn,
};
use proptest::prelude::*;

const N: usize = 2;

fn dim() -> Dimension {
    Dimension::new(N).unwrap()
}

fn node(kind: ExprKind) -> ExprNode {
    ExprNode::new(kind, SourceSpan::new(0, 0))
}

/// Arbitrary expression trees over every operator and function.
fn expr_tree() -> impl Strategy<Value = ExprNode> {
    let leaf = prop_oneof![
        (-4i32..=4).prop_map(|v| node(ExprKind::Number(v as f64))),
        (-20i32..=20).prop_map(|v| node(ExprKind::Number(v as f64 / 8.0))),
        (1..=N).prop_map(|mu| node(ExprKind::Coord(mu))),
        (1..=N).prop_map(|mu| node(ExprKind::Basis(mu))),
    ];
    leaf.prop_recursive(3, 24, 2, |inner| {
        prop_oneof![
            (any::<u8>(), inner.clone(), inner.clone()).prop_map(|(op, a, b)| {
                let op = match op % 7 {
                    0 => BinOp::Add,
                    1 => BinOp::Sub,
                    2 => BinOp::Wedge,
                    3 => BinOp::Geometric,
                    4 => BinOp::LeftContract,
                    5 => BinOp::RightContract,
                    _ => BinOp::ScalarProduct,
                };
                node(ExprKind::Binary(op, Box::new(a), Box::new(b)))
            }),
            inner.clone().prop_map(|a| node(ExprKind::Neg(Box::new(a)))),
            (any::<u8>(), inner.clone()).prop_map(|(f, a)| {
                let f = match f % 5 {
                    0 => UnaryFn::Sin,
                    1 => UnaryFn::Cos,
                    2 => UnaryFn::Exp,
                    3 => UnaryFn::Ln,
                    _ => UnaryFn::Sqrt,
                };
                node(ExprKind::Unary(f, Box::new(a)))
            }),
            (any::<bool>(), inner.clone(), inner).prop_map(|(pow, a, b)| {
                let f = if pow { BinFn::Pow } else { BinFn::Atan2 };
                node(ExprKind::Call2(f, Box::new(a), Box::new(b)))
            }),
        ]
    })
}

/// Smooth scalar-valued trees: polynomials in the coordinates threaded
/// through sin/cos/exp, total on every point.
fn scalar_smooth() -> impl Strategy<Value = ExprNode> {
    let leaf = prop_oneof![
        (-2i32..=2).prop_map(|v| node(ExprKind::Number(v as f64))),
        (1..=N).prop_map(|mu| node(ExprKind::Coord(mu))),
    ];
    leaf.prop_recursive(3, 12, 2, |inner| {
        prop_oneof![
            (any::<u8>(), inner.clone(), inner.clone()).prop_map(|(op, a, b)| {
                let op = match op % 3 {
                    0 => BinOp::Add,
                    1 => BinOp::Sub,
                    _ => BinOp::Geometric,
                };
                node(ExprKind::Binary(op, Box::new(a), Box::new(b)))
            }),
            (any::<u8>(), inner).prop_map(|(f, a)| {
                let f = match f % 3 {
                    0 => UnaryFn::Sin,
                    1 => UnaryFn::Cos,
                    _ => UnaryFn::Exp,
                };
                node(ExprKind::Unary(f, Box::new(a)))
            }),
        ]
    })
}

/// Smooth multivector-valued trees: scalar factors against basis blades,
/// combined with every product. Scalar functions only ever see scalar
/// subtrees, so evaluation is total.
fn smooth_tree() -> impl Strategy<Value = ExprNode> {
    let leaf = prop_oneof![
        scalar_smooth(),
        (1..=N).prop_map(|mu| node(ExprKind::Basis(mu))),
    ];
    leaf.prop_recursive(2, 12, 2, |inner| {
        (any::<u8>(), inner.clone(), inner).prop_map(|(op, a, b)| {
            let op = match op % 6 {
                0 => BinOp::Add,
                1 => BinOp::Sub,
                2 => BinOp::Wedge,
                3 => BinOp::Geometric,
                4 => BinOp::LeftContract,
                _ => BinOp::ScalarProduct,
            };
            node(ExprKind::Binary(op, Box::new(a), Box::new(b)))
        })
    })
}

proptest! {
    #[test]
    fn render_parse_is_a_structural_fixpoint(tree in expr_tree()) {
        // render the generated tree, parse it, and demand the rendering of
        // the parse is stable under another round trip
        let rendered = tree.to_string();
        let parsed = parse_expression(&rendered, dim()).unwrap();
        let rendered_again = parsed.to_string();
        let reparsed = parse_expression(&rendered_again, dim()).unwrap();
        prop_assert!(
            parsed.structurally_eq(&reparsed),
            "not a fixpoint: `{}` vs `{}`",
            rendered_again,
            reparsed
        );
        prop_assert_eq!(rendered_again.clone(), reparsed.to_string());
    }

    #[test]
    fn parsing_preserves_semantics(tree in expr_tree(), x in -0.9f64..0.9, y in -0.9f64..0.9) {
        // the parsed rendering evaluates exactly like the original tree
        let original = FieldExpr::new(tree, dim());
        let parsed = parse_expression(&original.to_string(), dim()).unwrap();
        let point = [x, y];
        match (evaluate(&original, &point), evaluate(&parsed, &point)) {
            (Ok(a), Ok(b)) => prop_assert!(a.approx_eq(&b, 1e-12)),
            (Err(_), Err(_)) => {}
            (a, b) => prop_assert!(false, "divergent outcomes: {a:?} vs {b:?}"),
        }
    }

    #[test]
    fn symbolic_derivative_matches_finite_difference(
        tree in smooth_tree(), x in -0.9f64..0.9, y in -0.9f64..0.9
    ) {
        let expr = FieldExpr::new(tree, dim());
        let point = [x, y];
        for mu in 1..=N {
            let symbolic = evaluate(&differentiate(&expr, mu), &point).unwrap();
            let fd = fd_partial(&expr, mu, &point, 1e-5).unwrap();
            let scale = 1.0f64.max(symbolic.inf_norm());
            prop_assert!(
                symbolic.max_abs_diff(&fd) <= 1e-6 * scale,
                "mu={mu} at {point:?}: {} vs {}",
                symbolic,
                fd
            );
        }
    }

    #[test]
    fn mixed_partials_commute(tree in smooth_tree(), x in -0.9f64..0.9, y in -0.9f64..0.9) {
        let expr = FieldExpr::new(tree, dim());
        let d12 = differentiate(&differentiate(&expr, 1), 2);
        let d21 = differentiate(&differentiate(&expr, 2), 1);
        let a = evaluate(&d12, &[x, y]).unwrap();
        let b = evaluate(&d21, &[x, y]).unwrap();
        prop_assert!(a.approx_eq(&b, 1e-9), "{} vs {}", a, b);
    }

    #[test]
    fn leibniz_rule_holds_per_product(
        lhs in smooth_tree(), rhs in smooth_tree(),
        x in -0.9f64..0.9, y in -0.9f64..0.9
    ) {
        let point = [x, y];
        for op in [
            BinOp::Wedge,
            BinOp::Geometric,
            BinOp::LeftContract,
            BinOp::RightContract,
            BinOp::ScalarProduct,
        ] {
            let product = FieldExpr::new(
                node(ExprKind::Binary(op, Box::new(lhs.clone()), Box::new(rhs.clone()))),
                dim(),
            );
            let left = FieldExpr::new(lhs.clone(), dim());
            let right = FieldExpr::new(rhs.clone(), dim());
            for mu in 1..=N {
                let derived = evaluate(&differentiate(&product, mu), &point).unwrap();
                let dl = evaluate(&differentiate(&left, mu), &point).unwrap();
                let dr = evaluate(&differentiate(&right, mu), &point).unwrap();
                let lv = evaluate(&left, &point).unwrap();
                let rv = evaluate(&right, &point).unwrap();
                let expected = match op {
                    BinOp::Wedge => &dl.wedge(&rv).unwrap() + &lv.wedge(&dr).unwrap(),
                    BinOp::Geometric => {
                        &dl.geometric_product(&rv).unwrap() + &lv.geometric_product(&dr).unwrap()
                    }
                    BinOp::LeftContract => {
                        &dl.left_contraction(&rv).unwrap() + &lv.left_contraction(&dr).unwrap()
                    }
                    BinOp::RightContract => {
                        &dl.right_contraction(&rv).unwrap() + &lv.right_contraction(&dr).unwrap()
                    }
                    BinOp::ScalarProduct => mvf_core::Multivector::scalar(
                        dim(),
                        dl.scalar_product(&rv).unwrap() + lv.scalar_product(&dr).unwrap(),
                    ),
                    _ => unreachable!(),
                };
                let scale = 1.0f64.max(derived.inf_norm()).max(expected.inf_norm());
                prop_assert!(
                    derived.max_abs_diff(&expected) <= 1e-9 * scale,
                    "op {:?} mu {mu}",
                    op
                );
            }
        }
    }
}
