//! Conservative grade analysis of expression trees.
//!
//! Computes, bottom-up, the set of grades an expression can produce at any
//! point, as a bitmask (bit k set = grade k possible). The result is a
//! superset of the grades actually present: cancellations are not tracked.

use super::ast::{BinOp, ExprKind, ExprNode};

pub fn grade_set_bits(expr: &ExprNode, n: usize) -> u16 {
    let all = (1u32 << (n + 1)) - 1;
    (raw_grade_set(expr, n) & all) as u16
}

fn raw_grade_set(expr: &ExprNode, n: usize) -> u32 {
    match &expr.kind {
        // the zero literal is homogeneous of every grade: empty set
        ExprKind::Number(v) if *v == 0.0 => 0,
        ExprKind::Number(_) | ExprKind::Coord(_) => 1,
        ExprKind::Basis(_) => 1 << 1,
        ExprKind::Neg(inner) => raw_grade_set(inner, n),
        ExprKind::Unary(_, _) | ExprKind::Call2(_, _, _) => 1,
        ExprKind::Binary(op, lhs, rhs) => {
            let a = raw_grade_set(lhs, n);
            let b = raw_grade_set(rhs, n);
            match op {
                BinOp::Add | BinOp::Sub => a | b,
                BinOp::ScalarProduct => 1,
                _ => {
                    let mut out = 0u32;
                    for ga in 0..=n {
                        if a & (1 << ga) == 0 {
                            continue;
                        }
                        for gb in 0..=n {
                            if b & (1 << gb) == 0 {
                                continue;
                            }
                            match op {
                                BinOp::Wedge => {
                                    if ga + gb <= n {
                                        out |= 1 << (ga + gb);
                                    }
                                }
                                BinOp::LeftContract => {
                                    if gb >= ga {
                                        out |= 1 << (gb - ga);
                                    }
                                }
                                BinOp::RightContract => {
                                    if ga >= gb {
                                        out |= 1 << (ga - gb);
                                    }
                                }
                                BinOp::Geometric => {
                                    let lo = ga.abs_diff(gb);
                                    let hi = (ga + gb).min(2 * n - ga - gb);
                                    let mut k = lo;
                                    while k <= hi {
                                        out |= 1 << k;
                                        k += 2;
                                    }
                                }
                                _ => unreachable!(),
                            }
                        }
                    }
                    out
                }
            }
        }
    }
}

/// True when the analysis proves the expression scalar-valued.
pub fn is_scalar_valued(expr: &ExprNode, n: usize) -> bool {
    grade_set_bits(expr, n) & !1 == 0
}

/// `Some(k)` when the analysis proves the expression homogeneous of grade k.
pub fn homogeneous_grade(expr: &ExprNode, n: usize) -> Option<usize> {
    let bits = grade_set_bits(expr, n);
    if bits.count_ones() == 1 {
        Some(bits.trailing_zeros() as usize)
    } else {
        None
    }
}
