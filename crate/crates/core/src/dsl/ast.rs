//! Expression trees for field definitions.

use crate::algebra::Dimension;

/// Byte range into the source text, carried by every node for diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SourceSpan {
    pub start: usize,
    pub end: usize,
}

impl SourceSpan {
    pub fn new(start: usize, end: usize) -> Self {
        debug_assert!(start <= end);
        SourceSpan { start, end }
    }

    pub fn merge(self, other: SourceSpan) -> SourceSpan {
        SourceSpan {
            start: self.start.min(other.start),
            end: self.end.max(other.end),
        }
    }

    /// 1-based line and column of the span start in `source`.
    pub fn line_col(&self, source: &str) -> (usize, usize) {
        let mut line = 1;
        let mut col = 1;
        for (i, c) in source.char_indices() {
            if i >= self.start {
                break;
            }
            if c == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
        }
        (line, col)
    }
}

/// Binary operators. The five multivector products share one left-associative
/// precedence level below `+ -`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Wedge,
    Geometric,
    LeftContract,
    RightContract,
    ScalarProduct,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Wedge => "^",
            BinOp::Geometric => "*",
            BinOp::LeftContract => "_|",
            BinOp::RightContract => "|_",
            BinOp::ScalarProduct => ".",
        }
    }

    pub fn is_additive(self) -> bool {
        matches!(self, BinOp::Add | BinOp::Sub)
    }

    fn precedence(self) -> u8 {
        if self.is_additive() {
            1
        } else {
            2
        }
    }
}

/// Single-argument scalar functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnaryFn {
    Sin,
    Cos,
    Exp,
    Ln,
    Sqrt,
}

impl UnaryFn {
    pub fn name(self) -> &'static str {
        match self {
            UnaryFn::Sin => "sin",
            UnaryFn::Cos => "cos",
            UnaryFn::Exp => "exp",
            UnaryFn::Ln => "ln",
            UnaryFn::Sqrt => "sqrt",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "sin" => UnaryFn::Sin,
            "cos" => UnaryFn::Cos,
            "exp" => UnaryFn::Exp,
            "ln" => UnaryFn::Ln,
            "sqrt" => UnaryFn::Sqrt,
            _ => return None,
        })
    }
}

/// Two-argument scalar functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinFn {
    Pow,
    Atan2,
}

impl BinFn {
    pub fn name(self) -> &'static str {
        match self {
            BinFn::Pow => "pow",
            BinFn::Atan2 => "atan2",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "pow" => BinFn::Pow,
            "atan2" => BinFn::Atan2,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone)]
pub enum ExprKind {
    /// Decimal literal; a grade-0 multivector when evaluated.
    Number(f64),
    /// Coordinate variable `x<mu>`, 1-based.
    Coord(usize),
    /// Fiducial basis vector `b<mu>`, 1-based.
    Basis(usize),
    Neg(Box<ExprNode>),
    Binary(BinOp, Box<ExprNode>, Box<ExprNode>),
    Unary(UnaryFn, Box<ExprNode>),
    Call2(BinFn, Box<ExprNode>, Box<ExprNode>),
}

/// An expression node with its source span.
#[derive(Debug, Clone)]
pub struct ExprNode {
    pub kind: ExprKind,
    pub span: SourceSpan,
}

impl ExprNode {
    pub fn new(kind: ExprKind, span: SourceSpan) -> Self {
        ExprNode { kind, span }
    }

    /// Structural equality, ignoring spans.
    pub fn structurally_eq(&self, other: &ExprNode) -> bool {
        match (&self.kind, &other.kind) {
            (ExprKind::Number(a), ExprKind::Number(b)) => a == b,
            (ExprKind::Coord(a), ExprKind::Coord(b)) => a == b,
            (ExprKind::Basis(a), ExprKind::Basis(b)) => a == b,
            (ExprKind::Neg(a), ExprKind::Neg(b)) => a.structurally_eq(b),
            (ExprKind::Binary(op1, a1, b1), ExprKind::Binary(op2, a2, b2)) => {
                op1 == op2 && a1.structurally_eq(a2) && b1.structurally_eq(b2)
            }
            (ExprKind::Unary(f1, a1), ExprKind::Unary(f2, a2)) => {
                f1 == f2 && a1.structurally_eq(a2)
            }
            (ExprKind::Call2(f1, a1, b1), ExprKind::Call2(f2, a2, b2)) => {
                f1 == f2 && a1.structurally_eq(a2) && b1.structurally_eq(b2)
            }
            _ => false,
        }
    }

    fn precedence(&self) -> u8 {
        match &self.kind {
            ExprKind::Binary(op, _, _) => op.precedence(),
            ExprKind::Neg(_) => 3,
            _ => 4,
        }
    }

    fn fmt_with_parens(&self, f: &mut std::fmt::Formatter<'_>, min_prec: u8) -> std::fmt::Result {
        let needs_parens = self.precedence() < min_prec;
        if needs_parens {
            write!(f, "(")?;
        }
        match &self.kind {
            ExprKind::Number(v) => write!(f, "{v}")?,
            ExprKind::Coord(mu) => write!(f, "x{mu}")?,
            ExprKind::Basis(mu) => write!(f, "b{mu}")?,
            ExprKind::Neg(inner) => {
                write!(f, "-")?;
                inner.fmt_with_parens(f, 3)?;
            }
            ExprKind::Binary(op, lhs, rhs) => {
                let prec = op.precedence();
                lhs.fmt_with_parens(f, prec)?;
                write!(f, " {} ", op.symbol())?;
                // same-precedence right children keep their parentheses so
                // the rendered text reparses to an identical tree
                rhs.fmt_with_parens(f, prec + 1)?;
            }
            ExprKind::Unary(func, arg) => {
                write!(f, "{}(", func.name())?;
                arg.fmt_with_parens(f, 0)?;
                write!(f, ")")?;
            }
            ExprKind::Call2(func, a, b) => {
                write!(f, "{}(", func.name())?;
                a.fmt_with_parens(f, 0)?;
                write!(f, ", ")?;
                b.fmt_with_parens(f, 0)?;
                write!(f, ")")?;
            }
        }
        if needs_parens {
            write!(f, ")")?;
        }
        Ok(())
    }
}

impl std::fmt::Display for ExprNode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.fmt_with_parens(f, 0)
    }
}

/// A parsed, differentiable expression defining a multivector field in the
/// coordinates of some chart.
#[derive(Debug, Clone)]
pub struct FieldExpr {
    pub root: ExprNode,
    pub dimension: Dimension,
}

impl FieldExpr {
    pub fn new(root: ExprNode, dimension: Dimension) -> Self {
        FieldExpr { root, dimension }
    }

    pub fn structurally_eq(&self, other: &FieldExpr) -> bool {
        self.dimension == other.dimension && self.root.structurally_eq(&other.root)
    }
}

impl std::fmt::Display for FieldExpr {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.root.fmt(f)
    }
}
