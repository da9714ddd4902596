//! The `.mvf` expression language: lexer, parser, evaluator, and exact
//! symbolic differentiation.

pub mod analysis;
mod ast;
mod deriv;
mod eval;
pub mod golden;
mod parser;
mod token;

pub use ast::{BinFn, BinOp, ExprKind, ExprNode, FieldExpr, SourceSpan, UnaryFn};
pub use deriv::differentiate;
pub(crate) use deriv::build;
pub use eval::{evaluate, evaluate_scalar, fd_partial, EvalError};
pub use parser::{parse, parse_expression, ChartDef, ExtensorDef, FieldFile};

use thiserror::Error;

/// A syntax or validation error, carrying the byte span of the offending
/// text and a one-line message.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("{message}")]
pub struct ParseError {
    pub span: SourceSpan,
    pub message: String,
}

impl ParseError {
    pub fn new(span: SourceSpan, message: String) -> Self {
        ParseError { span, message }
    }

    /// Diagnostic in `line:col: message` form.
    pub fn render(&self, source: &str) -> String {
        let (line, col) = self.span.line_col(source);
        format!("{line}:{col}: {}", self.message)
    }
}
