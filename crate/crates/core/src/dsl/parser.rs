//! Recursive-descent parser for `.mvf` files with precedence climbing for
//! expressions.
//!
//! Statement forms:
//!
//! ```text
//! dim 3
//! domain [-2, 2] x [-2, 2] x [-2, 2]
//! field pos = x1*b1 + x2*b2 + x3*b3
//! chart polar {
//!     forward: sqrt(x1*x1 + x2*x2), atan2(x2, x1), x3;
//!     inverse: x1*cos(x2), x1*sin(x2), x3;
//!     domain: [0.5, 2] x [-1.2, 1.2] x [-1, 1];
//!     canonical_domain: [0.5, 1.4] x [-0.9, 0.9] x [-1, 1];
//! }
//! extensor stretch = [[1 + x1*x1, 0, 0], [0, 1, 0], [0, 0, 1]]
//! ```
//!
//! Expression precedence, loosest to tightest: `+ -`; then the five products
//! `^ * _| |_ .` on one left-associative level; unary minus; function calls;
//! atoms. Inside `forward:` the coordinates `x1..xn` are canonical, inside
//! `inverse:` they are the chart's own.

use super::analysis::grade_set_bits;
use super::ast::{BinFn, BinOp, ExprKind, ExprNode, FieldExpr, SourceSpan, UnaryFn};
use super::token::{tokenize, Token, TokenKind};
use super::ParseError;
use crate::algebra::Dimension;
use crate::domain::DomainBox;
use std::collections::HashSet;

/// A secondary chart as declared in a `.mvf` file: `forward` maps canonical
/// coordinates to chart coordinates, `inverse` maps back. The optional boxes
/// bound the chart-coordinate side (`domain`) and the canonical side
/// (`canonical_domain`).
#[derive(Debug, Clone)]
pub struct ChartDef {
    pub forward: Vec<FieldExpr>,
    pub inverse: Vec<FieldExpr>,
    pub domain: Option<DomainBox>,
    pub canonical_domain: Option<DomainBox>,
}

/// An n x n matrix of scalar expressions declaring a vector-to-vector
/// extensor field: row mu lists the components of the image of `b_mu`.
#[derive(Debug, Clone)]
pub struct ExtensorDef {
    pub entries: Vec<Vec<FieldExpr>>,
}

/// A parsed `.mvf` file: one dimension declaration, then named fields,
/// charts, and extensor fields. Declaration order is preserved.
#[derive(Debug, Clone)]
pub struct FieldFile {
    pub dimension: Dimension,
    pub domain: Option<DomainBox>,
    pub fields: Vec<(String, FieldExpr)>,
    pub charts: Vec<(String, ChartDef)>,
    pub extensors: Vec<(String, ExtensorDef)>,
}

impl FieldFile {
    pub fn field(&self, name: &str) -> Option<&FieldExpr> {
        self.fields.iter().find(|(n, _)| n == name).map(|(_, e)| e)
    }

    pub fn chart(&self, name: &str) -> Option<&ChartDef> {
        self.charts.iter().find(|(n, _)| n == name).map(|(_, c)| c)
    }

    pub fn extensor(&self, name: &str) -> Option<&ExtensorDef> {
        self.extensors
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, e)| e)
    }

    /// Sampling box: the declared domain, or `[-1, 1]^n`.
    pub fn effective_domain(&self) -> DomainBox {
        self.domain
            .clone()
            .unwrap_or_else(|| DomainBox::default_for(self.dimension.n()))
    }

    /// Evaluation box: the declared domain, or the whole space — a file
    /// with no `domain` statement evaluates anywhere.
    pub fn eval_domain(&self) -> DomainBox {
        self.domain
            .clone()
            .unwrap_or_else(|| DomainBox::unbounded(self.dimension.n()))
    }

    /// Canonical text rendering of the parsed file: one statement per line,
    /// expressions fully disambiguated. Reparsing the rendering yields a
    /// structurally identical file.
    pub fn render(&self) -> String {
        let mut out = format!("dim {}\n", self.dimension.n());
        if let Some(domain) = &self.domain {
            out.push_str(&format!("domain {}\n", render_box(domain)));
        }
        for (name, expr) in &self.fields {
            out.push_str(&format!("field {name} = {expr}\n"));
        }
        for (name, chart) in &self.charts {
            out.push_str(&format!("chart {name} {{\n"));
            out.push_str(&format!("  forward: {};\n", render_exprs(&chart.forward)));
            out.push_str(&format!("  inverse: {};\n", render_exprs(&chart.inverse)));
            if let Some(domain) = &chart.domain {
                out.push_str(&format!("  domain: {};\n", render_box(domain)));
            }
            if let Some(domain) = &chart.canonical_domain {
                out.push_str(&format!("  canonical_domain: {};\n", render_box(domain)));
            }
            out.push_str("}\n");
        }
        for (name, extensor) in &self.extensors {
            let rows: Vec<String> = extensor
                .entries
                .iter()
                .map(|row| format!("[{}]", render_exprs(row)))
                .collect();
            out.push_str(&format!("extensor {name} = [{}]\n", rows.join(", ")));
        }
        out
    }
}

fn render_exprs(exprs: &[FieldExpr]) -> String {
    exprs
        .iter()
        .map(|e| e.to_string())
        .collect::<Vec<_>>()
        .join(", ")
}

fn render_box(b: &DomainBox) -> String {
    b.lo()
        .iter()
        .zip(b.hi())
        .map(|(lo, hi)| format!("[{lo}, {hi}]"))
        .collect::<Vec<_>>()
        .join(" x ")
}

const RESERVED: &[&str] = &[
    "dim",
    "domain",
    "field",
    "chart",
    "extensor",
    "forward",
    "inverse",
    "canonical_domain",
    "sin",
    "cos",
    "exp",
    "ln",
    "sqrt",
    "pow",
    "atan2",
];

/// Parse a complete `.mvf` file.
pub fn parse(input: &str) -> Result<FieldFile, ParseError> {
    let tokens = tokenize(input)?;
    let mut parser = Parser::new(tokens);
    parser.parse_file()
}

/// Parse a single expression against a known dimension. Used for expression
/// round-trip checks and ad-hoc evaluation.
pub fn parse_expression(input: &str, dimension: Dimension) -> Result<FieldExpr, ParseError> {
    let tokens = tokenize(input)?;
    let mut parser = Parser::new(tokens);
    parser.dimension = Some(dimension);
    let node = parser.parse_expr()?;
    parser.expect_eof()?;
    Ok(FieldExpr::new(node, dimension))
}

struct Parser {
    tokens: Vec<Token>,
    cursor: usize,
    dimension: Option<Dimension>,
}

impl Parser {
    fn new(tokens: Vec<Token>) -> Self {
        Parser {
            tokens,
            cursor: 0,
            dimension: None,
        }
    }

    fn peek(&self) -> &Token {
        &self.tokens[self.cursor]
    }

    fn advance(&mut self) -> Token {
        let token = self.tokens[self.cursor].clone();
        if self.cursor + 1 < self.tokens.len() {
            self.cursor += 1;
        }
        token
    }

    fn expect(&mut self, kind: &TokenKind, context: &str) -> Result<Token, ParseError> {
        let token = self.peek().clone();
        if std::mem::discriminant(&token.kind) == std::mem::discriminant(kind) {
            Ok(self.advance())
        } else {
            Err(ParseError::new(
                token.span,
                format!(
                    "expected {} {}, found {}",
                    kind.describe(),
                    context,
                    token.kind.describe()
                ),
            ))
        }
    }

    fn expect_eof(&mut self) -> Result<(), ParseError> {
        let token = self.peek();
        if token.kind == TokenKind::Eof {
            Ok(())
        } else {
            Err(ParseError::new(
                token.span,
                format!("expected end of input, found {}", token.kind.describe()),
            ))
        }
    }

    fn dimension(&self) -> Dimension {
        self.dimension.expect("dimension set before expressions")
    }

    fn parse_file(&mut self) -> Result<FieldFile, ParseError> {
        // `dim n` must come first; everything after it may appear in any order
        let head = self.peek().clone();
        match &head.kind {
            TokenKind::Ident(word) if word == "dim" => {
                self.advance();
                let token = self.peek().clone();
                let TokenKind::Number(value) = token.kind else {
                    return Err(ParseError::new(
                        token.span,
                        format!("expected dimension count, found {}", token.kind.describe()),
                    ));
                };
                self.advance();
                if value.fract() != 0.0 || !(1.0..=8.0).contains(&value) {
                    return Err(ParseError::new(
                        token.span,
                        format!("dimension must be an integer between 1 and 8, got {value}"),
                    ));
                }
                self.dimension = Some(Dimension::new(value as usize).unwrap());
            }
            _ => {
                return Err(ParseError::new(
                    head.span,
                    format!(
                        "a field file must begin with `dim n`, found {}",
                        head.kind.describe()
                    ),
                ));
            }
        }

        let mut file = FieldFile {
            dimension: self.dimension(),
            domain: None,
            fields: Vec::new(),
            charts: Vec::new(),
            extensors: Vec::new(),
        };
        let mut names: HashSet<String> = HashSet::new();

        loop {
            let token = self.peek().clone();
            match &token.kind {
                TokenKind::Eof => break,
                TokenKind::Ident(word) => match word.as_str() {
                    "domain" => {
                        self.advance();
                        if file.domain.is_some() {
                            return Err(ParseError::new(
                                token.span,
                                "duplicate `domain` declaration".into(),
                            ));
                        }
                        file.domain = Some(self.parse_box()?);
                    }
                    "field" => {
                        self.advance();
                        let name = self.parse_name(&mut names)?;
                        self.expect(&TokenKind::Equals, "after field name")?;
                        let node = self.parse_expr()?;
                        file.fields
                            .push((name, FieldExpr::new(node, self.dimension())));
                    }
                    "chart" => {
                        self.advance();
                        let name = self.parse_name(&mut names)?;
                        let chart = self.parse_chart_block()?;
                        file.charts.push((name, chart));
                    }
                    "extensor" => {
                        self.advance();
                        let name = self.parse_name(&mut names)?;
                        self.expect(&TokenKind::Equals, "after extensor name")?;
                        let def = self.parse_extensor_matrix()?;
                        file.extensors.push((name, def));
                    }
                    "dim" => {
                        return Err(ParseError::new(
                            token.span,
                            "duplicate `dim` declaration".into(),
                        ));
                    }
                    _ => {
                        return Err(ParseError::new(
                            token.span,
                            format!(
                                "expected `field`, `chart`, `extensor` or `domain`, found `{word}`"
                            ),
                        ));
                    }
                },
                _ => {
                    return Err(ParseError::new(
                        token.span,
                        format!(
                            "expected a statement keyword, found {}",
                            token.kind.describe()
                        ),
                    ));
                }
            }
        }
        Ok(file)
    }

    fn parse_name(&mut self, names: &mut HashSet<String>) -> Result<String, ParseError> {
        let token = self.peek().clone();
        let TokenKind::Ident(name) = &token.kind else {
            return Err(ParseError::new(
                token.span,
                format!("expected a name, found {}", token.kind.describe()),
            ));
        };
        let name = name.clone();
        if RESERVED.contains(&name.as_str()) || classify_indexed(&name).is_some() {
            return Err(ParseError::new(
                token.span,
                format!("`{name}` is reserved and cannot be used as a name"),
            ));
        }
        if !names.insert(name.clone()) {
            return Err(ParseError::new(
                token.span,
                format!("duplicate name `{name}`"),
            ));
        }
        self.advance();
        Ok(name)
    }

    fn parse_chart_block(&mut self) -> Result<ChartDef, ParseError> {
        let open = self.expect(&TokenKind::LBrace, "to open the chart block")?;
        let n = self.dimension().n();
        let mut forward: Option<Vec<FieldExpr>> = None;
        let mut inverse: Option<Vec<FieldExpr>> = None;
        let mut domain: Option<DomainBox> = None;
        let mut canonical_domain: Option<DomainBox> = None;

        loop {
            let token = self.peek().clone();
            match &token.kind {
                TokenKind::RBrace => {
                    self.advance();
                    break;
                }
                TokenKind::Ident(word) => {
                    let clause = word.clone();
                    self.advance();
                    self.expect(&TokenKind::Colon, "after the clause keyword")?;
                    match clause.as_str() {
                        "forward" | "inverse" => {
                            let slot = if clause == "forward" {
                                &mut forward
                            } else {
                                &mut inverse
                            };
                            if slot.is_some() {
                                return Err(ParseError::new(
                                    token.span,
                                    format!("duplicate `{clause}` clause"),
                                ));
                            }
                            let exprs = self.parse_scalar_expr_list(&clause)?;
                            if exprs.len() != n {
                                return Err(ParseError::new(
                                    token.span,
                                    format!(
                                        "`{clause}` must list exactly {n} expressions, found {}",
                                        exprs.len()
                                    ),
                                ));
                            }
                            *slot = Some(exprs);
                        }
                        "domain" | "canonical_domain" => {
                            let slot = if clause == "domain" {
                                &mut domain
                            } else {
                                &mut canonical_domain
                            };
                            if slot.is_some() {
                                return Err(ParseError::new(
                                    token.span,
                                    format!("duplicate `{clause}` clause"),
                                ));
                            }
                            *slot = Some(self.parse_box()?);
                        }
                        _ => {
                            return Err(ParseError::new(
                                token.span,
                                format!(
                                    "expected `forward`, `inverse`, `domain` or \
                                     `canonical_domain`, found `{clause}`"
                                ),
                            ));
                        }
                    }
                    self.expect(&TokenKind::Semicolon, "to end the clause")?;
                }
                _ => {
                    return Err(ParseError::new(
                        token.span,
                        format!(
                            "expected a chart clause or `}}`, found {}",
                            token.kind.describe()
                        ),
                    ));
                }
            }
        }

        let forward = forward.ok_or_else(|| {
            ParseError::new(open.span, "chart block is missing a `forward` clause".into())
        })?;
        let inverse = inverse.ok_or_else(|| {
            ParseError::new(open.span, "chart block is missing an `inverse` clause".into())
        })?;
        Ok(ChartDef {
            forward,
            inverse,
            domain,
            canonical_domain,
        })
    }

    /// Comma-separated scalar expressions, each validated to be grade-0.
    fn parse_scalar_expr_list(&mut self, what: &str) -> Result<Vec<FieldExpr>, ParseError> {
        let mut exprs = Vec::new();
        loop {
            let node = self.parse_expr()?;
            self.require_scalar(&node, what)?;
            exprs.push(FieldExpr::new(node, self.dimension()));
            if self.peek().kind == TokenKind::Comma {
                self.advance();
            } else {
                break;
            }
        }
        Ok(exprs)
    }

    fn require_scalar(&self, node: &ExprNode, what: &str) -> Result<(), ParseError> {
        let grades = grade_set_bits(node, self.dimension().n());
        if grades & !1 != 0 {
            return Err(ParseError::new(
                node.span,
                format!("`{what}` expressions must be scalar-valued"),
            ));
        }
        Ok(())
    }

    fn parse_extensor_matrix(&mut self) -> Result<ExtensorDef, ParseError> {
        let n = self.dimension().n();
        let open = self.expect(&TokenKind::LBracket, "to open the extensor matrix")?;
        let mut rows = Vec::new();
        loop {
            self.expect(&TokenKind::LBracket, "to open a matrix row")?;
            let row_start = self.peek().span;
            let row = self.parse_scalar_expr_list("extensor entry")?;
            self.expect(&TokenKind::RBracket, "to close the matrix row")?;
            if row.len() != n {
                return Err(ParseError::new(
                    row_start,
                    format!("extensor row must have {n} entries, found {}", row.len()),
                ));
            }
            rows.push(row);
            if self.peek().kind == TokenKind::Comma {
                self.advance();
            } else {
                break;
            }
        }
        self.expect(&TokenKind::RBracket, "to close the extensor matrix")?;
        if rows.len() != n {
            return Err(ParseError::new(
                open.span,
                format!("extensor matrix must have {n} rows, found {}", rows.len()),
            ));
        }
        Ok(ExtensorDef { entries: rows })
    }

    /// `[lo, hi] x [lo, hi] x ...` with exactly n ranges.
    fn parse_box(&mut self) -> Result<DomainBox, ParseError> {
        let n = self.dimension().n();
        let mut lo = Vec::new();
        let mut hi = Vec::new();
        let first = self.peek().span;
        loop {
            self.expect(&TokenKind::LBracket, "to open a range")?;
            let (a, span_a) = self.parse_signed_number()?;
            self.expect(&TokenKind::Comma, "between range bounds")?;
            let (b, span_b) = self.parse_signed_number()?;
            self.expect(&TokenKind::RBracket, "to close the range")?;
            if a > b {
                return Err(ParseError::new(
                    span_a.merge(span_b),
                    format!("range lower bound {a} exceeds upper bound {b}"),
                ));
            }
            lo.push(a);
            hi.push(b);
            match &self.peek().kind {
                TokenKind::Ident(word) if word == "x" => {
                    self.advance();
                }
                _ => break,
            }
        }
        if lo.len() != n {
            return Err(ParseError::new(
                first,
                format!("domain box must have {n} ranges, found {}", lo.len()),
            ));
        }
        Ok(DomainBox::new(lo, hi))
    }

    fn parse_signed_number(&mut self) -> Result<(f64, SourceSpan), ParseError> {
        let mut sign = 1.0;
        let mut span = self.peek().span;
        if self.peek().kind == TokenKind::Minus {
            self.advance();
            sign = -1.0;
        }
        let token = self.peek().clone();
        let TokenKind::Number(value) = token.kind else {
            return Err(ParseError::new(
                token.span,
                format!("expected a number, found {}", token.kind.describe()),
            ));
        };
        self.advance();
        span = span.merge(token.span);
        Ok((sign * value, span))
    }

    fn parse_expr(&mut self) -> Result<ExprNode, ParseError> {
        let mut lhs = self.parse_product()?;
        loop {
            let op = match self.peek().kind {
                TokenKind::Plus => BinOp::Add,
                TokenKind::Minus => BinOp::Sub,
                _ => break,
            };
            self.advance();
            let rhs = self.parse_product()?;
            let span = lhs.span.merge(rhs.span);
            lhs = ExprNode::new(ExprKind::Binary(op, Box::new(lhs), Box::new(rhs)), span);
        }
        Ok(lhs)
    }

    fn parse_product(&mut self) -> Result<ExprNode, ParseError> {
        let mut lhs = self.parse_prefix()?;
        loop {
            let op = match self.peek().kind {
                TokenKind::Star => BinOp::Geometric,
                TokenKind::Caret => BinOp::Wedge,
                TokenKind::LeftContract => BinOp::LeftContract,
                TokenKind::RightContract => BinOp::RightContract,
                TokenKind::Dot => BinOp::ScalarProduct,
                _ => break,
            };
            self.advance();
            let rhs = self.parse_prefix()?;
            let span = lhs.span.merge(rhs.span);
            lhs = ExprNode::new(ExprKind::Binary(op, Box::new(lhs), Box::new(rhs)), span);
        }
        Ok(lhs)
    }

    fn parse_prefix(&mut self) -> Result<ExprNode, ParseError> {
        if self.peek().kind == TokenKind::Minus {
            let minus = self.advance();
            let inner = self.parse_prefix()?;
            let span = minus.span.merge(inner.span);
            // negative literals fold so rendered output reparses identically
            if let ExprKind::Number(v) = inner.kind {
                return Ok(ExprNode::new(ExprKind::Number(-v), span));
            }
            return Ok(ExprNode::new(ExprKind::Neg(Box::new(inner)), span));
        }
        self.parse_atom()
    }

    fn parse_atom(&mut self) -> Result<ExprNode, ParseError> {
        let token = self.peek().clone();
        match &token.kind {
            TokenKind::Number(value) => {
                self.advance();
                Ok(ExprNode::new(ExprKind::Number(*value), token.span))
            }
            TokenKind::LParen => {
                self.advance();
                let inner = self.parse_expr()?;
                let close = self.expect(&TokenKind::RParen, "to close the parenthesis")?;
                Ok(ExprNode::new(inner.kind, token.span.merge(close.span)))
            }
            TokenKind::Ident(name) => {
                let name = name.clone();
                self.advance();
                if let Some((prefix, index)) = classify_indexed(&name) {
                    let n = self.dimension().n();
                    if index == 0 || index > n {
                        return Err(ParseError::new(
                            token.span,
                            format!(
                                "{} index {index} out of range 1..={n}",
                                if prefix == 'x' { "coordinate" } else { "basis" }
                            ),
                        ));
                    }
                    let kind = if prefix == 'x' {
                        ExprKind::Coord(index)
                    } else {
                        ExprKind::Basis(index)
                    };
                    return Ok(ExprNode::new(kind, token.span));
                }
                if let Some(func) = UnaryFn::from_name(&name) {
                    let (args, span) = self.parse_call_args(token.span)?;
                    if args.len() != 1 {
                        return Err(ParseError::new(
                            span,
                            format!("{name} takes 1 argument, found {}", args.len()),
                        ));
                    }
                    let arg = args.into_iter().next().unwrap();
                    return Ok(ExprNode::new(ExprKind::Unary(func, Box::new(arg)), span));
                }
                if let Some(func) = BinFn::from_name(&name) {
                    let (args, span) = self.parse_call_args(token.span)?;
                    if args.len() != 2 {
                        return Err(ParseError::new(
                            span,
                            format!("{name} takes 2 arguments, found {}", args.len()),
                        ));
                    }
                    let mut args = args.into_iter();
                    let a = args.next().unwrap();
                    let b = args.next().unwrap();
                    return Ok(ExprNode::new(
                        ExprKind::Call2(func, Box::new(a), Box::new(b)),
                        span,
                    ));
                }
                Err(ParseError::new(
                    token.span,
                    format!(
                        "unknown identifier `{name}` (expected x1..xn, b1..bn, \
                         a function, or a number)"
                    ),
                ))
            }
            _ => {
                // at end of input, blame the token that demanded an operand
                let span = if token.kind == TokenKind::Eof && self.cursor > 0 {
                    self.tokens[self.cursor - 1].span
                } else {
                    token.span
                };
                Err(ParseError::new(
                    span,
                    format!("expected an expression, found {}", token.kind.describe()),
                ))
            }
        }
    }

    fn parse_call_args(
        &mut self,
        name_span: SourceSpan,
    ) -> Result<(Vec<ExprNode>, SourceSpan), ParseError> {
        self.expect(&TokenKind::LParen, "to open the argument list")?;
        let mut args = Vec::new();
        if self.peek().kind != TokenKind::RParen {
            loop {
                args.push(self.parse_expr()?);
                if self.peek().kind == TokenKind::Comma {
                    self.advance();
                } else {
                    break;
                }
            }
        }
        let close = self.expect(&TokenKind::RParen, "to close the argument list")?;
        Ok((args, name_span.merge(close.span)))
    }
}

/// Recognize `x<k>` / `b<k>` identifiers; returns the prefix and index.
fn classify_indexed(name: &str) -> Option<(char, usize)> {
    let mut chars = name.chars();
    let prefix = chars.next()?;
    if prefix != 'x' && prefix != 'b' {
        return None;
    }
    let rest = chars.as_str();
    if rest.is_empty() || !rest.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    rest.parse::<usize>().ok().map(|index| (prefix, index))
}
