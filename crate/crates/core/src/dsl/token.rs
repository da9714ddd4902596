//! Lexer for the `.mvf` field-definition language.

use super::{ParseError, SourceSpan};

#[derive(Debug, Clone, PartialEq)]
pub enum TokenKind {
    Number(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Caret,
    Dot,
    LeftContract,  // _|
    RightContract, // |_
    Equals,
    Comma,
    Semicolon,
    Colon,
    LParen,
    RParen,
    LBracket,
    RBracket,
    LBrace,
    RBrace,
    Eof,
}

impl TokenKind {
    /// Human-readable name used in diagnostics.
    pub fn describe(&self) -> String {
        match self {
            TokenKind::Number(v) => format!("number `{v}`"),
            TokenKind::Ident(s) => format!("`{s}`"),
            TokenKind::Plus => "`+`".into(),
            TokenKind::Minus => "`-`".into(),
            TokenKind::Star => "`*`".into(),
            TokenKind::Caret => "`^`".into(),
            TokenKind::Dot => "`.`".into(),
            TokenKind::LeftContract => "`_|`".into(),
            TokenKind::RightContract => "`|_`".into(),
            TokenKind::Equals => "`=`".into(),
            TokenKind::Comma => "`,`".into(),
            TokenKind::Semicolon => "`;`".into(),
            TokenKind::Colon => "`:`".into(),
            TokenKind::LParen => "`(`".into(),
            TokenKind::RParen => "`)`".into(),
            TokenKind::LBracket => "`[`".into(),
            TokenKind::RBracket => "`]`".into(),
            TokenKind::LBrace => "`{`".into(),
            TokenKind::RBrace => "`}`".into(),
            TokenKind::Eof => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub kind: TokenKind,
    pub span: SourceSpan,
}

/// Tokenize the whole input. `#` starts a comment running to end of line.
pub fn tokenize(input: &str) -> Result<Vec<Token>, ParseError> {
    let bytes = input.as_bytes();
    let mut tokens = Vec::new();
    let mut pos = 0usize;

    while pos < bytes.len() {
        let c = bytes[pos];
        match c {
            b' ' | b'\t' | b'\r' | b'\n' => pos += 1,
            b'#' => {
                while pos < bytes.len() && bytes[pos] != b'\n' {
                    pos += 1;
                }
            }
            b'0'..=b'9' => {
                let start = pos;
                while pos < bytes.len() && bytes[pos].is_ascii_digit() {
                    pos += 1;
                }
                // fractional part only when a digit follows the dot, so that
                // `2 . x1` keeps `.` as the scalar-product operator
                if pos + 1 < bytes.len() && bytes[pos] == b'.' && bytes[pos + 1].is_ascii_digit() {
                    pos += 1;
                    while pos < bytes.len() && bytes[pos].is_ascii_digit() {
                        pos += 1;
                    }
                }
                if pos < bytes.len() && (bytes[pos] == b'e' || bytes[pos] == b'E') {
                    let mut probe = pos + 1;
                    if probe < bytes.len() && (bytes[probe] == b'+' || bytes[probe] == b'-') {
                        probe += 1;
                    }
                    if probe < bytes.len() && bytes[probe].is_ascii_digit() {
                        pos = probe;
                        while pos < bytes.len() && bytes[pos].is_ascii_digit() {
                            pos += 1;
                        }
                    }
                }
                let span = SourceSpan::new(start, pos);
                let text = &input[start..pos];
                let value = text.parse::<f64>().map_err(|_| {
                    ParseError::new(span, format!("malformed number literal `{text}`"))
                })?;
                tokens.push(Token {
                    kind: TokenKind::Number(value),
                    span,
                });
            }
            b'a'..=b'z' | b'A'..=b'Z' => {
                let start = pos;
                while pos < bytes.len()
                    && (bytes[pos].is_ascii_alphanumeric() || bytes[pos] == b'_')
                {
                    pos += 1;
                }
                tokens.push(Token {
                    kind: TokenKind::Ident(input[start..pos].to_string()),
                    span: SourceSpan::new(start, pos),
                });
            }
            b'_' => {
                if pos + 1 < bytes.len() && bytes[pos + 1] == b'|' {
                    tokens.push(Token {
                        kind: TokenKind::LeftContract,
                        span: SourceSpan::new(pos, pos + 2),
                    });
                    pos += 2;
                } else {
                    return Err(ParseError::new(
                        SourceSpan::new(pos, pos + 1),
                        "stray `_`: the left contraction operator is `_|`".into(),
                    ));
                }
            }
            b'|' => {
                if pos + 1 < bytes.len() && bytes[pos + 1] == b'_' {
                    tokens.push(Token {
                        kind: TokenKind::RightContract,
                        span: SourceSpan::new(pos, pos + 2),
                    });
                    pos += 2;
                } else {
                    return Err(ParseError::new(
                        SourceSpan::new(pos, pos + 1),
                        "stray `|`: the right contraction operator is `|_`".into(),
                    ));
                }
            }
            _ => {
                let kind = match c {
                    b'+' => Some(TokenKind::Plus),
                    b'-' => Some(TokenKind::Minus),
                    b'*' => Some(TokenKind::Star),
                    b'^' => Some(TokenKind::Caret),
                    b'.' => Some(TokenKind::Dot),
                    b'=' => Some(TokenKind::Equals),
                    b',' => Some(TokenKind::Comma),
                    b';' => Some(TokenKind::Semicolon),
                    b':' => Some(TokenKind::Colon),
                    b'(' => Some(TokenKind::LParen),
                    b')' => Some(TokenKind::RParen),
                    b'[' => Some(TokenKind::LBracket),
                    b']' => Some(TokenKind::RBracket),
                    b'{' => Some(TokenKind::LBrace),
                    b'}' => Some(TokenKind::RBrace),
                    _ => None,
                };
                match kind {
                    Some(kind) => {
                        tokens.push(Token {
                            kind,
                            span: SourceSpan::new(pos, pos + 1),
                        });
                        pos += 1;
                    }
                    None => {
                        let ch = input[pos..].chars().next().unwrap();
                        return Err(ParseError::new(
                            SourceSpan::new(pos, pos + ch.len_utf8()),
                            format!("unexpected character `{ch}`"),
                        ));
                    }
                }
            }
        }
    }
    tokens.push(Token {
        kind: TokenKind::Eof,
        span: SourceSpan::new(bytes.len(), bytes.len()),
    });
    Ok(tokens)
}
