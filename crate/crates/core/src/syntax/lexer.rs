use std::fmt;

use crate::diagnostics::{Diagnostic, DiagnosticKind};
use crate::model::{parse_rational, Rat, Span};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TokenKind {
    Ident(String),
    /// Integer, decimal, or adjacent `p/q` rational literal.
    Number { value: Rat, integer: bool },
    Keyword(Keyword),
    Semi,
    Colon,
    Comma,
    Dot,
    DotDot,
    LParen,
    RParen,
    LBrace,
    RBrace,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    Subtype,
    Arrow,
    AndAnd,
    OrOr,
    Bang,
    Implies,
    Eof,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Keyword {
    Quantity,
    Component,
    Operator,
    Contract,
    Refinement,
    Assume,
    Guarantee,
    Compose,
    As,
    For,
    Grid,
    True,
    False,
}

impl Keyword {
    fn from_str(s: &str) -> Option<Keyword> {
        Some(match s {
            "quantity" => Keyword::Quantity,
            "component" => Keyword::Component,
            "operator" => Keyword::Operator,
            "contract" => Keyword::Contract,
            "refinement" => Keyword::Refinement,
            "assume" => Keyword::Assume,
            "guarantee" => Keyword::Guarantee,
            "compose" => Keyword::Compose,
            "as" => Keyword::As,
            "for" => Keyword::For,
            "grid" => Keyword::Grid,
            "true" => Keyword::True,
            "false" => Keyword::False,
            _ => return None,
        })
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Keyword::Quantity => "quantity",
            Keyword::Component => "component",
            Keyword::Operator => "operator",
            Keyword::Contract => "contract",
            Keyword::Refinement => "refinement",
            Keyword::Assume => "assume",
            Keyword::Guarantee => "guarantee",
            Keyword::Compose => "compose",
            Keyword::As => "as",
            Keyword::For => "for",
            Keyword::Grid => "grid",
            Keyword::True => "true",
            Keyword::False => "false",
        }
    }

    pub fn starts_declaration(self) -> bool {
        matches!(
            self,
            Keyword::Quantity | Keyword::Component | Keyword::Operator | Keyword::Contract | Keyword::Refinement
        )
    }
}

impl fmt::Display for TokenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            TokenKind::Ident(name) => return write!(f, "identifier `{name}`"),
            TokenKind::Number { value, .. } => return write!(f, "number `{value}`"),
            TokenKind::Keyword(k) => return write!(f, "`{}`", k.as_str()),
            TokenKind::Semi => ";",
            TokenKind::Colon => ":",
            TokenKind::Comma => ",",
            TokenKind::Dot => ".",
            TokenKind::DotDot => "..",
            TokenKind::LParen => "(",
            TokenKind::RParen => ")",
            TokenKind::LBrace => "{",
            TokenKind::RBrace => "}",
            TokenKind::Plus => "+",
            TokenKind::Minus => "-",
            TokenKind::Star => "*",
            TokenKind::Slash => "/",
            TokenKind::Caret => "^",
            TokenKind::Eq => "=",
            TokenKind::Ne => "!=",
            TokenKind::Lt => "<",
            TokenKind::Le => "<=",
            TokenKind::Gt => ">",
            TokenKind::Ge => ">=",
            TokenKind::Subtype => "<:",
            TokenKind::Arrow => "->",
            TokenKind::AndAnd => "&&",
            TokenKind::OrOr => "||",
            TokenKind::Bang => "!",
            TokenKind::Implies => "=>",
            TokenKind::Eof => return f.write_str("end of input"),
        };
        write!(f, "`{s}`")
    }
}

#[derive(Debug, Clone)]
pub struct Token {
    pub kind: TokenKind,
    pub span: Span,
}

struct Cursor<'a> {
    chars: Vec<(usize, char)>,
    pos: usize,
    line: usize,
    column: usize,
    src: &'a str,
}

impl Cursor<'_> {
    fn peek(&self, ahead: usize) -> Option<char> {
        self.chars.get(self.pos + ahead).map(|(_, c)| *c)
    }

    fn offset(&self) -> usize {
        self.chars.get(self.pos).map_or(self.src.len(), |(o, _)| *o)
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek(0)?;
        self.pos += 1;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }
}

/// Splits source text into tokens; unknown characters become diagnostics.
pub fn tokenize(src: &str) -> (Vec<Token>, Vec<Diagnostic>) {
    let mut cur = Cursor { chars: src.char_indices().collect(), pos: 0, line: 1, column: 1, src };
    let mut tokens: Vec<Token> = Vec::new();
    let mut diags = Vec::new();
    loop {
        // whitespace and comments
        while let Some(c) = cur.peek(0) {
            if c.is_whitespace() {
                cur.bump();
            } else if c == '/' && cur.peek(1) == Some('/') {
                while let Some(c) = cur.peek(0) {
                    if c == '\n' {
                        break;
                    }
                    cur.bump();
                }
            } else {
                break;
            }
        }
        let start = cur.offset();
        let (line, column) = (cur.line, cur.column);
        let Some(c) = cur.bump() else {
            tokens.push(Token { kind: TokenKind::Eof, span: Span { offset: start, len: 0, line, column } });
            return (tokens, diags);
        };
        let after_slash = matches!(tokens.last(), Some(Token { kind: TokenKind::Slash, .. }));
        let kind = match c {
            'a'..='z' | 'A'..='Z' => {
                while matches!(cur.peek(0), Some(c) if c.is_ascii_alphanumeric() || c == '_') {
                    cur.bump();
                }
                let text = &src[start..cur.offset()];
                match Keyword::from_str(text) {
                    Some(k) => TokenKind::Keyword(k),
                    None => TokenKind::Ident(text.to_string()),
                }
            }
            '0'..='9' => {
                while matches!(cur.peek(0), Some(c) if c.is_ascii_digit()) {
                    cur.bump();
                }
                let mut integer = true;
                let fraction = cur.peek(0) == Some('.') || (!after_slash && cur.peek(0) == Some('/'));
                if fraction && matches!(cur.peek(1), Some(c) if c.is_ascii_digit()) {
                    integer = false;
                    cur.bump();
                    while matches!(cur.peek(0), Some(c) if c.is_ascii_digit()) {
                        cur.bump();
                    }
                }
                let text = &src[start..cur.offset()];
                match parse_rational(text) {
                    Some(value) => {
                        let integer = integer || value.is_integer();
                        TokenKind::Number { value, integer }
                    }
                    None => {
                        diags.push(Diagnostic::new(
                            DiagnosticKind::SyntaxError {
                                expected: vec!["a rational literal with nonzero denominator".into()],
                                found: format!("`{text}`"),
                            },
                            Span { offset: start, len: text.len(), line, column },
                        ));
                        continue;
                    }
                }
            }
            ';' => TokenKind::Semi,
            ':' => TokenKind::Colon,
            ',' => TokenKind::Comma,
            '.' => {
                if cur.peek(0) == Some('.') {
                    cur.bump();
                    TokenKind::DotDot
                } else {
                    TokenKind::Dot
                }
            }
            '(' => TokenKind::LParen,
            ')' => TokenKind::RParen,
            '{' => TokenKind::LBrace,
            '}' => TokenKind::RBrace,
            '+' => TokenKind::Plus,
            '-' => {
                if cur.peek(0) == Some('>') {
                    cur.bump();
                    TokenKind::Arrow
                } else {
                    TokenKind::Minus
                }
            }
            '*' => TokenKind::Star,
            '/' => TokenKind::Slash,
            '^' => TokenKind::Caret,
            '=' => {
                if cur.peek(0) == Some('>') {
                    cur.bump();
                    TokenKind::Implies
                } else {
                    TokenKind::Eq
                }
            }
            '!' => {
                if cur.peek(0) == Some('=') {
                    cur.bump();
                    TokenKind::Ne
                } else {
                    TokenKind::Bang
                }
            }
            '<' => match cur.peek(0) {
                Some('=') => {
                    cur.bump();
                    TokenKind::Le
                }
                Some(':') => {
                    cur.bump();
                    TokenKind::Subtype
                }
                _ => TokenKind::Lt,
            },
            '>' => {
                if cur.peek(0) == Some('=') {
                    cur.bump();
                    TokenKind::Ge
                } else {
                    TokenKind::Gt
                }
            }
            '&' if cur.peek(0) == Some('&') => {
                cur.bump();
                TokenKind::AndAnd
            }
            '|' if cur.peek(0) == Some('|') => {
                cur.bump();
                TokenKind::OrOr
            }
            other => {
                diags.push(Diagnostic::new(
                    DiagnosticKind::SyntaxError { expected: vec!["a token".into()], found: format!("character `{other}`") },
                    Span { offset: start, len: other.len_utf8(), line, column },
                ));
                continue;
            }
        };
        let len = cur.offset() - start;
        tokens.push(Token { kind, span: Span { offset: start, len, line, column } });
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ratio;

    fn kinds(src: &str) -> Vec<TokenKind> {
        tokenize(src).0.into_iter().map(|t| t.kind).collect()
    }

    #[test]
    fn adjacent_fraction_is_one_literal() {
        assert_eq!(
            kinds("2/3"),
            vec![TokenKind::Number { value: ratio(2, 3), integer: false }, TokenKind::Eof]
        );
        // after a slash the digits stay separate so x/2/3 divides twice
        let k = kinds("x/2/3");
        assert_eq!(k.len(), 6);
        assert_eq!(kinds("0.5")[0], TokenKind::Number { value: ratio(1, 2), integer: false });
        assert_eq!(kinds("0..3")[1], TokenKind::DotDot);
    }

    #[test]
    fn operators_and_comments() {
        let k = kinds("a <: b // comment\n <= => -> != &&");
        assert_eq!(
            k,
            vec![
                TokenKind::Ident("a".into()),
                TokenKind::Subtype,
                TokenKind::Ident("b".into()),
                TokenKind::Le,
                TokenKind::Implies,
                TokenKind::Arrow,
                TokenKind::Ne,
                TokenKind::AndAnd,
                TokenKind::Eof
            ]
        );
    }

    #[test]
    fn positions_are_one_based() {
        let (toks, _) = tokenize("quantity\n  r;");
        assert_eq!((toks[1].span.line, toks[1].span.column), (2, 3));
    }

    #[test]
    fn stray_character_is_diagnosed() {
        let (_, diags) = tokenize("quantity $;");
        assert_eq!(diags.len(), 1);
        assert_eq!(diags[0].span.unwrap().column, 10);
    }
}
