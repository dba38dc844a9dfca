//! Recursive-descent parser for `.scspec` documents.
//!
//! Errors are collected rather than aborting: a malformed item inside a
//! declaration body skips to the next `;`, and a malformed declaration skips
//! to the next declaration keyword.

use num_traits::ToPrimitive;

use super::ast::*;
use super::lexer::{tokenize, Keyword, Token, TokenKind};
use crate::diagnostics::{Diagnostic, DiagnosticKind};
use crate::model::{ArithOp, Assertion, BoolOp, CmpOp, Rat, Span, Term, TermKind};

type PResult<T> = Result<T, Diagnostic>;

/// Intermediate expression before sorting into assertions and terms.
#[derive(Debug)]
enum Expr {
    Num(Rat, Span),
    Var(String, Span),
    Bool(bool, Span),
    Neg(Box<Expr>, Span),
    Not(Box<Expr>, Span),
    Arith(ArithOp, Box<Expr>, Box<Expr>, Span),
    Logic(BoolOp, Box<Expr>, Box<Expr>, Span),
    Cmp(CmpOp, Box<Expr>, Box<Expr>, Span),
}

impl Expr {
    fn span(&self) -> Span {
        match self {
            Expr::Num(_, s)
            | Expr::Var(_, s)
            | Expr::Bool(_, s)
            | Expr::Neg(_, s)
            | Expr::Not(_, s)
            | Expr::Arith(_, _, _, s)
            | Expr::Logic(_, _, _, s)
            | Expr::Cmp(_, _, _, s) => *s,
        }
    }
}

pub(crate) struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    pub(crate) diags: Vec<Diagnostic>,
}

impl Parser {
    pub(crate) fn new(src: &str) -> Self {
        let (tokens, diags) = tokenize(src);
        Parser { tokens, pos: 0, diags }
    }

    fn peek(&self) -> &TokenKind {
        &self.tokens[self.pos].kind
    }

    fn span(&self) -> Span {
        self.tokens[self.pos].span
    }

    fn advance(&mut self) -> Token {
        let tok = self.tokens[self.pos].clone();
        if !matches!(tok.kind, TokenKind::Eof) {
            self.pos += 1;
        }
        tok
    }

    fn at(&self, kind: &TokenKind) -> bool {
        self.peek() == kind
    }

    fn at_keyword(&self, k: Keyword) -> bool {
        matches!(self.peek(), TokenKind::Keyword(x) if *x == k)
    }

    fn eat(&mut self, kind: &TokenKind) -> bool {
        if self.at(kind) {
            self.advance();
            true
        } else {
            false
        }
    }

    fn error(&self, expected: &[&str]) -> Diagnostic {
        Diagnostic::new(
            DiagnosticKind::SyntaxError {
                expected: expected.iter().map(|s| s.to_string()).collect(),
                found: self.peek().to_string(),
            },
            self.span(),
        )
    }

    fn expect(&mut self, kind: TokenKind) -> PResult<Span> {
        if self.at(&kind) {
            Ok(self.advance().span)
        } else {
            Err(self.error(&[&kind.to_string()]))
        }
    }

    fn expect_keyword(&mut self, k: Keyword) -> PResult<Span> {
        if self.at_keyword(k) {
            Ok(self.advance().span)
        } else {
            Err(self.error(&[&format!("`{}`", k.as_str())]))
        }
    }

    fn ident(&mut self, what: &str) -> PResult<Ident> {
        match self.peek().clone() {
            TokenKind::Ident(name) => {
                let span = self.advance().span;
                Ok(Ident { name, span })
            }
            _ => Err(self.error(&[what])),
        }
    }

    /// `name` or `binding.name`.
    fn qualified_ident(&mut self, what: &str) -> PResult<Ident> {
        let first = self.ident(what)?;
        if self.at(&TokenKind::Dot) {
            self.advance();
            let second = self.ident("a field name")?;
            Ok(Ident { name: format!("{}.{}", first.name, second.name), span: first.span })
        } else {
            Ok(first)
        }
    }

    fn at_declaration(&self) -> bool {
        matches!(self.peek(), TokenKind::Keyword(k) if k.starts_declaration()) || self.at(&TokenKind::Eof)
    }

    fn recover_to_declaration(&mut self) {
        self.advance();
        while !self.at_declaration() {
            self.advance();
        }
    }

    /// Skips a malformed body item: to just past the next `;`, or up to a
    /// closing `}` or the next declaration.
    fn recover_in_body(&mut self) {
        let mut depth = 0usize;
        loop {
            match self.peek() {
                TokenKind::Eof => return,
                TokenKind::Keyword(k) if k.starts_declaration() => return,
                TokenKind::Semi if depth == 0 => {
                    self.advance();
                    return;
                }
                TokenKind::RBrace if depth == 0 => return,
                TokenKind::LBrace => depth += 1,
                TokenKind::RBrace => depth -= 1,
                _ => {}
            }
            self.advance();
        }
    }

    pub(crate) fn document(&mut self) -> SpecDocument {
        let mut doc = SpecDocument::default();
        while !self.at(&TokenKind::Eof) {
            let result = match self.peek() {
                TokenKind::Keyword(Keyword::Quantity) => self.quantity().map(|d| doc.quantities.push(d)),
                TokenKind::Keyword(Keyword::Component) => self.component().map(|d| doc.components.push(d)),
                TokenKind::Keyword(Keyword::Operator) => self.operator().map(|d| doc.operators.push(d)),
                TokenKind::Keyword(Keyword::Contract) => self.contract().map(|d| doc.contracts.push(d)),
                TokenKind::Keyword(Keyword::Refinement) => self.refinement().map(|d| doc.refinements.push(d)),
                _ => Err(self.error(&["a declaration"])),
            };
            if let Err(d) = result {
                self.diags.push(d);
                self.recover_to_declaration();
            }
        }
        doc
    }

    fn quantity(&mut self) -> PResult<QuantityDecl> {
        self.expect_keyword(Keyword::Quantity)?;
        let name = self.ident("a quantity name")?;
        let def = match self.peek() {
            TokenKind::Semi => QuantityDef::Base,
            TokenKind::Eq => {
                self.advance();
                QuantityDef::Derived(self.monomial()?)
            }
            TokenKind::Subtype => {
                self.advance();
                QuantityDef::Subdomain(self.ident("a parent quantity")?)
            }
            _ => return Err(self.error(&["`;`", "`=`", "`<:`"])),
        };
        self.expect(TokenKind::Semi)?;
        Ok(QuantityDecl { name, def })
    }

    fn monomial(&mut self) -> PResult<Vec<(Ident, i32)>> {
        let mut factors = vec![self.factor(1)?];
        loop {
            let sign = match self.peek() {
                TokenKind::Star => 1,
                TokenKind::Slash => -1,
                _ => return Ok(factors),
            };
            self.advance();
            factors.push(self.factor(sign)?);
        }
    }

    fn factor(&mut self, sign: i32) -> PResult<(Ident, i32)> {
        let name = self.ident("a quantity name")?;
        let mut exp = 1;
        if self.eat(&TokenKind::Caret) {
            let neg = self.eat(&TokenKind::Minus);
            let value = match self.peek().clone() {
                TokenKind::Number { value, integer: true } => value,
                _ => return Err(self.error(&["an integer exponent"])),
            };
            let span = self.advance().span;
            exp = value.to_integer().to_i32().ok_or_else(|| {
                Diagnostic::new(
                    DiagnosticKind::SyntaxError { expected: vec!["a small exponent".into()], found: value.to_string() },
                    span,
                )
            })?;
            if neg {
                exp = -exp;
            }
        }
        Ok((name, sign * exp))
    }

    fn component(&mut self) -> PResult<ComponentDecl> {
        self.expect_keyword(Keyword::Component)?;
        let name = self.ident("a component type name")?;
        let supertype = if self.eat(&TokenKind::Subtype) { Some(self.ident("a supertype name")?) } else { None };
        self.expect(TokenKind::LBrace)?;
        let mut fields = Vec::new();
        while !self.at(&TokenKind::RBrace) {
            if self.at_declaration() {
                return Err(self.error(&["`}`"]));
            }
            match self.field() {
                Ok(f) => fields.push(f),
                Err(d) => {
                    self.diags.push(d);
                    self.recover_in_body();
                }
            }
        }
        self.expect(TokenKind::RBrace)?;
        Ok(ComponentDecl { name, supertype, fields })
    }

    fn field(&mut self) -> PResult<FieldDecl> {
        let name = self.ident("a field name")?;
        self.expect(TokenKind::Colon)?;
        let quantity = self.ident("a quantity name")?;
        self.expect(TokenKind::Semi)?;
        Ok(FieldDecl { name, quantity })
    }

    fn operator(&mut self) -> PResult<OperatorDecl> {
        self.expect_keyword(Keyword::Operator)?;
        let name = self.ident("an operator name")?;
        self.expect(TokenKind::LParen)?;
        let mut params = Vec::new();
        loop {
            let pname = self.ident("a parameter name")?;
            self.expect(TokenKind::Colon)?;
            let ty = self.ident("a component type name")?;
            params.push(ParamDecl { name: pname, ty });
            if !self.eat(&TokenKind::Comma) {
                break;
            }
        }
        self.expect(TokenKind::RParen)?;
        self.expect(TokenKind::Arrow)?;
        let result = self.ident("a result component type")?;
        self.expect(TokenKind::LBrace)?;
        let mut glue = Vec::new();
        while !self.at(&TokenKind::RBrace) {
            if self.at_declaration() {
                return Err(self.error(&["`}`"]));
            }
            let item = self.assertion().and_then(|a| self.expect(TokenKind::Semi).map(|_| a));
            match item {
                Ok(a) => glue.push(a),
                Err(d) => {
                    self.diags.push(d);
                    self.recover_in_body();
                }
            }
        }
        self.expect(TokenKind::RBrace)?;
        Ok(OperatorDecl { name, params, result, glue })
    }

    fn contract(&mut self) -> PResult<ContractDecl> {
        self.expect_keyword(Keyword::Contract)?;
        let name = self.ident("a contract name")?;
        self.expect_keyword(Keyword::For)?;
        let subject = self.ident("a component type name")?;
        self.expect(TokenKind::LBrace)?;
        let mut assumption = None;
        let mut guarantee = None;
        while !self.at(&TokenKind::RBrace) {
            if self.at_declaration() {
                return Err(self.error(&["`}`"]));
            }
            let item = (|| {
                let is_assume = if self.at_keyword(Keyword::Assume) {
                    true
                } else if self.at_keyword(Keyword::Guarantee) {
                    false
                } else {
                    return Err(self.error(&["`assume`", "`guarantee`", "`}`"]));
                };
                let slot = if is_assume { &assumption } else { &guarantee };
                if slot.is_some() {
                    return Err(self.error(&["a single clause of each kind"]));
                }
                self.advance();
                let a = self.assertion()?;
                self.expect(TokenKind::Semi)?;
                Ok((is_assume, a))
            })();
            match item {
                Ok((true, a)) => assumption = Some(a),
                Ok((false, a)) => guarantee = Some(a),
                Err(d) => {
                    self.diags.push(d);
                    self.recover_in_body();
                }
            }
        }
        self.expect(TokenKind::RBrace)?;
        Ok(ContractDecl {
            name,
            subject,
            assumption: assumption.unwrap_or(Assertion::Bool(true)),
            guarantee: guarantee.unwrap_or(Assertion::Bool(true)),
        })
    }

    fn refinement(&mut self) -> PResult<RefinementDecl> {
        self.expect_keyword(Keyword::Refinement)?;
        let name = self.ident("an obligation name")?;
        self.expect(TokenKind::Colon)?;
        let concrete = if self.at_keyword(Keyword::Compose) {
            self.advance();
            let operator = self.ident("an operator name")?;
            self.expect(TokenKind::LParen)?;
            let mut bindings = Vec::new();
            loop {
                let contract = self.ident("a contract name")?;
                self.expect_keyword(Keyword::As)?;
                let instance = self.ident("an instance name")?;
                bindings.push(BindingDecl { contract, instance });
                if !self.eat(&TokenKind::Comma) {
                    break;
                }
            }
            self.expect(TokenKind::RParen)?;
            ConcreteDecl::Compose { operator, bindings }
        } else {
            ConcreteDecl::Contract(self.ident("`compose` or a contract name")?)
        };
        self.expect(TokenKind::Le)?;
        let abstract_ = self.ident("an abstract contract name")?;
        let mut grid = Vec::new();
        if self.at_keyword(Keyword::Grid) {
            self.advance();
            self.expect(TokenKind::LBrace)?;
            while !self.at(&TokenKind::RBrace) {
                if self.at_declaration() {
                    return Err(self.error(&["`}`"]));
                }
                match self.grid_axis() {
                    Ok(axis) => grid.push(axis),
                    Err(d) => {
                        self.diags.push(d);
                        self.recover_in_body();
                    }
                }
            }
            self.expect(TokenKind::RBrace)?;
        }
        self.expect(TokenKind::Semi)?;
        Ok(RefinementDecl { name, concrete, abstract_, grid })
    }

    fn grid_axis(&mut self) -> PResult<GridAxis> {
        let var = self.qualified_ident("a variable name")?;
        self.expect(TokenKind::Eq)?;
        let mut values = Vec::new();
        loop {
            let (lo, lo_int) = self.signed_number()?;
            if self.eat(&TokenKind::DotDot) {
                let (hi, hi_int) = self.signed_number()?;
                if !lo_int || !hi_int || hi < lo {
                    return Err(Diagnostic::new(
                        DiagnosticKind::SyntaxError {
                            expected: vec!["an ascending integer range".into()],
                            found: format!("{lo}..{hi}"),
                        },
                        var.span,
                    ));
                }
                let mut x = lo;
                while x <= hi {
                    values.push(x.clone());
                    x += Rat::from_integer(1.into());
                }
            } else {
                values.push(lo);
            }
            if !self.eat(&TokenKind::Comma) {
                break;
            }
        }
        self.expect(TokenKind::Semi)?;
        Ok(GridAxis { var, values })
    }

    fn signed_number(&mut self) -> PResult<(Rat, bool)> {
        let neg = self.eat(&TokenKind::Minus);
        match self.peek().clone() {
            TokenKind::Number { value, integer } => {
                self.advance();
                Ok((if neg { -value } else { value }, integer))
            }
            _ => Err(self.error(&["a number"])),
        }
    }

    // ---- expressions ----

    pub(crate) fn assertion(&mut self) -> PResult<Assertion> {
        let e = self.implies()?;
        to_assertion(e)
    }

    pub(crate) fn term(&mut self) -> PResult<Term> {
        let e = self.additive()?;
        to_term(e)
    }

    fn implies(&mut self) -> PResult<Expr> {
        let lhs = self.or()?;
        if self.at(&TokenKind::Implies) {
            let span = self.advance().span;
            let rhs = self.implies()?;
            return Ok(Expr::Logic(BoolOp::Implies, Box::new(lhs), Box::new(rhs), span));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> PResult<Expr> {
        let lhs = self.and()?;
        if self.at(&TokenKind::OrOr) {
            let span = self.advance().span;
            let rhs = self.or()?;
            return Ok(Expr::Logic(BoolOp::Or, Box::new(lhs), Box::new(rhs), span));
        }
        Ok(lhs)
    }

    fn and(&mut self) -> PResult<Expr> {
        let lhs = self.not()?;
        if self.at(&TokenKind::AndAnd) {
            let span = self.advance().span;
            let rhs = self.and()?;
            return Ok(Expr::Logic(BoolOp::And, Box::new(lhs), Box::new(rhs), span));
        }
        Ok(lhs)
    }

    fn not(&mut self) -> PResult<Expr> {
        if self.at(&TokenKind::Bang) {
            let span = self.advance().span;
            let inner = self.not()?;
            return Ok(Expr::Not(Box::new(inner), span));
        }
        self.comparison()
    }

    fn cmp_op(&self) -> Option<CmpOp> {
        Some(match self.peek() {
            TokenKind::Le => CmpOp::Le,
            TokenKind::Lt => CmpOp::Lt,
            TokenKind::Eq => CmpOp::Eq,
            TokenKind::Ne => CmpOp::Ne,
            TokenKind::Ge => CmpOp::Ge,
            TokenKind::Gt => CmpOp::Gt,
            _ => return None,
        })
    }

    fn comparison(&mut self) -> PResult<Expr> {
        let lhs = self.additive()?;
        if let Some(op) = self.cmp_op() {
            let span = self.advance().span;
            let rhs = self.additive()?;
            if self.cmp_op().is_some() {
                return Err(self.error(&["`;`", "a boolean connective (comparisons do not chain)"]));
            }
            return Ok(Expr::Cmp(op, Box::new(lhs), Box::new(rhs), span));
        }
        Ok(lhs)
    }

    fn additive(&mut self) -> PResult<Expr> {
        let mut lhs = self.multiplicative()?;
        loop {
            let op = match self.peek() {
                TokenKind::Plus => ArithOp::Add,
                TokenKind::Minus => ArithOp::Sub,
                _ => return Ok(lhs),
            };
            let span = self.advance().span;
            let rhs = self.multiplicative()?;
            lhs = Expr::Arith(op, Box::new(lhs), Box::new(rhs), span);
        }
    }

    fn multiplicative(&mut self) -> PResult<Expr> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                TokenKind::Star => ArithOp::Mul,
                TokenKind::Slash => ArithOp::Div,
                _ => return Ok(lhs),
            };
            let span = self.advance().span;
            let rhs = self.unary()?;
            lhs = Expr::Arith(op, Box::new(lhs), Box::new(rhs), span);
        }
    }

    fn unary(&mut self) -> PResult<Expr> {
        if self.at(&TokenKind::Minus) {
            let span = self.advance().span;
            // a minus sign directly on a literal folds into the constant
            if let TokenKind::Number { value, .. } = self.peek().clone() {
                self.advance();
                return Ok(Expr::Num(-value, span));
            }
            let inner = self.unary()?;
            return Ok(Expr::Neg(Box::new(inner), span));
        }
        self.primary()
    }

    fn primary(&mut self) -> PResult<Expr> {
        match self.peek().clone() {
            TokenKind::Number { value, .. } => {
                let span = self.advance().span;
                Ok(Expr::Num(value, span))
            }
            TokenKind::Ident(_) => {
                let id = self.qualified_ident("a variable")?;
                Ok(Expr::Var(id.name, id.span))
            }
            TokenKind::Keyword(Keyword::True) => Ok(Expr::Bool(true, self.advance().span)),
            TokenKind::Keyword(Keyword::False) => Ok(Expr::Bool(false, self.advance().span)),
            TokenKind::LParen => {
                self.advance();
                let inner = self.implies()?;
                self.expect(TokenKind::RParen)?;
                Ok(inner)
            }
            _ => Err(self.error(&["a number", "a variable", "`true`", "`false`", "`(`", "`-`", "`!`"])),
        }
    }

    pub(crate) fn expect_eof(&mut self) -> PResult<()> {
        if self.at(&TokenKind::Eof) {
            Ok(())
        } else {
            Err(self.error(&["end of input"]))
        }
    }
}

fn sort_error(span: Span, expected: &str, found: &str) -> Diagnostic {
    Diagnostic::new(
        DiagnosticKind::SyntaxError { expected: vec![expected.to_string()], found: found.to_string() },
        span,
    )
}

fn to_assertion(e: Expr) -> PResult<Assertion> {
    match e {
        Expr::Bool(b, _) => Ok(Assertion::Bool(b)),
        Expr::Not(inner, _) => Ok(Assertion::Not(Box::new(to_assertion(*inner)?))),
        Expr::Logic(op, a, b, _) => Ok(Assertion::Bin(op, Box::new(to_assertion(*a)?), Box::new(to_assertion(*b)?))),
        Expr::Cmp(op, a, b, span) => Ok(Assertion::Cmp { op, lhs: to_term(*a)?, rhs: to_term(*b)?, span }),
        other => Err(sort_error(other.span(), "an assertion", "an arithmetic term")),
    }
}

fn to_term(e: Expr) -> PResult<Term> {
    match e {
        Expr::Num(v, span) => Ok(Term { kind: TermKind::Const(v), span }),
        Expr::Var(v, span) => Ok(Term { kind: TermKind::Var(v), span }),
        Expr::Neg(inner, span) => Ok(Term { kind: TermKind::Neg(Box::new(to_term(*inner)?)), span }),
        Expr::Arith(op, a, b, span) => {
            Ok(Term { kind: TermKind::Bin(op, Box::new(to_term(*a)?), Box::new(to_term(*b)?)), span })
        }
        other => Err(sort_error(other.span(), "an arithmetic term", "an assertion")),
    }
}

/// Parses a document without name resolution; diagnostics cover syntax only.
pub fn parse_document(src: &str) -> (SpecDocument, Vec<Diagnostic>) {
    let mut p = Parser::new(src);
    let doc = p.document();
    (doc, p.diags)
}

/// Parses a standalone assertion such as `r = a.r + b.r`.
pub fn parse_assertion(src: &str) -> Result<Assertion, Vec<Diagnostic>> {
    let mut p = Parser::new(src);
    let result = p.assertion().and_then(|a| p.expect_eof().map(|_| a));
    match result {
        Ok(a) if p.diags.is_empty() => Ok(a),
        Ok(_) => Err(p.diags),
        Err(d) => {
            p.diags.push(d);
            Err(p.diags)
        }
    }
}

/// Parses a standalone arithmetic term such as `1 / (1 / a.r + 1 / b.r)`.
pub fn parse_term(src: &str) -> Result<Term, Vec<Diagnostic>> {
    let mut p = Parser::new(src);
    let result = p.term().and_then(|t| p.expect_eof().map(|_| t));
    match result {
        Ok(t) if p.diags.is_empty() => Ok(t),
        Ok(_) => Err(p.diags),
        Err(d) => {
            p.diags.push(d);
            Err(p.diags)
        }
    }
}
