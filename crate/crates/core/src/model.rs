//! Domain model: exact rationals, quantity dimensions, assertions, component
//! types, contracts and composition operators, plus the finite-grid
//! semantics of contracts.
//!
//! A component is modelled as a static valuation: one rational per declared
//! field. A contract `(A, G)` is interpreted over a finite grid of such
//! valuations as the pair `(E, M)` where `E = {v : v |= A}` and
//! `M = {v : v |= A -> G}`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Exact rational number used for every constant and valuation.
pub type Rat = BigRational;

pub fn rat(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `p`, `-p`, `p/q` or a decimal such as `0.25` into an exact rational.
pub fn parse_rational(text: &str) -> Option<Rat> {
    let text = text.trim();
    let (neg, body) = match text.strip_prefix('-') {
        Some(rest) => (true, rest.trim_start()),
        None => (false, text),
    };
    if body.is_empty() {
        return None;
    }
    let value = if let Some((p, q)) = body.split_once('/') {
        let p: BigInt = p.trim().parse().ok()?;
        let q: BigInt = q.trim().parse().ok()?;
        if q.is_zero() {
            return None;
        }
        Rat::new(p, q)
    } else if let Some((int, frac)) = body.split_once('.') {
        if int.is_empty() || frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let int: BigInt = int.parse().ok()?;
        let digits: BigInt = frac.parse().ok()?;
        let scale = num_traits::pow(BigInt::from(10), frac.len());
        Rat::from_integer(int) + Rat::new(digits, scale)
    } else {
        if !body.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        Rat::from_integer(body.parse().ok()?)
    };
    Some(if neg { -value } else { value })
}

pub fn format_rational(r: &Rat) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Source position. Spans never take part in structural equality, so a
/// re-parsed document compares equal to the original regardless of layout.
#[derive(Debug, Clone, Copy, Default, Serialize, Deserialize)]
pub struct Span {
    pub offset: usize,
    pub len: usize,
    pub line: usize,
    pub column: usize,
}

impl PartialEq for Span {
    fn eq(&self, _: &Span) -> bool {
        true
    }
}

impl Eq for Span {}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

/// Dimension vector: integer exponents over base quantities. Zero exponents
/// are never stored, so structural equality is dimensional equality.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Dimension(BTreeMap<String, i32>);

impl Dimension {
    pub fn dimensionless() -> Self {
        Dimension(BTreeMap::new())
    }

    pub fn base(name: &str) -> Self {
        let mut map = BTreeMap::new();
        map.insert(name.to_string(), 1);
        Dimension(map)
    }

    pub fn from_exponents<I, S>(items: I) -> Self
    where
        I: IntoIterator<Item = (S, i32)>,
        S: Into<String>,
    {
        let mut d = Dimension::dimensionless();
        for (name, exp) in items {
            d.add_exponent(name.into(), exp);
        }
        d
    }

    fn add_exponent(&mut self, name: String, exp: i32) {
        let slot = self.0.entry(name.clone()).or_insert(0);
        *slot += exp;
        if *slot == 0 {
            self.0.remove(&name);
        }
    }

    pub fn is_dimensionless(&self) -> bool {
        self.0.is_empty()
    }

    pub fn exponents(&self) -> &BTreeMap<String, i32> {
        &self.0
    }

    pub fn pow(&self, n: i32) -> Dimension {
        Dimension::from_exponents(self.0.iter().map(|(k, e)| (k.clone(), e * n)))
    }

    pub fn inverse(&self) -> Dimension {
        self.pow(-1)
    }
}

impl ops::Mul for &Dimension {
    type Output = Dimension;
    fn mul(self, rhs: &Dimension) -> Dimension {
        let mut out = self.clone();
        for (k, e) in &rhs.0 {
            out.add_exponent(k.clone(), *e);
        }
        out
    }
}

impl ops::Div for &Dimension {
    type Output = Dimension;
    fn div(self, rhs: &Dimension) -> Dimension {
        self * &rhs.inverse()
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|(k, e)| if *e == 1 { k.clone() } else { format!("{k}^{e}") })
            .collect();
        f.write_str(&parts.join("*"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl ArithOp {
    pub fn symbol(self) -> &'static str {
        match self {
            ArithOp::Add => "+",
            ArithOp::Sub => "-",
            ArithOp::Mul => "*",
            ArithOp::Div => "/",
        }
    }

    fn precedence(self) -> u8 {
        match self {
            ArithOp::Add | ArithOp::Sub => PREC_ADD,
            ArithOp::Mul | ArithOp::Div => PREC_MUL,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CmpOp {
    Le,
    Lt,
    Eq,
    Ne,
    Ge,
    Gt,
}

impl CmpOp {
    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Le => "<=",
            CmpOp::Lt => "<",
            CmpOp::Eq => "=",
            CmpOp::Ne => "!=",
            CmpOp::Ge => ">=",
            CmpOp::Gt => ">",
        }
    }

    pub fn negate(self) -> CmpOp {
        match self {
            CmpOp::Le => CmpOp::Gt,
            CmpOp::Lt => CmpOp::Ge,
            CmpOp::Eq => CmpOp::Ne,
            CmpOp::Ne => CmpOp::Eq,
            CmpOp::Ge => CmpOp::Lt,
            CmpOp::Gt => CmpOp::Le,
        }
    }

    pub fn holds(self, lhs: &Rat, rhs: &Rat) -> bool {
        match self {
            CmpOp::Le => lhs <= rhs,
            CmpOp::Lt => lhs < rhs,
            CmpOp::Eq => lhs == rhs,
            CmpOp::Ne => lhs != rhs,
            CmpOp::Ge => lhs >= rhs,
            CmpOp::Gt => lhs > rhs,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BoolOp {
    And,
    Or,
    Implies,
}

impl BoolOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BoolOp::And => "&&",
            BoolOp::Or => "||",
            BoolOp::Implies => "=>",
        }
    }

    fn precedence(self) -> u8 {
        match self {
            BoolOp::Implies => PREC_IMPLIES,
            BoolOp::Or => PREC_OR,
            BoolOp::And => PREC_AND,
        }
    }
}

// Precedence levels shared by the formatter and the parser.
pub(crate) const PREC_IMPLIES: u8 = 1;
pub(crate) const PREC_OR: u8 = 2;
pub(crate) const PREC_AND: u8 = 3;
pub(crate) const PREC_NOT: u8 = 4;
pub(crate) const PREC_CMP: u8 = 5;
pub(crate) const PREC_ADD: u8 = 6;
pub(crate) const PREC_MUL: u8 = 7;
pub(crate) const PREC_NEG: u8 = 8;
pub(crate) const PREC_ATOM: u8 = 9;

/// Arithmetic term over quantity-typed variables. Variable names may be
/// qualified by a binding name, e.g. `c1.r`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Term {
    pub kind: TermKind,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TermKind {
    Const(Rat),
    Var(String),
    Neg(Box<Term>),
    Bin(ArithOp, Box<Term>, Box<Term>),
}

impl Term {
    pub fn new(kind: TermKind) -> Self {
        Term { kind, span: Span::default() }
    }

    pub fn constant(value: Rat) -> Self {
        Term::new(TermKind::Const(value))
    }

    pub fn int(n: i64) -> Self {
        Term::constant(rat(n))
    }

    pub fn var(name: impl Into<String>) -> Self {
        Term::new(TermKind::Var(name.into()))
    }

    pub fn bin(op: ArithOp, lhs: Term, rhs: Term) -> Self {
        Term::new(TermKind::Bin(op, Box::new(lhs), Box::new(rhs)))
    }

    pub fn with_span(mut self, span: Span) -> Self {
        self.span = span;
        self
    }

    pub fn cmp(self, op: CmpOp, rhs: Term) -> Assertion {
        Assertion::Cmp { op, lhs: self, rhs, span: Span::default() }
    }

    pub fn eq(self, rhs: Term) -> Assertion {
        self.cmp(CmpOp::Eq, rhs)
    }

    pub fn le(self, rhs: Term) -> Assertion {
        self.cmp(CmpOp::Le, rhs)
    }

    pub fn ge(self, rhs: Term) -> Assertion {
        self.cmp(CmpOp::Ge, rhs)
    }

    pub fn lt(self, rhs: Term) -> Assertion {
        self.cmp(CmpOp::Lt, rhs)
    }

    pub fn gt(self, rhs: Term) -> Assertion {
        self.cmp(CmpOp::Gt, rhs)
    }

    pub fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match &self.kind {
            TermKind::Const(_) => {}
            TermKind::Var(v) => {
                out.insert(v.clone());
            }
            TermKind::Neg(t) => t.collect_vars(out),
            TermKind::Bin(_, a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
        }
    }

    /// Exact value under `val`; `None` when a variable is unbound or a
    /// divisor evaluates to zero.
    pub fn eval(&self, val: &Valuation) -> Option<Rat> {
        match &self.kind {
            TermKind::Const(c) => Some(c.clone()),
            TermKind::Var(v) => val.get(v).cloned(),
            TermKind::Neg(t) => t.eval(val).map(|x| -x),
            TermKind::Bin(op, a, b) => {
                let x = a.eval(val)?;
                let y = b.eval(val)?;
                match op {
                    ArithOp::Add => Some(x + y),
                    ArithOp::Sub => Some(x - y),
                    ArithOp::Mul => Some(x * y),
                    ArithOp::Div => {
                        if y.is_zero() {
                            None
                        } else {
                            Some(x / y)
                        }
                    }
                }
            }
        }
    }

    pub fn map_vars(&self, f: &impl Fn(&str) -> String) -> Term {
        let kind = match &self.kind {
            TermKind::Const(c) => TermKind::Const(c.clone()),
            TermKind::Var(v) => TermKind::Var(f(v)),
            TermKind::Neg(t) => TermKind::Neg(Box::new(t.map_vars(f))),
            TermKind::Bin(op, a, b) => {
                TermKind::Bin(*op, Box::new(a.map_vars(f)), Box::new(b.map_vars(f)))
            }
        };
        Term { kind, span: self.span }
    }

    /// Replaces variables bound in `val` by their values.
    pub fn substitute(&self, val: &Valuation) -> Term {
        let kind = match &self.kind {
            TermKind::Var(v) => match val.get(v) {
                Some(x) => TermKind::Const(x.clone()),
                None => TermKind::Var(v.clone()),
            },
            TermKind::Const(c) => TermKind::Const(c.clone()),
            TermKind::Neg(t) => TermKind::Neg(Box::new(t.substitute(val))),
            TermKind::Bin(op, a, b) => TermKind::Bin(*op, Box::new(a.substitute(val)), Box::new(b.substitute(val))),
        };
        Term { kind, span: self.span }
    }

    fn precedence(&self) -> u8 {
        match &self.kind {
            TermKind::Const(c) if c.is_negative() => PREC_NEG,
            TermKind::Const(_) | TermKind::Var(_) => PREC_ATOM,
            TermKind::Neg(_) => PREC_NEG,
            TermKind::Bin(op, _, _) => op.precedence(),
        }
    }

    fn fmt_operand(&self, f: &mut fmt::Formatter<'_>, min_prec: u8, in_product: bool) -> fmt::Result {
        let fraction = matches!(&self.kind, TermKind::Const(c) if !c.is_integer());
        if self.precedence() < min_prec || (in_product && fraction) {
            write!(f, "({self})")
        } else {
            write!(f, "{self}")
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            TermKind::Const(c) => f.write_str(&format_rational(c)),
            TermKind::Var(v) => f.write_str(v),
            TermKind::Neg(t) => {
                f.write_str("-")?;
                if matches!(t.kind, TermKind::Const(_)) {
                    write!(f, "({t})")
                } else {
                    t.fmt_operand(f, PREC_NEG, false)
                }
            }
            TermKind::Bin(op, a, b) => {
                let p = op.precedence();
                let in_product = p == PREC_MUL;
                a.fmt_operand(f, p, in_product)?;
                write!(f, " {} ", op.symbol())?;
                b.fmt_operand(f, p + 1, in_product)
            }
        }
    }
}

impl ops::Add for Term {
    type Output = Term;
    fn add(self, rhs: Term) -> Term {
        Term::bin(ArithOp::Add, self, rhs)
    }
}

impl ops::Sub for Term {
    type Output = Term;
    fn sub(self, rhs: Term) -> Term {
        Term::bin(ArithOp::Sub, self, rhs)
    }
}

impl ops::Mul for Term {
    type Output = Term;
    fn mul(self, rhs: Term) -> Term {
        Term::bin(ArithOp::Mul, self, rhs)
    }
}

impl ops::Div for Term {
    type Output = Term;
    fn div(self, rhs: Term) -> Term {
        Term::bin(ArithOp::Div, self, rhs)
    }
}

impl ops::Neg for Term {
    type Output = Term;
    fn neg(self) -> Term {
        Term::new(TermKind::Neg(Box::new(self)))
    }
}

/// Boolean constraint over arithmetic terms.
///
/// A comparison whose terms are undefined (division by zero) is false; the
/// connectives are classical on top of that.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Assertion {
    Bool(bool),
    Cmp { op: CmpOp, lhs: Term, rhs: Term, span: Span },
    Not(Box<Assertion>),
    Bin(BoolOp, Box<Assertion>, Box<Assertion>),
}

impl Assertion {
    pub fn truth() -> Self {
        Assertion::Bool(true)
    }

    pub fn falsity() -> Self {
        Assertion::Bool(false)
    }

    pub fn and(self, rhs: Assertion) -> Self {
        Assertion::Bin(BoolOp::And, Box::new(self), Box::new(rhs))
    }

    pub fn or(self, rhs: Assertion) -> Self {
        Assertion::Bin(BoolOp::Or, Box::new(self), Box::new(rhs))
    }

    pub fn implies(self, rhs: Assertion) -> Self {
        Assertion::Bin(BoolOp::Implies, Box::new(self), Box::new(rhs))
    }

    pub fn negate(self) -> Self {
        Assertion::Not(Box::new(self))
    }

    /// Right-nested conjunction; `true` for an empty list.
    pub fn conjunction(items: impl IntoIterator<Item = Assertion>) -> Self {
        fold_right(items.into_iter().collect(), BoolOp::And, true)
    }

    /// Right-nested disjunction; `false` for an empty list.
    pub fn disjunction(items: impl IntoIterator<Item = Assertion>) -> Self {
        fold_right(items.into_iter().collect(), BoolOp::Or, false)
    }

    pub fn vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    pub fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Assertion::Bool(_) => {}
            Assertion::Cmp { lhs, rhs, .. } => {
                lhs.collect_vars(out);
                rhs.collect_vars(out);
            }
            Assertion::Not(a) => a.collect_vars(out),
            Assertion::Bin(_, a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
        }
    }

    pub fn eval(&self, val: &Valuation) -> bool {
        match self {
            Assertion::Bool(b) => *b,
            Assertion::Cmp { op, lhs, rhs, .. } => match (lhs.eval(val), rhs.eval(val)) {
                (Some(x), Some(y)) => op.holds(&x, &y),
                _ => false,
            },
            Assertion::Not(a) => !a.eval(val),
            Assertion::Bin(op, a, b) => match op {
                BoolOp::And => a.eval(val) && b.eval(val),
                BoolOp::Or => a.eval(val) || b.eval(val),
                BoolOp::Implies => !a.eval(val) || b.eval(val),
            },
        }
    }

    pub fn map_vars(&self, f: &impl Fn(&str) -> String) -> Assertion {
        match self {
            Assertion::Bool(b) => Assertion::Bool(*b),
            Assertion::Cmp { op, lhs, rhs, span } => Assertion::Cmp {
                op: *op,
                lhs: lhs.map_vars(f),
                rhs: rhs.map_vars(f),
                span: *span,
            },
            Assertion::Not(a) => Assertion::Not(Box::new(a.map_vars(f))),
            Assertion::Bin(op, a, b) => {
                Assertion::Bin(*op, Box::new(a.map_vars(f)), Box::new(b.map_vars(f)))
            }
        }
    }

    pub fn substitute(&self, val: &Valuation) -> Assertion {
        match self {
            Assertion::Bool(b) => Assertion::Bool(*b),
            Assertion::Cmp { op, lhs, rhs, span } => {
                Assertion::Cmp { op: *op, lhs: lhs.substitute(val), rhs: rhs.substitute(val), span: *span }
            }
            Assertion::Not(a) => Assertion::Not(Box::new(a.substitute(val))),
            Assertion::Bin(op, a, b) => Assertion::Bin(*op, Box::new(a.substitute(val)), Box::new(b.substitute(val))),
        }
    }

    /// Prefixes every variable with `prefix.`.
    pub fn qualify(&self, prefix: &str) -> Assertion {
        self.map_vars(&|v| format!("{prefix}.{v}"))
    }

    fn precedence(&self) -> u8 {
        match self {
            Assertion::Bool(_) => PREC_ATOM,
            Assertion::Cmp { .. } => PREC_CMP,
            Assertion::Not(_) => PREC_NOT,
            Assertion::Bin(op, _, _) => op.precedence(),
        }
    }

    fn fmt_operand(&self, f: &mut fmt::Formatter<'_>, min_prec: u8) -> fmt::Result {
        if self.precedence() < min_prec {
            write!(f, "({self})")
        } else {
            write!(f, "{self}")
        }
    }
}

fn fold_right(mut items: Vec<Assertion>, op: BoolOp, unit: bool) -> Assertion {
    let Some(mut acc) = items.pop() else {
        return Assertion::Bool(unit);
    };
    while let Some(next) = items.pop() {
        acc = Assertion::Bin(op, Box::new(next), Box::new(acc));
    }
    acc
}

impl fmt::Display for Assertion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Assertion::Bool(b) => write!(f, "{b}"),
            Assertion::Cmp { op, lhs, rhs, .. } => {
                lhs.fmt_operand(f, PREC_ADD, false)?;
                write!(f, " {} ", op.symbol())?;
                rhs.fmt_operand(f, PREC_ADD, false)
            }
            Assertion::Not(a) => {
                f.write_str("!")?;
                a.fmt_operand(f, PREC_ATOM)
            }
            Assertion::Bin(op, a, b) => {
                let p = op.precedence();
                // all binary connectives are right-associative
                a.fmt_operand(f, p + 1)?;
                write!(f, " {} ", op.symbol())?;
                b.fmt_operand(f, p)
            }
        }
    }
}

/// Assignment of exact values to variables.
pub type Valuation = BTreeMap<String, Rat>;

pub fn format_valuation(v: &Valuation) -> String {
    v.iter()
        .map(|(k, x)| format!("{k}={}", format_rational(x)))
        .collect::<Vec<_>>()
        .join(", ")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentType {
    pub name: String,
    /// Ordered `(field, quantity)` pairs.
    pub fields: Vec<(String, String)>,
    pub supertype: Option<String>,
}

impl ComponentType {
    pub fn new(name: impl Into<String>, fields: &[(&str, &str)]) -> Self {
        ComponentType {
            name: name.into(),
            fields: fields.iter().map(|(f, q)| (f.to_string(), q.to_string())).collect(),
            supertype: None,
        }
    }

    pub fn with_supertype(mut self, parent: impl Into<String>) -> Self {
        self.supertype = Some(parent.into());
        self
    }

    pub fn field_names(&self) -> Vec<String> {
        self.fields.iter().map(|(f, _)| f.clone()).collect()
    }

    pub fn quantity_of(&self, field: &str) -> Option<&str> {
        self.fields.iter().find(|(f, _)| f == field).map(|(_, q)| q.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Contract {
    pub name: String,
    pub subject: ComponentType,
    pub assumption: Assertion,
    pub guarantee: Assertion,
}

impl Contract {
    pub fn new(
        name: impl Into<String>,
        subject: ComponentType,
        assumption: Assertion,
        guarantee: Assertion,
    ) -> Self {
        Contract { name: name.into(), subject, assumption, guarantee }
    }

    /// The guarantee read receptively, `A -> G`.
    pub fn saturated_guarantee(&self) -> Assertion {
        self.assumption.clone().implies(self.guarantee.clone())
    }
}

/// Saturation: `(A, G)` becomes `(A, A -> G)`.
pub fn saturate(c: &Contract) -> Contract {
    Contract {
        name: c.name.clone(),
        subject: c.subject.clone(),
        assumption: c.assumption.clone(),
        guarantee: c.saturated_guarantee(),
    }
}

/// User-declared composition operator: a type signature (parameters and
/// result component types) plus the glue equations forming its term
/// signature. Glue refers to result fields unqualified and to parameter
/// fields as `binding.field`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompositionOperator {
    pub name: String,
    pub parameters: Vec<(String, ComponentType)>,
    pub result: ComponentType,
    pub glue: Vec<Assertion>,
}

impl CompositionOperator {
    pub fn parameter_types(&self) -> Vec<&str> {
        self.parameters.iter().map(|(_, t)| t.name.as_str()).collect()
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("grid has no values for variable `{0}`")]
    GridIncomplete(String),
    #[error("grid for variable `{0}` is empty")]
    EmptyGridAxis(String),
    #[error("interpretations are over different valuation spaces")]
    GridIncompatible,
    #[error("valuation space too large ({0} points)")]
    GridTooLarge(u128),
    #[error("valuation is not a point of the interpretation's space")]
    OutsideSpace,
}

/// A finite, ordered, duplicate-free set of rationals per variable.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FiniteGrid {
    axes: BTreeMap<String, Vec<Rat>>,
}

impl FiniteGrid {
    pub fn new() -> Self {
        FiniteGrid::default()
    }

    /// Sets the values of one variable; values are sorted and deduplicated.
    pub fn set(&mut self, var: impl Into<String>, values: impl IntoIterator<Item = Rat>) -> Result<(), ModelError> {
        let var = var.into();
        let mut values: Vec<Rat> = values.into_iter().collect();
        values.sort();
        values.dedup();
        if values.is_empty() {
            return Err(ModelError::EmptyGridAxis(var));
        }
        self.axes.insert(var, values);
        Ok(())
    }

    pub fn with(mut self, var: &str, values: impl IntoIterator<Item = Rat>) -> Self {
        self.set(var, values).expect("non-empty grid axis");
        self
    }

    pub fn with_ints(self, var: &str, values: impl IntoIterator<Item = i64>) -> Self {
        self.with(var, values.into_iter().map(rat))
    }

    pub fn axis(&self, var: &str) -> Option<&[Rat]> {
        self.axes.get(var).map(Vec::as_slice)
    }

    pub fn variables(&self) -> impl Iterator<Item = &String> {
        self.axes.keys()
    }

    pub fn contains_var(&self, var: &str) -> bool {
        self.axes.contains_key(var)
    }

    /// Grid restricted to `vars`; every variable must be covered.
    pub fn restrict<'a>(&self, vars: impl IntoIterator<Item = &'a String>) -> Result<FiniteGrid, ModelError> {
        let mut out = FiniteGrid::new();
        for v in vars {
            let axis = self.axes.get(v).ok_or_else(|| ModelError::GridIncomplete(v.clone()))?;
            out.axes.insert(v.clone(), axis.clone());
        }
        Ok(out)
    }

    /// Adds `value` to the axis of `var` (creating it if needed).
    pub fn insert_value(&mut self, var: &str, value: Rat) {
        let axis = self.axes.entry(var.to_string()).or_default();
        if let Err(pos) = axis.binary_search(&value) {
            axis.insert(pos, value);
        }
    }

    /// Number of valuations over all axes.
    pub fn size(&self) -> u128 {
        self.axes.values().fold(1u128, |acc, a| acc.saturating_mul(a.len() as u128))
    }

    /// Every valuation over all axes, in lexicographic odometer order.
    pub fn valuations(&self) -> Vec<Valuation> {
        let names: Vec<&String> = self.axes.keys().collect();
        let axes: Vec<&Vec<Rat>> = self.axes.values().collect();
        let mut out = Vec::new();
        let mut idx = vec![0usize; axes.len()];
        loop {
            let v: Valuation = names
                .iter()
                .zip(&axes)
                .zip(&idx)
                .map(|((n, a), i)| ((*n).clone(), a[*i].clone()))
                .collect();
            out.push(v);
            let mut k = axes.len();
            loop {
                if k == 0 {
                    return out;
                }
                k -= 1;
                idx[k] += 1;
                if idx[k] < axes[k].len() {
                    break;
                }
                idx[k] = 0;
            }
        }
    }
}

/// Finite interpretation `(E, M)` of a contract over a valuation space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Interpretation {
    pub space: FiniteGrid,
    pub environments: BTreeSet<Valuation>,
    pub implementations: BTreeSet<Valuation>,
}

impl Interpretation {
    pub fn new(
        space: FiniteGrid,
        environments: BTreeSet<Valuation>,
        implementations: BTreeSet<Valuation>,
    ) -> Result<Self, ModelError> {
        let inside = |v: &Valuation| {
            v.len() == space.axes.len()
                && v.iter().all(|(k, x)| space.axis(k).is_some_and(|a| a.binary_search(x).is_ok()))
        };
        if !environments.iter().chain(&implementations).all(inside) {
            return Err(ModelError::OutsideSpace);
        }
        Ok(Interpretation { space, environments, implementations })
    }

    pub fn is_compatible(&self) -> bool {
        !self.environments.is_empty()
    }

    pub fn is_consistent(&self) -> bool {
        !self.implementations.is_empty()
    }
}

/// Grid points above which finite interpretation refuses to enumerate.
pub const MAX_GRID_POINTS: u128 = 1 << 16;

pub fn interpret_finite(c: &Contract, grid: &FiniteGrid) -> Result<Interpretation, ModelError> {
    let fields = c.subject.field_names();
    let space = grid.restrict(&fields)?;
    if space.size() > MAX_GRID_POINTS {
        return Err(ModelError::GridTooLarge(space.size()));
    }
    let saturated = c.saturated_guarantee();
    let mut environments = BTreeSet::new();
    let mut implementations = BTreeSet::new();
    for v in space.valuations() {
        if c.assumption.eval(&v) {
            environments.insert(v.clone());
        }
        if saturated.eval(&v) {
            implementations.insert(v);
        }
    }
    Ok(Interpretation { space, environments, implementations })
}

/// `concrete` refines `abstract_` iff it accepts every abstract environment
/// and has no implementation the abstract contract rejects.
pub fn refines_finite(concrete: &Interpretation, abstract_: &Interpretation) -> Result<bool, ModelError> {
    if concrete.space != abstract_.space {
        return Err(ModelError::GridIncompatible);
    }
    Ok(abstract_.environments.is_subset(&concrete.environments)
        && concrete.implementations.is_subset(&abstract_.implementations))
}
