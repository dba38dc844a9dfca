use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::model::{Dimension, Span};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DiagnosticKind {
    #[error("expected {}, found {found}", expected.join(" or "))]
    SyntaxError { expected: Vec<String>, found: String },
    #[error("unresolved name `{0}`")]
    UnresolvedName(String),
    #[error("duplicate declaration of `{0}`")]
    DuplicateDeclaration(String),
    #[error("quantity `{0}` is declared more than once")]
    RedefinedQuantity(String),
    #[error("unknown quantity `{0}`")]
    UnknownQuantity(String),
    #[error("cyclic subtype chain: {}", .0.join(" <: "))]
    CyclicSubtype(Vec<String>),
    #[error("cyclic quantity definition: {}", .0.join(" -> "))]
    CyclicDefinition(Vec<String>),
    #[error("unknown component type `{0}`")]
    UnknownComponentType(String),
    #[error("field `{0}` is declared more than once")]
    DuplicateField(String),
    #[error("`{ty}` does not declare field `{field}` inherited from `{parent}`")]
    MissingInheritedField { ty: String, parent: String, field: String },
    #[error("field `{field}` of `{ty}` has quantity `{found}` but `{parent}` declares `{expected}`")]
    InheritedFieldMismatch { ty: String, parent: String, field: String, expected: String, found: String },
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: Dimension, right: Dimension },
    #[error("unknown binding `{0}`")]
    UnknownBinding(String),
    #[error("unknown field `{0}`")]
    UnknownField(String),
    #[error("parameter binding `{0}` is declared more than once")]
    DuplicateBinding(String),
    #[error("overloads of `{name}` share the parameter types ({})", params.join(", "))]
    DuplicateOverload { name: String, params: Vec<String> },
    #[error("no overload of `{name}` accepts ({})", args.join(", "))]
    NoMatchingOverload { name: String, args: Vec<String> },
    #[error("ambiguous call to `{name}`: candidates {}", candidates.join("; "))]
    AmbiguousOverload { name: String, candidates: Vec<String> },
    #[error("`{concrete}` is over `{found}` but `{abstract_}` is over `{expected}`")]
    SubjectTypeMismatch { concrete: String, abstract_: String, expected: String, found: String },
    #[error("invalid grid hint: {0}")]
    InvalidGrid(String),
    #[error("no refinement named `{0}`")]
    UnknownObligation(String),
    #[error("invalid option: {0}")]
    InvalidOption(String),
    #[error("cannot read input: {0}")]
    Io(String),
}

impl DiagnosticKind {
    pub fn code(&self) -> &'static str {
        match self {
            DiagnosticKind::SyntaxError { .. } => "SyntaxError",
            DiagnosticKind::UnresolvedName(_) => "UnresolvedName",
            DiagnosticKind::DuplicateDeclaration(_) => "DuplicateDeclaration",
            DiagnosticKind::RedefinedQuantity(_) => "RedefinedQuantity",
            DiagnosticKind::UnknownQuantity(_) => "UnknownQuantity",
            DiagnosticKind::CyclicSubtype(_) => "CyclicSubtype",
            DiagnosticKind::CyclicDefinition(_) => "CyclicDefinition",
            DiagnosticKind::UnknownComponentType(_) => "UnknownComponentType",
            DiagnosticKind::DuplicateField(_) => "DuplicateField",
            DiagnosticKind::MissingInheritedField { .. } => "MissingInheritedField",
            DiagnosticKind::InheritedFieldMismatch { .. } => "InheritedFieldMismatch",
            DiagnosticKind::DimensionMismatch { .. } => "DimensionMismatch",
            DiagnosticKind::UnknownBinding(_) => "UnknownBinding",
            DiagnosticKind::UnknownField(_) => "UnknownField",
            DiagnosticKind::DuplicateBinding(_) => "DuplicateBinding",
            DiagnosticKind::DuplicateOverload { .. } => "DuplicateOverload",
            DiagnosticKind::NoMatchingOverload { .. } => "NoMatchingOverload",
            DiagnosticKind::AmbiguousOverload { .. } => "AmbiguousOverload",
            DiagnosticKind::SubjectTypeMismatch { .. } => "SubjectTypeMismatch",
            DiagnosticKind::InvalidGrid(_) => "InvalidGrid",
            DiagnosticKind::UnknownObligation(_) => "UnknownObligation",
            DiagnosticKind::InvalidOption(_) => "InvalidOption",
            DiagnosticKind::Io(_) => "Io",
        }
    }
}

/// A located error produced by parsing or type checking.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub kind: DiagnosticKind,
    pub span: Option<Span>,
}

impl Diagnostic {
    pub fn new(kind: DiagnosticKind, span: Span) -> Self {
        Diagnostic { kind, span: Some(span) }
    }

    pub fn unlocated(kind: DiagnosticKind) -> Self {
        Diagnostic { kind, span: None }
    }

    pub fn to_record(&self, file: Option<&str>) -> DiagnosticRecord {
        DiagnosticRecord {
            code: self.kind.code().to_string(),
            message: self.kind.to_string(),
            file: file.map(str::to_string),
            line: self.span.map(|s| s.line),
            column: self.span.map(|s| s.column),
        }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.span {
            Some(s) => write!(f, "{s}: {}: {}", self.kind.code(), self.kind),
            None => write!(f, "{}: {}", self.kind.code(), self.kind),
        }
    }
}

/// Serializable form used in reports.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, serde::Deserialize)]
pub struct DiagnosticRecord {
    pub code: String,
    pub message: String,
    pub file: Option<String>,
    pub line: Option<usize>,
    pub column: Option<usize>,
}
