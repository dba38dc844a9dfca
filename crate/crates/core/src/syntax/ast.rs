use crate::model::{Assertion, Rat, Span};

/// Identifier with its source location. Equality ignores the location.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ident {
    pub name: String,
    pub span: Span,
}

impl Ident {
    pub fn new(name: impl Into<String>) -> Self {
        Ident { name: name.into(), span: Span::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum QuantityDef {
    /// `quantity NAME;`
    Base,
    /// `quantity NAME = a * b / c^2;` as ordered `(quantity, exponent)` factors.
    Derived(Vec<(Ident, i32)>),
    /// `quantity NAME <: PARENT;`
    Subdomain(Ident),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuantityDecl {
    pub name: Ident,
    pub def: QuantityDef,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldDecl {
    pub name: Ident,
    pub quantity: Ident,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentDecl {
    pub name: Ident,
    pub supertype: Option<Ident>,
    pub fields: Vec<FieldDecl>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParamDecl {
    pub name: Ident,
    pub ty: Ident,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OperatorDecl {
    pub name: Ident,
    pub params: Vec<ParamDecl>,
    pub result: Ident,
    pub glue: Vec<Assertion>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContractDecl {
    pub name: Ident,
    pub subject: Ident,
    pub assumption: Assertion,
    pub guarantee: Assertion,
}

/// `CONTRACT as INSTANCE` inside a `compose` term.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BindingDecl {
    pub contract: Ident,
    pub instance: Ident,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConcreteDecl {
    Compose { operator: Ident, bindings: Vec<BindingDecl> },
    Contract(Ident),
}

/// One axis of a grid hint; `var` may be qualified (`c1.r`). Unqualified
/// variables apply to the parent and to every child of the composition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridAxis {
    pub var: Ident,
    pub values: Vec<Rat>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RefinementDecl {
    pub name: Ident,
    pub concrete: ConcreteDecl,
    pub abstract_: Ident,
    pub grid: Vec<GridAxis>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SpecDocument {
    pub quantities: Vec<QuantityDecl>,
    pub components: Vec<ComponentDecl>,
    pub operators: Vec<OperatorDecl>,
    pub contracts: Vec<ContractDecl>,
    pub refinements: Vec<RefinementDecl>,
}

impl SpecDocument {
    /// Appends every declaration of `other`.
    pub fn merge(&mut self, other: SpecDocument) {
        self.quantities.extend(other.quantities);
        self.components.extend(other.components);
        self.operators.extend(other.operators);
        self.contracts.extend(other.contracts);
        self.refinements.extend(other.refinements);
    }

    pub fn component(&self, name: &str) -> Option<&ComponentDecl> {
        self.components.iter().find(|c| c.name.name == name)
    }

    pub fn contract(&self, name: &str) -> Option<&ContractDecl> {
        self.contracts.iter().find(|c| c.name.name == name)
    }

    pub fn refinement(&self, name: &str) -> Option<&RefinementDecl> {
        self.refinements.iter().find(|r| r.name.name == name)
    }
}
