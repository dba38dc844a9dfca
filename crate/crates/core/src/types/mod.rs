//! Structural checks: the quantity (subdomain) hierarchy, dimensional
//! consistency of assertions and glue, component-type well-formedness, and
//! overload resolution of composition operators.

mod program;

use std::collections::{BTreeMap, BTreeSet};

pub use program::{elaborate, ConcreteTerm, Obligation, Program};

use crate::diagnostics::{Diagnostic, DiagnosticKind};
use crate::model::{
    ArithOp, Assertion, ComponentType, CompositionOperator, Contract, Dimension, Span, Term, TermKind,
};
use crate::syntax::{QuantityDecl, QuantityDef};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuantityInfo {
    pub dimension: Dimension,
    /// Parent in the subdomain forest, for `quantity q <: parent;`.
    pub parent: Option<String>,
}

/// The quantity hierarchy: dimensions plus the subdomain partial order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct QuantityTable {
    quantities: BTreeMap<String, QuantityInfo>,
}

impl QuantityTable {
    pub fn dimension(&self, quantity: &str) -> Option<&Dimension> {
        self.quantities.get(quantity).map(|q| &q.dimension)
    }

    pub fn contains(&self, quantity: &str) -> bool {
        self.quantities.contains_key(quantity)
    }

    pub fn info(&self, quantity: &str) -> Option<&QuantityInfo> {
        self.quantities.get(quantity)
    }

    pub fn names(&self) -> impl Iterator<Item = &String> {
        self.quantities.keys()
    }

    /// Reflexive-transitive subdomain order.
    pub fn is_subquantity(&self, sub: &str, sup: &str) -> bool {
        let mut cur = Some(sub);
        let mut steps = 0;
        while let Some(q) = cur {
            if q == sup {
                return true;
            }
            steps += 1;
            if steps > self.quantities.len() {
                return false;
            }
            cur = self.quantities.get(q).and_then(|i| i.parent.as_deref());
        }
        false
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Visit {
    Active,
    Done,
}

/// Builds the quantity table. Base quantities get the singleton dimension,
/// derived quantities the normalized product of their factors, and
/// subdomains inherit their parent's dimension.
pub fn build_hierarchy(decls: &[QuantityDecl]) -> Result<QuantityTable, Vec<Diagnostic>> {
    let mut diags = Vec::new();
    let mut by_name: BTreeMap<&str, &QuantityDecl> = BTreeMap::new();
    for d in decls {
        if by_name.insert(d.name.name.as_str(), d).is_some() {
            diags.push(Diagnostic::new(DiagnosticKind::RedefinedQuantity(d.name.name.clone()), d.name.span));
        }
    }
    for d in decls {
        let refs: Vec<&crate::syntax::Ident> = match &d.def {
            QuantityDef::Base => vec![],
            QuantityDef::Derived(f) => f.iter().map(|(i, _)| i).collect(),
            QuantityDef::Subdomain(p) => vec![p],
        };
        for r in refs {
            if !by_name.contains_key(r.name.as_str()) {
                diags.push(Diagnostic::new(DiagnosticKind::UnknownQuantity(r.name.clone()), r.span));
            }
        }
    }
    if !diags.is_empty() {
        return Err(diags);
    }

    let mut state: BTreeMap<&str, Visit> = BTreeMap::new();
    let mut dims: BTreeMap<String, Dimension> = BTreeMap::new();
    let mut reported: BTreeSet<Vec<String>> = BTreeSet::new();
    for d in decls {
        let mut stack = Vec::new();
        visit(d.name.name.as_str(), &by_name, &mut state, &mut dims, &mut stack, &mut diags, &mut reported);
    }
    if !diags.is_empty() {
        return Err(diags);
    }
    let quantities = by_name
        .iter()
        .map(|(name, d)| {
            let parent = match &d.def {
                QuantityDef::Subdomain(p) => Some(p.name.clone()),
                _ => None,
            };
            (name.to_string(), QuantityInfo { dimension: dims[*name].clone(), parent })
        })
        .collect();
    Ok(QuantityTable { quantities })
}

fn visit<'a>(
    name: &'a str,
    decls: &BTreeMap<&'a str, &'a QuantityDecl>,
    state: &mut BTreeMap<&'a str, Visit>,
    dims: &mut BTreeMap<String, Dimension>,
    stack: &mut Vec<&'a str>,
    diags: &mut Vec<Diagnostic>,
    reported: &mut BTreeSet<Vec<String>>,
) -> Option<Dimension> {
    match state.get(name) {
        Some(Visit::Done) => return dims.get(name).cloned(),
        Some(Visit::Active) => {
            let start = stack.iter().position(|n| *n == name).unwrap_or(0);
            let path: Vec<String> = stack[start..].iter().map(|s| s.to_string()).collect();
            let all_subdomain = stack[start..]
                .iter()
                .all(|n| matches!(decls[n].def, QuantityDef::Subdomain(_)));
            let mut key = path.clone();
            key.sort();
            if reported.insert(key) {
                let span = decls[stack[start]].name.span;
                let kind = if all_subdomain {
                    DiagnosticKind::CyclicSubtype(path)
                } else {
                    DiagnosticKind::CyclicDefinition(path)
                };
                diags.push(Diagnostic::new(kind, span));
            }
            return None;
        }
        None => {}
    }
    let decl = decls[name];
    state.insert(name, Visit::Active);
    stack.push(name);
    let dim = match &decl.def {
        QuantityDef::Base => Some(Dimension::base(name)),
        QuantityDef::Subdomain(parent) => visit(parent.name.as_str(), decls, state, dims, stack, diags, reported),
        QuantityDef::Derived(factors) => {
            let mut acc = Some(Dimension::dimensionless());
            for (f, exp) in factors {
                let fd = visit(f.name.as_str(), decls, state, dims, stack, diags, reported);
                acc = match (acc, fd) {
                    (Some(a), Some(b)) => Some(&a * &b.pow(*exp)),
                    _ => None,
                };
            }
            acc
        }
    };
    stack.pop();
    state.insert(name, Visit::Done);
    if let Some(d) = &dim {
        dims.insert(name.to_string(), d.clone());
    }
    dim
}

/// Declared component types with the nominal subtype order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ComponentTypes {
    types: BTreeMap<String, ComponentType>,
}

impl ComponentTypes {
    pub fn new() -> Self {
        ComponentTypes::default()
    }

    pub fn insert(&mut self, ct: ComponentType) {
        self.types.insert(ct.name.clone(), ct);
    }

    pub fn get(&self, name: &str) -> Option<&ComponentType> {
        self.types.get(name)
    }

    pub fn iter(&self) -> impl Iterator<Item = &ComponentType> {
        self.types.values()
    }

    /// Reflexive-transitive subtype order along supertype chains.
    pub fn is_subtype(&self, sub: &str, sup: &str) -> bool {
        let mut cur = Some(sub);
        let mut steps = 0;
        while let Some(t) = cur {
            if t == sup {
                return true;
            }
            steps += 1;
            if steps > self.types.len() {
                return false;
            }
            cur = self.types.get(t).and_then(|c| c.supertype.as_deref());
        }
        false
    }

    pub fn is_strict_subtype(&self, sub: &str, sup: &str) -> bool {
        sub != sup && self.is_subtype(sub, sup)
    }
}

impl FromIterator<ComponentType> for ComponentTypes {
    fn from_iter<I: IntoIterator<Item = ComponentType>>(iter: I) -> Self {
        let mut out = ComponentTypes::new();
        for ct in iter {
            out.insert(ct);
        }
        out
    }
}

/// Checks field quantities, field uniqueness, acyclicity of the supertype
/// chain and that every inherited field is present with the same quantity.
pub fn check_component_type(ct: &ComponentType, table: &QuantityTable, types: &ComponentTypes) -> Vec<Diagnostic> {
    let mut diags = Vec::new();
    let mut seen = BTreeSet::new();
    for (field, quantity) in &ct.fields {
        if !seen.insert(field.as_str()) {
            diags.push(Diagnostic::unlocated(DiagnosticKind::DuplicateField(field.clone())));
        }
        if !table.contains(quantity) {
            diags.push(Diagnostic::unlocated(DiagnosticKind::UnknownQuantity(quantity.clone())));
        }
    }
    let mut chain = vec![ct.name.clone()];
    let mut cur = ct.supertype.clone();
    while let Some(parent_name) = cur {
        if chain.contains(&parent_name) {
            chain.push(parent_name);
            diags.push(Diagnostic::unlocated(DiagnosticKind::CyclicSubtype(chain)));
            return diags;
        }
        let Some(parent) = types.get(&parent_name) else {
            diags.push(Diagnostic::unlocated(DiagnosticKind::UnknownComponentType(parent_name)));
            return diags;
        };
        // the direct parent's fields; deeper ancestors are checked for the parent itself
        if chain.len() == 1 {
            for (field, quantity) in &parent.fields {
                match ct.quantity_of(field) {
                    None => diags.push(Diagnostic::unlocated(DiagnosticKind::MissingInheritedField {
                        ty: ct.name.clone(),
                        parent: parent.name.clone(),
                        field: field.clone(),
                    })),
                    Some(q) if q != quantity => {
                        diags.push(Diagnostic::unlocated(DiagnosticKind::InheritedFieldMismatch {
                            ty: ct.name.clone(),
                            parent: parent.name.clone(),
                            field: field.clone(),
                            expected: quantity.clone(),
                            found: q.to_string(),
                        }))
                    }
                    Some(_) => {}
                }
            }
        }
        chain.push(parent_name);
        cur = parent.supertype.clone();
    }
    diags
}

/// Variables visible to an assertion, mapped to their quantity.
#[derive(Debug, Clone, Default)]
pub struct Scope {
    vars: BTreeMap<String, String>,
    bindings: BTreeSet<String>,
}

impl Scope {
    /// The unqualified fields of one component type.
    pub fn for_component(ct: &ComponentType) -> Self {
        Scope { vars: ct.fields.iter().cloned().collect(), bindings: BTreeSet::new() }
    }

    /// Result fields unqualified and parameter fields as `binding.field`.
    pub fn for_operator(op: &CompositionOperator) -> Self {
        let mut scope = Scope::for_component(&op.result);
        for (binding, ty) in &op.parameters {
            scope.bindings.insert(binding.clone());
            for (f, q) in &ty.fields {
                scope.vars.insert(format!("{binding}.{f}"), q.clone());
            }
        }
        scope
    }

    pub fn quantity(&self, var: &str) -> Result<&str, DiagnosticKind> {
        if let Some(q) = self.vars.get(var) {
            return Ok(q);
        }
        match var.split_once('.') {
            Some((binding, _)) if !self.bindings.contains(binding) => {
                Err(DiagnosticKind::UnknownBinding(binding.to_string()))
            }
            _ => Err(DiagnosticKind::UnknownField(var.to_string())),
        }
    }
}

struct Inferred {
    dim: Dimension,
    /// Constant-only terms take the dimension demanded by their context.
    ground: bool,
}

fn infer(term: &Term, scope: &Scope, table: &QuantityTable) -> Result<Inferred, Diagnostic> {
    match &term.kind {
        TermKind::Const(_) => Ok(Inferred { dim: Dimension::dimensionless(), ground: true }),
        TermKind::Var(v) => {
            let q = scope.quantity(v).map_err(|k| Diagnostic::new(k, term.span))?;
            let dim = table
                .dimension(q)
                .cloned()
                .ok_or_else(|| Diagnostic::new(DiagnosticKind::UnknownQuantity(q.to_string()), term.span))?;
            Ok(Inferred { dim, ground: false })
        }
        TermKind::Neg(t) => infer(t, scope, table),
        TermKind::Bin(op, a, b) => {
            let x = infer(a, scope, table)?;
            let y = infer(b, scope, table)?;
            match op {
                ArithOp::Add | ArithOp::Sub => unify(x, y, term.span),
                ArithOp::Mul => Ok(Inferred { dim: &x.dim * &y.dim, ground: x.ground && y.ground }),
                ArithOp::Div => Ok(Inferred { dim: &x.dim / &y.dim, ground: x.ground && y.ground }),
            }
        }
    }
}

fn unify(x: Inferred, y: Inferred, span: Span) -> Result<Inferred, Diagnostic> {
    if x.ground {
        return Ok(y);
    }
    if y.ground || x.dim == y.dim {
        return Ok(x);
    }
    Err(Diagnostic::new(DiagnosticKind::DimensionMismatch { left: x.dim, right: y.dim }, span))
}

/// Dimension of `term`: products and quotients add and subtract exponent
/// vectors; sums require equal dimensions. A constant-only term is
/// dimensionless here but adapts to the other side of a sum or comparison.
pub fn dimension_of(term: &Term, scope: &ComponentType, table: &QuantityTable) -> Result<Dimension, Diagnostic> {
    dimension_in(term, &Scope::for_component(scope), table)
}

pub fn dimension_in(term: &Term, scope: &Scope, table: &QuantityTable) -> Result<Dimension, Diagnostic> {
    infer(term, scope, table).map(|i| i.dim)
}

/// Scoping and dimension diagnostics for every comparison in `a`.
pub fn check_assertion(a: &Assertion, scope: &Scope, table: &QuantityTable) -> Vec<Diagnostic> {
    let mut diags = Vec::new();
    walk_assertion(a, scope, table, &mut diags);
    diags
}

fn walk_assertion(a: &Assertion, scope: &Scope, table: &QuantityTable, diags: &mut Vec<Diagnostic>) {
    match a {
        Assertion::Bool(_) => {}
        Assertion::Cmp { lhs, rhs, span, .. } => {
            match (infer(lhs, scope, table), infer(rhs, scope, table)) {
                (Ok(x), Ok(y)) => {
                    if let Err(d) = unify(x, y, *span) {
                        diags.push(d);
                    }
                }
                (l, r) => diags.extend(l.err().into_iter().chain(r.err())),
            }
        }
        Assertion::Not(x) => walk_assertion(x, scope, table, diags),
        Assertion::Bin(_, x, y) => {
            walk_assertion(x, scope, table, diags);
            walk_assertion(y, scope, table, diags);
        }
    }
}

pub fn check_contract(c: &Contract, table: &QuantityTable) -> Vec<Diagnostic> {
    let scope = Scope::for_component(&c.subject);
    let mut diags = check_assertion(&c.assumption, &scope, table);
    diags.extend(check_assertion(&c.guarantee, &scope, table));
    diags
}

/// Glue equations must be dimension-consistent and may only mention result
/// fields (unqualified) and parameter fields (qualified by binding).
pub fn check_operator_glue(op: &CompositionOperator, table: &QuantityTable) -> Vec<Diagnostic> {
    let mut diags = Vec::new();
    let mut seen = BTreeSet::new();
    for (binding, _) in &op.parameters {
        if !seen.insert(binding.as_str()) {
            diags.push(Diagnostic::unlocated(DiagnosticKind::DuplicateBinding(binding.clone())));
        }
    }
    let scope = Scope::for_operator(op);
    for g in &op.glue {
        diags.extend(check_assertion(g, &scope, table));
    }
    diags
}

/// Overloads by operator name.
#[derive(Debug, Clone, Default)]
pub struct OverloadSet {
    operators: BTreeMap<String, Vec<CompositionOperator>>,
}

impl OverloadSet {
    pub fn new() -> Self {
        OverloadSet::default()
    }

    /// Adds an overload; two overloads of one name may not share the same
    /// parameter-type list.
    pub fn insert(&mut self, op: CompositionOperator) -> Result<(), DiagnosticKind> {
        let list = self.operators.entry(op.name.clone()).or_default();
        if list.iter().any(|o| o.parameter_types() == op.parameter_types()) {
            return Err(DiagnosticKind::DuplicateOverload {
                name: op.name.clone(),
                params: op.parameter_types().iter().map(|s| s.to_string()).collect(),
            });
        }
        list.push(op);
        Ok(())
    }

    pub fn overloads(&self, name: &str) -> &[CompositionOperator] {
        self.operators.get(name).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn iter(&self) -> impl Iterator<Item = &CompositionOperator> {
        self.operators.values().flatten()
    }
}

fn signature(op: &CompositionOperator) -> String {
    format!("{}({}) -> {}", op.name, op.parameter_types().join(", "), op.result.name)
}

/// Picks the unique most specific applicable overload. An overload applies
/// when every argument type is a subtype-or-equal of its parameter type; X is
/// more specific than Y when each of X's parameters is a subtype-or-equal of
/// Y's and at least one strictly.
pub fn resolve_operator(
    name: &str,
    arg_types: &[&str],
    set: &OverloadSet,
    types: &ComponentTypes,
) -> Result<CompositionOperator, DiagnosticKind> {
    let applicable: Vec<&CompositionOperator> = set
        .overloads(name)
        .iter()
        .filter(|op| {
            op.parameters.len() == arg_types.len()
                && op.parameters.iter().zip(arg_types).all(|((_, p), a)| types.is_subtype(a, &p.name))
        })
        .collect();
    let no_match = || DiagnosticKind::NoMatchingOverload {
        name: name.to_string(),
        args: arg_types.iter().map(|s| s.to_string()).collect(),
    };
    if applicable.is_empty() {
        return Err(no_match());
    }
    let at_least_as_specific = |x: &CompositionOperator, y: &CompositionOperator| {
        x.parameters.iter().zip(&y.parameters).all(|((_, px), (_, py))| types.is_subtype(&px.name, &py.name))
    };
    let best: Vec<&&CompositionOperator> = applicable
        .iter()
        .filter(|x| applicable.iter().all(|y| at_least_as_specific(x, y)))
        .collect();
    match best.as_slice() {
        [only] => Ok((**only).clone()),
        _ => {
            let mut candidates: Vec<String> = applicable.iter().map(|o| signature(o)).collect();
            candidates.sort();
            Err(DiagnosticKind::AmbiguousOverload { name: name.to_string(), candidates })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_assertion, parse_document, parse_term};

    fn table(src: &str) -> Result<QuantityTable, Vec<Diagnostic>> {
        let (doc, diags) = parse_document(src);
        assert!(diags.is_empty(), "{diags:?}");
        build_hierarchy(&doc.quantities)
    }

    fn electrical() -> QuantityTable {
        table(
            "quantity voltage; quantity current; quantity power = voltage * current;
             quantity resistance = voltage / current; quantity precise <: resistance;",
        )
        .unwrap()
    }

    fn resistor() -> ComponentType {
        ComponentType::new(
            "Resistor",
            &[("r", "resistance"), ("u", "voltage"), ("i", "current"), ("p", "power")],
        )
    }

    fn op(name: &str, params: &[(&str, &ComponentType)], glue: &[&str]) -> CompositionOperator {
        CompositionOperator {
            name: name.into(),
            parameters: params.iter().map(|(b, t)| (b.to_string(), (*t).clone())).collect(),
            result: resistor(),
            glue: glue.iter().map(|g| parse_assertion(g).unwrap()).collect(),
        }
    }

    #[test]
    fn base_quantity_has_singleton_dimension() {
        let t = table("quantity resistance;").unwrap();
        assert_eq!(t.dimension("resistance"), Some(&Dimension::base("resistance")));
    }

    #[test]
    fn derived_dimensions_follow_ohm_and_power() {
        let t = electrical();
        assert_eq!(t.dimension("power"), Some(&Dimension::from_exponents([("voltage", 1), ("current", 1)])));
        assert_eq!(
            t.dimension("resistance"),
            Some(&Dimension::from_exponents([("voltage", 1), ("current", -1)]))
        );
        // subdomains inherit the parent's dimension
        assert_eq!(t.dimension("precise"), t.dimension("resistance"));
        assert!(t.is_subquantity("precise", "resistance"));
        assert!(!t.is_subquantity("resistance", "precise"));
    }

    #[test]
    fn subtype_cycle_is_reported() {
        let errs = table("quantity a <: b; quantity b <: a;").unwrap_err();
        assert_eq!(errs.len(), 1);
        assert_eq!(errs[0].kind, DiagnosticKind::CyclicSubtype(vec!["a".into(), "b".into()]));
        let errs = table("quantity a = b * b; quantity b = a;").unwrap_err();
        assert_eq!(errs[0].kind.code(), "CyclicDefinition");
    }

    #[test]
    fn unknown_and_redefined_quantities() {
        let errs = table("quantity a = nope;").unwrap_err();
        assert_eq!(errs[0].kind, DiagnosticKind::UnknownQuantity("nope".into()));
        let errs = table("quantity a; quantity a;").unwrap_err();
        assert_eq!(errs[0].kind, DiagnosticKind::RedefinedQuantity("a".into()));
    }

    #[test]
    fn dimensions_of_terms() {
        let t = electrical();
        let ct = resistor();
        let power = dimension_of(&parse_term("u * i").unwrap(), &ct, &t).unwrap();
        assert_eq!(Some(&power), t.dimension("power"));
        let res = dimension_of(&parse_term("u / i").unwrap(), &ct, &t).unwrap();
        assert_eq!(Some(&res), t.dimension("resistance"));
        let err = dimension_of(&parse_term("r + u").unwrap(), &ct, &t).unwrap_err();
        assert_eq!(err.kind.code(), "DimensionMismatch");
        // constants scale without changing the dimension
        let scaled = dimension_of(&parse_term("3 * r").unwrap(), &ct, &t).unwrap();
        assert_eq!(Some(&scaled), t.dimension("resistance"));
        assert!(check_assertion(&parse_assertion("r = 3").unwrap(), &Scope::for_component(&ct), &t).is_empty());
        let inv = dimension_of(&parse_term("1 / r").unwrap(), &ct, &t).unwrap();
        assert_eq!(inv, t.dimension("resistance").unwrap().inverse());
    }

    #[test]
    fn component_type_checks() {
        let t = electrical();
        let types: ComponentTypes = [resistor()].into_iter().collect();
        assert!(check_component_type(&resistor(), &t, &types).is_empty());

        let bad = ComponentType::new("Bad", &[("x", "ohms")]);
        let d = check_component_type(&bad, &t, &types);
        assert_eq!(d[0].kind, DiagnosticKind::UnknownQuantity("ohms".into()));

        let sub = ComponentType::new("Precision", &[("r", "resistance")]).with_supertype("Resistor");
        let d = check_component_type(&sub, &t, &types);
        assert_eq!(d.len(), 3);
        assert!(d.iter().all(|x| x.kind.code() == "MissingInheritedField"));
    }

    #[test]
    fn glue_checks() {
        let t = electrical();
        let r = resistor();
        let series = op(
            "series",
            &[("a", &r), ("b", &r)],
            &["r = a.r + b.r", "u = a.u + b.u", "i = a.i", "b.i = a.i", "p = a.p + b.p"],
        );
        assert!(check_operator_glue(&series, &t).is_empty());
        let scaled = op("scaled", &[("a", &r), ("b", &r)], &["r = 3*a.r + 0*b.r"]);
        assert!(check_operator_glue(&scaled, &t).is_empty());
        let parallel = op("parallel", &[("a", &r), ("b", &r)], &["r = 1 / (1 / a.r + 1 / b.r)"]);
        assert!(check_operator_glue(&parallel, &t).is_empty());

        let bad = op("bad", &[("a", &r), ("b", &r)], &["r = a.u + b.i"]);
        assert_eq!(check_operator_glue(&bad, &t)[0].kind.code(), "DimensionMismatch");
        let unbound = op("bad", &[("a", &r)], &["r = z.r"]);
        assert_eq!(check_operator_glue(&unbound, &t)[0].kind, DiagnosticKind::UnknownBinding("z".into()));
        let unknown = op("bad", &[("a", &r)], &["r = a.q"]);
        assert_eq!(check_operator_glue(&unknown, &t)[0].kind, DiagnosticKind::UnknownField("a.q".into()));
    }

    fn hierarchy() -> ComponentTypes {
        let mut fields: Vec<(&str, &str)> = vec![("r", "resistance")];
        let base = ComponentType::new("Resistor", &fields);
        fields.push(("tol", "resistance"));
        let precise = ComponentType::new("PrecisionResistor", &fields).with_supertype("Resistor");
        let cap = ComponentType::new("Capacitor", &[("c", "resistance")]);
        [base, precise, cap].into_iter().collect()
    }

    fn sig(name: &str, params: &[&str], types: &ComponentTypes) -> CompositionOperator {
        CompositionOperator {
            name: name.into(),
            parameters: params
                .iter()
                .enumerate()
                .map(|(i, p)| (format!("x{i}"), types.get(p).unwrap().clone()))
                .collect(),
            result: types.get("Resistor").unwrap().clone(),
            glue: vec![],
        }
    }

    #[test]
    fn resolves_singleton_and_reports_no_match() {
        let types = hierarchy();
        let mut set = OverloadSet::new();
        set.insert(sig("series", &["Resistor", "Resistor"], &types)).unwrap();
        let got = resolve_operator("series", &["Resistor", "Resistor"], &set, &types).unwrap();
        assert_eq!(got.parameter_types(), vec!["Resistor", "Resistor"]);
        let err = resolve_operator("series", &["Resistor", "Capacitor"], &set, &types).unwrap_err();
        assert_eq!(err.to_string(), "no overload of `series` accepts (Resistor, Capacitor)");
        assert!(set.insert(sig("series", &["Resistor", "Resistor"], &types)).is_err());
    }

    #[test]
    fn picks_most_specific_overload() {
        let types = hierarchy();
        let mut set = OverloadSet::new();
        set.insert(sig("series", &["Resistor", "Resistor"], &types)).unwrap();
        set.insert(sig("series", &["PrecisionResistor", "PrecisionResistor"], &types)).unwrap();
        let got = resolve_operator("series", &["PrecisionResistor", "PrecisionResistor"], &set, &types).unwrap();
        assert_eq!(got.parameter_types(), vec!["PrecisionResistor", "PrecisionResistor"]);
        // mixed arguments only fit the general overload
        let got = resolve_operator("series", &["PrecisionResistor", "Resistor"], &set, &types).unwrap();
        assert_eq!(got.parameter_types(), vec!["Resistor", "Resistor"]);
    }

    #[test]
    fn incomparable_overloads_are_ambiguous() {
        let types = hierarchy();
        let mut set = OverloadSet::new();
        set.insert(sig("mix", &["PrecisionResistor", "Resistor"], &types)).unwrap();
        set.insert(sig("mix", &["Resistor", "PrecisionResistor"], &types)).unwrap();
        let err = resolve_operator("mix", &["PrecisionResistor", "PrecisionResistor"], &set, &types).unwrap_err();
        assert_eq!(err.code(), "AmbiguousOverload");
    }
}
