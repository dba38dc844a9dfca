use std::collections::{BTreeMap, BTreeSet};

use super::{
    build_hierarchy, check_component_type, check_contract, check_operator_glue, resolve_operator, ComponentTypes,
    OverloadSet, QuantityTable,
};
use crate::diagnostics::{Diagnostic, DiagnosticKind};
use crate::model::{ComponentType, CompositionOperator, Contract, FiniteGrid, Span};
use crate::syntax::{ConcreteDecl, RefinementDecl, SpecDocument};

/// The concrete side of a refinement obligation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConcreteTerm {
    /// `operator(C1 as i1, ...)` with the resolved overload and the bound
    /// contracts in argument order.
    Compose { operator: CompositionOperator, parts: Vec<(String, Contract)> },
    Contract(Contract),
}

impl ConcreteTerm {
    pub fn subject(&self) -> &ComponentType {
        match self {
            ConcreteTerm::Compose { operator, .. } => &operator.result,
            ConcreteTerm::Contract(c) => &c.subject,
        }
    }

    pub fn describe(&self) -> String {
        match self {
            ConcreteTerm::Compose { operator, parts } => {
                let args: Vec<String> = parts.iter().map(|(i, c)| format!("{} as {i}", c.name)).collect();
                format!("{}({})", operator.name, args.join(", "))
            }
            ConcreteTerm::Contract(c) => c.name.clone(),
        }
    }
}

/// A refinement declaration after name and overload resolution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Obligation {
    pub name: String,
    pub span: Span,
    pub concrete: Option<ConcreteTerm>,
    pub abstract_: Option<Contract>,
    pub grid_hint: FiniteGrid,
    /// Resolution errors local to this obligation.
    pub errors: Vec<Diagnostic>,
}

impl Obligation {
    pub fn is_checkable(&self) -> bool {
        self.errors.is_empty() && self.concrete.is_some() && self.abstract_.is_some()
    }
}

#[derive(Debug, Clone, Default)]
pub struct Program {
    pub quantities: QuantityTable,
    pub components: ComponentTypes,
    pub operators: OverloadSet,
    pub contracts: BTreeMap<String, Contract>,
    pub obligations: Vec<Obligation>,
    /// Errors outside any single obligation.
    pub diagnostics: Vec<Diagnostic>,
}

impl Program {
    pub fn has_errors(&self) -> bool {
        !self.diagnostics.is_empty() || self.obligations.iter().any(|o| !o.errors.is_empty())
    }

    pub fn all_diagnostics(&self) -> impl Iterator<Item = &Diagnostic> {
        self.diagnostics.iter().chain(self.obligations.iter().flat_map(|o| o.errors.iter()))
    }

    pub fn obligation(&self, name: &str) -> Option<&Obligation> {
        self.obligations.iter().find(|o| o.name == name)
    }
}

fn locate(diags: Vec<Diagnostic>, span: Span) -> impl Iterator<Item = Diagnostic> {
    diags.into_iter().map(move |mut d| {
        d.span.get_or_insert(span);
        d
    })
}

/// Type-checks a resolved document and turns it into model objects.
/// Obligations are only produced when the declarations they depend on are
/// well formed.
pub fn elaborate(doc: &SpecDocument) -> Program {
    let mut program = Program::default();
    match build_hierarchy(&doc.quantities) {
        Ok(t) => program.quantities = t,
        Err(d) => {
            program.diagnostics = d;
            return program;
        }
    }

    for c in &doc.components {
        let mut ct = ComponentType {
            name: c.name.name.clone(),
            fields: c.fields.iter().map(|f| (f.name.name.clone(), f.quantity.name.clone())).collect(),
            supertype: None,
        };
        ct.supertype = c.supertype.as_ref().map(|s| s.name.clone());
        program.components.insert(ct);
    }
    for c in &doc.components {
        let ct = program.components.get(&c.name.name).expect("inserted above");
        let d = check_component_type(ct, &program.quantities, &program.components);
        program.diagnostics.extend(locate(d, c.name.span));
    }

    for o in &doc.operators {
        let mut missing = false;
        let mut lookup = |id: &crate::syntax::Ident, diags: &mut Vec<Diagnostic>| {
            let t = program.components.get(&id.name).cloned();
            if t.is_none() {
                missing = true;
                diags.push(Diagnostic::new(DiagnosticKind::UnknownComponentType(id.name.clone()), id.span));
            }
            t
        };
        let params: Vec<_> =
            o.params.iter().map(|p| (p.name.name.clone(), lookup(&p.ty, &mut program.diagnostics))).collect();
        let result = lookup(&o.result, &mut program.diagnostics);
        if missing {
            continue;
        }
        let op = CompositionOperator {
            name: o.name.name.clone(),
            parameters: params.into_iter().map(|(b, t)| (b, t.expect("checked"))).collect(),
            result: result.expect("checked"),
            glue: o.glue.clone(),
        };
        let d = check_operator_glue(&op, &program.quantities);
        program.diagnostics.extend(locate(d, o.name.span));
        if let Err(kind) = program.operators.insert(op) {
            program.diagnostics.push(Diagnostic::new(kind, o.name.span));
        }
    }

    for c in &doc.contracts {
        let Some(subject) = program.components.get(&c.subject.name).cloned() else {
            program
                .diagnostics
                .push(Diagnostic::new(DiagnosticKind::UnknownComponentType(c.subject.name.clone()), c.subject.span));
            continue;
        };
        let contract = Contract::new(c.name.name.clone(), subject, c.assumption.clone(), c.guarantee.clone());
        let d = check_contract(&contract, &program.quantities);
        program.diagnostics.extend(locate(d, c.name.span));
        program.contracts.insert(contract.name.clone(), contract);
    }

    let obligations = doc.refinements.iter().map(|r| obligation(r, &program)).collect();
    program.obligations = obligations;
    program
}

fn obligation(r: &RefinementDecl, program: &Program) -> Obligation {
    let mut errors = Vec::new();
    let find = |id: &crate::syntax::Ident, errors: &mut Vec<Diagnostic>| {
        let c = program.contracts.get(&id.name).cloned();
        if c.is_none() {
            errors.push(Diagnostic::new(DiagnosticKind::UnresolvedName(id.name.clone()), id.span));
        }
        c
    };
    let abstract_ = find(&r.abstract_, &mut errors);
    let concrete = match &r.concrete {
        ConcreteDecl::Contract(id) => find(id, &mut errors).map(ConcreteTerm::Contract),
        ConcreteDecl::Compose { operator, bindings } => {
            let mut parts = Vec::new();
            let mut instances = BTreeSet::new();
            for b in bindings {
                if !instances.insert(b.instance.name.as_str()) {
                    errors.push(Diagnostic::new(
                        DiagnosticKind::DuplicateBinding(b.instance.name.clone()),
                        b.instance.span,
                    ));
                }
                if let Some(c) = find(&b.contract, &mut errors) {
                    parts.push((b.instance.name.clone(), c));
                }
            }
            if parts.len() == bindings.len() {
                let args: Vec<&str> = parts.iter().map(|(_, c)| c.subject.name.as_str()).collect();
                match resolve_operator(&operator.name, &args, &program.operators, &program.components) {
                    Ok(op) => Some(ConcreteTerm::Compose { operator: op, parts }),
                    Err(kind) => {
                        errors.push(Diagnostic::new(kind, operator.span));
                        None
                    }
                }
            } else {
                None
            }
        }
    };
    if let (Some(c), Some(a)) = (&concrete, &abstract_) {
        if c.subject().name != a.subject.name {
            errors.push(Diagnostic::new(
                DiagnosticKind::SubjectTypeMismatch {
                    concrete: c.describe(),
                    abstract_: a.name.clone(),
                    expected: a.subject.name.clone(),
                    found: c.subject().name.clone(),
                },
                r.name.span,
            ));
        }
    }

    let mut grid_hint = FiniteGrid::new();
    for axis in &r.grid {
        let var = &axis.var.name;
        let known = match (var.split_once('.'), &concrete, &abstract_) {
            (None, _, Some(a)) => a.subject.quantity_of(var).is_some(),
            (Some((inst, field)), Some(ConcreteTerm::Compose { parts, .. }), _) => {
                parts.iter().any(|(i, c)| i == inst && c.subject.quantity_of(field).is_some())
            }
            _ => false,
        };
        let problem = if !known {
            Some(format!("`{var}` is not a variable of this obligation"))
        } else if grid_hint.contains_var(var) {
            Some(format!("`{var}` is listed twice"))
        } else {
            grid_hint.set(var.clone(), axis.values.iter().cloned()).err().map(|e| e.to_string())
        };
        if let Some(msg) = problem {
            errors.push(Diagnostic::new(DiagnosticKind::InvalidGrid(msg), axis.var.span));
        }
    }

    Obligation { name: r.name.name.clone(), span: r.name.span, concrete, abstract_, grid_hint, errors }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_spec;

    const CORPUS: &str = include_str!("../../../../specs/resistors.scspec");

    fn program(src: &str) -> Program {
        elaborate(&parse_spec(src).unwrap())
    }

    #[test]
    fn corpus_elaborates_cleanly() {
        let p = program(CORPUS);
        assert!(!p.has_errors(), "{:?}", p.all_diagnostics().collect::<Vec<_>>());
        assert_eq!(p.obligations.len(), 3);
        let o = p.obligation("SysBySeries").unwrap();
        match o.concrete.as_ref().unwrap() {
            ConcreteTerm::Compose { operator, parts } => {
                assert_eq!(operator.name, "series");
                assert_eq!(parts[0].0, "c1");
                assert_eq!(parts[1].1.name, "R2");
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(o.grid_hint.axis("r").unwrap().len(), 4);
    }

    #[test]
    fn ill_typed_glue_is_reported_at_operator() {
        let p = program(
            "quantity v; quantity i; component R { u: v; c: i; }
             operator bad(a: R) -> R { u = a.c; }",
        );
        let d: Vec<_> = p.all_diagnostics().collect();
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].kind.code(), "DimensionMismatch");
        assert_eq!(d[0].span.unwrap().line, 2);
    }

    #[test]
    fn unmatched_composition_is_obligation_error() {
        let p = program(
            "quantity v; component R { u: v; } component C { u: v; }
             operator series(a: R, b: R) -> R { u = a.u + b.u; }
             contract A for R { assume true; guarantee u = 1; }
             contract B for C { assume true; guarantee u = 1; }
             refinement X: compose series(A as a, B as b) <= A;",
        );
        assert!(p.diagnostics.is_empty());
        let o = p.obligation("X").unwrap();
        assert!(!o.is_checkable());
        assert_eq!(o.errors[0].kind.code(), "NoMatchingOverload");
    }

    #[test]
    fn bad_grid_hint() {
        let p = program(
            "quantity v; component R { u: v; }
             contract A for R { assume true; guarantee u = 1; }
             refinement X: A <= A grid { w = 1; };",
        );
        assert_eq!(p.obligation("X").unwrap().errors[0].kind.code(), "InvalidGrid");
    }

    #[test]
    fn contract_scoping() {
        let p = program(
            "quantity v; component R { u: v; }
             contract A for R { assume w = 1; guarantee u = 1; }",
        );
        assert_eq!(p.diagnostics[0].kind, DiagnosticKind::UnknownField("w".into()));
    }
}
