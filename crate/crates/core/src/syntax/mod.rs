//! The `.scspec` specification language: lexer, parser, name resolution and
//! canonical pretty-printer.

mod ast;
mod format;
mod lexer;
mod parser;

use std::collections::BTreeSet;

pub use ast::*;
pub use format::format_spec;
pub use parser::{parse_assertion, parse_document, parse_term};

use crate::diagnostics::{Diagnostic, DiagnosticKind};

/// Parses and resolves a document. All syntax errors are reported together;
/// name resolution runs only on syntactically valid input, over the whole
/// document, so declarations may appear in any order.
pub fn parse_spec(src: &str) -> Result<SpecDocument, Vec<Diagnostic>> {
    let (doc, diags) = parse_document(src);
    if !diags.is_empty() {
        return Err(diags);
    }
    let unresolved = resolve_names(&doc);
    if unresolved.is_empty() {
        Ok(doc)
    } else {
        Err(unresolved)
    }
}

/// Checks that every declaration-level reference names a declared entity.
/// Variable references inside assertions are scoped by the type checker.
pub fn resolve_names(doc: &SpecDocument) -> Vec<Diagnostic> {
    let quantities: BTreeSet<&str> = doc.quantities.iter().map(|q| q.name.name.as_str()).collect();
    let components: BTreeSet<&str> = doc.components.iter().map(|c| c.name.name.as_str()).collect();
    let operators: BTreeSet<&str> = doc.operators.iter().map(|o| o.name.name.as_str()).collect();
    let contracts: BTreeSet<&str> = doc.contracts.iter().map(|c| c.name.name.as_str()).collect();

    let mut diags = Vec::new();
    let mut need = |set: &BTreeSet<&str>, id: &Ident| {
        if !set.contains(id.name.as_str()) {
            diags.push(Diagnostic::new(DiagnosticKind::UnresolvedName(id.name.clone()), id.span));
        }
    };
    for q in &doc.quantities {
        match &q.def {
            QuantityDef::Base => {}
            QuantityDef::Derived(factors) => factors.iter().for_each(|(f, _)| need(&quantities, f)),
            QuantityDef::Subdomain(parent) => need(&quantities, parent),
        }
    }
    for c in &doc.components {
        if let Some(sup) = &c.supertype {
            need(&components, sup);
        }
        c.fields.iter().for_each(|f| need(&quantities, &f.quantity));
    }
    for o in &doc.operators {
        o.params.iter().for_each(|p| need(&components, &p.ty));
        need(&components, &o.result);
    }
    for c in &doc.contracts {
        need(&components, &c.subject);
    }
    for r in &doc.refinements {
        match &r.concrete {
            ConcreteDecl::Compose { operator, bindings } => {
                need(&operators, operator);
                bindings.iter().for_each(|b| need(&contracts, &b.contract));
            }
            ConcreteDecl::Contract(c) => need(&contracts, c),
        }
        need(&contracts, &r.abstract_);
    }

    // quantities are checked by the hierarchy builder
    let named = [
        doc.components.iter().map(|c| ("component", &c.name)).collect::<Vec<_>>(),
        doc.contracts.iter().map(|c| ("contract", &c.name)).collect(),
        doc.refinements.iter().map(|r| ("refinement", &r.name)).collect(),
    ];
    let mut seen: BTreeSet<(&str, &str)> = BTreeSet::new();
    for (kind, id) in named.iter().flatten() {
        if !seen.insert((kind, id.name.as_str())) {
            diags.push(Diagnostic::new(DiagnosticKind::DuplicateDeclaration(id.name.clone()), id.span));
        }
    }
    diags
}

#[cfg(test)]
mod tests {
    use super::*;

    const CORPUS: &str = include_str!("../../../../specs/resistors.scspec");

    #[test]
    fn minimal_quantity() {
        let doc = parse_spec("quantity resistance;").unwrap();
        assert_eq!(doc.quantities.len(), 1);
        assert_eq!(doc.quantities[0].def, QuantityDef::Base);
        assert_eq!(format_spec(&doc), "quantity resistance;\n");
    }

    #[test]
    fn resistor_corpus_counts() {
        let doc = parse_spec(CORPUS).unwrap();
        assert_eq!(doc.quantities.len(), 4);
        assert_eq!(doc.components.len(), 1);
        assert_eq!(doc.operators.len(), 3);
        assert_eq!(doc.contracts.len(), 3);
        assert_eq!(doc.refinements.len(), 3);
    }

    #[test]
    fn corpus_round_trip_is_fixpoint() {
        let doc = parse_spec(CORPUS).unwrap();
        let once = format_spec(&doc);
        let reparsed = parse_spec(&once).unwrap();
        assert_eq!(reparsed, doc);
        assert_eq!(format_spec(&reparsed), once);
    }

    #[test]
    fn missing_type_name_is_syntax_error() {
        let errs = parse_spec("contract X for { }").unwrap_err();
        assert_eq!(errs.len(), 1);
        let d = &errs[0];
        assert_eq!(d.kind.code(), "SyntaxError");
        let span = d.span.unwrap();
        assert_eq!((span.line, span.column), (1, 16));
    }

    #[test]
    fn separated_errors_are_all_reported() {
        let src = "quantity ;\ncomponent R { r resistance; }\ncontract C for R { assume ; }\nquantity ok;";
        let errs = parse_spec(src).unwrap_err();
        assert!(errs.len() >= 3, "{errs:?}");
        // each diagnostic points at a token on its own line
        let lines: BTreeSet<usize> = errs.iter().map(|d| d.span.unwrap().line).collect();
        assert_eq!(lines, BTreeSet::from([1, 2, 3]));
    }

    #[test]
    fn unresolved_names_after_whole_document() {
        // forward references are fine
        let ok = "component R { r: resistance; }\nquantity resistance;";
        assert!(parse_spec(ok).is_ok());
        let errs = parse_spec("component R { r: ohms; }").unwrap_err();
        assert_eq!(errs[0].kind, DiagnosticKind::UnresolvedName("ohms".into()));
        assert_eq!(errs[0].span.unwrap().column, 18);
    }

    #[test]
    fn precedence_is_preserved() {
        let a = parse_assertion("a = 1 || b = 2 && !c = 3 => d < 4").unwrap();
        assert_eq!(a.to_string(), "a = 1 || b = 2 && !(c = 3) => d < 4");
        let nested = parse_assertion("((a = 1 => b = 1) => c = 1) || (d = 1 || e = 1) && f = 1").unwrap();
        let printed = nested.to_string();
        assert_eq!(printed, "((a = 1 => b = 1) => c = 1) || (d = 1 || e = 1) && f = 1");
        assert_eq!(parse_assertion(&printed).unwrap(), nested);
        let t = parse_term("a - (b - c) * -d / 2").unwrap();
        assert_eq!(t.to_string(), "a - (b - c) * -d / 2");
    }

    #[test]
    fn comparisons_do_not_chain() {
        assert!(parse_assertion("a < b < c").is_err());
        assert!(parse_assertion("a + 1").is_err());
        assert!(parse_assertion("(a = 1) + 2 = 3").is_err());
    }

    #[test]
    fn fractions_and_decimals_are_exact() {
        let a = parse_assertion("r = 0.5 + 2/3").unwrap();
        assert_eq!(a.to_string(), "r = 1/2 + 2/3");
        let b = parse_assertion("r = x / 2/3").unwrap();
        assert_eq!(b.to_string(), "r = x / 2 / 3");
        assert_eq!(parse_assertion(&b.to_string()).unwrap(), b);
    }

    #[test]
    fn quantity_monomials_round_trip() {
        let doc = parse_spec("quantity v; quantity i; quantity q = v^2 / i^3 * v^-1 / i;").unwrap();
        let text = format_spec(&doc);
        assert!(text.contains("quantity q = v^2 / i^3 / v / i;"), "{text}");
        assert_eq!(parse_spec(&text).unwrap(), doc);
    }
}
