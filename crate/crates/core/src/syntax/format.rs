use std::fmt::Write;

use super::ast::*;
use crate::model::format_rational;

/// Canonical text of a document: quantities, component types, operators,
/// contracts and refinements, in that order, one declaration per block.
pub fn format_spec(doc: &SpecDocument) -> String {
    let mut out = String::new();
    let mut sections: Vec<String> = Vec::new();

    if !doc.quantities.is_empty() {
        let mut s = String::new();
        for q in &doc.quantities {
            s.push_str(&format_quantity(q));
            s.push('\n');
        }
        sections.push(s);
    }
    for c in &doc.components {
        let mut s = format!("component {}", c.name.name);
        if let Some(sup) = &c.supertype {
            let _ = write!(s, " <: {}", sup.name);
        }
        s.push_str(" {\n");
        for f in &c.fields {
            let _ = writeln!(s, "    {}: {};", f.name.name, f.quantity.name);
        }
        s.push_str("}\n");
        sections.push(s);
    }
    for o in &doc.operators {
        let params: Vec<String> = o.params.iter().map(|p| format!("{}: {}", p.name.name, p.ty.name)).collect();
        let mut s = format!("operator {}({}) -> {} {{\n", o.name.name, params.join(", "), o.result.name);
        for g in &o.glue {
            let _ = writeln!(s, "    {g};");
        }
        s.push_str("}\n");
        sections.push(s);
    }
    for c in &doc.contracts {
        sections.push(format!(
            "contract {} for {} {{\n    assume {};\n    guarantee {};\n}}\n",
            c.name.name, c.subject.name, c.assumption, c.guarantee
        ));
    }
    if !doc.refinements.is_empty() {
        let mut s = String::new();
        for r in &doc.refinements {
            s.push_str(&format_refinement(r));
        }
        sections.push(s);
    }
    out.push_str(&sections.join("\n"));
    out
}

fn format_quantity(q: &QuantityDecl) -> String {
    match &q.def {
        QuantityDef::Base => format!("quantity {};", q.name.name),
        QuantityDef::Subdomain(parent) => format!("quantity {} <: {};", q.name.name, parent.name),
        QuantityDef::Derived(factors) => {
            let mut s = format!("quantity {} = ", q.name.name);
            for (i, (name, exp)) in factors.iter().enumerate() {
                if i == 0 {
                    s.push_str(&name.name);
                    if *exp != 1 {
                        let _ = write!(s, "^{exp}");
                    }
                    continue;
                }
                let (sym, mag) = if *exp < 0 { ("/", -exp) } else { ("*", *exp) };
                let _ = write!(s, " {sym} {}", name.name);
                if mag != 1 {
                    let _ = write!(s, "^{mag}");
                }
            }
            s.push(';');
            s
        }
    }
}

fn format_refinement(r: &RefinementDecl) -> String {
    let concrete = match &r.concrete {
        ConcreteDecl::Compose { operator, bindings } => {
            let args: Vec<String> =
                bindings.iter().map(|b| format!("{} as {}", b.contract.name, b.instance.name)).collect();
            format!("compose {}({})", operator.name, args.join(", "))
        }
        ConcreteDecl::Contract(c) => c.name.clone(),
    };
    let mut s = format!("refinement {}: {} <= {}", r.name.name, concrete, r.abstract_.name);
    if !r.grid.is_empty() {
        s.push_str(" grid {\n");
        for axis in &r.grid {
            let values: Vec<String> = axis.values.iter().map(format_rational).collect();
            let _ = writeln!(s, "    {} = {};", axis.var.name, values.join(", "));
        }
        s.push('}');
    }
    s.push_str(";\n");
    s
}
