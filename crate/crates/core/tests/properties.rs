mod common;

use proptest::prelude::*;

use sc_core::model::{ComponentType, CompositionOperator, Dimension};
use sc_core::syntax::{format_spec, parse_document};
use sc_core::types::{resolve_operator, ComponentTypes, OverloadSet};

fn dimension() -> impl Strategy<Value = Dimension> {
    prop::collection::vec((prop::sample::select(vec!["m", "s", "kg", "A"]), -3i32..=3), 0..5)
        .prop_map(Dimension::from_exponents)
}

proptest! {
    #[test]
    fn dimensions_form_an_abelian_group(a in dimension(), b in dimension(), c in dimension()) {
        let one = Dimension::dimensionless();
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&a * &one, a.clone());
        prop_assert!((&a * &a.inverse()).is_dimensionless());
        prop_assert_eq!(&a / &b, &a * &b.inverse());
        prop_assert_eq!(a.pow(2), &a * &a);
    }

    /// Random forests over up to six types; the subtype relation must be a
    /// partial order.
    #[test]
    fn subtyping_is_a_partial_order(parents in prop::collection::vec(prop::option::of(0usize..6), 6)) {
        let names: Vec<String> = (0..6).map(|i| format!("T{i}")).collect();
        // only point at earlier types so the chains are acyclic
        let types: ComponentTypes = (0..6)
            .map(|i| {
                let sup = parents[i].filter(|p| *p < i).map(|p| names[p].clone());
                ComponentType { name: names[i].clone(), fields: vec![], supertype: sup }
            })
            .collect();
        for a in &names {
            prop_assert!(types.is_subtype(a, a));
            for b in &names {
                if a != b && types.is_subtype(a, b) {
                    prop_assert!(!types.is_subtype(b, a));
                }
                for c in &names {
                    if types.is_subtype(a, b) && types.is_subtype(b, c) {
                        prop_assert!(types.is_subtype(a, c));
                    }
                }
            }
        }
    }

    /// Resolution does not depend on the order overloads were declared in.
    #[test]
    fn overload_resolution_ignores_declaration_order(
        sigs in prop::collection::btree_set((0usize..3, 0usize..3), 1..6),
        args in (0usize..3, 0usize..3),
        seed in any::<u64>(),
    ) {
        // Base <: Mid <: Leaf
        let chain = ["Base", "Mid", "Leaf"];
        let ty = |i: usize| ComponentType {
            name: chain[i].into(),
            fields: vec![],
            supertype: (i > 0).then(|| chain[i - 1].to_string()),
        };
        let types: ComponentTypes = (0..3).map(ty).collect();
        let ops: Vec<CompositionOperator> = sigs
            .iter()
            .map(|(x, y)| CompositionOperator {
                name: "join".into(),
                parameters: vec![("a".into(), ty(*x)), ("b".into(), ty(*y))],
                result: ty(0),
                glue: vec![],
            })
            .collect();
        let mut shuffled = ops.clone();
        use rand::seq::SliceRandom;
        shuffled.shuffle(&mut common::rng(seed));
        let build = |list: &[CompositionOperator]| {
            let mut set = OverloadSet::new();
            for op in list {
                set.insert(op.clone()).unwrap();
            }
            set
        };
        let call = [chain[args.0], chain[args.1]];
        let lhs = resolve_operator("join", &call, &build(&ops), &types);
        let rhs = resolve_operator("join", &call, &build(&shuffled), &types);
        prop_assert_eq!(lhs, rhs);
    }
}

#[test]
fn generated_documents_round_trip() {
    let mut r = common::rng(11);
    for n in 0..300 {
        let doc = common::random_document(&mut r);
        let text = format_spec(&doc);
        let (parsed, diags) = parse_document(&text);
        assert!(diags.is_empty(), "document {n} does not parse: {diags:?}\n{text}");
        assert_eq!(parsed, doc, "document {n} changed:\n{text}");
        assert_eq!(format_spec(&parsed), text);
    }
}
