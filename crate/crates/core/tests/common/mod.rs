//! Random generators shared by the integration tests and the acceptance run.
#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use sc_core::model::{ratio, Assertion, BoolOp, CmpOp, ComponentType, Contract, Rat, Term, TermKind};
use sc_core::syntax::*;

pub const CMP_OPS: [CmpOp; 6] = [CmpOp::Le, CmpOp::Lt, CmpOp::Eq, CmpOp::Ne, CmpOp::Ge, CmpOp::Gt];

pub fn rng(seed: u64) -> ChaCha8Rng {
    rand::SeedableRng::seed_from_u64(seed)
}

/// `sum c_i * v_i + k` with coefficients and constant in [-3, 3].
pub fn linear_term(r: &mut ChaCha8Rng, vars: &[&str]) -> Term {
    let mut t = Term::int(r.gen_range(-3..=3));
    for v in vars {
        let c = r.gen_range(-3..=3);
        if c != 0 {
            t = t + Term::int(c) * Term::var(*v);
        }
    }
    t
}

pub fn linear_atom(r: &mut ChaCha8Rng, vars: &[&str]) -> Assertion {
    let op = *CMP_OPS.choose(r).expect("nonempty");
    linear_term(r, vars).cmp(op, Term::int(0))
}

/// Boolean combination of up to `atoms` linear comparisons.
pub fn linear_formula(r: &mut ChaCha8Rng, vars: &[&str], atoms: usize) -> Assertion {
    let n = r.gen_range(1..=atoms);
    let mut f = linear_atom(r, vars);
    for _ in 1..n {
        let a = linear_atom(r, vars);
        f = match r.gen_range(0..4) {
            0 | 1 => f.and(a),
            2 => f.or(a),
            _ => f.implies(a),
        };
    }
    if r.gen_bool(0.15) {
        f.negate()
    } else {
        f
    }
}

pub fn random_vars(r: &mut ChaCha8Rng, max: usize) -> Vec<&'static str> {
    const NAMES: [&str; 4] = ["x", "y", "z", "w"];
    NAMES[..r.gen_range(1..=max)].to_vec()
}

pub fn linear_component(vars: &[&str]) -> ComponentType {
    let fields: Vec<(&str, &str)> = vars.iter().map(|v| (*v, "q")).collect();
    ComponentType::new("Box", &fields)
}

/// A pair of contracts over the same fields; about half the time the
/// second is a weakening of the first so both verdicts are common.
pub fn contract_pair(r: &mut ChaCha8Rng, vars: &[&str]) -> (Contract, Contract) {
    let ty = linear_component(vars);
    let a1 = linear_formula(r, vars, 2);
    let g1 = linear_formula(r, vars, 2);
    let (a2, g2) = match r.gen_range(0..4) {
        0 => (a1.clone().and(linear_atom(r, vars)), g1.clone().or(linear_atom(r, vars))),
        1 => (a1.clone(), g1.clone().or(linear_formula(r, vars, 2))),
        _ => (linear_formula(r, vars, 2), linear_formula(r, vars, 2)),
    };
    (Contract::new("C", ty.clone(), a1, g1), Contract::new("D", ty, a2, g2))
}

// ---- documents ----

const WORDS: [&str; 12] = ["alpha", "beta", "gamma", "delta", "eps", "zeta", "eta", "theta", "iota", "kappa", "mu", "nu"];

fn ident(r: &mut ChaCha8Rng, prefix: &str) -> Ident {
    Ident::new(format!("{prefix}{}{}", WORDS.choose(r).expect("nonempty"), r.gen_range(0..100)))
}

fn rational(r: &mut ChaCha8Rng) -> Rat {
    match r.gen_range(0..4) {
        0 => ratio(r.gen_range(-9..=9), r.gen_range(1..=7)),
        1 => ratio(r.gen_range(0..=1000), 100),
        _ => Rat::from_integer(r.gen_range(-20..=20).into()),
    }
}

fn var_name(r: &mut ChaCha8Rng) -> String {
    let base = ["r", "u", "i", "p", "x_1", "load"].choose(r).expect("nonempty").to_string();
    if r.gen_bool(0.4) {
        format!("{}.{base}", ["a", "b", "c1"].choose(r).expect("nonempty"))
    } else {
        base
    }
}

pub fn random_term(r: &mut ChaCha8Rng, depth: u32) -> Term {
    if depth == 0 || r.gen_bool(0.3) {
        return if r.gen_bool(0.5) { Term::constant(rational(r)) } else { Term::var(var_name(r)) };
    }
    match r.gen_range(0..6) {
        0 => Term::new(TermKind::Neg(Box::new(random_term(r, depth - 1)))),
        1 => random_term(r, depth - 1) + random_term(r, depth - 1),
        2 => random_term(r, depth - 1) - random_term(r, depth - 1),
        3 => random_term(r, depth - 1) * random_term(r, depth - 1),
        4 => random_term(r, depth - 1) / random_term(r, depth - 1),
        _ => random_term(r, depth - 1),
    }
}

pub fn random_assertion(r: &mut ChaCha8Rng, depth: u32) -> Assertion {
    if depth == 0 || r.gen_bool(0.3) {
        return match r.gen_range(0..8) {
            0 => Assertion::Bool(r.gen_bool(0.5)),
            _ => {
                let op = *CMP_OPS.choose(r).expect("nonempty");
                random_term(r, 2).cmp(op, random_term(r, 2))
            }
        };
    }
    let op = [BoolOp::And, BoolOp::Or, BoolOp::Implies].choose(r).copied().expect("nonempty");
    match r.gen_range(0..4) {
        0 => random_assertion(r, depth - 1).negate(),
        _ => Assertion::Bin(op, Box::new(random_assertion(r, depth - 1)), Box::new(random_assertion(r, depth - 1))),
    }
}

fn some<T>(r: &mut ChaCha8Rng, lo: usize, hi: usize, mut f: impl FnMut(&mut ChaCha8Rng) -> T) -> Vec<T> {
    let n = r.gen_range(lo..=hi);
    (0..n).map(|_| f(r)).collect()
}

/// A syntactically valid document; names need not resolve.
pub fn random_document(r: &mut ChaCha8Rng) -> SpecDocument {
    let quantities = some(r, 0, 4, |r| QuantityDecl {
        name: ident(r, "q"),
        def: match r.gen_range(0..3) {
            0 => QuantityDef::Base,
            1 => QuantityDef::Subdomain(ident(r, "q")),
            _ => QuantityDef::Derived(some(r, 1, 3, |r| (ident(r, "q"), r.gen_range(-3..=3)))),
        },
    });
    let components = some(r, 0, 3, |r| ComponentDecl {
        name: ident(r, "T"),
        supertype: r.gen_bool(0.3).then(|| ident(r, "T")),
        fields: some(r, 0, 4, |r| FieldDecl { name: ident(r, "f"), quantity: ident(r, "q") }),
    });
    let operators = some(r, 0, 2, |r| OperatorDecl {
        name: ident(r, "op"),
        params: some(r, 1, 3, |r| ParamDecl { name: ident(r, "a"), ty: ident(r, "T") }),
        result: ident(r, "T"),
        glue: some(r, 0, 3, |r| random_assertion(r, 2)),
    });
    let contracts = some(r, 0, 3, |r| ContractDecl {
        name: ident(r, "C"),
        subject: ident(r, "T"),
        assumption: random_assertion(r, 3),
        guarantee: random_assertion(r, 3),
    });
    let refinements = some(r, 0, 2, |r| RefinementDecl {
        name: ident(r, "Ob"),
        concrete: if r.gen_bool(0.5) {
            ConcreteDecl::Contract(ident(r, "C"))
        } else {
            ConcreteDecl::Compose {
                operator: ident(r, "op"),
                bindings: some(r, 1, 3, |r| BindingDecl { contract: ident(r, "C"), instance: ident(r, "i") }),
            }
        },
        abstract_: ident(r, "C"),
        grid: some(r, 0, 3, |r| GridAxis {
            var: Ident::new(var_name(r)),
            values: some(r, 1, 4, rational),
        }),
    });
    SpecDocument { quantities, components, operators, contracts, refinements }
}
