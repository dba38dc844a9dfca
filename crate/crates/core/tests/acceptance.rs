//! One PASS/FAIL line per acceptance criterion; exits nonzero on any FAIL.

mod common;

use std::process::Command;
use std::time::{Duration, Instant};

use sc_core::algebra::{
    check_refinement, compose_contracts, interpret_composed, verify_min_characterization, ComposedContract,
    Concrete, ProjectedAssertion, ProjectionStatus, Side,
};
use sc_core::engine::{Engine, Method, Verdict};
use sc_core::model::{
    interpret_finite, ratio, refines_finite, Assertion, Contract, FiniteGrid, Term, Valuation,
};
use sc_core::syntax::{format_spec, parse_document, parse_spec};
use sc_core::types::{elaborate, Program};

const RESISTORS: &str = include_str!("../../../specs/resistors.scspec");
const POWER: &str = include_str!("../../../specs/power.scspec");

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn program(src: &str) -> Result<Program, String> {
    let doc = parse_spec(src).map_err(|d| format!("{d:?}"))?;
    let p = elaborate(&doc);
    ensure(!p.has_errors(), "corpus has type errors")?;
    Ok(p)
}

fn compose(p: &Program, op: &str, parts: &[(&str, &str)]) -> Result<ComposedContract, String> {
    let op = p.operators.overloads(op).first().ok_or("missing operator")?;
    let bindings: Vec<(String, Contract)> =
        parts.iter().map(|(c, i)| (i.to_string(), p.contracts[*c].clone())).collect();
    compose_contracts(op, &bindings, &Engine::default()).map_err(|e| e.to_string())
}

fn fixed(p: &Program, component: &str, field: &str, value: Term) -> Contract {
    let ty = p.components.get(component).expect("declared").clone();
    Contract::new("Fixed", ty, Assertion::truth(), Term::var(field).eq(value))
}

fn refinement(cc: &ComposedContract, c: &Contract) -> Result<Verdict, String> {
    check_refinement(Concrete::Composed(cc), c, &Engine::default()).map(|r| r.verdict).map_err(|e| e.to_string())
}

fn r_grid(values: impl IntoIterator<Item = i64>) -> FiniteGrid {
    FiniteGrid::new().with_ints("r", values).with_ints("u", [0]).with_ints("i", [0]).with_ints("p", [0])
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let p = program(RESISTORS)?;
    let cc = compose(&p, "series", &[("R1", "c1"), ("R2", "c2")])?;
    let v = refinement(&cc, &p.contracts["Sys"])?;
    let took = start.elapsed();
    ensure(matches!(v, Verdict::Proved { method: Method::Exact, .. }), format!("verdict {v:?}"))?;
    ensure(took < Duration::from_secs(1), format!("took {took:?}"))?;
    Ok(format!("series(R1,R2) <= Sys proved exactly in {took:.2?}"))
}

fn criterion_2() -> Outcome {
    let p = program(RESISTORS)?;
    let scaled = compose(&p, "scaled", &[("R1", "c1"), ("R2", "c2")])?;
    ensure(refinement(&scaled, &p.contracts["Sys"])?.is_proved(), "scaled(R1,R2) does not refine Sys")?;
    let series_rev = compose(&p, "series", &[("R2", "c1"), ("R1", "c2")])?;
    let scaled_rev = compose(&p, "scaled", &[("R2", "c1"), ("R1", "c2")])?;
    ensure(refinement(&series_rev, &fixed(&p, "Resistor", "r", Term::int(3)))?.is_proved(), "series(R2,R1) not r=3")?;
    ensure(refinement(&scaled_rev, &fixed(&p, "Resistor", "r", Term::int(6)))?.is_proved(), "scaled(R2,R1) not r=6")?;
    let grid = r_grid(0..=6);
    let a = interpret_composed(&series_rev, &grid).map_err(|e| e.to_string())?;
    let b = interpret_composed(&scaled_rev, &grid).map_err(|e| e.to_string())?;
    ensure(a != b, "interpretations coincide")?;
    Ok("scaled(R1,R2) <= Sys proved; with (R2,R1) series entails r=3, scaled r=6, interpretations differ".into())
}

fn criterion_3() -> Outcome {
    let p = program(RESISTORS)?;
    let cc = compose(&p, "parallel", &[("R1", "c1"), ("R2", "c2")])?;
    let res = check_refinement(Concrete::Composed(&cc), &p.contracts["Sys"], &Engine::default())
        .map_err(|e| e.to_string())?;
    let w = res.verdict.witness().ok_or("no witness")?;
    ensure(res.verdict.is_falsified() && res.side == Some(Side::Implementation), format!("{res:?}"))?;
    ensure(w["r"] == ratio(2, 3), format!("witness r = {}", w["r"]))?;
    ensure(cc.guarantee_body.eval(w), "witness does not satisfy the concrete guarantee")?;
    ensure(!p.contracts["Sys"].saturated_guarantee().eval(w), "witness satisfies Sys")?;
    let exact = refinement(&cc, &fixed(&p, "Resistor", "r", Term::constant(ratio(2, 3))))?;
    ensure(!exact.is_falsified(), "falsified against r = 2/3")?;
    Ok(format!("Sys falsified with r=2/3 re-evaluated; against r=2/3 {}", exact.label()))
}

fn criterion_4() -> Outcome {
    let p = program(POWER)?;
    let cc = compose(&p, "series", &[("L1", "x"), ("L2", "y")])?;
    ensure(cc.status == ProjectionStatus::Exact, "projection not exact")?;
    let v = refinement(&cc, &fixed(&p, "Load", "p", Term::int(3)))?;
    ensure(matches!(v, Verdict::Proved { method: Method::Exact, .. }), format!("{v:?}"))?;
    Ok(format!("series(p=1, p=2) <= p=3 proved exactly; composed guarantee `{}`", cc.guarantee))
}

fn criterion_5() -> Outcome {
    let start = Instant::now();
    let p = program(RESISTORS)?;
    let cc = compose(&p, "series", &[("R1", "c1"), ("R2", "c2")])?;
    let op = cc.provenance.operator.clone();
    let parts = cc.provenance.bindings.clone();
    let grids = [r_grid(0..=3), r_grid(0..=3).with_ints("u", [0, 1]), r_grid([1, 2, 3])];
    for g in &grids {
        let m = verify_min_characterization(&cc, &parts, &op, g).map_err(|e| e.to_string())?;
        ensure(m.condition && m.minimal == Some(true), format!("series: {m:?}"))?;
    }
    let grid = &grids[0];
    let weak = cc.clone().with_guarantee(ProjectedAssertion::Exact(Assertion::truth()));
    let m = verify_min_characterization(&weak, &parts, &op, grid).map_err(|e| e.to_string())?;
    ensure(!m.holds(), "weakened guarantee accepted")?;
    let a = cc.assumption.exact().ok_or("inexact")?.clone().and(Assertion::falsity());
    let strong = cc.clone().with_assumption(ProjectedAssertion::Exact(a));
    let n = verify_min_characterization(&strong, &parts, &op, grid).map_err(|e| e.to_string())?;
    ensure(!n.holds(), "strengthened assumption accepted")?;
    let took = start.elapsed();
    ensure(took < Duration::from_secs(10), format!("took {took:?}"))?;
    Ok(format!(
        "series minimal on {} grids; weakened guarantee minimal={:?}; strengthened assumption condition={} minimal={:?}; {took:.2?}",
        grids.len(),
        m.minimal,
        n.condition,
        n.minimal
    ))
}

fn int_grid(vars: &[&str], lo: i64, hi: i64) -> FiniteGrid {
    vars.iter().fold(FiniteGrid::new(), |g, v| g.with_ints(v, lo..=hi))
}

fn criterion_6() -> Outcome {
    let engine = Engine::default();
    let mut r = common::rng(6);
    let (mut proved, mut falsified, mut unknown) = (0, 0, 0);
    for n in 0..600 {
        let vars = common::random_vars(&mut r, 4);
        let premise = common::linear_formula(&mut r, &vars, 3);
        let conclusion = common::linear_formula(&mut r, &vars, 3);
        let verdict = engine.check_implication(&premise, &conclusion);
        let bad = |v: &Valuation| premise.eval(v) && !conclusion.eval(v);
        let counterexample = int_grid(&vars, -3, 3).valuations().into_iter().find(|v| bad(v));
        let agrees = match (&verdict, &counterexample) {
            (Verdict::Proved { .. }, None) => {
                proved += 1;
                true
            }
            (Verdict::Falsified { witness, .. }, _) => {
                falsified += 1;
                witness.as_ref().is_some_and(bad)
            }
            (Verdict::Unknown { .. }, None) => {
                unknown += 1;
                true
            }
            _ => false,
        };
        ensure(agrees, format!("instance {n}: {premise} => {conclusion}: {verdict:?} vs {counterexample:?}"))?;
    }
    Ok(format!("600 instances, 0 disagreements ({proved} proved, {falsified} falsified, {unknown} unknown)"))
}

fn criterion_7() -> Outcome {
    let engine = Engine::default();
    let mut r = common::rng(7);
    let total = 300;
    let (mut proved, mut falsified, mut unknown) = (0, 0, 0);
    for n in 0..total {
        let vars = common::random_vars(&mut r, 3);
        let (c, d) = common::contract_pair(&mut r, &vars);
        let grid = int_grid(&vars, -2, 2);
        let finite = |g: &FiniteGrid| -> Result<bool, String> {
            let a = interpret_finite(&c, g).map_err(|e| e.to_string())?;
            let b = interpret_finite(&d, g).map_err(|e| e.to_string())?;
            refines_finite(&a, &b).map_err(|e| e.to_string())
        };
        let verdict = check_refinement(Concrete::Contract(&c), &d, &engine).map_err(|e| e.to_string())?.verdict;
        let on_grid = finite(&grid)?;
        let agrees = match &verdict {
            Verdict::Proved { .. } => {
                proved += 1;
                on_grid
            }
            Verdict::Falsified { witness, .. } => {
                falsified += 1;
                let mut g = grid.clone();
                for (k, v) in witness.iter().flatten() {
                    g.insert_value(k, v.clone());
                }
                !finite(&g)?
            }
            Verdict::Unknown { .. } => {
                unknown += 1;
                true
            }
        };
        ensure(agrees, format!("pair {n}: {c:?} vs {d:?}: {verdict:?}, finite {on_grid}"))?;
    }
    let rate = unknown as f64 / total as f64;
    ensure(rate < 0.05, format!("unknown rate {rate}"))?;
    Ok(format!(
        "{total} pairs, 0 disagreements ({proved} proved, {falsified} falsified, {unknown} unknown = {:.1}%)",
        rate * 100.0
    ))
}

fn criterion_8() -> Outcome {
    let mut r = common::rng(8);
    for n in 0..1000 {
        let doc = common::random_document(&mut r);
        let text = format_spec(&doc);
        let (parsed, diags) = parse_document(&text);
        ensure(diags.is_empty(), format!("document {n}: {diags:?}"))?;
        ensure(parsed == doc, format!("document {n} changed"))?;
        ensure(format_spec(&parsed) == text, format!("document {n} is not a fixpoint"))?;
    }
    Ok("1000 generated documents, 100% structurally equal after a round trip".into())
}

fn criterion_9() -> Outcome {
    let corpus = concat!(env!("CARGO_MANIFEST_DIR"), "/../../specs/resistors.scspec");
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_sccheck"))
            .args(["check", corpus, "--format", "json", "--deterministic", "--seed", "7", "--oracle"])
            .output()
            .map_err(|e| e.to_string())
    };
    let (a, b) = (run()?, run()?);
    ensure(!a.stdout.is_empty() && a.stdout == b.stdout, "reports differ")?;
    ensure(a.status.code() == b.status.code(), "exit codes differ")?;
    Ok(format!("two runs, {} identical bytes", a.stdout.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("series example", criterion_1),
        ("term-signature ambiguity", criterion_2),
        ("parallel law", criterion_3),
        ("power additivity", criterion_4),
        ("min-characterization oracle", criterion_5),
        ("elimination vs grid oracle", criterion_6),
        ("refinement vs finite semantics", criterion_7),
        ("parser round trip", criterion_8),
        ("determinism", criterion_9),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS {} {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {} {name}: {why}", i + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
