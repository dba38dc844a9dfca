//! Seeded search for witnesses of formulas the exact procedure cannot
//! decide. Every candidate is checked by exact evaluation, so a hit is a
//! genuine model.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::fm::{back_substitute, choose_simple, eliminate, within, Bound, Step};
use super::normal::Disjunct;
use crate::model::{Assertion, CmpOp, Rat, Term, TermKind, Valuation};

pub struct Sampler<'a> {
    pub rng: ChaCha8Rng,
    /// Per-variable ranges for plain sampling.
    pub ranges: &'a BTreeMap<String, (Rat, Rat)>,
    pub default_range: (Rat, Rat),
}

fn int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

impl Sampler<'_> {
    fn range(&self, var: &str) -> (Rat, Rat) {
        self.ranges.get(var).cloned().unwrap_or_else(|| self.default_range.clone())
    }

    /// Mostly small integers and simple fractions, sometimes anywhere in range.
    pub fn value(&mut self, var: &str) -> Rat {
        let (lo, hi) = self.range(var);
        let pick = self.rng.gen_range(0..10);
        let v = match pick {
            0..=3 => int(self.rng.gen_range(-5..=5)),
            4..=5 => Rat::new(BigInt::from(self.rng.gen_range(-12..=12)), BigInt::from(self.rng.gen_range(1..=6))),
            6..=7 => int(self.rng.gen_range(-100..=100)),
            _ => {
                let t = Rat::new(BigInt::from(self.rng.gen_range(0..=1000)), BigInt::from(1000));
                &lo + (&hi - &lo) * t
            }
        };
        v.max(lo).min(hi)
    }

    fn offset(&mut self) -> Rat {
        match self.rng.gen_range(0..3) {
            0 => Rat::one(),
            1 => int(self.rng.gen_range(1..=10)),
            _ => Rat::new(BigInt::one(), BigInt::from(self.rng.gen_range(2..=8))),
        }
    }

    /// A random rational within the bounds, preferring integers.
    pub fn between(&mut self, lo: &Bound, hi: &Bound) -> Rat {
        match (lo, hi) {
            (None, None) => int(self.rng.gen_range(-5..=5)),
            (Some((l, _)), None) => {
                let base = if l.is_integer() { l.clone() } else { l.ceil() };
                let v = &base + int(self.rng.gen_range(0..=4));
                if within(&v, lo, hi) {
                    v
                } else {
                    l + self.offset()
                }
            }
            (None, Some((h, _))) => {
                let base = if h.is_integer() { h.clone() } else { h.floor() };
                let v = &base - int(self.rng.gen_range(0..=4));
                if within(&v, lo, hi) {
                    v
                } else {
                    h - self.offset()
                }
            }
            (Some((l, _)), Some((h, _))) => {
                if l == h {
                    return l.clone();
                }
                let (a, b) = (l.ceil(), h.floor());
                if a <= b && self.rng.gen_bool(0.6) {
                    let span = (&b - &a).to_integer();
                    let span: i64 = span.try_into().unwrap_or(i64::MAX).min(1_000_000);
                    let v = &a + int(self.rng.gen_range(0..=span));
                    if within(&v, lo, hi) {
                        return v;
                    }
                }
                let m = self.rng.gen_range(2..=16);
                let j = self.rng.gen_range(1..m);
                l + (h - l) * Rat::new(BigInt::from(j), BigInt::from(m))
            }
        }
    }

    pub fn random_point(&mut self, vars: &BTreeSet<String>) -> Valuation {
        vars.iter().map(|v| (v.clone(), self.value(v))).collect()
    }
}

/// Definitional comparisons `v = e` with `v` not free in `e`, chosen so that
/// no defining term refers to another defined variable.
fn definitions(d: &Disjunct) -> Vec<(String, Term)> {
    let mut defs: Vec<(String, Term)> = Vec::new();
    let mut defined: BTreeSet<String> = BTreeSet::new();
    let mut used: BTreeSet<String> = BTreeSet::new();
    for (a, positive) in &d.residue {
        let Assertion::Cmp { op: CmpOp::Eq, lhs, rhs, .. } = a else { continue };
        if !positive {
            continue;
        }
        for (side, other) in [(lhs, rhs), (rhs, lhs)] {
            let TermKind::Var(v) = &side.kind else { continue };
            let mut deps = BTreeSet::new();
            other.collect_vars(&mut deps);
            if defined.contains(v) || used.contains(v) || deps.contains(v) || deps.iter().any(|x| defined.contains(x)) {
                continue;
            }
            defined.insert(v.clone());
            used.extend(deps);
            defs.push((v.clone(), other.clone()));
            break;
        }
    }
    defs
}

/// Guided search on one disjunct: satisfy its linear part by randomised
/// back-substitution over the non-defined variables, then compute the
/// defined ones. `None` when the linear part is too large to project.
pub fn guided(
    s: &mut Sampler<'_>,
    d: &Disjunct,
    formula: &Assertion,
    all_vars: &BTreeSet<String>,
    tries: usize,
) -> Option<Valuation> {
    let defs = definitions(d);
    let defined: BTreeSet<String> = defs.iter().map(|(v, _)| v.clone()).collect();
    let proj = eliminate(&d.linear, &defined).ok()?;
    if proj.infeasible {
        return None;
    }
    let rest: BTreeSet<String> =
        proj.remaining.iter().flat_map(|c| c.form.coeffs.keys().cloned()).collect();
    let e = eliminate(&proj.remaining, &rest).ok()?;
    if e.infeasible {
        return None;
    }
    let stepped: BTreeSet<&String> = e
        .steps
        .iter()
        .map(|st| match st {
            Step::Subst { var, .. } | Step::Bounds { var, .. } => var,
        })
        .collect();
    for attempt in 0..tries {
        // the first attempt takes the simplest values, later ones are random
        let mut base = Valuation::new();
        for v in all_vars {
            if !defined.contains(v) && !stepped.contains(v) {
                let x = if attempt == 0 { Rat::zero() } else { s.value(v) };
                base.insert(v.clone(), x);
            }
        }
        let found = if attempt == 0 {
            back_substitute(&e.steps, base, &mut choose_simple)
        } else {
            back_substitute(&e.steps, base, &mut |lo: &Bound, hi: &Bound| s.between(lo, hi))
        };
        let Some(mut point) = found else { continue };
        let mut ok = true;
        for (v, t) in &defs {
            match t.eval(&point) {
                Some(x) => {
                    point.insert(v.clone(), x);
                }
                None => {
                    ok = false;
                    break;
                }
            }
        }
        if ok && formula.eval(&point) {
            return Some(point);
        }
    }
    None
}

/// Exhaustive search over a small grid of simple values.
pub fn small_grid(formula: &Assertion, vars: &BTreeSet<String>, limit: usize) -> Option<Valuation> {
    let values: Vec<Rat> = [0, 1, -1, 2, -2, 3, -3]
        .into_iter()
        .map(int)
        .chain([Rat::new(1.into(), 2.into()), Rat::new((-1).into(), 2.into())])
        .collect();
    let names: Vec<&String> = vars.iter().collect();
    let total = (values.len() as f64).powi(names.len() as i32);
    if names.is_empty() || total > limit as f64 {
        return None;
    }
    let mut idx = vec![0usize; names.len()];
    loop {
        let point: Valuation = names.iter().zip(&idx).map(|(n, i)| ((*n).clone(), values[*i].clone())).collect();
        if formula.eval(&point) {
            return Some(point);
        }
        let mut k = 0;
        loop {
            if k == idx.len() {
                return None;
            }
            idx[k] += 1;
            if idx[k] < values.len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}
