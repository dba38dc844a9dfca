//! Exact Fourier-Motzkin elimination over the rationals, with strict
//! inequalities and equality substitution.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use super::linear::{Constraint, LinearForm, Rel};
use crate::model::{Rat, Valuation};

pub const MAX_CONSTRAINTS: usize = 4000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("elimination exceeded {0} constraints")]
pub struct FmTooLarge(pub usize);

/// How one variable was removed, kept for back-substitution.
#[derive(Debug, Clone)]
pub enum Step {
    Subst { var: String, value: LinearForm },
    Bounds { var: String, constraints: Vec<Constraint> },
}

#[derive(Debug, Clone)]
pub struct Elimination {
    /// Constraints over the kept variables; meaningless when infeasible.
    pub remaining: Vec<Constraint>,
    pub steps: Vec<Step>,
    pub infeasible: bool,
}

/// Drops satisfied ground constraints, scales by the leading coefficient,
/// keeps the tightest of parallel bounds and turns complementary `<=` pairs
/// into equalities. `None` when a contradiction is found.
fn simplify(cs: Vec<Constraint>) -> Option<Vec<Constraint>> {
    let mut eqs: BTreeMap<BTreeMap<String, Rat>, Rat> = BTreeMap::new();
    let mut ineqs: BTreeMap<BTreeMap<String, Rat>, (Rat, bool)> = BTreeMap::new();
    for c in cs {
        if c.form.is_constant() {
            if c.holds_at(&c.form.constant) {
                continue;
            }
            return None;
        }
        let lead = c.form.coeffs.values().next().expect("non-constant").abs();
        let form = c.form.scale(&lead.recip());
        match c.rel {
            Rel::Eq => {
                // normalise the sign too, so `x = 1` and `-x = -1` coincide
                let form = if form.coeffs.values().next().is_some_and(|v| v.is_negative()) {
                    form.scale(&-Rat::one())
                } else {
                    form
                };
                match eqs.get(&form.coeffs) {
                    Some(k) if *k != form.constant => return None,
                    _ => {
                        eqs.insert(form.coeffs, form.constant);
                    }
                }
            }
            Rel::Le | Rel::Lt => {
                let strict = c.rel == Rel::Lt;
                let tighter = match ineqs.get(&form.coeffs) {
                    None => true,
                    Some((k, s)) => form.constant > *k || (form.constant == *k && strict && !s),
                };
                if tighter {
                    ineqs.insert(form.coeffs, (form.constant, strict));
                }
            }
        }
    }
    let keys: Vec<_> = ineqs.keys().cloned().collect();
    for key in keys {
        let neg: BTreeMap<String, Rat> = key.iter().map(|(x, c)| (x.clone(), -c)).collect();
        let (Some((k1, s1)), Some((k2, s2))) = (ineqs.get(&key).cloned(), ineqs.get(&neg).cloned()) else {
            continue;
        };
        let sum = &k1 + &k2;
        if sum.is_positive() || (sum.is_zero() && (s1 || s2)) {
            return None;
        }
        if sum.is_zero() {
            ineqs.remove(&key);
            ineqs.remove(&neg);
            let (coeffs, constant) = if key.values().next().is_some_and(|v| v.is_negative()) {
                (neg, k2)
            } else {
                (key, k1)
            };
            match eqs.get(&coeffs) {
                Some(k) if *k != constant => return None,
                _ => {
                    eqs.insert(coeffs, constant);
                }
            }
        }
    }
    let mut out: Vec<Constraint> = eqs
        .into_iter()
        .map(|(coeffs, constant)| Constraint::new(LinearForm { coeffs, constant }, Rel::Eq))
        .collect();
    out.extend(ineqs.into_iter().map(|(coeffs, (constant, strict))| {
        Constraint::new(LinearForm { coeffs, constant }, if strict { Rel::Lt } else { Rel::Le })
    }));
    Some(out)
}

/// Eliminates `vars` from the conjunction `cs`. Variables sitting in an
/// equality are substituted away first; otherwise the variable with the
/// fewest lower-times-upper pairings goes next, ties broken by name.
pub fn eliminate(cs: &[Constraint], vars: &BTreeSet<String>) -> Result<Elimination, FmTooLarge> {
    let mut steps = Vec::new();
    let Some(mut set) = simplify(cs.to_vec()) else {
        return Ok(Elimination { remaining: vec![], steps, infeasible: true });
    };
    loop {
        let present: BTreeSet<&String> =
            set.iter().flat_map(|c| c.form.coeffs.keys()).filter(|x| vars.contains(*x)).collect();
        let Some(var) = present
            .iter()
            .map(|x| {
                let in_eq = set.iter().any(|c| c.rel == Rel::Eq && c.form.coeffs.contains_key(*x));
                let cost = if in_eq {
                    0
                } else {
                    let lower = set.iter().filter(|c| c.form.coeff(x).is_negative()).count();
                    let upper = set.iter().filter(|c| c.form.coeff(x).is_positive()).count();
                    1 + lower * upper
                };
                (cost, (*x).clone())
            })
            .min()
            .map(|(_, x)| x)
        else {
            break;
        };

        let next = if let Some(eq) = set.iter().find(|c| c.rel == Rel::Eq && c.form.coeffs.contains_key(&var)) {
            let a = eq.form.coeff(&var);
            let mut rest = eq.form.clone();
            rest.coeffs.remove(&var);
            let value = rest.scale(&(-a.recip()));
            let next: Vec<Constraint> = set
                .iter()
                .filter(|c| *c != eq)
                .map(|c| Constraint::new(c.form.substitute(&var, &value), c.rel))
                .collect();
            steps.push(Step::Subst { var: var.clone(), value });
            next
        } else {
            let (with, without): (Vec<Constraint>, Vec<Constraint>) =
                set.into_iter().partition(|c| c.form.coeffs.contains_key(&var));
            let (upper, lower): (Vec<&Constraint>, Vec<&Constraint>) =
                with.iter().partition(|c| c.form.coeff(&var).is_positive());
            if without.len() + upper.len() * lower.len() > MAX_CONSTRAINTS {
                return Err(FmTooLarge(MAX_CONSTRAINTS));
            }
            let mut next = without;
            for u in &upper {
                let au = u.form.coeff(&var);
                for l in &lower {
                    let al = -l.form.coeff(&var);
                    // al * u + au * l cancels var
                    let form = u.form.scale(&al).add_scaled(&l.form, &au);
                    let rel = if u.rel == Rel::Lt || l.rel == Rel::Lt { Rel::Lt } else { Rel::Le };
                    next.push(Constraint::new(form, rel));
                }
            }
            steps.push(Step::Bounds { var: var.clone(), constraints: with });
            next
        };
        match simplify(next) {
            Some(s) => set = s,
            None => return Ok(Elimination { remaining: vec![], steps, infeasible: true }),
        }
        if set.len() > MAX_CONSTRAINTS {
            return Err(FmTooLarge(MAX_CONSTRAINTS));
        }
    }
    Ok(Elimination { remaining: set, steps, infeasible: false })
}

/// Bounds on one variable during back-substitution: `(value, strict)`.
pub type Bound = Option<(Rat, bool)>;

/// Assigns the eliminated variables in reverse order. `base` must already
/// bind the kept variables. `None` if some bound interval is empty.
pub fn back_substitute(
    steps: &[Step],
    mut val: Valuation,
    choose: &mut dyn FnMut(&Bound, &Bound) -> Rat,
) -> Option<Valuation> {
    for step in steps.iter().rev() {
        match step {
            Step::Subst { var, value } => {
                let v = value.eval(&val);
                val.insert(var.clone(), v);
            }
            Step::Bounds { var, constraints } => {
                let mut lo: Bound = None;
                let mut hi: Bound = None;
                for c in constraints {
                    let a = c.form.coeff(var);
                    let mut rest = c.form.clone();
                    rest.coeffs.remove(var);
                    let b = -rest.eval(&val) / &a;
                    let strict = c.rel == Rel::Lt;
                    if a.is_positive() {
                        let better = match &hi {
                            None => true,
                            Some((h, s)) => b < *h || (b == *h && strict && !s),
                        };
                        if better {
                            hi = Some((b, strict));
                        }
                    } else {
                        let better = match &lo {
                            None => true,
                            Some((l, s)) => b > *l || (b == *l && strict && !s),
                        };
                        if better {
                            lo = Some((b, strict));
                        }
                    }
                }
                if let (Some((l, sl)), Some((h, sh))) = (&lo, &hi) {
                    if l > h || (l == h && (*sl || *sh)) {
                        return None;
                    }
                }
                let v = choose(&lo, &hi);
                val.insert(var.clone(), v);
            }
        }
    }
    Some(val)
}

pub fn within(v: &Rat, lo: &Bound, hi: &Bound) -> bool {
    let above = match lo {
        None => true,
        Some((l, true)) => v > l,
        Some((l, false)) => v >= l,
    };
    let below = match hi {
        None => true,
        Some((h, true)) => v < h,
        Some((h, false)) => v <= h,
    };
    above && below
}

/// Smallest-magnitude integer in the interval when there is one near its
/// ends, otherwise a bound or the midpoint.
pub fn choose_simple(lo: &Bound, hi: &Bound) -> Rat {
    let zero = Rat::zero();
    if within(&zero, lo, hi) {
        return zero;
    }
    let mut candidates = Vec::new();
    if let Some((l, _)) = lo {
        let c = l.floor() + Rat::one();
        candidates.push(if l.is_integer() && !lo.as_ref().is_some_and(|b| b.1) { l.clone() } else { c });
    }
    if let Some((h, _)) = hi {
        let c = h.ceil() - Rat::one();
        candidates.push(if h.is_integer() && !hi.as_ref().is_some_and(|b| b.1) { h.clone() } else { c });
    }
    candidates.sort_by_key(|c| c.abs());
    for c in candidates {
        if within(&c, lo, hi) {
            return c;
        }
    }
    match (lo, hi) {
        (Some((l, _)), Some((h, _))) => (l + h) / Rat::from_integer(2.into()),
        (Some((l, _)), None) => l + Rat::one(),
        (None, Some((h, _))) => h - Rat::one(),
        (None, None) => zero,
    }
}

/// Satisfiability of a conjunction with a witness over its variables.
pub fn solve(cs: &[Constraint]) -> Result<Option<Valuation>, FmTooLarge> {
    let vars: BTreeSet<String> = cs.iter().flat_map(|c| c.form.coeffs.keys().cloned()).collect();
    let e = eliminate(cs, &vars)?;
    if e.infeasible {
        return Ok(None);
    }
    debug_assert!(e.remaining.is_empty());
    let mut choose = choose_simple;
    Ok(back_substitute(&e.steps, Valuation::new(), &mut choose))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::normal::normalize;
    use crate::model::{rat, ratio};
    use crate::syntax::parse_assertion;

    fn system(src: &str) -> Vec<Constraint> {
        let d = normalize(&parse_assertion(src).unwrap(), 16).unwrap();
        assert_eq!(d.disjuncts.len(), 1);
        d.disjuncts[0].linear.clone()
    }

    #[test]
    fn finds_witnesses() {
        let cs = system("x + y <= 4 && x - y >= 1 && y > 1/2");
        let w = solve(&cs).unwrap().unwrap();
        assert!(cs.iter().all(|c| c.holds(&w)), "{w:?}");
        let cs = system("2 * x = 3 && y = x + 1");
        let w = solve(&cs).unwrap().unwrap();
        assert_eq!(w["x"], ratio(3, 2));
        assert_eq!(w["y"], ratio(5, 2));
    }

    #[test]
    fn detects_infeasibility() {
        assert!(solve(&system("x < 1 && x > 0 && 2 * x >= 2")).unwrap().is_none());
        assert!(solve(&system("x <= y && y <= z && z < x")).unwrap().is_none());
        // strictness matters at the boundary
        assert!(solve(&system("x <= 1 && x >= 1")).unwrap().is_some());
        assert!(solve(&system("x < 1 && x >= 1")).unwrap().is_none());
    }

    #[test]
    fn projection_keeps_other_variables() {
        let cs = system("r = a + b && a = 1 && b = 2");
        let keep: BTreeSet<String> = ["a".to_string(), "b".to_string()].into();
        let e = eliminate(&cs, &keep).unwrap();
        assert!(!e.infeasible);
        assert_eq!(e.remaining.len(), 1);
        assert_eq!(e.remaining[0].to_string(), "r = 3");
        let w = back_substitute(&e.steps, [("r".to_string(), rat(3))].into(), &mut choose_simple).unwrap();
        assert_eq!(w["a"], rat(1));
    }
}
