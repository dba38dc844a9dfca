use std::collections::BTreeSet;

use thiserror::Error;

use super::linear::{linearize, Constraint};
use crate::model::{Assertion, BoolOp, Valuation};

/// One conjunction of the normal form: linear constraints plus nonlinear
/// comparisons kept with their polarity. A residue literal `(atom, false)`
/// stands for `!atom`, which also holds where the atom is undefined.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Disjunct {
    pub linear: Vec<Constraint>,
    pub residue: Vec<(Assertion, bool)>,
}

impl Disjunct {
    pub fn is_linear(&self) -> bool {
        self.residue.is_empty()
    }

    pub fn vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        for c in &self.linear {
            out.extend(c.form.coeffs.keys().cloned());
        }
        for (a, _) in &self.residue {
            a.collect_vars(&mut out);
        }
        out
    }

    pub fn holds(&self, val: &Valuation) -> bool {
        self.linear.iter().all(|c| c.holds(val)) && self.residue.iter().all(|(a, p)| a.eval(val) == *p)
    }

    pub fn to_assertion(&self) -> Assertion {
        let lin = self.linear.iter().map(Constraint::to_assertion);
        let res = self.residue.iter().map(|(a, p)| if *p { a.clone() } else { a.clone().negate() });
        Assertion::conjunction(lin.chain(res))
    }
}

/// Disjunctive normal form; no disjuncts means `false`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Dnf {
    pub disjuncts: Vec<Disjunct>,
}

impl Dnf {
    pub fn is_linear(&self) -> bool {
        self.disjuncts.iter().all(Disjunct::is_linear)
    }

    pub fn to_assertion(&self) -> Assertion {
        Assertion::disjunction(self.disjuncts.iter().map(Disjunct::to_assertion))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("normal form exceeds {0} disjuncts")]
pub struct DnfTooLarge(pub usize);

enum Nnf {
    Const(bool),
    Lin(Constraint),
    Res(Assertion, bool),
    And(Vec<Nnf>),
    Or(Vec<Nnf>),
}

fn nnf(a: &Assertion, positive: bool) -> Nnf {
    match a {
        Assertion::Bool(b) => Nnf::Const(*b == positive),
        Assertion::Not(x) => nnf(x, !positive),
        Assertion::Cmp { op, lhs, rhs, .. } => match (linearize(lhs), linearize(rhs)) {
            (Some(l), Some(r)) => {
                let mut alts: Vec<Nnf> = Constraint::from_comparison(*op, &l, &r, positive)
                    .into_iter()
                    .map(|c| {
                        if c.form.is_constant() {
                            Nnf::Const(c.holds_at(&c.form.constant))
                        } else {
                            Nnf::Lin(c)
                        }
                    })
                    .collect();
                if alts.len() == 1 {
                    alts.pop().expect("one alternative")
                } else {
                    Nnf::Or(alts)
                }
            }
            _ if a.vars().is_empty() => Nnf::Const(a.eval(&Valuation::new()) == positive),
            _ => Nnf::Res(a.clone(), positive),
        },
        Assertion::Bin(op, x, y) => match (op, positive) {
            (BoolOp::And, true) => Nnf::And(vec![nnf(x, true), nnf(y, true)]),
            (BoolOp::And, false) => Nnf::Or(vec![nnf(x, false), nnf(y, false)]),
            (BoolOp::Or, true) => Nnf::Or(vec![nnf(x, true), nnf(y, true)]),
            (BoolOp::Or, false) => Nnf::And(vec![nnf(x, false), nnf(y, false)]),
            (BoolOp::Implies, true) => Nnf::Or(vec![nnf(x, false), nnf(y, true)]),
            (BoolOp::Implies, false) => Nnf::And(vec![nnf(x, true), nnf(y, false)]),
        },
    }
}

fn dnf(n: Nnf, cap: usize) -> Result<Vec<Disjunct>, DnfTooLarge> {
    match n {
        Nnf::Const(true) => Ok(vec![Disjunct::default()]),
        Nnf::Const(false) => Ok(vec![]),
        Nnf::Lin(c) => Ok(vec![Disjunct { linear: vec![c], residue: vec![] }]),
        Nnf::Res(a, p) => Ok(vec![Disjunct { linear: vec![], residue: vec![(a, p)] }]),
        Nnf::Or(items) => {
            let mut out = Vec::new();
            for i in items {
                out.extend(dnf(i, cap)?);
                if out.len() > cap {
                    return Err(DnfTooLarge(cap));
                }
            }
            Ok(out)
        }
        Nnf::And(items) => {
            let mut acc = vec![Disjunct::default()];
            for i in items {
                let part = dnf(i, cap)?;
                if part.is_empty() {
                    return Ok(vec![]);
                }
                if acc.len().saturating_mul(part.len()) > cap {
                    return Err(DnfTooLarge(cap));
                }
                let mut next = Vec::with_capacity(acc.len() * part.len());
                for a in &acc {
                    for p in &part {
                        let mut d = a.clone();
                        d.linear.extend(p.linear.iter().cloned());
                        d.residue.extend(p.residue.iter().cloned());
                        next.push(d);
                    }
                }
                acc = next;
            }
            Ok(acc)
        }
    }
}

/// Negation normal form followed by distribution into at most `cap`
/// disjuncts. Linear comparisons become constraints; `!=` splits into two
/// strict inequalities.
pub fn normalize(a: &Assertion, cap: usize) -> Result<Dnf, DnfTooLarge> {
    let mut disjuncts = dnf(nnf(a, true), cap)?;
    for d in &mut disjuncts {
        d.linear.sort();
        d.linear.dedup();
    }
    Ok(Dnf { disjuncts })
}
