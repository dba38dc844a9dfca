//! Interval evaluation and HC4-style forward/backward contraction. Used to
//! refute disjuncts that carry nonlinear comparisons.

use std::collections::BTreeMap;

use num_traits::{Signed, Zero};

use super::linear::Rel;
use super::normal::Disjunct;
use crate::model::{ArithOp, Assertion, CmpOp, Rat, Term, TermKind};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Ext {
    NegInf,
    Fin(Rat),
    PosInf,
}

impl Ext {
    fn neg(&self) -> Ext {
        match self {
            Ext::NegInf => Ext::PosInf,
            Ext::Fin(x) => Ext::Fin(-x),
            Ext::PosInf => Ext::NegInf,
        }
    }

    fn is_zero(&self) -> bool {
        matches!(self, Ext::Fin(x) if x.is_zero())
    }

    fn sign(&self) -> i8 {
        match self {
            Ext::NegInf => -1,
            Ext::PosInf => 1,
            Ext::Fin(x) if x.is_positive() => 1,
            Ext::Fin(x) if x.is_negative() => -1,
            Ext::Fin(_) => 0,
        }
    }

    /// Sum rounded outward: an infinity in the rounding direction wins.
    fn add(&self, other: &Ext, upper: bool) -> Ext {
        match (self, other) {
            (Ext::Fin(a), Ext::Fin(b)) => Ext::Fin(a + b),
            _ if upper && (*self == Ext::PosInf || *other == Ext::PosInf) => Ext::PosInf,
            _ if !upper && (*self == Ext::NegInf || *other == Ext::NegInf) => Ext::NegInf,
            (Ext::Fin(_), inf) | (inf, Ext::Fin(_)) => inf.clone(),
            _ => {
                if upper {
                    Ext::PosInf
                } else {
                    Ext::NegInf
                }
            }
        }
    }

    fn mul(&self, other: &Ext) -> Ext {
        match (self, other) {
            (Ext::Fin(a), Ext::Fin(b)) => Ext::Fin(a * b),
            _ if self.is_zero() || other.is_zero() => Ext::Fin(Rat::zero()),
            _ => {
                if self.sign() * other.sign() > 0 {
                    Ext::PosInf
                } else {
                    Ext::NegInf
                }
            }
        }
    }
}

/// Closed interval with possibly infinite ends; empty when `lo > hi`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Interval {
    pub lo: Ext,
    pub hi: Ext,
}

impl Interval {
    pub fn full() -> Self {
        Interval { lo: Ext::NegInf, hi: Ext::PosInf }
    }

    pub fn point(c: Rat) -> Self {
        Interval { lo: Ext::Fin(c.clone()), hi: Ext::Fin(c) }
    }

    pub fn closed(lo: Rat, hi: Rat) -> Self {
        Interval { lo: Ext::Fin(lo), hi: Ext::Fin(hi) }
    }

    pub fn non_positive() -> Self {
        Interval { lo: Ext::NegInf, hi: Ext::Fin(Rat::zero()) }
    }

    pub fn is_empty(&self) -> bool {
        self.lo > self.hi
    }

    pub fn contains_zero(&self) -> bool {
        let z = Ext::Fin(Rat::zero());
        self.lo <= z && z <= self.hi
    }

    pub fn intersect(&self, other: &Interval) -> Interval {
        Interval { lo: self.lo.clone().max(other.lo.clone()), hi: self.hi.clone().min(other.hi.clone()) }
    }

    pub fn neg(&self) -> Interval {
        Interval { lo: self.hi.neg(), hi: self.lo.neg() }
    }

    pub fn add(&self, o: &Interval) -> Interval {
        Interval { lo: self.lo.add(&o.lo, false), hi: self.hi.add(&o.hi, true) }
    }

    pub fn sub(&self, o: &Interval) -> Interval {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Interval) -> Interval {
        let ps = [self.lo.mul(&o.lo), self.lo.mul(&o.hi), self.hi.mul(&o.lo), self.hi.mul(&o.hi)];
        Interval {
            lo: ps.iter().min().cloned().expect("four products"),
            hi: ps.iter().max().cloned().expect("four products"),
        }
    }

    /// `None` when the divisor may be zero.
    pub fn div(&self, o: &Interval) -> Option<Interval> {
        if o.contains_zero() || o.is_empty() {
            return None;
        }
        let recip = |e: &Ext| match e {
            Ext::Fin(x) => Ext::Fin(x.recip()),
            _ => Ext::Fin(Rat::zero()),
        };
        Some(self.mul(&Interval { lo: recip(&o.hi), hi: recip(&o.lo) }))
    }
}

pub type Box_ = BTreeMap<String, Interval>;

#[derive(Debug)]
struct Empty;

/// Forward value; `None` when a division may be by zero.
pub fn eval(t: &Term, b: &Box_) -> Option<Interval> {
    match &t.kind {
        TermKind::Const(c) => Some(Interval::point(c.clone())),
        TermKind::Var(v) => Some(b.get(v).cloned().unwrap_or_else(Interval::full)),
        TermKind::Neg(a) => Some(eval(a, b)?.neg()),
        TermKind::Bin(op, x, y) => {
            let l = eval(x, b)?;
            let r = eval(y, b)?;
            match op {
                ArithOp::Add => Some(l.add(&r)),
                ArithOp::Sub => Some(l.sub(&r)),
                ArithOp::Mul => Some(l.mul(&r)),
                ArithOp::Div => l.div(&r),
            }
        }
    }
}

fn narrow(b: &mut Box_, var: &str, to: &Interval) -> Result<bool, Empty> {
    let cur = b.get(var).cloned().unwrap_or_else(Interval::full);
    let next = cur.intersect(to);
    if next.is_empty() {
        return Err(Empty);
    }
    let changed = next != cur;
    b.insert(var.to_string(), next);
    Ok(changed)
}

/// Backward pass: narrows variable domains so that `t` lies in `target`.
fn revise(t: &Term, target: &Interval, b: &mut Box_) -> Result<bool, Empty> {
    let Some(fwd) = eval(t, b) else { return Ok(false) };
    let n = fwd.intersect(target);
    if n.is_empty() {
        return Err(Empty);
    }
    match &t.kind {
        TermKind::Const(_) => Ok(false),
        TermKind::Var(v) => narrow(b, v, &n),
        TermKind::Neg(a) => revise(a, &n.neg(), b),
        TermKind::Bin(op, x, y) => {
            let Some(r) = eval(y, b) else { return Ok(false) };
            let mut changed = false;
            match op {
                ArithOp::Add => {
                    changed |= revise(x, &n.sub(&r), b)?;
                    if let Some(l) = eval(x, b) {
                        changed |= revise(y, &n.sub(&l), b)?;
                    }
                }
                ArithOp::Sub => {
                    changed |= revise(x, &n.add(&r), b)?;
                    if let Some(l) = eval(x, b) {
                        changed |= revise(y, &l.sub(&n), b)?;
                    }
                }
                ArithOp::Mul => {
                    if let Some(q) = n.div(&r) {
                        changed |= revise(x, &q, b)?;
                    }
                    if let Some(q) = eval(x, b).and_then(|l| n.div(&l)) {
                        changed |= revise(y, &q, b)?;
                    }
                }
                ArithOp::Div => {
                    changed |= revise(x, &n.mul(&r), b)?;
                    if let Some(q) = eval(x, b).and_then(|l| l.div(&n)) {
                        changed |= revise(y, &q, b)?;
                    }
                }
            }
            Ok(changed)
        }
    }
}

fn target(rel: Rel) -> Interval {
    match rel {
        Rel::Eq => Interval::point(Rat::zero()),
        Rel::Le | Rel::Lt => Interval::non_positive(),
    }
}

fn definitely_violated(e: &Interval, rel: Rel) -> bool {
    let z = Ext::Fin(Rat::zero());
    match rel {
        Rel::Le => e.lo > z,
        Rel::Lt => e.lo >= z,
        Rel::Eq => !e.contains_zero(),
    }
}

fn definitely_holds(op: CmpOp, e: &Interval) -> bool {
    let z = Ext::Fin(Rat::zero());
    match op {
        CmpOp::Le => e.hi <= z,
        CmpOp::Lt => e.hi < z,
        CmpOp::Ge => e.lo >= z,
        CmpOp::Gt => e.lo > z,
        CmpOp::Eq => e.lo == z && e.hi == z,
        CmpOp::Ne => !e.contains_zero(),
    }
}

const ROUNDS: usize = 24;

/// True when the disjunct has no solution inside `start` (unbounded for
/// variables it does not mention). Comparisons whose divisors may vanish
/// are left out, so a `true` answer is always sound.
pub fn refute(d: &Disjunct, start: &Box_) -> bool {
    let mut cons: Vec<(Term, Rel)> = d.linear.iter().map(|c| (c.form.to_term(), c.rel)).collect();
    let mut negated: Vec<(CmpOp, Term)> = Vec::new();
    let mut disequal: Vec<Term> = Vec::new();
    for (a, positive) in &d.residue {
        let Assertion::Cmp { op, lhs, rhs, .. } = a else { continue };
        let diff = lhs.clone() - rhs.clone();
        let swapped = rhs.clone() - lhs.clone();
        if !positive {
            negated.push((*op, diff));
            continue;
        }
        match op {
            CmpOp::Le => cons.push((diff, Rel::Le)),
            CmpOp::Lt => cons.push((diff, Rel::Lt)),
            CmpOp::Ge => cons.push((swapped, Rel::Le)),
            CmpOp::Gt => cons.push((swapped, Rel::Lt)),
            CmpOp::Eq => cons.push((diff, Rel::Eq)),
            CmpOp::Ne => disequal.push(diff),
        }
    }
    let mut b = start.clone();
    for _ in 0..ROUNDS {
        let mut changed = false;
        for (t, rel) in &cons {
            match revise(t, &target(*rel), &mut b) {
                Ok(c) => changed |= c,
                Err(Empty) => return true,
            }
        }
        if !changed {
            break;
        }
    }
    let zero = Interval::point(Rat::zero());
    cons.iter().any(|(t, rel)| eval(t, &b).is_some_and(|e| definitely_violated(&e, *rel)))
        || disequal.iter().any(|t| eval(t, &b).is_some_and(|e| e == zero))
        || negated.iter().any(|(op, t)| eval(t, &b).is_some_and(|e| definitely_holds(*op, &e)))
}
