use std::collections::BTreeMap;
use std::fmt;

use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::model::{ArithOp, Assertion, CmpOp, Rat, Term, TermKind, Valuation};

/// `sum(coeffs[x] * x) + constant`, with no zero coefficients stored.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct LinearForm {
    pub coeffs: BTreeMap<String, Rat>,
    pub constant: Rat,
}

impl LinearForm {
    pub fn constant(k: Rat) -> Self {
        LinearForm { coeffs: BTreeMap::new(), constant: k }
    }

    pub fn var(name: &str) -> Self {
        let mut coeffs = BTreeMap::new();
        coeffs.insert(name.to_string(), Rat::one());
        LinearForm { coeffs, constant: Rat::zero() }
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, x: &str) -> Rat {
        self.coeffs.get(x).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn add(&self, other: &LinearForm) -> LinearForm {
        self.add_scaled(other, &Rat::one())
    }

    pub fn sub(&self, other: &LinearForm) -> LinearForm {
        self.add_scaled(other, &-Rat::one())
    }

    /// `self + k * other`
    pub fn add_scaled(&self, other: &LinearForm, k: &Rat) -> LinearForm {
        let mut out = self.clone();
        for (x, c) in &other.coeffs {
            let e = out.coeffs.entry(x.clone()).or_insert_with(Rat::zero);
            *e += c * k;
            if e.is_zero() {
                out.coeffs.remove(x);
            }
        }
        out.constant += &other.constant * k;
        out
    }

    pub fn scale(&self, k: &Rat) -> LinearForm {
        if k.is_zero() {
            return LinearForm::default();
        }
        LinearForm {
            coeffs: self.coeffs.iter().map(|(x, c)| (x.clone(), c * k)).collect(),
            constant: &self.constant * k,
        }
    }

    /// Replaces `x` by `by`.
    pub fn substitute(&self, x: &str, by: &LinearForm) -> LinearForm {
        match self.coeffs.get(x) {
            None => self.clone(),
            Some(c) => {
                let c = c.clone();
                let mut rest = self.clone();
                rest.coeffs.remove(x);
                rest.add_scaled(by, &c)
            }
        }
    }

    /// Value under `val`; unbound variables count as zero.
    pub fn eval(&self, val: &Valuation) -> Rat {
        let mut acc = self.constant.clone();
        for (x, c) in &self.coeffs {
            if let Some(v) = val.get(x) {
                acc += c * v;
            }
        }
        acc
    }

    /// Term with the variable part only; the constant is left to the caller.
    fn var_term(&self) -> Option<Term> {
        let mut acc: Option<Term> = None;
        for (x, c) in &self.coeffs {
            let mag = c.abs();
            let t = if mag.is_one() { Term::var(x) } else { Term::constant(mag) * Term::var(x) };
            acc = Some(match acc {
                None if c.is_negative() => -t,
                None => t,
                Some(a) if c.is_negative() => a - t,
                Some(a) => a + t,
            });
        }
        acc
    }

    pub fn to_term(&self) -> Term {
        match self.var_term() {
            None => Term::constant(self.constant.clone()),
            Some(t) if self.constant.is_zero() => t,
            Some(t) if self.constant.is_negative() => t - Term::constant(-self.constant.clone()),
            Some(t) => t + Term::constant(self.constant.clone()),
        }
    }
}

/// Linear form of `t` when it is linear with constant divisors.
pub fn linearize(t: &Term) -> Option<LinearForm> {
    match &t.kind {
        TermKind::Const(c) => Some(LinearForm::constant(c.clone())),
        TermKind::Var(v) => Some(LinearForm::var(v)),
        TermKind::Neg(a) => Some(linearize(a)?.scale(&-Rat::one())),
        TermKind::Bin(op, a, b) => {
            let x = linearize(a)?;
            let y = linearize(b)?;
            match op {
                ArithOp::Add => Some(x.add(&y)),
                ArithOp::Sub => Some(x.sub(&y)),
                ArithOp::Mul if x.is_constant() => Some(y.scale(&x.constant)),
                ArithOp::Mul if y.is_constant() => Some(x.scale(&y.constant)),
                ArithOp::Div if y.is_constant() && !y.constant.is_zero() => Some(x.scale(&y.constant.recip())),
                _ => None,
            }
        }
    }
}

/// Relation of a constraint `form REL 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Rel {
    Eq,
    Le,
    Lt,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Constraint {
    pub form: LinearForm,
    pub rel: Rel,
}

impl Constraint {
    pub fn new(form: LinearForm, rel: Rel) -> Self {
        Constraint { form, rel }
    }

    pub fn holds_at(&self, value: &Rat) -> bool {
        match self.rel {
            Rel::Eq => value.is_zero(),
            Rel::Le => !value.is_positive(),
            Rel::Lt => value.is_negative(),
        }
    }

    pub fn holds(&self, val: &Valuation) -> bool {
        self.holds_at(&self.form.eval(val))
    }

    /// Alternatives (a disjunction) equivalent to `lhs OP rhs` when
    /// `positive`, or to its negation otherwise.
    pub fn from_comparison(op: CmpOp, lhs: &LinearForm, rhs: &LinearForm, positive: bool) -> Vec<Constraint> {
        let op = if positive { op } else { op.negate() };
        let d = lhs.sub(rhs);
        let neg = d.scale(&-Rat::one());
        match op {
            CmpOp::Le => vec![Constraint::new(d, Rel::Le)],
            CmpOp::Lt => vec![Constraint::new(d, Rel::Lt)],
            CmpOp::Ge => vec![Constraint::new(neg, Rel::Le)],
            CmpOp::Gt => vec![Constraint::new(neg, Rel::Lt)],
            CmpOp::Eq => vec![Constraint::new(d, Rel::Eq)],
            CmpOp::Ne => vec![Constraint::new(d, Rel::Lt), Constraint::new(neg, Rel::Lt)],
        }
    }

    /// Scaled so the coefficients are coprime integers; equalities also get
    /// a positive leading coefficient.
    pub fn canonical(&self) -> Constraint {
        if self.form.is_constant() {
            return self.clone();
        }
        let mut l = num_bigint::BigInt::one();
        for c in self.form.coeffs.values() {
            l = l.lcm(c.denom());
        }
        let mut g = num_bigint::BigInt::zero();
        for c in self.form.coeffs.values() {
            g = g.gcd(&(c.numer() * (&l / c.denom())));
        }
        let mut k = Rat::new(l, g);
        if self.rel == Rel::Eq && self.form.coeffs.values().next().is_some_and(|c| c.is_negative()) {
            k = -k;
        }
        Constraint::new(self.form.scale(&k), self.rel)
    }

    /// Readable comparison, e.g. `r >= 3` rather than `-r + 3 <= 0`.
    pub fn to_assertion(&self) -> Assertion {
        let c = self.canonical();
        if c.form.is_constant() {
            return Assertion::Bool(c.holds_at(&c.form.constant));
        }
        let all_negative = c.form.coeffs.values().all(|x| x.is_negative());
        let (form, op) = match (c.rel, all_negative) {
            (Rel::Eq, _) => (c.form, CmpOp::Eq),
            (Rel::Le, false) => (c.form, CmpOp::Le),
            (Rel::Lt, false) => (c.form, CmpOp::Lt),
            (Rel::Le, true) => (c.form.scale(&-Rat::one()), CmpOp::Ge),
            (Rel::Lt, true) => (c.form.scale(&-Rat::one()), CmpOp::Gt),
        };
        let lhs = LinearForm { coeffs: form.coeffs, constant: Rat::zero() };
        lhs.to_term().cmp(op, Term::constant(-form.constant))
    }
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_assertion())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{rat, ratio};
    use crate::syntax::parse_term;

    #[test]
    fn linearizes_scaled_sums() {
        let f = linearize(&parse_term("3 * a.r + 0 * b.r - (x - 2) / 4").unwrap()).unwrap();
        assert_eq!(f.coeff("a.r"), rat(3));
        assert_eq!(f.coeff("b.r"), rat(0));
        assert!(!f.coeffs.contains_key("b.r"));
        assert_eq!(f.coeff("x"), ratio(-1, 4));
        assert_eq!(f.constant, ratio(1, 2));
        assert!(linearize(&parse_term("a * b").unwrap()).is_none());
        assert!(linearize(&parse_term("1 / x").unwrap()).is_none());
        assert!(linearize(&parse_term("x / 0").unwrap()).is_none());
    }

    #[test]
    fn readable_constraints() {
        let r = LinearForm::var("r");
        let three = LinearForm::constant(rat(3));
        let c = Constraint::from_comparison(CmpOp::Ge, &r, &three, true);
        assert_eq!(c[0].to_string(), "r >= 3");
        let c = Constraint::from_comparison(CmpOp::Eq, &r.scale(&ratio(1, 2)), &three, true);
        assert_eq!(c[0].to_string(), "r = 6");
        let ne = Constraint::from_comparison(CmpOp::Eq, &r, &three, false);
        assert_eq!(ne.len(), 2);
        assert_eq!(ne[1].to_string(), "r > 3");
    }
}
