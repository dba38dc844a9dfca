//! Decision procedures for assertions: an exact Fourier-Motzkin procedure
//! for linear arithmetic, interval contraction for nonlinear comparisons,
//! and seeded sampling as a last resort. Answers are three-valued; anything
//! not settled soundly is reported as unknown.

pub mod fm;
pub mod interval;
pub mod linear;
pub mod normal;
pub mod sample;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_traits::Zero;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{Assertion, Rat, Term, Valuation};
pub use linear::{linearize, Constraint, LinearForm, Rel};
pub use normal::{normalize, Disjunct, Dnf, DnfTooLarge};

pub const DEFAULT_DNF_CAP: usize = 4096;
pub const DEFAULT_SAMPLES: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EngineConfig {
    pub dnf_cap: usize,
    pub samples: usize,
    pub seed: u64,
    /// Range for sampled values of variables without a declared box.
    pub sample_range: (Rat, Rat),
    /// Declared variable ranges. They restrict every check: a variable in the
    /// box only takes values between its bounds.
    pub declared_box: BTreeMap<String, (Rat, Rat)>,
}

impl Default for EngineConfig {
    fn default() -> Self {
        let m = Rat::from_integer(BigInt::from(1_000_000));
        EngineConfig {
            dnf_cap: DEFAULT_DNF_CAP,
            samples: DEFAULT_SAMPLES,
            seed: 0,
            sample_range: (-m.clone(), m),
            declared_box: BTreeMap::new(),
        }
    }
}

/// Which step of the ladder settled a question.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Exact,
    Interval,
    Sampling,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Exact => "exact",
            Method::Interval => "interval",
            Method::Sampling => "sampling",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SatResult {
    Sat { witness: Valuation, method: Method },
    Unsat { method: Method },
    Unknown { reason: String },
}

/// Outcome of one check. For validity questions a falsifying witness is a
/// counterexample; for satisfiability questions a proving witness is a model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Proved { witness: Option<Valuation>, method: Method },
    Falsified { witness: Option<Valuation>, method: Method },
    Unknown { reason: String },
}

impl Verdict {
    pub fn is_proved(&self) -> bool {
        matches!(self, Verdict::Proved { .. })
    }

    pub fn is_falsified(&self) -> bool {
        matches!(self, Verdict::Falsified { .. })
    }

    pub fn is_unknown(&self) -> bool {
        matches!(self, Verdict::Unknown { .. })
    }

    pub fn witness(&self) -> Option<&Valuation> {
        match self {
            Verdict::Proved { witness, .. } | Verdict::Falsified { witness, .. } => witness.as_ref(),
            Verdict::Unknown { .. } => None,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Proved { .. } => "proved",
            Verdict::Falsified { .. } => "falsified",
            Verdict::Unknown { .. } => "unknown",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProjectionError {
    #[error("formula has nonlinear comparisons")]
    Nonlinear,
    #[error(transparent)]
    Dnf(#[from] DnfTooLarge),
    #[error(transparent)]
    Elimination(#[from] fm::FmTooLarge),
}

#[derive(Debug, Clone, Default)]
pub struct Engine {
    pub config: EngineConfig,
}

impl Engine {
    pub fn new(config: EngineConfig) -> Self {
        Engine { config }
    }

    fn boxed(&self, f: &Assertion) -> Assertion {
        let vars = f.vars();
        let bounds = self.config.declared_box.iter().filter(|(v, _)| vars.contains(*v)).flat_map(|(v, (lo, hi))| {
            [
                Term::var(v.clone()).ge(Term::constant(lo.clone())),
                Term::var(v.clone()).le(Term::constant(hi.clone())),
            ]
        });
        let bounds: Vec<Assertion> = bounds.collect();
        if bounds.is_empty() {
            f.clone()
        } else {
            Assertion::conjunction(bounds).and(f.clone())
        }
    }

    fn start_box(&self) -> interval::Box_ {
        self.config
            .declared_box
            .iter()
            .map(|(v, (lo, hi))| (v.clone(), interval::Interval::closed(lo.clone(), hi.clone())))
            .collect()
    }

    fn sampler(&self) -> sample::Sampler<'_> {
        sample::Sampler {
            rng: ChaCha8Rng::seed_from_u64(self.config.seed),
            ranges: &self.config.declared_box,
            default_range: self.config.sample_range.clone(),
        }
    }

    /// Satisfiability of `f`; witnesses bind every variable of `f`.
    pub fn satisfiable(&self, f: &Assertion) -> SatResult {
        let g = self.boxed(f);
        let vars = g.vars();
        let complete = |mut w: Valuation| {
            for v in &vars {
                w.entry(v.clone()).or_insert_with(Rat::zero);
            }
            w.retain(|k, _| vars.contains(k));
            w
        };
        let dnf = match normalize(&g, self.config.dnf_cap) {
            Ok(d) => d,
            Err(e) => {
                return match self.search(&g, &[], &vars) {
                    Some(w) => SatResult::Sat { witness: w, method: Method::Sampling },
                    None => SatResult::Unknown { reason: e.to_string() },
                }
            }
        };
        let start = self.start_box();
        let mut undecided: Vec<&Disjunct> = Vec::new();
        let mut used_interval = false;
        let mut too_large = false;
        for d in &dnf.disjuncts {
            match fm::solve(&d.linear) {
                Err(_) => {
                    too_large = true;
                    undecided.push(d);
                }
                Ok(None) => {}
                Ok(Some(w)) => {
                    let w = complete(w);
                    if d.holds(&w) && g.eval(&w) {
                        return SatResult::Sat { witness: w, method: Method::Exact };
                    }
                    if d.is_linear() {
                        // cannot happen for a correct elimination; stay honest anyway
                        undecided.push(d);
                    } else if interval::refute(d, &start) {
                        used_interval = true;
                    } else {
                        undecided.push(d);
                    }
                }
            }
        }
        if undecided.is_empty() {
            let method = if used_interval { Method::Interval } else { Method::Exact };
            return SatResult::Unsat { method };
        }
        match self.search(&g, &undecided, &vars) {
            Some(w) => SatResult::Sat { witness: w, method: Method::Sampling },
            None if too_large => SatResult::Unknown { reason: "linear elimination exceeded its size limit".into() },
            None => SatResult::Unknown {
                reason: format!("{} nonlinear case(s) neither refuted nor witnessed", undecided.len()),
            },
        }
    }

    fn search(&self, g: &Assertion, undecided: &[&Disjunct], vars: &BTreeSet<String>) -> Option<Valuation> {
        let budget = self.config.samples;
        if budget == 0 {
            return None;
        }
        let mut s = self.sampler();
        if !undecided.is_empty() {
            let per = (budget / 2 / undecided.len()).max(1);
            for d in undecided {
                if let Some(w) = sample::guided(&mut s, d, g, vars, per) {
                    return Some(w);
                }
            }
        }
        if let Some(w) = sample::small_grid(g, vars, budget / 4) {
            return Some(w);
        }
        for _ in 0..budget / 2 {
            let p = s.random_point(vars);
            if g.eval(&p) {
                return Some(p);
            }
        }
        None
    }

    /// Validity of `f`, i.e. unsatisfiability of its negation.
    pub fn check_valid(&self, f: &Assertion) -> Verdict {
        match self.satisfiable(&f.clone().negate()) {
            SatResult::Unsat { method } => Verdict::Proved { witness: None, method },
            SatResult::Sat { witness, method } => Verdict::Falsified { witness: Some(witness), method },
            SatResult::Unknown { reason } => Verdict::Unknown { reason },
        }
    }

    /// Whether `premise => conclusion` holds for every valuation.
    pub fn check_implication(&self, premise: &Assertion, conclusion: &Assertion) -> Verdict {
        match self.satisfiable(&premise.clone().and(conclusion.clone().negate())) {
            SatResult::Unsat { method } => Verdict::Proved { witness: None, method },
            SatResult::Sat { witness, method } => Verdict::Falsified { witness: Some(witness), method },
            SatResult::Unknown { reason } => Verdict::Unknown { reason },
        }
    }

    pub fn check_satisfiable(&self, f: &Assertion) -> Verdict {
        match self.satisfiable(f) {
            SatResult::Sat { witness, method } => Verdict::Proved { witness: Some(witness), method },
            SatResult::Unsat { method } => Verdict::Falsified { witness: None, method },
            SatResult::Unknown { reason } => Verdict::Unknown { reason },
        }
    }

    /// `exists vars. f` as a quantifier-free assertion, for linear `f`.
    pub fn project_exists(&self, f: &Assertion, vars: &BTreeSet<String>) -> Result<Assertion, ProjectionError> {
        let dnf = normalize(f, self.config.dnf_cap)?;
        if !dnf.is_linear() {
            return Err(ProjectionError::Nonlinear);
        }
        let mut out: Vec<Vec<Constraint>> = Vec::new();
        for d in &dnf.disjuncts {
            let e = fm::eliminate(&d.linear, vars)?;
            if e.infeasible {
                continue;
            }
            if e.remaining.is_empty() {
                return Ok(Assertion::truth());
            }
            let mut cs: Vec<Constraint> = e.remaining.iter().map(Constraint::canonical).collect();
            cs.sort();
            cs.dedup();
            if !out.contains(&cs) {
                out.push(cs);
            }
        }
        Ok(Assertion::disjunction(
            out.into_iter().map(|cs| Assertion::conjunction(cs.iter().map(Constraint::to_assertion))),
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{rat, ratio};
    use crate::syntax::parse_assertion;

    fn a(s: &str) -> Assertion {
        parse_assertion(s).unwrap()
    }

    #[test]
    fn linear_implications() {
        let e = Engine::default();
        assert!(e.check_implication(&a("x >= 2"), &a("x >= 1")).is_proved());
        let v = e.check_implication(&a("x >= 1"), &a("x >= 2"));
        let w = v.witness().unwrap();
        assert!(w["x"] >= rat(1) && w["x"] < rat(2));
        assert!(e.check_valid(&a("x < y || x >= y")).is_proved());
        assert!(e.check_implication(&a("x = 1 && y = 2"), &a("x + y = 3")).is_proved());
    }

    #[test]
    fn satisfiability_witness_is_a_model() {
        let e = Engine::default();
        let f = a("x + y = 1 && x - y > 3 && z != 0");
        let v = e.check_satisfiable(&f);
        assert!(f.eval(v.witness().unwrap()));
        assert!(e.check_satisfiable(&a("x > 1 && x < 1")).is_falsified());
    }

    #[test]
    fn nonlinear_by_interval_and_sampling() {
        let e = Engine::default();
        let proved = e.check_implication(&a("x >= 1 && y >= 1"), &a("x * y >= 1"));
        assert_eq!(proved, Verdict::Proved { witness: None, method: Method::Interval });
        let refuted = e.check_implication(&a("a = 1 && b = 2 && r = 1 / (1 / a + 1 / b)"), &a("r = 3"));
        let w = refuted.witness().unwrap();
        assert_eq!(w["r"], ratio(2, 3));
        let undefined = e.check_valid(&a("1 / x != 0"));
        assert_eq!(undefined.witness().unwrap()["x"], rat(0));
    }

    #[test]
    fn declared_box_restricts_checks() {
        let mut cfg = EngineConfig::default();
        cfg.declared_box.insert("x".into(), (rat(0), rat(10)));
        let e = Engine::new(cfg);
        assert!(e.check_valid(&a("x >= 0")).is_proved());
        assert!(e.check_valid(&a("x * x <= 100")).is_proved());
    }

    #[test]
    fn deterministic_for_a_seed() {
        let e = Engine::default();
        let f = a("x * y = 7 && x > 2 && y > 2");
        assert_eq!(e.satisfiable(&f), e.satisfiable(&f));
    }

    #[test]
    fn projection() {
        let e = Engine::default();
        let vars: BTreeSet<String> = ["a".to_string(), "b".to_string()].into();
        let p = e.project_exists(&a("r = a + b && a = 1 && b = 2"), &vars).unwrap();
        assert_eq!(p.to_string(), "r = 3");
        let p = e.project_exists(&a("r = 3 * a + 0 * b && a = 1"), &vars).unwrap();
        assert_eq!(p.to_string(), "r = 3");
        let p = e.project_exists(&a("x <= a && a <= y"), &vars).unwrap();
        assert_eq!(p.to_string(), "x - y <= 0");
        assert_eq!(e.project_exists(&a("r = a * b"), &vars), Err(ProjectionError::Nonlinear));
    }
}
