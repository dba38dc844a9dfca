//! Contract composition through a declared operator's glue, the three
//! verification rules (compatibility, consistency, refinement) and the
//! finite check of composition against its minimality characterization.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engine::{Engine, SatResult, Verdict};
use crate::model::{
    rat, Assertion, ComponentType, CompositionOperator, Contract, FiniteGrid, Interpretation, ModelError, Rat,
    Valuation, MAX_GRID_POINTS,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("operator `{operator}` takes {expected} arguments, got {found}")]
    ArityMismatch { operator: String, expected: usize, found: usize },
    #[error("binding `{binding}`: contract over `{found}` does not fit parameter type `{expected}`")]
    TypeMismatch { binding: String, expected: String, found: String },
    #[error("`{concrete}` is over `{found}` but `{abstract_}` is over `{expected}`")]
    SubjectTypeMismatch { concrete: String, abstract_: String, expected: String, found: String },
}

/// A parent-level assertion that may still quantify over child variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ProjectedAssertion {
    Exact(Assertion),
    /// `exists vars. body`
    Exists { vars: BTreeSet<String>, body: Assertion },
    /// `!exists vars. body`
    ForallNot { vars: BTreeSet<String>, body: Assertion },
}

impl ProjectedAssertion {
    /// Truth at a parent valuation, with quantified child variables ranging
    /// over `children`.
    pub fn eval_finite(&self, parent: &Valuation, children: &[Valuation]) -> bool {
        let with = |c: &Valuation, body: &Assertion| {
            let mut v = parent.clone();
            v.extend(c.iter().map(|(k, x)| (k.clone(), x.clone())));
            body.eval(&v)
        };
        match self {
            ProjectedAssertion::Exact(a) => a.eval(parent),
            ProjectedAssertion::Exists { body, .. } => children.iter().any(|c| with(c, body)),
            ProjectedAssertion::ForallNot { body, .. } => !children.iter().any(|c| with(c, body)),
        }
    }

    pub fn exact(&self) -> Option<&Assertion> {
        match self {
            ProjectedAssertion::Exact(a) => Some(a),
            _ => None,
        }
    }
}

impl fmt::Display for ProjectedAssertion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |vars: &BTreeSet<String>| vars.iter().cloned().collect::<Vec<_>>().join(", ");
        match self {
            ProjectedAssertion::Exact(a) => write!(f, "{a}"),
            ProjectedAssertion::Exists { vars, body } => write!(f, "exists {}: ({body})", list(vars)),
            ProjectedAssertion::ForallNot { vars, body } => write!(f, "!exists {}: ({body})", list(vars)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProjectionStatus {
    Exact,
    QuantifiedResidue,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Provenance {
    pub operator: CompositionOperator,
    /// `(instance, contract)` in argument order.
    pub bindings: Vec<(String, Contract)>,
    /// Glue with parameter names replaced by instance names.
    pub glue: Vec<Assertion>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComposedContract {
    pub subject: ComponentType,
    pub assumption: ProjectedAssertion,
    pub guarantee: ProjectedAssertion,
    pub status: ProjectionStatus,
    pub provenance: Provenance,
    /// Qualified child variables.
    pub child_vars: BTreeSet<String>,
    /// `glue && G'_1 && ... && G'_n`
    pub guarantee_body: Assertion,
    /// `glue && G'_1 && ... && G'_n && !(A'_1 && ... && A'_n)`
    pub assumption_body: Assertion,
}

impl ComposedContract {
    pub fn with_assumption(mut self, a: ProjectedAssertion) -> Self {
        self.assumption = a;
        self
    }

    pub fn with_guarantee(mut self, g: ProjectedAssertion) -> Self {
        self.guarantee = g;
        self
    }

    pub fn name(&self) -> String {
        let args: Vec<String> =
            self.provenance.bindings.iter().map(|(i, c)| format!("{} as {i}", c.name)).collect();
        format!("{}({})", self.provenance.operator.name, args.join(", "))
    }
}

/// Composes contracts through `op`. Child fields are qualified by instance
/// names, contracts are saturated, and both projections are computed
/// exactly when everything is linear:
///
/// `G = exists children. glue && G'_k` and
/// `A = !exists children. glue && G'_k && !(A_1 && ... && A_n)`.
pub fn compose_contracts(
    op: &CompositionOperator,
    bindings: &[(String, Contract)],
    engine: &Engine,
) -> Result<ComposedContract, AlgebraError> {
    if op.parameters.len() != bindings.len() {
        return Err(AlgebraError::ArityMismatch {
            operator: op.name.clone(),
            expected: op.parameters.len(),
            found: bindings.len(),
        });
    }
    for ((_, ty), (inst, c)) in op.parameters.iter().zip(bindings) {
        let fits = ty.fields.iter().all(|(f, q)| c.subject.quantity_of(f) == Some(q.as_str()));
        if !fits {
            return Err(AlgebraError::TypeMismatch {
                binding: inst.clone(),
                expected: ty.name.clone(),
                found: c.subject.name.clone(),
            });
        }
    }
    let rename: BTreeMap<&str, &str> =
        op.parameters.iter().zip(bindings).map(|((p, _), (i, _))| (p.as_str(), i.as_str())).collect();
    let glue: Vec<Assertion> = op
        .glue
        .iter()
        .map(|g| {
            g.map_vars(&|v| match v.split_once('.') {
                Some((b, f)) => match rename.get(b) {
                    Some(i) => format!("{i}.{f}"),
                    None => v.to_string(),
                },
                None => v.to_string(),
            })
        })
        .collect();
    let child_vars: BTreeSet<String> = bindings
        .iter()
        .flat_map(|(i, c)| c.subject.fields.iter().map(move |(f, _)| format!("{i}.{f}")))
        .collect();
    let guarantees = bindings.iter().map(|(i, c)| c.saturated_guarantee().qualify(i));
    let assumptions = Assertion::conjunction(bindings.iter().map(|(i, c)| c.assumption.qualify(i)));
    let guarantee_body = Assertion::conjunction(glue.iter().cloned().chain(guarantees));
    let assumption_body = guarantee_body.clone().and(assumptions.negate());

    let g = engine.project_exists(&guarantee_body, &child_vars);
    let a = engine.project_exists(&assumption_body, &child_vars);
    let (guarantee, assumption, status) = match (g, a) {
        (Ok(g), Ok(a)) => {
            let a = match a {
                Assertion::Bool(b) => Assertion::Bool(!b),
                other => other.negate(),
            };
            (ProjectedAssertion::Exact(g), ProjectedAssertion::Exact(a), ProjectionStatus::Exact)
        }
        _ => (
                ProjectedAssertion::Exists { vars: child_vars.clone(), body: guarantee_body.clone() },
                ProjectedAssertion::ForallNot { vars: child_vars.clone(), body: assumption_body.clone() },
                ProjectionStatus::QuantifiedResidue,
        ),
    };
    Ok(ComposedContract {
        subject: op.result.clone(),
        assumption,
        guarantee,
        status,
        provenance: Provenance { operator: op.clone(), bindings: bindings.to_vec(), glue },
        child_vars,
        guarantee_body,
        assumption_body,
    })
}

/// Compatibility: the assumption is satisfiable.
pub fn check_compatibility(c: &Contract, engine: &Engine) -> Verdict {
    engine.check_satisfiable(&c.assumption)
}

/// Consistency: `A -> G` is satisfiable.
pub fn check_consistency(c: &Contract, engine: &Engine) -> Verdict {
    engine.check_satisfiable(&c.saturated_guarantee())
}

fn parent_part(w: &Valuation, subject: &ComponentType) -> Valuation {
    subject.fields.iter().filter_map(|(f, _)| w.get(f).map(|x| (f.clone(), x.clone()))).collect()
}

pub fn check_composed_compatibility(cc: &ComposedContract, engine: &Engine) -> Verdict {
    match &cc.assumption {
        ProjectedAssertion::Exact(a) => engine.check_satisfiable(a),
        ProjectedAssertion::Exists { .. } => unreachable!("assumptions are universal"),
        ProjectedAssertion::ForallNot { body, .. } => {
            let method = match engine.satisfiable(body) {
                SatResult::Unsat { method } => method,
                SatResult::Unknown { reason } => return Verdict::Unknown { reason },
                SatResult::Sat { .. } => {
                    // look for one parent valuation at which the body is unsatisfiable
                    let fields = cc.subject.field_names();
                    let mut candidates: Vec<Valuation> = [0, 1, -1]
                        .into_iter()
                        .map(|n| fields.iter().map(|f| (f.clone(), rat(n))).collect())
                        .collect();
                    if let SatResult::Sat { witness, .. } = engine.satisfiable(&cc.guarantee_body) {
                        candidates.insert(0, parent_part(&witness, &cc.subject));
                    }
                    for p in candidates {
                        if let SatResult::Unsat { method } = engine.satisfiable(&body.substitute(&p)) {
                            return Verdict::Proved { witness: Some(p), method };
                        }
                    }
                    return Verdict::Unknown {
                        reason: "no parent valuation shown to satisfy the quantified assumption".into(),
                    };
                }
            };
            let witness = cc.subject.fields.iter().map(|(f, _)| (f.clone(), Rat::from_integer(0.into()))).collect();
            Verdict::Proved { witness: Some(witness), method }
        }
    }
}

/// The composed implementations are `exists children. G_body`, which also
/// covers every valuation outside the composed assumption.
pub fn check_composed_consistency(cc: &ComposedContract, engine: &Engine) -> Verdict {
    match (&cc.assumption, &cc.guarantee) {
        (ProjectedAssertion::Exact(a), ProjectedAssertion::Exact(g)) => {
            engine.check_satisfiable(&a.clone().implies(g.clone()))
        }
        _ => match engine.check_satisfiable(&cc.guarantee_body) {
            Verdict::Proved { witness, method } => {
                Verdict::Proved { witness: witness.map(|w| parent_part(&w, &cc.subject)), method }
            }
            other => other,
        },
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Environment,
    Implementation,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RefinementResult {
    pub verdict: Verdict,
    /// Side of the first falsified direction.
    pub side: Option<Side>,
    pub environment: Verdict,
    pub implementation: Verdict,
}

fn combine(environment: Verdict, implementation: Verdict) -> RefinementResult {
    let (verdict, side) = if environment.is_falsified() {
        (environment.clone(), Some(Side::Environment))
    } else if implementation.is_falsified() {
        (implementation.clone(), Some(Side::Implementation))
    } else if let (Verdict::Proved { method: m1, .. }, Verdict::Proved { method: m2, .. }) =
        (&environment, &implementation)
    {
        let method = if m1 == m2 { *m1 } else { (*m1).max_rank(*m2) };
        (Verdict::Proved { witness: None, method }, None)
    } else {
        let reason = [&environment, &implementation]
            .iter()
            .filter_map(|v| match v {
                Verdict::Unknown { reason } => Some(reason.clone()),
                _ => None,
            })
            .collect::<Vec<_>>()
            .join("; ");
        (Verdict::Unknown { reason }, None)
    };
    RefinementResult { verdict, side, environment, implementation }
}

/// Either side of a refinement obligation.
#[derive(Debug, Clone, Copy)]
pub enum Concrete<'a> {
    Contract(&'a Contract),
    Composed(&'a ComposedContract),
}

impl Concrete<'_> {
    fn subject(&self) -> &ComponentType {
        match self {
            Concrete::Contract(c) => &c.subject,
            Concrete::Composed(c) => &c.subject,
        }
    }

    fn name(&self) -> String {
        match self {
            Concrete::Contract(c) => c.name.clone(),
            Concrete::Composed(c) => c.name(),
        }
    }
}

/// `concrete <= abstract_` iff `A^ => A` and `(A -> G) => (A^ -> G^)`.
pub fn check_refinement(
    concrete: Concrete<'_>,
    abstract_: &Contract,
    engine: &Engine,
) -> Result<RefinementResult, AlgebraError> {
    if concrete.subject().name != abstract_.subject.name {
        return Err(AlgebraError::SubjectTypeMismatch {
            concrete: concrete.name(),
            abstract_: abstract_.name.clone(),
            expected: abstract_.subject.name.clone(),
            found: concrete.subject().name.clone(),
        });
    }
    let a_hat = &abstract_.assumption;
    let m_hat = abstract_.saturated_guarantee();
    let (env, imp) = match concrete {
        Concrete::Contract(c) => (
            engine.check_implication(a_hat, &c.assumption),
            engine.check_implication(&c.saturated_guarantee(), &m_hat),
        ),
        Concrete::Composed(cc) => {
            let env = match &cc.assumption {
                ProjectedAssertion::Exact(a) => engine.check_implication(a_hat, a),
                ProjectedAssertion::ForallNot { body, .. } => {
                    engine.check_implication(&a_hat.clone().and(body.clone()), &Assertion::falsity())
                }
                ProjectedAssertion::Exists { .. } => unreachable!("assumptions are universal"),
            };
            let imp = match (&cc.assumption, &cc.guarantee) {
                (ProjectedAssertion::Exact(a), ProjectedAssertion::Exact(g)) => {
                    engine.check_implication(&a.clone().implies(g.clone()), &m_hat)
                }
                _ => engine.check_implication(&cc.guarantee_body, &m_hat),
            };
            (env, imp)
        }
    };
    Ok(combine(env, imp))
}

trait Rank {
    fn max_rank(self, other: Self) -> Self;
}

impl Rank for crate::engine::Method {
    fn max_rank(self, other: Self) -> Self {
        use crate::engine::Method::*;
        let r = |m: Self| match m {
            Exact => 0,
            Interval => 1,
            Sampling => 2,
        };
        if r(self) >= r(other) {
            self
        } else {
            other
        }
    }
}

/// Values for one child instance: axis `inst.f` if present, else `f`.
pub fn child_space(grid: &FiniteGrid, inst: &str, subject: &ComponentType) -> Result<FiniteGrid, ModelError> {
    let mut out = FiniteGrid::new();
    for (f, _) in &subject.fields {
        let q = format!("{inst}.{f}");
        let axis = grid.axis(&q).or_else(|| grid.axis(f)).ok_or_else(|| ModelError::GridIncomplete(q.clone()))?;
        out.set(q, axis.iter().cloned())?;
    }
    Ok(out)
}

fn children_space(grid: &FiniteGrid, cc: &ComposedContract) -> Result<FiniteGrid, ModelError> {
    let mut out = FiniteGrid::new();
    for (inst, c) in &cc.provenance.bindings {
        let part = child_space(grid, inst, &c.subject)?;
        for v in part.variables() {
            out.set(v.clone(), part.axis(v).expect("own axis").iter().cloned())?;
        }
    }
    Ok(out)
}

/// Finite interpretation of a composed contract: parent valuations from the
/// grid, quantified child variables ranging over the grid as well.
pub fn interpret_composed(cc: &ComposedContract, grid: &FiniteGrid) -> Result<Interpretation, ModelError> {
    let space = grid.restrict(&cc.subject.field_names())?;
    let children = children_space(grid, cc)?;
    let needs_children = cc.assumption.exact().is_none() || cc.guarantee.exact().is_none();
    let child_points = if needs_children {
        let total = space.size().saturating_mul(children.size());
        if total > MAX_GRID_POINTS {
            return Err(ModelError::GridTooLarge(total));
        }
        children.valuations()
    } else {
        if space.size() > MAX_GRID_POINTS {
            return Err(ModelError::GridTooLarge(space.size()));
        }
        vec![]
    };
    let mut environments = BTreeSet::new();
    let mut implementations = BTreeSet::new();
    for p in space.valuations() {
        let env = cc.assumption.eval_finite(&p, &child_points);
        if env {
            environments.insert(p.clone());
        }
        if !env || cc.guarantee.eval_finite(&p, &child_points) {
            implementations.insert(p);
        }
    }
    Interpretation::new(space, environments, implementations)
}

/// Outcome of checking a composed contract against the minimality
/// characterization of composition on a finite grid.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinCharacterization {
    /// The bracketed condition holds for the composed interpretation.
    pub condition: bool,
    /// No strictly smaller contract also meets it; `None` when the parent
    /// space is too large to enumerate candidates.
    pub minimal: Option<bool>,
}

impl MinCharacterization {
    pub fn holds(&self) -> bool {
        self.condition && self.minimal != Some(false)
    }
}

/// Valuation spaces up to this size get the full minimality enumeration.
pub const MIN_ENUMERATION_POINTS: usize = 8;

pub fn verify_min_characterization(
    composed: &ComposedContract,
    parts: &[(String, Contract)],
    op: &CompositionOperator,
    grid: &FiniteGrid,
) -> Result<MinCharacterization, ModelError> {
    let interp = interpret_composed(composed, grid)?;
    let parents = interp.space.valuations();
    let spaces: Vec<FiniteGrid> =
        parts.iter().map(|(i, c)| child_space(grid, i, &c.subject)).collect::<Result<_, _>>()?;
    let total = spaces.iter().fold(interp.space.size(), |acc, s| acc.saturating_mul(s.size()));
    if total > MAX_GRID_POINTS {
        return Err(ModelError::GridTooLarge(total));
    }
    let rename: BTreeMap<&str, &str> =
        op.parameters.iter().zip(parts).map(|((p, _), (i, _))| (p.as_str(), i.as_str())).collect();
    let glue = Assertion::conjunction(op.glue.iter().map(|g| {
        g.map_vars(&|v| match v.split_once('.') {
            Some((b, f)) => rename.get(b).map(|i| format!("{i}.{f}")).unwrap_or_else(|| v.to_string()),
            None => v.to_string(),
        })
    }));

    let points: Vec<Vec<Valuation>> = spaces.iter().map(FiniteGrid::valuations).collect();
    let envs: Vec<BTreeSet<&Valuation>> = parts
        .iter()
        .zip(&points)
        .map(|((i, c), pts)| pts.iter().filter(|v| c.assumption.qualify(i).eval(v)).collect())
        .collect();
    let impls: Vec<Vec<&Valuation>> = parts
        .iter()
        .zip(&points)
        .map(|((i, c), pts)| pts.iter().filter(|v| c.saturated_guarantee().qualify(i).eval(v)).collect())
        .collect();

    let merge = |parts: &[&Valuation]| {
        let mut v = Valuation::new();
        for p in parts {
            v.extend(p.iter().map(|(k, x)| (k.clone(), x.clone())));
        }
        v
    };
    let tuples = cartesian(&impls);

    // parents whose every k-environment lies inside the k-th assumption
    let good_env: BTreeSet<&Valuation> = parents
        .iter()
        .filter(|p| {
            tuples.iter().all(|m| {
                (0..parts.len()).all(|k| {
                    points[k].iter().all(|v| {
                        let mut assembly: Vec<&Valuation> = vec![p, v];
                        assembly.extend(m.iter().enumerate().filter(|(j, _)| *j != k).map(|(_, x)| *x));
                        !glue.eval(&merge(&assembly)) || envs[k].contains(v)
                    })
                })
            })
        })
        .collect();
    // parent projections of glued implementation tuples
    let required: BTreeSet<&Valuation> = parents
        .iter()
        .filter(|q| {
            tuples.iter().any(|m| {
                let mut assembly: Vec<&Valuation> = vec![q];
                assembly.extend(m.iter().copied());
                glue.eval(&merge(&assembly))
            })
        })
        .collect();

    let satisfies = |env: &BTreeSet<&Valuation>, imp: &BTreeSet<&Valuation>| {
        env.is_subset(&good_env) && (env.is_empty() || required.is_subset(imp))
    };
    let env: BTreeSet<&Valuation> = interp.environments.iter().collect();
    let imp: BTreeSet<&Valuation> = interp.implementations.iter().collect();
    let condition = satisfies(&env, &imp);

    let minimal = if parents.len() <= MIN_ENUMERATION_POINTS {
        let n = parents.len();
        let subset = |mask: u32| -> BTreeSet<&Valuation> {
            (0..n).filter(|i| mask & (1 << i) != 0).map(|i| &parents[i]).collect()
        };
        let mut smaller = false;
        'outer: for em in 0..(1u32 << n) {
            let e2 = subset(em);
            if !env.is_subset(&e2) {
                continue;
            }
            for mm in 0..(1u32 << n) {
                let m2 = subset(mm);
                if !m2.is_subset(&imp) || (e2 == env && m2 == imp) {
                    continue;
                }
                if satisfies(&e2, &m2) {
                    smaller = true;
                    break 'outer;
                }
            }
        }
        Some(!smaller)
    } else {
        None
    };
    Ok(MinCharacterization { condition, minimal })
}

fn cartesian<'a>(sets: &[Vec<&'a Valuation>]) -> Vec<Vec<&'a Valuation>> {
    let mut out: Vec<Vec<&Valuation>> = vec![vec![]];
    for s in sets {
        let mut next = Vec::with_capacity(out.len() * s.len());
        for prefix in &out {
            for v in s {
                let mut t = prefix.clone();
                t.push(*v);
                next.push(t);
            }
        }
        out = next;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{interpret_finite, ratio, Term};
    use crate::syntax::parse_assertion;

    fn a(s: &str) -> Assertion {
        parse_assertion(s).unwrap()
    }

    fn resistor() -> ComponentType {
        ComponentType::new("Resistor", &[("r", "resistance")])
    }

    fn fixed(name: &str, r: Term) -> Contract {
        Contract::new(name, resistor(), Assertion::truth(), Term::var("r").eq(r))
    }

    fn op(name: &str, glue: &str) -> CompositionOperator {
        CompositionOperator {
            name: name.into(),
            parameters: vec![("a".into(), resistor()), ("b".into(), resistor())],
            result: resistor(),
            glue: vec![a(glue)],
        }
    }

    fn parts(x: i64, y: i64) -> Vec<(String, Contract)> {
        vec![("c1".into(), fixed("R1", Term::int(x))), ("c2".into(), fixed("R2", Term::int(y)))]
    }

    #[test]
    fn series_projects_exactly() {
        let e = Engine::default();
        let cc = compose_contracts(&op("series", "r = a.r + b.r"), &parts(1, 2), &e).unwrap();
        assert_eq!(cc.status, ProjectionStatus::Exact);
        assert_eq!(cc.guarantee.to_string(), "r = 3");
        assert_eq!(cc.assumption.to_string(), "true");
        let sys = fixed("Sys", Term::int(3));
        let r = check_refinement(Concrete::Composed(&cc), &sys, &e).unwrap();
        assert!(r.verdict.is_proved());
    }

    #[test]
    fn parallel_keeps_quantified_residue() {
        let e = Engine::default();
        let par = op("parallel", "r = 1 / (1 / a.r + 1 / b.r)");
        let cc = compose_contracts(&par, &parts(2, 2), &e).unwrap();
        assert_eq!(cc.status, ProjectionStatus::QuantifiedResidue);
        let one = fixed("One", Term::int(1));
        assert!(check_refinement(Concrete::Composed(&cc), &one, &e).unwrap().verdict.is_proved());

        let cc = compose_contracts(&par, &parts(1, 2), &e).unwrap();
        let r = check_refinement(Concrete::Composed(&cc), &fixed("Sys", Term::int(3)), &e).unwrap();
        assert_eq!(r.side, Some(Side::Implementation));
        let w = r.verdict.witness().unwrap();
        assert_eq!(w["r"], ratio(2, 3));
        assert!(cc.guarantee_body.eval(w));
        assert!(check_composed_compatibility(&cc, &e).is_proved());
        assert!(check_composed_consistency(&cc, &e).is_proved());
    }

    #[test]
    fn verification_rules() {
        let e = Engine::default();
        let i = ComponentType::new("X", &[("i", "current")]);
        let c = |asm: &str, g: &str| Contract::new("C", i.clone(), a(asm), a(g));
        assert!(check_compatibility(&c("true", "true"), &e).is_proved());
        assert!(check_compatibility(&c("i >= 1 && i <= 0", "true"), &e).is_falsified());
        let v = check_compatibility(&c("i >= 0 && i <= 10", "true"), &e);
        assert_eq!(v.witness().unwrap()["i"], rat(0));
        assert!(check_consistency(&c("true", "i = 1 && i = 2"), &e).is_falsified());
        assert!(check_consistency(&c("false", "false"), &e).is_proved());
        let x = c("i >= 0", "i <= 3");
        assert!(check_refinement(Concrete::Contract(&x), &x, &e).unwrap().verdict.is_proved());
    }

    #[test]
    fn identity_composition_matches_child() {
        let e = Engine::default();
        let id = CompositionOperator {
            name: "id".into(),
            parameters: vec![("a".into(), resistor())],
            result: resistor(),
            glue: vec![a("r = a.r")],
        };
        let child = Contract::new("C", resistor(), a("r >= 1"), a("r <= 2"));
        let cc = compose_contracts(&id, &[("c".into(), child.clone())], &e).unwrap();
        let grid = FiniteGrid::new().with_ints("r", 0..=3);
        let lhs = interpret_composed(&cc, &grid).unwrap();
        let rhs = interpret_finite(&child, &grid).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn min_characterization_on_series() {
        let e = Engine::default();
        let series = op("series", "r = a.r + b.r");
        let ps = parts(1, 2);
        let cc = compose_contracts(&series, &ps, &e).unwrap();
        let grid = FiniteGrid::new().with_ints("r", 0..=3);
        assert!(verify_min_characterization(&cc, &ps, &series, &grid).unwrap().holds());

        let weak = cc.clone().with_guarantee(ProjectedAssertion::Exact(Assertion::truth()));
        let res = verify_min_characterization(&weak, &ps, &series, &grid).unwrap();
        assert!(res.condition);
        assert_eq!(res.minimal, Some(false));

        let strong_a = cc.assumption.exact().unwrap().clone().and(Assertion::falsity());
        let strong = cc.clone().with_assumption(ProjectedAssertion::Exact(strong_a));
        assert!(!verify_min_characterization(&strong, &ps, &series, &grid).unwrap().holds());
    }
}
