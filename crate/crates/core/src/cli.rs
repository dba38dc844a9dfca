//! Batch checking of refinement obligations and the text/JSON reports.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::algebra::{
    check_compatibility, check_composed_compatibility, check_composed_consistency, check_consistency,
    check_refinement, compose_contracts, interpret_composed, verify_min_characterization, ComposedContract, Concrete,
    MinCharacterization, ProjectionStatus, Side,
};
use crate::diagnostics::{Diagnostic, DiagnosticKind, DiagnosticRecord};
use crate::engine::{Engine, EngineConfig, Method, Verdict};
use crate::model::{
    format_rational, interpret_finite, parse_rational, refines_finite, Contract, FiniteGrid, ModelError, Rat,
    Valuation,
};
use crate::syntax::{parse_document, resolve_names, SpecDocument};
use crate::types::{elaborate, ConcreteTerm, Obligation};

pub const EXIT_PROVED: i32 = 0;
pub const EXIT_FALSIFIED: i32 = 1;
pub const EXIT_UNKNOWN: i32 = 2;
pub const EXIT_ERROR: i32 = 3;

#[derive(Debug, Clone, Default)]
pub struct CheckOptions {
    /// Only these obligations; all when empty.
    pub obligations: Vec<String>,
    /// Axes overriding the grid hints.
    pub grid: FiniteGrid,
    pub engine: EngineConfig,
    pub deterministic: bool,
    pub oracle: bool,
}

/// A named input text; `name` is what diagnostics and digests refer to.
#[derive(Debug, Clone)]
pub struct Input {
    pub name: String,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputDigest {
    pub name: String,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Settings {
    pub dnf_cap: usize,
    pub samples: usize,
    pub seed: u64,
    pub deterministic: bool,
    pub oracle: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Proved,
    Unknown,
    Falsified,
    Error,
}

impl Outcome {
    fn of(v: &Verdict) -> Self {
        match v {
            Verdict::Proved { .. } => Outcome::Proved,
            Verdict::Falsified { .. } => Outcome::Falsified,
            Verdict::Unknown { .. } => Outcome::Unknown,
        }
    }

    fn mark(self) -> char {
        match self {
            Outcome::Proved => '✓',
            Outcome::Falsified | Outcome::Error => '✗',
            Outcome::Unknown => '?',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    Type,
    Compatibility,
    Consistency,
    Refinement,
}

impl CheckKind {
    fn label(self) -> &'static str {
        match self {
            CheckKind::Type => "type",
            CheckKind::Compatibility => "compatibility",
            CheckKind::Consistency => "consistency",
            CheckKind::Refinement => "refinement",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckReport {
    pub kind: CheckKind,
    /// Contract the check is about.
    pub subject: String,
    pub verdict: Outcome,
    pub method: Option<Method>,
    pub witness: Option<BTreeMap<String, String>>,
    pub side: Option<Side>,
    pub reason: Option<String>,
}

fn witness_strings(w: &Valuation) -> BTreeMap<String, String> {
    w.iter().map(|(k, v)| (k.clone(), format_rational(v))).collect()
}

impl CheckReport {
    fn new(kind: CheckKind, subject: impl Into<String>, v: &Verdict) -> Self {
        let (method, reason) = match v {
            Verdict::Proved { method, .. } | Verdict::Falsified { method, .. } => (Some(*method), None),
            Verdict::Unknown { reason } => (None, Some(reason.clone())),
        };
        CheckReport {
            kind,
            subject: subject.into(),
            verdict: Outcome::of(v),
            method,
            witness: v.witness().map(witness_strings),
            side: None,
            reason,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComposedReport {
    pub assumption: String,
    pub guarantee: String,
    pub status: ProjectionStatus,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleReport {
    /// Grid axes used, values as rationals.
    pub grid: BTreeMap<String, Vec<String>>,
    /// Refinement on the finite interpretations.
    pub finite_refinement: Option<bool>,
    /// Whether the symbolic verdict agrees with the finite one.
    pub agrees: Option<bool>,
    pub min_characterization: Option<MinCharacterization>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObligationReport {
    pub name: String,
    pub concrete: Option<String>,
    #[serde(rename = "abstract")]
    pub abstract_: Option<String>,
    pub operator: Option<String>,
    pub composed: Option<ComposedReport>,
    pub checks: Vec<CheckReport>,
    pub diagnostics: Vec<DiagnosticRecord>,
    pub oracle: Option<OracleReport>,
    pub outcome: Outcome,
    pub elapsed_ms: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub proved: usize,
    pub falsified: usize,
    pub unknown: usize,
    pub errors: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub tool: String,
    pub version: String,
    pub inputs: Vec<InputDigest>,
    pub settings: Settings,
    /// Errors not tied to a single obligation.
    pub diagnostics: Vec<DiagnosticRecord>,
    pub obligations: Vec<ObligationReport>,
    pub summary: Summary,
    pub exit_code: i32,
}

impl Report {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for d in &self.diagnostics {
            let _ = writeln!(out, "{}", diagnostic_line(d));
        }
        for o in &self.obligations {
            let head = match (&o.concrete, &o.abstract_) {
                (Some(c), Some(a)) => format!("{}: {c} <= {a}", o.name),
                _ => o.name.clone(),
            };
            let _ = writeln!(out, "{} {head}", o.outcome.mark());
            for d in &o.diagnostics {
                let _ = writeln!(out, "    {}", diagnostic_line(d));
            }
            if let Some(c) = &o.composed {
                let status = match c.status {
                    ProjectionStatus::Exact => "exact",
                    ProjectionStatus::QuantifiedResidue => "quantified residue",
                };
                let _ = writeln!(out, "    composed ({status}): assume {}; guarantee {}", c.assumption, c.guarantee);
            }
            for c in &o.checks {
                let mut line = format!("    {} {} {}", c.verdict.mark(), c.kind.label(), c.subject);
                if let Some(side) = c.side {
                    let side = match side {
                        Side::Environment => "environment",
                        Side::Implementation => "implementation",
                    };
                    let _ = write!(line, " ({side} side)");
                }
                if let Some(m) = c.method {
                    let _ = write!(line, " [{m}]");
                }
                if let Some(w) = c.witness.as_ref().filter(|w| !w.is_empty()) {
                    let vals: Vec<String> = w.iter().map(|(k, v)| format!("{k}={v}")).collect();
                    let _ = write!(line, " witness {}", vals.join(" "));
                }
                if let Some(r) = &c.reason {
                    let _ = write!(line, ": {r}");
                }
                let _ = writeln!(out, "{line}");
            }
            if let Some(orc) = &o.oracle {
                let mut line = String::from("    oracle:");
                if let Some(f) = orc.finite_refinement {
                    let _ = write!(line, " finite refinement {f}");
                }
                if let Some(a) = orc.agrees {
                    let _ = write!(line, ", agrees {a}");
                }
                if let Some(m) = &orc.min_characterization {
                    let minimal = m.minimal.map_or("unchecked".to_string(), |b| b.to_string());
                    let _ = write!(line, ", characterization {} minimal {minimal}", m.condition);
                }
                if let Some(e) = &orc.error {
                    let _ = write!(line, " {e}");
                }
                let _ = writeln!(out, "{line}");
            }
        }
        let s = &self.summary;
        let _ = writeln!(
            out,
            "{} proved, {} falsified, {} unknown, {} with errors",
            s.proved, s.falsified, s.unknown, s.errors
        );
        out
    }
}

fn diagnostic_line(d: &DiagnosticRecord) -> String {
    let mut loc = String::new();
    if let Some(f) = &d.file {
        loc.push_str(f);
        loc.push(':');
    }
    if let (Some(l), Some(c)) = (d.line, d.column) {
        let _ = write!(loc, "{l}:{c}:");
    }
    if loc.is_empty() {
        format!("{}: {}", d.code, d.message)
    } else {
        format!("{loc} {}: {}", d.code, d.message)
    }
}

/// 3 on any error, then 1 on any falsified check, 2 on any unknown one.
pub fn exit_code(outcomes: impl IntoIterator<Item = Outcome>) -> i32 {
    match outcomes.into_iter().max() {
        Some(Outcome::Error) => EXIT_ERROR,
        Some(Outcome::Falsified) => EXIT_FALSIFIED,
        Some(Outcome::Unknown) => EXIT_UNKNOWN,
        _ => EXIT_PROVED,
    }
}

/// Parses `var=a,b,c;var2=0..3`.
pub fn parse_grid_flag(text: &str) -> Result<FiniteGrid, String> {
    let mut grid = FiniteGrid::new();
    for item in text.split(';').map(str::trim).filter(|s| !s.is_empty()) {
        let (var, values) = item.split_once('=').ok_or_else(|| format!("expected `var=values` in `{item}`"))?;
        let var = var.trim();
        if grid.contains_var(var) {
            return Err(format!("axis `{var}` given twice"));
        }
        let mut axis = Vec::new();
        for v in values.split(',').map(str::trim) {
            if let Some((lo, hi)) = v.split_once("..") {
                let (lo, hi): (i64, i64) = (
                    lo.trim().parse().map_err(|_| format!("bad range `{v}`"))?,
                    hi.trim().parse().map_err(|_| format!("bad range `{v}`"))?,
                );
                axis.extend((lo..=hi).map(|n| Rat::from_integer(n.into())));
            } else {
                axis.push(parse_rational(v).ok_or_else(|| format!("bad value `{v}`"))?);
            }
        }
        grid.set(var, axis).map_err(|e| e.to_string())?;
    }
    Ok(grid)
}

/// Parses `var=[lo,hi];...`.
pub fn parse_box_flag(text: &str) -> Result<BTreeMap<String, (Rat, Rat)>, String> {
    let mut out = BTreeMap::new();
    for item in text.split(';').map(str::trim).filter(|s| !s.is_empty()) {
        let (var, range) = item.split_once('=').ok_or_else(|| format!("expected `var=[lo,hi]` in `{item}`"))?;
        let inner = range
            .trim()
            .strip_prefix('[')
            .and_then(|r| r.strip_suffix(']'))
            .ok_or_else(|| format!("expected `[lo,hi]` in `{item}`"))?;
        let (lo, hi) = inner.split_once(',').ok_or_else(|| format!("expected `[lo,hi]` in `{item}`"))?;
        let lo = parse_rational(lo).ok_or_else(|| format!("bad bound `{lo}`"))?;
        let hi = parse_rational(hi).ok_or_else(|| format!("bad bound `{hi}`"))?;
        if lo > hi {
            return Err(format!("empty range for `{}`", var.trim()));
        }
        if out.insert(var.trim().to_string(), (lo, hi)).is_some() {
            return Err(format!("bound for `{}` given twice", var.trim()));
        }
    }
    Ok(out)
}

fn grid_strings(g: &FiniteGrid) -> BTreeMap<String, Vec<String>> {
    g.variables()
        .map(|v| (v.clone(), g.axis(v).unwrap_or_default().iter().map(format_rational).collect()))
        .collect()
}

fn merged_grid(hint: &FiniteGrid, flag: &FiniteGrid) -> FiniteGrid {
    let mut g = hint.clone();
    for v in flag.variables() {
        g.set(v.clone(), flag.axis(v).expect("own axis").iter().cloned()).expect("valid axis");
    }
    g
}

/// Finite cross-check of a refinement verdict. A falsifying witness is
/// checked on the grid extended by its own coordinates.
fn finite_check(
    concrete: Concrete<'_>,
    abstract_: &Contract,
    verdict: &Verdict,
    grid: &FiniteGrid,
) -> Result<(bool, Option<bool>), ModelError> {
    let interp = |g: &FiniteGrid| match concrete {
        Concrete::Contract(c) => interpret_finite(c, g),
        Concrete::Composed(cc) => interpret_composed(cc, g),
    };
    let finite = refines_finite(&interp(grid)?, &interpret_finite(abstract_, grid)?)?;
    let agrees = match verdict {
        Verdict::Proved { .. } => Some(finite),
        Verdict::Unknown { .. } => None,
        Verdict::Falsified { witness, .. } => {
            let mut g = grid.clone();
            if let Some(w) = witness {
                for (k, v) in w {
                    if g.contains_var(k) {
                        g.insert_value(k, v.clone());
                    }
                }
            }
            Some(!refines_finite(&interp(&g)?, &interpret_finite(abstract_, &g)?)?)
        }
    };
    Ok((finite, agrees))
}

fn check_contract_pair(name: &str, c: &Contract, engine: &Engine, checks: &mut Vec<CheckReport>) {
    checks.push(CheckReport::new(CheckKind::Compatibility, name, &check_compatibility(c, engine)));
    checks.push(CheckReport::new(CheckKind::Consistency, name, &check_consistency(c, engine)));
}

/// `blocked` obligations are only listed: some declaration has a type error.
fn run_obligation(
    o: &Obligation,
    opts: &CheckOptions,
    engine: &Engine,
    file: Option<&str>,
    blocked: bool,
) -> ObligationReport {
    let start = Instant::now();
    let mut report = ObligationReport {
        name: o.name.clone(),
        concrete: o.concrete.as_ref().map(ConcreteTerm::describe),
        abstract_: o.abstract_.as_ref().map(|c| c.name.clone()),
        operator: match &o.concrete {
            Some(ConcreteTerm::Compose { operator, .. }) => Some(operator.name.clone()),
            _ => None,
        },
        composed: None,
        checks: Vec::new(),
        diagnostics: o.errors.iter().map(|d| d.to_record(file)).collect(),
        oracle: None,
        outcome: Outcome::Error,
        elapsed_ms: 0,
    };
    let type_ok = o.is_checkable() && !blocked;
    report.checks.push(CheckReport {
        kind: CheckKind::Type,
        subject: o.name.clone(),
        verdict: if type_ok { Outcome::Proved } else { Outcome::Error },
        method: None,
        witness: None,
        side: None,
        reason: match (o.errors.len(), blocked) {
            (0, true) => Some("declarations have errors".into()),
            (0, false) => None,
            (n, _) => Some(format!("{n} diagnostic(s)")),
        },
    });
    let (Some(concrete), Some(abstract_), true) = (&o.concrete, &o.abstract_, type_ok) else {
        report.elapsed_ms = elapsed(start, opts);
        return report;
    };

    let mut composed: Option<ComposedContract> = None;
    match concrete {
        ConcreteTerm::Contract(c) => check_contract_pair(&c.name, c, engine, &mut report.checks),
        ConcreteTerm::Compose { operator, parts } => {
            for (_, c) in parts {
                check_contract_pair(&c.name, c, engine, &mut report.checks);
            }
            match compose_contracts(operator, parts, engine) {
                Ok(cc) => {
                    let name = cc.name();
                    let v = check_composed_compatibility(&cc, engine);
                    report.checks.push(CheckReport::new(CheckKind::Compatibility, &name, &v));
                    let v = check_composed_consistency(&cc, engine);
                    report.checks.push(CheckReport::new(CheckKind::Consistency, &name, &v));
                    report.composed = Some(ComposedReport {
                        assumption: cc.assumption.to_string(),
                        guarantee: cc.guarantee.to_string(),
                        status: cc.status,
                    });
                    composed = Some(cc);
                }
                Err(e) => {
                    report.diagnostics.push(DiagnosticRecord {
                        code: "CompositionError".into(),
                        message: e.to_string(),
                        file: file.map(str::to_string),
                        line: Some(o.span.line),
                        column: Some(o.span.column),
                    });
                    report.elapsed_ms = elapsed(start, opts);
                    return report;
                }
            }
        }
    }
    check_contract_pair(&abstract_.name, abstract_, engine, &mut report.checks);

    let side = match (concrete, &composed) {
        (ConcreteTerm::Contract(c), _) => Concrete::Contract(c),
        (_, Some(cc)) => Concrete::Composed(cc),
        _ => unreachable!("composition succeeded above"),
    };
    match check_refinement(side, abstract_, engine) {
        Ok(r) => {
            let mut check = CheckReport::new(CheckKind::Refinement, &abstract_.name, &r.verdict);
            check.side = r.side;
            report.checks.push(check);
            if opts.oracle {
                report.oracle = Some(run_oracle(o, side, abstract_, &r.verdict, opts));
            }
        }
        Err(e) => report.diagnostics.push(DiagnosticRecord {
            code: "SubjectTypeMismatch".into(),
            message: e.to_string(),
            file: file.map(str::to_string),
            line: Some(o.span.line),
            column: Some(o.span.column),
        }),
    }
    report.outcome = if report.diagnostics.is_empty() {
        report.checks.iter().map(|c| c.verdict).max().unwrap_or(Outcome::Proved)
    } else {
        Outcome::Error
    };
    report.elapsed_ms = elapsed(start, opts);
    report
}

fn run_oracle(
    o: &Obligation,
    concrete: Concrete<'_>,
    abstract_: &Contract,
    verdict: &Verdict,
    opts: &CheckOptions,
) -> OracleReport {
    let grid = merged_grid(&o.grid_hint, &opts.grid);
    let mut rep = OracleReport {
        grid: grid_strings(&grid),
        finite_refinement: None,
        agrees: None,
        min_characterization: None,
        error: None,
    };
    if grid.variables().next().is_none() {
        rep.error = Some("no grid".into());
        return rep;
    }
    match finite_check(concrete, abstract_, verdict, &grid) {
        Ok((f, a)) => {
            rep.finite_refinement = Some(f);
            rep.agrees = a;
        }
        Err(e) => rep.error = Some(e.to_string()),
    }
    if let Concrete::Composed(cc) = concrete {
        let op = &cc.provenance.operator;
        match verify_min_characterization(cc, &cc.provenance.bindings, op, &grid) {
            Ok(m) => rep.min_characterization = Some(m),
            Err(e) => rep.error = Some(e.to_string()),
        }
    }
    rep
}

fn elapsed(start: Instant, opts: &CheckOptions) -> u64 {
    if opts.deterministic {
        0
    } else {
        start.elapsed().as_millis() as u64
    }
}

/// Runs every selected obligation across the merged inputs.
pub fn run_check(inputs: &[Input], opts: &CheckOptions) -> Report {
    let digests = inputs
        .iter()
        .map(|i| InputDigest { name: i.name.clone(), sha256: hex::encode(Sha256::digest(i.text.as_bytes())) })
        .collect();
    let mut diagnostics: Vec<DiagnosticRecord> = Vec::new();
    let mut doc = SpecDocument::default();
    for i in inputs {
        let (d, diags) = parse_document(&i.text);
        diagnostics.extend(diags.iter().map(|d| d.to_record(Some(&i.name))));
        doc.merge(d);
    }
    // after merging, a location is only meaningful with a single input
    let file = match inputs {
        [one] => Some(one.name.as_str()),
        _ => None,
    };
    let mut obligations = Vec::new();
    if diagnostics.is_empty() {
        let unresolved = resolve_names(&doc);
        diagnostics.extend(unresolved.iter().map(|d| d.to_record(file)));
        if unresolved.is_empty() {
            let program = elaborate(&doc);
            diagnostics.extend(program.diagnostics.iter().map(|d| d.to_record(file)));
            let known: BTreeSet<&str> = program.obligations.iter().map(|o| o.name.as_str()).collect();
            for name in &opts.obligations {
                if !known.contains(name.as_str()) {
                    diagnostics.push(Diagnostic::unlocated(DiagnosticKind::UnknownObligation(name.clone())).to_record(None));
                }
            }
            let engine = Engine::new(opts.engine.clone());
            let blocked = !program.diagnostics.is_empty();
            obligations = program
                .obligations
                .iter()
                .filter(|o| opts.obligations.is_empty() || opts.obligations.contains(&o.name))
                .map(|o| run_obligation(o, opts, &engine, file, blocked))
                .collect();
        }
    }
    obligations.sort_by(|a: &ObligationReport, b| a.name.cmp(&b.name));

    let mut summary = Summary::default();
    for o in &obligations {
        match o.outcome {
            Outcome::Proved => summary.proved += 1,
            Outcome::Falsified => summary.falsified += 1,
            Outcome::Unknown => summary.unknown += 1,
            Outcome::Error => summary.errors += 1,
        }
    }
    let global = if diagnostics.is_empty() { Outcome::Proved } else { Outcome::Error };
    let exit = exit_code(std::iter::once(global).chain(obligations.iter().map(|o| o.outcome)));
    Report {
        tool: "sccheck".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        inputs: digests,
        settings: Settings {
            dnf_cap: opts.engine.dnf_cap,
            samples: opts.engine.samples,
            seed: opts.engine.seed,
            deterministic: opts.deterministic,
            oracle: opts.oracle,
        },
        diagnostics,
        obligations,
        summary,
        exit_code: exit,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_code_precedence() {
        use Outcome::*;
        assert_eq!(exit_code([]), 0);
        assert_eq!(exit_code([Proved, Proved]), 0);
        assert_eq!(exit_code([Proved, Unknown]), 2);
        assert_eq!(exit_code([Unknown, Falsified, Proved]), 1);
        assert_eq!(exit_code([Falsified, Error]), 3);
        assert_eq!(exit_code([Error, Unknown]), 3);
    }

    #[test]
    fn flags() {
        let g = parse_grid_flag("r=0, 2/3, 1; u=0..2").unwrap();
        assert_eq!(g.axis("u").unwrap().len(), 3);
        assert_eq!(g.axis("r").unwrap()[1], crate::model::ratio(2, 3));
        assert!(parse_grid_flag("r=x").is_err());
        assert!(parse_grid_flag("r=1;r=2").is_err());
        let b = parse_box_flag("x=[-1, 1/2]; y=[0,0]").unwrap();
        assert_eq!(b["x"].1, crate::model::ratio(1, 2));
        assert!(parse_box_flag("x=[2,1]").is_err());
        assert!(parse_box_flag("x=2,1").is_err());
    }
}
