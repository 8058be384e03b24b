//! The classification tables as case files, and their verification.
//!
//! Cases live in `<root>/table{1,1p,2,2p,3,3p}/*.case`, additional
//! equivalence transformations in `<root>/transforms/*.case`.  The root
//! defaults to the `cases/v1` directory of this crate and can be moved with
//! the `DCSYM_CASE_DIR` environment variable.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use thiserror::Error;

use crate::equation::{opaque, DCEquation, Gauge};
use crate::expr::{zero_test, Bindings, Canon, Chart, Expr, ExprError, SideRelation, Var, Verdict, Q};
use crate::parser::{combination, parse_case_file, parse_expr_in, CaseError, CaseSpec, ElementSpec, FieldSpec, RelOp, Scope};
use crate::symmetry::{check_symmetry, closure_check_mod, ClosureError, VectorField};
use crate::transforms::{compose, transport_check, verify_maps, PointTransformation, TransformError};
use crate::Outcome;

pub const CASE_DIR_ENV: &str = "DCSYM_CASE_DIR";

const TABLE_DIRS: [&str; 6] = ["table1", "table1p", "table2", "table2p", "table3", "table3p"];

#[derive(Debug, Error)]
pub enum CatalogError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}: {source}")]
    Parse { path: String, source: CaseError },
    #[error("{0}: missing id")]
    MissingId(String),
    #[error("duplicate id '{0}'")]
    DuplicateId(String),
    #[error("unknown case '{0}'")]
    UnknownCase(String),
    #[error("unknown transformation '{0}'")]
    UnknownTransform(String),
    #[error("unknown filter key '{0}'")]
    UnknownFilterKey(String),
    #[error("malformed filter '{0}'")]
    BadFilter(String),
    #[error("{case}: unknown parameter '{name}'")]
    UnknownParameter { case: String, name: String },
    #[error("{case}: parameter '{name}' is not a rational number")]
    NotRational { case: String, name: String },
    #[error("{case}: constraint '{name}' violated ({text})")]
    ConstraintViolated { case: String, name: String, text: String },
    #[error("{case}: {message}")]
    Invalid { case: String, message: String },
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error(transparent)]
    Transform(#[from] TransformError),
}

pub type Result<T> = std::result::Result<T, CatalogError>;

/// One row of a classification table.
#[derive(Clone, Debug)]
pub struct ClassificationCase {
    pub id: String,
    /// `1`, `1'`, `2`, ...
    pub table: String,
    pub gauge: Gauge,
    pub spec: CaseSpec,
}

impl ClassificationCase {
    /// A case from a parsed file; the file must have an `[equation]` section.
    pub fn from_spec(spec: CaseSpec) -> Result<ClassificationCase> {
        let table = table_of(&spec.id);
        let gauge = match spec.gauge() {
            Some(g) => g.parse().map_err(|m| CatalogError::Invalid { case: spec.id.clone(), message: m })?,
            None if table.ends_with('\'') => Gauge::GIsH,
            None => Gauge::GIs1,
        };
        if spec.equation.is_none() {
            return Err(CatalogError::Invalid { case: spec.id.clone(), message: "no [equation] section".into() });
        }
        Ok(ClassificationCase { id: spec.id.clone(), table, gauge, spec })
    }

    pub fn dimension(&self) -> Option<usize> {
        self.spec.expected.dimension
    }

    /// Registered reason for an undecided verdict.
    pub fn justification(&self) -> Option<&str> {
        self.spec.notes.get("inconclusive").map(String::as_str)
    }

    pub fn twin(&self) -> Option<&str> {
        self.spec.link.get("twin").map(String::as_str)
    }

    pub fn chain(&self) -> Option<Vec<String>> {
        let c = self.spec.link.get("chain")?;
        Some(c.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect())
    }

    pub fn symmetry_names(&self) -> Vec<&str> {
        self.spec.symmetries.iter().map(|(n, _)| n.as_str()).collect()
    }
}

/// An additional equivalence transformation between two cases.
#[derive(Clone, Debug)]
pub struct AdditionalEquivalence {
    pub id: String,
    pub source: String,
    pub target: String,
    pub spec: CaseSpec,
}

/// A case with every parameter bound.
#[derive(Clone, Debug)]
pub struct Instance {
    pub id: String,
    pub params: BTreeMap<String, Q>,
    pub equation: DCEquation,
    pub basis: Vec<(String, VectorField)>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Filter {
    pub table: Option<String>,
    pub gauge: Option<Gauge>,
    pub dimension: Option<(RelOp, usize)>,
    pub id: Option<String>,
}

impl FromStr for Filter {
    type Err = CatalogError;
    fn from_str(s: &str) -> Result<Filter> {
        let mut f = Filter::default();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let Some(i) = part.find(['=', '<', '>', '!']) else {
                return Err(CatalogError::BadFilter(part.into()));
            };
            let key = part[..i].trim();
            let rest = &part[i..];
            let (op, value) = [(">=", RelOp::Ge), ("<=", RelOp::Le), ("!=", RelOp::Ne), ("=", RelOp::Eq), (">", RelOp::Gt), ("<", RelOp::Lt)]
                .iter()
                .find_map(|(t, op)| rest.strip_prefix(t).map(|v| (*op, v.trim())))
                .ok_or_else(|| CatalogError::BadFilter(part.into()))?;
            let bad = || CatalogError::BadFilter(part.into());
            match key {
                "table" if op == RelOp::Eq => f.table = Some(value.replace('p', "'")),
                "gauge" if op == RelOp::Eq => f.gauge = Some(value.parse().map_err(|_| bad())?),
                "id" if op == RelOp::Eq => f.id = Some(value.to_string()),
                "dim" | "dimension" => f.dimension = Some((op, value.parse().map_err(|_| bad())?)),
                "table" | "gauge" | "id" => return Err(bad()),
                k => return Err(CatalogError::UnknownFilterKey(k.to_string())),
            }
        }
        Ok(f)
    }
}

impl Filter {
    pub fn matches(&self, c: &ClassificationCase) -> bool {
        if self.table.as_ref().is_some_and(|t| *t != c.table) || self.gauge.is_some_and(|g| g != c.gauge) {
            return false;
        }
        if self.id.as_ref().is_some_and(|i| *i != c.id) {
            return false;
        }
        match (self.dimension, c.dimension()) {
            (None, _) => true,
            (Some(_), None) => false,
            (Some((op, n)), Some(d)) => match op {
                RelOp::Eq => d == n,
                RelOp::Ne => d != n,
                RelOp::Ge => d >= n,
                RelOp::Le => d <= n,
                RelOp::Gt => d > n,
                RelOp::Lt => d < n,
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CheckLine {
    pub name: String,
    pub outcome: Outcome,
    pub detail: Option<String>,
}

impl CheckLine {
    fn new(name: impl Into<String>, outcome: Outcome, detail: Option<String>) -> CheckLine {
        CheckLine { name: name.into(), outcome, detail }
    }
}

fn overall(lines: &[CheckLine]) -> Outcome {
    lines.iter().fold(Outcome::Pass, |o, l| o.and(l.outcome))
}

fn first_failure(lines: &[CheckLine]) -> Option<String> {
    lines
        .iter()
        .find(|l| l.outcome == Outcome::Fail)
        .or_else(|| lines.iter().find(|l| l.outcome == Outcome::Inconclusive))
        .map(|l| format!("{}: {}", l.name, l.detail.clone().unwrap_or_default()))
}

#[derive(Clone, Debug)]
pub struct CaseReport {
    pub id: String,
    pub outcome: Outcome,
    pub dimension: usize,
    pub expected: Option<usize>,
    pub checks: Vec<CheckLine>,
    pub justification: Option<String>,
    pub millis: u64,
}

impl CaseReport {
    pub fn residual(&self) -> Option<String> {
        first_failure(&self.checks)
    }
}

#[derive(Clone, Debug)]
pub struct TransformReport {
    pub id: String,
    pub source: String,
    pub target: String,
    pub outcome: Outcome,
    pub checks: Vec<CheckLine>,
    pub millis: u64,
}

impl TransformReport {
    pub fn residual(&self) -> Option<String> {
        first_failure(&self.checks)
    }
}

#[derive(Clone, Debug, Default)]
pub struct Summary {
    pub cases: Vec<CaseReport>,
    pub transforms: Vec<TransformReport>,
    pub millis: u64,
}

impl Summary {
    pub fn outcome(&self) -> Outcome {
        self.cases.iter().map(|c| c.outcome).chain(self.transforms.iter().map(|t| t.outcome)).fold(Outcome::Pass, Outcome::and)
    }
}

/// Parameter and element settings for one instantiation.
#[derive(Clone, Debug, Default)]
pub struct Setting {
    pub params: Vec<(String, Q)>,
    pub elements: Vec<(String, Canon)>,
}

impl Setting {
    pub fn params(params: Vec<(String, Q)>) -> Setting {
        Setting { params, elements: Vec::new() }
    }
}

#[derive(Clone, Debug)]
pub struct Catalog {
    pub root: PathBuf,
    pub chart: Chart,
    cases: Vec<ClassificationCase>,
    transforms: Vec<AdditionalEquivalence>,
}

pub fn default_root() -> PathBuf {
    std::env::var_os(CASE_DIR_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| Path::new(env!("CARGO_MANIFEST_DIR")).join("cases").join("v1"))
}

fn read_dir_sorted(dir: &Path) -> Result<Vec<PathBuf>> {
    let io = |e| CatalogError::Io { path: dir.display().to_string(), source: e };
    let mut out = Vec::new();
    for entry in std::fs::read_dir(dir).map_err(io)? {
        let p = entry.map_err(io)?.path();
        if p.extension().is_some_and(|e| e == "case") {
            out.push(p);
        }
    }
    out.sort();
    Ok(out)
}

fn load_spec(path: &Path) -> Result<CaseSpec> {
    let text = std::fs::read_to_string(path).map_err(|e| CatalogError::Io { path: path.display().to_string(), source: e })?;
    let spec = parse_case_file(&text).map_err(|e| CatalogError::Parse { path: path.display().to_string(), source: e })?;
    if spec.id.is_empty() {
        return Err(CatalogError::MissingId(path.display().to_string()));
    }
    Ok(spec)
}

/// Ordering of ids such as `1.2a`, `1'.2a'`, `3.14e`, `T2.6`.
pub fn id_order(a: &str, b: &str) -> Ordering {
    fn key(s: &str) -> Vec<(u64, String)> {
        let mut out = Vec::new();
        for part in s.split('.') {
            let digits: String = part.chars().skip_while(|c| !c.is_ascii_digit()).take_while(|c| c.is_ascii_digit()).collect();
            let prefix: String = part.chars().take_while(|c| !c.is_ascii_digit()).collect();
            let n = digits.parse().unwrap_or(0);
            let rest = part[prefix.len() + digits.len()..].to_string();
            out.push((prefix.len() as u64, prefix));
            out.push((n, rest));
        }
        out
    }
    key(a).cmp(&key(b))
}

fn table_of(id: &str) -> String {
    id.split('.').next().unwrap_or_default().to_string()
}

fn rational(c: &Canon, case: &str, name: &str) -> Result<Q> {
    c.as_q().ok_or_else(|| CatalogError::NotRational { case: case.into(), name: name.into() })
}

/// Replace parameters by their values before normalizing, so that
/// parameter-dependent exponents become plain rationals.
fn bind_expr(e: &Expr, vals: &BTreeMap<String, Q>) -> Expr {
    let go = |x: &Expr| Box::new(bind_expr(x, vals));
    match e {
        Expr::Param(p) => vals.get(p.as_ref()).map_or_else(|| e.clone(), |q| Expr::Rational(q.clone())),
        Expr::Rational(_) | Expr::Var(_) => e.clone(),
        Expr::Func { name, formal, derivs, args } => Expr::Func {
            name: name.clone(),
            formal: formal.clone(),
            derivs: derivs.clone(),
            args: args.as_ref().map(|a| a.iter().map(|x| bind_expr(x, vals)).collect()),
        },
        Expr::Sum(v) => Expr::Sum(v.iter().map(|x| bind_expr(x, vals)).collect()),
        Expr::Product(v) => Expr::Product(v.iter().map(|x| bind_expr(x, vals)).collect()),
        Expr::Pow(a, b) => Expr::Pow(go(a), go(b)),
        Expr::Exp(a) => Expr::Exp(go(a)),
        Expr::Ln(a) => Expr::Ln(go(a)),
        Expr::Abs(a) => Expr::Abs(go(a)),
        Expr::Sign(a) => Expr::Sign(go(a)),
        Expr::Int { integrand, var, arg } => Expr::Int { integrand: go(integrand), var: *var, arg: arg.as_ref().map(|a| go(a)) },
    }
}

fn eval(e: &Expr, vals: &BTreeMap<String, Q>) -> Result<Canon> {
    Ok(bind_expr(e, vals).normalize()?)
}

fn eval_text(text: &str, vals: &BTreeMap<String, Q>, case: &str) -> Result<Canon> {
    eval_in(text, &Scope::default(), vals, case)
}

fn eval_in(text: &str, scope: &Scope, vals: &BTreeMap<String, Q>, case: &str) -> Result<Canon> {
    let e = parse_expr_in(text, scope)
        .map_err(|e| CatalogError::Invalid { case: case.into(), message: format!("'{text}': {e}") })?;
    eval(&e, vals)
}

fn field(f: &FieldSpec, vals: &BTreeMap<String, Q>) -> Result<VectorField> {
    Ok(VectorField::new(eval(&f.tau, vals)?, eval(&f.xi, vals)?, eval(&f.eta, vals)?))
}

const ELEMENTS: [&str; 5] = ["f", "g", "h", "A", "B"];

fn same(a: &Canon, b: &Canon, rels: &[SideRelation], chart: Chart) -> Verdict {
    zero_test(&a.sub(b), rels, chart).verdict
}

fn millis(t: Instant) -> u64 {
    t.elapsed().as_millis() as u64
}

impl Catalog {
    /// A catalog with no cases, for instantiating standalone files.
    pub fn empty() -> Catalog {
        Catalog { root: PathBuf::new(), chart: Chart::Positive, cases: Vec::new(), transforms: Vec::new() }
    }

    pub fn load_default() -> Result<Catalog> {
        Catalog::load(&default_root())
    }

    pub fn load(root: &Path) -> Result<Catalog> {
        let mut cases = Vec::new();
        for dir in TABLE_DIRS {
            let d = root.join(dir);
            if !d.is_dir() {
                continue;
            }
            for p in read_dir_sorted(&d)? {
                cases.push(ClassificationCase::from_spec(load_spec(&p)?)?);
            }
        }
        let mut transforms = Vec::new();
        let d = root.join("transforms");
        if d.is_dir() {
            for p in read_dir_sorted(&d)? {
                let spec = load_spec(&p)?;
                let get = |k: &str| {
                    spec.meta.get(k).cloned().ok_or_else(|| CatalogError::Invalid { case: spec.id.clone(), message: format!("missing {k}") })
                };
                if spec.map.is_none() {
                    return Err(CatalogError::Invalid { case: spec.id.clone(), message: "no [map] section".into() });
                }
                transforms.push(AdditionalEquivalence { id: spec.id.clone(), source: get("source")?, target: get("target")?, spec });
            }
        }
        cases.sort_by(|a, b| id_order(&a.id, &b.id));
        transforms.sort_by(|a, b| id_order(&a.id, &b.id));
        for w in cases.windows(2) {
            if w[0].id == w[1].id {
                return Err(CatalogError::DuplicateId(w[0].id.clone()));
            }
        }
        for w in transforms.windows(2) {
            if w[0].id == w[1].id {
                return Err(CatalogError::DuplicateId(w[0].id.clone()));
            }
        }
        let cat = Catalog { root: root.to_path_buf(), chart: Chart::Positive, cases, transforms };
        for t in &cat.transforms {
            for c in [&t.source, &t.target] {
                cat.case(c)?;
            }
        }
        Ok(cat)
    }

    pub fn with_chart(mut self, chart: Chart) -> Catalog {
        self.chart = chart;
        self
    }

    pub fn cases(&self) -> &[ClassificationCase] {
        &self.cases
    }

    pub fn transforms(&self) -> &[AdditionalEquivalence] {
        &self.transforms
    }

    pub fn case(&self, id: &str) -> Result<&ClassificationCase> {
        self.cases.iter().find(|c| c.id == id).ok_or_else(|| CatalogError::UnknownCase(id.into()))
    }

    pub fn transform(&self, id: &str) -> Result<&AdditionalEquivalence> {
        self.transforms.iter().find(|c| c.id == id).ok_or_else(|| CatalogError::UnknownTransform(id.into()))
    }

    pub fn list_cases(&self, filter: &Filter) -> Vec<&ClassificationCase> {
        self.cases.iter().filter(|c| filter.matches(c)).collect()
    }

    /// Parameter values: defaults in file order, then overrides.
    pub fn bind_params(&self, case: &ClassificationCase, set: &[(String, Q)]) -> Result<BTreeMap<String, Q>> {
        for (n, _) in set {
            if !case.spec.params.iter().any(|(p, _)| p == n) {
                return Err(CatalogError::UnknownParameter { case: case.id.clone(), name: n.clone() });
            }
        }
        let mut vals = BTreeMap::new();
        for (n, d) in &case.spec.params {
            let v = match set.iter().rev().find(|(p, _)| p == n) {
                Some((_, q)) => q.clone(),
                None => rational(&eval(d, &vals)?, &case.id, n)?,
            };
            vals.insert(n.clone(), v);
        }
        let b = vals.iter().fold(crate::expr::Bindings::new(), |b, (n, q)| b.param(n, Canon::q(q.clone())));
        for c in &case.spec.constraints {
            match c.cond.holds(&b) {
                Ok(true) => {}
                Ok(false) => {
                    return Err(CatalogError::ConstraintViolated { case: case.id.clone(), name: c.name.clone(), text: c.text.clone() })
                }
                Err(m) => return Err(CatalogError::Invalid { case: case.id.clone(), message: format!("constraint {}: {m}", c.name) }),
            }
        }
        Ok(vals)
    }

    /// The `[map]` section of a standalone file, with its parameters bound.
    pub fn map_of(&self, spec: &CaseSpec, set: &[(String, Q)]) -> Result<PointTransformation> {
        let case = ClassificationCase { id: spec.id.clone(), table: String::new(), gauge: Gauge::GIs1, spec: spec.clone() };
        let vals = self.bind_params(&case, set)?;
        let m = spec.map.as_ref().ok_or_else(|| CatalogError::Invalid { case: spec.id.clone(), message: "no [map] section".into() })?;
        Ok(PointTransformation::new(eval(&m.t, &vals)?, eval(&m.x, &vals)?, eval(&m.u, &vals)?, self.chart)?)
    }

    pub fn instantiate(&self, case: &ClassificationCase, set: &[(String, Q)]) -> Result<Instance> {
        self.instantiate_with(case, &Setting::params(set.to_vec()))
    }

    /// Instantiate with parameter values and element overrides.  An
    /// override of an opaque element or auxiliary function replaces it
    /// everywhere; side relations on it must then hold identically.
    pub fn instantiate_with(&self, case: &ClassificationCase, set: &Setting) -> Result<Instance> {
        let vals = self.bind_params(case, &set.params)?;
        let spec = case.spec.equation.as_ref().expect("checked on load");
        let invalid = |message: String| CatalogError::Invalid { case: case.id.clone(), message };
        let slots = [("f", &spec.f, Var::X), ("g", &spec.g, Var::X), ("h", &spec.h, Var::X), ("A", &spec.a, Var::U), ("B", &spec.b, Var::U)];
        let mut bind = Bindings::new();
        let mut bound = Vec::new();
        for (n, c) in &set.elements {
            let formal = match slots.iter().find(|(s, _, _)| s == n) {
                Some((_, ElementSpec::Opaque, v)) => vec![*v],
                Some(_) => continue,
                None => match case.spec.functions.iter().find(|(f, _)| f == n) {
                    Some((_, vs)) => vs.clone(),
                    None => return Err(invalid(format!("unknown element '{n}'"))),
                },
            };
            bind = bind.func(n, &formal, c.clone());
            bound.push(n.as_str());
        }
        let put = |c: Canon| if bind.is_empty() { Ok(c) } else { c.subst(&bind) };
        let mut el = Vec::new();
        for (name, e, var) in slots {
            let c = match set.elements.iter().rev().find(|(n, _)| n == name) {
                Some((_, c)) => c.clone(),
                None => match e {
                    ElementSpec::Opaque => opaque(name, var),
                    ElementSpec::Expr(x) => put(eval(x, &vals)?)?,
                },
            };
            el.push(c);
        }
        let mut rels = Vec::new();
        let mut pinned = Vec::new();
        for r in &case.spec.relations {
            let rep = eval(&r.replacement, &vals)?;
            if bound.iter().any(|b| r.target.name.as_ref() == *b) {
                pinned.push((r, rep));
            } else {
                rels.push(SideRelation::new(r.target.clone(), put(rep)?));
            }
        }
        for (r, rep) in pinned {
            let d = put(Canon::func(r.target.clone()))?.sub(&put(rep)?);
            if zero_test(&d, &rels, self.chart).verdict != Verdict::Zero {
                return Err(invalid(format!("override violates the relation on {}", r.target.name)));
            }
        }
        let [f, g, h, a, b]: [Canon; 5] = el.try_into().expect("five elements");
        let equation = DCEquation::new(f, g, h, a, b).with_relations(rels).with_chart(self.chart);
        let mut basis = Vec::new();
        for (n, fs) in &case.spec.symmetries {
            basis.push((n.clone(), field(fs, &vals)?.map(|c| put(c.clone()))?));
        }
        Ok(Instance { id: case.id.clone(), params: vals, equation, basis })
    }

    pub fn verify_case(&self, case: &ClassificationCase, set: &[(String, Q)]) -> Result<CaseReport> {
        self.verify_case_with(case, &Setting::params(set.to_vec()))
    }

    /// As [`Catalog::verify_case`], also accepting element overrides.
    pub fn verify_case_with(&self, case: &ClassificationCase, set: &Setting) -> Result<CaseReport> {
        let start = Instant::now();
        let inst = self.instantiate_with(case, set)?;
        let e = &inst.equation;
        let mut checks = Vec::new();
        let v = e.validate();
        let fails = v.failures();
        checks.push(if fails.is_empty() {
            CheckLine::new("validate", Outcome::Pass, None)
        } else {
            CheckLine::new("validate", Outcome::Fail, Some(fails.join("; ")))
        });
        for (n, q) in &inst.basis {
            let r = check_symmetry(e, q);
            let detail = match r.outcome {
                Outcome::Pass => None,
                _ => Some(r.note.clone().unwrap_or_else(|| r.residual.to_string())),
            };
            checks.push(CheckLine::new(n.clone(), r.outcome, detail));
        }
        let k = check_symmetry(e, &VectorField::dt());
        checks.push(CheckLine::new("kernel d_t", k.outcome, (k.outcome != Outcome::Pass).then(|| k.residual.to_string())));
        let fields: Vec<VectorField> = inst.basis.iter().map(|(_, q)| q.clone()).collect();
        match closure_check_mod(&fields, &e.relations, e.chart) {
            Ok(sc) => {
                checks.push(CheckLine::new("closure", Outcome::Pass, None));
                let names: Vec<String> = inst.basis.iter().map(|(n, _)| n.clone()).collect();
                for (a, b, ex) in &case.spec.expected.brackets {
                    let i = names.iter().position(|n| n == a).expect("checked by parser");
                    let j = names.iter().position(|n| n == b).expect("checked by parser");
                    let line = format!("bracket {a} {b}");
                    match combination(&bind_expr(ex, &inst.params), &names) {
                        Ok(want) if want == sc.c[i][j] => checks.push(CheckLine::new(line, Outcome::Pass, None)),
                        Ok(_) => checks.push(CheckLine::new(line, Outcome::Fail, Some("structure constants differ".into()))),
                        Err(m) => checks.push(CheckLine::new(line, Outcome::Inconclusive, Some(m))),
                    }
                }
            }
            Err(ClosureError::Unsupported(m)) => checks.push(CheckLine::new("closure", Outcome::Inconclusive, Some(m))),
            Err(err) => checks.push(CheckLine::new("closure", Outcome::Fail, Some(err.to_string()))),
        }
        if let Some(d) = case.dimension() {
            let o = if d == inst.basis.len() { Outcome::Pass } else { Outcome::Fail };
            checks.push(CheckLine::new("dimension", o, (o == Outcome::Fail).then(|| format!("expected {d}, basis has {}", inst.basis.len()))));
        }
        Ok(CaseReport {
            id: case.id.clone(),
            outcome: overall(&checks),
            dimension: inst.basis.len(),
            expected: case.dimension(),
            checks,
            justification: case.justification().map(str::to_string),
            millis: millis(start),
        })
    }

    pub fn verify_case_id(&self, id: &str, set: &[(String, Q)]) -> Result<CaseReport> {
        self.verify_case(self.case(id)?, set)
    }

    /// Source and target instances and the point map of a transformation.
    pub fn transform_parts(&self, t: &AdditionalEquivalence) -> Result<(Instance, Instance, PointTransformation)> {
        self.transform_parts_at(t, &BTreeMap::new())
    }

    /// As [`Catalog::transform_parts`] with the source parameters set to
    /// `at` where the source case has them.
    pub fn transform_parts_at(
        &self,
        t: &AdditionalEquivalence,
        at: &BTreeMap<String, Q>,
    ) -> Result<(Instance, Instance, PointTransformation)> {
        self.parts(t, at, self.chart)
    }

    fn parts(
        &self,
        t: &AdditionalEquivalence,
        at: &BTreeMap<String, Q>,
        chart: Chart,
    ) -> Result<(Instance, Instance, PointTransformation)> {
        let src_case = self.case(&t.source)?;
        let tgt_case = self.case(&t.target)?;
        let (mut src_set, env) = self.linked(src_case, &t.spec, "source", &BTreeMap::new())?;
        for (n, q) in at {
            if src_case.spec.params.iter().any(|(p, _)| p == n) {
                src_set.params.retain(|(p, _)| p != n);
                src_set.params.push((n.clone(), q.clone()));
            }
        }
        let src = self.instantiate_with(src_case, &src_set)?;
        let mut env = env;
        for (n, q) in &src.params {
            env.insert(n.clone(), q.clone());
        }
        for (n, d) in &t.spec.params {
            if !src.params.contains_key(n) {
                let v = rational(&eval(d, &env)?, &t.id, n)?;
                env.insert(n.clone(), v);
            }
        }
        let (tgt_set, _) = self.linked(tgt_case, &t.spec, "target", &env)?;
        let tgt = self.instantiate_with(tgt_case, &tgt_set)?;
        let m = t.spec.map.as_ref().expect("checked on load");
        let psi = PointTransformation::new(eval(&m.t, &env)?, eval(&m.x, &env)?, eval(&m.u, &env)?, chart)?;
        Ok((src, tgt, psi))
    }

    /// Settings named `<prefix>.<key>` in the link section of `spec`.
    fn linked(
        &self,
        case: &ClassificationCase,
        spec: &CaseSpec,
        prefix: &str,
        env: &BTreeMap<String, Q>,
    ) -> Result<(Setting, BTreeMap<String, Q>)> {
        let mut set = Setting::default();
        let mut env = env.clone();
        let p = format!("{prefix}.");
        let scope = case.spec.functions.iter().fold(Scope::default(), |s, (n, vs)| s.with_func(n, vs));
        for (k, v) in &spec.link {
            let Some(name) = k.strip_prefix(&p) else { continue };
            let c = eval_in(v, &scope, &env, &spec.id)?;
            if ELEMENTS.contains(&name) || case.spec.functions.iter().any(|(f, _)| f == name) {
                set.elements.push((name.to_string(), c));
            } else {
                let q = rational(&c, &spec.id, name)?;
                if !case.spec.params.iter().any(|(n, _)| n == name) {
                    return Err(CatalogError::UnknownParameter { case: case.id.clone(), name: name.to_string() });
                }
                set.params.push((name.to_string(), q.clone()));
                env.insert(name.to_string(), q);
            }
        }
        Ok((set, env))
    }

    pub fn verify_additional_equivalence(&self, t: &AdditionalEquivalence) -> Result<TransformReport> {
        let start = Instant::now();
        let (src, tgt, psi) = self.transform_parts(t)?;
        let mut checks = Vec::new();
        let r = verify_maps(&psi, &src.equation, &tgt.equation);
        let detail = (r.outcome != Outcome::Pass).then(|| r.note.clone().unwrap_or_else(|| r.residual.to_string()));
        checks.push(CheckLine::new("maps", r.outcome, detail));
        if r.outcome == Outcome::Pass {
            for (n, q) in &src.basis {
                let s = transport_check(&psi, q, &src.equation, &tgt.equation);
                let detail = (s.outcome != Outcome::Pass).then(|| s.note.clone().unwrap_or_else(|| s.residual.to_string()));
                checks.push(CheckLine::new(format!("transport {n}"), s.outcome, detail));
            }
        }
        Ok(TransformReport {
            id: t.id.clone(),
            source: t.source.clone(),
            target: t.target.clone(),
            outcome: overall(&checks),
            checks,
            millis: millis(start),
        })
    }

    /// The bridge between a `g = 1` case and its `g = h` twin: the
    /// unprimed instance, the primed instance, and the map between them.
    /// The link may sit in either file.
    pub fn twin_parts(&self, holder: &ClassificationCase) -> Result<(Instance, Instance, PointTransformation)> {
        let Some(tid) = holder.twin() else {
            return Err(CatalogError::Invalid { case: holder.id.clone(), message: "no twin".into() });
        };
        let other = self.case(tid)?;
        let (unprimed, primed) = if holder.gauge == Gauge::GIsH { (other, holder) } else { (holder, other) };
        let (src_set, _) = self.linked(unprimed, &holder.spec, "twin.src", &BTreeMap::new())?;
        let src = self.instantiate_with(unprimed, &src_set)?;
        let (dst_set, _) = self.linked(primed, &holder.spec, "twin.dst", &src.params)?;
        let dst = self.instantiate_with(primed, &dst_set)?;
        let get = |k: &str| holder.spec.link.get(k).map(|v| eval_text(v, &src.params, &holder.id)).transpose();
        let x = match get("twin.X")? {
            Some(x) => x,
            None => {
                let x = src.equation.h.antiderivative(Var::X)?;
                let mut open = false;
                x.visit_atoms(&mut |a| open |= matches!(a, crate::expr::Atom::Int(_)));
                if open {
                    return Err(CatalogError::Invalid { case: primed.id.clone(), message: "no closed-form antiderivative of h".into() });
                }
                x
            }
        };
        let t = get("twin.T")?.unwrap_or_else(|| Canon::var(Var::T));
        let u = get("twin.U")?.unwrap_or_else(|| Canon::var(Var::U));
        let psi = PointTransformation::new(t, x, u, self.chart)?;
        Ok((src, dst, psi))
    }

    /// The twin map must be `x~ = c * (integral of h) + d` up to scalings
    /// in `t` and `u`, and must map the unprimed instance to the primed one.
    pub fn verify_twin(&self, primed: &ClassificationCase) -> Result<TransformReport> {
        let start = Instant::now();
        let (src, dst, psi) = self.twin_parts(primed)?;
        let mut checks = Vec::new();
        let ratio = psi.x.diff(Var::X).div(&src.equation.h)?;
        let rels = &src.equation.relations;
        let bridge = [ratio.diff(Var::X), ratio.diff(Var::T), psi.t.diff_n(Var::T, 2), psi.u.diff(Var::X), psi.u.diff(Var::T)]
            .iter()
            .map(|c| zero_test(c, rels, self.chart).verdict)
            .fold(Outcome::Pass, |o, v| o.and(Outcome::from(v)));
        checks.push(CheckLine::new("bridge form", bridge, None));
        let r = verify_maps(&psi, &src.equation, &dst.equation);
        let detail = (r.outcome != Outcome::Pass).then(|| r.note.clone().unwrap_or_else(|| r.residual.to_string()));
        checks.push(CheckLine::new("maps", r.outcome, detail));
        Ok(TransformReport {
            id: format!("{}~{}", src.id, dst.id),
            source: src.id,
            target: dst.id,
            outcome: overall(&checks),
            checks,
            millis: millis(start),
        })
    }

    /// Follow the registered chain of a case to an equation with
    /// `f = g = h = 1` and verify the composed map.
    pub fn verify_chain(&self, case: &ClassificationCase) -> Result<TransformReport> {
        let start = Instant::now();
        let Some(steps) = case.chain() else {
            return Err(CatalogError::Invalid { case: case.id.clone(), message: "no chain registered".into() });
        };
        let mut checks = Vec::new();
        let mut steps = steps.into_iter().peekable();
        let (first, mut current, mut psi) = if steps.peek().is_some_and(|s| s == "twin^-1") {
            steps.next();
            let (src, dst, map) = self.twin_parts(case)?;
            (dst, src, map.invert()?)
        } else {
            let i = self.instantiate(case, &[])?;
            (i.clone(), i, PointTransformation::identity())
        };
        for s in steps {
            let t = self.transform(&s)?;
            // signs stay symbolic until the whole chain is composed
            let (src, tgt, map) = self.parts(t, &current.params, Chart::Signed)?;
            let joint: Vec<SideRelation> = current.equation.relations.iter().chain(&src.equation.relations).cloned().collect();
            let agree = current
                .equation
                .elements()
                .iter()
                .zip(src.equation.elements().iter())
                .map(|((_, a), (_, b))| Outcome::from(same(a, b, &joint, self.chart)))
                .fold(Outcome::Pass, Outcome::and);
            checks.push(CheckLine::new(format!("link {s}"), agree, (agree != Outcome::Pass).then(|| format!("{} differs from {}", current.id, src.id))));
            psi = compose(&psi, &map)?;
            current = tgt;
        }
        let psi = PointTransformation::new(psi.t, psi.x, psi.u, self.chart)?;
        let one = Canon::one();
        let e = &current.equation;
        let flat = [&e.f, &e.g, &e.h]
            .iter()
            .map(|c| Outcome::from(same(c, &one, &e.relations, self.chart)))
            .fold(Outcome::Pass, Outcome::and);
        checks.push(CheckLine::new("f = g = h = 1", flat, None));
        let r = verify_maps(&psi, &first.equation, e);
        let detail = (r.outcome != Outcome::Pass).then(|| r.note.clone().unwrap_or_else(|| r.residual.to_string()));
        checks.push(CheckLine::new("maps", r.outcome, detail));
        Ok(TransformReport {
            id: format!("chain {}", case.id),
            source: case.id.clone(),
            target: current.id,
            outcome: overall(&checks),
            checks,
            millis: millis(start),
        })
    }

    /// Verify every matching case at its default instantiation, and every
    /// transformation whose source matches.
    pub fn verify_all(&self, filter: &Filter, jobs: Option<usize>) -> Result<Summary> {
        let start = Instant::now();
        let run = || -> Result<Summary> {
            let cases: Vec<&ClassificationCase> = self.list_cases(filter);
            let ids: Vec<&str> = cases.iter().map(|c| c.id.as_str()).collect();
            let mut reports = cases.par_iter().map(|c| self.verify_case(c, &[])).collect::<Result<Vec<_>>>()?;
            let ts: Vec<&AdditionalEquivalence> = self.transforms.iter().filter(|t| ids.contains(&t.source.as_str())).collect();
            let mut treports = ts.par_iter().map(|t| self.verify_additional_equivalence(t)).collect::<Result<Vec<_>>>()?;
            reports.sort_by(|a, b| id_order(&a.id, &b.id));
            treports.sort_by(|a, b| id_order(&a.id, &b.id));
            Ok(Summary { cases: reports, transforms: treports, millis: 0 })
        };
        let mut s = match jobs {
            Some(n) => rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| CatalogError::Invalid { case: String::new(), message: e.to_string() })?
                .install(run)?,
            None => run()?,
        };
        s.millis = millis(start);
        Ok(s)
    }
}

impl fmt::Display for CaseReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} {} (dimension {})", self.id, self.outcome, self.dimension)?;
        for c in &self.checks {
            match &c.detail {
                Some(d) => writeln!(f, "  {} {}: {}", c.name, c.outcome, d)?,
                None => writeln!(f, "  {} {}", c.name, c.outcome)?,
            }
        }
        if let (Outcome::Inconclusive, Some(j)) = (self.outcome, &self.justification) {
            writeln!(f, "  note: {j}")?;
        }
        Ok(())
    }
}

impl fmt::Display for TransformReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} {} -> {} {}", self.id, self.source, self.target, self.outcome)?;
        for c in &self.checks {
            match &c.detail {
                Some(d) => writeln!(f, "  {} {}: {}", c.name, c.outcome, d)?,
                None => writeln!(f, "  {} {}", c.name, c.outcome)?,
            }
        }
        Ok(())
    }
}
