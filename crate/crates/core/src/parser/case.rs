//! The `dcsym-case v1` file format.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use super::lexer::{lex, Tok, Token};
use super::{parse_expr_in, parse_field, variable, ParseError, Scope};
use crate::expr::{normalize, Bindings, Canon, Expr, FuncAtom, Var, Q};

pub const HEADER: &str = "dcsym-case v1";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CaseError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: undeclared symbol '{name}'")]
    UndeclaredSymbol { line: usize, name: String },
    #[error("line {line}: duplicate key '{key}'")]
    DuplicateKey { line: usize, key: String },
    #[error("line {line}: constraint references unknown parameter '{name}'")]
    UnknownParameter { line: usize, name: String },
    #[error("line {line}: {source}")]
    Expr { line: usize, source: ParseError },
}

#[derive(Clone, Debug, PartialEq)]
pub enum ElementSpec {
    Opaque,
    Expr(Expr),
}

#[derive(Clone, Debug, PartialEq)]
pub struct EquationSpec {
    pub f: ElementSpec,
    pub g: ElementSpec,
    pub h: ElementSpec,
    pub a: ElementSpec,
    pub b: ElementSpec,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FieldSpec {
    pub tau: Expr,
    pub xi: Expr,
    pub eta: Expr,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RelationSpec {
    pub target: FuncAtom,
    pub replacement: Expr,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MapSpec {
    pub t: Expr,
    pub x: Expr,
    pub u: Expr,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RelOp {
    Eq,
    Ne,
    Ge,
    Le,
    Gt,
    Lt,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Cond {
    Rel(Expr, RelOp, Expr),
    In(Expr, Vec<Expr>),
    NotIn(Expr, Vec<Expr>),
    And(Vec<Cond>),
    Or(Vec<Cond>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Constraint {
    pub name: String,
    pub text: String,
    pub cond: Cond,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ExpectedSpec {
    pub dimension: Option<usize>,
    /// `[Qi, Qj] = combination`.
    pub brackets: Vec<(String, String, Expr)>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct CaseSpec {
    pub id: String,
    /// Entries of the `[case]` section.
    pub meta: BTreeMap<String, String>,
    /// Parameters with their default values, in file order.
    pub params: Vec<(String, Expr)>,
    /// Auxiliary functions and their formal variables.
    pub functions: Vec<(String, Vec<Var>)>,
    pub constraints: Vec<Constraint>,
    pub equation: Option<EquationSpec>,
    pub relations: Vec<RelationSpec>,
    pub symmetries: Vec<(String, FieldSpec)>,
    pub expected: ExpectedSpec,
    pub map: Option<MapSpec>,
    pub link: BTreeMap<String, String>,
    pub notes: BTreeMap<String, String>,
}

impl CaseSpec {
    pub fn gauge(&self) -> Option<&str> {
        self.meta.get("gauge").map(String::as_str)
    }

    pub fn param_names(&self) -> BTreeSet<String> {
        self.params.iter().map(|(p, _)| p.clone()).collect()
    }
}

impl Cond {
    /// Exact evaluation; every parameter must be bound to a rational.
    pub fn holds(&self, b: &Bindings) -> Result<bool, String> {
        let val = |e: &Expr| -> Result<Q, String> {
            let c = normalize(e).and_then(|c| c.subst(b)).map_err(|e| e.to_string())?;
            c.as_q().ok_or_else(|| format!("'{c}' is not a rational number"))
        };
        Ok(match self {
            Cond::Rel(a, op, c) => {
                let (a, c) = (val(a)?, val(c)?);
                match op {
                    RelOp::Eq => a == c,
                    RelOp::Ne => a != c,
                    RelOp::Ge => a >= c,
                    RelOp::Le => a <= c,
                    RelOp::Gt => a > c,
                    RelOp::Lt => a < c,
                }
            }
            Cond::In(a, set) | Cond::NotIn(a, set) => {
                let a = val(a)?;
                let mut found = false;
                for s in set {
                    found |= val(s)? == a;
                }
                found == matches!(self, Cond::In(..))
            }
            Cond::And(v) => {
                for c in v {
                    if !c.holds(b)? {
                        return Ok(false);
                    }
                }
                true
            }
            Cond::Or(v) => {
                for c in v {
                    if c.holds(b)? {
                        return Ok(true);
                    }
                }
                false
            }
        })
    }

    fn exprs<'a>(&'a self, out: &mut Vec<&'a Expr>) {
        match self {
            Cond::Rel(a, _, b) => out.extend([a, b]),
            Cond::In(a, s) | Cond::NotIn(a, s) => {
                out.push(a);
                out.extend(s.iter());
            }
            Cond::And(v) | Cond::Or(v) => v.iter().for_each(|c| c.exprs(out)),
        }
    }
}

pub fn params_of(e: &Expr, out: &mut BTreeSet<String>) {
    match e {
        Expr::Param(p) => {
            out.insert(p.to_string());
        }
        Expr::Rational(_) | Expr::Var(_) => {}
        Expr::Func { args, .. } => args.iter().flatten().for_each(|a| params_of(a, out)),
        Expr::Sum(v) | Expr::Product(v) => v.iter().for_each(|a| params_of(a, out)),
        Expr::Pow(a, b) => {
            params_of(a, out);
            params_of(b, out);
        }
        Expr::Exp(a) | Expr::Ln(a) | Expr::Abs(a) | Expr::Sign(a) => params_of(a, out),
        Expr::Int { integrand, arg, .. } => {
            params_of(integrand, out);
            if let Some(a) = arg {
                params_of(a, out);
            }
        }
    }
}

struct Entry {
    line: usize,
    key: String,
    value: String,
}

fn split_lines(text: &str) -> Result<Vec<(String, Vec<Entry>)>, CaseError> {
    let mut sections: Vec<(String, Vec<Entry>)> = Vec::new();
    let mut header = false;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let s = strip_comment(raw).trim().to_string();
        if s.is_empty() {
            continue;
        }
        if !header {
            if s != HEADER {
                return Err(CaseError::Syntax { line, message: format!("expected header '{HEADER}'") });
            }
            header = true;
            continue;
        }
        if let Some(name) = s.strip_prefix('[').and_then(|r| r.strip_suffix(']')) {
            let name = name.trim().to_string();
            if sections.iter().any(|(n, _)| *n == name) {
                return Err(CaseError::DuplicateKey { line, key: format!("[{name}]") });
            }
            sections.push((name, Vec::new()));
            continue;
        }
        let Some((k, v)) = s.split_once('=') else {
            return Err(CaseError::Syntax { line, message: "expected key = \"value\"".into() });
        };
        let key = k.trim().to_string();
        let v = v.trim();
        let Some(value) = v.strip_prefix('"').and_then(|r| r.strip_suffix('"')) else {
            return Err(CaseError::Syntax { line, message: "value must be double quoted".into() });
        };
        if value.contains('"') || key.is_empty() {
            return Err(CaseError::Syntax { line, message: "malformed entry".into() });
        }
        let Some((_, entries)) = sections.last_mut() else {
            return Err(CaseError::Syntax { line, message: "entry outside a section".into() });
        };
        if entries.iter().any(|e| e.key == key) {
            return Err(CaseError::DuplicateKey { line, key });
        }
        entries.push(Entry { line, key, value: value.to_string() });
    }
    if !header {
        return Err(CaseError::Syntax { line: 1, message: format!("missing header '{HEADER}'") });
    }
    Ok(sections)
}

fn strip_comment(s: &str) -> &str {
    let mut quoted = false;
    for (i, c) in s.char_indices() {
        match c {
            '"' => quoted = !quoted,
            '#' if !quoted => return &s[..i],
            _ => {}
        }
    }
    s
}

fn expr_err(line: usize, e: ParseError) -> CaseError {
    if let Some(name) = e.message.strip_prefix("undeclared symbol '").and_then(|r| r.strip_suffix('\'')) {
        return CaseError::UndeclaredSymbol { line, name: name.to_string() };
    }
    CaseError::Expr { line, source: e }
}

const SECTIONS: [&str; 11] =
    ["case", "params", "functions", "constraints", "equation", "relations", "symmetries", "expected", "map", "link", "notes"];

pub fn parse_case_file(text: &str) -> Result<CaseSpec, CaseError> {
    let sections = split_lines(text)?;
    let get = |name: &str| sections.iter().find(|(n, _)| n == name).map(|(_, e)| e.as_slice()).unwrap_or(&[]);
    for (n, e) in &sections {
        if !SECTIONS.contains(&n.as_str()) {
            let line = e.first().map_or(1, |e| e.line);
            return Err(CaseError::Syntax { line, message: format!("unknown section [{n}]") });
        }
    }
    let mut spec = CaseSpec::default();
    for e in get("case") {
        spec.meta.insert(e.key.clone(), e.value.clone());
    }
    spec.id = spec.meta.get("id").cloned().unwrap_or_default();
    for (n, e) in [("link", &mut spec.link), ("notes", &mut spec.notes)] {
        for entry in get(n) {
            e.insert(entry.key.clone(), entry.value.clone());
        }
    }

    let mut scope = Scope::strict();
    for e in get("params") {
        if variable(&e.key).is_some() || !is_ident(&e.key) {
            return Err(CaseError::Syntax { line: e.line, message: format!("bad parameter name '{}'", e.key) });
        }
        scope.params.insert(e.key.clone());
    }
    for e in get("functions") {
        let mut formal = Vec::new();
        for part in e.value.split(',') {
            match variable(part.trim()) {
                Some(v) if !v.is_jet() => formal.push(v),
                _ => return Err(CaseError::Syntax { line: e.line, message: format!("bad formal variable '{part}'") }),
            }
        }
        if !is_ident(&e.key) || e.key.contains('_') {
            return Err(CaseError::Syntax { line: e.line, message: format!("bad function name '{}'", e.key) });
        }
        scope.funcs.insert(e.key.clone(), formal.clone());
        spec.functions.push((e.key.clone(), formal));
    }
    let eq = get("equation");
    for e in eq {
        let formal = match e.key.as_str() {
            "f" | "g" | "h" => Var::X,
            "A" | "B" => Var::U,
            k => return Err(CaseError::Syntax { line: e.line, message: format!("unknown element '{k}'") }),
        };
        if e.value.trim() == "opaque" {
            scope.funcs.insert(e.key.clone(), vec![formal]);
        }
    }

    for e in get("params") {
        let v = parse_expr_in(&e.value, &scope).map_err(|x| expr_err(e.line, x))?;
        spec.params.push((e.key.clone(), v));
    }
    for e in get("constraints") {
        let cond = parse_cond(&e.value, &scope).map_err(|x| match expr_err(e.line, x) {
            CaseError::UndeclaredSymbol { line, name } => CaseError::UnknownParameter { line, name },
            other => other,
        })?;
        let mut es = Vec::new();
        cond.exprs(&mut es);
        let mut ps = BTreeSet::new();
        es.iter().for_each(|x| params_of(x, &mut ps));
        if let Some(p) = ps.iter().find(|p| !scope.params.contains(*p)) {
            return Err(CaseError::UnknownParameter { line: e.line, name: p.clone() });
        }
        spec.constraints.push(Constraint { name: e.key.clone(), text: e.value.clone(), cond });
    }
    if !eq.is_empty() {
        let mut el = BTreeMap::new();
        for e in eq {
            let v = if e.value.trim() == "opaque" {
                ElementSpec::Opaque
            } else {
                ElementSpec::Expr(parse_expr_in(&e.value, &scope).map_err(|x| expr_err(e.line, x))?)
            };
            el.insert(e.key.as_str(), v);
        }
        let mut take = |k: &str, default: Option<Expr>| -> Result<ElementSpec, CaseError> {
            match (el.remove(k), default) {
                (Some(v), _) => Ok(v),
                (None, Some(d)) => Ok(ElementSpec::Expr(d)),
                (None, None) => Err(CaseError::Syntax { line: eq[0].line, message: format!("element {k} missing") }),
            }
        };
        spec.equation = Some(EquationSpec {
            f: take("f", None)?,
            g: take("g", Some(Expr::int(1)))?,
            h: take("h", None)?,
            a: take("A", None)?,
            b: take("B", None)?,
        });
    }
    for e in get("relations") {
        let target = match parse_expr_in(&e.key, &scope).map_err(|x| expr_err(e.line, x))? {
            Expr::Func { name, formal, derivs, args: None } => FuncAtom {
                name,
                formal: formal.into(),
                derivs,
                args: None,
            },
            _ => {
                return Err(CaseError::Syntax { line: e.line, message: "relation target must be a function atom".into() })
            }
        };
        let replacement = parse_expr_in(&e.value, &scope).map_err(|x| expr_err(e.line, x))?;
        spec.relations.push(RelationSpec { target, replacement });
    }
    for e in get("symmetries") {
        let f = parse_field(&e.value, &scope).map_err(|x| expr_err(e.line, x))?;
        spec.symmetries.push((e.key.clone(), f));
    }
    let names: BTreeSet<String> = spec.symmetries.iter().map(|(n, _)| n.clone()).collect();
    for e in get("expected") {
        if e.key == "dimension" {
            let d = e.value.trim().parse().map_err(|_| CaseError::Syntax {
                line: e.line,
                message: "dimension must be a non-negative integer".into(),
            })?;
            spec.expected.dimension = Some(d);
        } else if let Some(rest) = e.key.strip_prefix("bracket.") {
            let Some((a, b)) = rest.split_once('.') else {
                return Err(CaseError::Syntax { line: e.line, message: "expected bracket.Qi.Qj".into() });
            };
            for q in [a, b] {
                if !names.contains(q) {
                    return Err(CaseError::UndeclaredSymbol { line: e.line, name: q.to_string() });
                }
            }
            let mut sc = scope.clone();
            sc.params.extend(names.iter().cloned());
            let v = parse_expr_in(&e.value, &sc).map_err(|x| expr_err(e.line, x))?;
            spec.expected.brackets.push((a.to_string(), b.to_string(), v));
        } else {
            return Err(CaseError::Syntax { line: e.line, message: format!("unknown expectation '{}'", e.key) });
        }
    }
    let m = get("map");
    if !m.is_empty() {
        let mut parts: BTreeMap<&str, Expr> = BTreeMap::new();
        for e in m {
            if !["T", "X", "U"].contains(&e.key.as_str()) {
                return Err(CaseError::Syntax { line: e.line, message: format!("unknown map component '{}'", e.key) });
            }
            parts.insert(e.key.as_str(), parse_expr_in(&e.value, &scope).map_err(|x| expr_err(e.line, x))?);
        }
        let mut comp = |k: &str, v: Var| parts.remove(k).unwrap_or(Expr::Var(v));
        spec.map = Some(MapSpec { t: comp("T", Var::T), x: comp("X", Var::X), u: comp("U", Var::U) });
    }
    Ok(spec)
}

fn is_ident(s: &str) -> bool {
    let mut c = s.chars();
    c.next().is_some_and(|f| f.is_alphabetic()) && c.all(|d| d.is_alphanumeric() || d == '_')
}

/// Parse a constraint such as `p != 0 and q in {1, 2}`.
pub fn parse_cond(text: &str, scope: &Scope) -> Result<Cond, ParseError> {
    let toks = lex(text)?;
    let mut ors: Vec<Cond> = Vec::new();
    let mut ands: Vec<Cond> = Vec::new();
    let mut i = 0;
    let is_word = |t: &Token, w: &str| matches!(&t.tok, Tok::Ident(s) if s == w);
    loop {
        let start = i;
        let mut depth = 0i32;
        while i < toks.len() {
            match &toks[i].tok {
                Tok::LParen | Tok::LBrace => depth += 1,
                Tok::RParen | Tok::RBrace => depth -= 1,
                _ => {}
            }
            if depth == 0 && (is_word(&toks[i], "and") || is_word(&toks[i], "or")) {
                break;
            }
            i += 1;
        }
        ands.push(atom_cond(text, &toks[start..i], scope)?);
        if i == toks.len() {
            break;
        }
        if is_word(&toks[i], "or") {
            ors.push(group(std::mem::take(&mut ands), Cond::And));
        }
        i += 1;
    }
    ors.push(group(ands, Cond::And));
    Ok(group(ors, Cond::Or))
}

fn group(mut v: Vec<Cond>, f: fn(Vec<Cond>) -> Cond) -> Cond {
    if v.len() == 1 {
        v.pop().unwrap()
    } else {
        f(v)
    }
}

fn slice_text<'a>(text: &'a str, toks: &[Token]) -> (&'a str, usize) {
    let s = toks[0].span.start;
    let e = toks.last().unwrap().span.end;
    (&text[s..e], s)
}

fn shift(mut e: ParseError, by: usize) -> ParseError {
    e.span = e.span.start + by..e.span.end + by;
    e
}

fn atom_cond(text: &str, toks: &[Token], scope: &Scope) -> Result<Cond, ParseError> {
    let end = toks.last().map_or(text.len(), |t| t.span.end);
    if toks.is_empty() {
        return Err(ParseError { span: end..end, expected: vec!["expression".into()], message: "empty condition".into() });
    }
    let sub = |ts: &[Token]| -> Result<Expr, ParseError> {
        if ts.is_empty() {
            return Err(ParseError { span: end..end, expected: vec!["expression".into()], message: "missing operand".into() });
        }
        let (s, off) = slice_text(text, ts);
        parse_expr_in(s, scope).map_err(|e| shift(e, off))
    };
    for (i, t) in toks.iter().enumerate() {
        match &t.tok {
            Tok::Rel(r) => {
                let op = match *r {
                    "==" => RelOp::Eq,
                    "!=" => RelOp::Ne,
                    ">=" => RelOp::Ge,
                    "<=" => RelOp::Le,
                    ">" => RelOp::Gt,
                    _ => RelOp::Lt,
                };
                return Ok(Cond::Rel(sub(&toks[..i])?, op, sub(&toks[i + 1..])?));
            }
            Tok::Ident(w) if w == "in" || w == "not" => {
                let negated = w == "not";
                let mut j = i + 1;
                if negated {
                    if !toks.get(j).is_some_and(|t| matches!(&t.tok, Tok::Ident(s) if s == "in")) {
                        return Err(ParseError { span: t.span.clone(), expected: vec!["in".into()], message: "expected 'in'".into() });
                    }
                    j += 1;
                }
                let lhs = sub(&toks[..i])?;
                if !toks.get(j).is_some_and(|t| t.tok == Tok::LBrace) || toks.last().unwrap().tok != Tok::RBrace {
                    return Err(ParseError { span: t.span.clone(), expected: vec!["{".into()], message: "expected a set".into() });
                }
                let inner = &toks[j + 1..toks.len() - 1];
                let mut items = Vec::new();
                let mut k0 = 0;
                let mut depth = 0;
                for (k, t) in inner.iter().enumerate() {
                    match t.tok {
                        Tok::LParen => depth += 1,
                        Tok::RParen => depth -= 1,
                        Tok::Comma if depth == 0 => {
                            items.push(sub(&inner[k0..k])?);
                            k0 = k + 1;
                        }
                        _ => {}
                    }
                }
                items.push(sub(&inner[k0..])?);
                return Ok(if negated { Cond::NotIn(lhs, items) } else { Cond::In(lhs, items) });
            }
            _ => {}
        }
    }
    Err(ParseError {
        span: toks[0].span.start..end,
        expected: vec!["==".into(), "!=".into(), "<".into(), ">".into(), "in".into()],
        message: "condition without a relation".into(),
    })
}

/// Canonical coefficients of a combination of named basis elements.
pub fn combination(e: &Expr, names: &[String]) -> Result<Vec<Q>, String> {
    let c: Canon = normalize(e).map_err(|e| e.to_string())?;
    let mut out = Vec::new();
    let mut rest = c.clone();
    for n in names {
        let k = rest_coeff(&c, n)?;
        rest = rest.sub(&Canon::param(n).scale(&k));
        out.push(k);
    }
    if !rest.is_zero() {
        return Err(format!("'{rest}' is not a combination of basis elements"));
    }
    Ok(out)
}

fn rest_coeff(c: &Canon, n: &str) -> Result<Q, String> {
    let d = c.subst_param(n, &Canon::one()).map_err(|e| e.to_string())?.sub(
        &c.subst_param(n, &Canon::zero()).map_err(|e| e.to_string())?,
    );
    d.as_q().ok_or_else(|| format!("non-rational coefficient of {n}"))
}
