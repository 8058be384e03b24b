//! Text syntax for expressions, vector fields and case files.

mod case;
mod format;
mod lexer;

use std::collections::{BTreeMap, BTreeSet};
use std::ops::Range;

use thiserror::Error;

use crate::expr::{sym, Expr, Var, MAX_JET};
use lexer::{lex, Tok, Token};

pub use case::{
    combination, params_of, parse_case_file, parse_cond, CaseError, CaseSpec, Cond, Constraint, ElementSpec,
    EquationSpec, ExpectedSpec,
    FieldSpec, MapSpec, RelOp, RelationSpec,
};
pub use format::{format_canon, format_expr};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{message} at {}..{}{}", span.start, span.end, expected_list(expected))]
pub struct ParseError {
    pub span: Range<usize>,
    pub expected: Vec<String>,
    pub message: String,
}

fn expected_list(e: &[String]) -> String {
    if e.is_empty() {
        String::new()
    } else {
        format!(" (expected one of: {})", e.join(" "))
    }
}

/// Which names resolve to what.
#[derive(Clone, Debug)]
pub struct Scope {
    pub params: BTreeSet<String>,
    pub funcs: BTreeMap<String, Vec<Var>>,
    /// Unknown identifiers become parameters.
    pub lenient: bool,
    /// `d_t`, `d_x`, `d_u` are accepted.
    pub field: bool,
}

impl Default for Scope {
    fn default() -> Scope {
        let mut funcs = BTreeMap::new();
        for n in ["f", "g", "h"] {
            funcs.insert(n.to_string(), vec![Var::X]);
        }
        for n in ["A", "B"] {
            funcs.insert(n.to_string(), vec![Var::U]);
        }
        Scope { params: BTreeSet::new(), funcs, lenient: true, field: false }
    }
}

impl Scope {
    /// Nothing declared and nothing implicit.
    pub fn strict() -> Scope {
        Scope { params: BTreeSet::new(), funcs: BTreeMap::new(), lenient: false, field: false }
    }

    pub fn with_param(mut self, p: &str) -> Scope {
        self.params.insert(p.to_string());
        self
    }

    pub fn with_func(mut self, name: &str, formal: &[Var]) -> Scope {
        self.funcs.insert(name.to_string(), formal.to_vec());
        self
    }
}

/// Node spans, shaped like the tree they describe.
#[derive(Clone, Debug, PartialEq)]
pub struct SpanTree {
    pub span: Range<usize>,
    pub children: Vec<SpanTree>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SourceExpr {
    pub text: String,
    pub expr: Expr,
    pub spans: SpanTree,
}

pub const FIELD_ATOMS: [&str; 3] = ["d_t", "d_x", "d_u"];

pub fn parse_expr(text: &str) -> Result<Expr, ParseError> {
    parse_expr_in(text, &Scope::default())
}

pub fn parse_expr_in(text: &str, scope: &Scope) -> Result<Expr, ParseError> {
    Ok(parse_source(text, scope)?.expr)
}

pub fn parse_source(text: &str, scope: &Scope) -> Result<SourceExpr, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser { toks, pos: 0, scope, len: text.len() };
    let (expr, spans) = p.expr()?;
    p.finish()?;
    Ok(SourceExpr { text: text.to_string(), expr, spans })
}

/// Parse a comma separated list of expressions.
pub fn parse_list(text: &str, scope: &Scope) -> Result<Vec<Expr>, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser { toks, pos: 0, scope, len: text.len() };
    let mut out = vec![p.expr()?.0];
    while p.eat(&Tok::Comma) {
        out.push(p.expr()?.0);
    }
    p.finish()?;
    Ok(out)
}

/// `a*d_t + b*d_x + c*d_u`, or a plain triple `a, b, c`.
pub fn parse_field(text: &str, scope: &Scope) -> Result<FieldSpec, ParseError> {
    let mut sc = scope.clone();
    sc.field = true;
    let toks = lex(text)?;
    let mut p = Parser { toks, pos: 0, scope: &sc, len: text.len() };
    let (first, spans) = p.expr()?;
    if p.eat(&Tok::Comma) {
        let (xi, _) = p.expr()?;
        p.expect(&Tok::Comma)?;
        let (eta, _) = p.expr()?;
        p.finish()?;
        for e in [&first, &xi, &eta] {
            if mentions_field(e) {
                return Err(p.error_at(0..text.len(), "d_t, d_x, d_u inside a triple"));
            }
        }
        return Ok(FieldSpec { tau: first, xi, eta });
    }
    p.finish()?;
    let [tau, xi, eta] = split_field(&first).map_err(|m| ParseError {
        span: spans.span.clone(),
        expected: vec![],
        message: m,
    })?;
    Ok(FieldSpec { tau, xi, eta })
}

fn mentions_field(e: &Expr) -> bool {
    match e {
        Expr::Param(p) => FIELD_ATOMS.contains(&&**p),
        Expr::Rational(_) | Expr::Var(_) => false,
        Expr::Func { args, .. } => args.iter().flatten().any(mentions_field),
        Expr::Sum(v) | Expr::Product(v) => v.iter().any(mentions_field),
        Expr::Pow(a, b) => mentions_field(a) || mentions_field(b),
        Expr::Exp(a) | Expr::Ln(a) | Expr::Abs(a) | Expr::Sign(a) => mentions_field(a),
        Expr::Int { integrand, arg, .. } => mentions_field(integrand) || arg.as_deref().is_some_and(mentions_field),
    }
}

/// Linear extraction of the coefficients of `d_t`, `d_x`, `d_u`.
fn split_field(e: &Expr) -> Result<[Expr; 3], String> {
    let zero = || Expr::int(0);
    match e {
        Expr::Param(p) if FIELD_ATOMS.contains(&&**p) => {
            let mut out = [zero(), zero(), zero()];
            let i = FIELD_ATOMS.iter().position(|a| *a == &**p).unwrap();
            out[i] = Expr::int(1);
            Ok(out)
        }
        Expr::Sum(v) => {
            let mut parts: [Vec<Expr>; 3] = Default::default();
            for t in v {
                let s = split_field(t)?;
                for (i, c) in s.into_iter().enumerate() {
                    if c != zero() {
                        parts[i].push(c);
                    }
                }
            }
            Ok(parts.map(|p| match p.len() {
                0 => zero(),
                1 => p.into_iter().next().unwrap(),
                _ => Expr::Sum(p),
            }))
        }
        Expr::Product(v) => {
            let idx: Vec<usize> = (0..v.len()).filter(|&i| mentions_field(&v[i])).collect();
            if idx.len() != 1 {
                return Err("each term needs exactly one of d_t, d_x, d_u".into());
            }
            let inner = split_field(&v[idx[0]])?;
            Ok(inner.map(|c| {
                if c == zero() {
                    return c;
                }
                let mut fs: Vec<Expr> = v.iter().enumerate().filter(|(i, _)| *i != idx[0]).map(|(_, f)| f.clone()).collect();
                fs.push(c);
                Expr::Product(fs)
            }))
        }
        _ if !mentions_field(e) => Err("term without d_t, d_x or d_u".into()),
        _ => Err("d_t, d_x, d_u may only appear linearly".into()),
    }
}

struct Parser<'a> {
    toks: Vec<Token>,
    pos: usize,
    scope: &'a Scope,
    len: usize,
}

const PRIMARY: [&str; 4] = ["number", "identifier", "(", "-"];

impl Parser<'_> {
    fn peek(&self) -> Option<&Token> {
        self.toks.get(self.pos)
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek().is_some_and(|k| k.tok == *t) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn here(&self) -> Range<usize> {
        match self.peek() {
            Some(t) => t.span.clone(),
            None => self.len..self.len,
        }
    }

    fn error_at(&self, span: Range<usize>, msg: &str) -> ParseError {
        ParseError { span, expected: vec![], message: msg.to_string() }
    }

    fn unexpected(&self, expected: &[&str]) -> ParseError {
        let found = match self.peek() {
            Some(t) => format!("unexpected '{}'", t.tok),
            None => "unexpected end of input".to_string(),
        };
        ParseError { span: self.here(), expected: expected.iter().map(|s| s.to_string()).collect(), message: found }
    }

    fn expect(&mut self, t: &Tok) -> Result<(), ParseError> {
        if self.eat(t) {
            Ok(())
        } else {
            Err(self.unexpected(&[&t.to_string()]))
        }
    }

    fn finish(&self) -> Result<(), ParseError> {
        if self.pos < self.toks.len() {
            return Err(self.unexpected(&["+", "-", "*", "/", "^", "end of input"]));
        }
        Ok(())
    }

    fn start(&self) -> usize {
        self.here().start
    }

    fn prev_end(&self) -> usize {
        if self.pos == 0 {
            0
        } else {
            self.toks[self.pos - 1].span.end
        }
    }

    fn expr(&mut self) -> Result<(Expr, SpanTree), ParseError> {
        let s = self.start();
        let (first, sp) = self.term()?;
        let mut terms = vec![first];
        let mut spans = vec![sp];
        loop {
            let neg = if self.eat(&Tok::Plus) {
                false
            } else if self.eat(&Tok::Minus) {
                true
            } else {
                break;
            };
            let (t, sp) = self.term()?;
            terms.push(if neg { Expr::neg(t) } else { t });
            spans.push(sp);
        }
        Ok(collapse(terms, spans, s, self.prev_end(), Expr::Sum))
    }

    fn term(&mut self) -> Result<(Expr, SpanTree), ParseError> {
        let s = self.start();
        let (first, sp) = self.unary()?;
        let mut fs = vec![first];
        let mut spans = vec![sp];
        loop {
            let div = if self.eat(&Tok::Star) {
                false
            } else if self.eat(&Tok::Slash) {
                true
            } else {
                if let Some(t) = self.peek() {
                    if matches!(t.tok, Tok::Num(_) | Tok::Ident(_) | Tok::LParen) {
                        return Err(ParseError {
                            span: t.span.clone(),
                            expected: vec!["*".into(), "/".into(), "+".into(), "-".into()],
                            message: "juxtaposition is not multiplication".into(),
                        });
                    }
                }
                break;
            };
            let (f, sp) = self.unary()?;
            fs.push(if div { Expr::recip(f) } else { f });
            spans.push(sp);
        }
        Ok(collapse(fs, spans, s, self.prev_end(), Expr::Product))
    }

    fn unary(&mut self) -> Result<(Expr, SpanTree), ParseError> {
        let s = self.start();
        if self.eat(&Tok::Minus) {
            let (e, sp) = self.unary()?;
            let e = match e {
                Expr::Rational(q) => Expr::Rational(-q),
                e => Expr::neg(e),
            };
            return Ok((e, SpanTree { span: s..self.prev_end(), children: vec![sp] }));
        }
        self.power()
    }

    fn power(&mut self) -> Result<(Expr, SpanTree), ParseError> {
        let s = self.start();
        let (b, bs) = self.primary()?;
        if self.eat(&Tok::Caret) {
            let (e, es) = self.unary()?;
            return Ok((Expr::Pow(Box::new(b), Box::new(e)), SpanTree { span: s..self.prev_end(), children: vec![bs, es] }));
        }
        Ok((b, bs))
    }

    fn args(&mut self) -> Result<(Vec<Expr>, Vec<SpanTree>), ParseError> {
        self.expect(&Tok::LParen)?;
        let mut es = Vec::new();
        let mut ss = Vec::new();
        loop {
            let (e, s) = self.expr()?;
            es.push(e);
            ss.push(s);
            if self.eat(&Tok::Comma) {
                continue;
            }
            if self.eat(&Tok::RParen) {
                return Ok((es, ss));
            }
            return Err(self.unexpected(&[",", ")"]));
        }
    }

    fn primary(&mut self) -> Result<(Expr, SpanTree), ParseError> {
        let Some(tok) = self.peek().cloned() else {
            return Err(self.unexpected(&PRIMARY));
        };
        let s = tok.span.start;
        match tok.tok {
            Tok::Num(q) => {
                self.pos += 1;
                Ok((Expr::Rational(q), SpanTree { span: tok.span, children: vec![] }))
            }
            Tok::LParen => {
                self.pos += 1;
                let (e, sp) = self.expr()?;
                self.expect(&Tok::RParen)?;
                Ok((e, SpanTree { span: s..self.prev_end(), children: vec![sp] }))
            }
            Tok::Ident(name) => {
                self.pos += 1;
                let called = self.peek().is_some_and(|t| t.tok == Tok::LParen);
                let leaf = |e: Expr| Ok((e, SpanTree { span: tok.span.clone(), children: vec![] }));
                if called {
                    if let Some(r) = self.builtin(&name, s)? {
                        return Ok(r);
                    }
                }
                if let Some(v) = variable(&name) {
                    return leaf(Expr::Var(v));
                }
                if FIELD_ATOMS.contains(&name.as_str()) {
                    if !self.scope.field {
                        return Err(self.error_at(tok.span, "d_t, d_x, d_u are only allowed in vector fields"));
                    }
                    return leaf(Expr::Param(sym(&name)));
                }
                if let Some((fname, formal, derivs)) = self.function(&name) {
                    let args = if called {
                        let (a, ss) = self.args()?;
                        if a.len() != formal.len() {
                            return Err(self.error_at(
                                s..self.prev_end(),
                                &format!("{fname} takes {} argument(s)", formal.len()),
                            ));
                        }
                        return Ok((
                            Expr::Func { name: sym(&fname), formal, derivs, args: Some(a) },
                            SpanTree { span: s..self.prev_end(), children: ss },
                        ));
                    } else {
                        None
                    };
                    return leaf(Expr::Func { name: sym(&fname), formal, derivs, args });
                }
                if called {
                    return Err(self.error_at(tok.span, &format!("unknown function '{name}'")));
                }
                if self.scope.params.contains(&name) || self.scope.lenient {
                    return leaf(Expr::Param(sym(&name)));
                }
                Err(ParseError {
                    span: tok.span,
                    expected: vec![],
                    message: format!("undeclared symbol '{name}'"),
                })
            }
            _ => Err(self.unexpected(&PRIMARY)),
        }
    }

    fn builtin(&mut self, name: &str, s: usize) -> Result<Option<(Expr, SpanTree)>, ParseError> {
        let unary = |f: fn(Box<Expr>) -> Expr| f;
        let ctor = match name {
            "exp" => unary(Expr::Exp),
            "ln" => unary(Expr::Ln),
            "abs" => unary(Expr::Abs),
            "sign" => unary(Expr::Sign),
            "Int" => {
                let (mut a, ss) = self.args()?;
                let span = SpanTree { span: s..self.prev_end(), children: ss };
                let var = if a.len() == 3 {
                    match a.pop().unwrap() {
                        Expr::Var(v) if !v.is_jet() => v,
                        _ => return Err(self.error_at(span.span, "third argument of Int must be t, x or u")),
                    }
                } else {
                    Var::X
                };
                if a.is_empty() || a.len() > 2 {
                    return Err(self.error_at(span.span, "Int takes one to three arguments"));
                }
                let arg = if a.len() == 2 { Some(Box::new(a.pop().unwrap())) } else { None };
                let integrand = Box::new(a.pop().unwrap());
                return Ok(Some((Expr::Int { integrand, var, arg }, span)));
            }
            _ => return Ok(None),
        };
        let (mut a, ss) = self.args()?;
        if a.len() != 1 {
            return Err(self.error_at(s..self.prev_end(), &format!("{name} takes one argument")));
        }
        Ok(Some((ctor(Box::new(a.pop().unwrap())), SpanTree { span: s..self.prev_end(), children: ss })))
    }

    /// A declared function, possibly with a derivative suffix.
    fn function(&self, name: &str) -> Option<(String, Vec<Var>, Vec<u8>)> {
        if let Some(formal) = self.scope.funcs.get(name) {
            return Some((name.to_string(), formal.clone(), vec![0; formal.len()]));
        }
        let (base, suffix) = name.rsplit_once('_')?;
        let formal = self.scope.funcs.get(base)?;
        let mut derivs = vec![0u8; formal.len()];
        if suffix.is_empty() {
            return None;
        }
        for c in suffix.chars() {
            let v = Var::from_letter(c)?;
            let i = formal.iter().position(|w| *w == v)?;
            derivs[i] += 1;
        }
        Some((base.to_string(), formal.clone(), derivs))
    }
}

fn collapse(
    mut items: Vec<Expr>,
    mut spans: Vec<SpanTree>,
    s: usize,
    e: usize,
    ctor: fn(Vec<Expr>) -> Expr,
) -> (Expr, SpanTree) {
    if items.len() == 1 {
        (items.pop().unwrap(), spans.pop().unwrap())
    } else {
        (ctor(items), SpanTree { span: s..e, children: spans })
    }
}

/// `t`, `x`, `u` and jet names such as `u_tx`.
pub fn variable(name: &str) -> Option<Var> {
    match name {
        "t" => return Some(Var::T),
        "x" => return Some(Var::X),
        "u" => return Some(Var::U),
        _ => {}
    }
    let rest = name.strip_prefix("u_")?;
    if rest.is_empty() {
        return None;
    }
    let (mut a, mut b) = (0u8, 0u8);
    for c in rest.chars() {
        match c {
            't' => a += 1,
            'x' => b += 1,
            _ => return None,
        }
    }
    (a < MAX_JET && b <= MAX_JET).then_some(Var::J(a, b))
}
