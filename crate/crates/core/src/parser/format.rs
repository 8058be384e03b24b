//! Plain-text rendering.

use std::collections::BTreeMap;

use num_traits::{One, Signed};

use crate::expr::{normalize, Atom, Canon, Expr, Mono, Pw, Var, Q};

/// Deterministic rendering of a normal form; parameter coefficients of a
/// common monomial are grouped, constants come last.
pub fn format_canon(c: &Canon) -> String {
    if c.is_zero() {
        return "0".into();
    }
    let mut groups: BTreeMap<Mono, Canon> = BTreeMap::new();
    for (m, k) in c.terms() {
        let mut rest = m.clone();
        let mut pm = Mono::one();
        rest.f.retain(|a, p| {
            if matches!(a, Atom::Param(_)) {
                pm.f.insert(a.clone(), p.clone());
                false
            } else {
                true
            }
        });
        let coef = Canon::q(k.clone()).mul(&mono_canon(pm));
        let g = groups.entry(rest).or_insert_with(Canon::zero);
        *g = g.add(&coef);
    }
    let mut pieces: Vec<(bool, String)> = Vec::new();
    let mut constant = Vec::new();
    for (rest, coef) in &groups {
        let target = if rest.is_one() { &mut constant } else { &mut pieces };
        if coef.len() == 1 || rest.is_one() {
            for (pm, k) in coef.terms() {
                let mut m = rest.clone();
                m.f.extend(pm.f.iter().map(|(a, p)| (a.clone(), p.clone())));
                target.push((k.is_negative(), product(&k.abs(), &m)));
            }
        } else {
            let body = product(&Q::one(), rest);
            target.push((false, format!("({})*{}", format_canon(coef), body)));
        }
    }
    pieces.extend(constant);
    let mut s = String::new();
    for (i, (neg, body)) in pieces.iter().enumerate() {
        match (i, neg) {
            (0, true) => s.push('-'),
            (0, false) => {}
            (_, true) => s.push_str(" - "),
            (_, false) => s.push_str(" + "),
        }
        s.push_str(body);
    }
    s
}

fn mono_canon(m: Mono) -> Canon {
    let mut c = Canon::one();
    for (a, p) in m.f {
        c = c.mul_mono_pw(&a, &p);
    }
    c
}

fn product(k: &Q, m: &Mono) -> String {
    let mut parts = Vec::new();
    if !k.is_one() || m.is_one() {
        parts.push(k.to_string());
    }
    for (a, p) in &m.f {
        parts.push(format!("{}{}", atom(a), power(p)));
    }
    if let Some(e) = &m.e {
        parts.push(format!("exp({})", format_canon(e)));
    }
    parts.join("*")
}

fn power(p: &Pw) -> String {
    match p {
        Pw::R(r) if r.is_one() => String::new(),
        Pw::R(r) if r.is_integer() && r.is_positive() => format!("^{r}"),
        Pw::R(r) => format!("^({r})"),
        Pw::S(c) => match c.as_atom() {
            Some(Atom::Param(n)) if c.single().is_some_and(|(_, k)| k.is_one()) => format!("^{n}"),
            _ => format!("^({})", format_canon(c)),
        },
    }
}

fn atom(a: &Atom) -> String {
    match a {
        Atom::Var(v) => v.name(),
        Atom::Param(p) => p.to_string(),
        Atom::Num(n) => n.to_string(),
        Atom::Func(f) => {
            let head = format!("{}{}", f.name, f.suffix());
            match &f.args {
                None => head,
                Some(args) => {
                    let a: Vec<String> = args.iter().map(format_canon).collect();
                    format!("{head}({})", a.join(", "))
                }
            }
        }
        Atom::Ln(y) => format!("ln({})", format_canon(y)),
        Atom::Abs(y) => format!("abs({})", format_canon(y)),
        Atom::Sign(y) => format!("sign({})", format_canon(y)),
        Atom::Base(y) => format!("({})", format_canon(y)),
        Atom::Int(i) => {
            let body = format_canon(&i.integrand);
            match (i.var, i.arg.as_var() == Some(i.var)) {
                (Var::X, true) => format!("Int({body})"),
                (Var::X, false) => format!("Int({body}, {})", format_canon(&i.arg)),
                (v, _) => format!("Int({body}, {}, {})", format_canon(&i.arg), v.name()),
            }
        }
    }
}

/// Render a tree; normal-form rendering when the tree normalizes.
pub fn format_expr(e: &Expr) -> String {
    match normalize(e) {
        Ok(c) => format_canon(&c),
        Err(_) => tree(e, 0),
    }
}

const SUM: u8 = 1;
const PROD: u8 = 2;
const NEG: u8 = 3;
const POW: u8 = 4;

fn wrap(s: String, own: u8, ctx: u8) -> String {
    if own < ctx {
        format!("({s})")
    } else {
        s
    }
}

fn tree(e: &Expr, ctx: u8) -> String {
    match e {
        Expr::Rational(q) => {
            let own = if q.is_negative() {
                NEG
            } else if q.is_integer() {
                POW + 1
            } else {
                PROD
            };
            wrap(q.to_string(), own, ctx)
        }
        Expr::Param(p) => p.to_string(),
        Expr::Var(v) => v.name(),
        Expr::Func { name, formal, derivs, args } => {
            let mut suffix = String::new();
            for (i, &d) in derivs.iter().enumerate() {
                for _ in 0..d {
                    suffix.push(formal[i].letter());
                }
            }
            let head = if suffix.is_empty() { name.to_string() } else { format!("{name}_{suffix}") };
            match args {
                None => head,
                Some(a) => format!("{head}({})", a.iter().map(|x| tree(x, 0)).collect::<Vec<_>>().join(", ")),
            }
        }
        Expr::Sum(v) => {
            let s = v.iter().map(|x| tree(x, SUM + 1)).collect::<Vec<_>>().join(" + ");
            wrap(s, SUM, ctx)
        }
        Expr::Product(v) => {
            let s = v
                .iter()
                .enumerate()
                .map(|(i, x)| tree(x, if i == 0 { NEG } else { PROD + 1 }))
                .collect::<Vec<_>>()
                .join("*");
            wrap(s, PROD, ctx)
        }
        Expr::Pow(b, p) => wrap(format!("{}^{}", tree(b, POW + 1), tree(p, POW + 1)), POW, ctx),
        Expr::Exp(a) => format!("exp({})", tree(a, 0)),
        Expr::Ln(a) => format!("ln({})", tree(a, 0)),
        Expr::Abs(a) => format!("abs({})", tree(a, 0)),
        Expr::Sign(a) => format!("sign({})", tree(a, 0)),
        Expr::Int { integrand, var, arg } => {
            let body = tree(integrand, 0);
            match (var, arg) {
                (Var::X, None) => format!("Int({body})"),
                (Var::X, Some(a)) => format!("Int({body}, {})", tree(a, 0)),
                (v, a) => format!(
                    "Int({body}, {}, {})",
                    a.as_ref().map_or(v.name(), |a| tree(a, 0)),
                    v.name()
                ),
            }
        }
    }
}
