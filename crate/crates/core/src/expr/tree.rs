//! Plain expression trees and their normalization.

use num_traits::{One, Signed};

use super::*;

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Rational(Q),
    Param(Sym),
    Var(Var),
    Func {
        name: Sym,
        formal: Vec<Var>,
        derivs: Vec<u8>,
        args: Option<Vec<Expr>>,
    },
    Sum(Vec<Expr>),
    Product(Vec<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Exp(Box<Expr>),
    Ln(Box<Expr>),
    Abs(Box<Expr>),
    Sign(Box<Expr>),
    Int {
        integrand: Box<Expr>,
        var: Var,
        arg: Option<Box<Expr>>,
    },
}

impl Expr {
    pub fn int(n: i64) -> Expr {
        Expr::Rational(number::qi(n))
    }

    pub fn neg(e: Expr) -> Expr {
        Expr::Product(vec![Expr::int(-1), e])
    }

    pub fn recip(e: Expr) -> Expr {
        Expr::Pow(Box::new(e), Box::new(Expr::int(-1)))
    }

    pub fn normalize(&self) -> Result<Canon> {
        normalize(self)
    }

    pub fn diff(&self, v: Var) -> Result<Expr> {
        Ok(Expr::from_canon(&normalize(self)?.diff(v)))
    }

    pub fn substitute(&self, b: &Bindings) -> Result<Expr> {
        Ok(Expr::from_canon(&normalize(self)?.subst(b)?))
    }

    /// Tree form of a normalized expression.
    pub fn from_canon(c: &Canon) -> Expr {
        let mut terms = Vec::new();
        for (m, k) in c.terms() {
            let mut fs = Vec::new();
            if !k.is_one() || m.is_one() {
                fs.push(Expr::Rational(k.clone()));
            }
            for (a, p) in &m.f {
                let base = atom_expr(a);
                if *p == Pw::one() {
                    fs.push(base);
                } else {
                    fs.push(Expr::Pow(Box::new(base), Box::new(Expr::from_canon(&p.to_canon()))));
                }
            }
            if let Some(e) = &m.e {
                fs.push(Expr::Exp(Box::new(Expr::from_canon(e))));
            }
            terms.push(if fs.len() == 1 { fs.pop().unwrap() } else { Expr::Product(fs) });
        }
        match terms.len() {
            0 => Expr::int(0),
            1 => terms.pop().unwrap(),
            _ => Expr::Sum(terms),
        }
    }
}

fn atom_expr(a: &Atom) -> Expr {
    match a {
        Atom::Var(v) => Expr::Var(*v),
        Atom::Param(p) => Expr::Param(p.clone()),
        Atom::Num(n) => Expr::Rational(Q::from_integer((*n).into())),
        Atom::Func(f) => Expr::Func {
            name: f.name.clone(),
            formal: f.formal.to_vec(),
            derivs: f.derivs.clone(),
            args: f.args.as_ref().map(|a| a.iter().map(Expr::from_canon).collect()),
        },
        Atom::Ln(y) => Expr::Ln(Box::new(Expr::from_canon(y))),
        Atom::Abs(y) => Expr::Abs(Box::new(Expr::from_canon(y))),
        Atom::Sign(y) => Expr::Sign(Box::new(Expr::from_canon(y))),
        Atom::Base(p) => Expr::from_canon(p),
        Atom::Int(i) => Expr::Int {
            integrand: Box::new(Expr::from_canon(&i.integrand)),
            var: i.var,
            arg: if i.arg.as_var() == Some(i.var) { None } else { Some(Box::new(Expr::from_canon(&i.arg))) },
        },
    }
}

/// Normal form of a tree.
pub fn normalize(e: &Expr) -> Result<Canon> {
    Ok(match e {
        Expr::Rational(q) => Canon::q(q.clone()),
        Expr::Param(p) => Canon::atom(Atom::Param(p.clone())),
        Expr::Var(v) => Canon::var(*v),
        Expr::Func { name, formal, derivs, args } => {
            let fa = FuncAtom { name: name.clone(), formal: Arc::from(formal.as_slice()), derivs: derivs.clone(), args: None };
            match args {
                None => Canon::func(fa),
                Some(a) => {
                    if a.len() != formal.len() {
                        return unsupported(format!("{name} expects {} argument(s)", formal.len()));
                    }
                    let mut v = Vec::new();
                    for x in a {
                        v.push(normalize(x)?);
                    }
                    Canon::func(subst::with_args(&fa, v))
                }
            }
        }
        Expr::Sum(v) => {
            let mut out = Canon::zero();
            for x in v {
                out = out.add(&normalize(x)?);
            }
            out
        }
        Expr::Product(v) => {
            let mut out = Canon::one();
            for x in v {
                out = out.mul(&normalize(x)?);
            }
            out
        }
        Expr::Pow(b, p) => {
            let b = normalize(b)?;
            let p = normalize(p)?;
            if let Some(q) = p.as_q() {
                if q.is_negative() && b.is_zero() {
                    return Err(ExprError::DivisionByZero);
                }
            }
            b.pow(&p)?
        }
        Expr::Exp(a) => normalize(a)?.exp()?,
        Expr::Ln(a) => normalize(a)?.ln()?,
        Expr::Abs(a) => normalize(a)?.abs()?,
        Expr::Sign(a) => normalize(a)?.sign()?,
        Expr::Int { integrand, var, arg } => {
            let i = normalize(integrand)?;
            let a = match arg {
                Some(a) => normalize(a)?,
                None => Canon::var(*var),
            };
            Canon::integral(&i, *var, &a)?
        }
    })
}

