//! Simultaneous substitution and the generic atom rewriter behind it.

use std::collections::{BTreeMap, HashMap};

use super::*;

/// Bottom-up rewriting of atoms; `hook` gets the first chance at every atom
/// and the default descent rebuilds the atom through the normalizing
/// constructors.
pub(crate) trait Rewriter {
    fn hook(&mut self, a: &Atom, bound: &mut Vec<Var>) -> Option<Result<Canon>>;

    /// Variables the hook can touch; `None` means it may touch anything.
    fn relevant(&self) -> Option<u64> {
        None
    }

    fn memo(&mut self) -> &mut HashMap<Atom, Canon>;

    fn go(&mut self, c: &Canon, bound: &mut Vec<Var>) -> Result<Canon> {
        if let Some(r) = self.relevant() {
            if c.mask & r == 0 {
                return Ok(c.clone());
            }
        }
        let mut out = Canon::zero();
        for (m, k) in c.terms() {
            let mut fixed = Mono::one();
            let mut moved = Canon::q(k.clone());
            for (a, p) in &m.f {
                let p2 = match p {
                    Pw::R(_) => p.clone(),
                    Pw::S(s) => Pw::from_canon(&self.go(s, bound)?)?,
                };
                let r = self.atom(a, bound)?;
                if r.as_atom() == Some(a) {
                    fixed.f.insert(a.clone(), p2);
                } else {
                    moved = moved.mul(&r.pow_pw(&p2)?);
                }
            }
            if let Some(e) = &m.e {
                let e2 = self.go(e, bound)?;
                if e2 == *e {
                    fixed.e = Some(e2);
                } else {
                    moved = moved.mul(&e2.exp()?);
                }
            }
            out = out.add(&moved.mul(&arith::mono_term(Q::one(), fixed)));
        }
        Ok(out)
    }

    fn atom(&mut self, a: &Atom, bound: &mut Vec<Var>) -> Result<Canon> {
        if let Some(r) = self.hook(a, bound) {
            return r;
        }
        if let Some(rel) = self.relevant() {
            if a.mask() & rel == 0 {
                return Ok(Canon::atom(a.clone()));
            }
        }
        let use_memo = bound.is_empty();
        if use_memo {
            if let Some(c) = self.memo().get(a) {
                return Ok(c.clone());
            }
        }
        let r = self.rebuild(a, bound)?;
        if use_memo {
            self.memo().insert(a.clone(), r.clone());
        }
        Ok(r)
    }

    fn rebuild(&mut self, a: &Atom, bound: &mut Vec<Var>) -> Result<Canon> {
        Ok(match a {
            Atom::Var(_) | Atom::Param(_) | Atom::Num(_) => Canon::atom(a.clone()),
            Atom::Func(fa) => {
                let args: Vec<Canon> = match &fa.args {
                    Some(args) => {
                        let mut v = Vec::with_capacity(args.len());
                        for c in args {
                            v.push(self.go(c, bound)?);
                        }
                        v
                    }
                    None => {
                        let mut v = Vec::with_capacity(fa.formal.len());
                        for x in fa.formal.iter() {
                            v.push(self.atom(&Atom::Var(*x), bound)?);
                        }
                        v
                    }
                };
                Canon::func(with_args(fa, args))
            }
            Atom::Ln(y) => self.go(y, bound)?.ln()?,
            Atom::Abs(y) => self.go(y, bound)?.abs()?,
            Atom::Sign(y) => self.go(y, bound)?.sign()?,
            Atom::Base(p) => self.go(p, bound)?,
            Atom::Int(i) => {
                bound.push(i.var);
                let integrand = self.go(&i.integrand, bound);
                bound.pop();
                let integrand = integrand?;
                let arg = self.go(&i.arg, bound)?;
                Canon::integral(&integrand, i.var, &arg)?
            }
        })
    }
}

/// Attach arguments, dropping them when they are the formal variables.
pub(crate) fn with_args(fa: &FuncAtom, args: Vec<Canon>) -> FuncAtom {
    let identity = args.len() == fa.formal.len()
        && args.iter().zip(fa.formal.iter()).all(|(c, v)| c.as_var() == Some(*v));
    FuncAtom {
        name: fa.name.clone(),
        formal: fa.formal.clone(),
        derivs: fa.derivs.clone(),
        args: if identity { None } else { Some(args) },
    }
}

/// A concrete function standing in for an opaque one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FuncBinding {
    pub formal: Vec<Var>,
    pub body: Canon,
}

/// Images for a simultaneous substitution.
#[derive(Clone, Debug, Default)]
pub struct Bindings {
    pub vars: BTreeMap<Var, Canon>,
    pub params: BTreeMap<Sym, Canon>,
    pub funcs: BTreeMap<Sym, FuncBinding>,
    pub atoms: BTreeMap<Atom, Canon>,
}

impl Bindings {
    pub fn new() -> Bindings {
        Bindings::default()
    }

    pub fn var(mut self, v: Var, c: Canon) -> Bindings {
        self.vars.insert(v, c);
        self
    }

    pub fn param(mut self, p: &str, c: Canon) -> Bindings {
        self.params.insert(sym(p), c);
        self
    }

    pub fn func(mut self, name: &str, formal: &[Var], body: Canon) -> Bindings {
        self.funcs.insert(sym(name), FuncBinding { formal: formal.to_vec(), body });
        self
    }

    pub fn atom(mut self, a: Atom, c: Canon) -> Bindings {
        self.atoms.insert(a, c);
        self
    }

    pub fn is_empty(&self) -> bool {
        self.vars.is_empty() && self.params.is_empty() && self.funcs.is_empty() && self.atoms.is_empty()
    }
}

struct SubstR<'a> {
    b: &'a Bindings,
    memo: HashMap<Atom, Canon>,
    relevant: Option<u64>,
}

impl Rewriter for SubstR<'_> {
    fn relevant(&self) -> Option<u64> {
        self.relevant
    }

    fn memo(&mut self) -> &mut HashMap<Atom, Canon> {
        &mut self.memo
    }

    fn hook(&mut self, a: &Atom, bound: &mut Vec<Var>) -> Option<Result<Canon>> {
        if let Some(c) = self.b.atoms.get(a) {
            return Some(Ok(c.clone()));
        }
        match a {
            Atom::Var(v) if !bound.contains(v) => self.b.vars.get(v).cloned().map(Ok),
            Atom::Param(s) => self.b.params.get(s).cloned().map(Ok),
            Atom::Func(fa) => {
                if let Some(fb) = self.b.funcs.get(&fa.name) {
                    return Some(self.apply_func(fa, fb, bound));
                }
                if fa.derivs.iter().any(|&d| d > 0) {
                    let bare = Atom::func(FuncAtom { derivs: vec![0; fa.derivs.len()], ..(**fa).clone() });
                    if self.b.atoms.contains_key(&bare) {
                        return Some(Err(ExprError::IncompleteBinding(format!(
                            "{}{} has no image",
                            fa.name,
                            fa.suffix()
                        ))));
                    }
                }
                None
            }
            _ => None,
        }
    }
}

impl SubstR<'_> {
    fn apply_func(&mut self, fa: &FuncAtom, fb: &FuncBinding, bound: &mut Vec<Var>) -> Result<Canon> {
        if fb.formal.len() != fa.formal.len() {
            return Err(ExprError::IncompleteBinding(format!("arity mismatch for {}", fa.name)));
        }
        let mut body = fb.body.clone();
        for (i, &d) in fa.derivs.iter().enumerate() {
            for _ in 0..d {
                body = body.diff(fb.formal[i]);
            }
        }
        let mut args = Vec::new();
        match &fa.args {
            Some(a) => {
                for c in a {
                    args.push(self.go(c, bound)?);
                }
            }
            None => {
                for v in fa.formal.iter() {
                    args.push(self.atom(&Atom::Var(*v), bound)?);
                }
            }
        }
        let mut inner = Bindings { params: self.b.params.clone(), ..Bindings::default() };
        for (v, c) in fb.formal.iter().zip(args) {
            inner.vars.insert(*v, c);
        }
        body.subst(&inner)
    }
}

impl Canon {
    pub fn subst(&self, b: &Bindings) -> Result<Canon> {
        if b.is_empty() {
            return Ok(self.clone());
        }
        let relevant = if b.params.is_empty() && b.funcs.is_empty() && b.atoms.is_empty() {
            Some(b.vars.keys().fold(0, |m, v| m | v.bit()))
        } else {
            None
        };
        let mut r = SubstR { b, memo: HashMap::new(), relevant };
        r.go(self, &mut Vec::new())
    }

    pub fn subst_var(&self, v: Var, c: &Canon) -> Result<Canon> {
        self.subst(&Bindings::new().var(v, c.clone()))
    }

    pub fn subst_vars(&self, pairs: &[(Var, Canon)]) -> Result<Canon> {
        let mut b = Bindings::new();
        for (v, c) in pairs {
            b.vars.insert(*v, c.clone());
        }
        self.subst(&b)
    }

    pub fn subst_param(&self, p: &str, c: &Canon) -> Result<Canon> {
        self.subst(&Bindings::new().param(p, c.clone()))
    }

    /// Replace whole atoms (matched structurally) simultaneously.
    pub fn subst_atoms(&self, map: &BTreeMap<Atom, Canon>) -> Result<Canon> {
        let b = Bindings { atoms: map.clone(), ..Bindings::default() };
        self.subst(&b)
    }
}
