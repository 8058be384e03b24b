//! Partial derivatives and coefficient extraction.

use std::collections::BTreeMap;

use num_traits::{One, Signed, ToPrimitive, Zero};

use super::arith::mono_term;
use super::*;

fn atom_diff(a: &Atom, v: Var) -> Canon {
    match a {
        Atom::Var(w) => {
            if *w == v {
                Canon::one()
            } else {
                Canon::zero()
            }
        }
        Atom::Param(_) | Atom::Num(_) | Atom::Sign(_) => Canon::zero(),
        Atom::Func(fa) => match &fa.args {
            None => {
                let mut out = Canon::zero();
                for (i, w) in fa.formal.iter().enumerate() {
                    if *w == v {
                        let mut d = fa.derivs.clone();
                        d[i] += 1;
                        out = out.add(&Canon::func(fa.with_derivs(d)));
                    }
                }
                out
            }
            Some(args) => {
                let mut out = Canon::zero();
                for (i, c) in args.iter().enumerate() {
                    let dc = c.diff(v);
                    if dc.is_zero() {
                        continue;
                    }
                    let mut d = fa.derivs.clone();
                    d[i] += 1;
                    out = out.add(&Canon::func(fa.with_derivs(d)).mul(&dc));
                }
                out
            }
        },
        Atom::Ln(y) => {
            let dy = y.diff(v);
            if dy.is_zero() {
                return dy;
            }
            dy.mul(&y.recip().expect("ln argument is nonzero"))
        }
        Atom::Abs(y) => {
            let dy = y.diff(v);
            if dy.is_zero() {
                return dy;
            }
            dy.mul(&y.sign().expect("sign of normalized argument"))
        }
        Atom::Base(p) => p.diff(v),
        Atom::Int(i) => {
            let da = i.arg.diff(v);
            if da.is_zero() {
                return da;
            }
            i.integrand
                .subst_var(i.var, &i.arg)
                .expect("integrand substitution")
                .mul(&da)
        }
    }
}

impl Canon {
    pub fn diff(&self, v: Var) -> Canon {
        if self.mask & v.bit() == 0 {
            return Canon::zero();
        }
        let mut out = Canon::zero();
        for (m, c) in self.terms() {
            for (a, p) in &m.f {
                if a.mask() & v.bit() == 0 {
                    continue;
                }
                let da = atom_diff(a, v);
                if da.is_zero() {
                    continue;
                }
                let mut m2 = m.clone();
                m2.f.insert(a.clone(), p.add(&Pw::R(-Q::one())));
                let t = mono_term(c.clone(), m2).mul(&p.to_canon()).mul(&da);
                out = out.add(&t);
            }
            if let Some(e) = &m.e {
                let de = e.diff(v);
                if !de.is_zero() {
                    out = out.add(&mono_term(c.clone(), m.clone()).mul(&de));
                }
            }
        }
        out
    }

    pub fn diff_n(&self, v: Var, n: usize) -> Canon {
        let mut c = self.clone();
        for _ in 0..n {
            c = c.diff(v);
        }
        c
    }

    /// Group terms by the powers of `vars`, which must occur with
    /// non-negative integer exponents.
    pub fn coeffs(&self, vars: &[Var]) -> Result<BTreeMap<Vec<u32>, Canon>> {
        let mut out: BTreeMap<Vec<u32>, BTreeMap<Mono, Q>> = BTreeMap::new();
        for (m, c) in self.terms() {
            let mut key = Vec::with_capacity(vars.len());
            let mut rest = m.clone();
            for v in vars {
                let a = Atom::Var(*v);
                match rest.f.remove(&a) {
                    None => key.push(0),
                    Some(Pw::R(r)) if r.is_integer() && !r.is_negative() => {
                        key.push(r.to_integer().to_u32().unwrap())
                    }
                    Some(_) => return unsupported(format!("non-polynomial dependence on {}", v.name())),
                }
            }
            for a in rest.f.keys() {
                if vars.iter().any(|v| a.mask() & v.bit() != 0) {
                    return unsupported(format!("{} occurs inside an atom", vars[0].name()));
                }
            }
            if rest.e.as_ref().is_some_and(|e| vars.iter().any(|v| e.depends_on(*v))) {
                return unsupported("jet variable inside an exponential");
            }
            arith::acc(out.entry(key).or_default(), rest, c.clone());
        }
        Ok(out.into_iter().filter(|(_, t)| !t.is_empty()).map(|(k, t)| (k, Canon::from_map(t))).collect())
    }

    /// Coefficients with respect to the opaque function `name` and its
    /// derivatives, taken as independent atoms.
    pub fn split_func(&self, name: &str) -> Vec<Canon> {
        let mut out: BTreeMap<Mono, BTreeMap<Mono, Q>> = BTreeMap::new();
        for (m, c) in self.terms() {
            let (key, rest): (BTreeMap<Atom, Pw>, BTreeMap<Atom, Pw>) =
                m.f.clone().into_iter().partition(|(a, _)| matches!(a, Atom::Func(fa) if fa.name.as_ref() == name));
            let key = Mono { f: key, e: None };
            arith::acc(out.entry(key).or_default(), Mono { f: rest, e: m.e.clone() }, c.clone());
        }
        out.into_values().filter(|t| !t.is_empty()).map(Canon::from_map).collect()
    }

    /// Coefficient of `v^n` when the expression is polynomial in `v`.
    pub fn coeff(&self, v: Var, n: u32) -> Result<Canon> {
        Ok(self.coeffs(&[v])?.remove(&vec![n]).unwrap_or_else(Canon::zero))
    }

    pub fn is_one(&self) -> bool {
        self.as_q().is_some_and(|q| q.is_one())
    }

    pub fn is_const_zero(&self) -> bool {
        self.as_q().is_some_and(|q| q.is_zero())
    }
}
