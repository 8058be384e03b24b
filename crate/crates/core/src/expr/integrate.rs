//! A small table-driven integrator backing antiderivative atoms.

use std::collections::BTreeMap;

use num_integer::Integer;
use num_traits::{One, Zero};

use super::arith::mono_term;
use super::*;

impl Canon {
    /// `F(arg)` with `F' = integrand` in `var`; closed form where the
    /// integrator succeeds, an antiderivative atom for the remainder.
    pub fn integral(integrand: &Canon, var: Var, arg: &Canon) -> Result<Canon> {
        if integrand.mask & !var.bit() != 0 {
            return unsupported("integrand depends on a second variable");
        }
        let (closed, rest) = integrate(integrand, var)?;
        let mut out = closed.subst_var(var, arg)?;
        if !rest.is_zero() {
            out = out.add(&Canon::atom(Atom::Int(Arc::new(IntegralAtom {
                integrand: rest,
                var,
                arg: arg.clone(),
            }))));
        }
        Ok(out)
    }

    /// Antiderivative in `x` evaluated at `x`.
    pub fn antiderivative(&self, var: Var) -> Result<Canon> {
        Canon::integral(self, var, &Canon::var(var))
    }
}

fn integrate(e: &Canon, v: Var) -> Result<(Canon, Canon)> {
    let mut closed = Canon::zero();
    let mut rest = BTreeMap::new();
    for (m, c) in e.terms() {
        match integrate_term(c, m, v)? {
            Some(f) => closed = closed.add(&f),
            None => arith::acc(&mut rest, m.clone(), c.clone()),
        }
    }
    Ok((closed, Canon::from_map(rest)))
}

fn integrate_term(c: &Q, m: &Mono, v: Var) -> Result<Option<Canon>> {
    let bit = v.bit();
    let mut indep = Mono::one();
    let mut dep: Vec<(Atom, Pw)> = Vec::new();
    for (a, p) in &m.f {
        if a.mask() & bit != 0 {
            dep.push((a.clone(), p.clone()));
        } else {
            indep.f.insert(a.clone(), p.clone());
        }
    }
    let mut dep_exp = None;
    match &m.e {
        Some(e) if e.depends_on(v) => dep_exp = Some(e.clone()),
        Some(e) => indep.e = Some(e.clone()),
        None => {}
    }
    let k = mono_term(c.clone(), indep);
    let x = Canon::var(v);
    let absx = Atom::Abs(x.clone());
    let xv = Atom::Var(v);

    if dep.is_empty() && dep_exp.is_none() {
        return Ok(Some(k.mul(&x)));
    }
    if dep_exp.is_none() && dep.iter().all(|(a, _)| *a == xv || *a == absx) {
        let pk = dep.iter().find(|(a, _)| *a == xv).map(|(_, p)| p.clone());
        let pa = dep.iter().find(|(a, _)| *a == absx).map(|(_, p)| p.clone());
        match (pk, pa) {
            (Some(n), None) => {
                if n == Pw::R(-Q::one()) {
                    return Ok(Some(k.mul(&x.abs()?.ln()?)));
                }
                let n1 = n.add(&Pw::one());
                return Ok(Some(k.mul(&x.pow_pw(&n1)?).mul(&n1.to_canon().recip()?)));
            }
            (kk, Some(n)) => {
                let kint = match &kk {
                    None => Some(num_bigint::BigInt::zero()),
                    Some(Pw::R(r)) if r.is_integer() => Some(r.to_integer()),
                    _ => None,
                };
                let Some(kint) = kint else { return Ok(None) };
                let s = n.add(&Pw::R(Q::from_integer(kint.clone())));
                let s1 = s.add(&Pw::one());
                let ax = Canon::atom(absx.clone());
                if kint.is_even() {
                    if s1.is_zero() {
                        return Ok(None);
                    }
                    let f = x.mul(&ax.pow_pw(&s)?).mul(&s1.to_canon().recip()?);
                    return Ok(Some(k.mul(&f)));
                }
                if s1.is_zero() {
                    return Ok(Some(k.mul(&ax.ln()?)));
                }
                let f = ax.pow_pw(&s1)?.mul(&s1.to_canon().recip()?);
                return Ok(Some(k.mul(&f)));
            }
            _ => {}
        }
    }
    if dep.is_empty() {
        if let Some(e) = &dep_exp {
            let a = e.diff(v);
            if !a.is_zero() && !a.depends_on(v) {
                return Ok(Some(k.mul(&e.exp()?).mul(&a.recip()?)));
            }
        }
    }
    // logarithmic derivative: y'/y times a constant
    for (i, (a, p)) in dep.iter().enumerate() {
        if *p != Pw::R(-Q::one()) {
            continue;
        }
        let y = match a {
            Atom::Base(poly) => poly.clone(),
            _ => Canon::atom(a.clone()),
        };
        let dy = y.diff(v);
        if dy.is_zero() {
            continue;
        }
        let mut others = Mono::one();
        for (j, (b, q)) in dep.iter().enumerate() {
            if j != i {
                others.f.insert(b.clone(), q.clone());
            }
        }
        others.e = dep_exp.clone();
        let ratio = match mono_term(Q::one(), others).div(&dy) {
            Ok(r) => r,
            Err(_) => continue,
        };
        if !ratio.depends_on(v) {
            return Ok(Some(k.mul(&ratio).mul(&y.abs()?.ln()?)));
        }
    }
    Ok(None)
}
