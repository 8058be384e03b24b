//! Ring operations, powers, and the elementary functions exp, ln, abs, sign.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::number::{content, factor, floor, modulo, pow_int, qi};
use super::*;

pub(crate) fn acc(map: &mut BTreeMap<Mono, Q>, m: Mono, c: Q) {
    if c.is_zero() {
        return;
    }
    use std::collections::btree_map::Entry;
    match map.entry(m) {
        Entry::Vacant(v) => {
            v.insert(c);
        }
        Entry::Occupied(mut o) => {
            *o.get_mut() += c;
            if o.get().is_zero() {
                o.remove();
            }
        }
    }
}

fn acc_canon(map: &mut BTreeMap<Mono, Q>, c: &Canon, k: &Q) {
    for (m, q) in c.terms() {
        acc(map, m.clone(), q * k);
    }
}

fn needs_fixup(a: &Atom, p: &Pw) -> bool {
    match (a, p) {
        (Atom::Num(_), Pw::R(r)) => r.is_negative() || *r >= Q::one(),
        (Atom::Num(_), Pw::S(c)) => {
            let k = c.const_term();
            k.is_negative() || k >= Q::one()
        }
        (Atom::Sign(_), Pw::R(r)) => r.is_negative() || *r >= qi(2),
        (Atom::Base(_), Pw::R(r)) => *r >= Q::one(),
        (Atom::Abs(_), Pw::R(r)) => r.abs() >= qi(2),
        _ => false,
    }
}

/// Build `c * m`, applying the canonical exponent rules.
pub(crate) fn mono_term(mut c: Q, mut m: Mono) -> Canon {
    if c.is_zero() {
        return Canon::zero();
    }
    m.f.retain(|_, p| !p.is_zero());
    if let Some(e) = &m.e {
        if e.is_zero() {
            m.e = None;
        }
    }
    if !m.f.iter().any(|(a, p)| needs_fixup(a, p)) {
        return Canon::mono(c, m);
    }
    let mut extra: Vec<(Canon, BigInt)> = Vec::new();
    let mut even: Vec<(Canon, i64)> = Vec::new();
    let keys: Vec<Atom> = m.f.keys().cloned().collect();
    for a in keys {
        let p = m.f.get(&a).unwrap().clone();
        if !needs_fixup(&a, &p) {
            continue;
        }
        match (&a, &p) {
            (Atom::Num(n), _) => {
                let (k, rest) = p.split_const();
                let fl = floor(&k);
                c *= pow_int(&qi(*n as i64), &fl);
                let newk = k - Q::from_integer(fl);
                let np = match rest {
                    None => Pw::R(newk),
                    Some(r) => Pw::from_canon(&r.add(&Canon::q(newk))).unwrap(),
                };
                if np.is_zero() {
                    m.f.remove(&a);
                } else {
                    m.f.insert(a.clone(), np);
                }
            }
            (Atom::Sign(_), Pw::R(r)) => {
                let r2 = modulo(r, 2);
                if r2.is_zero() {
                    m.f.remove(&a);
                } else {
                    m.f.insert(a.clone(), Pw::R(r2));
                }
            }
            (Atom::Base(poly), Pw::R(r)) => {
                let fl = floor(r);
                let rest = r - Q::from_integer(fl.clone());
                extra.push((poly.clone(), fl));
                if rest.is_zero() {
                    m.f.remove(&a);
                } else {
                    m.f.insert(a.clone(), Pw::R(rest));
                }
            }
            (Atom::Abs(y), Pw::R(r)) => {
                let e: BigInt = (r / qi(2)).to_integer() * BigInt::from(2);
                let rest = r - Q::from_integer(e.clone());
                even.push((y.clone(), e.to_i64().expect("exponent too large")));
                if rest.is_zero() {
                    m.f.remove(&a);
                } else {
                    m.f.insert(a.clone(), Pw::R(rest));
                }
            }
            _ => {}
        }
    }
    let mut out = Canon::mono(c, m);
    for (y, e) in even {
        out = out.mul(&y.powi(e).expect("nonzero absolute value argument"));
    }
    for (poly, n) in extra {
        let n = n.to_i64().expect("exponent too large");
        out = out.mul(&poly.powi_nonneg(n as u64));
    }
    out
}

fn mul_mono(a: &Mono, b: &Mono) -> Mono {
    let mut f = a.f.clone();
    for (k, p) in &b.f {
        match f.get_mut(k) {
            Some(q) => {
                *q = q.add(p);
            }
            None => {
                f.insert(k.clone(), p.clone());
            }
        }
    }
    let e = match (&a.e, &b.e) {
        (None, None) => None,
        (Some(x), None) | (None, Some(x)) => Some(x.clone()),
        (Some(x), Some(y)) => Some(x.add(y)),
    };
    Mono { f, e }
}

fn pow_mono(m: &Mono, p: &Pw) -> Mono {
    let f = m.f.iter().map(|(a, q)| (a.clone(), q.mul(p))).collect();
    let e = m.e.as_ref().map(|e| e.mul(&p.to_canon()));
    Mono { f, e }
}

/// Rational number raised to an exponent.
pub(crate) fn qpow(c: &Q, p: &Pw) -> Result<Canon> {
    if c.is_zero() {
        return match p {
            Pw::R(r) if r.is_positive() => Ok(Canon::zero()),
            _ => Err(ExprError::DivisionByZero),
        };
    }
    if c.is_one() {
        return Ok(Canon::one());
    }
    if let Pw::R(r) = p {
        if r.is_integer() {
            return Ok(Canon::q(pow_int(c, &r.to_integer())));
        }
    }
    if c.is_negative() {
        return unsupported(format!("non-integer power of negative constant {c}"));
    }
    let mut m = Mono::one();
    let mut add = |n: &BigInt, sgn: i64| -> Result<()> {
        let fs = factor(n).ok_or_else(|| {
            ExprError::UnsupportedConstruct(format!("cannot factor {n}"))
        })?;
        for (pr, k) in fs {
            let e = p.mul(&Pw::R(qi(sgn * k as i64)));
            let a = Atom::Num(pr);
            let cur = m.f.remove(&a);
            let ne = match cur {
                Some(x) => x.add(&e),
                None => e,
            };
            m.f.insert(a, ne);
        }
        Ok(())
    };
    add(c.numer(), 1)?;
    add(c.denom(), -1)?;
    Ok(mono_term(Q::one(), m))
}

/// Decomposition `s = c * m * P` of a sum into positive content `c`, common
/// monomial `m` and a remaining polynomial `P` with trivial content.
pub(crate) fn factor_sum(s: &Canon) -> (Q, Mono, Canon) {
    let c = content(s.terms().map(|(_, q)| q));
    let mut g = Mono::one();
    let terms: Vec<(&Mono, &Q)> = s.terms().collect();
    let mut atoms: Vec<&Atom> = Vec::new();
    for (m, _) in &terms {
        for a in m.f.keys() {
            if !atoms.contains(&a) {
                atoms.push(a);
            }
        }
    }
    let zero = Pw::R(Q::zero());
    for a in atoms {
        let exps: Vec<&Pw> = terms.iter().map(|(m, _)| m.f.get(a).unwrap_or(&zero)).collect();
        let base = exps[0];
        let mut diffs = Vec::new();
        let mut ok = true;
        for e in &exps {
            let d = e.add(&base.neg());
            match d {
                Pw::R(q) => diffs.push(q),
                Pw::S(_) => {
                    ok = false;
                    break;
                }
            }
        }
        if !ok {
            continue;
        }
        let mn = diffs.iter().min().unwrap().clone();
        let ge = base.add(&Pw::R(mn));
        if !ge.is_zero() {
            g.f.insert(a.clone(), ge);
        }
    }
    if terms.iter().all(|(m, _)| m.e.is_some()) {
        let e0 = terms[0].0.e.as_ref().unwrap();
        if terms.iter().all(|(m, _)| m.e.as_ref().unwrap().sub(e0).is_const()) {
            g.e = Some(e0.clone());
        }
    }
    if g.is_one() && c.is_one() {
        return (c, g, s.clone());
    }
    let inv = mono_term(c.recip(), pow_mono(&g, &Pw::R(-Q::one())));
    let p = s.mul(&inv);
    (c, g, p)
}

impl Canon {
    pub fn add(&self, o: &Canon) -> Canon {
        if o.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return o.clone();
        }
        let (big, small) = if self.len() >= o.len() { (self, o) } else { (o, self) };
        let mut t = (*big.t).clone();
        acc_canon(&mut t, small, &Q::one());
        Canon::from_map(t)
    }

    pub fn sub(&self, o: &Canon) -> Canon {
        if o.is_zero() {
            return self.clone();
        }
        let mut t = (*self.t).clone();
        acc_canon(&mut t, o, &-Q::one());
        Canon::from_map(t)
    }

    pub fn neg(&self) -> Canon {
        self.scale(&-Q::one())
    }

    pub fn scale(&self, k: &Q) -> Canon {
        if k.is_zero() {
            return Canon::zero();
        }
        if k.is_one() {
            return self.clone();
        }
        let t = self.t.iter().map(|(m, c)| (m.clone(), c * k)).collect();
        Canon::from_map(t)
    }

    pub fn mul(&self, o: &Canon) -> Canon {
        if self.is_zero() || o.is_zero() {
            return Canon::zero();
        }
        if let Some(k) = self.as_q() {
            return o.scale(&k);
        }
        if let Some(k) = o.as_q() {
            return self.scale(&k);
        }
        let mut t = BTreeMap::new();
        for (ma, ca) in self.terms() {
            for (mb, cb) in o.terms() {
                let m = mul_mono(ma, mb);
                let c = ca * cb;
                if m.f.iter().any(|(a, p)| needs_fixup(a, p) || p.is_zero())
                    || m.e.as_ref().is_some_and(|e| e.is_zero())
                {
                    let r = mono_term(c, m);
                    acc_canon(&mut t, &r, &Q::one());
                } else {
                    acc(&mut t, m, c);
                }
            }
        }
        Canon::from_map(t)
    }

    pub fn mul_mono_pw(&self, a: &Atom, p: &Pw) -> Canon {
        self.mul(&mono_term(Q::one(), Mono::atom(a.clone(), p.clone())))
    }

    pub(crate) fn powi_nonneg(&self, n: u64) -> Canon {
        let mut r = Canon::one();
        let mut b = self.clone();
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                r = r.mul(&b);
            }
            n >>= 1;
            if n > 0 {
                b = b.mul(&b);
            }
        }
        r
    }

    pub fn powi(&self, n: i64) -> Result<Canon> {
        if n >= 0 {
            Ok(self.powi_nonneg(n as u64))
        } else {
            self.pow_pw(&Pw::R(qi(n)))
        }
    }

    pub fn pow(&self, e: &Canon) -> Result<Canon> {
        self.pow_pw(&Pw::from_canon(e)?)
    }

    pub fn pow_pw(&self, p: &Pw) -> Result<Canon> {
        if let Pw::R(r) = p {
            if r.is_zero() {
                return Ok(Canon::one());
            }
            if r.is_integer() && !r.is_negative() {
                return Ok(self.powi_nonneg(r.to_integer().to_u64().expect("exponent too large")));
            }
        }
        if self.is_zero() {
            return match p {
                Pw::R(r) if r.is_positive() => Ok(Canon::zero()),
                _ => Err(ExprError::DivisionByZero),
            };
        }
        if let Some((m, c)) = self.single() {
            let k = qpow(c, p)?;
            return Ok(k.mul(&mono_term(Q::one(), pow_mono(m, p))));
        }
        let (c, g, mut poly) = factor_sum(self);
        let mut c = Canon::q(c);
        if poly.len() == 1 {
            return Ok(c.pow_pw(p)?.mul(&mono_term(Q::one(), pow_mono(&g, p))).mul(&poly.pow_pw(p)?));
        }
        if p.is_integer() && poly.leading_negative() {
            poly = poly.neg();
            c = c.neg();
        }
        let base = mono_term(Q::one(), Mono::atom(Atom::Base(poly), p.clone()));
        Ok(c.pow_pw(p)?.mul(&mono_term(Q::one(), pow_mono(&g, p))).mul(&base))
    }

    pub(crate) fn leading_negative(&self) -> bool {
        self.t.iter().next_back().is_some_and(|(_, c)| c.is_negative())
    }

    pub fn recip(&self) -> Result<Canon> {
        self.pow_pw(&Pw::R(-Q::one()))
    }

    pub fn div(&self, o: &Canon) -> Result<Canon> {
        Ok(self.mul(&o.recip()?))
    }

    pub fn exp(&self) -> Result<Canon> {
        let mut rest = BTreeMap::new();
        let mut out = Canon::one();
        for (m, c) in self.terms() {
            if let Some((y, k)) = log_part(m, c) {
                out = out.mul(&y.pow(&k)?);
            } else {
                acc(&mut rest, m.clone(), c.clone());
            }
        }
        let rest = Canon::from_map(rest);
        if rest.is_zero() {
            return Ok(out);
        }
        Ok(out.mul(&Canon::mono(Q::one(), Mono { f: BTreeMap::new(), e: Some(rest) })))
    }

    pub fn ln(&self) -> Result<Canon> {
        if self.is_zero() {
            return unsupported("ln(0)");
        }
        if let Some((m, c)) = self.single() {
            let mut out = ln_q(c)?;
            for (a, p) in &m.f {
                out = out.add(&ln_atom(a)?.mul(&p.to_canon()));
            }
            if let Some(e) = &m.e {
                out = out.add(e);
            }
            return Ok(out);
        }
        let (c, g, poly) = factor_sum(self);
        let mut out = ln_q(&c)?;
        out = out.add(&Canon::mono(Q::one(), g).ln()?);
        if poly.len() == 1 {
            return Ok(out.add(&poly.ln()?));
        }
        Ok(out.add(&Canon::atom(Atom::Ln(poly))))
    }

    pub fn abs(&self) -> Result<Canon> {
        if self.is_zero() {
            return Ok(Canon::zero());
        }
        if let Some((m, c)) = self.single() {
            let mut out = Canon::q(c.abs());
            for (a, p) in &m.f {
                let base = match a {
                    Atom::Num(_) | Atom::Abs(_) => Canon::atom(a.clone()),
                    Atom::Sign(_) => Canon::one(),
                    Atom::Base(poly) => {
                        if p.is_integer() {
                            let mut poly = poly.clone();
                            if poly.leading_negative() {
                                poly = poly.neg();
                            }
                            Canon::atom(Atom::Abs(poly))
                        } else {
                            Canon::atom(a.clone())
                        }
                    }
                    _ => Canon::atom(Atom::Abs(Canon::atom(a.clone()))),
                };
                out = out.mul(&base.pow_pw(p)?);
            }
            if let Some(e) = &m.e {
                out = out.mul(&Canon::mono(Q::one(), Mono { f: BTreeMap::new(), e: Some(e.clone()) }));
            }
            return Ok(out);
        }
        let (c, g, mut poly) = factor_sum(self);
        let out = Canon::q(c).mul(&Canon::mono(Q::one(), g).abs()?);
        if poly.len() == 1 {
            return Ok(out.mul(&poly.abs()?));
        }
        if poly.leading_negative() {
            poly = poly.neg();
        }
        Ok(out.mul(&Canon::atom(Atom::Abs(poly))))
    }

    pub fn sign(&self) -> Result<Canon> {
        if self.is_zero() {
            return Ok(Canon::zero());
        }
        if let Some((m, c)) = self.single() {
            let mut out = Canon::int(if c.is_negative() { -1 } else { 1 });
            for (a, p) in &m.f {
                let s = match a {
                    Atom::Num(_) | Atom::Abs(_) => continue,
                    Atom::Sign(_) => Canon::atom(a.clone()),
                    Atom::Base(poly) => {
                        if !p.is_integer() {
                            continue;
                        }
                        let mut poly = poly.clone();
                        let mut k = 1;
                        if poly.leading_negative() {
                            poly = poly.neg();
                            k = -1;
                        }
                        Canon::atom(Atom::Sign(poly)).scale(&qi(k))
                    }
                    _ => Canon::atom(Atom::Sign(Canon::atom(a.clone()))),
                };
                out = out.mul(&s.pow_pw(p)?);
            }
            return Ok(out);
        }
        let (_, g, mut poly) = factor_sum(self);
        let mut out = Canon::mono(Q::one(), g).sign()?;
        if poly.len() == 1 {
            return Ok(out.mul(&poly.sign()?));
        }
        if poly.leading_negative() {
            poly = poly.neg();
            out = out.neg();
        }
        Ok(out.mul(&Canon::atom(Atom::Sign(poly))))
    }
}

/// `c * m` of the form `k * ln(y)` with `k` a parameter polynomial.
fn log_part(m: &Mono, c: &Q) -> Option<(Canon, Canon)> {
    if m.e.is_some() {
        return None;
    }
    let mut y = None;
    let mut k = Canon::q(c.clone());
    for (a, p) in &m.f {
        match a {
            Atom::Ln(arg) if *p == Pw::one() && y.is_none() => y = Some(arg.clone()),
            Atom::Param(_) => match p {
                Pw::R(r) if r.is_integer() && !r.is_negative() => {
                    k = k.mul(&Canon::atom(a.clone()).powi_nonneg(r.to_integer().to_u64()?));
                }
                _ => return None,
            },
            _ => return None,
        }
    }
    y.map(|y| (y, k))
}

fn ln_q(c: &Q) -> Result<Canon> {
    if !c.is_positive() {
        return unsupported(format!("ln of non-positive constant {c}"));
    }
    let mut out = Canon::zero();
    for (n, s) in [(c.numer(), 1i64), (c.denom(), -1)] {
        let fs = factor(n).ok_or_else(|| ExprError::UnsupportedConstruct(format!("cannot factor {n}")))?;
        for (p, k) in fs {
            out = out.add(&Canon::atom(Atom::Ln(Canon::atom(Atom::Num(p)))).scale(&qi(s * k as i64)));
        }
    }
    Ok(out)
}

fn ln_atom(a: &Atom) -> Result<Canon> {
    match a {
        Atom::Sign(_) => unsupported("ln of a sign"),
        Atom::Base(poly) => Ok(Canon::atom(Atom::Ln(poly.clone()))),
        _ => Ok(Canon::atom(Atom::Ln(Canon::atom(a.clone())))),
    }
}
