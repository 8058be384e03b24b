//! Equivalence transformations, point transformations of the jet space and
//! push-forward of vector fields.

use std::fmt;

use num_traits::One;
use thiserror::Error;

use crate::equation::{DCEquation, EquationError};
use crate::expr::{zero_test, Atom, Canon, Chart, ExprError, Mono, Pw, SideRelation, Var, Verdict, Q};
use crate::jet::{total_derivative, JetError};
use crate::symmetry::{on_manifold, SymmetryReport, VectorField};
use crate::Outcome;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TransformError {
    #[error("x-map {0} has no closed-form inverse")]
    NonInvertibleX(String),
    #[error("no closed-form inverse for {0}")]
    NonInvertible(String),
    #[error("not projectible: {0}")]
    NotProjectible(String),
    #[error("u-map is not linear in u: {0}")]
    NotLinearInU(String),
    #[error("degenerate transformation: {0}")]
    Degenerate(String),
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error(transparent)]
    Jet(#[from] JetError),
    #[error(transparent)]
    Equation(#[from] EquationError),
}

type Result<T> = std::result::Result<T, TransformError>;

fn var(v: Var) -> Canon {
    Canon::var(v)
}

/// Element of the extended equivalence group.  `x` is the new `x` as a
/// function of the old one.
#[derive(Clone, Debug, PartialEq)]
pub struct EquivTransformation {
    pub delta: [Canon; 4],
    pub eps: [Canon; 4],
    pub x: Canon,
}

impl EquivTransformation {
    pub fn new(delta: [Canon; 4], eps: [Canon; 4], x: Canon) -> Result<EquivTransformation> {
        let t = EquivTransformation { delta, eps, x };
        let prod = t.delta[0].mul(&t.delta[2]).mul(&t.eps[0]).mul(&t.eps[1]).mul(&t.eps[2]);
        if zero_test(&prod, &[], Chart::Positive).verdict == Verdict::Zero {
            return Err(TransformError::Degenerate("delta1 delta3 eps1 eps2 eps3 = 0".into()));
        }
        if t.x.mask() & !Var::X.bit() != 0 {
            return Err(TransformError::NotProjectible(format!("X = {} must depend on x only", t.x)));
        }
        if zero_test(&t.x.diff(Var::X), &[], Chart::Positive).verdict == Verdict::Zero {
            return Err(TransformError::Degenerate(format!("X = {} has X_x = 0", t.x)));
        }
        Ok(t)
    }

    pub fn identity() -> EquivTransformation {
        EquivTransformation {
            delta: [Canon::one(), Canon::zero(), Canon::one(), Canon::zero()],
            eps: [Canon::one(), Canon::one(), Canon::one(), Canon::zero()],
            x: var(Var::X),
        }
    }

    /// Gauge transformation: variables fixed, elements rescaled.
    pub fn gauge(eps: [Canon; 4]) -> Result<EquivTransformation> {
        let id = EquivTransformation::identity();
        EquivTransformation::new(id.delta, eps, id.x)
    }

    /// Factor-group representative `t~ = d1 t + d2`, `x~ = X(x)`.
    pub fn factor(d1: Canon, d2: Canon, x: Canon) -> Result<EquivTransformation> {
        let id = EquivTransformation::identity();
        EquivTransformation::new([d1, d2, Canon::one(), Canon::zero()], id.eps, x)
    }

    /// Transformation preserving `g = 1`, parameterized by `d[0..9]`; needs
    /// the equation's `h` because the new `x` depends on it.
    pub fn preserving_g1(d: &[Canon; 9], h: &Canon) -> Result<EquivTransformation> {
        let ih = Canon::integral(h, Var::X, &var(Var::X))?;
        let inner = d[7].mul(&ih).exp()?;
        let x = d[4].mul(&Canon::integral(&inner, Var::X, &var(Var::X))?).add(&d[5]);
        let eps = [d[8].clone(), d[4].mul(&d[8]), d[6].clone(), d[7].clone()];
        EquivTransformation::new([d[0].clone(), d[1].clone(), d[2].clone(), d[3].clone()], eps, x)
    }

    /// Transformation preserving `g = h`.
    pub fn preserving_gh(d: &[Canon; 9]) -> Result<EquivTransformation> {
        let x = d[4].mul(&var(Var::X)).add(&d[5]);
        let eps = [d[8].clone(), d[4].mul(&d[6]), d[6].clone(), d[7].neg()];
        EquivTransformation::new([d[0].clone(), d[1].clone(), d[2].clone(), d[3].clone()], eps, x)
    }

    /// `x~ = int h dx`, taking `g = 1` to `g = h`.
    pub fn bridge(h: &Canon) -> Result<EquivTransformation> {
        let id = EquivTransformation::identity();
        EquivTransformation::new(id.delta, id.eps, Canon::integral(h, Var::X, &var(Var::X))?)
    }

    /// `x~ = int dx/g`, taking any equation to `g = 1`.
    pub fn to_g1(g: &Canon) -> Result<EquivTransformation> {
        let id = EquivTransformation::identity();
        EquivTransformation::new(id.delta, id.eps, Canon::integral(&g.recip()?, Var::X, &var(Var::X))?)
    }

    pub fn is_gauge(&self) -> bool {
        self.delta[0].is_one() && self.delta[2].is_one() && self.delta[1].is_zero() && self.delta[3].is_zero()
            && self.x == var(Var::X)
    }

    /// `exp(-eps4 int h/g dx)` for the given equation.
    pub fn phi(&self, e: &DCEquation) -> Result<Canon> {
        if self.eps[3].is_zero() {
            return Ok(Canon::one());
        }
        let i = Canon::integral(&e.h.div(&e.g)?, Var::X, &var(Var::X))?;
        Ok(self.eps[3].mul(&i).neg().exp()?)
    }

    /// The induced map of `(t, x, u)`.
    pub fn point_part(&self) -> PointTransformation {
        PointTransformation::unchecked(
            self.delta[0].mul(&var(Var::T)).add(&self.delta[1]),
            self.x.clone(),
            self.delta[2].mul(&var(Var::U)).add(&self.delta[3]),
        )
    }
}

/// New elements; the result is expressed in the new variables.
pub fn act_equivalence(phi: &EquivTransformation, e: &DCEquation) -> Result<DCEquation> {
    let [d1, _, d3, d4] = &phi.delta;
    let [e1, e2, e3, e4] = &phi.eps;
    let ph = phi.phi(e)?;
    let xx = phi.x.diff(Var::X);
    let f = e1.mul(d1).mul(&ph).mul(&e.f).div(&xx)?;
    let g = e1.div(e2)?.mul(&xx).mul(&ph).mul(&e.g);
    let h = e1.div(e3)?.mul(&ph).mul(&e.h);
    let a = e2.mul(&e.a);
    let b = e3.mul(&e.b.add(&e4.mul(&e.a)));
    let (f, g, h) = if phi.x == var(Var::X) {
        (f, g, h)
    } else {
        let inv = solve_for(&phi.x, Var::X, var(Var::X)).ok_or_else(|| TransformError::NonInvertibleX(phi.x.to_string()))?;
        (f.subst_var(Var::X, &inv)?, g.subst_var(Var::X, &inv)?, h.subst_var(Var::X, &inv)?)
    };
    let (a, b) = if d3.is_one() && d4.is_zero() {
        (a, b)
    } else {
        let inv = var(Var::U).sub(d4).div(d3)?;
        (a.subst_var(Var::U, &inv)?, b.subst_var(Var::U, &inv)?)
    };
    Ok(DCEquation { f, g, h, a, b, relations: e.relations.clone(), chart: e.chart })
}

/// `t~ = T(t)`, `x~ = X(t,x)`, `u~ = U(t,x,u)`, new variables as functions
/// of the old ones.
#[derive(Clone, Debug, PartialEq)]
pub struct PointTransformation {
    pub t: Canon,
    pub x: Canon,
    pub u: Canon,
}

impl fmt::Display for PointTransformation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "t~ = {}, x~ = {}, u~ = {}", self.t, self.x, self.u)
    }
}

impl PointTransformation {
    /// Structurally validated constructor: projectible, linear in `u`,
    /// nondegenerate.  Sign and modulus atoms are resolved on `chart` first.
    pub fn new(t: Canon, x: Canon, u: Canon, chart: Chart) -> Result<PointTransformation> {
        let p = PointTransformation { t: t.resolve_chart(chart)?, x: x.resolve_chart(chart)?, u: u.resolve_chart(chart)? };
        if !p.t.diff(Var::X).is_zero() || !p.t.diff(Var::U).is_zero() {
            return Err(TransformError::NotProjectible(format!("T = {} must depend on t only", p.t)));
        }
        if !p.x.diff(Var::U).is_zero() {
            return Err(TransformError::NotProjectible(format!("X = {} depends on u", p.x)));
        }
        if !p.u.diff(Var::U).diff(Var::U).is_zero() {
            return Err(TransformError::NotLinearInU(p.u.to_string()));
        }
        for (name, d) in [("T_t", p.t.diff(Var::T)), ("X_x", p.x.diff(Var::X)), ("U_u", p.u.diff(Var::U))] {
            if zero_test(&d, &[], chart).verdict == Verdict::Zero {
                return Err(TransformError::Degenerate(format!("{name} = 0")));
            }
        }
        Ok(p)
    }

    /// No structural checks; for negative controls.
    pub fn unchecked(t: Canon, x: Canon, u: Canon) -> PointTransformation {
        PointTransformation { t, x, u }
    }

    pub fn identity() -> PointTransformation {
        PointTransformation::unchecked(var(Var::T), var(Var::X), var(Var::U))
    }

    pub fn u1(&self) -> Canon {
        self.u.diff(Var::U)
    }

    pub fn u0(&self) -> Canon {
        self.u.sub(&self.u1().mul(&var(Var::U)))
    }

    /// Express a function of the new variables (and new jets up to
    /// `u_xx`, `u_t`) in the old ones.
    pub fn pullback(&self, e: &Canon) -> Result<Canon> {
        let dx = |c: &Canon| total_derivative(c, Var::X);
        let xx = self.x.diff(Var::X);
        let ux = dx(&self.u)?.div(&xx)?;
        let uxx = dx(&ux)?.div(&xx)?;
        let ut = total_derivative(&self.u, Var::T)?.sub(&ux.mul(&self.x.diff(Var::T))).div(&self.t.diff(Var::T))?;
        for v in Var::from_mask(e.mask()) {
            if v.is_jet() && !matches!(v, Var::J(0, 0) | Var::J(1, 0) | Var::J(0, 1) | Var::J(0, 2)) {
                return Err(JetError::Overflow(v.name()).into());
            }
        }
        Ok(e.subst_vars(&[
            (Var::T, self.t.clone()),
            (Var::X, self.x.clone()),
            (Var::U, self.u.clone()),
            (Var::UT, ut),
            (Var::UX, ux),
            (Var::UXX, uxx),
        ])?)
    }

    /// Closed-form inverse on the positive branch.
    pub fn invert(&self) -> Result<PointTransformation> {
        let ni = || TransformError::NonInvertible(self.to_string());
        let tinv = solve_for(&self.t, Var::T, var(Var::T)).ok_or_else(ni)?;
        let xinv = solve_for(&self.x, Var::X, var(Var::X)).ok_or_else(ni)?.subst_var(Var::T, &tinv)?;
        let u1 = self.u1();
        if u1.depends_on(Var::U) {
            return Err(TransformError::NotLinearInU(self.u.to_string()));
        }
        let old = [(Var::T, tinv.clone()), (Var::X, xinv.clone())];
        let uinv = var(Var::U).sub(&self.u0().subst_vars(&old)?).div(&u1.subst_vars(&old)?)?;
        Ok(PointTransformation::unchecked(tinv, xinv, uinv))
    }

    /// `self` followed by `next`.
    pub fn then(&self, next: &PointTransformation) -> Result<PointTransformation> {
        let pairs = [(Var::T, self.t.clone()), (Var::X, self.x.clone()), (Var::U, self.u.clone())];
        Ok(PointTransformation::unchecked(
            next.t.subst_vars(&pairs)?,
            next.x.subst_vars(&pairs)?,
            next.u.subst_vars(&pairs)?,
        ))
    }

    /// Componentwise zero test of `self - other`.
    pub fn same_as(&self, other: &PointTransformation, chart: Chart) -> Verdict {
        zero_test(&self.t.sub(&other.t), &[], chart)
            .verdict
            .and(zero_test(&self.x.sub(&other.x), &[], chart).verdict)
            .and(zero_test(&self.u.sub(&other.u), &[], chart).verdict)
    }
}

/// `second` after `first`.
pub fn compose(first: &PointTransformation, second: &PointTransformation) -> Result<PointTransformation> {
    first.then(second)
}

pub fn invert(p: &PointTransformation) -> Result<PointTransformation> {
    p.invert()
}

/// Solve `e(v, ...) = y` for `v` by peeling invertible layers.
fn solve_for(e: &Canon, v: Var, y: Canon) -> Option<Canon> {
    let (mut e, mut y) = (e.clone(), y);
    for _ in 0..32 {
        if e.as_var() == Some(v) {
            return Some(y);
        }
        if !e.depends_on(v) {
            return None;
        }
        let d = e.diff(v);
        if !d.depends_on(v) {
            let c0 = e.subst_var(v, &Canon::zero()).ok()?;
            return y.sub(&c0).div(&d).ok();
        }
        let (dep, indep) = split_terms(&e, v);
        if !indep.is_zero() {
            y = y.sub(&indep);
            e = dep;
            continue;
        }
        let (m, k) = e.single()?;
        let mut rest = Canon::q(k.clone());
        let mut dep_f: Vec<(Atom, Pw)> = Vec::new();
        for (a, p) in &m.f {
            if a.mask() & v.bit() != 0 {
                dep_f.push((a.clone(), p.clone()));
            } else {
                rest = rest.mul(&Canon::atom(a.clone()).pow_pw(p).ok()?);
            }
        }
        let mut dep_e = None;
        if let Some(ex) = &m.e {
            let (d, i) = split_terms(ex, v);
            if !i.is_zero() {
                rest = rest.mul(&i.exp().ok()?);
            }
            if !d.is_zero() {
                dep_e = Some(d);
            }
        }
        if !rest.is_one() {
            y = y.div(&rest).ok()?;
            e = e.div(&rest).ok()?;
            continue;
        }
        match (dep_f.len(), dep_e) {
            (0, Some(d)) => {
                y = y.ln().ok()?;
                e = d;
            }
            (1, None) => {
                let (a, p) = dep_f.pop().unwrap();
                if p != Pw::one() {
                    let r = p.as_q()?;
                    y = y.pow_pw(&Pw::R(Q::one() / r)).ok()?;
                    e = Canon::atom(a);
                    continue;
                }
                match a {
                    Atom::Ln(g) => {
                        y = y.exp().ok()?;
                        e = g;
                    }
                    Atom::Abs(g) | Atom::Base(g) => e = g,
                    _ => return None,
                }
            }
            _ => return None,
        }
    }
    None
}

/// Terms depending on `v`, and the rest.
fn split_terms(e: &Canon, v: Var) -> (Canon, Canon) {
    let mut dep = Canon::zero();
    let mut indep = Canon::zero();
    for (m, k) in e.terms() {
        let t = mono_canon(m).scale(k);
        if m.mask() & v.bit() != 0 {
            dep = dep.add(&t);
        } else {
            indep = indep.add(&t);
        }
    }
    (dep, indep)
}

fn mono_canon(m: &Mono) -> Canon {
    let mut c = Canon::one();
    for (a, p) in &m.f {
        c = c.mul(&Canon::atom(a.clone()).pow_pw(p).expect("monomial factor"));
    }
    if let Some(e) = &m.e {
        c = c.mul(&e.exp().expect("monomial exponential"));
    }
    c
}

/// Result of `verify_maps`.
#[derive(Clone, Debug)]
pub struct MapReport {
    pub outcome: Outcome,
    /// `lambda` with `F2 o Psi = lambda F1`.
    pub multiplier: Option<Canon>,
    /// Normal form of `F2 o Psi - lambda F1`.
    pub residual: Canon,
    pub note: Option<String>,
}

fn joint_relations(e1: &DCEquation, e2: &DCEquation) -> Vec<SideRelation> {
    let mut rels = e1.relations.clone();
    for r in &e2.relations {
        if !rels.contains(r) {
            rels.push(r.clone());
        }
    }
    rels
}

/// Does `psi` take solutions of `e1` to solutions of `e2`?
pub fn verify_maps(psi: &PointTransformation, e1: &DCEquation, e2: &DCEquation) -> MapReport {
    let fail = |note: String| MapReport { outcome: Outcome::Inconclusive, multiplier: None, residual: Canon::zero(), note: Some(note) };
    let g = match psi.pullback(&e2.residual()) {
        Ok(g) => g,
        Err(err) => return fail(err.to_string()),
    };
    let lambda = match g.coeff(Var::UT, 1).map_err(TransformError::from).and_then(|c| Ok(c.div(&e1.f)?)) {
        Ok(l) => l,
        Err(err) => return fail(err.to_string()),
    };
    let rels = joint_relations(e1, e2);
    let diff = g.sub(&lambda.mul(&e1.residual()));
    let z = zero_test(&diff, &rels, e1.chart);
    let lz = zero_test(&lambda, &rels, e1.chart).verdict;
    let mut outcome = Outcome::from(z.verdict);
    let mut note = z.note;
    if lz == Verdict::Zero {
        outcome = Outcome::Fail;
        note = Some("multiplier vanishes".into());
    }
    MapReport { outcome, multiplier: Some(lambda), residual: z.residual, note }
}

/// Transformed equation: the raw residual in the new variables and, when
/// it has the class shape, the extracted elements.
#[derive(Clone, Debug)]
pub struct PointImage {
    pub residual: Canon,
    pub equation: Option<DCEquation>,
}

pub fn act_point(psi: &PointTransformation, e: &DCEquation) -> Result<PointImage> {
    let inv = psi.invert()?;
    let residual = inv.pullback(&e.residual())?;
    let equation = class_form(&residual, e)?;
    Ok(PointImage { residual, equation })
}

/// Split a product of functions of `x` and of `u`.
fn separate(c: &Canon) -> Option<(Canon, Canon)> {
    let xb = Var::X.bit();
    let ub = Var::U.bit();
    let mut parts = Vec::new();
    for (m, k) in c.terms() {
        let mut xp = Canon::q(k.clone());
        let mut up = Canon::one();
        for (a, p) in &m.f {
            let f = Canon::atom(a.clone()).pow_pw(p).ok()?;
            let mask = a.mask() | if let Pw::S(s) = p { s.mask() } else { 0 };
            if mask & ub == 0 {
                xp = xp.mul(&f);
            } else if mask & xb == 0 {
                up = up.mul(&f);
            } else {
                return None;
            }
        }
        if let Some(ex) = &m.e {
            let (du, dx) = split_terms(ex, Var::U);
            if du.mask() & xb != 0 {
                return None;
            }
            xp = xp.mul(&dx.exp().ok()?);
            up = up.mul(&du.exp().ok()?);
        }
        parts.push((xp, up));
    }
    let Some((x0, u0)) = parts.first().cloned() else { return Some((Canon::zero(), Canon::one())) };
    let ratio = |a: &Canon, b: &Canon| a.div(b).ok().filter(|r| r.is_const());
    if parts.iter().all(|(_, u)| ratio(u, &u0).is_some()) {
        let mut x = Canon::zero();
        for (xp, up) in &parts {
            x = x.add(&xp.mul(&ratio(up, &u0)?));
        }
        return Some((x, u0));
    }
    if parts.iter().all(|(x, _)| ratio(x, &x0).is_some()) {
        let mut u = Canon::zero();
        for (xp, up) in &parts {
            u = u.add(&up.mul(&ratio(xp, &x0)?));
        }
        return Some((x0, u));
    }
    None
}

/// Recover `(f, g, h, A, B)` from a residual up to a multiplier.
fn class_form(r: &Canon, like: &DCEquation) -> Result<Option<DCEquation>> {
    let jets = [Var::UT, Var::UX, Var::UXX];
    let Ok(split) = r.coeffs(&jets) else { return Ok(None) };
    let get = |k: [u32; 3]| split.get(&k.to_vec()).cloned().unwrap_or_else(Canon::zero);
    let allowed = [[1, 0, 0], [0, 0, 1], [0, 2, 0], [0, 1, 0]];
    if split.iter().any(|(k, c)| !allowed.iter().any(|a| a.as_slice() == k.as_slice()) && !c.is_zero()) {
        return Ok(None);
    }
    let ct = get([1, 0, 0]);
    if ct.is_zero() {
        return Ok(None);
    }
    let w = get([0, 0, 1]).neg().div(&ct)?;
    let q1 = get([0, 1, 0]).neg().div(&ct)?;
    let txu = Var::T.bit();
    if (w.mask() | q1.mask()) & txu != 0 {
        return Ok(None);
    }
    let Some((rx, a)) = separate(&w) else { return Ok(None) };
    let s = q1.sub(&rx.diff(Var::X).mul(&a));
    let mut alpha = Canon::zero();
    let mut rest = Canon::zero();
    for (m, k) in s.terms() {
        let t = mono_canon(m).scale(k);
        match t.div(&a) {
            Ok(q) if !q.depends_on(Var::U) => alpha = alpha.add(&q),
            _ => rest = rest.add(&t),
        }
    }
    let (beta, b) = if rest.is_zero() {
        (Canon::one(), Canon::zero())
    } else {
        match separate(&rest) {
            Some(p) => p,
            None => return Ok(None),
        }
    };
    let f = if alpha.is_zero() {
        Canon::one()
    } else {
        Canon::integral(&alpha.div(&rx)?, Var::X, &var(Var::X))?.exp()?
    };
    let e = DCEquation {
        g: rx.mul(&f),
        h: beta.mul(&f),
        f,
        a,
        b,
        relations: like.relations.clone(),
        chart: like.chart,
    };
    let check = e.residual().sub(&r.mul(&e.f).div(&ct)?);
    if zero_test(&check, &e.relations, e.chart).verdict != Verdict::Zero {
        return Ok(None);
    }
    Ok(Some(e))
}

/// `(Q T, Q X, Q U)` composed with the inverse map.
pub fn pushforward(psi: &PointTransformation, q: &VectorField) -> Result<VectorField> {
    let inv = psi.invert()?;
    let back = [(Var::T, inv.t.clone()), (Var::X, inv.x.clone()), (Var::U, inv.u.clone())];
    Ok(VectorField::new(
        q.apply(&psi.t).subst_vars(&back)?,
        q.apply(&psi.x).subst_vars(&back)?,
        q.apply(&psi.u).subst_vars(&back)?,
    ))
}

/// Invariance of `e2` under the push-forward of `q`, evaluated in the old
/// variables on solutions of `e1`; needs no inverse of `psi`.
pub fn transported_condition(psi: &PointTransformation, q: &VectorField, e1: &DCEquation, e2: &DCEquation) -> Result<Canon> {
    let xx = psi.x.diff(Var::X);
    let tt = psi.t.diff(Var::T);
    let dxn = |c: &Canon| -> Result<Canon> { Ok(total_derivative(c, Var::X)?.div(&xx)?) };
    let xt = psi.x.diff(Var::T);
    let dtn = |c: &Canon| -> Result<Canon> {
        Ok(total_derivative(c, Var::T)?.sub(&xt.mul(&dxn(c)?)).div(&tt)?)
    };
    let ut = dtn(&psi.u)?;
    let ux = dxn(&psi.u)?;
    let uxx = dxn(&ux)?;
    let utx = dxn(&ut)?;
    let tau = q.apply(&psi.t);
    let xi = q.apply(&psi.x);
    let eta = q.apply(&psi.u);
    let eta_t = dtn(&eta)?.sub(&ut.mul(&dtn(&tau)?)).sub(&ux.mul(&dtn(&xi)?));
    let eta_x = dxn(&eta)?.sub(&ut.mul(&dxn(&tau)?)).sub(&ux.mul(&dxn(&xi)?));
    let eta_xx = dxn(&eta_x)?.sub(&utx.mul(&dxn(&tau)?)).sub(&uxx.mul(&dxn(&xi)?));
    let f2 = e2.residual();
    let mut r = Canon::zero();
    for (v, c) in [
        (Var::T, &tau),
        (Var::X, &xi),
        (Var::U, &eta),
        (Var::UT, &eta_t),
        (Var::UX, &eta_x),
        (Var::UXX, &eta_xx),
    ] {
        let d = f2.diff(v);
        if !d.is_zero() {
            r = r.add(&psi.pullback(&d)?.mul(c));
        }
    }
    Ok(on_manifold(&r, &e1.rhs_solved()?).map_err(|e| TransformError::Degenerate(e.to_string()))?)
}

/// Symmetry transport check: explicit push-forward when the inverse is
/// available in closed form, the old-variable form otherwise.
pub fn transport_check(psi: &PointTransformation, q: &VectorField, e1: &DCEquation, e2: &DCEquation) -> SymmetryReport {
    if let Ok(qt) = pushforward(psi, q) {
        return crate::symmetry::check_symmetry(e2, &qt);
    }
    match transported_condition(psi, q, e1, e2) {
        Ok(r) => {
            let z = zero_test(&r, &joint_relations(e1, e2), e1.chart);
            SymmetryReport { outcome: Outcome::from(z.verdict), residual: z.residual, note: z.note }
        }
        Err(err) => SymmetryReport { outcome: Outcome::Inconclusive, residual: Canon::zero(), note: Some(err.to_string()) },
    }
}
