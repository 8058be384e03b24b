//! Vector fields, the invariance criterion, determining equations and
//! Lie brackets.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;
use thiserror::Error;

use crate::equation::DCEquation;
use crate::expr::{
    reduce_mod, sym, zero_test, Atom, Bindings, Canon, Chart, ExprError, FuncAtom, SideRelation, Var, Verdict, Q,
};
use crate::jet::{apply_prolonged, prolong, total_derivative_n, JetError};
use crate::linalg::{linear_equations, solve, Solution};
use crate::parser::{parse_field, ParseError, Scope};
use crate::Outcome;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SymmetryError {
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error(transparent)]
    Jet(#[from] JetError),
    #[error(transparent)]
    Equation(#[from] crate::equation::EquationError),
    #[error("field is not of the reduced shape: {0}")]
    NotReduced(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VectorField {
    pub tau: Canon,
    pub xi: Canon,
    pub eta: Canon,
}

impl VectorField {
    pub fn new(tau: Canon, xi: Canon, eta: Canon) -> VectorField {
        VectorField { tau, xi, eta }
    }

    pub fn zero() -> VectorField {
        VectorField::new(Canon::zero(), Canon::zero(), Canon::zero())
    }

    pub fn dt() -> VectorField {
        VectorField::new(Canon::one(), Canon::zero(), Canon::zero())
    }

    pub fn dx() -> VectorField {
        VectorField::new(Canon::zero(), Canon::one(), Canon::zero())
    }

    pub fn du() -> VectorField {
        VectorField::new(Canon::zero(), Canon::zero(), Canon::one())
    }

    /// Field sugar with the default scope, e.g. `2*t*d_t + x*d_x`.
    pub fn parse(text: &str) -> Result<VectorField, FieldParseError> {
        VectorField::parse_in(text, &Scope::default())
    }

    pub fn parse_in(text: &str, scope: &Scope) -> Result<VectorField, FieldParseError> {
        let f = parse_field(text, scope)?;
        Ok(VectorField::new(f.tau.normalize()?, f.xi.normalize()?, f.eta.normalize()?))
    }

    pub fn components(&self) -> [&Canon; 3] {
        [&self.tau, &self.xi, &self.eta]
    }

    pub fn map(&self, mut f: impl FnMut(&Canon) -> Result<Canon, ExprError>) -> Result<VectorField, ExprError> {
        Ok(VectorField::new(f(&self.tau)?, f(&self.xi)?, f(&self.eta)?))
    }

    /// `Q(e)` for a function of `(t, x, u)`.
    pub fn apply(&self, e: &Canon) -> Canon {
        self.tau.mul(&e.diff(Var::T)).add(&self.xi.mul(&e.diff(Var::X))).add(&self.eta.mul(&e.diff(Var::U)))
    }

    pub fn scale(&self, k: &Canon) -> VectorField {
        VectorField::new(self.tau.mul(k), self.xi.mul(k), self.eta.mul(k))
    }

    pub fn add(&self, o: &VectorField) -> VectorField {
        VectorField::new(self.tau.add(&o.tau), self.xi.add(&o.xi), self.eta.add(&o.eta))
    }

    pub fn sub(&self, o: &VectorField) -> VectorField {
        VectorField::new(self.tau.sub(&o.tau), self.xi.sub(&o.xi), self.eta.sub(&o.eta))
    }

    pub fn is_zero(&self) -> bool {
        self.components().iter().all(|c| c.is_zero())
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FieldParseError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Expr(#[from] ExprError),
}

impl fmt::Display for VectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (c, d) in self.components().into_iter().zip(["d_t", "d_x", "d_u"]) {
            if c.is_zero() {
                continue;
            }
            let s = c.to_string();
            parts.push(if c.is_one() {
                d.to_string()
            } else if c.len() == 1 {
                format!("{s}*{d}")
            } else {
                format!("({s})*{d}")
            });
        }
        if parts.is_empty() {
            return f.write_str("0");
        }
        f.write_str(&parts.join(" + "))
    }
}

/// Result of a symmetry check.
#[derive(Clone, Debug)]
pub struct SymmetryReport {
    pub outcome: Outcome,
    /// Normal form of the invariance condition on solutions.
    pub residual: Canon,
    pub note: Option<String>,
}

/// Replace every derivative containing `t` by its value on solutions.
pub fn on_manifold(e: &Canon, rhs: &Canon) -> Result<Canon, SymmetryError> {
    let mut e = e.clone();
    let mut memo: BTreeMap<Var, Canon> = BTreeMap::new();
    for _ in 0..16 {
        let vars: Vec<Var> = Var::from_mask(e.mask()).into_iter().filter(|v| matches!(v, Var::J(a, _) if *a > 0)).collect();
        if vars.is_empty() {
            return Ok(e);
        }
        let mut pairs = Vec::new();
        for v in vars {
            let Var::J(a, b) = v else { unreachable!() };
            if !memo.contains_key(&v) {
                memo.insert(v, total_derivative_n(rhs, a as usize - 1, b as usize)?);
            }
            pairs.push((v, memo[&v].clone()));
        }
        e = e.subst_vars(&pairs)?;
    }
    Err(JetError::Overflow("manifold substitution".into()).into())
}

/// `pr Q (F)` restricted to solutions of `E`.
pub fn invariance_condition(e: &DCEquation, q: &VectorField) -> Result<Canon, SymmetryError> {
    let r = apply_prolonged(&prolong(q), &e.residual())?;
    on_manifold(&r, &e.rhs_solved()?)
}

pub fn check_symmetry(e: &DCEquation, q: &VectorField) -> SymmetryReport {
    let r = match invariance_condition(e, q) {
        Ok(r) => r,
        Err(err) => {
            return SymmetryReport { outcome: Outcome::Inconclusive, residual: Canon::zero(), note: Some(err.to_string()) }
        }
    };
    let z = zero_test(&r, &e.relations, e.chart);
    SymmetryReport { outcome: Outcome::from(z.verdict), residual: z.residual, note: z.note }
}

pub fn kernel_check(e: &DCEquation) -> bool {
    check_symmetry(e, &VectorField::dt()).outcome == Outcome::Pass
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Ansatz {
    /// `tau(t,x,u)`, `xi(t,x,u)`, `eta(t,x,u)`.
    General,
    /// `tau(t)`, `xi(t,x)`, `eta1(t,x) u + eta0(t,x)`.
    Reduced,
}

impl std::str::FromStr for Ansatz {
    type Err = String;
    fn from_str(s: &str) -> Result<Ansatz, String> {
        match s {
            "general" => Ok(Ansatz::General),
            "reduced" => Ok(Ansatz::Reduced),
            _ => Err(format!("unknown ansatz '{s}'")),
        }
    }
}

fn unknown(name: &str, vars: &[Var]) -> Canon {
    Canon::func(FuncAtom::new(name, vars))
}

impl Ansatz {
    pub fn field(self) -> VectorField {
        let txu = [Var::T, Var::X, Var::U];
        match self {
            Ansatz::General => VectorField::new(unknown("tau", &txu), unknown("xi", &txu), unknown("eta", &txu)),
            Ansatz::Reduced => VectorField::new(
                unknown("tau", &[Var::T]),
                unknown("xi", &[Var::T, Var::X]),
                unknown("eta1", &[Var::T, Var::X]).mul(&Canon::var(Var::U)).add(&unknown("eta0", &[Var::T, Var::X])),
            ),
        }
    }

    /// Bindings of the unknown coefficients realizing `q`.
    pub fn bind(self, q: &VectorField) -> Result<Bindings, SymmetryError> {
        let txu = [Var::T, Var::X, Var::U];
        match self {
            Ansatz::General => Ok(Bindings::new()
                .func("tau", &txu, q.tau.clone())
                .func("xi", &txu, q.xi.clone())
                .func("eta", &txu, q.eta.clone())),
            Ansatz::Reduced => {
                let e1 = q.eta.diff(Var::U);
                let e0 = q.eta.sub(&e1.mul(&Canon::var(Var::U)));
                if q.tau.mask() & !Var::T.bit() != 0
                    || q.xi.mask() & Var::U.bit() != 0
                    || e1.mask() & Var::U.bit() != 0
                    || e0.mask() & Var::U.bit() != 0
                {
                    return Err(SymmetryError::NotReduced(q.to_string()));
                }
                Ok(Bindings::new()
                    .func("tau", &[Var::T], q.tau.clone())
                    .func("xi", &[Var::T, Var::X], q.xi.clone())
                    .func("eta1", &[Var::T, Var::X], e1)
                    .func("eta0", &[Var::T, Var::X], e0))
            }
        }
    }
}

/// One determining equation: the coefficient of a jet monomial.
#[derive(Clone, Debug)]
pub struct DeterminingEquation {
    /// Exponents of `u_x`, `u_xx`, `u_xxx`.
    pub monomial: [u32; 3],
    pub lhs: Canon,
}

impl DeterminingEquation {
    pub fn monomial_text(&self) -> String {
        let mut parts = Vec::new();
        for (v, &k) in [Var::UX, Var::UXX, Var::J(0, 3)].iter().zip(&self.monomial) {
            match k {
                0 => {}
                1 => parts.push(v.name()),
                _ => parts.push(format!("{}^{k}", v.name())),
            }
        }
        if parts.is_empty() {
            "1".into()
        } else {
            parts.join("*")
        }
    }
}

pub fn determining_system(e: &DCEquation, ansatz: Ansatz) -> Result<Vec<DeterminingEquation>, SymmetryError> {
    let r = invariance_condition(e, &ansatz.field())?;
    let r = reduce_mod(&r, &e.relations)?;
    let jets = [Var::UX, Var::UXX, Var::J(0, 3)];
    let split = r.coeffs(&jets)?;
    Ok(split
        .into_iter()
        .map(|(k, lhs)| DeterminingEquation { monomial: [k[0], k[1], k[2]], lhs })
        .collect())
}

/// `k` with `a = k b`, where `k` is a nonzero constant times a monomial in
/// the underived functions `factors`.
pub fn nonzero_multiple(a: &Canon, b: &Canon, factors: &[&str]) -> Option<Canon> {
    let (mb, qb) = b.terms().next()?;
    let lead = Canon::mono(qb.clone(), mb.clone());
    for (ma, qa) in a.terms() {
        let Ok(k) = Canon::mono(qa.clone(), ma.clone()).div(&lead) else { continue };
        let plain = k.len() == 1
            && k.terms().all(|(m, _)| {
                m.e.is_none()
                    && m.f.keys().all(|at| {
                        matches!(at, Atom::Func(fa)
                            if fa.order() == 0 && fa.args.is_none() && factors.contains(&fa.name.as_ref()))
                    })
            });
        if plain && zero_test(&a.sub(&k.mul(b)), &[], Chart::Positive).verdict == Verdict::Zero {
            return Some(k);
        }
    }
    None
}

/// Substitute `q` into a determining system and zero-test every member.
pub fn check_determining(
    e: &DCEquation,
    system: &[DeterminingEquation],
    ansatz: Ansatz,
    q: &VectorField,
) -> Result<Vec<Verdict>, SymmetryError> {
    let b = ansatz.bind(q)?;
    let mut out = Vec::new();
    for d in system {
        let s = d.lhs.subst(&b)?;
        out.push(zero_test(&s, &e.relations, e.chart).verdict);
    }
    Ok(out)
}

pub fn bracket(q1: &VectorField, q2: &VectorField) -> VectorField {
    VectorField::new(
        q1.apply(&q2.tau).sub(&q2.apply(&q1.tau)),
        q1.apply(&q2.xi).sub(&q2.apply(&q1.xi)),
        q1.apply(&q2.eta).sub(&q2.apply(&q1.eta)),
    )
}

#[derive(Clone, Debug, PartialEq)]
pub struct StructureConstants {
    pub n: usize,
    /// `c[i][j][k]`: `[Q_i, Q_j] = sum_k c[i][j][k] Q_k`.
    pub c: Vec<Vec<Vec<Q>>>,
}

impl StructureConstants {
    pub fn is_antisymmetric(&self) -> bool {
        (0..self.n).all(|i| (0..self.n).all(|j| (0..self.n).all(|k| self.c[i][j][k] == -self.c[j][i][k].clone())))
    }

    pub fn satisfies_jacobi(&self) -> bool {
        let n = self.n;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for m in 0..n {
                        let mut s = Q::zero();
                        for l in 0..n {
                            s += &self.c[j][k][l] * &self.c[i][l][m];
                            s += &self.c[k][i][l] * &self.c[j][l][m];
                            s += &self.c[i][j][l] * &self.c[k][l][m];
                        }
                        if !s.is_zero() {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }
}

impl fmt::Display for StructureConstants {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.n {
            for j in i + 1..self.n {
                let mut terms = Vec::new();
                for k in 0..self.n {
                    let c = &self.c[i][j][k];
                    if !c.is_zero() {
                        terms.push(format!("{c}*Q{}", k + 1));
                    }
                }
                let rhs = if terms.is_empty() { "0".to_string() } else { terms.join(" + ") };
                writeln!(f, "[Q{}, Q{}] = {}", i + 1, j + 1, rhs)?;
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ClosureError {
    #[error("[Q{}, Q{}] = {residual} is not in the span of the basis", .i + 1, .j + 1)]
    NotClosed { i: usize, j: usize, residual: VectorField },
    #[error("the basis is linearly dependent")]
    DecompositionAmbiguous,
    #[error("cannot decompose: {0}")]
    Unsupported(String),
}

fn prep(c: &Canon, rels: &[SideRelation], chart: Chart) -> Result<Canon, ClosureError> {
    reduce_mod(c, rels)
        .and_then(|c| c.resolve_chart(chart))
        .map_err(|e| ClosureError::Unsupported(e.to_string()))
}

/// Coefficients `c` with `target = sum c_k basis_k`, if any.
fn decompose(
    target: &VectorField,
    basis: &[VectorField],
    unknowns: &[Atom],
) -> Result<Solution, ClosureError> {
    let n = basis.len();
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for comp in 0..3 {
        let mut r = target.components()[comp].clone();
        for (k, q) in basis.iter().enumerate() {
            r = r.sub(&q.components()[comp].mul(&Canon::atom(unknowns[k].clone())));
        }
        let r = r.numerator();
        let Some((rs, hs)) = linear_equations(&r, unknowns) else {
            return Err(ClosureError::Unsupported("non-linear decomposition".into()));
        };
        rows.extend(rs);
        rhs.extend(hs);
    }
    Ok(solve(rows, rhs, n))
}

pub fn closure_check(basis: &[VectorField]) -> Result<StructureConstants, ClosureError> {
    closure_check_mod(basis, &[], Chart::Positive)
}

/// Closure modulo side relations on a chart.
pub fn closure_check_mod(
    basis: &[VectorField],
    rels: &[SideRelation],
    chart: Chart,
) -> Result<StructureConstants, ClosureError> {
    let n = basis.len();
    let basis: Vec<VectorField> = basis
        .iter()
        .map(|q| Ok(VectorField::new(prep(&q.tau, rels, chart)?, prep(&q.xi, rels, chart)?, prep(&q.eta, rels, chart)?)))
        .collect::<Result<_, ClosureError>>()?;
    let unknowns: Vec<Atom> = (0..n).map(|k| Atom::Param(sym(&format!("~c{k}")))).collect();
    if !matches!(decompose(&VectorField::zero(), &basis, &unknowns)?, Solution::Unique(_)) {
        return Err(ClosureError::DecompositionAmbiguous);
    }
    let mut c = vec![vec![vec![Q::zero(); n]; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let b = bracket(&basis[i], &basis[j]);
            let b = VectorField::new(prep(&b.tau, rels, chart)?, prep(&b.xi, rels, chart)?, prep(&b.eta, rels, chart)?);
            match decompose(&b, &basis, &unknowns)? {
                Solution::Unique(v) => {
                    for k in 0..n {
                        c[j][i][k] = -v[k].clone();
                        c[i][j][k] = v[k].clone();
                    }
                }
                _ => return Err(ClosureError::NotClosed { i, j, residual: b }),
            }
        }
    }
    Ok(StructureConstants { n, c })
}
