//! Exact symbolic expressions.
//!
//! [`Canon`] is the normalized working form: a sum of rational multiples of
//! monomials.  A monomial is a product of atoms raised to exponents that are
//! polynomials in the symbolic parameters, times at most one merged
//! exponential.  [`Expr`] is the plain syntax tree produced by the parser and
//! consumed by [`normalize`].

mod arith;
mod calculus;
mod integrate;
mod number;
mod relations;
mod subst;
mod tree;
mod zero;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

pub use number::Q;
pub use relations::{reduce_mod, SideRelation};
pub use subst::{Bindings, FuncBinding};
pub use tree::{normalize, Expr};
pub use zero::{is_zero, zero_test, Chart, Verdict, ZeroTest};

use num_traits::{One, Signed, Zero};
use thiserror::Error;

/// Interned-ish symbol name.
pub type Sym = Arc<str>;

pub fn sym(s: &str) -> Sym {
    Arc::from(s)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExprError {
    #[error("unsupported construct: {0}")]
    UnsupportedConstruct(String),
    #[error("incomplete binding: {0}")]
    IncompleteBinding(String),
    #[error("side relation reduction did not terminate")]
    NonTerminating,
    #[error("division by zero")]
    DivisionByZero,
}

pub type Result<T> = std::result::Result<T, ExprError>;

pub(crate) fn unsupported<T>(msg: impl Into<String>) -> Result<T> {
    Err(ExprError::UnsupportedConstruct(msg.into()))
}

/// Independent and dependent variables, including jet coordinates.
/// `J(nt, nx)` is the derivative of `u` taken `nt` times in `t` and `nx`
/// times in `x`; `J(0, 0)` is `u` itself.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Var {
    T,
    X,
    J(u8, u8),
}

pub const MAX_JET: u8 = 7;

impl Var {
    pub const U: Var = Var::J(0, 0);
    pub const UT: Var = Var::J(1, 0);
    pub const UX: Var = Var::J(0, 1);
    pub const UXX: Var = Var::J(0, 2);
    pub const UTX: Var = Var::J(1, 1);
    pub const UTT: Var = Var::J(2, 0);

    pub fn bit(self) -> u64 {
        match self {
            Var::T => 1,
            Var::X => 2,
            Var::J(a, b) => {
                debug_assert!(a < MAX_JET && b <= MAX_JET);
                1u64 << (2 + (a as u32) * 8 + b as u32)
            }
        }
    }

    pub fn is_jet(self) -> bool {
        matches!(self, Var::J(a, b) if a + b > 0)
    }

    pub fn name(self) -> String {
        match self {
            Var::T => "t".into(),
            Var::X => "x".into(),
            Var::J(0, 0) => "u".into(),
            Var::J(a, b) => {
                let mut s = String::from("u_");
                for _ in 0..a {
                    s.push('t');
                }
                for _ in 0..b {
                    s.push('x');
                }
                s
            }
        }
    }

    pub fn letter(self) -> char {
        match self {
            Var::T => 't',
            Var::X => 'x',
            _ => 'u',
        }
    }

    pub fn from_letter(c: char) -> Option<Var> {
        match c {
            't' => Some(Var::T),
            'x' => Some(Var::X),
            'u' => Some(Var::U),
            _ => None,
        }
    }

    /// All variables whose bit is set in `mask`.
    pub fn from_mask(mask: u64) -> Vec<Var> {
        let mut out = Vec::new();
        if mask & 1 != 0 {
            out.push(Var::T);
        }
        if mask & 2 != 0 {
            out.push(Var::X);
        }
        for a in 0..MAX_JET {
            for b in 0..=MAX_JET {
                if mask & Var::J(a, b).bit() != 0 {
                    out.push(Var::J(a, b));
                }
            }
        }
        out
    }
}

/// An opaque function applied to arguments.  `args == None` means the
/// function is applied to its own formal variables.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FuncAtom {
    pub name: Sym,
    pub formal: Arc<[Var]>,
    pub derivs: Vec<u8>,
    pub args: Option<Vec<Canon>>,
}

impl FuncAtom {
    pub fn new(name: &str, formal: &[Var]) -> FuncAtom {
        FuncAtom {
            name: sym(name),
            formal: Arc::from(formal),
            derivs: vec![0; formal.len()],
            args: None,
        }
    }

    pub fn order(&self) -> u32 {
        self.derivs.iter().map(|&d| d as u32).sum()
    }

    pub fn with_derivs(&self, derivs: Vec<u8>) -> FuncAtom {
        FuncAtom { derivs, ..self.clone() }
    }

    pub fn bare(&self) -> FuncAtom {
        FuncAtom { args: None, ..self.clone() }
    }

    /// Derivative suffix such as `_tx`, empty when underived.
    pub fn suffix(&self) -> String {
        let mut s = String::new();
        for (i, &d) in self.derivs.iter().enumerate() {
            for _ in 0..d {
                s.push(self.formal[i].letter());
            }
        }
        if s.is_empty() {
            s
        } else {
            format!("_{s}")
        }
    }
}

/// `F(arg)` where `F' = integrand` in the bound variable `var`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IntegralAtom {
    pub integrand: Canon,
    pub var: Var,
    pub arg: Canon,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Atom {
    Var(Var),
    Param(Sym),
    /// A prime number carrying a fractional or symbolic exponent.
    Num(u64),
    Func(Arc<FuncAtom>),
    Ln(Canon),
    Abs(Canon),
    Sign(Canon),
    /// A non-monomial polynomial with trivial content.
    Base(Canon),
    Int(Arc<IntegralAtom>),
}

impl Atom {
    pub fn mask(&self) -> u64 {
        match self {
            Atom::Var(v) => v.bit(),
            Atom::Param(_) | Atom::Num(_) => 0,
            Atom::Func(f) => match &f.args {
                None => f.formal.iter().fold(0, |m, v| m | v.bit()),
                Some(a) => a.iter().fold(0, |m, c| m | c.mask),
            },
            Atom::Ln(c) | Atom::Abs(c) | Atom::Sign(c) | Atom::Base(c) => c.mask,
            Atom::Int(i) => i.arg.mask | (i.integrand.mask & !i.var.bit()),
        }
    }

    pub fn func(f: FuncAtom) -> Atom {
        Atom::Func(Arc::new(f))
    }
}

/// Exponent: a rational number or a non-constant polynomial in parameters.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pw {
    R(Q),
    S(Canon),
}

impl Pw {
    pub fn one() -> Pw {
        Pw::R(Q::one())
    }

    pub fn from_canon(c: &Canon) -> Result<Pw> {
        if let Some(q) = c.as_q() {
            return Ok(Pw::R(q));
        }
        for (m, _) in c.terms() {
            if m.e.is_some() {
                return unsupported("exponent contains an exponential");
            }
            for (a, p) in &m.f {
                let ok = matches!(a, Atom::Param(_))
                    && matches!(p, Pw::R(r) if r.is_integer() && !r.is_negative());
                if !ok {
                    return unsupported(format!(
                        "exponent must be a polynomial in parameters, got atom {a:?}"
                    ));
                }
            }
        }
        Ok(Pw::S(c.clone()))
    }

    pub fn to_canon(&self) -> Canon {
        match self {
            Pw::R(q) => Canon::q(q.clone()),
            Pw::S(c) => c.clone(),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Pw::R(q) if q.is_zero())
    }

    pub fn as_q(&self) -> Option<&Q> {
        match self {
            Pw::R(q) => Some(q),
            Pw::S(_) => None,
        }
    }

    pub fn is_integer(&self) -> bool {
        matches!(self, Pw::R(q) if q.is_integer())
    }

    pub fn add(&self, o: &Pw) -> Pw {
        match (self, o) {
            (Pw::R(a), Pw::R(b)) => Pw::R(a + b),
            _ => Pw::from_canon(&self.to_canon().add(&o.to_canon())).expect("parameter polynomial"),
        }
    }

    pub fn mul(&self, o: &Pw) -> Pw {
        match (self, o) {
            (Pw::R(a), Pw::R(b)) => Pw::R(a * b),
            _ => Pw::from_canon(&self.to_canon().mul(&o.to_canon())).expect("parameter polynomial"),
        }
    }

    pub fn neg(&self) -> Pw {
        self.mul(&Pw::R(-Q::one()))
    }

    /// Split off the rational constant part of the exponent.
    pub fn split_const(&self) -> (Q, Option<Canon>) {
        match self {
            Pw::R(q) => (q.clone(), None),
            Pw::S(c) => {
                let k = c.const_term();
                (k.clone(), Some(c.sub(&Canon::q(k))))
            }
        }
    }
}


#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Mono {
    pub f: BTreeMap<Atom, Pw>,
    pub e: Option<Canon>,
}

impl Mono {
    pub fn one() -> Mono {
        Mono::default()
    }

    pub fn is_one(&self) -> bool {
        self.f.is_empty() && self.e.is_none()
    }

    pub fn atom(a: Atom, p: Pw) -> Mono {
        let mut f = BTreeMap::new();
        f.insert(a, p);
        Mono { f, e: None }
    }

    pub fn mask(&self) -> u64 {
        let mut m = self.e.as_ref().map_or(0, |e| e.mask);
        for (a, p) in &self.f {
            m |= a.mask();
            if let Pw::S(c) = p {
                m |= c.mask;
            }
        }
        m
    }

    pub fn pow_of(&self, a: &Atom) -> Option<&Pw> {
        self.f.get(a)
    }
}

/// Normalized expression: sum of `coefficient * monomial`.
#[derive(Clone, Debug)]
pub struct Canon {
    t: Arc<BTreeMap<Mono, Q>>,
    mask: u64,
}

impl PartialEq for Canon {
    fn eq(&self, o: &Self) -> bool {
        Arc::ptr_eq(&self.t, &o.t) || self.t == o.t
    }
}
impl Eq for Canon {}
impl std::hash::Hash for Canon {
    fn hash<H: std::hash::Hasher>(&self, h: &mut H) {
        self.t.hash(h)
    }
}
impl PartialOrd for Canon {
    fn partial_cmp(&self, o: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Canon {
    fn cmp(&self, o: &Self) -> std::cmp::Ordering {
        if Arc::ptr_eq(&self.t, &o.t) {
            return std::cmp::Ordering::Equal;
        }
        self.t.cmp(&o.t)
    }
}

impl Default for Canon {
    fn default() -> Self {
        Canon::zero()
    }
}

impl Canon {
    pub(crate) fn from_map(t: BTreeMap<Mono, Q>) -> Canon {
        let mask = t.keys().fold(0, |m, k| m | k.mask());
        Canon { t: Arc::new(t), mask }
    }

    pub fn zero() -> Canon {
        Canon::from_map(BTreeMap::new())
    }

    pub fn one() -> Canon {
        Canon::q(Q::one())
    }

    pub fn q(q: Q) -> Canon {
        let mut t = BTreeMap::new();
        if !q.is_zero() {
            t.insert(Mono::one(), q);
        }
        Canon::from_map(t)
    }

    pub fn int(n: i64) -> Canon {
        Canon::q(Q::from_integer(n.into()))
    }

    pub fn frac(n: i64, d: i64) -> Canon {
        Canon::q(Q::new(n.into(), d.into()))
    }

    pub fn atom(a: Atom) -> Canon {
        Canon::mono(Q::one(), Mono::atom(a, Pw::one()))
    }

    pub fn var(v: Var) -> Canon {
        Canon::atom(Atom::Var(v))
    }

    pub fn param(name: &str) -> Canon {
        Canon::atom(Atom::Param(sym(name)))
    }

    pub fn func(f: FuncAtom) -> Canon {
        Canon::atom(Atom::func(f))
    }

    pub fn mono(c: Q, m: Mono) -> Canon {
        let mut t = BTreeMap::new();
        if !c.is_zero() {
            t.insert(m, c);
        }
        Canon::from_map(t)
    }

    pub fn mask(&self) -> u64 {
        self.mask
    }

    pub fn depends_on(&self, v: Var) -> bool {
        self.mask & v.bit() != 0
    }

    pub fn is_zero(&self) -> bool {
        self.t.is_empty()
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Mono, &Q)> {
        self.t.iter()
    }

    pub fn as_q(&self) -> Option<Q> {
        match self.t.len() {
            0 => Some(Q::zero()),
            1 => {
                let (m, c) = self.t.iter().next().unwrap();
                if m.is_one() {
                    Some(c.clone())
                } else {
                    None
                }
            }
            _ => None,
        }
    }

    pub fn is_const(&self) -> bool {
        self.as_q().is_some()
    }

    pub fn const_term(&self) -> Q {
        self.t.get(&Mono::one()).cloned().unwrap_or_else(Q::zero)
    }

    pub fn single(&self) -> Option<(&Mono, &Q)> {
        if self.t.len() == 1 {
            self.t.iter().next()
        } else {
            None
        }
    }

    /// The single atom this expression consists of, if any.
    pub fn as_atom(&self) -> Option<&Atom> {
        let (m, c) = self.single()?;
        if !c.is_one() || m.e.is_some() || m.f.len() != 1 {
            return None;
        }
        let (a, p) = m.f.iter().next().unwrap();
        if *p == Pw::one() {
            Some(a)
        } else {
            None
        }
    }

    pub fn as_var(&self) -> Option<Var> {
        match self.as_atom()? {
            Atom::Var(v) => Some(*v),
            _ => None,
        }
    }

    /// True if no atom other than parameters occurs.
    pub fn is_param_only(&self) -> bool {
        self.t.keys().all(|m| m.e.is_none() && m.f.keys().all(|a| matches!(a, Atom::Param(_))))
    }

    /// Every atom reachable from this expression, nested ones included.
    pub fn visit_atoms(&self, f: &mut dyn FnMut(&Atom)) {
        for m in self.t.keys() {
            for (a, p) in &m.f {
                f(a);
                match a {
                    Atom::Func(fa) => {
                        if let Some(args) = &fa.args {
                            for c in args {
                                c.visit_atoms(f);
                            }
                        }
                    }
                    Atom::Ln(c) | Atom::Abs(c) | Atom::Sign(c) | Atom::Base(c) => c.visit_atoms(f),
                    Atom::Int(i) => {
                        i.integrand.visit_atoms(f);
                        i.arg.visit_atoms(f);
                    }
                    _ => {}
                }
                if let Pw::S(c) = p {
                    c.visit_atoms(f);
                }
            }
            if let Some(e) = &m.e {
                e.visit_atoms(f);
            }
        }
    }

    pub fn params(&self) -> std::collections::BTreeSet<Sym> {
        let mut out = std::collections::BTreeSet::new();
        self.visit_atoms(&mut |a| {
            if let Atom::Param(p) = a {
                out.insert(p.clone());
            }
        });
        out
    }

    pub fn funcs(&self) -> std::collections::BTreeSet<Sym> {
        let mut out = std::collections::BTreeSet::new();
        self.visit_atoms(&mut |a| {
            if let Atom::Func(f) = a {
                out.insert(f.name.clone());
            }
        });
        out
    }
}

impl fmt::Display for Canon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::parser::format_canon(self))
    }
}

impl From<i64> for Canon {
    fn from(n: i64) -> Canon {
        Canon::int(n)
    }
}

impl From<Var> for Canon {
    fn from(v: Var) -> Canon {
        Canon::var(v)
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $f:ident) => {
        impl std::ops::$tr<&Canon> for &Canon {
            type Output = Canon;
            fn $m(self, o: &Canon) -> Canon {
                Canon::$f(self, o)
            }
        }
        impl std::ops::$tr<Canon> for Canon {
            type Output = Canon;
            fn $m(self, o: Canon) -> Canon {
                Canon::$f(&self, &o)
            }
        }
        impl std::ops::$tr<&Canon> for Canon {
            type Output = Canon;
            fn $m(self, o: &Canon) -> Canon {
                Canon::$f(&self, o)
            }
        }
        impl std::ops::$tr<Canon> for &Canon {
            type Output = Canon;
            fn $m(self, o: Canon) -> Canon {
                Canon::$f(self, &o)
            }
        }
    };
}
binop!(Add, add, add);
binop!(Sub, sub, sub);
binop!(Mul, mul, mul);

impl std::ops::Neg for Canon {
    type Output = Canon;
    fn neg(self) -> Canon {
        Canon::neg(&self)
    }
}
impl std::ops::Neg for &Canon {
    type Output = Canon;
    fn neg(self) -> Canon {
        Canon::neg(self)
    }
}
