//! Chart resolution and the tri-state zero test.

use std::collections::HashMap;

use num_traits::Signed;

use super::number::floor;
use super::subst::Rewriter;
use super::*;

/// Sign conventions for `abs` and `sign`.  On the positive chart `x` and
/// `u` are taken larger than one, so `x`, `u`, `ln x` and `ln u` are
/// positive.  The signed chart keeps `sign(x)` and `sign(u)` as atoms with
/// zero derivative and square one.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Hash)]
pub enum Chart {
    #[default]
    Positive,
    Signed,
}

impl std::str::FromStr for Chart {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Chart, String> {
        match s {
            "positive" => Ok(Chart::Positive),
            "signed" => Ok(Chart::Signed),
            _ => Err(format!("unknown chart '{s}'")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Verdict {
    Zero,
    NonZero,
    Unknown,
}

#[derive(Clone, Debug)]
pub struct ZeroTest {
    pub verdict: Verdict,
    /// Normal form after reduction and clearing of denominators.
    pub residual: Canon,
    pub note: Option<String>,
}

fn positive_atom(a: &Atom) -> bool {
    match a {
        Atom::Var(Var::X) | Atom::Var(Var::J(0, 0)) | Atom::Num(_) | Atom::Abs(_) => true,
        Atom::Ln(y) => matches!(y.as_atom(), Some(Atom::Var(Var::X)) | Some(Atom::Var(Var::J(0, 0)))),
        _ => false,
    }
}

/// True if every term is a positive multiple of positive atoms.
pub(crate) fn chart_positive(c: &Canon) -> bool {
    !c.is_zero()
        && c.terms().all(|(m, k)| {
            k.is_positive()
                && m.f.iter().all(|(a, p)| {
                    positive_atom(a)
                        || matches!(a, Atom::Base(poly) if !p.is_integer() || chart_positive(poly))
                })
        })
}

struct ChartR {
    chart: Chart,
    memo: HashMap<Atom, Canon>,
}

impl Rewriter for ChartR {
    fn memo(&mut self) -> &mut HashMap<Atom, Canon> {
        &mut self.memo
    }

    fn hook(&mut self, a: &Atom, bound: &mut Vec<Var>) -> Option<Result<Canon>> {
        match (self.chart, a) {
            (Chart::Positive, Atom::Abs(y)) => {
                let y = match self.go(y, bound) {
                    Ok(y) => y,
                    Err(e) => return Some(Err(e)),
                };
                if chart_positive(&y) {
                    Some(Ok(y))
                } else {
                    Some(y.abs())
                }
            }
            (Chart::Positive, Atom::Sign(y)) => {
                let y = match self.go(y, bound) {
                    Ok(y) => y,
                    Err(e) => return Some(Err(e)),
                };
                if chart_positive(&y) {
                    Some(Ok(Canon::one()))
                } else {
                    Some(y.sign())
                }
            }
            (Chart::Signed, Atom::Abs(y)) => match y.as_atom() {
                Some(Atom::Var(v @ (Var::X | Var::J(0, 0)))) => {
                    let x = Canon::var(*v);
                    Some(Ok(Canon::atom(Atom::Sign(x.clone())).mul(&x)))
                }
                _ => None,
            },
            (Chart::Signed, Atom::Ln(y)) if matches!(y.as_atom(), Some(Atom::Abs(_))) => Some(Ok(Canon::atom(a.clone()))),
            _ => None,
        }
    }
}

impl Canon {
    pub fn resolve_chart(&self, chart: Chart) -> Result<Canon> {
        let mut found = false;
        self.visit_atoms(&mut |a| found |= matches!(a, Atom::Abs(_) | Atom::Sign(_)));
        if !found {
            return Ok(self.clone());
        }
        ChartR { chart, memo: HashMap::new() }.go(self, &mut Vec::new())
    }

    /// Multiply through by powers of polynomial atoms until none carries a
    /// negative exponent; the result vanishes iff `self` does.
    pub fn numerator(&self) -> Canon {
        let mut e = self.clone();
        for _ in 0..64 {
            let mut worst: Option<(Atom, Q)> = None;
            for (m, _) in e.terms() {
                for (a, p) in &m.f {
                    if let (Atom::Base(_), Pw::R(r)) = (a, p) {
                        let f = Q::from_integer(floor(r));
                        if f.is_negative() && worst.as_ref().is_none_or(|(_, w)| f < *w) {
                            worst = Some((a.clone(), f));
                        }
                    }
                }
            }
            let Some((a, f)) = worst else { return e };
            e = e.mul(&Canon::mono(Q::one(), Mono::atom(a, Pw::R(-f))));
        }
        e
    }

    /// Remove the common monomial and content, e.g. to present a residual.
    pub fn primitive(&self) -> Canon {
        if self.len() < 2 {
            return match self.single() {
                Some(_) => Canon::one(),
                None => Canon::zero(),
            };
        }
        let (_, _, p) = arith::factor_sum(self);
        p
    }
}

/// Reduce modulo `rels`, resolve the chart, clear denominators, and decide.
pub fn zero_test(e: &Canon, rels: &[SideRelation], chart: Chart) -> ZeroTest {
    let reduced = match reduce_mod(e, rels) {
        Ok(r) => r,
        Err(err) => {
            return ZeroTest { verdict: Verdict::Unknown, residual: e.clone(), note: Some(err.to_string()) }
        }
    };
    let resolved = match reduced.resolve_chart(chart) {
        Ok(r) => r,
        Err(err) => {
            return ZeroTest { verdict: Verdict::Unknown, residual: reduced, note: Some(err.to_string()) }
        }
    };
    if resolved.is_zero() {
        return ZeroTest { verdict: Verdict::Zero, residual: resolved, note: None };
    }
    let num = resolved.numerator();
    if num.is_zero() {
        return ZeroTest { verdict: Verdict::Zero, residual: num, note: None };
    }
    let mut unresolved = None;
    num.visit_atoms(&mut |a| {
        let bad = match (chart, a) {
            (Chart::Positive, Atom::Abs(_) | Atom::Sign(_)) => true,
            (Chart::Signed, Atom::Abs(y) | Atom::Sign(y)) => {
                !matches!(y.as_atom(), Some(Atom::Var(Var::X | Var::J(0, 0))))
            }
            _ => false,
        };
        if bad && unresolved.is_none() {
            unresolved = Some(format!("unresolved sign information in {}", Canon::atom(a.clone())));
        }
    });
    match unresolved {
        Some(note) => ZeroTest { verdict: Verdict::Unknown, residual: num, note: Some(note) },
        None => ZeroTest { verdict: Verdict::NonZero, residual: num, note: None },
    }
}

/// Zero test on the positive chart.
pub fn is_zero(e: &Canon, rels: &[SideRelation]) -> Verdict {
    zero_test(e, rels, Chart::Positive).verdict
}

impl Verdict {
    pub fn and(self, o: Verdict) -> Verdict {
        match (self, o) {
            (Verdict::Zero, Verdict::Zero) => Verdict::Zero,
            (Verdict::NonZero, _) | (_, Verdict::NonZero) => Verdict::NonZero,
            _ => Verdict::Unknown,
        }
    }
}

