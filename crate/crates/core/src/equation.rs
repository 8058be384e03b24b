//! The equation class `f u_t = (g A u_x)_x + h B u_x`.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::expr::{zero_test, Canon, Chart, FuncAtom, SideRelation, Var, Verdict};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EquationError {
    #[error("element {0} vanishes")]
    DivisionByZeroElement(&'static str),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Gauge {
    GIs1,
    GIsH,
}

impl FromStr for Gauge {
    type Err = String;
    fn from_str(s: &str) -> Result<Gauge, String> {
        match s.replace(' ', "").as_str() {
            "g=1" | "g_is_1" => Ok(Gauge::GIs1),
            "g=h" | "g_is_h" => Ok(Gauge::GIsH),
            _ => Err(format!("unknown gauge '{s}'")),
        }
    }
}

impl fmt::Display for Gauge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Gauge::GIs1 => "g=1",
            Gauge::GIsH => "g=h",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DCEquation {
    pub f: Canon,
    pub g: Canon,
    pub h: Canon,
    pub a: Canon,
    pub b: Canon,
    pub relations: Vec<SideRelation>,
    pub chart: Chart,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CheckStatus {
    Pass,
    Fail,
    /// Could not be decided; treated as satisfied with a warning.
    Warn,
}

#[derive(Clone, Debug)]
pub struct ValidationReport {
    pub checks: Vec<(String, CheckStatus)>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|(_, s)| *s != CheckStatus::Fail)
    }

    pub fn failures(&self) -> Vec<&str> {
        self.checks.iter().filter(|(_, s)| *s == CheckStatus::Fail).map(|(n, _)| n.as_str()).collect()
    }
}

pub fn opaque(name: &str, v: Var) -> Canon {
    Canon::func(FuncAtom::new(name, &[v]))
}

impl DCEquation {
    pub fn new(f: Canon, g: Canon, h: Canon, a: Canon, b: Canon) -> DCEquation {
        DCEquation { f, g, h, a, b, relations: Vec::new(), chart: Chart::Positive }
    }

    /// Every element arbitrary.
    pub fn generic() -> DCEquation {
        DCEquation::new(
            opaque("f", Var::X),
            opaque("g", Var::X),
            opaque("h", Var::X),
            opaque("A", Var::U),
            opaque("B", Var::U),
        )
    }

    pub fn with_relations(mut self, rels: Vec<SideRelation>) -> DCEquation {
        self.relations = rels;
        self
    }

    pub fn with_chart(mut self, chart: Chart) -> DCEquation {
        self.chart = chart;
        self
    }

    pub fn elements(&self) -> [(&'static str, &Canon); 5] {
        [("f", &self.f), ("g", &self.g), ("h", &self.h), ("A", &self.a), ("B", &self.b)]
    }

    /// Diffusion and convection part `(g A u_x)_x + h B u_x` expanded.
    fn flux(&self) -> Canon {
        let ux = Canon::var(Var::UX);
        let ga = self.g.mul(&self.a);
        ga.mul(&Canon::var(Var::UXX))
            .add(&self.g.mul(&self.a.diff(Var::U)).mul(&ux).mul(&ux))
            .add(&self.g.diff(Var::X).mul(&self.a).mul(&ux))
            .add(&self.h.mul(&self.b).mul(&ux))
    }

    pub fn residual(&self) -> Canon {
        self.f.mul(&Canon::var(Var::UT)).sub(&self.flux())
    }

    /// `u_t` on solutions.
    pub fn rhs_solved(&self) -> Result<Canon, EquationError> {
        if self.verdict(&self.f) == Verdict::Zero {
            return Err(EquationError::DivisionByZeroElement("f"));
        }
        self.flux().div(&self.f).map_err(|_| EquationError::DivisionByZeroElement("f"))
    }

    pub fn verdict(&self, e: &Canon) -> Verdict {
        zero_test(e, &self.relations, self.chart).verdict
    }

    pub fn validate(&self) -> ValidationReport {
        let mut checks = Vec::new();
        for (n, e) in [("f", &self.f), ("g", &self.g), ("h", &self.h), ("A", &self.a)] {
            let s = match self.verdict(e) {
                Verdict::Zero => CheckStatus::Fail,
                Verdict::NonZero => CheckStatus::Pass,
                Verdict::Unknown => CheckStatus::Warn,
            };
            checks.push((format!("{n} != 0"), s));
        }
        for (n, e) in self.elements() {
            let bad = e.mask() & !(if n == "A" || n == "B" { Var::U.bit() } else { Var::X.bit() });
            let s = if bad == 0 { CheckStatus::Pass } else { CheckStatus::Fail };
            checks.push((format!("{n} depends on {} only", if n == "A" || n == "B" { "u" } else { "x" }), s));
        }
        let au = self.verdict(&self.a.diff(Var::U));
        let bu = self.verdict(&self.b.diff(Var::U));
        let s = match (au, bu) {
            (Verdict::Zero, Verdict::Zero) => CheckStatus::Fail,
            (Verdict::NonZero, _) | (_, Verdict::NonZero) => CheckStatus::Pass,
            _ => CheckStatus::Warn,
        };
        checks.push(("(A_u, B_u) != (0, 0)".into(), s));
        ValidationReport { checks }
    }

    pub fn gauge_check(&self, gauge: Gauge) -> bool {
        let d = match gauge {
            Gauge::GIs1 => self.g.sub(&Canon::one()),
            Gauge::GIsH => self.g.sub(&self.h),
        };
        self.verdict(&d) == Verdict::Zero
    }
}

impl fmt::Display for DCEquation {
    fn fmt(&self, fm: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(fm, "f = {}, g = {}, h = {}, A = {}, B = {}", self.f, self.g, self.h, self.a, self.b)
    }
}
