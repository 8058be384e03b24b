//! Symbolic verification of Lie symmetries and equivalence transformations
//! for variable-coefficient diffusion-convection equations
//! `f(x) u_t = (g(x) A(u) u_x)_x + h(x) B(u) u_x`.

pub mod catalog;
pub mod equation;
pub mod expr;
pub mod jet;
mod linalg;
pub mod parser;
pub mod symmetry;
pub mod transforms;

use std::fmt;

use expr::Verdict;

/// Verdict of a verification step.  Undecided zero tests never pass.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Outcome {
    Pass,
    Fail,
    Inconclusive,
}

impl From<Verdict> for Outcome {
    fn from(v: Verdict) -> Outcome {
        match v {
            Verdict::Zero => Outcome::Pass,
            Verdict::NonZero => Outcome::Fail,
            Verdict::Unknown => Outcome::Inconclusive,
        }
    }
}

impl Outcome {
    /// Fail dominates, then Inconclusive.
    pub fn and(self, o: Outcome) -> Outcome {
        match (self, o) {
            (Outcome::Fail, _) | (_, Outcome::Fail) => Outcome::Fail,
            (Outcome::Pass, Outcome::Pass) => Outcome::Pass,
            _ => Outcome::Inconclusive,
        }
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Outcome::Pass => "pass",
            Outcome::Fail => "fail",
            Outcome::Inconclusive => "inconclusive",
        })
    }
}
