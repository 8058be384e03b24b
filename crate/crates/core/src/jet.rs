//! Total derivatives and prolongation of vector fields.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::expr::{Canon, Var, MAX_JET};
use crate::symmetry::VectorField;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum JetError {
    #[error("jet order overflow at {0}")]
    Overflow(String),
    #[error("total derivative only exists in t or x, not {0}")]
    BadDirection(String),
}

fn raise(v: Var, dir: Var) -> Result<Var, JetError> {
    let Var::J(a, b) = v else { unreachable!() };
    let (a, b) = if dir == Var::T { (a + 1, b) } else { (a, b + 1) };
    if a >= MAX_JET || b > MAX_JET {
        return Err(JetError::Overflow(v.name()));
    }
    Ok(Var::J(a, b))
}

/// `D_t` or `D_x`.
pub fn total_derivative(e: &Canon, dir: Var) -> Result<Canon, JetError> {
    if dir != Var::T && dir != Var::X {
        return Err(JetError::BadDirection(dir.name()));
    }
    let mut out = e.diff(dir);
    for v in Var::from_mask(e.mask()) {
        if let Var::J(..) = v {
            let d = e.diff(v);
            if !d.is_zero() {
                out = out.add(&d.mul(&Canon::var(raise(v, dir)?)));
            }
        }
    }
    Ok(out)
}

pub fn total_derivative_n(e: &Canon, nt: usize, nx: usize) -> Result<Canon, JetError> {
    let mut c = e.clone();
    for _ in 0..nx {
        c = total_derivative(&c, Var::X)?;
    }
    for _ in 0..nt {
        c = total_derivative(&c, Var::T)?;
    }
    Ok(c)
}

/// A vector field with the coefficients of its prolongation.
#[derive(Clone, Debug)]
pub struct ProlongedField {
    pub field: VectorField,
    /// Characteristic `eta - tau*u_t - xi*u_x`.
    pub characteristic: Canon,
    pub coeffs: BTreeMap<Var, Canon>,
}

impl ProlongedField {
    pub fn eta_t(&self) -> &Canon {
        &self.coeffs[&Var::UT]
    }
    pub fn eta_x(&self) -> &Canon {
        &self.coeffs[&Var::UX]
    }
    pub fn eta_xx(&self) -> &Canon {
        &self.coeffs[&Var::UXX]
    }
    pub fn eta_tx(&self) -> &Canon {
        &self.coeffs[&Var::UTX]
    }

    /// Coefficient of `d/du_alpha` for any jet variable.
    pub fn coefficient(&self, v: Var) -> Result<Canon, JetError> {
        if let Some(c) = self.coeffs.get(&v) {
            return Ok(c.clone());
        }
        let Var::J(a, b) = v else { return Err(JetError::BadDirection(v.name())) };
        let q = &self.field;
        let d = total_derivative_n(&self.characteristic, a as usize, b as usize)?;
        let ut = Canon::var(raise(v, Var::T)?);
        let ux = Canon::var(raise(v, Var::X)?);
        Ok(d.add(&q.tau.mul(&ut)).add(&q.xi.mul(&ux)))
    }
}

pub fn prolong(q: &VectorField) -> ProlongedField {
    let characteristic = q
        .eta
        .sub(&q.tau.mul(&Canon::var(Var::UT)))
        .sub(&q.xi.mul(&Canon::var(Var::UX)));
    let mut p = ProlongedField { field: q.clone(), characteristic, coeffs: BTreeMap::new() };
    for v in [Var::UT, Var::UX, Var::UXX, Var::UTX] {
        let c = p.coefficient(v).expect("second order prolongation stays in bounds");
        p.coeffs.insert(v, c);
    }
    p
}

/// `pr Q (F)` before restriction to solutions.
pub fn apply_prolonged(pr: &ProlongedField, f: &Canon) -> Result<Canon, JetError> {
    let q = &pr.field;
    let mut out = q.tau.mul(&f.diff(Var::T)).add(&q.xi.mul(&f.diff(Var::X))).add(&q.eta.mul(&f.diff(Var::U)));
    for v in Var::from_mask(f.mask()) {
        if v.is_jet() {
            let d = f.diff(v);
            if !d.is_zero() {
                out = out.add(&pr.coefficient(v)?.mul(&d));
            }
        }
    }
    Ok(out)
}
