use dcsym::expr::{Canon, Var};
use dcsym::jet::{apply_prolonged, prolong, total_derivative, total_derivative_n, JetError};
use dcsym::parser::parse_expr;
use dcsym::symmetry::VectorField;

fn c(s: &str) -> Canon {
    parse_expr(s).unwrap().normalize().unwrap()
}

fn q(s: &str) -> VectorField {
    VectorField::parse(s).unwrap()
}

fn dx(e: &Canon) -> Canon {
    total_derivative(e, Var::X).unwrap()
}

fn dt(e: &Canon) -> Canon {
    total_derivative(e, Var::T).unwrap()
}

/// Recursive prolongation formula, used as an oracle.
fn oracle(f: &VectorField) -> [Canon; 4] {
    let v = |x: Var| Canon::var(x);
    let et = dt(&f.eta).sub(&v(Var::UT).mul(&dt(&f.tau))).sub(&v(Var::UX).mul(&dt(&f.xi)));
    let ex = dx(&f.eta).sub(&v(Var::UT).mul(&dx(&f.tau))).sub(&v(Var::UX).mul(&dx(&f.xi)));
    let exx = dx(&ex).sub(&v(Var::UTX).mul(&dx(&f.tau))).sub(&v(Var::UXX).mul(&dx(&f.xi)));
    let etx = dx(&et).sub(&v(Var::UTT).mul(&dx(&f.tau))).sub(&v(Var::UTX).mul(&dx(&f.xi)));
    [et, ex, exx, etx]
}

#[test]
fn total_derivative_examples() {
    assert_eq!(dx(&c("u")), c("u_x"));
    assert_eq!(dx(&c("g*A*u_x")), c("g_x*A*u_x + g*A_u*u_x^2 + g*A*u_xx"));
    assert_eq!(dt(&c("x")), Canon::zero());
    assert_eq!(dt(&c("u_x")), c("u_tx"));
    assert_eq!(total_derivative_n(&c("u"), 1, 2).unwrap(), c("u_txx"));
}

#[test]
fn total_derivative_errors() {
    assert!(matches!(total_derivative(&c("u"), Var::U), Err(JetError::BadDirection(_))));
    assert!(matches!(total_derivative_n(&c("u"), 0, 9), Err(JetError::Overflow(_))));
}

#[test]
fn translation_prolongs_to_zero() {
    let p = prolong(&VectorField::dt());
    for k in [p.eta_t(), p.eta_x(), p.eta_xx(), p.eta_tx()] {
        assert!(k.is_zero());
    }
}

#[test]
fn scaling_prolongation() {
    let p = prolong(&q("2*t*d_t + x*d_x"));
    assert_eq!(*p.eta_t(), c("-2*u_t"));
    assert_eq!(*p.eta_x(), c("-u_x"));
    assert_eq!(*p.eta_xx(), c("-2*u_xx"));
    assert_eq!(*p.eta_tx(), c("-3*u_tx"));
}

#[test]
fn projective_prolongation() {
    let f = q("t^2*d_t + t*x*d_x - (t*u + x)*d_u");
    let p = prolong(&f);
    assert_eq!(*p.eta_x(), c("-2*t*u_x - 1"));
    let o = oracle(&f);
    assert_eq!([p.eta_t(), p.eta_x(), p.eta_xx(), p.eta_tx()].map(Clone::clone), o);
}

#[test]
fn oracle_on_table_fields() {
    for s in [
        "d_t",
        "exp(-t)*(d_t - x*d_x)",
        "exp(t)*(x^2*d_x + x*u*d_u)",
        "(beta*x^2 + g1*x + g0)*d_x + (beta*x + alpha)*d_u",
        "x*(ln(x) + t - 2)*d_x - (ln(x) + t)*u*d_u",
        "tau*d_t + xi*d_x + eta*d_u",
    ] {
        let f = q(s);
        let p = prolong(&f);
        assert_eq!([p.eta_t(), p.eta_x(), p.eta_xx(), p.eta_tx()].map(Clone::clone), oracle(&f), "{s}");
    }
}

#[test]
fn pure_eta_gives_total_derivatives() {
    let f = q("x*u^2*exp(t)*d_u");
    let p = prolong(&f);
    assert_eq!(*p.eta_x(), dx(&f.eta));
    assert_eq!(*p.eta_tx(), dt(&dx(&f.eta)));
}

#[test]
fn apply_to_heat() {
    let heat = c("u_t - u_xx");
    assert!(apply_prolonged(&prolong(&VectorField::dt()), &heat).unwrap().is_zero());
    let r = apply_prolonged(&prolong(&q("2*t*d_t + x*d_x")), &heat).unwrap();
    assert_eq!(r, heat.mul(&Canon::int(-2)));
    let r = apply_prolonged(&prolong(&VectorField::dx()), &c("f*u_t")).unwrap();
    assert_eq!(r, c("f_x*u_t"));
}

#[test]
fn total_derivatives_commute() {
    for s in ["u*u_x*x*t", "exp(u)*u_x^2*f", "A*u_xx + B*u_x", "t^3*x^2*u_t*u_x"] {
        let e = c(s);
        assert_eq!(dt(&dx(&e)), dx(&dt(&e)), "{s}");
    }
}
