use dcsym::equation::{opaque, CheckStatus, DCEquation, EquationError, Gauge};
use dcsym::expr::{is_zero, Canon, Var, Verdict};
use dcsym::parser::parse_expr;

fn c(s: &str) -> Canon {
    parse_expr(s).unwrap().normalize().unwrap()
}

fn eq(f: &str, g: &str, h: &str, a: &str, b: &str) -> DCEquation {
    DCEquation::new(c(f), c(g), c(h), c(a), c(b))
}

fn same(a: &Canon, b: &Canon) -> bool {
    is_zero(&a.sub(b), &[]) == Verdict::Zero
}

#[test]
fn residual_examples() {
    assert_eq!(eq("1", "1", "1", "u", "0").residual(), c("u_t - u*u_xx - u_x^2"));
    assert_eq!(eq("1", "1", "1", "1", "u").residual(), c("u_t - u_xx - u*u_x"));
    let e = DCEquation::new(c("exp(p*x)"), Canon::one(), Canon::one(), opaque("A", Var::U), opaque("B", Var::U));
    assert_eq!(e.residual(), c("exp(p*x)*u_t - A*u_xx - A_u*u_x^2 - B*u_x"));
    assert_eq!(
        DCEquation::generic().residual(),
        c("f*u_t - g*A*u_xx - g*A_u*u_x^2 - g_x*A*u_x - h*B*u_x")
    );
}

#[test]
fn rhs_examples() {
    assert_eq!(eq("1", "1", "x^3 + 1", "1", "0").rhs_solved().unwrap(), c("u_xx"));
    assert_eq!(eq("1", "1", "1", "1", "u").rhs_solved().unwrap(), c("u_xx + u*u_x"));
    let e = eq("x^(-2)", "1", "x^(-2)", "u^(-4/3)", "0");
    assert!(same(&e.rhs_solved().unwrap(), &c("x^2*(u^(-4/3)*u_xx - 4/3*u^(-7/3)*u_x^2)")));
    assert!(matches!(eq("0", "1", "1", "u", "0").rhs_solved(), Err(EquationError::DivisionByZeroElement("f"))));
}

#[test]
fn rhs_matches_residual() {
    for e in [
        DCEquation::generic(),
        eq("exp(x)", "x^2", "x", "u^2", "exp(u)"),
        eq("x^(-2)", "1", "x^(-2)", "u^(-4/3)", "0"),
    ] {
        let r = e.residual();
        let flux = e.f.mul(&Canon::var(Var::UT)).sub(&r);
        assert!(same(&e.f.mul(&e.rhs_solved().unwrap()), &flux));
    }
}

#[test]
fn validation() {
    assert!(eq("1", "1", "1", "1", "u").validate().passed());
    assert!(DCEquation::generic().validate().passed());
    let r = eq("1", "1", "1", "1", "1").validate();
    assert!(!r.passed());
    assert_eq!(r.failures(), vec!["(A_u, B_u) != (0, 0)"]);
    let r = eq("1", "0", "1", "u", "0").validate();
    assert_eq!(r.failures(), vec!["g != 0"]);
    let r = eq("t", "1", "1", "u", "0").validate();
    assert_eq!(r.failures(), vec!["f depends on x only"]);
    let r = eq("1", "1", "1", "x*u", "0").validate();
    assert!(r.checks.iter().any(|(n, s)| n == "A depends on u only" && *s == CheckStatus::Fail));
}

#[test]
fn gauges() {
    assert!(eq("x", "1", "x", "u", "0").gauge_check(Gauge::GIs1));
    assert!(eq("1", "x^2", "x^2", "u", "0").gauge_check(Gauge::GIsH));
    let e = eq("1", "x", "1", "u", "0");
    assert!(!e.gauge_check(Gauge::GIs1) && !e.gauge_check(Gauge::GIsH));
}

#[test]
fn residual_is_linear_in_each_element() {
    let base = eq("exp(x)", "x^2", "x + 1", "u^2 + 1", "u^3");
    let k = c("7/3");
    let r0 = base.residual();
    for i in 0..5 {
        let mut e = base.clone();
        let slot = match i {
            0 => &mut e.f,
            1 => &mut e.g,
            2 => &mut e.h,
            3 => &mut e.a,
            _ => &mut e.b,
        };
        *slot = slot.mul(&k);
        let mut z = base.clone();
        let slot = match i {
            0 => &mut z.f,
            1 => &mut z.g,
            2 => &mut z.h,
            3 => &mut z.a,
            _ => &mut z.b,
        };
        *slot = Canon::zero();
        // R(k*e) - R(0) = k (R(e) - R(0))
        let rz = z.residual();
        assert!(same(&e.residual().sub(&rz), &k.mul(&r0.sub(&rz))), "slot {i}");
    }
}
