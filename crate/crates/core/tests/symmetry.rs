use dcsym::equation::{opaque, DCEquation};
use dcsym::expr::{Bindings, Canon, FuncAtom, Var, Verdict};
use dcsym::jet::{apply_prolonged, prolong, total_derivative};
use dcsym::parser::parse_expr;
use dcsym::symmetry::{
    bracket, check_determining, check_symmetry, closure_check, determining_system, kernel_check, nonzero_multiple, Ansatz,
    ClosureError, VectorField,
};
use dcsym::Outcome;

fn c(s: &str) -> Canon {
    parse_expr(s).unwrap().normalize().unwrap()
}

fn q(s: &str) -> VectorField {
    VectorField::parse(s).unwrap()
}

fn eq(f: &str, g: &str, h: &str, a: &str, b: &str) -> DCEquation {
    DCEquation::new(c(f), c(g), c(h), c(a), c(b))
}

#[test]
fn total_derivatives() {
    assert_eq!(total_derivative(&c("u"), Var::X).unwrap(), c("u_x"));
    assert_eq!(total_derivative(&c("x"), Var::T).unwrap(), c("0"));
    assert_eq!(
        total_derivative(&c("g*A*u_x"), Var::X).unwrap(),
        c("g_x*A*u_x + g*A_u*u_x^2 + g*A*u_xx")
    );
}

#[test]
fn prolongation_examples() {
    let p = prolong(&q("d_t"));
    assert!(p.eta_x().is_zero() && p.eta_xx().is_zero() && p.eta_t().is_zero());
    let p = prolong(&q("2*t*d_t + x*d_x"));
    assert_eq!(p.eta_t(), &c("-2*u_t"));
    assert_eq!(p.eta_x(), &c("-u_x"));
    assert_eq!(p.eta_xx(), &c("-2*u_xx"));
    let heat = c("u_t - u_xx");
    assert!(apply_prolonged(&prolong(&q("d_t")), &heat).unwrap().is_zero());
    assert_eq!(apply_prolonged(&p, &heat).unwrap(), c("-2*u_t + 2*u_xx"));
    assert_eq!(apply_prolonged(&prolong(&q("d_x")), &c("f*u_t")).unwrap(), c("f_x*u_t"));
}

#[test]
fn residual_forms() {
    assert_eq!(eq("1", "1", "1", "u", "0").residual(), c("u_t - u*u_xx - u_x^2"));
    assert_eq!(eq("1", "1", "1", "1", "u").residual(), c("u_t - u_xx - u*u_x"));
    assert_eq!(eq("exp(p*x)", "1", "1", "A", "B").residual(), c("exp(p*x)*u_t - A*u_xx - A_u*u_x^2 - B*u_x"));
    assert_eq!(eq("1", "1", "1", "1", "u").rhs_solved().unwrap(), c("u_xx + u*u_x"));
}

#[test]
fn symmetry_examples() {
    assert_eq!(check_symmetry(&eq("1", "1", "1", "A", "0"), &q("2*t*d_t + x*d_x")).outcome, Outcome::Pass);
    let burgers = eq("1", "1", "1", "1", "u");
    assert_eq!(check_symmetry(&burgers, &q("t^2*d_t + t*x*d_x - (t*u+x)*d_u")).outcome, Outcome::Pass);
    let r = check_symmetry(&eq("exp(x)", "1", "1", "A", "B"), &q("d_x"));
    assert_eq!(r.outcome, Outcome::Fail);
    assert_eq!(check_symmetry(&DCEquation::generic(), &VectorField::dt()).outcome, Outcome::Pass);
    let _ = opaque("f", Var::X);
}

#[test]
fn brackets() {
    assert!(bracket(&q("d_t"), &q("d_x")).is_zero());
    assert_eq!(bracket(&q("d_t"), &q("2*t*d_t + x*d_x")), q("2*d_t"));
    assert!(bracket(&q("d_x"), &q("t*d_x - d_u")).is_zero());
    let sc = closure_check(&[q("d_t"), q("d_x"), q("2*t*d_t + x*d_x")]).unwrap();
    assert!(sc.is_antisymmetric() && sc.satisfies_jacobi());
    assert!(closure_check(&[q("d_t"), q("t^2*d_t")]).is_err());
}

mod common;

#[test]
fn classical_conclusions() {
    let got: Vec<_> = common::general_conclusions().into_iter().map(|(n, m)| (n, m.unwrap_or_default())).collect();
    assert_eq!(
        got,
        vec![
            ("tau_x = 0", "u_xxx".to_string()),
            ("tau_u = 0", "u_x*u_xxx".to_string()),
            ("xi_u = 0", "u_x*u_xx".to_string()),
            ("eta_uu = 0", "u_x^2".to_string()),
        ]
    );
    assert_eq!(common::classifying_member().as_deref(), Some("u_xx"));
}

#[test]
fn multiples_are_strict() {
    let t = common::classifying_target();
    let sys = determining_system(&DCEquation::generic(), Ansatz::Reduced).unwrap();
    let m = sys.iter().find(|d| d.monomial == [0, 1, 0]).unwrap();
    assert!(nonzero_multiple(&m.lhs, &t, &["f", "g", "h", "A", "B"]).is_some());
    // flipping the sign of one term breaks proportionality
    let tt = Canon::func(FuncAtom::new("tau", &[Var::T]).with_derivs(vec![1]));
    let wrong = t.add(&tt.mul(&Canon::int(2)));
    assert!(nonzero_multiple(&m.lhs, &wrong, &["f", "g", "h", "A", "B"]).is_none());
    // a factor outside the allowed set is rejected
    assert!(nonzero_multiple(&c("x*u"), &c("u"), &["f"]).is_none());
    assert_eq!(nonzero_multiple(&c("f*A*u"), &c("u"), &["f", "A"]), Some(c("f*A")));
}

#[test]
fn reduced_system_agrees_with_criterion() {
    let e = eq("1", "1", "1", "1", "u");
    let sys = determining_system(&e, Ansatz::Reduced).unwrap();
    for f in ["d_t", "d_x", "t*d_x - d_u", "2*t*d_t + x*d_x - u*d_u", "t^2*d_t + t*x*d_x - (t*u + x)*d_u"] {
        let v = check_determining(&e, &sys, Ansatz::Reduced, &q(f)).unwrap();
        assert!(v.iter().all(|v| *v == Verdict::Zero), "{f}");
    }
    let v = check_determining(&e, &sys, Ansatz::Reduced, &q("x*d_x")).unwrap();
    assert!(v.contains(&Verdict::NonZero));
    assert!(check_determining(&e, &sys, Ansatz::Reduced, &q("u*d_t")).is_err());
}

#[test]
fn failure_residual_names_the_element() {
    let e = DCEquation::new(c("exp(x)"), Canon::one(), Canon::one(), opaque("A", Var::U), opaque("B", Var::U));
    let r = check_symmetry(&e, &VectorField::dx());
    assert_eq!(r.outcome, Outcome::Fail);
    assert!(!r.residual.is_zero());
    assert_eq!(r.residual, check_symmetry(&DCEquation::generic().with_relations(vec![]), &VectorField::dx()).residual.subst(
        &Bindings::new().func("f", &[Var::X], c("exp(x)")).func("g", &[Var::X], Canon::one()).func("h", &[Var::X], Canon::one())
    ).unwrap());
}

#[test]
fn kernel() {
    assert!(kernel_check(&DCEquation::generic()));
    assert!(kernel_check(&eq("exp(x)", "x^2", "x", "u^2", "exp(u)")));
    assert!(!kernel_check(&eq("1", "1", "1", "u", "t")));
    assert!(!kernel_check(&eq("exp(t*x)", "1", "1", "u", "0")));
}

#[test]
fn check_heat_negative() {
    let heat = eq("1", "1", "1", "1", "0");
    let r = check_symmetry(&heat, &q("x*d_t"));
    assert_eq!(r.outcome, Outcome::Fail);
    assert!(!r.residual.is_zero());
}

#[test]
fn scaling_keeps_verdict() {
    let e = eq("1", "1", "1", "1", "u");
    for f in ["t^2*d_t + t*x*d_x - (t*u + x)*d_u", "x*d_x", "d_u"] {
        let base = check_symmetry(&e, &q(f)).outcome;
        for k in ["3", "-1/2"] {
            assert_eq!(check_symmetry(&e, &q(f).scale(&c(k))).outcome, base);
        }
    }
}

#[test]
fn five_dimensional_closure() {
    let basis = [
        "d_t",
        "d_x",
        "t*d_x - d_u",
        "2*t*d_t + x*d_x - u*d_u",
        "t^2*d_t + t*x*d_x - (t*u + x)*d_u",
    ]
    .map(q);
    let sc = closure_check(&basis).unwrap();
    assert_eq!(sc.n, 5);
    assert!(sc.is_antisymmetric() && sc.satisfies_jacobi());
    let e = eq("1", "1", "1", "1", "u");
    for a in &basis {
        for b in &basis {
            assert_eq!(check_symmetry(&e, &bracket(a, b)).outcome, Outcome::Pass);
        }
    }
}

#[test]
fn closure_errors() {
    match closure_check(&[q("d_t"), q("t^2*d_t")]) {
        Err(ClosureError::NotClosed { residual, .. }) => assert_eq!(residual, q("2*t*d_t")),
        other => panic!("{other:?}"),
    }
    assert!(matches!(closure_check(&[q("d_t"), q("2*d_t")]), Err(ClosureError::DecompositionAmbiguous)));
}
