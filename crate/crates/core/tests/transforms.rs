use dcsym::equation::DCEquation;
use dcsym::expr::{is_zero, Canon, Chart, Var, Verdict};
use dcsym::parser::parse_expr;
use dcsym::symmetry::{check_symmetry, VectorField};
use dcsym::transforms::{
    act_equivalence, act_point, compose, invert, pushforward, transport_check, verify_maps, EquivTransformation,
    PointTransformation, TransformError,
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

fn map(t: &str, x: &str, u: &str) -> PointTransformation {
    PointTransformation::new(c(t), c(x), c(u), Chart::Positive).unwrap()
}

fn same(a: &Canon, b: &Canon) -> bool {
    is_zero(&a.sub(b), &[]) == Verdict::Zero
}

fn same_eq(a: &DCEquation, b: &DCEquation) -> bool {
    a.elements().iter().zip(b.elements().iter()).all(|((_, x), (_, y))| same(x, y))
}

fn ks(v: [&str; 4]) -> [Canon; 4] {
    v.map(c)
}

#[test]
fn equivalence_action() {
    let e = DCEquation::generic();
    assert!(same_eq(&act_equivalence(&EquivTransformation::identity(), &e).unwrap(), &e));

    let e = eq("1", "1", "1", "A", "B");
    let phi = EquivTransformation::gauge(ks(["1", "1", "1", "1"])).unwrap();
    let out = act_equivalence(&phi, &e).unwrap();
    assert!(same_eq(&out, &eq("exp(-x)", "exp(-x)", "exp(-x)", "A", "B + A")));

    let th1 = EquivTransformation::new(ks(["2", "1", "3", "0"]), ks(["5", "7", "11", "0"]), c("2*x")).unwrap();
    let out = act_equivalence(&th1, &DCEquation::generic()).unwrap();
    assert!(same(&out.f, &c("5*2*f(x/2)/2")));
    assert!(same(&out.g, &c("5/7*2*g(x/2)")));
    assert!(same(&out.h, &c("5/11*h(x/2)")));
    assert!(same(&out.a, &c("7*A(u/3)")));
    assert!(same(&out.b, &c("11*B(u/3)")));
}

#[test]
fn equivalence_output_is_an_image() {
    let e = eq("exp(x)", "x^2", "x", "u^2", "u");
    let cases = [
        EquivTransformation::new(ks(["2", "1", "3", "5"]), ks(["5", "7", "11", "2"]), c("x^3")).unwrap(),
        EquivTransformation::new(ks(["1", "0", "1", "0"]), ks(["1", "1", "1", "0"]), c("ln(x)")).unwrap(),
        EquivTransformation::new(ks(["-1", "3", "1/2", "0"]), ks(["2", "3", "1", "-1"]), c("exp(x) + 1")).unwrap(),
    ];
    for phi in cases {
        let out = act_equivalence(&phi, &e).unwrap();
        assert!(out.validate().passed());
        let r = verify_maps(&phi.point_part(), &e, &out);
        assert_eq!(r.outcome, Outcome::Pass, "{:?} residual {}", phi, r.residual);
    }
}

#[test]
fn gauge_predicate() {
    assert!(EquivTransformation::gauge(ks(["2", "3", "5", "7"])).unwrap().is_gauge());
    assert!(EquivTransformation::identity().is_gauge());
    let shifted = EquivTransformation::new(ks(["1", "4", "1", "0"]), ks(["1", "1", "1", "0"]), c("x")).unwrap();
    assert!(!shifted.is_gauge());
    assert!(EquivTransformation::gauge(ks(["0", "1", "1", "0"])).is_err());
}

#[test]
fn gauge_multiplier() {
    let e = DCEquation::generic();
    let phi = EquivTransformation::gauge(ks(["3", "2", "5", "7"])).unwrap();
    let out = act_equivalence(&phi, &e).unwrap();
    let r = verify_maps(&PointTransformation::identity(), &e, &out);
    assert_eq!(r.outcome, Outcome::Pass);
    let expect = c("3").mul(&phi.phi(&e).unwrap());
    assert!(same(r.multiplier.as_ref().unwrap(), &expect));
    assert!(same(&out.residual(), &expect.mul(&e.residual())));
}

#[test]
fn gauged_subgroups() {
    let d: [Canon; 9] = ["2", "1", "3", "0", "5", "1", "7", "0", "11"].map(c);
    let e = eq("exp(x)", "1", "x", "u^2", "u");
    let phi = EquivTransformation::preserving_g1(&d, &e.h).unwrap();
    let out = act_equivalence(&phi, &e).unwrap();
    assert!(out.gauge_check(dcsym::equation::Gauge::GIs1));
    assert_eq!(verify_maps(&phi.point_part(), &e, &out).outcome, Outcome::Pass);

    let e = eq("exp(x)", "x", "x", "u^2", "u");
    let phi = EquivTransformation::preserving_gh(&["2", "1", "3", "0", "5", "1", "7", "2", "11"].map(c)).unwrap();
    let out = act_equivalence(&phi, &e).unwrap();
    assert!(out.gauge_check(dcsym::equation::Gauge::GIsH));
    assert_eq!(verify_maps(&phi.point_part(), &e, &out).outcome, Outcome::Pass);
    assert!(same(&out.a, &c("35*((u-0)/3)^2")));
    // the A-scaling without the delta7 factor is not an image
    let mut wrong = out.clone();
    wrong.a = c("5*(u/3)^2");
    assert_eq!(verify_maps(&phi.point_part(), &e, &wrong).outcome, Outcome::Fail);

    let e = eq("x^2", "1", "x", "A", "B");
    let out = act_equivalence(&EquivTransformation::bridge(&e.h).unwrap(), &e).unwrap();
    assert!(out.gauge_check(dcsym::equation::Gauge::GIsH));
}

#[test]
fn point_action() {
    let e = eq("1", "1", "1", "A", "1");
    let img = act_point(&map("t", "x + t", "u"), &e).unwrap();
    let out = img.equation.unwrap();
    assert!(out.b.is_zero());
    assert!(same(&out.f.div(&out.g).unwrap(), &c("1")));

    let e = eq("1", "1", "x", "A", "1");
    let img = act_point(&map("exp(2*t)/2", "x*exp(t)", "u"), &e).unwrap();
    let out = img.equation.unwrap();
    assert!(out.b.is_zero());
    assert!(same(&out.f, &c("1")) && same(&out.g, &c("1")));

    let e = DCEquation::generic();
    let img = act_point(&PointTransformation::identity(), &e).unwrap();
    assert_eq!(img.residual, e.residual());
}

#[test]
fn maps_between_equations() {
    let d = eq("x^(-3)", "1", "1", "exp(u)", "0");
    let a = eq("1", "1", "1", "exp(u)", "0");
    let psi = map("t*sign(x)", "1/x", "u - ln(abs(x))");
    let r = verify_maps(&psi, &d, &a);
    assert_eq!(r.outcome, Outcome::Pass, "{}", r.residual);

    let r = verify_maps(&PointTransformation::identity(), &a, &eq("1", "1", "1", "exp(u)", "1"));
    assert_eq!(r.outcome, Outcome::Fail);
    assert!(!r.residual.is_zero());
}

#[test]
fn pushforward_examples() {
    let psi = map("t", "x + t", "u");
    assert_eq!(pushforward(&psi, &VectorField::dt()).unwrap(), q("d_t + d_x"));
    assert_eq!(pushforward(&psi, &q("2*t*d_t + (x - t)*d_x")).unwrap(), q("2*t*d_t + x*d_x"));
    let f = q("x*u*d_u + t*d_x");
    assert_eq!(pushforward(&PointTransformation::identity(), &f).unwrap(), f);

    let e1 = eq("1", "1", "1", "A", "1");
    let e2 = eq("1", "1", "1", "A", "0");
    for f in ["d_t", "d_x", "2*t*d_t + (x - t)*d_x"] {
        assert_eq!(transport_check(&psi, &q(f), &e1, &e2).outcome, Outcome::Pass);
        assert_eq!(check_symmetry(&e2, &pushforward(&psi, &q(f)).unwrap()).outcome, Outcome::Pass);
    }
}

#[test]
fn group_laws() {
    let psi = map("exp(2*t)/2", "x*exp(t)", "exp(x)*u + t");
    let id = compose(&psi, &invert(&psi).unwrap()).unwrap();
    assert_eq!(id.same_as(&PointTransformation::identity(), Chart::Positive), Verdict::Zero);
    let id = compose(&invert(&psi).unwrap(), &psi).unwrap();
    assert_eq!(id.same_as(&PointTransformation::identity(), Chart::Positive), Verdict::Zero);

    let s = compose(&map("t", "x + 2", "u"), &map("t", "x + 3", "u")).unwrap();
    assert_eq!(s.same_as(&map("t", "x + 5", "u"), Chart::Positive), Verdict::Zero);

    let bridge = EquivTransformation::bridge(&c("1")).unwrap().point_part();
    let shift = map("t", "x + t", "u");
    assert_eq!(compose(&bridge, &shift).unwrap().same_as(&shift, Chart::Positive), Verdict::Zero);
}

#[test]
fn structural_rejection() {
    let r = PointTransformation::new(c("t"), c("x + u"), c("u"), Chart::Positive);
    assert!(matches!(r, Err(TransformError::NotProjectible(_))));
    let r = PointTransformation::new(c("t + x"), c("x"), c("u"), Chart::Positive);
    assert!(matches!(r, Err(TransformError::NotProjectible(_))));
    let r = PointTransformation::new(c("t"), c("x"), c("u^2"), Chart::Positive);
    assert!(matches!(r, Err(TransformError::NotLinearInU(_))));
    let r = PointTransformation::new(c("t"), c("t"), c("u"), Chart::Positive);
    assert!(matches!(r, Err(TransformError::Degenerate(_))));
    let _ = Var::X;
}
