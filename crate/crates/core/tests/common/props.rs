//! Randomized suites, each run for a requested number of cases.

use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRunner};

use dcsym::expr::{reduce_mod, Bindings, Canon, Expr, FuncAtom, SideRelation, Var};
use dcsym::jet::{prolong, total_derivative};
use dcsym::parser::{format_canon, format_expr, parse_expr};
use dcsym::symmetry::{bracket, VectorField};

const LEAVES: [&str; 16] = [
    "x", "t", "u", "u_x", "u_xx", "u_t", "p", "f", "g_x", "A", "B_u", "2", "-3", "1/2", "h", "h_x",
];

pub fn expr_text() -> impl Strategy<Value = String> {
    let leaf = proptest::sample::select(LEAVES.to_vec()).prop_map(str::to_string);
    leaf.prop_recursive(3, 12, 3, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a}) + ({b})")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a})*({b})")),
            (inner.clone(), -2i32..4).prop_map(|(a, n)| format!("({a})^({n})")),
            inner.clone().prop_map(|a| format!("exp({a})")),
            (inner, 1i32..4).prop_map(|(a, n)| format!("({a})*x^({n}/3)")),
        ]
    })
}

/// Polynomial in `t, x, u` with small integer coefficients.
pub fn poly_text() -> impl Strategy<Value = String> {
    proptest::collection::vec((-3i32..4, 0u32..3, 0u32..3, 0u32..2), 1..4).prop_map(|ts| {
        ts.iter().map(|(k, a, b, c)| format!("({k})*t^{a}*x^{b}*u^{c}")).collect::<Vec<_>>().join(" + ")
    })
}

pub fn field() -> impl Strategy<Value = VectorField> {
    (poly_text(), poly_text(), poly_text()).prop_map(|(a, b, c)| {
        VectorField::new(canon(&a).unwrap(), canon(&b).unwrap(), canon(&c).unwrap())
    })
}

pub fn canon(s: &str) -> Option<Canon> {
    parse_expr(s).ok()?.normalize().ok()
}

fn runner(cases: u32) -> TestRunner {
    TestRunner::new(Config { cases, max_global_rejects: cases * 20, failure_persistence: None, ..Config::default() })
}

fn check(ok: bool, what: impl FnOnce() -> String) -> Result<(), TestCaseError> {
    if ok {
        Ok(())
    } else {
        Err(TestCaseError::fail(what()))
    }
}

fn parsed(s: &str) -> Result<Canon, TestCaseError> {
    canon(s).ok_or_else(|| TestCaseError::reject("outside the fragment"))
}

fn finish(r: Result<(), proptest::test_runner::TestError<impl std::fmt::Debug>>) -> Result<(), String> {
    r.map_err(|e| e.to_string())
}

pub fn normalization(cases: u32) -> Result<(), String> {
    finish(runner(cases).run(&expr_text(), |s| {
        let c = parsed(&s)?;
        let again = Expr::from_canon(&c).normalize().map_err(|e| TestCaseError::fail(e.to_string()))?;
        check(again == c, || format!("{s}: {c} vs {again}"))
    }))
}

pub fn round_trip(cases: u32) -> Result<(), String> {
    finish(runner(cases).run(&expr_text(), |s| {
        let e = parse_expr(&s).map_err(|e| TestCaseError::fail(e.to_string()))?;
        let Ok(c) = e.normalize() else { return Err(TestCaseError::reject("outside the fragment")) };
        let back = parse_expr(&format_expr(&e)).map_err(|e| TestCaseError::fail(e.to_string()))?;
        check(back.normalize().ok() == Some(c.clone()), || format!("tree {s}"))?;
        let back = parse_expr(&format_canon(&c)).map_err(|e| TestCaseError::fail(e.to_string()))?;
        check(back.normalize().ok() == Some(c.clone()), || format!("canon {s} -> {}", format_canon(&c)))
    }))
}

fn dx(e: &Canon) -> Canon {
    total_derivative(e, Var::X).unwrap()
}

fn dt(e: &Canon) -> Canon {
    total_derivative(e, Var::T).unwrap()
}

/// Recursive prolongation formula.
pub fn oracle(f: &VectorField) -> [Canon; 4] {
    let v = Canon::var;
    let et = dt(&f.eta).sub(&v(Var::UT).mul(&dt(&f.tau))).sub(&v(Var::UX).mul(&dt(&f.xi)));
    let ex = dx(&f.eta).sub(&v(Var::UT).mul(&dx(&f.tau))).sub(&v(Var::UX).mul(&dx(&f.xi)));
    let exx = dx(&ex).sub(&v(Var::UTX).mul(&dx(&f.tau))).sub(&v(Var::UXX).mul(&dx(&f.xi)));
    let etx = dx(&et).sub(&v(Var::UTT).mul(&dx(&f.tau))).sub(&v(Var::UTX).mul(&dx(&f.xi)));
    [et, ex, exx, etx]
}

pub fn prolongation(cases: u32) -> Result<(), String> {
    finish(runner(cases).run(&(field(), field(), -3i64..4), |(a, b, k)| {
        let p = prolong(&a);
        let got = [p.eta_t(), p.eta_x(), p.eta_xx(), p.eta_tx()].map(Clone::clone);
        check(got == oracle(&a), || format!("oracle {a}"))?;
        let q = prolong(&a.scale(&Canon::int(k)).add(&b));
        let pb = prolong(&b);
        for (x, (y, z)) in [q.eta_t(), q.eta_xx()].iter().zip([(p.eta_t(), pb.eta_t()), (p.eta_xx(), pb.eta_xx())]) {
            check(**x == y.mul(&Canon::int(k)).add(z), || format!("linearity {a}; {b}"))?;
        }
        Ok(())
    }))
}

pub fn brackets(cases: u32) -> Result<(), String> {
    finish(runner(cases).run(&(field(), field(), field(), -3i64..4), |(a, b, c, k)| {
        let k = Canon::int(k);
        check(bracket(&a, &b) == bracket(&b, &a).scale(&Canon::int(-1)), || "antisymmetry".into())?;
        let lhs = bracket(&a.scale(&k).add(&b), &c);
        let rhs = bracket(&a, &c).scale(&k).add(&bracket(&b, &c));
        check(lhs == rhs, || "bilinearity".into())?;
        let j = bracket(&a, &bracket(&b, &c)).add(&bracket(&b, &bracket(&c, &a))).add(&bracket(&c, &bracket(&a, &b)));
        check(j.is_zero(), || format!("jacobi {a}; {b}; {c}"))
    }))
}

/// `h_xx = 2 p h^3 + 2 h_x^2 / h`.
pub fn relation() -> SideRelation {
    SideRelation::new(
        FuncAtom::new("h", &[Var::X]).with_derivs(vec![2]),
        canon("2*p*h^3 + 2*h_x^2/h").unwrap(),
    )
}

pub fn reduction(cases: u32) -> Result<(), String> {
    let rels = [relation()];
    finish(runner(cases).run(&(expr_text(), 0usize..3), |(s, n)| {
        let c = parsed(&s)?.diff_n(Var::X, n);
        let once = reduce_mod(&c, &rels).map_err(|e| TestCaseError::fail(e.to_string()))?;
        let twice = reduce_mod(&once, &rels).map_err(|e| TestCaseError::fail(e.to_string()))?;
        check(once == twice, || s.clone())
    }))
}

pub fn calculus(cases: u32) -> Result<(), String> {
    finish(runner(cases).run(&(expr_text(), expr_text(), -3i64..4), |(s1, s2, k)| {
        let (a, b) = (parsed(&s1)?, parsed(&s2)?);
        let k = Canon::int(k);
        for v in [Var::X, Var::U, Var::UX] {
            check(a.mul(&k).add(&b).diff(v) == a.diff(v).mul(&k).add(&b.diff(v)), || format!("linearity {s1}; {s2}"))?;
        }
        check(dt(&dx(&a)) == dx(&dt(&a)), || format!("commute {s1}"))?;
        let bind = Bindings::new().func("f", &[Var::X], canon("x^2 + exp(x)").unwrap());
        let l = a.subst(&bind).map_err(|e| TestCaseError::fail(e.to_string()))?.diff(Var::X);
        let r = a.diff(Var::X).subst(&bind).map_err(|e| TestCaseError::fail(e.to_string()))?;
        check(l == r, || format!("subst {s1}"))
    }))
}
