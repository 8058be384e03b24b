use dcsym::expr::{Canon, Expr, Var};
use dcsym::parser::{format_canon, format_expr, parse_case_file, parse_expr, parse_field, parse_source, CaseError, ElementSpec, Scope};
use dcsym::symmetry::VectorField;

fn c(s: &str) -> Canon {
    parse_expr(s).unwrap().normalize().unwrap()
}

#[test]
fn exp_of_product() {
    let e = parse_expr("exp(p*x)").unwrap();
    let Expr::Exp(inner) = e else { panic!("{e:?}") };
    let Expr::Product(fs) = *inner else { panic!() };
    assert_eq!(fs.len(), 2);
    assert!(fs.iter().any(|f| matches!(f, Expr::Param(p) if p.as_ref() == "p")));
    assert!(fs.contains(&Expr::Var(Var::X)));
}

#[test]
fn field_sugar() {
    let q = VectorField::parse("2*t*d_t + x*d_x").unwrap();
    assert_eq!(q, VectorField::new(c("2*t"), c("x"), Canon::zero()));
    let q = VectorField::parse("t^2*d_t + t*x*d_x - (t*u + x)*d_u").unwrap();
    assert_eq!(q.eta, c("-t*u - x"));
    let plain = parse_field("1, x, 0", &Scope::default()).unwrap();
    assert_eq!(plain.xi, parse_expr("x").unwrap());
}

#[test]
fn quotient_with_log() {
    let e = parse_expr("x^(-2)/ln(abs(x))").unwrap();
    let Expr::Product(fs) = &e else { panic!("{e:?}") };
    assert_eq!(fs.len(), 2);
    assert!(matches!(&fs[1], Expr::Pow(b, _) if matches!(**b, Expr::Ln(_))));
}

#[test]
fn precedence() {
    assert_eq!(c("2^3^2"), c("512"));
    assert_eq!(c("-2^2"), c("-4"));
    assert_eq!(c("1 - 2 - 3"), c("-4"));
    assert_eq!(c("12/2/3"), c("2"));
    assert_eq!(c("2*3 + 4*5"), c("26"));
    assert_eq!(c("(-2)^2"), c("4"));
}

#[test]
fn syntax_errors_carry_spans() {
    for text in ["x +", "2*(x", "exp(", "x y", "3 $ 4", "d_t", "f(x", ")", "x^"] {
        let err = parse_expr(text).unwrap_err();
        assert!(err.span.start <= err.span.end && err.span.end <= text.len(), "{text}: {err:?}");
    }
    let err = parse_expr("x +").unwrap_err();
    assert!(!err.expected.is_empty());
}

#[test]
fn source_spans_nest() {
    let s = parse_source("exp(p*x) + 1", &Scope::default()).unwrap();
    assert_eq!(s.spans.span, 0..12);
    assert!(s.spans.children.iter().all(|k| k.span.end <= 12));
}

#[test]
fn formatting() {
    let sum = Expr::Sum(vec![Expr::Var(Var::X), Expr::Product(vec![Expr::int(2), Expr::Var(Var::T)])]);
    assert_eq!(format_expr(&sum), "2*t + x");
    assert_eq!(format_canon(&c("exp((p + q)*x)")), "exp((p + q)*x)");
    assert_eq!(format_canon(&Canon::zero()), "0");
    assert_eq!(format_canon(&c("x*exp(q*x)*exp(p*x)")), format_canon(&c("exp(p*x + q*x)*x")));
}

const CASE_2A: &str = r#"dcsym-case v1
# one row
[case]
id = "1.2a"

[params]
p = "1"

[equation]
f = "exp(p*x)"
h = "1"
A = "opaque"
B = "opaque"

[symmetries]
Q1 = "d_t"
Q2 = "p*t*d_t + d_x"
"#;

#[test]
fn case_file_row() {
    let s = parse_case_file(CASE_2A).unwrap();
    assert_eq!(s.id, "1.2a");
    let eq = s.equation.as_ref().unwrap();
    assert_eq!(eq.a, ElementSpec::Opaque);
    assert!(matches!(&eq.f, ElementSpec::Expr(e) if e.normalize().unwrap() == c("exp(p*x)")));
    assert_eq!(s.symmetries.len(), 2);
    assert_eq!(s.symmetries[1].0, "Q2");
}

#[test]
fn case_file_without_symmetries() {
    let s = parse_case_file("dcsym-case v1\n[equation]\nf = \"1\"\nh = \"1\"\nA = \"u\"\nB = \"0\"\n").unwrap();
    assert!(s.symmetries.is_empty());
    assert_eq!(s.expected.dimension, None);
}

#[test]
fn case_file_five_fields() {
    let text = r#"dcsym-case v1
[equation]
f = "1"
h = "1"
A = "1"
B = "u"
[symmetries]
Q1 = "d_t"
Q2 = "d_x"
Q3 = "t*d_x - d_u"
Q4 = "2*t*d_t + x*d_x - u*d_u"
Q5 = "t^2*d_t + t*x*d_x - (t*u + x)*d_u"
[expected]
dimension = "5"
"#;
    let s = parse_case_file(text).unwrap();
    assert_eq!(s.symmetries.len(), 5);
    assert_eq!(s.expected.dimension, Some(5));
}

#[test]
fn case_file_errors() {
    let undeclared = "dcsym-case v1\n[equation]\nf = \"exp(p*x)\"\nh = \"1\"\nA = \"u\"\nB = \"0\"\n";
    assert!(matches!(parse_case_file(undeclared), Err(CaseError::UndeclaredSymbol { name, .. }) if name == "p"));
    let dup = "dcsym-case v1\n[params]\np = \"1\"\np = \"2\"\n";
    assert!(matches!(parse_case_file(dup), Err(CaseError::DuplicateKey { line: 4, .. })));
    let unknown = "dcsym-case v1\n[params]\np = \"1\"\n[constraints]\nq = \"q != 0\"\n";
    assert!(matches!(parse_case_file(unknown), Err(CaseError::UnknownParameter { name, .. }) if name == "q"));
    assert!(matches!(parse_case_file("dcsym-case v2\n"), Err(CaseError::Syntax { line: 1, .. })));
    let bad = "dcsym-case v1\n[equation]\nf = \"x +\"\n";
    assert!(matches!(parse_case_file(bad), Err(CaseError::Expr { line: 3, .. })));
}
