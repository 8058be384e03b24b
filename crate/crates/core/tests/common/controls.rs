//! Deliberately wrong inputs; each must be rejected.

use std::path::{Path, PathBuf};

use dcsym::catalog::{Catalog, Filter};
use dcsym::parser::{parse_expr, parse_field, ElementSpec, Scope};
use dcsym::transforms::verify_maps;
use dcsym::Outcome;

fn with_field(cat: &Catalog, id: &str, name: &str, text: &str) -> Outcome {
    let mut case = cat.case(id).unwrap().clone();
    let slot = case.spec.symmetries.iter_mut().find(|(n, _)| n == name).unwrap();
    slot.1 = parse_field(text, &Scope::default()).unwrap();
    cat.verify_case(&case, &[]).unwrap().outcome
}

fn with_map(cat: &Catalog, id: &str, t: &str, x: &str, u: &str) -> Outcome {
    let mut tr = cat.transform(id).unwrap().clone();
    let m = tr.spec.map.as_mut().unwrap();
    m.t = parse_expr(t).unwrap();
    m.x = parse_expr(x).unwrap();
    m.u = parse_expr(u).unwrap();
    let (src, tgt, psi) = cat.transform_parts(&tr).unwrap();
    verify_maps(&psi, &src.equation, &tgt.equation).outcome
}

fn copy_dir(from: &Path, to: &Path) {
    std::fs::create_dir_all(to).unwrap();
    for entry in std::fs::read_dir(from).unwrap() {
        let p = entry.unwrap().path();
        let dst = to.join(p.file_name().unwrap());
        if p.is_dir() {
            copy_dir(&p, &dst);
        } else {
            std::fs::copy(&p, &dst).unwrap();
        }
    }
}

/// A copy of the shipped catalog with one operator of 1.4a altered.
pub fn corrupted_catalog(tag: &str) -> PathBuf {
    let root = std::env::temp_dir().join(format!("dcsym-corrupt-{tag}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&root);
    copy_dir(&dcsym::catalog::default_root(), &root);
    let file = root.join("table1").join("4a.case");
    let text = std::fs::read_to_string(&file).unwrap();
    let bad = text.replace("\"2*t*d_t + x*d_x\"", "\"2*t*d_t + 2*x*d_x\"");
    assert_ne!(text, bad);
    std::fs::write(&file, bad).unwrap();
    root
}

/// Name and observed outcome of every control.
pub fn negative_controls() -> Vec<(&'static str, Outcome)> {
    let cat = Catalog::load_default().unwrap();
    let mut out = vec![
        ("3'.14c with mu*x*d_x + d_u", with_field(&cat, "3'.14c", "Q2", "mu*x*d_x + d_u")),
        (
            "3'.14e with the t-free exponential",
            with_field(
                &cat,
                "3'.14e",
                "Q4",
                "exp(-(mu + 1)/(mu + 2))*((mu + 2)*x^(1/(mu + 2))*d_x - x^(-(mu + 1)/(mu + 2))*u*d_u)",
            ),
        ),
        (
            "T2.8 with t~ = exp(2t) t sign(x)/2",
            with_map(&cat, "T2.8", "exp(2*t)*t*sign(x)/2", "exp(-t)/x", "u - t - ln(abs(x))"),
        ),
        ("T3.5 with x~ = x - t", with_map(&cat, "T3.5", "t", "x - t", "u")),
    ];

    for mu in ["0", "2"] {
        let mut case = cat.case("2.3").unwrap().clone();
        case.spec.constraints.clear();
        let set = vec![("mu".to_string(), parse_expr(mu).unwrap().normalize().unwrap().as_q().unwrap())];
        let name = if mu == "0" { "2.3 at mu = 0" } else { "2.3 at mu = 2" };
        out.push((name, cat.verify_case(&case, &set).unwrap().outcome));
    }

    let mut case = cat.case("1.4a").unwrap().clone();
    if let Some(eq) = case.spec.equation.as_mut() {
        eq.b = ElementSpec::Expr(parse_expr("u").unwrap());
    }
    out.push(("1.4a with B = u", cat.verify_case(&case, &[]).unwrap().outcome));

    let root = corrupted_catalog("controls");
    let bad = Catalog::load(&root).unwrap();
    let s = bad.verify_all(&Filter { table: Some("1".into()), ..Filter::default() }, None).unwrap();
    out.push(("corrupted case file", s.outcome()));
    let _ = std::fs::remove_dir_all(&root);
    out
}
