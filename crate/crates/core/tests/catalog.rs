mod common;

use dcsym::catalog::{Catalog, CatalogError, Filter, Setting};
use dcsym::equation::Gauge;
use dcsym::expr::{Canon, Q};
use dcsym::parser::parse_expr;
use dcsym::symmetry::{check_symmetry, VectorField};
use dcsym::Outcome;

fn cat() -> Catalog {
    Catalog::load_default().unwrap()
}

fn c(s: &str) -> Canon {
    parse_expr(s).unwrap().normalize().unwrap()
}

fn rq(s: &str) -> Q {
    c(s).as_q().unwrap()
}

fn ids(cat: &Catalog, f: &str) -> Vec<String> {
    cat.list_cases(&f.parse().unwrap()).iter().map(|c| c.id.clone()).collect()
}

#[test]
fn listing() {
    let cat = cat();
    assert_eq!(ids(&cat, "table=1"), ["1.1", "1.2a", "1.2a'", "1.2b", "1.2c", "1.3", "1.4a", "1.4b", "1.4c"]);
    assert_eq!(ids(&cat, "").len(), cat.cases().len());
    let big = ids(&cat, "dim>=4");
    for id in ["2.7a", "2.7e", "3.14a", "3.14h", "3.15a", "3.15c", "3.16", "3'.14a", "2'.7c"] {
        assert!(big.contains(&id.to_string()), "{id}");
    }
    assert!(!big.contains(&"1.4a".to_string()));
    let primed = cat.list_cases(&Filter { gauge: Some(Gauge::GIsH), ..Filter::default() });
    assert!(!primed.is_empty() && primed.iter().all(|c| c.table.ends_with('\'')));
    assert_eq!(ids(&cat, "table=2p,dim=4"), ids(&cat, "table=2',dimension=4"));
}

#[test]
fn filter_errors() {
    assert!(matches!("colour=red".parse::<Filter>(), Err(CatalogError::UnknownFilterKey(k)) if k == "colour"));
    assert!(matches!("table".parse::<Filter>(), Err(CatalogError::BadFilter(_))));
    assert!(matches!("dim>=four".parse::<Filter>(), Err(CatalogError::BadFilter(_))));
}

#[test]
fn dimension_census() {
    let cat = cat();
    for (table, dims) in [("3", vec![2, 3, 4, 5]), ("1", vec![1, 2, 3]), ("2", vec![2, 3, 4])] {
        let mut got: Vec<usize> = cat.list_cases(&Filter { table: Some(table.into()), ..Filter::default() })
            .iter()
            .filter_map(|c| c.dimension())
            .collect();
        got.sort();
        got.dedup();
        assert_eq!(got, dims, "table {table}");
    }
    for c in cat.cases() {
        assert_eq!(c.dimension(), Some(c.spec.symmetries.len()), "{}", c.id);
    }
}

#[test]
fn instantiation() {
    let cat = cat();
    let inst = cat.instantiate(cat.case("1.2a").unwrap(), &[("p".into(), rq("1"))]).unwrap();
    assert_eq!(inst.equation.f, c("exp(x)"));
    let basis: Vec<VectorField> = inst.basis.iter().map(|(_, q)| q.clone()).collect();
    assert_eq!(basis, vec![VectorField::dt(), VectorField::parse("t*d_t + d_x").unwrap()]);

    let inst = cat.instantiate(cat.case("2.3").unwrap(), &[("p".into(), rq("1")), ("q".into(), rq("0"))]).unwrap();
    assert_eq!(inst.equation.relations.len(), 1);
    assert_eq!(inst.equation.relations[0].target.name.as_ref(), "h");
    assert_eq!(check_symmetry(&inst.equation, &inst.basis[1].1).outcome, Outcome::Pass);
}

#[test]
fn constraint_violations() {
    let cat = cat();
    let r = cat.instantiate(cat.case("3.14e").unwrap(), &[("mu".into(), rq("-4/3"))]);
    assert!(matches!(r, Err(CatalogError::ConstraintViolated { name, .. }) if name == "mu"));
    let r = cat.verify_case_id("2.6b", &[("p".into(), rq("-3"))]);
    assert!(matches!(r, Err(CatalogError::ConstraintViolated { .. })));
    let r = cat.instantiate(cat.case("1.2a").unwrap(), &[("zeta".into(), rq("1"))]);
    assert!(matches!(r, Err(CatalogError::UnknownParameter { .. })));
    assert!(matches!(cat.case("9.9"), Err(CatalogError::UnknownCase(_))));
}

#[test]
fn element_overrides() {
    let cat = cat();
    let set = Setting { params: vec![], elements: vec![("A".into(), c("u^2")), ("B".into(), c("u"))] };
    let inst = cat.instantiate_with(cat.case("1.2a").unwrap(), &set).unwrap();
    assert_eq!(inst.equation.a, c("u^2"));
    let set = Setting { params: vec![], elements: vec![("Z".into(), c("u"))] };
    assert!(cat.instantiate_with(cat.case("1.2a").unwrap(), &set).is_err());
}

#[test]
fn verify_examples() {
    let cat = cat();
    let r = cat.verify_case_id("1.4a", &[]).unwrap();
    assert_eq!((r.outcome, r.dimension), (Outcome::Pass, 3));
    let r = cat.verify_case_id("3.15a", &[]).unwrap();
    assert_eq!((r.outcome, r.dimension), (Outcome::Pass, 5));
    let r = cat.verify_case_id("3.16", &[]).unwrap();
    assert_eq!((r.outcome, r.dimension), (Outcome::Pass, 5));
    let r = cat.verify_case_id("1.2a", &[("p".into(), rq("1"))]).unwrap();
    assert_eq!(r.outcome, Outcome::Pass);
    let r = cat.verify_case_id("3'.4", &[]).unwrap();
    assert_eq!(r.outcome, Outcome::Pass);
}

#[test]
fn transformation_examples() {
    let cat = cat();
    for id in ["T1.4", "T1.5", "T2.8", "X.1"] {
        let r = cat.verify_additional_equivalence(cat.transform(id).unwrap()).unwrap();
        assert_eq!(r.outcome, Outcome::Pass, "{r}");
        assert!(r.checks.len() > 1);
    }
    let t = cat.transform("T1.4").unwrap();
    assert_eq!((t.source.as_str(), t.target.as_str()), ("1.4b", "1.4a"));
}

#[test]
fn twins_and_chains() {
    let cat = cat();
    let r = cat.verify_twin(cat.case("2'.2").unwrap()).unwrap();
    assert_eq!(r.outcome, Outcome::Pass, "{r}");
    let r = cat.verify_chain(cat.case("2'.7e").unwrap()).unwrap();
    assert_eq!(r.outcome, Outcome::Pass, "{r}");
    let r = cat.verify_chain(cat.case("3.14e").unwrap()).unwrap();
    assert_eq!(r.outcome, Outcome::Pass, "{r}");
}

#[test]
fn ids_sort_naturally() {
    let mut v = vec!["3.13a", "1.2a'", "3.2", "1.2a", "T2.10", "T2.8", "2'.1"];
    v.sort_by(|a, b| dcsym::catalog::id_order(a, b));
    assert_eq!(v, ["1.2a", "1.2a'", "2'.1", "3.2", "3.13a", "T2.8", "T2.10"]);
}

#[test]
fn corrupted_file_fails() {
    let root = common::controls::corrupted_catalog("catalog");
    let bad = Catalog::load(&root).unwrap();
    let s = bad.verify_all(&"table=1".parse().unwrap(), Some(2)).unwrap();
    let r = s.cases.iter().find(|c| c.id == "1.4a").unwrap();
    assert_eq!(r.outcome, Outcome::Fail);
    assert!(r.residual().is_some());
    assert_eq!(s.outcome(), Outcome::Fail);
    std::fs::remove_dir_all(&root).unwrap();
}

#[test]
fn altered_inputs_are_rejected() {
    for (name, o) in common::controls::negative_controls() {
        assert_eq!(o, Outcome::Fail, "{name}");
    }
}
