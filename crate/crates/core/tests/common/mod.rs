//! Helpers shared by the integration tests.

#![allow(dead_code)]

pub mod controls;
pub mod props;

use dcsym::equation::{opaque, DCEquation};
use dcsym::expr::{Bindings, Canon, FuncAtom, Var};
use dcsym::symmetry::{determining_system, nonzero_multiple, Ansatz, DeterminingEquation};

const TXU: [Var; 3] = [Var::T, Var::X, Var::U];
const ELEMENTS: [&str; 5] = ["f", "g", "h", "A", "B"];

fn d(name: &str, formal: &[Var], derivs: &[u8]) -> Canon {
    Canon::func(FuncAtom::new(name, formal).with_derivs(derivs.to_vec()))
}

/// Index of the first member that is a nonzero element multiple of `target`.
fn find(sys: &[Canon], target: &Canon) -> Option<usize> {
    sys.iter().position(|l| nonzero_multiple(l, target, &ELEMENTS).is_some())
}

/// Each classical conclusion paired with the monomial it was read off.
pub fn general_conclusions() -> Vec<(&'static str, Option<String>)> {
    let e = DCEquation::generic();
    let sys = determining_system(&e, Ansatz::General).unwrap();
    let lhs: Vec<Canon> = sys.iter().map(|d| d.lhs.clone()).collect();
    let text = |sys: &[DeterminingEquation], i: Option<usize>| i.map(|i| sys[i].monomial_text());
    let mut out = vec![
        ("tau_x = 0", text(&sys, find(&lhs, &d("tau", &TXU, &[0, 1, 0])))),
        ("tau_u = 0", text(&sys, find(&lhs, &d("tau", &TXU, &[0, 0, 1])))),
    ];

    let b = Bindings::new().func("tau", &TXU, d("tau", &[Var::T], &[0]));
    let lhs: Vec<Canon> = lhs.iter().map(|l| l.subst(&b).unwrap()).collect();
    out.push(("xi_u = 0", text(&sys, find(&lhs, &d("xi", &TXU, &[0, 0, 1])))));

    let b = Bindings::new().func("xi", &TXU, d("xi", &[Var::T, Var::X], &[0, 0]));
    let mut hit = None;
    for (k, l) in lhs.iter().enumerate() {
        let l = l.subst(&b).unwrap();
        if find(&l.split_func("A"), &d("eta", &TXU, &[0, 0, 2])).is_some() {
            hit = Some(k);
            break;
        }
    }
    out.push(("eta_uu = 0", text(&sys, hit)));
    out
}

/// The classifying equation of the reduced ansatz, divided through by `A g`.
pub fn classifying_target() -> Canon {
    let f = opaque("f", Var::X);
    let g = opaque("g", Var::X);
    let a = opaque("A", Var::U);
    let tx = [Var::T, Var::X];
    let xi = d("xi", &tx, &[0, 0]);
    let eta = d("eta1", &tx, &[0, 0]).mul(&Canon::var(Var::U)).add(&d("eta0", &tx, &[0, 0]));
    xi.mul(&f.diff(Var::X)).div(&f).unwrap()
        .sub(&xi.mul(&g.diff(Var::X)).div(&g).unwrap())
        .sub(&d("tau", &[Var::T], &[1]))
        .add(&Canon::int(2).mul(&xi.diff(Var::X)))
        .sub(&eta.mul(&a.diff(Var::U)).div(&a).unwrap())
}

/// Monomial of the reduced-ansatz member proportional to the classifying
/// equation.
pub fn classifying_member() -> Option<String> {
    let sys = determining_system(&DCEquation::generic(), Ansatz::Reduced).unwrap();
    let target = classifying_target();
    sys.iter().find(|d| nonzero_multiple(&d.lhs, &target, &ELEMENTS).is_some()).map(|d| d.monomial_text())
}
