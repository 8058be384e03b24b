//! Exact linear systems over the rationals.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::expr::{Atom, Canon, Mono, Q};

/// Gauss-Jordan elimination of `rows * c = rhs`.
pub(crate) enum Solution {
    Unique(Vec<Q>),
    /// Consistent, with free columns.
    Underdetermined,
    Inconsistent,
}

pub(crate) fn solve(mut rows: Vec<Vec<Q>>, mut rhs: Vec<Q>, n: usize) -> Solution {
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..n {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][col].is_zero()) else { continue };
        rows.swap(r, p);
        rhs.swap(r, p);
        let inv = Q::one() / &rows[r][col];
        for k in 0..n {
            rows[r][k] = &rows[r][k] * &inv;
        }
        rhs[r] = &rhs[r] * &inv;
        for i in 0..rows.len() {
            if i != r && !rows[i][col].is_zero() {
                let f = rows[i][col].clone();
                for k in 0..n {
                    let d = &rows[r][k] * &f;
                    rows[i][k] -= d;
                }
                let d = &rhs[r] * &f;
                rhs[i] -= d;
            }
        }
        pivots.push(col);
        r += 1;
    }
    if rhs[r..].iter().any(|q| !q.is_zero()) {
        return Solution::Inconsistent;
    }
    let mut out = vec![Q::zero(); n];
    for (i, &c) in pivots.iter().enumerate() {
        out[c] = rhs[i].clone();
    }
    if pivots.len() == n {
        Solution::Unique(out)
    } else {
        Solution::Underdetermined
    }
}

/// Split `e`, linear in the parameters `unknowns`, into equations: one
/// per monomial in the remaining atoms.  Returns `None` when `e` is not
/// linear in the unknowns.
pub(crate) fn linear_equations(e: &Canon, unknowns: &[Atom]) -> Option<(Vec<Vec<Q>>, Vec<Q>)> {
    let n = unknowns.len();
    let mut eqs: BTreeMap<Mono, (Vec<Q>, Q)> = BTreeMap::new();
    for (m, k) in e.terms() {
        let mut rest = m.clone();
        let mut slot = None;
        for (i, u) in unknowns.iter().enumerate() {
            if let Some(p) = rest.f.remove(u) {
                if slot.is_some() || p.as_q().is_none_or(|q| !q.is_one()) {
                    return None;
                }
                slot = Some(i);
            }
        }
        let row = eqs.entry(rest).or_insert_with(|| (vec![Q::zero(); n], Q::zero()));
        match slot {
            Some(i) => row.0[i] += k,
            None => row.1 -= k,
        }
    }
    let (rows, rhs) = eqs.into_values().unzip();
    Some((rows, rhs))
}
