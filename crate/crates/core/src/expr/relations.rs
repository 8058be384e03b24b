//! Differential side relations used as rewrite rules.

use std::collections::{BTreeMap, HashMap};

use super::*;

/// `target = replacement`, where `target` is a derivative of an opaque
/// function applied to its formal variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SideRelation {
    pub target: FuncAtom,
    pub replacement: Canon,
}

impl SideRelation {
    pub fn new(target: FuncAtom, replacement: Canon) -> SideRelation {
        SideRelation { target: target.bare(), replacement }
    }

    fn covers(&self, fa: &FuncAtom) -> bool {
        fa.name == self.target.name
            && fa.derivs.len() == self.target.derivs.len()
            && fa.derivs.iter().zip(&self.target.derivs).all(|(a, b)| a >= b)
    }
}

const MAX_PASSES: usize = 64;
const MAX_DEPTH: usize = 32;

struct Reducer<'a> {
    rels: &'a [SideRelation],
    memo: HashMap<(Sym, Vec<u8>), Canon>,
}

impl Reducer<'_> {
    fn rel_for(&mut self, fa: &FuncAtom, depth: usize) -> Result<Option<Canon>> {
        if depth > MAX_DEPTH {
            return Err(ExprError::NonTerminating);
        }
        let key = (fa.name.clone(), fa.derivs.clone());
        if let Some(c) = self.memo.get(&key) {
            return Ok(Some(c.clone()));
        }
        let Some(rel) = self.rels.iter().find(|r| r.covers(fa)) else {
            return Ok(None);
        };
        let out = if fa.derivs == rel.target.derivs {
            self.reduce(&rel.replacement, depth + 1)?
        } else {
            let i = fa.derivs.iter().zip(&rel.target.derivs).position(|(a, b)| a > b).unwrap();
            let mut lower = fa.derivs.clone();
            lower[i] -= 1;
            let base = self.rel_for(&fa.bare().with_derivs(lower), depth + 1)?.unwrap();
            let d = base.diff(fa.formal[i]);
            self.reduce(&d, depth + 1)?
        };
        self.memo.insert(key, out.clone());
        Ok(Some(out))
    }

    fn reduce(&mut self, e: &Canon, depth: usize) -> Result<Canon> {
        if depth > MAX_DEPTH {
            return Err(ExprError::NonTerminating);
        }
        let mut e = e.clone();
        for _ in 0..MAX_PASSES {
            let mut found: Vec<Arc<FuncAtom>> = Vec::new();
            e.visit_atoms(&mut |a| {
                if let Atom::Func(fa) = a {
                    if self.rels.iter().any(|r| r.covers(fa)) && !found.contains(fa) {
                        found.push(fa.clone());
                    }
                }
            });
            if found.is_empty() {
                return Ok(e);
            }
            found.sort_by(|a, b| b.order().cmp(&a.order()).then_with(|| a.name.cmp(&b.name)));
            let mut map = BTreeMap::new();
            for fa in found {
                let r = self.rel_for(&fa.bare(), depth + 1)?.unwrap();
                let r = match &fa.args {
                    None => r,
                    Some(args) => {
                        let pairs: Vec<(Var, Canon)> =
                            fa.formal.iter().copied().zip(args.iter().cloned()).collect();
                        r.subst_vars(&pairs)?
                    }
                };
                map.insert(Atom::Func(fa), r);
            }
            e = e.subst_atoms(&map)?;
        }
        Err(ExprError::NonTerminating)
    }
}

/// Eliminate every target atom (and its derivatives) from `e`.
pub fn reduce_mod(e: &Canon, rels: &[SideRelation]) -> Result<Canon> {
    if rels.is_empty() {
        return Ok(e.clone());
    }
    Reducer { rels, memo: HashMap::new() }.reduce(e, 0)
}
