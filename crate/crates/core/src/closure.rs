//! The closure of a formula set: every subformula whose parameters lie in
//! `P = parameters_star(S)`.
//!
//! Members are stored children-first, so any pass that walks the universe in
//! index order sees the immediate subformulas and substitution instances of a
//! formula before the formula itself.

use rustc_hash::FxHashMap as HashMap;

use thiserror::Error;

use crate::syntax::{parameters_star, substitute, Formula, Node, ParamSet, Store};

pub const DEFAULT_CLOSURE_CAP: usize = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("closure exceeds the cap of {cap} formulas")]
pub struct ResourceLimit {
    pub cap: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize)]
pub struct ClosureStats {
    /// Number of formulas in the closure.
    pub size: usize,
    /// Number of parameters.
    pub params: usize,
    /// Maximal quantifier depth over the input set.
    pub depth: usize,
    /// Total symbol length of the (deduplicated) input set.
    pub length: usize,
    /// Total symbol length of the closure.
    pub closure_length: usize,
}

impl ClosureStats {
    /// `length * params^depth`, saturating.
    pub fn size_bound(&self) -> u128 {
        let base = self.params as u128;
        let mut bound = self.length as u128;
        for _ in 0..self.depth {
            bound = bound.saturating_mul(base);
        }
        bound
    }
}

const NONE: u32 = u32::MAX;

#[derive(Debug, Clone)]
pub struct ClosureTable {
    universe: Vec<Formula>,
    /// Closure id per formula index, `NONE` for non-members.
    index: Vec<u32>,
    subs: Vec<Box<[u32]>>,
    params: ParamSet,
    stats: ClosureStats,
}

impl ClosureTable {
    pub fn universe(&self) -> &[Formula] {
        &self.universe
    }

    pub fn len(&self) -> usize {
        self.universe.len()
    }

    pub fn is_empty(&self) -> bool {
        self.universe.is_empty()
    }

    pub fn formula(&self, id: usize) -> Formula {
        self.universe[id]
    }

    pub fn id_of(&self, f: Formula) -> Option<usize> {
        match self.index.get(f.index()) {
            Some(&i) if i != NONE => Some(i as usize),
            _ => None,
        }
    }

    pub fn contains(&self, f: Formula) -> bool {
        self.id_of(f).is_some()
    }

    /// Ids of the substitution instances `A(p)`, `p` in `P`, of a quantified
    /// member `qx A(x)`, deduplicated, in parameter order. Empty for other
    /// members.
    pub fn sub_instances(&self, id: usize) -> &[u32] {
        &self.subs[id]
    }

    pub fn params(&self) -> &ParamSet {
        &self.params
    }

    pub fn stats(&self) -> ClosureStats {
        self.stats
    }
}

pub fn closure(store: &mut Store, s: &[Formula]) -> Result<ClosureTable, ResourceLimit> {
    closure_with_cap(store, s, DEFAULT_CLOSURE_CAP)
}

pub fn closure_with_cap(
    store: &mut Store,
    s: &[Formula],
    cap: usize,
) -> Result<ClosureTable, ResourceLimit> {
    let params = parameters_star(store, s);
    let mut universe = Vec::new();
    let mut index: Vec<u32> = vec![NONE; store.len()];
    let mut subs: Vec<Box<[u32]>> = Vec::new();
    let mut pending: HashMap<Formula, Vec<Formula>> = HashMap::default();
    let mut stack: Vec<(Formula, bool)> = s.iter().rev().map(|&f| (f, false)).collect();
    let member = |index: &[u32], f: Formula| index.get(f.index()).is_some_and(|&i| i != NONE);

    while let Some((f, expanded)) = stack.pop() {
        if member(&index, f) {
            continue;
        }
        if !expanded {
            stack.push((f, true));
            let quantified = match *store.node(f) {
                Node::Top | Node::Bot | Node::Atom(..) => None,
                Node::And(l, r) | Node::Or(l, r) | Node::Imp(l, r) => {
                    for c in [r, l] {
                        if !member(&index, c) {
                            stack.push((c, false));
                        }
                    }
                    None
                }
                Node::Forall(x, body) | Node::Exists(x, body) => Some((x, body)),
            };
            if let Some((x, body)) = quantified {
                let mut inst = Vec::with_capacity(params.len());
                for &p in params.elements() {
                    // Non-substitutable parameters are skipped.
                    if let Ok(g) = substitute(store, body, x, p) {
                        if !inst.contains(&g) {
                            inst.push(g);
                        }
                    }
                }
                for &c in inst.iter().rev() {
                    if !member(&index, c) {
                        stack.push((c, false));
                    }
                }
                pending.insert(f, inst);
            }
            continue;
        }
        if universe.len() >= cap {
            return Err(ResourceLimit { cap });
        }
        let id = universe.len() as u32;
        let sub: Box<[u32]> = match pending.remove(&f) {
            Some(inst) => inst.iter().map(|g| index[g.index()]).collect(),
            None => Box::new([]),
        };
        universe.push(f);
        if index.len() <= f.index() {
            index.resize(store.len().max(f.index() + 1), NONE);
        }
        index[f.index()] = id;
        subs.push(sub);
    }

    let mut inputs = s.to_vec();
    inputs.sort_unstable();
    inputs.dedup();
    let stats = ClosureStats {
        size: universe.len(),
        params: params.len(),
        depth: inputs
            .iter()
            .map(|&f| store.quantifier_depth(f))
            .max()
            .unwrap_or(0),
        length: inputs.iter().map(|&f| store.length(f)).sum(),
        closure_length: universe.iter().map(|&f| store.length(f)).sum(),
    };
    Ok(ClosureTable {
        universe,
        index,
        subs,
        params,
        stats,
    })
}
