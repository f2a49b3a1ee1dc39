//! Universal Horn formulas, a seeded family generator, and a classical
//! forward-chaining oracle that grounds clauses over a parameter list.

use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::syntax::{Formula, Store, Term};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct HornAtom {
    pub rel: String,
    /// Names of constants or of the clause's bound variables.
    pub args: Vec<String>,
}

/// `forall bound_vars. A1 -> (A2 -> ... -> (Am -> B))`, with `B` an atom or
/// `false` when `consequent` is `None`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HornClause {
    pub bound_vars: Vec<String>,
    pub antecedents: Vec<HornAtom>,
    pub consequent: Option<HornAtom>,
}

impl HornClause {
    pub fn to_formula(&self, store: &mut Store) -> Formula {
        let atom = |store: &mut Store, a: &HornAtom| {
            let args: Vec<Term> = a
                .args
                .iter()
                .map(|n| {
                    if self.bound_vars.contains(n) {
                        store.var(n)
                    } else {
                        store.constant(n)
                    }
                })
                .collect();
            store.atom_named(&a.rel, &args)
        };
        let mut f = match &self.consequent {
            Some(b) => atom(store, b),
            None => store.bot(),
        };
        for a in self.antecedents.iter().rev() {
            let a = atom(store, a);
            f = store.imp(a, f);
        }
        for v in self.bound_vars.iter().rev() {
            let x = store.sym(v);
            f = store.forall(x, f);
        }
        f
    }
}

type Ground = (String, Vec<String>);

/// Grounds every clause over `params` and chains to a fixpoint; returns
/// whether `false` is reached.
pub fn classical_horn_bottom(clauses: &[HornClause], params: &[String]) -> bool {
    let mut ground: Vec<(Vec<Ground>, Option<Ground>)> = Vec::new();
    for c in clauses {
        let k = c.bound_vars.len();
        let total = params.len().checked_pow(k as u32).unwrap_or(0);
        for mut code in 0..total {
            let mut env = Vec::with_capacity(k);
            for _ in 0..k {
                env.push(params[code % params.len()].clone());
                code /= params.len();
            }
            let inst = |a: &HornAtom| -> Ground {
                let args = a
                    .args
                    .iter()
                    .map(|n| match c.bound_vars.iter().rposition(|v| v == n) {
                        Some(i) => env[i].clone(),
                        None => n.clone(),
                    })
                    .collect();
                (a.rel.clone(), args)
            };
            ground.push((
                c.antecedents.iter().map(inst).collect(),
                c.consequent.as_ref().map(inst),
            ));
        }
    }
    let mut facts: HashSet<Ground> = HashSet::new();
    loop {
        let mut changed = false;
        for (ants, cons) in &ground {
            if ants.iter().all(|a| facts.contains(a)) {
                match cons {
                    None => return true,
                    Some(b) => changed |= facts.insert(b.clone()),
                }
            }
        }
        if !changed {
            return false;
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HornParams {
    pub clauses: usize,
    /// Relation symbols `R0, R1, ...`; arity of `Ri` is `i % (max_arity + 1)`.
    pub relations: usize,
    pub max_arity: usize,
    /// Constants `c0, c1, ...`.
    pub constants: usize,
    pub max_bound_vars: usize,
    pub max_antecedents: usize,
}

impl Default for HornParams {
    fn default() -> Self {
        HornParams {
            clauses: 6,
            relations: 4,
            max_arity: 2,
            constants: 2,
            max_bound_vars: 3,
            max_antecedents: 3,
        }
    }
}

/// A reproducible Horn set. Roughly one clause in five concludes `false` and
/// one in three is a fact.
pub fn random_horn(seed: u64, p: HornParams) -> Vec<HornClause> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let relations = p.relations.max(1);
    let arity = |i: usize| i % (p.max_arity + 1);
    (0..p.clauses)
        .map(|_| {
            let nvars = rng.gen_range(0..=p.max_bound_vars);
            let bound_vars: Vec<String> = (0..nvars).map(|i| format!("x{i}")).collect();
            let mut pool: Vec<String> = (0..p.constants).map(|i| format!("c{i}")).collect();
            pool.extend(bound_vars.iter().cloned());
            let atom = |rng: &mut ChaCha8Rng| {
                let mut r = rng.gen_range(0..relations);
                if pool.is_empty() {
                    r -= arity(r);
                }
                HornAtom {
                    rel: format!("R{r}"),
                    args: (0..arity(r))
                        .map(|_| pool[rng.gen_range(0..pool.len())].clone())
                        .collect(),
                }
            };
            let nant = if rng.gen_ratio(1, 3) {
                0
            } else {
                rng.gen_range(1..=p.max_antecedents.max(1))
            };
            let antecedents = (0..nant).map(|_| atom(&mut rng)).collect();
            let consequent = if nant > 0 && rng.gen_ratio(1, 5) {
                None
            } else {
                Some(atom(&mut rng))
            };
            HornClause {
                bound_vars,
                antecedents,
                consequent,
            }
        })
        .collect()
}
