//! Seeded random entailment instances over a small vocabulary.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::calculus::{CalculusVariant, RuleName};
use crate::syntax::{literal_subformulas, Formula, Store, Sym, Term};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RandomParams {
    /// Propositional atoms `p, q, r, s, ...` (at most 8).
    pub nullary: usize,
    /// Unary relations `R, T, U, V` (at most 4).
    pub unary: usize,
    /// Constants `a, b, c, ...` (at most 6).
    pub constants: usize,
    /// Whether `z` may occur free; the caller declares it as a variable.
    pub free_var: bool,
    /// Quantifiers per formula; 0 gives propositional instances.
    pub max_quantifiers: usize,
    /// Connective depth of each generated formula.
    pub max_depth: usize,
    pub hyps: usize,
    pub queries: usize,
}

impl Default for RandomParams {
    fn default() -> Self {
        RandomParams {
            nullary: 4,
            unary: 2,
            constants: 2,
            free_var: false,
            max_quantifiers: 2,
            max_depth: 3,
            hyps: 3,
            queries: 2,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RandomInstance {
    pub vars: Vec<String>,
    pub hyps: Vec<Formula>,
    pub queries: Vec<Formula>,
}

const NULLARY: [&str; 8] = ["p", "q", "r", "s", "t", "u", "v", "w"];
const UNARY: [&str; 4] = ["R", "T", "U", "V"];
const CONSTANTS: [&str; 6] = ["a", "b", "c", "d", "e", "f"];
const BOUND: [&str; 2] = ["x", "y"];
const FREE: &str = "z";

struct Gen<'a> {
    store: &'a mut Store,
    rng: ChaCha8Rng,
    params: &'a RandomParams,
    variant: CalculusVariant,
}

impl Gen<'_> {
    fn term(&mut self, scope: &[Sym]) -> Term {
        let mut pool: Vec<Term> = scope.iter().map(|&s| Term::Var(s)).collect();
        for c in &CONSTANTS[..self.params.constants.min(CONSTANTS.len())] {
            pool.push(self.store.constant(c));
        }
        if self.params.free_var {
            pool.push(self.store.var(FREE));
        }
        if pool.is_empty() {
            pool.push(self.store.constant(CONSTANTS[0]));
        }
        // Prefer the innermost bound variable so quantifiers are rarely vacuous.
        if let Some(&x) = scope.last() {
            if self.rng.gen_bool(0.5) {
                return Term::Var(x);
            }
        }
        *pool.choose(&mut self.rng).expect("non-empty")
    }

    fn leaf(&mut self, scope: &[Sym]) -> Formula {
        let nullary = self.params.nullary.min(NULLARY.len());
        let unary = self.params.unary.min(UNARY.len());
        let roll = self.rng.gen_range(0..20);
        if roll == 0 {
            return self.store.top();
        }
        if roll == 1 && self.variant.admits(RuleName::BotE) {
            return self.store.bot();
        }
        let unary_weight = if scope.is_empty() { 1 } else { 3 };
        let total = nullary + unary * unary_weight;
        if total == 0 {
            return self.store.top();
        }
        let k = self.rng.gen_range(0..total);
        if k < nullary {
            self.store.atom_named(NULLARY[k], &[])
        } else {
            let rel = UNARY[(k - nullary) / unary_weight];
            let t = self.term(scope);
            self.store.atom_named(rel, &[t])
        }
    }

    fn formula(&mut self, depth: usize, scope: &mut Vec<Sym>, quantifiers: &mut usize) -> Formula {
        if depth == 0 || self.rng.gen_ratio(1, 4) {
            return self.leaf(scope);
        }
        let mut choices = vec![0, 0, 1, 1];
        if self.variant.admits(RuleName::OrI_L) {
            choices.push(2);
        }
        if self.variant.admits(RuleName::ForallE) && *quantifiers < self.params.max_quantifiers {
            choices.extend([3, 4]);
        }
        match *choices.choose(&mut self.rng).expect("non-empty") {
            0 => {
                let a = self.formula(depth - 1, scope, quantifiers);
                let b = self.formula(depth - 1, scope, quantifiers);
                self.store.and(a, b)
            }
            1 => {
                let a = self.formula(depth - 1, scope, quantifiers);
                let b = self.formula(depth - 1, scope, quantifiers);
                self.store.imp(a, b)
            }
            2 => {
                let a = self.formula(depth - 1, scope, quantifiers);
                let b = if self.rng.gen_ratio(1, 4) {
                    a
                } else {
                    self.formula(depth - 1, scope, quantifiers)
                };
                self.store.or(a, b)
            }
            k => {
                *quantifiers += 1;
                // `z` is sometimes bound as well, which exercises clashes.
                let name = if self.params.free_var && self.rng.gen_ratio(1, 5) {
                    FREE
                } else {
                    BOUND[self.rng.gen_range(0..BOUND.len())]
                };
                let x = self.store.sym(name);
                scope.push(x);
                let body = self.formula(depth - 1, scope, quantifiers);
                scope.pop();
                if k == 3 {
                    self.store.forall(x, body)
                } else {
                    self.store.exists(x, body)
                }
            }
        }
    }

    fn top_formula(&mut self) -> Formula {
        let mut quantifiers = 0;
        self.formula(self.params.max_depth, &mut Vec::new(), &mut quantifiers)
    }

    /// A fresh formula, a subformula of a hypothesis, or a combination of
    /// such subformulas; the latter two make entailed queries common.
    fn query(&mut self, pool: &[Formula]) -> Formula {
        if pool.is_empty() || self.rng.gen_ratio(1, 3) {
            return self.top_formula();
        }
        let pick = |g: &mut Self| *pool.choose(&mut g.rng).expect("non-empty");
        match self.rng.gen_range(0..4) {
            0 | 1 => pick(self),
            2 => {
                let (a, b) = (pick(self), pick(self));
                self.store.and(a, b)
            }
            _ => {
                let a = pick(self);
                let b = self.top_formula();
                if self.variant.admits(RuleName::OrI_L) && self.rng.gen_bool(0.5) {
                    self.store.or(b, a)
                } else {
                    self.store.imp(b, a)
                }
            }
        }
    }
}

pub fn random_instance(
    store: &mut Store,
    seed: u64,
    params: &RandomParams,
    variant: CalculusVariant,
) -> RandomInstance {
    let mut g = Gen {
        store,
        rng: ChaCha8Rng::seed_from_u64(seed),
        params,
        variant,
    };
    let hyps: Vec<Formula> = (0..params.hyps).map(|_| g.top_formula()).collect();
    let free_ok: Vec<Sym> = if params.free_var {
        vec![g.store.sym(FREE)]
    } else {
        vec![]
    };
    let mut pool = Vec::new();
    for &h in &hyps {
        for f in literal_subformulas(g.store, h) {
            if g.store.free_vars(f).iter().all(|v| free_ok.contains(v)) && !pool.contains(&f) {
                pool.push(f);
            }
        }
    }
    let queries = (0..params.queries).map(|_| g.query(&pool)).collect();
    RandomInstance {
        vars: if params.free_var {
            vec![FREE.to_owned()]
        } else {
            vec![]
        },
        hyps,
        queries,
    }
}
