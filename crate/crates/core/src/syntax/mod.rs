//! Terms, formulas, and the syntactic operations the calculus is built on.

mod parse;
mod problem;
pub(crate) mod render;
mod store;

use rustc_hash::FxHashSet as HashSet;

use thiserror::Error;

pub use parse::{parse_formula, parse_formula_with, ParseOptions};
pub use problem::{parse_problem, Problem};
pub use render::render;
pub use store::{Display, Formula, Node, Store, Sym, Term, FIXED_CONSTANT, RESERVED_PREFIX};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SyntaxError {
    #[error("syntax error at {line}:{column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("relation `{relation}` used with {found} argument(s), previously {expected}")]
    Arity {
        relation: String,
        expected: usize,
        found: usize,
    },
    #[error("identifier `{name}` at {line}:{column} uses the reserved prefix `_`")]
    Reserved {
        name: String,
        line: usize,
        column: usize,
    },
}

/// Substituting a variable would capture it under a quantifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error(
    "term is not substitutable: a replaced occurrence falls under a binder of the same variable"
)]
pub struct ClashError;

/// Replaces every free occurrence of `x` in `a` with `t`.
///
/// Fails with [`ClashError`] when `t` is a variable that would become bound.
/// There is no renaming of bound variables.
pub fn substitute(store: &mut Store, a: Formula, x: Sym, t: Term) -> Result<Formula, ClashError> {
    if !store.is_free_in(x, a) {
        return Ok(a);
    }
    let node = store.node(a).clone();
    Ok(match node {
        Node::Top | Node::Bot => a,
        Node::Atom(rel, args) => {
            let args: Box<[Term]> = args
                .iter()
                .map(|&u| if u == Term::Var(x) { t } else { u })
                .collect();
            store.atom_unchecked(rel, args)
        }
        Node::And(l, r) => {
            let (l, r) = (substitute(store, l, x, t)?, substitute(store, r, x, t)?);
            store.and(l, r)
        }
        Node::Or(l, r) => {
            let (l, r) = (substitute(store, l, x, t)?, substitute(store, r, x, t)?);
            store.or(l, r)
        }
        Node::Imp(l, r) => {
            let (l, r) = (substitute(store, l, x, t)?, substitute(store, r, x, t)?);
            store.imp(l, r)
        }
        // x is free in the quantification, so y != x and x is free in the body.
        Node::Forall(y, body) => {
            if t == Term::Var(y) {
                return Err(ClashError);
            }
            let body = substitute(store, body, x, t)?;
            store.forall(y, body)
        }
        Node::Exists(y, body) => {
            if t == Term::Var(y) {
                return Err(ClashError);
            }
            let body = substitute(store, body, x, t)?;
            store.exists(y, body)
        }
    })
}

/// Variables with a free occurrence in `a`, in symbol order.
pub fn free_vars(store: &Store, a: Formula) -> Vec<Sym> {
    store.free_vars(a).to_vec()
}

pub fn quantifier_depth(store: &Store, a: Formula) -> usize {
    store.quantifier_depth(a)
}

/// Parameters of a formula set: its constants and free variables, padded with
/// the fixed constant when no constant occurs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParamSet {
    elements: Vec<Term>,
    contains_fixed: bool,
}

impl ParamSet {
    /// Parameters in order of first occurrence; the fixed constant, if
    /// present, comes last.
    pub fn elements(&self) -> &[Term] {
        &self.elements
    }

    pub fn contains_fixed(&self) -> bool {
        self.contains_fixed
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, t: Term) -> bool {
        self.elements.contains(&t)
    }
}

pub fn parameters_star(store: &mut Store, s: &[Formula]) -> ParamSet {
    let free: HashSet<Sym> = s
        .iter()
        .flat_map(|&f| store.free_vars(f).iter().copied())
        .collect();
    let mut seen = HashSet::default();
    let mut elements = Vec::new();
    let mut visited = HashSet::default();
    let mut stack: Vec<Formula> = s.iter().rev().copied().collect();
    while let Some(f) = stack.pop() {
        if !visited.insert(f) {
            continue;
        }
        match store.node(f) {
            Node::Top | Node::Bot => {}
            Node::Atom(_, args) => {
                for &t in args.iter() {
                    let is_param = match t {
                        Term::Const(_) => true,
                        Term::Var(v) => free.contains(&v),
                    };
                    if is_param && seen.insert(t) {
                        elements.push(t);
                    }
                }
            }
            Node::And(l, r) | Node::Or(l, r) | Node::Imp(l, r) => {
                stack.push(*r);
                stack.push(*l);
            }
            Node::Forall(_, b) | Node::Exists(_, b) => stack.push(*b),
        }
    }
    let has_constant = elements.iter().any(|t| !t.is_var());
    if !has_constant {
        elements.push(store.constant(FIXED_CONSTANT));
    }
    ParamSet {
        elements,
        contains_fixed: !has_constant,
    }
}

/// Subformulas reachable through connectives and the identity instance of
/// each quantifier, in pre-order of first occurrence.
pub fn literal_subformulas(store: &Store, a: Formula) -> Vec<Formula> {
    let mut seen = HashSet::default();
    let mut out = Vec::new();
    let mut stack = vec![a];
    while let Some(f) = stack.pop() {
        if !seen.insert(f) {
            continue;
        }
        out.push(f);
        match store.node(f) {
            Node::Top | Node::Bot | Node::Atom(..) => {}
            Node::And(l, r) | Node::Or(l, r) | Node::Imp(l, r) => {
                stack.push(*r);
                stack.push(*l);
            }
            Node::Forall(_, b) | Node::Exists(_, b) => stack.push(*b),
        }
    }
    out
}
