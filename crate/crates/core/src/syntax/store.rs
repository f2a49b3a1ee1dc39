//! Hash-consed storage for identifiers, terms and formulas.
//!
//! Every formula lives in a [`Store`] and is referred to by a [`Formula`]
//! handle. Structurally equal formulas get the same handle, so equality and
//! set membership are integer comparisons. Per-node metadata (free variables,
//! symbol length, quantifier depth) is computed once at interning time.

use std::fmt;
use std::hash::BuildHasher;

use hashbrown::HashTable;
use rustc_hash::FxBuildHasher;

use super::SyntaxError;

/// Identifier prefix reserved for system-generated names.
pub const RESERVED_PREFIX: char = '_';

/// Name of the constant added by [`parameters_star`](super::parameters_star)
/// when a formula set mentions no constant.
pub const FIXED_CONSTANT: &str = "_0";

/// An interned identifier.
#[derive(Copy, Clone, Eq, PartialEq, Hash, Ord, PartialOrd, Debug)]
pub struct Sym(u32);

/// Individual variables and constants. There are no other terms.
#[derive(Copy, Clone, Eq, PartialEq, Hash, Ord, PartialOrd, Debug)]
pub enum Term {
    Var(Sym),
    Const(Sym),
}

impl Term {
    pub fn sym(self) -> Sym {
        match self {
            Term::Var(s) | Term::Const(s) => s,
        }
    }

    pub fn is_var(self) -> bool {
        matches!(self, Term::Var(_))
    }
}

/// Handle to an interned formula.
#[derive(Copy, Clone, Eq, PartialEq, Hash, Ord, PartialOrd, Debug)]
pub struct Formula(u32);

impl Formula {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// One level of formula structure.
#[derive(Clone, Eq, PartialEq, Hash, Debug)]
pub enum Node {
    Top,
    Bot,
    Atom(Sym, Box<[Term]>),
    And(Formula, Formula),
    Or(Formula, Formula),
    Imp(Formula, Formula),
    Forall(Sym, Formula),
    Exists(Sym, Formula),
}

#[derive(Debug, Clone)]
struct Meta {
    free: Box<[Sym]>,
    length: usize,
    depth: usize,
}

/// Session-local interner. Not shared between threads; build one per worker.
///
/// Names live in one buffer and both indexes hold bare ids, which keeps large
/// inputs compact.
#[derive(Debug, Clone, Default)]
pub struct Store {
    name_buf: String,
    name_ends: Vec<u32>,
    name_ids: HashTable<u32>,
    nodes: Vec<Node>,
    meta: Vec<Meta>,
    ids: HashTable<u32>,
    /// Arity per symbol, `u32::MAX` until the symbol is used as a relation.
    arities: Vec<u32>,
}

const NO_ARITY: u32 = u32::MAX;

fn name_in<'a>(buf: &'a str, ends: &[u32], i: u32) -> &'a str {
    let i = i as usize;
    let start = if i == 0 { 0 } else { ends[i - 1] as usize };
    &buf[start..ends[i] as usize]
}

impl Store {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn sym(&mut self, name: &str) -> Sym {
        let hash = FxBuildHasher.hash_one(name);
        let (buf, ends) = (&self.name_buf, &self.name_ends);
        if let Some(&i) = self.name_ids.find(hash, |&i| name_in(buf, ends, i) == name) {
            return Sym(i);
        }
        let i = self.name_ends.len() as u32;
        self.name_buf.push_str(name);
        self.name_ends.push(self.name_buf.len() as u32);
        self.arities.push(NO_ARITY);
        let (buf, ends) = (&self.name_buf, &self.name_ends);
        self.name_ids
            .insert_unique(hash, i, |&j| FxBuildHasher.hash_one(name_in(buf, ends, j)));
        Sym(i)
    }

    pub fn lookup_sym(&self, name: &str) -> Option<Sym> {
        let hash = FxBuildHasher.hash_one(name);
        self.name_ids
            .find(hash, |&i| {
                name_in(&self.name_buf, &self.name_ends, i) == name
            })
            .map(|&i| Sym(i))
    }

    pub fn name(&self, s: Sym) -> &str {
        name_in(&self.name_buf, &self.name_ends, s.0)
    }

    pub fn term_name(&self, t: Term) -> &str {
        self.name(t.sym())
    }

    pub fn node(&self, f: Formula) -> &Node {
        &self.nodes[f.index()]
    }

    /// Number of distinct formulas interned so far.
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Free variables of `f`, sorted by symbol id.
    pub fn free_vars(&self, f: Formula) -> &[Sym] {
        &self.meta[f.index()].free
    }

    pub fn is_free_in(&self, x: Sym, f: Formula) -> bool {
        self.free_vars(f).binary_search(&x).is_ok()
    }

    /// Length of `f` in symbols, counting the parentheses that delimit every
    /// binary connective and argument list.
    pub fn length(&self, f: Formula) -> usize {
        self.meta[f.index()].length
    }

    pub fn quantifier_depth(&self, f: Formula) -> usize {
        self.meta[f.index()].depth
    }

    /// Arity recorded for a relation symbol, if it has been used.
    pub fn arity(&self, rel: Sym) -> Option<usize> {
        match self.arities[rel.0 as usize] {
            NO_ARITY => None,
            a => Some(a as usize),
        }
    }

    pub fn relations(&self) -> impl Iterator<Item = (Sym, usize)> + '_ {
        self.arities
            .iter()
            .enumerate()
            .filter(|&(_, &a)| a != NO_ARITY)
            .map(|(s, &a)| (Sym(s as u32), a as usize))
    }

    pub fn top(&mut self) -> Formula {
        self.intern(Node::Top)
    }

    pub fn bot(&mut self) -> Formula {
        self.intern(Node::Bot)
    }

    /// Builds an atom, fixing the relation's arity on first use.
    pub fn atom(&mut self, rel: Sym, args: Vec<Term>) -> Result<Formula, SyntaxError> {
        match self.arities[rel.0 as usize] {
            NO_ARITY => self.arities[rel.0 as usize] = args.len() as u32,
            a if a as usize != args.len() => {
                return Err(SyntaxError::Arity {
                    relation: self.name(rel).to_owned(),
                    expected: a as usize,
                    found: args.len(),
                });
            }
            _ => {}
        }
        Ok(self.intern(Node::Atom(rel, args.into_boxed_slice())))
    }

    /// Convenience for atoms built from names; panics on arity mismatch.
    pub fn atom_named(&mut self, rel: &str, args: &[Term]) -> Formula {
        let rel = self.sym(rel);
        self.atom(rel, args.to_vec()).expect("arity mismatch")
    }

    pub fn var(&mut self, name: &str) -> Term {
        Term::Var(self.sym(name))
    }

    pub fn constant(&mut self, name: &str) -> Term {
        Term::Const(self.sym(name))
    }

    pub fn and(&mut self, l: Formula, r: Formula) -> Formula {
        self.intern(Node::And(l, r))
    }

    pub fn or(&mut self, l: Formula, r: Formula) -> Formula {
        self.intern(Node::Or(l, r))
    }

    pub fn imp(&mut self, l: Formula, r: Formula) -> Formula {
        self.intern(Node::Imp(l, r))
    }

    pub fn not(&mut self, a: Formula) -> Formula {
        let bot = self.bot();
        self.imp(a, bot)
    }

    pub fn forall(&mut self, x: Sym, body: Formula) -> Formula {
        self.intern(Node::Forall(x, body))
    }

    pub fn exists(&mut self, x: Sym, body: Formula) -> Formula {
        self.intern(Node::Exists(x, body))
    }

    /// Atom construction for arguments that came from an already-checked atom.
    pub(crate) fn atom_unchecked(&mut self, rel: Sym, args: Box<[Term]>) -> Formula {
        self.intern(Node::Atom(rel, args))
    }

    pub(crate) fn intern(&mut self, node: Node) -> Formula {
        let hash = FxBuildHasher.hash_one(&node);
        let nodes = &self.nodes;
        if let Some(&i) = self.ids.find(hash, |&i| nodes[i as usize] == node) {
            return Formula(i);
        }
        let meta = self.compute_meta(&node);
        let i = self.nodes.len() as u32;
        self.nodes.push(node);
        self.meta.push(meta);
        let nodes = &self.nodes;
        self.ids
            .insert_unique(hash, i, |&j| FxBuildHasher.hash_one(&nodes[j as usize]));
        Formula(i)
    }

    fn compute_meta(&self, node: &Node) -> Meta {
        match node {
            Node::Top | Node::Bot => Meta {
                free: Box::new([]),
                length: 1,
                depth: 0,
            },
            Node::Atom(_, args) => {
                let mut free: Vec<Sym> = args
                    .iter()
                    .filter_map(|t| match t {
                        Term::Var(s) => Some(*s),
                        Term::Const(_) => None,
                    })
                    .collect();
                free.sort_unstable();
                free.dedup();
                // R, or R ( t1 , ... , tk )
                let length = if args.is_empty() {
                    1
                } else {
                    2 * args.len() + 2
                };
                Meta {
                    free: free.into_boxed_slice(),
                    length,
                    depth: 0,
                }
            }
            Node::And(l, r) | Node::Or(l, r) | Node::Imp(l, r) => {
                let (ml, mr) = (&self.meta[l.index()], &self.meta[r.index()]);
                let mut free: Vec<Sym> = ml.free.iter().chain(mr.free.iter()).copied().collect();
                free.sort_unstable();
                free.dedup();
                Meta {
                    free: free.into_boxed_slice(),
                    length: ml.length + mr.length + 3,
                    depth: ml.depth.max(mr.depth),
                }
            }
            Node::Forall(x, body) | Node::Exists(x, body) => {
                let mb = &self.meta[body.index()];
                let free: Vec<Sym> = mb.free.iter().copied().filter(|v| v != x).collect();
                Meta {
                    free: free.into_boxed_slice(),
                    length: mb.length + 2,
                    depth: mb.depth + 1,
                }
            }
        }
    }

    /// Renders `f` in the concrete grammar accepted by the parser.
    pub fn display(&self, f: Formula) -> Display<'_> {
        Display { store: self, f }
    }
}

pub struct Display<'a> {
    store: &'a Store,
    f: Formula,
}

impl fmt::Display for Display<'_> {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        super::render::write_formula(self.store, self.f, out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn structurally_equal_formulas_share_identity() {
        let mut s = Store::new();
        let p = s.atom_named("p", &[]);
        let q = s.atom_named("q", &[]);
        let a = s.and(p, q);
        let b = s.and(p, q);
        assert_eq!(a, b);
        assert_ne!(a, s.and(q, p));
    }

    #[test]
    fn bound_variable_names_are_not_identified() {
        let mut s = Store::new();
        let x = s.var("x");
        let y = s.var("y");
        let rx = s.atom_named("R", &[x]);
        let ry = s.atom_named("R", &[y]);
        let fx = s.forall(x.sym(), rx);
        let fy = s.forall(y.sym(), ry);
        assert_ne!(fx, fy);
        assert!(s.free_vars(fx).is_empty());
    }

    #[test]
    fn arity_is_fixed_by_first_use() {
        let mut s = Store::new();
        let c = s.constant("c");
        let r = s.sym("R");
        s.atom(r, vec![c]).unwrap();
        let err = s.atom(r, vec![c, c]).unwrap_err();
        assert!(matches!(
            err,
            SyntaxError::Arity {
                expected: 1,
                found: 2,
                ..
            }
        ));
    }

    #[test]
    fn metadata() {
        let mut s = Store::new();
        let x = s.var("x");
        let y = s.var("y");
        let sxy = s.atom_named("S", &[x, y]);
        let ex = s.exists(y.sym(), sxy);
        let all = s.forall(x.sym(), ex);
        assert_eq!(s.quantifier_depth(all), 2);
        assert_eq!(s.length(sxy), 6);
        assert_eq!(s.length(all), 10);
        assert_eq!(s.free_vars(ex), &[x.sym()]);
    }
}
