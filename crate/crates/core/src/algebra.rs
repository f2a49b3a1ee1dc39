//! Infon terms: a join semilattice with zero and a weak pseudocomplement.
//!
//! Terms map to formulas of the original primal calculus (`0` to `true`, join
//! to `&`, `a*b` to `a -> b`), and the order on the free algebra is decided by
//! entailment there.

use std::fmt;

use rand::Rng;
use thiserror::Error;

use crate::calculus::CalculusVariant;
use crate::engine::entails;
use crate::syntax::{Formula, Store};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum InfonTerm {
    Zero,
    Gen(String),
    Join(Box<InfonTerm>, Box<InfonTerm>),
    /// `PComp(a, b)` is `a*b`.
    PComp(Box<InfonTerm>, Box<InfonTerm>),
}

impl InfonTerm {
    pub fn gen(name: &str) -> Self {
        InfonTerm::Gen(name.to_owned())
    }

    pub fn join(a: InfonTerm, b: InfonTerm) -> Self {
        InfonTerm::Join(Box::new(a), Box::new(b))
    }

    pub fn pcomp(a: InfonTerm, b: InfonTerm) -> Self {
        InfonTerm::PComp(Box::new(a), Box::new(b))
    }

    pub fn size(&self) -> usize {
        match self {
            InfonTerm::Zero | InfonTerm::Gen(_) => 1,
            InfonTerm::Join(a, b) | InfonTerm::PComp(a, b) => 1 + a.size() + b.size(),
        }
    }
}

impl fmt::Display for InfonTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn operand(t: &InfonTerm, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            match t {
                InfonTerm::Zero | InfonTerm::Gen(_) => write!(f, "{t}"),
                _ => write!(f, "({t})"),
            }
        }
        match self {
            InfonTerm::Zero => f.write_str("0"),
            InfonTerm::Gen(g) => f.write_str(g),
            InfonTerm::Join(a, b) => {
                operand(a, f)?;
                f.write_str(" + ")?;
                operand(b, f)
            }
            InfonTerm::PComp(a, b) => {
                operand(a, f)?;
                f.write_str(" * ")?;
                operand(b, f)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("term syntax error at column {column}: {message}")]
pub struct TermParseError {
    pub column: usize,
    pub message: String,
}

/// `term := '0' | ident | term '+' term | term '*' term | '(' term ')'`, with
/// `*` binding tighter than `+`; both associate to the left.
pub fn parse_term(text: &str) -> Result<InfonTerm, TermParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut p = TermParser { chars, pos: 0 };
    let t = p.join()?;
    p.skip_ws();
    if p.pos < p.chars.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(t)
}

struct TermParser {
    chars: Vec<char>,
    pos: usize,
}

impl TermParser {
    fn error(&self, message: &str) -> TermParseError {
        TermParseError {
            column: self.pos + 1,
            message: message.to_owned(),
        }
    }

    fn skip_ws(&mut self) {
        while self.chars.get(self.pos).is_some_and(|c| c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.chars.get(self.pos) == Some(&c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn join(&mut self) -> Result<InfonTerm, TermParseError> {
        let mut t = self.pcomp()?;
        while self.eat('+') {
            t = InfonTerm::join(t, self.pcomp()?);
        }
        Ok(t)
    }

    fn pcomp(&mut self) -> Result<InfonTerm, TermParseError> {
        let mut t = self.primary()?;
        while self.eat('*') {
            t = InfonTerm::pcomp(t, self.primary()?);
        }
        Ok(t)
    }

    fn primary(&mut self) -> Result<InfonTerm, TermParseError> {
        self.skip_ws();
        match self.chars.get(self.pos) {
            Some('(') => {
                self.pos += 1;
                let t = self.join()?;
                if !self.eat(')') {
                    return Err(self.error("expected `)`"));
                }
                Ok(t)
            }
            Some('0') => {
                self.pos += 1;
                Ok(InfonTerm::Zero)
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self
                    .chars
                    .get(self.pos)
                    .is_some_and(|c| c.is_ascii_alphanumeric() || *c == '_' || *c == '\'')
                {
                    self.pos += 1;
                }
                Ok(InfonTerm::Gen(self.chars[start..self.pos].iter().collect()))
            }
            Some(_) => Err(self.error("expected `0`, a generator, or `(`")),
            None => Err(self.error("unexpected end of input")),
        }
    }
}

pub fn term_to_formula(store: &mut Store, t: &InfonTerm) -> Formula {
    match t {
        InfonTerm::Zero => store.top(),
        InfonTerm::Gen(g) => store.atom_named(g, &[]),
        InfonTerm::Join(a, b) => {
            let (a, b) = (term_to_formula(store, a), term_to_formula(store, b));
            store.and(a, b)
        }
        InfonTerm::PComp(a, b) => {
            let (a, b) = (term_to_formula(store, a), term_to_formula(store, b));
            store.imp(a, b)
        }
    }
}

/// `s >= t` in the free algebra.
pub fn term_geq(store: &mut Store, s: &InfonTerm, t: &InfonTerm) -> bool {
    let (fs, ft) = (term_to_formula(store, s), term_to_formula(store, t));
    entails(store, &[fs], ft, CalculusVariant::Original)
        .expect("propositional closures are linear in the input")
        .entailed
}

pub fn term_equal(store: &mut Store, s: &InfonTerm, t: &InfonTerm) -> bool {
    term_geq(store, s, t) && term_geq(store, t, s)
}

/// A random term with at most `max_nodes` nodes over `gens`.
pub fn random_term<R: Rng>(rng: &mut R, gens: &[&str], max_nodes: usize) -> InfonTerm {
    let budget = rng.gen_range(1..=max_nodes.max(1));
    build(rng, gens, budget)
}

fn build<R: Rng>(rng: &mut R, gens: &[&str], budget: usize) -> InfonTerm {
    if budget < 3 {
        return if rng.gen_ratio(1, 6) {
            InfonTerm::Zero
        } else {
            InfonTerm::gen(gens[rng.gen_range(0..gens.len())])
        };
    }
    let left = rng.gen_range(1..=budget - 2);
    let (a, b) = (build(rng, gens, left), build(rng, gens, budget - 1 - left));
    if rng.gen_bool(0.5) {
        InfonTerm::join(a, b)
    } else {
        InfonTerm::pcomp(a, b)
    }
}
