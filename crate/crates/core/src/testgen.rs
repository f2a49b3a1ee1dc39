//! Proptest strategies over a small fixed vocabulary: nullary `p q`, unary
//! `R`, binary `S`, variables `x y z` and constants `a b`.

use proptest::prelude::*;

use crate::syntax::{Formula, Store, Term};

pub const VARS: [&str; 3] = ["x", "y", "z"];
pub const CONSTS: [&str; 2] = ["a", "b"];

/// Term index: below 3 a variable, otherwise a constant.
pub type TermIx = u8;

#[derive(Debug, Clone, PartialEq)]
pub enum Shape {
    Top,
    Bot,
    Prop(u8),
    Unary(TermIx),
    Binary(TermIx, TermIx),
    And(Box<Shape>, Box<Shape>),
    Or(Box<Shape>, Box<Shape>),
    Imp(Box<Shape>, Box<Shape>),
    Forall(u8, Box<Shape>),
    Exists(u8, Box<Shape>),
}

pub fn term(store: &mut Store, ix: TermIx) -> Term {
    let ix = ix as usize;
    if ix < VARS.len() {
        store.var(VARS[ix])
    } else {
        store.constant(CONSTS[ix - VARS.len()])
    }
}

pub fn build(store: &mut Store, s: &Shape) -> Formula {
    match s {
        Shape::Top => store.top(),
        Shape::Bot => store.bot(),
        Shape::Prop(i) => store.atom_named(["p", "q"][*i as usize], &[]),
        Shape::Unary(t) => {
            let t = term(store, *t);
            store.atom_named("R", &[t])
        }
        Shape::Binary(t, u) => {
            let (t, u) = (term(store, *t), term(store, *u));
            store.atom_named("S", &[t, u])
        }
        Shape::And(l, r) | Shape::Or(l, r) | Shape::Imp(l, r) => {
            let (a, b) = (build(store, l), build(store, r));
            match s {
                Shape::And(..) => store.and(a, b),
                Shape::Or(..) => store.or(a, b),
                _ => store.imp(a, b),
            }
        }
        Shape::Forall(v, body) | Shape::Exists(v, body) => {
            let b = build(store, body);
            let x = store.sym(VARS[*v as usize]);
            match s {
                Shape::Forall(..) => store.forall(x, b),
                _ => store.exists(x, b),
            }
        }
    }
}

fn term_ix() -> impl Strategy<Value = TermIx> {
    0..(VARS.len() + CONSTS.len()) as u8
}

pub fn shape() -> impl Strategy<Value = Shape> {
    let leaf = prop_oneof![
        1 => Just(Shape::Top),
        1 => Just(Shape::Bot),
        4 => (0..2u8).prop_map(Shape::Prop),
        3 => term_ix().prop_map(Shape::Unary),
        2 => (term_ix(), term_ix()).prop_map(|(t, u)| Shape::Binary(t, u)),
    ];
    leaf.prop_recursive(4, 20, 2, |inner| {
        let var = 0..VARS.len() as u8;
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(l, r)| Shape::And(Box::new(l), Box::new(r))),
            (inner.clone(), inner.clone()).prop_map(|(l, r)| Shape::Or(Box::new(l), Box::new(r))),
            (inner.clone(), inner.clone()).prop_map(|(l, r)| Shape::Imp(Box::new(l), Box::new(r))),
            (var.clone(), inner.clone()).prop_map(|(v, b)| Shape::Forall(v, Box::new(b))),
            (var, inner).prop_map(|(v, b)| Shape::Exists(v, Box::new(b))),
        ]
    })
}

/// Hypotheses and one query, all built in a fresh store.
pub fn instance() -> impl Strategy<Value = (Vec<Shape>, Shape)> {
    (prop::collection::vec(shape(), 1..4), shape())
}

pub fn build_all(store: &mut Store, shapes: &[Shape]) -> Vec<Formula> {
    shapes.iter().map(|s| build(store, s)).collect()
}
