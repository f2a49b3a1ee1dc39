use std::fmt::{self, Write};

use super::store::{Formula, Node, Store};

/// Prints `f` so that parsing it back with `free_vars(f)` declared gives `f`.
pub fn render(store: &Store, f: Formula) -> String {
    let mut out = String::new();
    write_formula(store, f, &mut out).expect("writing to a String cannot fail");
    out
}

pub(crate) fn write_formula(store: &Store, f: Formula, out: &mut impl Write) -> fmt::Result {
    match store.node(f) {
        Node::Top => out.write_str("true"),
        Node::Bot => out.write_str("false"),
        Node::Atom(rel, args) => {
            out.write_str(store.name(*rel))?;
            if !args.is_empty() {
                out.write_char('(')?;
                for (i, &t) in args.iter().enumerate() {
                    if i > 0 {
                        out.write_str(", ")?;
                    }
                    out.write_str(store.term_name(t))?;
                }
                out.write_char(')')?;
            }
            Ok(())
        }
        Node::And(l, r) => binary(store, *l, " & ", *r, out),
        Node::Or(l, r) => binary(store, *l, " | ", *r, out),
        Node::Imp(l, r) => binary(store, *l, " -> ", *r, out),
        Node::Forall(x, body) => {
            write!(out, "forall {}. ", store.name(*x))?;
            write_formula(store, *body, out)
        }
        Node::Exists(x, body) => {
            write!(out, "exists {}. ", store.name(*x))?;
            write_formula(store, *body, out)
        }
    }
}

fn binary(store: &Store, l: Formula, op: &str, r: Formula, out: &mut impl Write) -> fmt::Result {
    operand(store, l, out)?;
    out.write_str(op)?;
    operand(store, r, out)
}

fn operand(store: &Store, f: Formula, out: &mut impl Write) -> fmt::Result {
    match store.node(f) {
        Node::Top | Node::Bot | Node::Atom(..) => write_formula(store, f, out),
        _ => {
            out.write_char('(')?;
            write_formula(store, f, out)?;
            out.write_char(')')
        }
    }
}
