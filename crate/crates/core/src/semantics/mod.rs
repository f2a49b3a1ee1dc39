//! Standard structures with override functions, the O-modeling relation,
//! a brute-force semantic oracle, and countermodels read off a saturated state.
//!
//! Quantifier clauses range over the substitution instances kept in the
//! closure, so clashing parameters are skipped exactly as the closure skips
//! them.

use std::collections::{HashMap, HashSet};

use indexmap::IndexMap;
use serde::Serialize;
use thiserror::Error;

use crate::calculus::CalculusVariant;
use crate::closure::{closure_with_cap, ClosureTable, ResourceLimit, DEFAULT_CLOSURE_CAP};
use crate::engine::{CountermodelHandle, SaturationState};
use crate::syntax::{render, Formula, Node, Store, Sym, Term};

pub const DEFAULT_ORACLE_CAP: u32 = 24;

/// A structure whose universe is the parameter set, each parameter naming
/// itself. Atoms outside `true_atoms` are false.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct StandardModel {
    pub universe: Vec<Term>,
    pub true_atoms: HashSet<Formula>,
}

impl StandardModel {
    pub fn holds(&self, atom: Formula) -> bool {
        self.true_atoms.contains(&atom)
    }
}

/// Truth values for the override domain of a closure.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct OverrideFn {
    pub assignment: IndexMap<Formula, bool>,
}

impl OverrideFn {
    /// Formulas outside the domain read as false.
    pub fn value(&self, f: Formula) -> bool {
        self.assignment.get(&f).copied().unwrap_or(false)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("formula is not a member of the closure")]
pub struct OutsideUniverse;

/// Closure members of the forms `A | B` and `A -> B` with `A != B`, and
/// quantifications whose variable occurs free in the body, in universe order.
pub fn override_domain(store: &Store, ct: &ClosureTable) -> Vec<Formula> {
    ct.universe()
        .iter()
        .copied()
        .filter(|&f| in_override_domain(store, f))
        .collect()
}

fn in_override_domain(store: &Store, f: Formula) -> bool {
    match store.node(f) {
        Node::Or(a, b) | Node::Imp(a, b) => a != b,
        Node::Forall(x, a) | Node::Exists(x, a) => store.is_free_in(*x, *a),
        _ => false,
    }
}

/// Decides `m ⊨_O x` clause by clause.
pub fn o_models(
    store: &Store,
    m: &StandardModel,
    o: &OverrideFn,
    x: Formula,
    ct: &ClosureTable,
) -> Result<bool, OutsideUniverse> {
    if !ct.contains(x) {
        return Err(OutsideUniverse);
    }
    let mut memo = HashMap::new();
    Ok(eval(store, m, o, x, ct, &mut memo))
}

fn eval(
    store: &Store,
    m: &StandardModel,
    o: &OverrideFn,
    x: Formula,
    ct: &ClosureTable,
    memo: &mut HashMap<Formula, bool>,
) -> bool {
    if let Some(&v) = memo.get(&x) {
        return v;
    }
    let v = match store.node(x) {
        Node::Top => true,
        Node::Bot => false,
        Node::Atom(..) => m.holds(x),
        Node::And(a, b) => eval(store, m, o, *a, ct, memo) && eval(store, m, o, *b, ct, memo),
        Node::Or(a, b) if a == b => eval(store, m, o, *a, ct, memo),
        Node::Or(a, b) => {
            eval(store, m, o, *a, ct, memo) || eval(store, m, o, *b, ct, memo) || o.value(x)
        }
        Node::Imp(a, b) if a == b => true,
        Node::Imp(a, b) => {
            eval(store, m, o, *b, ct, memo) || (!eval(store, m, o, *a, ct, memo) && o.value(x))
        }
        Node::Forall(v, a) | Node::Exists(v, a) if !store.is_free_in(*v, *a) => {
            eval(store, m, o, *a, ct, memo)
        }
        Node::Forall(..) => {
            let id = ct.id_of(x).expect("closure member");
            ct.sub_instances(id)
                .iter()
                .all(|&y| eval(store, m, o, ct.formula(y as usize), ct, memo))
                && o.value(x)
        }
        Node::Exists(..) => {
            let id = ct.id_of(x).expect("closure member");
            ct.sub_instances(id)
                .iter()
                .any(|&y| eval(store, m, o, ct.formula(y as usize), ct, memo))
                || o.value(x)
        }
    };
    memo.insert(x, v);
    v
}

/// One evaluation step per closure member; operands are closure ids that
/// precede the member.
#[derive(Debug, Clone)]
enum Op {
    Const(bool),
    /// Bit index into the assignment.
    Atom(u32),
    And(u32, u32),
    Copy(u32),
    Or(u32, u32, u32),
    Imp(u32, u32, u32),
    Forall(Box<[u32]>, u32),
    Exists(Box<[u32]>, u32),
}

/// The closure compiled into a straight-line evaluator over a bit vector
/// holding atom values followed by override values.
#[derive(Debug, Clone)]
struct Program {
    ops: Vec<Op>,
    atoms: Vec<Formula>,
    overrides: Vec<Formula>,
}

impl Program {
    fn compile(store: &Store, ct: &ClosureTable) -> Program {
        let mut atom_bit = HashMap::new();
        let mut atoms = Vec::new();
        for &f in ct.universe() {
            if matches!(store.node(f), Node::Atom(..)) {
                atom_bit.insert(f, atoms.len() as u32);
                atoms.push(f);
            }
        }
        let overrides = override_domain(store, ct);
        let base = atoms.len() as u32;
        let ov_bit: HashMap<Formula, u32> = overrides
            .iter()
            .enumerate()
            .map(|(i, &f)| (f, base + i as u32))
            .collect();
        let id = |f: Formula| ct.id_of(f).expect("closure member") as u32;
        let ops = ct
            .universe()
            .iter()
            .enumerate()
            .map(|(i, &f)| match store.node(f) {
                Node::Top => Op::Const(true),
                Node::Bot => Op::Const(false),
                Node::Atom(..) => Op::Atom(atom_bit[&f]),
                Node::And(a, b) => Op::And(id(*a), id(*b)),
                Node::Or(a, b) if a == b => Op::Copy(id(*a)),
                Node::Or(a, b) => Op::Or(id(*a), id(*b), ov_bit[&f]),
                Node::Imp(a, b) if a == b => Op::Const(true),
                Node::Imp(a, b) => Op::Imp(id(*a), id(*b), ov_bit[&f]),
                Node::Forall(v, a) | Node::Exists(v, a) if !store.is_free_in(*v, *a) => {
                    Op::Copy(id(*a))
                }
                Node::Forall(..) => Op::Forall(ct.sub_instances(i).into(), ov_bit[&f]),
                Node::Exists(..) => Op::Exists(ct.sub_instances(i).into(), ov_bit[&f]),
            })
            .collect();
        Program {
            ops,
            atoms,
            overrides,
        }
    }

    fn run(&self, bits: &dyn Fn(u32) -> bool, out: &mut Vec<bool>) {
        out.clear();
        for op in &self.ops {
            let v = match op {
                Op::Const(c) => *c,
                Op::Atom(b) => bits(*b),
                Op::And(a, b) => out[*a as usize] && out[*b as usize],
                Op::Copy(a) => out[*a as usize],
                Op::Or(a, b, o) => out[*a as usize] || out[*b as usize] || bits(*o),
                Op::Imp(a, b, o) => out[*b as usize] || (!out[*a as usize] && bits(*o)),
                Op::Forall(ys, o) => ys.iter().all(|&y| out[y as usize]) && bits(*o),
                Op::Exists(ys, o) => ys.iter().any(|&y| out[y as usize]) || bits(*o),
            };
            out.push(v);
        }
    }
}

/// Truth value of every closure member, in universe order.
pub fn evaluate_closure(
    store: &Store,
    m: &StandardModel,
    o: &OverrideFn,
    ct: &ClosureTable,
) -> Vec<bool> {
    let prog = Program::compile(store, ct);
    let bits = |b: u32| {
        let b = b as usize;
        if b < prog.atoms.len() {
            m.holds(prog.atoms[b])
        } else {
            o.value(prog.overrides[b - prog.atoms.len()])
        }
    };
    let mut out = Vec::with_capacity(ct.len());
    prog.run(&bits, &mut out);
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("instance needs 2^{exponent} evaluations, over the cap of 2^{cap}")]
    TooLarge { exponent: u64, cap: u32 },
    #[error(transparent)]
    Closure(#[from] ResourceLimit),
}

/// `sum over relations R of |P|^arity(R)` plus the size of the override
/// domain: the number of free bits in a (structure, override) pair.
pub fn oracle_exponent(store: &Store, ct: &ClosureTable) -> u64 {
    let p = ct.params().len() as u64;
    let mut rels: HashMap<Sym, usize> = HashMap::new();
    for &f in ct.universe() {
        if let Node::Atom(r, args) = store.node(f) {
            rels.insert(*r, args.len());
        }
    }
    let atoms: u64 = rels
        .values()
        .map(|&k| p.checked_pow(k as u32).unwrap_or(u64::MAX))
        .fold(0u64, |a, b| a.saturating_add(b));
    atoms.saturating_add(override_domain(store, ct).len() as u64)
}

pub fn semantic_yields_bruteforce(
    store: &mut Store,
    hyps: &[Formula],
    query: Formula,
) -> Result<bool, OracleError> {
    semantic_yields_bruteforce_with_cap(store, hyps, query, DEFAULT_ORACLE_CAP)
}

/// Decides `hyps ⊨ query` by enumerating every standard structure and override
/// function. Atoms absent from the closure never influence a closure formula,
/// so only closure atoms are enumerated; the cap is still charged for the
/// full tuple space.
pub fn semantic_yields_bruteforce_with_cap(
    store: &mut Store,
    hyps: &[Formula],
    query: Formula,
    cap: u32,
) -> Result<bool, OracleError> {
    let mut s = hyps.to_vec();
    s.push(query);
    let ct = closure_with_cap(store, &s, DEFAULT_CLOSURE_CAP)?;
    let exponent = oracle_exponent(store, &ct);
    if exponent > cap as u64 {
        return Err(OracleError::TooLarge { exponent, cap });
    }
    let prog = Program::compile(store, &ct);
    let hyp_ids: Vec<usize> = hyps
        .iter()
        .map(|&h| ct.id_of(h).expect("closure member"))
        .collect();
    let qid = ct.id_of(query).expect("closure member");
    let k = prog.atoms.len() + prog.overrides.len();
    let mut out = Vec::with_capacity(ct.len());
    for mask in 0u64..(1u64 << k) {
        prog.run(&|b| mask >> b & 1 == 1, &mut out);
        if hyp_ids.iter().all(|&h| out[h]) && !out[qid] {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CountermodelError {
    #[error("the query is entailed; no countermodel exists")]
    Entailed,
    #[error("saturation stopped before reaching its fixpoint")]
    NotAtFixpoint,
    #[error("countermodels are defined for qpl, and for pfqpl on quantifier-free input; got {0}")]
    UnsupportedVariant(CalculusVariant),
    #[error("constructed structure fails verification at `{0}`")]
    Verification(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Countermodel {
    pub model: StandardModel,
    pub overrides: OverrideFn,
}

/// JSON shape: `{"universe": [...], "atoms_true": [...], "override": {...}}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CountermodelJson {
    pub universe: Vec<String>,
    pub atoms_true: Vec<String>,
    #[serde(rename = "override")]
    pub overrides: IndexMap<String, bool>,
}

impl Countermodel {
    pub fn to_json(&self, store: &Store, ct: &ClosureTable) -> CountermodelJson {
        CountermodelJson {
            universe: self
                .model
                .universe
                .iter()
                .map(|&t| store.term_name(t).to_owned())
                .collect(),
            atoms_true: ct
                .universe()
                .iter()
                .filter(|&&f| self.model.holds(f))
                .map(|&f| render(store, f))
                .collect(),
            overrides: self
                .overrides
                .assignment
                .iter()
                .map(|(&f, &v)| (render(store, f), v))
                .collect(),
        }
    }
}

pub fn countermodel_for(
    store: &Store,
    handle: &CountermodelHandle,
) -> Result<Countermodel, CountermodelError> {
    countermodel(
        store,
        &handle.hyps,
        handle.query,
        &handle.state,
        &handle.closure,
        handle.variant,
    )
}

/// Atoms and overrides are true exactly on derived formulas. The result is
/// checked against the saturated state on every closure member before it is
/// returned.
pub fn countermodel(
    store: &Store,
    hyps: &[Formula],
    query: Formula,
    state: &SaturationState,
    ct: &ClosureTable,
    variant: CalculusVariant,
) -> Result<Countermodel, CountermodelError> {
    let quantifier_free = ct
        .universe()
        .iter()
        .all(|&f| store.quantifier_depth(f) == 0);
    match variant {
        CalculusVariant::Qpl => {}
        CalculusVariant::PfQpl if quantifier_free => {}
        v => return Err(CountermodelError::UnsupportedVariant(v)),
    }
    let qid = ct.id_of(query).expect("closure member");
    if state.is_derived(qid) {
        return Err(CountermodelError::Entailed);
    }
    if !state.at_fixpoint() {
        return Err(CountermodelError::NotAtFixpoint);
    }
    let mut model = StandardModel {
        universe: ct.params().elements().to_vec(),
        true_atoms: HashSet::new(),
    };
    let mut overrides = OverrideFn::default();
    for (i, &f) in ct.universe().iter().enumerate() {
        if matches!(store.node(f), Node::Atom(..)) && state.is_derived(i) {
            model.true_atoms.insert(f);
        }
        if in_override_domain(store, f) {
            overrides.assignment.insert(f, state.is_derived(i));
        }
    }
    let values = evaluate_closure(store, &model, &overrides, ct);
    for (i, &v) in values.iter().enumerate() {
        if v != state.is_derived(i) {
            return Err(CountermodelError::Verification(render(
                store,
                ct.formula(i),
            )));
        }
    }
    for &h in hyps {
        if !values[ct.id_of(h).expect("closure member")] {
            return Err(CountermodelError::Verification(render(store, h)));
        }
    }
    Ok(Countermodel { model, overrides })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closure::closure;
    use crate::engine::entails;
    use crate::syntax::parse_formula;

    fn f(s: &mut Store, text: &str) -> Formula {
        parse_formula(s, text, &[]).unwrap()
    }

    fn fs(s: &mut Store, texts: &[&str]) -> Vec<Formula> {
        texts.iter().map(|t| f(s, t)).collect()
    }

    #[test]
    fn override_domain_examples() {
        let mut s = Store::new();
        let set = fs(&mut s, &["p | q", "p -> p"]);
        let ct = closure(&mut s, &set).unwrap();
        assert_eq!(override_domain(&s, &ct), vec![set[0]]);

        let set = fs(&mut s, &["forall x. R(x)", "R(c)"]);
        let ct = closure(&mut s, &set).unwrap();
        assert_eq!(override_domain(&s, &ct), vec![set[0]]);

        let set = fs(&mut s, &["p | p"]);
        let ct = closure(&mut s, &set).unwrap();
        assert!(override_domain(&s, &ct).is_empty());
    }

    #[test]
    fn o_models_examples() {
        let mut s = Store::new();
        let set = fs(&mut s, &["A -> B", "B -> C", "A -> C", "true", "p | q"]);
        let ct = closure(&mut s, &set).unwrap();
        let m = StandardModel::default();
        let mut o = OverrideFn::default();
        assert!(o_models(&s, &m, &o, set[3], &ct).unwrap());
        o.assignment.insert(set[0], true);
        o.assignment.insert(set[1], true);
        o.assignment.insert(set[2], false);
        assert!(o_models(&s, &m, &o, set[0], &ct).unwrap());
        assert!(o_models(&s, &m, &o, set[1], &ct).unwrap());
        assert!(!o_models(&s, &m, &o, set[2], &ct).unwrap());
        assert!(!o_models(&s, &m, &o, set[4], &ct).unwrap());
        o.assignment.insert(set[4], true);
        assert!(o_models(&s, &m, &o, set[4], &ct).unwrap());
        let outside = f(&mut s, "zz");
        assert_eq!(o_models(&s, &m, &o, outside, &ct), Err(OutsideUniverse));
    }

    #[test]
    fn bruteforce_examples() {
        let mut s = Store::new();
        let v = fs(
            &mut s,
            &["A", "A -> B", "B -> C", "A -> C", "A | B", "A -> A"],
        );
        let (a, ab, bc, ac, aob, aa) = (v[0], v[1], v[2], v[3], v[4], v[5]);
        assert!(semantic_yields_bruteforce(&mut s, &[a], aob).unwrap());
        assert!(semantic_yields_bruteforce(&mut s, &[], aa).unwrap());
        assert!(!semantic_yields_bruteforce(&mut s, &[ab, bc], ac).unwrap());
    }

    #[test]
    fn bruteforce_refuses_over_cap() {
        let mut s = Store::new();
        let h = f(&mut s, "forall x. forall y. S(x, y) | T(x)");
        let q = f(&mut s, "S(a, b) | T(c)");
        assert!(matches!(
            semantic_yields_bruteforce_with_cap(&mut s, &[h], q, 10),
            Err(OracleError::TooLarge { .. })
        ));
    }

    fn build(s: &mut Store, hyps: &[&str], query: &str) -> (Countermodel, ClosureTable) {
        let hs = fs(s, hyps);
        let q = f(s, query);
        let v = entails(s, &hs, q, CalculusVariant::Qpl).unwrap();
        let h = v.countermodel.expect("not entailed");
        (countermodel_for(s, &h).unwrap(), h.closure)
    }

    #[test]
    fn transitivity_countermodel_has_the_expected_shape() {
        let mut s = Store::new();
        let (cm, ct) = build(&mut s, &["A -> B", "B -> C"], "A -> C");
        assert!(cm.model.true_atoms.is_empty());
        let json = cm.to_json(&s, &ct);
        assert!(json.overrides["A -> B"]);
        assert!(json.overrides["B -> C"]);
        assert!(!json.overrides["A -> C"]);
        assert_eq!(json.universe, vec!["_0"]);
    }

    #[test]
    fn atomic_and_existential_countermodels() {
        let mut s = Store::new();
        let (cm, ct) = build(&mut s, &["p"], "q");
        let json = cm.to_json(&s, &ct);
        assert_eq!(json.atoms_true, vec!["p"]);

        let (cm, ct) = build(&mut s, &["exists x. R(x)"], "R(c)");
        assert!(cm.model.true_atoms.is_empty());
        let json = cm.to_json(&s, &ct);
        assert!(json.overrides["exists x. R(x)"]);
        assert_eq!(json.universe, vec!["c"]);
        let text = serde_json::to_string(&json).unwrap();
        assert_eq!(
            text,
            r#"{"universe":["c"],"atoms_true":[],"override":{"exists x. R(x)":true}}"#
        );
    }

    #[test]
    fn countermodel_preconditions() {
        let mut s = Store::new();
        let hs = fs(&mut s, &["A -> B", "B -> C"]);
        let q = f(&mut s, "A -> C");
        let v = entails(&mut s, &hs, q, CalculusVariant::L2).unwrap();
        let h = v.countermodel.unwrap();
        assert_eq!(
            countermodel_for(&s, &h),
            Err(CountermodelError::UnsupportedVariant(CalculusVariant::L2))
        );
        let v = entails(&mut s, &hs, q, CalculusVariant::PfQpl).unwrap();
        assert!(countermodel_for(&s, &v.countermodel.unwrap()).is_ok());
    }

    #[test]
    fn compiled_evaluator_agrees_with_clauses() {
        let mut s = Store::new();
        let set = fs(
            &mut s,
            &[
                "forall x. R(x) | p",
                "exists y. R(y) -> q",
                "(p -> p) & (q | q)",
                "exists z. p",
            ],
        );
        let ct = closure(&mut s, &set).unwrap();
        let prog = Program::compile(&s, &ct);
        let k = prog.atoms.len() + prog.overrides.len();
        for mask in 0u64..(1 << k) {
            let m = StandardModel {
                universe: ct.params().elements().to_vec(),
                true_atoms: prog
                    .atoms
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask >> i & 1 == 1)
                    .map(|(_, &a)| a)
                    .collect(),
            };
            let o = OverrideFn {
                assignment: prog
                    .overrides
                    .iter()
                    .enumerate()
                    .map(|(i, &f)| (f, mask >> (prog.atoms.len() + i) & 1 == 1))
                    .collect(),
            };
            let all = evaluate_closure(&s, &m, &o, &ct);
            for (i, &x) in ct.universe().iter().enumerate() {
                assert_eq!(all[i], o_models(&s, &m, &o, x, &ct).unwrap());
            }
        }
    }

    mod props {
        use super::*;
        use crate::testgen::{build, build_all, instance};
        use proptest::prelude::*;
        use rand::{Rng, SeedableRng};
        use rand_chacha::ChaCha8Rng;

        fn random_pair(
            store: &Store,
            ct: &ClosureTable,
            rng: &mut ChaCha8Rng,
        ) -> (StandardModel, OverrideFn) {
            let m = StandardModel {
                universe: ct.params().elements().to_vec(),
                true_atoms: ct
                    .universe()
                    .iter()
                    .copied()
                    .filter(|&f| matches!(store.node(f), Node::Atom(..)) && rng.gen_bool(0.5))
                    .collect(),
            };
            let o = OverrideFn {
                assignment: override_domain(store, ct)
                    .into_iter()
                    .map(|f| (f, rng.gen_bool(0.5)))
                    .collect(),
            };
            (m, o)
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(128))]

            #[test]
            fn models_of_the_hypotheses_satisfy_every_proof_label((hyps, q) in instance(), seed: u64) {
                let mut s = Store::new();
                let hs = build_all(&mut s, &hyps);
                let q = build(&mut s, &q);
                let Some(proof) = entails(&mut s, &hs, q, CalculusVariant::Qpl).unwrap().proof else {
                    return Ok(());
                };
                let mut set = hs.clone();
                set.push(q);
                let ct = closure(&mut s, &set).unwrap();
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                for _ in 0..64 {
                    let (m, o) = random_pair(&s, &ct, &mut rng);
                    if hs.iter().all(|&h| o_models(&s, &m, &o, h, &ct).unwrap()) {
                        for n in &proof.nodes {
                            prop_assert!(o_models(&s, &m, &o, n.label, &ct).unwrap());
                        }
                    }
                }
            }

            #[test]
            fn non_entailment_has_a_verified_countermodel((hyps, q) in instance()) {
                let mut s = Store::new();
                let hs = build_all(&mut s, &hyps);
                let q = build(&mut s, &q);
                let v = entails(&mut s, &hs, q, CalculusVariant::Qpl).unwrap();
                if let Some(handle) = v.countermodel {
                    let cm = countermodel_for(&s, &handle).unwrap();
                    let ct = &handle.closure;
                    prop_assert!(hs.iter().all(|&h| o_models(&s, &cm.model, &cm.overrides, h, ct).unwrap()));
                    prop_assert!(!o_models(&s, &cm.model, &cm.overrides, q, ct).unwrap());
                }
            }
        }
    }
}
