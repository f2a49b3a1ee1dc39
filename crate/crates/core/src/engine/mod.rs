//! Entailment by saturation of the closure.
//!
//! Every rule application that can matter is compiled up front into an
//! instance over closure ids. Each instance keeps a counter of premises not yet
//! derived; deriving a formula decrements the counters of the instances that
//! watch it, and an instance fires when its counter reaches zero. Each instance
//! fires at most once, so a run costs time linear in the number of instances.

mod proof;

use std::collections::VecDeque;

use rustc_hash::FxHashSet as HashSet;

use serde::Serialize;

use crate::calculus::{CalculusVariant, Derivation, RuleName};
use crate::closure::{closure_with_cap, ClosureTable, ResourceLimit, DEFAULT_CLOSURE_CAP};
use crate::syntax::{literal_subformulas, Formula, Node, Store};

pub use proof::extract_proof;

/// All formulas of the form `X -> X` occurring as subformulas of the input,
/// in first-occurrence order.
pub fn local_axioms(store: &Store, hyps: &[Formula], queries: &[Formula]) -> Vec<Formula> {
    let mut seen = HashSet::default();
    let mut out = Vec::new();
    for &f in hyps.iter().chain(queries) {
        for g in literal_subformulas(store, f) {
            if let Node::Imp(a, b) = store.node(g) {
                if a == b && seen.insert(g) {
                    out.push(g);
                }
            }
        }
    }
    out
}

/// A rule instance over closure ids.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CompiledInstance {
    pub rule: RuleName,
    premises: [u32; 2],
    arity: u8,
    pub conclusion: u32,
}

impl CompiledInstance {
    fn new(rule: RuleName, premises: &[u32], conclusion: u32) -> Self {
        let mut p = [0; 2];
        p[..premises.len()].copy_from_slice(premises);
        CompiledInstance {
            rule,
            premises: p,
            arity: premises.len() as u8,
            conclusion,
        }
    }

    pub fn premises(&self) -> &[u32] {
        &self.premises[..self.arity as usize]
    }
}

#[derive(Debug, Clone)]
pub struct RuleTable {
    variant: CalculusVariant,
    universe_len: usize,
    instances: Vec<CompiledInstance>,
    /// CSR layout: the instances watching id `i` are
    /// `watch[watch_start[i]..watch_start[i + 1]]`, one entry per premise slot.
    watch_start: Vec<u32>,
    watch: Vec<u32>,
    seeds: Vec<(u32, RuleName)>,
    bottom: Option<u32>,
}

impl RuleTable {
    pub fn variant(&self) -> CalculusVariant {
        self.variant
    }

    pub fn instances(&self) -> &[CompiledInstance] {
        &self.instances
    }

    /// Axioms present in the closure, in universe order.
    pub fn seeds(&self) -> &[(u32, RuleName)] {
        &self.seeds
    }

    /// The id of `false` when the variant has ⊥E and `false` is in the closure.
    pub fn bottom(&self) -> Option<u32> {
        self.bottom
    }

    fn watchers(&self, id: u32) -> &[u32] {
        let i = id as usize;
        &self.watch[self.watch_start[i] as usize..self.watch_start[i + 1] as usize]
    }
}

pub fn compile_rules(store: &Store, ct: &ClosureTable, variant: CalculusVariant) -> RuleTable {
    use RuleName::*;
    let n = ct.len();
    let mut instances = Vec::new();
    let mut seeds = Vec::new();
    let mut bottom = None;
    let id = |f: Formula| {
        ct.id_of(f)
            .expect("closure is closed under immediate subformulas") as u32
    };
    for (i, &x) in ct.universe().iter().enumerate() {
        let xi = i as u32;
        let mut push = |rule: RuleName, premises: &[u32], conclusion: u32| {
            if variant.admits(rule) {
                instances.push(CompiledInstance::new(rule, premises, conclusion));
            }
        };
        match store.node(x) {
            Node::Top => {
                if variant.admits(TopI) {
                    seeds.push((xi, TopI));
                }
            }
            Node::Bot => {
                if variant.admits(BotE) {
                    bottom = Some(xi);
                }
            }
            Node::Atom(..) => {}
            Node::And(a, b) => {
                let (a, b) = (id(*a), id(*b));
                push(AndI, &[a, b], xi);
                push(AndE_L, &[xi], a);
                push(AndE_R, &[xi], b);
            }
            Node::Or(a, b) if a == b => {
                let a = id(*a);
                push(OrI_L, &[a], xi);
                push(OrE, &[xi], a);
            }
            Node::Or(a, b) => {
                let (a, b) = (id(*a), id(*b));
                push(OrI_L, &[a], xi);
                push(OrI_R, &[b], xi);
            }
            Node::Imp(a, b) => {
                let (a, b) = (id(*a), id(*b));
                push(ImpI, &[b], xi);
                push(ImpE, &[a, xi], b);
                if a == b && variant.admits(ImpAx) {
                    seeds.push((xi, ImpAx));
                }
            }
            Node::Forall(v, body) => {
                for &y in ct.sub_instances(i) {
                    push(ForallE, &[xi], y);
                }
                if !store.is_free_in(*v, *body) {
                    push(ForallI, &[id(*body)], xi);
                }
            }
            Node::Exists(v, body) => {
                for &y in ct.sub_instances(i) {
                    push(ExistsI, &[y], xi);
                }
                if !store.is_free_in(*v, *body) {
                    push(ExistsE, &[xi], id(*body));
                }
            }
        }
    }

    let mut watch_start = vec![0u32; n + 1];
    for inst in &instances {
        for &p in inst.premises() {
            watch_start[p as usize + 1] += 1;
        }
    }
    for i in 0..n {
        watch_start[i + 1] += watch_start[i];
    }
    let mut fill = watch_start.clone();
    let mut watch = vec![0u32; watch_start[n] as usize];
    for (k, inst) in instances.iter().enumerate() {
        for &p in inst.premises() {
            watch[fill[p as usize] as usize] = k as u32;
            fill[p as usize] += 1;
        }
    }
    RuleTable {
        variant,
        universe_len: n,
        instances,
        watch_start,
        watch,
        seeds,
        bottom,
    }
}

/// How a formula first entered the derived set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    Underived,
    Hypothesis,
    Axiom(RuleName),
    Rule {
        rule: RuleName,
        premises: [u32; 2],
        arity: u8,
    },
}

impl Provenance {
    pub fn premises(&self) -> &[u32] {
        match self {
            Provenance::Rule {
                premises, arity, ..
            } => &premises[..*arity as usize],
            _ => &[],
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct SaturationStats {
    pub universe_size: usize,
    pub instances: usize,
    pub fired: usize,
    pub processed: usize,
    pub derived: usize,
}

#[derive(Debug, Clone)]
pub struct SaturationState {
    derived: Vec<bool>,
    counters: Vec<u8>,
    provenance: Vec<Provenance>,
    bot_flag: bool,
    fixpoint: bool,
    stats: SaturationStats,
}

impl SaturationState {
    pub fn is_derived(&self, id: usize) -> bool {
        self.derived[id]
    }

    pub fn derived_ids(&self) -> impl Iterator<Item = usize> + '_ {
        self.derived
            .iter()
            .enumerate()
            .filter(|(_, &d)| d)
            .map(|(i, _)| i)
    }

    pub fn provenance(&self, id: usize) -> Provenance {
        self.provenance[id]
    }

    /// Remaining undischarged premises of each compiled instance.
    pub fn counters(&self) -> &[u8] {
        &self.counters
    }

    /// Set once `false` is derived in a variant with ⊥E.
    pub fn bot_flag(&self) -> bool {
        self.bot_flag
    }

    /// False when the run stopped early at its target.
    pub fn at_fixpoint(&self) -> bool {
        self.fixpoint
    }

    pub fn stats(&self) -> SaturationStats {
        self.stats
    }
}

/// Saturates `hyps` over the closure `ct`.
///
/// Panics if a hypothesis is outside the closure.
pub fn saturate(
    store: &Store,
    hyps: &[Formula],
    ct: &ClosureTable,
    variant: CalculusVariant,
    stop_at: Option<Formula>,
) -> SaturationState {
    let rules = compile_rules(store, ct, variant);
    let hyp_ids: Vec<u32> = hyps
        .iter()
        .map(|&h| ct.id_of(h).expect("hypothesis outside the closure") as u32)
        .collect();
    saturate_compiled(
        &rules,
        &hyp_ids,
        stop_at.and_then(|f| ct.id_of(f)).map(|i| i as u32),
    )
}

pub fn saturate_compiled(rules: &RuleTable, hyps: &[u32], stop_at: Option<u32>) -> SaturationState {
    let n = rules.universe_len;
    let mut st = SaturationState {
        derived: vec![false; n],
        counters: rules.instances.iter().map(|i| i.arity).collect(),
        provenance: vec![Provenance::Underived; n],
        bot_flag: false,
        fixpoint: false,
        stats: SaturationStats {
            universe_size: n,
            instances: rules.instances.len(),
            ..Default::default()
        },
    };
    let mut agenda = VecDeque::new();
    let mark = |st: &mut SaturationState, agenda: &mut VecDeque<u32>, id: u32, p: Provenance| {
        let i = id as usize;
        if st.derived[i] {
            return false;
        }
        st.derived[i] = true;
        st.provenance[i] = p;
        st.stats.derived += 1;
        agenda.push_back(id);
        stop_at == Some(id)
    };

    let mut stopped = false;
    for &h in hyps {
        stopped |= mark(&mut st, &mut agenda, h, Provenance::Hypothesis);
    }
    for &(a, rule) in &rules.seeds {
        stopped |= mark(&mut st, &mut agenda, a, Provenance::Axiom(rule));
    }

    while !stopped {
        let Some(x) = agenda.pop_front() else {
            st.fixpoint = true;
            break;
        };
        st.stats.processed += 1;
        if rules.bottom == Some(x) {
            st.bot_flag = true;
            let prov = Provenance::Rule {
                rule: RuleName::BotE,
                premises: [x, 0],
                arity: 1,
            };
            for i in 0..n {
                if !st.derived[i] {
                    st.derived[i] = true;
                    st.provenance[i] = prov;
                    st.stats.derived += 1;
                }
            }
            st.fixpoint = true;
            break;
        }
        for &k in rules.watchers(x) {
            let c = &mut st.counters[k as usize];
            *c -= 1;
            if *c == 0 {
                let inst = rules.instances[k as usize];
                st.stats.fired += 1;
                let prov = Provenance::Rule {
                    rule: inst.rule,
                    premises: inst.premises,
                    arity: inst.arity,
                };
                if mark(&mut st, &mut agenda, inst.conclusion, prov) {
                    stopped = true;
                }
            }
        }
    }
    st
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EngineOptions {
    pub closure_cap: usize,
}

impl Default for EngineOptions {
    fn default() -> Self {
        EngineOptions {
            closure_cap: DEFAULT_CLOSURE_CAP,
        }
    }
}

/// Everything needed to build a countermodel for a failed query.
#[derive(Debug, Clone)]
pub struct CountermodelHandle {
    pub hyps: Vec<Formula>,
    pub query: Formula,
    pub variant: CalculusVariant,
    pub closure: ClosureTable,
    pub state: SaturationState,
}

#[derive(Debug, Clone)]
pub struct Verdict {
    pub entailed: bool,
    pub proof: Option<Derivation>,
    pub countermodel: Option<CountermodelHandle>,
    pub stats: SaturationStats,
}

pub fn entails(
    store: &mut Store,
    hyps: &[Formula],
    query: Formula,
    variant: CalculusVariant,
) -> Result<Verdict, ResourceLimit> {
    entails_with(store, hyps, query, variant, EngineOptions::default())
}

pub fn entails_with(
    store: &mut Store,
    hyps: &[Formula],
    query: Formula,
    variant: CalculusVariant,
    options: EngineOptions,
) -> Result<Verdict, ResourceLimit> {
    let mut s = hyps.to_vec();
    s.push(query);
    let ct = closure_with_cap(store, &s, options.closure_cap)?;
    let state = saturate(store, hyps, &ct, variant, Some(query));
    let qid = ct.id_of(query).expect("query is in its own closure");
    let stats = state.stats();
    if state.is_derived(qid) {
        let proof = extract_proof(&state, &ct, query);
        Ok(Verdict {
            entailed: true,
            proof: Some(proof),
            countermodel: None,
            stats,
        })
    } else {
        Ok(Verdict {
            entailed: false,
            proof: None,
            countermodel: Some(CountermodelHandle {
                hyps: hyps.to_vec(),
                query,
                variant,
                closure: ct,
                state,
            }),
            stats,
        })
    }
}

/// Decides every query against `hyps` with one closure and one saturation.
pub fn multi_entails(
    store: &mut Store,
    hyps: &[Formula],
    queries: &[Formula],
    variant: CalculusVariant,
) -> Result<Vec<bool>, ResourceLimit> {
    multi_entails_with(store, hyps, queries, variant, EngineOptions::default())
}

pub fn multi_entails_with(
    store: &mut Store,
    hyps: &[Formula],
    queries: &[Formula],
    variant: CalculusVariant,
    options: EngineOptions,
) -> Result<Vec<bool>, ResourceLimit> {
    let mut s = hyps.to_vec();
    s.extend_from_slice(queries);
    let ct = closure_with_cap(store, &s, options.closure_cap)?;
    let state = saturate(store, hyps, &ct, variant, None);
    Ok(queries
        .iter()
        .map(|&q| state.is_derived(ct.id_of(q).expect("query is in the closure")))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::{check_derivation, NodeKind};
    use crate::closure::closure;
    use crate::syntax::{parse_formula, render};

    fn f(s: &mut Store, text: &str) -> Formula {
        parse_formula(s, text, &[]).unwrap()
    }

    fn decide(hyps: &[&str], query: &str, variant: CalculusVariant) -> bool {
        let mut s = Store::new();
        let hs: Vec<Formula> = hyps.iter().map(|h| f(&mut s, h)).collect();
        let q = f(&mut s, query);
        let v = entails(&mut s, &hs, q, variant).unwrap();
        if let Some(p) = &v.proof {
            let r = check_derivation(&mut s, p, variant, &hs, Some(q)).unwrap();
            assert!(r.passed, "{r}");
        }
        v.entailed
    }

    #[test]
    fn local_axiom_examples() {
        let mut s = Store::new();
        let h = f(&mut s, "(q -> q) -> r");
        let r = f(&mut s, "r");
        let qq = f(&mut s, "q -> q");
        assert_eq!(local_axioms(&s, &[h], &[r]), vec![qq]);
        let h = f(&mut s, "p -> q");
        let q = f(&mut s, "q");
        assert!(local_axioms(&s, &[h], &[q]).is_empty());
        let h = f(&mut s, "(p -> p) -> (p -> p)");
        let pp = f(&mut s, "p -> p");
        assert_eq!(local_axioms(&s, &[h], &[]), vec![h, pp]);
    }

    fn instance_set(
        s: &mut Store,
        texts: &[&str],
        variant: CalculusVariant,
    ) -> HashSet<(RuleName, Vec<String>, String)> {
        let fs: Vec<Formula> = texts.iter().map(|t| f(s, t)).collect();
        let ct = closure(s, &fs).unwrap();
        let rules = compile_rules(s, &ct, variant);
        rules
            .instances()
            .iter()
            .map(|i| {
                (
                    i.rule,
                    i.premises()
                        .iter()
                        .map(|&p| render(s, ct.formula(p as usize)))
                        .collect(),
                    render(s, ct.formula(i.conclusion as usize)),
                )
            })
            .collect()
    }

    fn inst(
        rule: RuleName,
        premises: &[&str],
        conclusion: &str,
    ) -> (RuleName, Vec<String>, String) {
        (
            rule,
            premises.iter().map(|p| p.to_string()).collect(),
            conclusion.to_string(),
        )
    }

    #[test]
    fn compiled_instance_examples() {
        let mut s = Store::new();
        let got = instance_set(&mut s, &["p & q"], CalculusVariant::Qpl);
        let want: HashSet<_> = [
            inst(RuleName::AndI, &["p", "q"], "p & q"),
            inst(RuleName::AndE_L, &["p & q"], "p"),
            inst(RuleName::AndE_R, &["p & q"], "q"),
        ]
        .into_iter()
        .collect();
        assert_eq!(got, want);

        let got = instance_set(&mut s, &["forall x. R(x)", "R(c)"], CalculusVariant::Qpl);
        let want: HashSet<_> = [inst(RuleName::ForallE, &["forall x. R(x)"], "R(c)")]
            .into_iter()
            .collect();
        assert_eq!(got, want);

        let got = instance_set(&mut s, &["exists x. p"], CalculusVariant::Qpl);
        let want: HashSet<_> = [
            inst(RuleName::ExistsI, &["p"], "exists x. p"),
            inst(RuleName::ExistsE, &["exists x. p"], "p"),
        ]
        .into_iter()
        .collect();
        assert_eq!(got, want);
    }

    #[test]
    fn rules_outside_the_variant_are_omitted() {
        let mut s = Store::new();
        let got = instance_set(
            &mut s,
            &["p | q", "forall x. R(x)"],
            CalculusVariant::Original,
        );
        assert!(got.is_empty());
        let got = instance_set(&mut s, &["p | p"], CalculusVariant::L1);
        assert_eq!(got.len(), 2);
    }

    #[test]
    fn saturation_examples() {
        let mut s = Store::new();
        let p = f(&mut s, "p");
        let pq = f(&mut s, "p -> q");
        let ct = closure(&mut s, &[p, pq]).unwrap();
        let st = saturate(&s, &[p, pq], &ct, CalculusVariant::Qpl, None);
        assert!(st.at_fixpoint());
        assert_eq!(st.derived_ids().count(), 3);

        let h = f(&mut s, "(q -> q) -> r");
        let r = f(&mut s, "r");
        let ct = closure(&mut s, &[h, r]).unwrap();
        let st = saturate(&s, &[h], &ct, CalculusVariant::PfQpl, Some(r));
        assert!(st.is_derived(ct.id_of(r).unwrap()));
        let st = saturate(&s, &[h], &ct, CalculusVariant::L2, None);
        assert!(!st.is_derived(ct.id_of(r).unwrap()));

        let h = f(&mut s, "exists x. R(x)");
        let rc = f(&mut s, "R(c)");
        let ct = closure(&mut s, &[h, rc]).unwrap();
        let st = saturate(&s, &[h], &ct, CalculusVariant::Qpl, None);
        assert_eq!(
            st.derived_ids().collect::<Vec<_>>(),
            vec![ct.id_of(h).unwrap()]
        );
    }

    #[test]
    fn entailment_examples() {
        use CalculusVariant::*;
        assert!(!decide(&["A -> B", "B -> C"], "A -> C", Qpl));
        assert!(decide(&["forall x. R(x)"], "R(c)", Qpl));
        assert!(decide(&["false"], "forall x. exists y. S(x, y)", Qpl));
        assert!(decide(&["R(c)"], "exists x. R(x)", Qpl));
        assert!(decide(&["p"], "forall x. p", Qpl));
        assert!(!decide(&["p"], "forall x. p", PfQpl));
        assert!(decide(&["p | p"], "p", L1));
        assert!(!decide(&["p | p"], "p", Original));
        assert!(decide(&["true -> false"], "false", L2));
        assert!(!decide(&["(true -> false) | false"], "false", Qpl));
        assert!(decide(&[], "p -> p", PfQpl));
        assert!(!decide(&[], "p -> p", L2));
        assert!(decide(&["q"], "p -> q", Original));
    }

    #[test]
    fn multi_entailment_examples() {
        let mut s = Store::new();
        let hs = [f(&mut s, "p"), f(&mut s, "p -> q & r")];
        let qs = [f(&mut s, "q"), f(&mut s, "r"), f(&mut s, "s")];
        assert_eq!(
            multi_entails(&mut s, &hs, &qs, CalculusVariant::Qpl).unwrap(),
            vec![true, true, false]
        );
        let hs = [f(&mut s, "p | p")];
        let qs = [f(&mut s, "p")];
        assert_eq!(
            multi_entails(&mut s, &hs, &qs, CalculusVariant::Qpl).unwrap(),
            vec![true]
        );
        let qs = [f(&mut s, "true"), f(&mut s, "false")];
        assert_eq!(
            multi_entails(&mut s, &[], &qs, CalculusVariant::Qpl).unwrap(),
            vec![true, false]
        );
    }

    fn proof_of(hyps: &[&str], query: &str) -> (Store, Derivation) {
        let mut s = Store::new();
        let hs: Vec<Formula> = hyps.iter().map(|h| f(&mut s, h)).collect();
        let q = f(&mut s, query);
        let v = entails(&mut s, &hs, q, CalculusVariant::Qpl).unwrap();
        let p = v.proof.unwrap();
        assert!(
            check_derivation(&mut s, &p, CalculusVariant::Qpl, &hs, Some(q))
                .unwrap()
                .passed
        );
        (s, p)
    }

    #[test]
    fn proof_shapes() {
        let (_, p) = proof_of(&["p", "p -> q"], "q");
        assert_eq!(p.nodes.len(), 3);
        assert_eq!(p.node(p.root).unwrap().rule, Some(RuleName::ImpE));

        let (_, p) = proof_of(&["p & q"], "q & p");
        assert_eq!(p.nodes.len(), 4);
        assert_eq!(p.expand_tree(100).unwrap().nodes.len(), 5);
        let mut rules: Vec<_> = p.nodes.iter().filter_map(|n| n.rule).collect();
        rules.sort();
        assert_eq!(
            rules,
            vec![RuleName::AndI, RuleName::AndE_L, RuleName::AndE_R]
        );

        let (_, p) = proof_of(&["false"], "r");
        assert_eq!(p.nodes.len(), 2);
        assert_eq!(p.node(p.root).unwrap().rule, Some(RuleName::BotE));
        assert!(p.nodes.iter().any(|n| n.kind == NodeKind::Hypothesis));
    }

    #[test]
    fn early_stop_matches_fixpoint() {
        let mut s = Store::new();
        let hs = [
            f(&mut s, "p"),
            f(&mut s, "p -> q"),
            f(&mut s, "q -> r"),
            f(&mut s, "forall x. R(x) | s"),
        ];
        let qs = [f(&mut s, "r"), f(&mut s, "R(c) | s"), f(&mut s, "t")];
        let mut all = hs.to_vec();
        all.extend_from_slice(&qs);
        let ct = closure(&mut s, &all).unwrap();
        let full = saturate(&s, &hs, &ct, CalculusVariant::Qpl, None);
        for &q in &qs {
            let st = saturate(&s, &hs, &ct, CalculusVariant::Qpl, Some(q));
            let id = ct.id_of(q).unwrap();
            assert_eq!(st.is_derived(id), full.is_derived(id));
        }
    }

    #[test]
    fn deep_chains_do_not_overflow() {
        let mut s = Store::new();
        let n = 200_000;
        let mut hs = vec![f(&mut s, "p0")];
        for i in 0..n {
            let a = s.atom_named(&format!("p{i}"), &[]);
            let b = s.atom_named(&format!("p{}", i + 1), &[]);
            hs.push(s.imp(a, b));
        }
        let q = s.atom_named(&format!("p{n}"), &[]);
        let v = entails(&mut s, &hs, q, CalculusVariant::PfQpl).unwrap();
        assert!(v.entailed);
        assert_eq!(v.proof.unwrap().nodes.len(), 2 * n + 1);
    }

    mod props {
        use super::*;
        use crate::testgen::{build, build_all, instance, Shape};
        use proptest::prelude::*;

        fn variant() -> impl Strategy<Value = CalculusVariant> {
            prop::sample::select(CalculusVariant::ALL.to_vec())
        }

        fn setup(hyps: &[Shape], q: &Shape) -> (Store, Vec<Formula>, Formula) {
            let mut s = Store::new();
            let hs = build_all(&mut s, hyps);
            let q = build(&mut s, q);
            (s, hs, q)
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(128))]

            #[test]
            fn early_stop_agrees_with_fixpoint((hyps, q) in instance(), v in variant()) {
                let (mut s, hs, q) = setup(&hyps, &q);
                let early = entails(&mut s, &hs, q, v).unwrap().entailed;
                prop_assert_eq!(early, multi_entails(&mut s, &hs, &[q], v).unwrap()[0]);
            }

            #[test]
            fn verdicts_are_deterministic((hyps, q) in instance(), v in variant()) {
                let run = || {
                    let (mut s, hs, q) = setup(&hyps, &q);
                    let verdict = entails(&mut s, &hs, q, v).unwrap();
                    (verdict.entailed, verdict.stats, verdict.proof.map(|p| p.to_json_string(&s)))
                };
                prop_assert_eq!(run(), run());
            }

            #[test]
            fn proofs_check_in_their_variant_and_every_later_one((hyps, q) in instance(), v in variant()) {
                let (mut s, hs, q) = setup(&hyps, &q);
                let verdict = entails(&mut s, &hs, q, v).unwrap();
                if let Some(proof) = verdict.proof {
                    let mut set = hs.clone();
                    set.push(q);
                    let ct = closure(&mut s, &set).unwrap();
                    prop_assert!(proof.nodes.iter().all(|n| ct.contains(n.label)));
                    for later in CalculusVariant::ALL.into_iter().filter(|&w| w >= v) {
                        let report = check_derivation(&mut s, &proof, later, &hs, Some(q)).unwrap();
                        prop_assert!(report.passed, "{} under {}", report, later);
                    }
                }
            }

            #[test]
            fn consequence_laws((hyps, q) in instance(), extra in crate::testgen::shape(), v in variant()) {
                let (mut s, hs, q) = setup(&hyps, &q);
                for &h in &hs {
                    prop_assert!(entails(&mut s, &hs, h, v).unwrap().entailed);
                }
                if entails(&mut s, &hs, q, v).unwrap().entailed {
                    let mut more = hs.clone();
                    more.push(build(&mut s, &extra));
                    prop_assert!(entails(&mut s, &more, q, v).unwrap().entailed);
                    // Cut: anything entailed by `hs` plus `q` is entailed by `hs`.
                    let mut with_q = hs.clone();
                    with_q.push(q);
                    let e = build(&mut s, &extra);
                    if entails(&mut s, &with_q, e, v).unwrap().entailed {
                        prop_assert!(entails(&mut s, &hs, e, v).unwrap().entailed);
                    }
                }
            }
        }
    }
}
