//! Derivations as labeled DAGs and the node-by-node checker.
//!
//! A shared node stands for every copy of its subtree in the unfolded tree, so
//! checking each DAG node once checks the whole unfolding.

use std::collections::{HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{match_rule, CalculusVariant, RejectReason, RuleName};
use crate::syntax::{parse_formula_with, render, Formula, ParseOptions, Store, SyntaxError};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeKind {
    Axiom,
    Hypothesis,
    Rule,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DerivationNode {
    pub id: usize,
    pub label: Formula,
    pub kind: NodeKind,
    pub rule: Option<RuleName>,
    /// Ids of the premise nodes, in premise order.
    pub parents: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Derivation {
    pub root: usize,
    pub nodes: Vec<DerivationNode>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeJson {
    pub id: usize,
    pub label: String,
    pub kind: NodeKind,
    pub rule: Option<RuleName>,
    pub parents: Vec<usize>,
}

/// Wire format: `{"root": id, "nodes": [{"id", "label", "kind", "rule", "parents"}]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DerivationJson {
    pub root: usize,
    pub nodes: Vec<NodeJson>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StructureError {
    #[error("node id {0} occurs more than once")]
    DuplicateId(usize),
    #[error("node {node} lists parent {parent}, which does not exist")]
    DanglingParent { node: usize, parent: usize },
    #[error("root id {0} does not exist")]
    MissingRoot(usize),
    #[error("parent links form a cycle through node {0}")]
    Cycle(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NodeFailure {
    #[error("label is not among the hypotheses")]
    UnknownHypothesis,
    #[error("leaf node has parents")]
    UnexpectedParents,
    #[error("rule node has no parents")]
    MissingParents,
    #[error("rule node has no rule name")]
    MissingRule,
    #[error("{0} is not a leaf rule")]
    NotAnAxiomRule(RuleName),
    #[error("hypothesis node carries rule {0}")]
    UnexpectedRule(RuleName),
    #[error("{0}")]
    Rejected(RejectReason),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeReport {
    pub id: usize,
    pub failure: Option<NodeFailure>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Report {
    pub nodes: Vec<NodeReport>,
    /// Set when an expected conclusion was given and the root label differs.
    pub root_mismatch: bool,
    pub passed: bool,
}

impl Report {
    pub fn failures(&self) -> impl Iterator<Item = &NodeReport> {
        self.nodes.iter().filter(|n| n.failure.is_some())
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for n in &self.nodes {
            match &n.failure {
                None => writeln!(f, "node {}: ok", n.id)?,
                Some(e) => writeln!(f, "node {}: FAIL ({e})", n.id)?,
            }
        }
        if self.root_mismatch {
            writeln!(f, "root: FAIL (label differs from the expected conclusion)")?;
        }
        write!(f, "{}", if self.passed { "PASS" } else { "FAIL" })
    }
}

impl Derivation {
    pub fn node(&self, id: usize) -> Option<&DerivationNode> {
        self.nodes.iter().find(|n| n.id == id)
    }

    pub fn root_label(&self) -> Option<Formula> {
        self.node(self.root).map(|n| n.label)
    }

    pub fn to_json(&self, store: &Store) -> DerivationJson {
        DerivationJson {
            root: self.root,
            nodes: self
                .nodes
                .iter()
                .map(|n| NodeJson {
                    id: n.id,
                    label: render(store, n.label),
                    kind: n.kind,
                    rule: n.rule,
                    parents: n.parents.clone(),
                })
                .collect(),
        }
    }

    pub fn to_json_string(&self, store: &Store) -> String {
        serde_json::to_string_pretty(&self.to_json(store)).expect("derivation serializes")
    }

    /// Reads labels back with `declared_vars` as the free variables. Reserved
    /// identifiers such as the fixed constant are accepted here.
    pub fn from_json(
        store: &mut Store,
        json: &DerivationJson,
        declared_vars: &[&str],
    ) -> Result<Derivation, SyntaxError> {
        let opts = ParseOptions {
            allow_reserved: true,
        };
        let mut nodes = Vec::with_capacity(json.nodes.len());
        for n in &json.nodes {
            nodes.push(DerivationNode {
                id: n.id,
                label: parse_formula_with(store, &n.label, declared_vars, opts)?,
                kind: n.kind,
                rule: n.rule,
                parents: n.parents.clone(),
            });
        }
        Ok(Derivation {
            root: json.root,
            nodes,
        })
    }

    /// Unfolds shared nodes into a tree, failing once more than `cap` nodes
    /// would be produced.
    pub fn expand_tree(&self, cap: usize) -> Result<Derivation, ExpandError> {
        let by_id: HashMap<usize, &DerivationNode> = self.nodes.iter().map(|n| (n.id, n)).collect();
        let mut out: Vec<DerivationNode> = Vec::new();
        // (source id, slot in the parent's parent list to patch)
        let mut stack: Vec<(usize, Option<(usize, usize)>)> = vec![(self.root, None)];
        while let Some((src, patch)) = stack.pop() {
            if out.len() >= cap {
                return Err(ExpandError { cap });
            }
            let n = by_id.get(&src).ok_or(ExpandError { cap })?;
            let new_id = out.len();
            out.push(DerivationNode {
                id: new_id,
                label: n.label,
                kind: n.kind,
                rule: n.rule,
                parents: vec![usize::MAX; n.parents.len()],
            });
            if let Some((owner, slot)) = patch {
                out[owner].parents[slot] = new_id;
            }
            for (slot, &p) in n.parents.iter().enumerate().rev() {
                stack.push((p, Some((new_id, slot))));
            }
        }
        Ok(Derivation {
            root: 0,
            nodes: out,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("tree unfolding exceeds {cap} nodes")]
pub struct ExpandError {
    pub cap: usize,
}

/// Checks every node of `d` against `variant`.
///
/// Structural defects (duplicate or dangling ids, cycles, missing root) are
/// returned as `Err`; logical defects are reported per node.
pub fn check_derivation(
    store: &mut Store,
    d: &Derivation,
    variant: CalculusVariant,
    hyps: &[Formula],
    expected_conclusion: Option<Formula>,
) -> Result<Report, StructureError> {
    let mut by_id: HashMap<usize, usize> = HashMap::with_capacity(d.nodes.len());
    for (i, n) in d.nodes.iter().enumerate() {
        if by_id.insert(n.id, i).is_some() {
            return Err(StructureError::DuplicateId(n.id));
        }
    }
    if !by_id.contains_key(&d.root) {
        return Err(StructureError::MissingRoot(d.root));
    }
    for n in &d.nodes {
        for &p in &n.parents {
            if !by_id.contains_key(&p) {
                return Err(StructureError::DanglingParent {
                    node: n.id,
                    parent: p,
                });
            }
        }
    }
    detect_cycle(d, &by_id)?;

    let hyp_set: HashSet<Formula> = hyps.iter().copied().collect();
    let mut reports = Vec::with_capacity(d.nodes.len());
    for n in &d.nodes {
        let failure = check_node(store, d, &by_id, n, variant, &hyp_set);
        reports.push(NodeReport { id: n.id, failure });
    }
    let root_label = d.nodes[by_id[&d.root]].label;
    let root_mismatch = expected_conclusion.is_some_and(|c| c != root_label);
    let passed = !root_mismatch && reports.iter().all(|r| r.failure.is_none());
    Ok(Report {
        nodes: reports,
        root_mismatch,
        passed,
    })
}

fn check_node(
    store: &mut Store,
    d: &Derivation,
    by_id: &HashMap<usize, usize>,
    n: &DerivationNode,
    variant: CalculusVariant,
    hyps: &HashSet<Formula>,
) -> Option<NodeFailure> {
    match n.kind {
        NodeKind::Hypothesis => {
            if !n.parents.is_empty() {
                Some(NodeFailure::UnexpectedParents)
            } else if let Some(r) = n.rule {
                Some(NodeFailure::UnexpectedRule(r))
            } else if !hyps.contains(&n.label) {
                Some(NodeFailure::UnknownHypothesis)
            } else {
                None
            }
        }
        NodeKind::Axiom => {
            if !n.parents.is_empty() {
                return Some(NodeFailure::UnexpectedParents);
            }
            let rule = match n.rule {
                Some(r) if r.is_axiom() => r,
                Some(r) => return Some(NodeFailure::NotAnAxiomRule(r)),
                None => return Some(NodeFailure::MissingRule),
            };
            match_rule(store, variant, rule, &[], n.label)
                .err()
                .map(NodeFailure::Rejected)
        }
        NodeKind::Rule => {
            let Some(rule) = n.rule else {
                return Some(NodeFailure::MissingRule);
            };
            if n.parents.is_empty() {
                return Some(NodeFailure::MissingParents);
            }
            let premises: Vec<Formula> =
                n.parents.iter().map(|p| d.nodes[by_id[p]].label).collect();
            match_rule(store, variant, rule, &premises, n.label)
                .err()
                .map(NodeFailure::Rejected)
        }
    }
}

fn detect_cycle(d: &Derivation, by_id: &HashMap<usize, usize>) -> Result<(), StructureError> {
    // 0 = unvisited, 1 = on the current path, 2 = done
    let mut color = vec![0u8; d.nodes.len()];
    for start in 0..d.nodes.len() {
        if color[start] != 0 {
            continue;
        }
        let mut stack: Vec<(usize, usize)> = vec![(start, 0)];
        color[start] = 1;
        while let Some(&mut (i, ref mut next)) = stack.last_mut() {
            if let Some(&p) = d.nodes[i].parents.get(*next) {
                *next += 1;
                let j = by_id[&p];
                match color[j] {
                    0 => {
                        color[j] = 1;
                        stack.push((j, 0));
                    }
                    1 => return Err(StructureError::Cycle(d.nodes[j].id)),
                    _ => {}
                }
            } else {
                color[i] = 2;
                stack.pop();
            }
        }
    }
    Ok(())
}
