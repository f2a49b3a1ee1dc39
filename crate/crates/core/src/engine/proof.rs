use super::{Provenance, SaturationState};
use crate::calculus::{Derivation, DerivationNode, NodeKind};
use crate::closure::ClosureTable;
use crate::syntax::Formula;

/// Builds a derivation DAG of `target` from first-derivation provenance.
/// Nodes are emitted in post-order, so premises always precede their
/// conclusions and the root comes last.
///
/// Panics if `target` was not derived.
pub fn extract_proof(state: &SaturationState, ct: &ClosureTable, target: Formula) -> Derivation {
    let root = ct.id_of(target).expect("target outside the closure");
    assert!(state.is_derived(root), "target was not derived");
    const NONE: usize = usize::MAX;
    let mut node_of = vec![NONE; ct.len()];
    let mut nodes: Vec<DerivationNode> = Vec::new();
    let mut stack: Vec<(usize, bool)> = vec![(root, false)];
    while let Some((id, expanded)) = stack.pop() {
        if node_of[id] != NONE {
            continue;
        }
        let prov = state.provenance(id);
        if !expanded {
            stack.push((id, true));
            for &p in prov.premises().iter().rev() {
                if node_of[p as usize] == NONE {
                    stack.push((p as usize, false));
                }
            }
            continue;
        }
        let (kind, rule) = match prov {
            Provenance::Hypothesis => (NodeKind::Hypothesis, None),
            Provenance::Axiom(r) => (NodeKind::Axiom, Some(r)),
            Provenance::Rule { rule, .. } => (NodeKind::Rule, Some(rule)),
            Provenance::Underived => panic!("derived formula without provenance"),
        };
        let parents = prov
            .premises()
            .iter()
            .map(|&p| node_of[p as usize])
            .collect();
        let nid = nodes.len();
        nodes.push(DerivationNode {
            id: nid,
            label: ct.formula(id),
            kind,
            rule,
            parents,
        });
        node_of[id] = nid;
    }
    Derivation {
        root: node_of[root],
        nodes,
    }
}
