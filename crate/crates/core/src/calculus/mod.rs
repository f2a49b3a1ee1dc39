//! Hilbert-style rule schemas for the primal calculi and an independent
//! derivation checker.
//!
//! The calculi are cumulative: ORIGINAL (⊤I, ∧I, ∧E, →I, →E), then L1 (∨I, and
//! ∨E restricted to `A ∨ A`), L2 (⊥E), PFQPL (the axiom `A → A`), and QPL (∀E,
//! ∃I, and the vacuous-only ∀I and ∃E).

mod derivation;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::syntax::{substitute, ClashError, Formula, Node, Store, Sym, Term};

pub use derivation::{
    check_derivation, Derivation, DerivationJson, DerivationNode, ExpandError, NodeFailure,
    NodeJson, NodeKind, NodeReport, Report, StructureError,
};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub enum CalculusVariant {
    Original,
    L1,
    L2,
    PfQpl,
    #[default]
    Qpl,
}

impl CalculusVariant {
    pub const ALL: [CalculusVariant; 5] = [
        CalculusVariant::Original,
        CalculusVariant::L1,
        CalculusVariant::L2,
        CalculusVariant::PfQpl,
        CalculusVariant::Qpl,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CalculusVariant::Original => "orig",
            CalculusVariant::L1 => "l1",
            CalculusVariant::L2 => "l2",
            CalculusVariant::PfQpl => "pfqpl",
            CalculusVariant::Qpl => "qpl",
        }
    }

    pub fn admits(self, rule: RuleName) -> bool {
        self >= rule.introduced_in()
    }
}

impl fmt::Display for CalculusVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown calculus variant `{0}` (expected orig, l1, l2, pfqpl or qpl)")]
pub struct UnknownVariant(pub String);

impl FromStr for CalculusVariant {
    type Err = UnknownVariant;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "orig" | "original" => Ok(CalculusVariant::Original),
            "l1" => Ok(CalculusVariant::L1),
            "l2" => Ok(CalculusVariant::L2),
            "pfqpl" => Ok(CalculusVariant::PfQpl),
            "qpl" => Ok(CalculusVariant::Qpl),
            _ => Err(UnknownVariant(s.to_owned())),
        }
    }
}

#[allow(non_camel_case_types)]
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RuleName {
    TopI,
    AndI,
    AndE_L,
    AndE_R,
    OrI_L,
    OrI_R,
    OrE,
    ImpI,
    ImpAx,
    ImpE,
    BotE,
    ForallI,
    ForallE,
    ExistsI,
    ExistsE,
}

impl RuleName {
    pub const ALL: [RuleName; 15] = [
        RuleName::TopI,
        RuleName::AndI,
        RuleName::AndE_L,
        RuleName::AndE_R,
        RuleName::OrI_L,
        RuleName::OrI_R,
        RuleName::OrE,
        RuleName::ImpI,
        RuleName::ImpAx,
        RuleName::ImpE,
        RuleName::BotE,
        RuleName::ForallI,
        RuleName::ForallE,
        RuleName::ExistsI,
        RuleName::ExistsE,
    ];

    /// The first variant whose calculus contains this rule.
    pub fn introduced_in(self) -> CalculusVariant {
        use RuleName::*;
        match self {
            TopI | AndI | AndE_L | AndE_R | ImpI | ImpE => CalculusVariant::Original,
            OrI_L | OrI_R | OrE => CalculusVariant::L1,
            BotE => CalculusVariant::L2,
            ImpAx => CalculusVariant::PfQpl,
            ForallI | ForallE | ExistsI | ExistsE => CalculusVariant::Qpl,
        }
    }

    pub fn is_axiom(self) -> bool {
        matches!(self, RuleName::TopI | RuleName::ImpAx)
    }

    pub fn premise_count(self) -> usize {
        match self {
            RuleName::TopI | RuleName::ImpAx => 0,
            RuleName::AndI | RuleName::ImpE => 2,
            _ => 1,
        }
    }

    pub fn as_str(self) -> &'static str {
        use RuleName::*;
        match self {
            TopI => "TopI",
            AndI => "AndI",
            AndE_L => "AndE_L",
            AndE_R => "AndE_R",
            OrI_L => "OrI_L",
            OrI_R => "OrI_R",
            OrE => "OrE",
            ImpI => "ImpI",
            ImpAx => "ImpAx",
            ImpE => "ImpE",
            BotE => "BotE",
            ForallI => "ForallI",
            ForallE => "ForallE",
            ExistsI => "ExistsI",
            ExistsE => "ExistsE",
        }
    }
}

impl fmt::Display for RuleName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A checked application of a rule schema.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RuleInstance {
    pub rule: RuleName,
    pub premises: Vec<Formula>,
    pub conclusion: Formula,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RejectReason {
    #[error("rule {rule} is not part of the {variant} calculus")]
    UnknownRule {
        rule: RuleName,
        variant: CalculusVariant,
    },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("side condition violated: {0}")]
    SideCondition(String),
}

fn shape(msg: &str) -> RejectReason {
    RejectReason::ShapeMismatch(msg.to_owned())
}

/// Accepts `premises ⊳ conclusion` iff it is an instance of `rule` and the rule
/// belongs to `variant`. Premise order is significant.
pub fn match_rule(
    store: &mut Store,
    variant: CalculusVariant,
    rule: RuleName,
    premises: &[Formula],
    conclusion: Formula,
) -> Result<RuleInstance, RejectReason> {
    if !variant.admits(rule) {
        return Err(RejectReason::UnknownRule { rule, variant });
    }
    if premises.len() != rule.premise_count() {
        return Err(RejectReason::ShapeMismatch(format!(
            "{rule} takes {} premise(s), got {}",
            rule.premise_count(),
            premises.len()
        )));
    }
    check_shape(store, rule, premises, conclusion)?;
    Ok(RuleInstance {
        rule,
        premises: premises.to_vec(),
        conclusion,
    })
}

fn check_shape(
    store: &mut Store,
    rule: RuleName,
    premises: &[Formula],
    conclusion: Formula,
) -> Result<(), RejectReason> {
    use RuleName::*;
    let node = |store: &Store, f: Formula| store.node(f).clone();
    match rule {
        TopI => match node(store, conclusion) {
            Node::Top => Ok(()),
            _ => Err(shape("conclusion must be `true`")),
        },
        ImpAx => match node(store, conclusion) {
            Node::Imp(a, b) if a == b => Ok(()),
            _ => Err(shape("conclusion must have the form A -> A")),
        },
        AndI => match node(store, conclusion) {
            Node::And(a, b) if a == premises[0] && b == premises[1] => Ok(()),
            _ => Err(shape(
                "conclusion must be the conjunction of the premises, in order",
            )),
        },
        AndE_L | AndE_R => match node(store, premises[0]) {
            Node::And(a, b) => {
                let want = if rule == AndE_L { a } else { b };
                if want == conclusion {
                    Ok(())
                } else {
                    Err(shape("conclusion must be the selected conjunct"))
                }
            }
            _ => Err(shape("premise must be a conjunction")),
        },
        OrI_L | OrI_R => match node(store, conclusion) {
            Node::Or(a, b) => {
                let want = if rule == OrI_L { a } else { b };
                if want == premises[0] {
                    Ok(())
                } else {
                    Err(shape("premise must be the selected disjunct"))
                }
            }
            _ => Err(shape("conclusion must be a disjunction")),
        },
        OrE => match node(store, premises[0]) {
            Node::Or(a, b) if a == b && a == conclusion => Ok(()),
            Node::Or(..) => Err(shape("premise must have the form A | A with conclusion A")),
            _ => Err(shape("premise must be a disjunction")),
        },
        ImpI => match node(store, conclusion) {
            Node::Imp(_, b) if b == premises[0] => Ok(()),
            _ => Err(shape(
                "conclusion must be an implication whose consequent is the premise",
            )),
        },
        ImpE => match node(store, premises[1]) {
            Node::Imp(a, b) if a == premises[0] && b == conclusion => Ok(()),
            _ => Err(shape("premises must read <A, A -> B> with conclusion B")),
        },
        BotE => match node(store, premises[0]) {
            Node::Bot => Ok(()),
            _ => Err(shape("premise must be `false`")),
        },
        ForallI => match node(store, conclusion) {
            Node::Forall(x, a) if a == premises[0] => vacuous(store, x, a),
            _ => Err(shape("conclusion must quantify the premise")),
        },
        ExistsE => match node(store, premises[0]) {
            Node::Exists(x, a) if a == conclusion => vacuous(store, x, a),
            _ => Err(shape("premise must be an existential over the conclusion")),
        },
        ForallE => match node(store, premises[0]) {
            Node::Forall(x, a) => instance_of(store, a, x, conclusion),
            _ => Err(shape("premise must be a universal")),
        },
        ExistsI => match node(store, conclusion) {
            Node::Exists(x, a) => instance_of(store, a, x, premises[0]),
            _ => Err(shape("conclusion must be an existential")),
        },
    }
}

fn vacuous(store: &Store, x: Sym, a: Formula) -> Result<(), RejectReason> {
    if store.is_free_in(x, a) {
        Err(RejectReason::SideCondition(format!(
            "`{}` is free in the quantified formula",
            store.name(x)
        )))
    } else {
        Ok(())
    }
}

/// Checks that `target` is `body[x := t]` for some substitutable term `t`.
fn instance_of(
    store: &mut Store,
    body: Formula,
    x: Sym,
    target: Formula,
) -> Result<(), RejectReason> {
    if !store.is_free_in(x, body) {
        return if body == target {
            Ok(())
        } else {
            Err(shape("vacuous quantifier: instance must equal the body"))
        };
    }
    let Some(t) = witness(store, body, x, target) else {
        return Err(shape("formula is not a substitution instance"));
    };
    match substitute(store, body, x, t) {
        Ok(g) if g == target => Ok(()),
        Ok(_) => Err(shape("formula is not a substitution instance")),
        Err(ClashError) => Err(RejectReason::SideCondition(format!(
            "`{}` is not substitutable for `{}`",
            store.term_name(t),
            store.name(x)
        ))),
    }
}

/// The term sitting at the first free occurrence of `x` in `a`, read off the
/// corresponding position of `b`.
fn witness(store: &Store, a: Formula, x: Sym, b: Formula) -> Option<Term> {
    let mut stack = vec![(a, b)];
    while let Some((a, b)) = stack.pop() {
        if !store.is_free_in(x, a) {
            continue;
        }
        match (store.node(a), store.node(b)) {
            (Node::Atom(r, xs), Node::Atom(s, ys)) if r == s && xs.len() == ys.len() => {
                if let Some(i) = xs.iter().position(|&u| u == Term::Var(x)) {
                    return Some(ys[i]);
                }
            }
            (Node::And(l1, r1), Node::And(l2, r2))
            | (Node::Or(l1, r1), Node::Or(l2, r2))
            | (Node::Imp(l1, r1), Node::Imp(l2, r2)) => {
                stack.push((*r1, *r2));
                stack.push((*l1, *l2));
            }
            (Node::Forall(y1, b1), Node::Forall(y2, b2))
            | (Node::Exists(y1, b1), Node::Exists(y2, b2))
                if y1 == y2 =>
            {
                stack.push((*b1, *b2));
            }
            _ => return None,
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_formula;

    fn f(s: &mut Store, t: &str) -> Formula {
        parse_formula(s, t, &["x"]).unwrap()
    }

    fn check(
        s: &mut Store,
        v: CalculusVariant,
        r: RuleName,
        prem: &[&str],
        concl: &str,
    ) -> Result<RuleInstance, RejectReason> {
        let prem: Vec<Formula> = prem.iter().map(|t| f(s, t)).collect();
        let c = f(s, concl);
        match_rule(s, v, r, &prem, c)
    }

    use CalculusVariant::*;
    use RuleName::*;

    #[test]
    fn modus_ponens() {
        let mut s = Store::new();
        assert!(check(&mut s, Qpl, ImpE, &["p", "p -> q"], "q").is_ok());
        assert!(matches!(
            check(&mut s, Qpl, ImpE, &["p -> q", "p"], "q"),
            Err(RejectReason::ShapeMismatch(_))
        ));
    }

    #[test]
    fn universal_introduction_needs_vacuity() {
        let mut s = Store::new();
        assert!(matches!(
            check(&mut s, Qpl, ForallI, &["R(x)"], "forall x. R(x)"),
            Err(RejectReason::SideCondition(_))
        ));
        assert!(check(&mut s, Qpl, ForallI, &["p"], "forall x. p").is_ok());
    }

    #[test]
    fn disjunction_rules_enter_at_l1() {
        let mut s = Store::new();
        assert!(matches!(
            check(&mut s, Original, OrI_L, &["p"], "p | q"),
            Err(RejectReason::UnknownRule { .. })
        ));
        assert!(check(&mut s, L1, OrI_L, &["p"], "p | q").is_ok());
        assert!(check(&mut s, L1, OrI_R, &["q"], "p | q").is_ok());
        assert!(check(&mut s, L1, OrI_R, &["p"], "p | q").is_err());
    }

    #[test]
    fn disjunction_elimination_only_for_equal_disjuncts() {
        let mut s = Store::new();
        assert!(check(&mut s, L1, OrE, &["p | p"], "p").is_ok());
        assert!(check(&mut s, L1, OrE, &["p | q"], "p").is_err());
    }

    #[test]
    fn axioms() {
        let mut s = Store::new();
        assert!(check(&mut s, Original, TopI, &[], "true").is_ok());
        assert!(check(&mut s, PfQpl, ImpAx, &[], "(p & q) -> (p & q)").is_ok());
        assert!(check(&mut s, PfQpl, ImpAx, &[], "p -> q").is_err());
        assert!(matches!(
            check(&mut s, L2, ImpAx, &[], "p -> p"),
            Err(RejectReason::UnknownRule { .. })
        ));
    }

    #[test]
    fn quantifier_instances() {
        let mut s = Store::new();
        assert!(check(&mut s, Qpl, ForallE, &["forall y. S(y, y)"], "S(c, c)").is_ok());
        assert!(check(&mut s, Qpl, ForallE, &["forall y. S(y, y)"], "S(c, d)").is_err());
        assert!(check(&mut s, Qpl, ForallE, &["forall y. p"], "p").is_ok());
        assert!(check(&mut s, Qpl, ExistsI, &["S(c, c)"], "exists y. S(y, c)").is_ok());
        assert!(check(&mut s, Qpl, ExistsI, &["S(c, c)"], "exists y. S(y, y)").is_ok());
        assert!(check(&mut s, Qpl, ExistsI, &["S(c, d)"], "exists y. S(y, y)").is_err());
        assert!(check(&mut s, Qpl, ExistsE, &["exists y. p"], "p").is_ok());
        assert!(matches!(
            check(&mut s, Qpl, ExistsE, &["exists y. T(y)"], "T(y)"),
            Err(RejectReason::ShapeMismatch(_)) | Err(RejectReason::SideCondition(_))
        ));
    }

    #[test]
    fn non_substitutable_instance_is_a_side_condition_failure() {
        let mut s = Store::new();
        // (exists x. S(y, x))[y := x] would capture x.
        let prem = parse_formula(&mut s, "forall y. exists x. S(y, x)", &[]).unwrap();
        let concl = parse_formula(&mut s, "exists x. S(x, x)", &[]).unwrap();
        let got = match_rule(&mut s, Qpl, ForallE, &[prem], concl);
        assert!(
            matches!(got, Err(RejectReason::SideCondition(_))),
            "{got:?}"
        );
    }

    #[test]
    fn variants_are_cumulative() {
        for r in RuleName::ALL {
            let first = r.introduced_in();
            for v in CalculusVariant::ALL {
                assert_eq!(v.admits(r), v >= first);
            }
        }
        assert_eq!("pfqpl".parse::<CalculusVariant>().unwrap(), PfQpl);
        assert!("bogus".parse::<CalculusVariant>().is_err());
    }
}
