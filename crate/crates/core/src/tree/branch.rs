use std::collections::HashMap;

use super::formula::{FormulaId, Formulas, Node, RuleLiteral};
use crate::model::{CpNet, PcpNet, SlotId};

/// Conjunction of rule literals over distinct slots, sorted by slot.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct LiteralConjunction {
    literals: Vec<RuleLiteral>,
}

impl LiteralConjunction {
    /// The empty conjunction (`⊤`).
    pub fn top() -> Self {
        Self::default()
    }

    pub fn single(l: RuleLiteral) -> Self {
        LiteralConjunction { literals: vec![l] }
    }

    /// Builds a conjunction, or `None` if two literals contradict.
    pub fn from_literals(literals: impl IntoIterator<Item = RuleLiteral>) -> Option<Self> {
        literals
            .into_iter()
            .try_fold(Self::top(), |acc, l| acc.conjoin(&Self::single(l)))
    }

    pub fn literals(&self) -> &[RuleLiteral] {
        &self.literals
    }

    pub fn len(&self) -> usize {
        self.literals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.literals.is_empty()
    }

    fn get(&self, slot: SlotId) -> Option<RuleLiteral> {
        self.literals
            .binary_search_by_key(&slot, |l| l.slot)
            .ok()
            .map(|i| self.literals[i])
    }

    /// Merges two conjunctions; shared literals appear once. `None` if
    /// some slot is required with both orientations.
    pub fn conjoin(&self, other: &Self) -> Option<Self> {
        let (a, b) = (&self.literals, &other.literals);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].slot.cmp(&b[j].slot) {
                std::cmp::Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    if a[i].orientation != b[j].orientation {
                        return None;
                    }
                    out.push(a[i]);
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Some(LiteralConjunction { literals: out })
    }

    /// Whether no net satisfies both.
    pub fn excludes(&self, other: &Self) -> bool {
        self.literals
            .iter()
            .any(|l| other.get(l.slot).is_some_and(|m| m.orientation != l.orientation))
    }

    /// `self ∧ ¬other` as pairwise exclusive conjunctions.
    fn without(&self, other: &Self) -> Vec<Self> {
        if self.excludes(other) {
            return vec![self.clone()];
        }
        let mut out = Vec::new();
        let mut prefix = self.clone();
        for &l in &other.literals {
            if prefix.get(l.slot).is_some() {
                continue;
            }
            let mut branch = prefix.clone();
            branch.insert(l.negated());
            out.push(branch);
            prefix.insert(l);
        }
        out
    }

    fn insert(&mut self, l: RuleLiteral) {
        match self.literals.binary_search_by_key(&l.slot, |x| x.slot) {
            Ok(i) => debug_assert_eq!(self.literals[i], l),
            Err(i) => self.literals.insert(i, l),
        }
    }

    /// Product of the literal probabilities; slots are independent.
    pub fn probability(&self, pn: &PcpNet) -> f64 {
        self.literals.iter().map(|l| pn.prob(l.slot, l.orientation)).product()
    }

    pub fn satisfied_by(&self, net: &CpNet) -> bool {
        self.literals.iter().all(|l| l.holds_in(net))
    }
}

/// Pairwise exclusive literal conjunctions whose disjunction is the
/// formula they were built from.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct BranchSet {
    branches: Vec<LiteralConjunction>,
}

impl BranchSet {
    /// `{⊤}`
    pub fn top() -> Self {
        BranchSet {
            branches: vec![LiteralConjunction::top()],
        }
    }

    /// `{}`, i.e. `⊥`.
    pub fn bottom() -> Self {
        BranchSet::default()
    }

    pub fn branches(&self) -> &[LiteralConjunction] {
        &self.branches
    }

    pub fn len(&self) -> usize {
        self.branches.len()
    }

    pub fn is_empty(&self) -> bool {
        self.branches.is_empty()
    }

    /// Unrolls a formula into exclusive branches. Every disjunction
    /// `A ∨ B` becomes `A ∨ (¬A ∧ B)`, with `¬A ∧ B` expanded into literal
    /// conjunctions, so summing branch weights never counts a net twice.
    pub fn from_formula(formulas: &Formulas, id: FormulaId) -> Self {
        let mut memo = HashMap::new();
        BranchSet {
            branches: unroll(formulas, id, &mut memo),
        }
    }

    /// Pairwise conjunction of the branches of both sets, dropping
    /// contradictory combinations.
    pub fn conjoin(&self, other: &Self) -> Self {
        BranchSet {
            branches: product(&self.branches, &other.branches),
        }
    }

    pub fn probability(&self, pn: &PcpNet) -> f64 {
        self.branches.iter().map(|b| b.probability(pn)).sum()
    }

    pub fn satisfied_by(&self, net: &CpNet) -> bool {
        self.branches.iter().any(|b| b.satisfied_by(net))
    }

    pub fn is_pairwise_exclusive(&self) -> bool {
        self.branches
            .iter()
            .enumerate()
            .all(|(i, a)| self.branches[i + 1..].iter().all(|b| a.excludes(b)))
    }
}

fn product(a: &[LiteralConjunction], b: &[LiteralConjunction]) -> Vec<LiteralConjunction> {
    let mut out = Vec::with_capacity(a.len().max(b.len()));
    for x in a {
        for y in b {
            if let Some(c) = x.conjoin(y) {
                out.push(c);
            }
        }
    }
    out
}

fn unroll(
    formulas: &Formulas,
    id: FormulaId,
    memo: &mut HashMap<FormulaId, Vec<LiteralConjunction>>,
) -> Vec<LiteralConjunction> {
    if let Some(v) = memo.get(&id) {
        return v.clone();
    }
    let result = match formulas.node(id) {
        Node::True => vec![LiteralConjunction::top()],
        Node::False => Vec::new(),
        Node::Lit(l) => vec![LiteralConjunction::single(*l)],
        Node::Change { body, .. } => unroll(formulas, *body, memo),
        Node::And(cs) => {
            let mut acc = vec![LiteralConjunction::top()];
            for &c in cs {
                if acc.is_empty() {
                    break;
                }
                let part = unroll(formulas, c, memo);
                acc = product(&acc, &part);
            }
            acc
        }
        Node::Or(cs) => {
            let mut acc: Vec<LiteralConjunction> = Vec::new();
            for &c in cs {
                let mut fresh = Vec::new();
                for b in unroll(formulas, c, memo) {
                    let mut pieces = vec![b];
                    for a in &acc {
                        pieces = pieces.iter().flat_map(|p| p.without(a)).collect();
                        if pieces.is_empty() {
                            break;
                        }
                    }
                    fresh.extend(pieces);
                }
                acc.extend(fresh);
            }
            acc
        }
    };
    memo.insert(id, result.clone());
    result
}
