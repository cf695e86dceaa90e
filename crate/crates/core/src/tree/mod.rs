//! Dominance on forest-structured nets.
//!
//! For two outcomes `o`, `o'` and a forest, [`ChangeBuilder`] produces the
//! formulas `change_k(X)` ("some worsening sequence from `o` to `o'`,
//! restricted to `X` and its ancestors, changes `X` at least `k` times")
//! over rule literals, and `worsen(X)` for each leaf. A net entails
//! `o ≻ o'` exactly when it satisfies `worsen` at every leaf.
//!
//! - [`dominance_prob_fpt`] unrolls those formulas into exclusive literal
//!   conjunctions and sums their weights; its cost is exponential only in
//!   the number of variables on which `o` and `o'` differ.
//! - [`det_dominance`] and [`completion_dominance_exists`] evaluate the
//!   same characterisation in a single linear pass.

mod branch;
mod det;
mod formula;

pub use branch::{BranchSet, LiteralConjunction};
pub use det::{completion_dominance_exists, det_dominance, max_changes, max_changes_completion, MaxChanges};
pub use formula::{literal_label, ChangeBuilder, FormulaId, Formulas, Node, RuleLiteral};

use crate::error::Result;
use crate::model::{CpNet, Outcome, PcpNet, Structure};

/// Result of a dominance-probability query with the size of the branch set
/// that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct FptDominance {
    pub probability: f64,
    /// Number of exclusive conjunctions summed.
    pub branches: usize,
    /// Number of variables on which the two outcomes differ.
    pub differing: usize,
}

/// Exclusive branch set for "`o ≻ o2` holds", ignoring the irreflexivity
/// convention (for `o = o2` this is `{⊤}`).
pub fn dominance_branch_set(s: &Structure, o: &Outcome, o2: &Outcome) -> Result<BranchSet> {
    let mut builder = ChangeBuilder::new(s, o, o2)?;
    let mut tops: Vec<FormulaId> = s.leaves().map(|x| builder.worsen(x)).collect();
    let formulas = builder.into_formulas();
    for t in tops.iter_mut() {
        *t = formulas.resolve(*t);
    }
    tops.sort();
    tops.dedup();
    let mut set = BranchSet::top();
    for t in tops {
        match formulas.constant(t) {
            Some(true) => continue,
            Some(false) => return Ok(BranchSet::bottom()),
            None => set = set.conjoin(&BranchSet::from_formula(&formulas, t)),
        }
        if set.is_empty() {
            break;
        }
    }
    Ok(set)
}

/// Probability that a net drawn from `pn` entails `o ≻ o2`. Requires a forest.
pub fn dominance_prob_fpt(pn: &PcpNet, o: &Outcome, o2: &Outcome) -> Result<f64> {
    dominance_fpt_detailed(pn, o, o2).map(|r| r.probability)
}

pub fn dominance_fpt_detailed(pn: &PcpNet, o: &Outcome, o2: &Outcome) -> Result<FptDominance> {
    pn.check_outcome(o)?;
    pn.check_outcome(o2)?;
    let s = pn.structure();
    s.require_forest()?;
    let differing = o.differing(o2).len();
    if differing == 0 {
        return Ok(FptDominance {
            probability: 0.0,
            branches: 0,
            differing,
        });
    }
    let set = dominance_branch_set(s, o, o2)?;
    Ok(FptDominance {
        probability: set.probability(pn),
        branches: set.len(),
        differing,
    })
}

/// Whether `n` satisfies `worsen(X)` at every leaf (and `o ≠ o2`).
pub fn entails_by_formula(n: &CpNet, o: &Outcome, o2: &Outcome) -> Result<bool> {
    n.check_outcome(o)?;
    n.check_outcome(o2)?;
    if o == o2 {
        return Ok(false);
    }
    let s = n.structure();
    let mut builder = ChangeBuilder::new(s, o, o2)?;
    let tops: Vec<FormulaId> = s.leaves().map(|x| builder.worsen(x)).collect();
    let formulas = builder.formulas();
    Ok(tops.iter().all(|&t| formulas.eval(t, n)))
}
