//! Linear-time dominance for deterministic and incomplete forest CP-nets.
//!
//! One top-down pass computes, per variable `X`, the greatest `k` such
//! that the net satisfies `change_k(X)`. The value only depends on the
//! parent's value and on the two rules of `X`, so every variable is
//! visited once.

use crate::error::Result;
use crate::model::{CpNet, IncompleteCpNet, Orientation, Outcome, RuleSlot, SlotId, Structure, VarId};

/// Greatest number of value changes a variable can make on the way from
/// `o` to `o'`. `Fail` (no worsening sequence at all) orders below every count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MaxChanges {
    Fail,
    AtLeast(usize),
}

impl MaxChanges {
    pub fn count(self) -> Option<usize> {
        match self {
            MaxChanges::Fail => None,
            MaxChanges::AtLeast(k) => Some(k),
        }
    }
}

/// Endpoint values of a variable and of its parent.
#[derive(Debug, Clone, Copy)]
struct Endpoints {
    same_x: bool,
    same_y: bool,
}

/// Root: changes once iff its rule prefers its value in `o`.
fn root_step(same_x: bool, prefers_start: bool) -> MaxChanges {
    match (same_x, prefers_start) {
        (true, _) => MaxChanges::AtLeast(0),
        (false, true) => MaxChanges::AtLeast(1),
        (false, false) => MaxChanges::Fail,
    }
}

/// `p`: the rule under the parent's starting value prefers `X`'s starting
/// value. `q`: same under the other parent value.
fn child_step(e: Endpoints, parent: MaxChanges, p: bool, q: bool) -> MaxChanges {
    let MaxChanges::AtLeast(ky) = parent else {
        return MaxChanges::Fail;
    };
    // `down` alternation: leave x under y, come back under ȳ; `up` is the reverse.
    let down = p && !q;
    let up = !p && q;
    let k = if e.same_x {
        match (e.same_y, down, up) {
            (true, true, _) | (true, _, true) => ky,
            (false, true, _) => ky + 1,
            (false, _, true) => ky - 1,
            _ => 0,
        }
    } else if e.same_y {
        if !(p || q && ky >= 2) {
            return MaxChanges::Fail;
        }
        match (down, up) {
            (true, _) => ky + 1,
            (_, true) => ky - 1,
            _ => 1,
        }
    } else {
        if !(p || q) {
            return MaxChanges::Fail;
        }
        if down || up {
            ky
        } else {
            1
        }
    };
    MaxChanges::AtLeast(k)
}

/// Top-down pass; `choices(x, parent_value_as_in_o)` lists the allowed
/// answers to "does the rule prefer `x`'s starting value?".
fn sweep(
    s: &Structure,
    o: &Outcome,
    o2: &Outcome,
    mut choices: impl FnMut(VarId, bool) -> &'static [bool],
) -> Vec<MaxChanges> {
    let mut best = vec![MaxChanges::Fail; s.len()];
    for &x in s.topological_order() {
        let same_x = o.get(x) == o2.get(x);
        best[x.0] = match s.parent(x) {
            None => choices(x, true)
                .iter()
                .map(|&pref| root_step(same_x, pref))
                .max()
                .unwrap_or(MaxChanges::Fail),
            Some(y) => {
                let e = Endpoints {
                    same_x,
                    same_y: o.get(y) == o2.get(y),
                };
                let parent = best[y.0];
                let (ps, qs) = (choices(x, true), choices(x, false));
                ps.iter()
                    .flat_map(|&p| qs.iter().map(move |&q| child_step(e, parent, p, q)))
                    .max()
                    .unwrap_or(MaxChanges::Fail)
            }
        };
    }
    best
}

fn slot_for(s: &Structure, o: &Outcome, x: VarId, parent_as_in_o: bool) -> SlotId {
    let context = s.parent(x).map_or(0, |y| (o.get(y) == parent_as_in_o) as u32);
    s.slot_id(RuleSlot { var: x, context })
}

const YES: &[bool] = &[true];
const NO: &[bool] = &[false];
const EITHER: &[bool] = &[true, false];

fn allowed(rule: Option<Orientation>, start: bool) -> &'static [bool] {
    match rule {
        Some(r) if r.preferred() == start => YES,
        Some(_) => NO,
        None => EITHER,
    }
}

/// Per variable, the greatest `k` with `change_k` satisfied by `n`.
pub fn max_changes(n: &CpNet, o: &Outcome, o2: &Outcome) -> Result<Vec<MaxChanges>> {
    let s = n.structure();
    s.require_forest()?;
    n.check_outcome(o)?;
    n.check_outcome(o2)?;
    Ok(sweep(s, o, o2, |x, as_in_o| {
        allowed(Some(n.orientation(slot_for(s, o, x, as_in_o))), o.get(x))
    }))
}

/// Per variable, the greatest `k` with `change_k` satisfied by some
/// completion of `n`. Missing rules are chosen greedily per variable.
pub fn max_changes_completion(n: &IncompleteCpNet, o: &Outcome, o2: &Outcome) -> Result<Vec<MaxChanges>> {
    let s = n.structure();
    s.require_forest()?;
    n.check_outcome(o)?;
    n.check_outcome(o2)?;
    Ok(sweep(s, o, o2, |x, as_in_o| {
        allowed(n.orientation(slot_for(s, o, x, as_in_o)), o.get(x))
    }))
}

/// Whether the forest-structured net `n` entails `o ≻ o2`, in `O(n)`.
pub fn det_dominance(n: &CpNet, o: &Outcome, o2: &Outcome) -> Result<bool> {
    let best = max_changes(n, o, o2)?;
    Ok(o != o2 && best.iter().all(|&k| k != MaxChanges::Fail))
}

/// Whether some completion of `n` entails `o ≻ o2`, in `O(n)`.
pub fn completion_dominance_exists(n: &IncompleteCpNet, o: &Outcome, o2: &Outcome) -> Result<bool> {
    let best = max_changes_completion(n, o, o2)?;
    Ok(o != o2 && best.iter().all(|&k| k != MaxChanges::Fail))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Orientation::*;
    use crate::Error;
    use std::sync::Arc;

    fn o(bits: &[u8]) -> Outcome {
        Outcome::new(bits.iter().map(|&b| b == 1).collect())
    }

    fn chain_ab() -> Arc<Structure> {
        Arc::new(Structure::from_edges(&[("A", &[]), ("B", &["A"])]).unwrap())
    }

    #[test]
    fn equal_outcomes_never_dominate() {
        let n = CpNet::from_fn(chain_ab(), |_| PreferTrue);
        assert!(!det_dominance(&n, &o(&[1, 1]), &o(&[1, 1])).unwrap());
    }

    #[test]
    fn swap_pairs() {
        let n = CpNet::new(chain_ab(), vec![PreferTrue, PreferFalse, PreferTrue]).unwrap();
        assert!(det_dominance(&n, &o(&[1, 1]), &o(&[1, 0])).unwrap());
        assert!(!det_dominance(&n, &o(&[1, 0]), &o(&[1, 1])).unwrap());
        assert!(det_dominance(&n, &o(&[0, 0]), &o(&[0, 1])).unwrap());
        assert!(det_dominance(&n, &o(&[1, 0]), &o(&[0, 0])).unwrap());
        assert!(!det_dominance(&n, &o(&[0, 0]), &o(&[1, 0])).unwrap());
    }

    #[test]
    fn alternating_child_gains_a_change_per_level() {
        // Root flips once; B: a: b>b̄, ā: b̄>b lets B go down then up again.
        let n = CpNet::new(chain_ab(), vec![PreferTrue, PreferFalse, PreferTrue]).unwrap();
        let best = max_changes(&n, &o(&[1, 1]), &o(&[0, 1])).unwrap();
        assert_eq!(best, vec![MaxChanges::AtLeast(1), MaxChanges::AtLeast(2)]);
    }

    #[test]
    fn greedy_completion() {
        let s = chain_ab();
        let blank = IncompleteCpNet::new(s.clone(), vec![None; 3]).unwrap();
        assert!(completion_dominance_exists(&blank, &o(&[1, 1]), &o(&[0, 0])).unwrap());
        assert!(completion_dominance_exists(&blank, &o(&[0, 1]), &o(&[1, 0])).unwrap());
        assert!(!completion_dominance_exists(&blank, &o(&[0, 1]), &o(&[0, 1])).unwrap());

        // Root fixed against the move.
        let pinned = IncompleteCpNet::new(s, vec![Some(PreferFalse), None, None]).unwrap();
        assert!(!completion_dominance_exists(&pinned, &o(&[1, 1]), &o(&[0, 1])).unwrap());
    }

    #[test]
    fn requires_forest() {
        let s = Arc::new(Structure::from_edges(&[("A", &[]), ("B", &[]), ("C", &["A", "B"])]).unwrap());
        let n = CpNet::from_fn(s, |_| PreferTrue);
        let x = o(&[0, 0, 0]);
        assert!(matches!(det_dominance(&n, &x, &x), Err(Error::NotAForest(_))));
    }
}
