//! Summarising a population of CP-nets into one PCP-net, and the
//! population-level queries that the summary answers exactly.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::model::{all_outcomes, CpNet, Orientation, Outcome, PcpNet, RuleSlot, Structure};

/// Largest variable count [`find_condorcet`] scans exhaustively.
pub const MAX_CONDORCET_VARS: usize = 20;

/// Rule-wise aggregation: each slot's probability is the fraction of nets
/// whose rule at that slot reads `1 > 0`.
///
/// Nets over the same variables but different edge sets are first
/// re-expressed over the union of their graphs, which must be a forest.
pub fn aggregate(nets: &[CpNet]) -> Result<PcpNet> {
    let first = nets.first().ok_or(Error::EmptyPopulation)?;
    let structure = if nets.iter().all(|n| n.is_compatible(first.structure())) {
        first.structure().clone()
    } else {
        union_structure(nets)?
    };
    let embedded: Vec<CpNet> = nets.iter().map(|n| embed(n, &structure)).collect::<Result<_>>()?;
    let counts: Vec<usize> = (0..structure.num_slots())
        .map(|i| embedded.iter().filter(|n| n.table()[i].preferred()).count())
        .collect();
    PcpNet::from_counts(structure, &counts, nets.len())
}

fn union_structure(nets: &[CpNet]) -> Result<Arc<Structure>> {
    let names = nets[0].structure().names().to_vec();
    if let Some(n) = nets.iter().find(|n| n.structure().names() != names.as_slice()) {
        return Err(Error::StructureMismatch(format!(
            "variables {:?} differ from {:?}",
            n.structure().names(),
            names
        )));
    }
    let parents: Vec<Vec<usize>> = (0..names.len())
        .map(|v| {
            let mut ps: Vec<usize> = nets
                .iter()
                .flat_map(|n| n.structure().parents(crate::VarId(v)).iter().map(|p| p.0))
                .collect();
            ps.sort_unstable();
            ps.dedup();
            ps
        })
        .collect();
    let union = Structure::new(names, parents).map_err(|e| match e {
        Error::CycleDetected(v) => Error::StructureMismatch(format!("union graph has a cycle through `{v}`")),
        other => other,
    })?;
    if let Err(Error::NotAForest(v)) = union.require_forest() {
        return Err(Error::StructureMismatch(format!(
            "union graph is not a forest: `{v}` gets several parents"
        )));
    }
    Ok(Arc::new(union))
}

/// Re-expresses `n` over a structure whose parent sets contain `n`'s:
/// each rule is copied to every context that agrees on the original parents.
pub fn embed(n: &CpNet, target: &Arc<Structure>) -> Result<CpNet> {
    if n.is_compatible(target) {
        return CpNet::new(target.clone(), n.table().to_vec());
    }
    let src = n.structure();
    if src.names() != target.names() {
        return Err(Error::StructureMismatch("variable sets differ".into()));
    }
    let mut table = Vec::with_capacity(target.num_slots());
    for slot in target.rule_slots() {
        let v = slot.var;
        let tp = target.parents(v);
        let context = src.parents(v).iter().try_fold(0u32, |acc, p| {
            let i = tp.iter().position(|q| q == p).ok_or_else(|| {
                Error::StructureMismatch(format!(
                    "`{}` is a parent of `{}` in a net but not in the target",
                    src.name(*p),
                    src.name(v)
                ))
            })?;
            Ok::<_, Error>(acc << 1 | target.context_value(v, slot.context, i) as u32)
        })?;
        table.push(n.orientation(src.slot_id(RuleSlot { var: v, context })));
    }
    CpNet::new(target.clone(), table)
}

/// Probability that `o ≻ o2` for a swap pair: the weight of the one rule
/// that licenses the flip.
pub fn swap_dominance_prob(pn: &PcpNet, o: &Outcome, o2: &Outcome) -> Result<f64> {
    pn.check_outcome(o)?;
    pn.check_outcome(o2)?;
    let diff = o.differing(o2);
    let [x] = diff[..] else {
        return Err(Error::NotASwapPair(diff.len()));
    };
    let s = pn.structure();
    let slot = s.slot_id(RuleSlot {
        var: x,
        context: o.context(s, x),
    });
    Ok(pn.prob(slot, Orientation::toward(o.get(x))))
}

/// Whether `o` beats each one-flip neighbour with probability at least 1/2.
pub fn is_condorcet(pn: &PcpNet, o: &Outcome) -> Result<bool> {
    pn.check_outcome(o)?;
    for v in pn.structure().vars() {
        if swap_dominance_prob(pn, o, &o.flipped(v))? < 0.5 {
            return Ok(false);
        }
    }
    Ok(true)
}

fn condorcet_guard(pn: &PcpNet) -> Result<()> {
    let n = pn.structure().len();
    if n > MAX_CONDORCET_VARS {
        return Err(Error::TooLarge {
            size: n,
            limit: MAX_CONDORCET_VARS,
        });
    }
    Ok(())
}

/// Every hypercube-wise Condorcet winner, least first under [`Outcome::lex_cmp`].
pub fn condorcet_winners(pn: &PcpNet) -> Result<Vec<Outcome>> {
    condorcet_guard(pn)?;
    let mut out = Vec::new();
    for o in all_outcomes(pn.structure()) {
        if is_condorcet(pn, &o)? {
            out.push(o);
        }
    }
    Ok(out)
}

/// The least hypercube-wise Condorcet winner, if any.
pub fn find_condorcet(pn: &PcpNet) -> Result<Option<Outcome>> {
    condorcet_guard(pn)?;
    for o in all_outcomes(pn.structure()) {
        if is_condorcet(pn, &o)? {
            return Ok(Some(o));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Orientation::*;
    use crate::model::SlotId;
    use crate::optimize::det_optimal;

    fn chain_ab() -> Arc<Structure> {
        Arc::new(Structure::from_edges(&[("A", &[]), ("B", &["A"])]).unwrap())
    }

    fn o(bits: &[u8]) -> Outcome {
        Outcome::new(bits.iter().map(|&b| b == 1).collect())
    }

    #[test]
    fn empty_population() {
        assert_eq!(aggregate(&[]), Err(Error::EmptyPopulation));
    }

    #[test]
    fn single_net_round_trips_through_sampling() {
        let n = CpNet::new(chain_ab(), vec![PreferTrue, PreferFalse, PreferTrue]).unwrap();
        let pn = aggregate(std::slice::from_ref(&n)).unwrap();
        assert!(pn.table().iter().all(|&p| p == 0.0 || p == 1.0));
        assert_eq!(pn.sample_net(3), n);
    }

    #[test]
    fn one_differing_slot_gets_half() {
        let a = CpNet::new(chain_ab(), vec![PreferTrue, PreferFalse, PreferTrue]).unwrap();
        let b = CpNet::new(chain_ab(), vec![PreferTrue, PreferTrue, PreferTrue]).unwrap();
        let pn = aggregate(&[a, b]).unwrap();
        assert_eq!(pn.table(), &[1.0, 0.5, 1.0]);
    }

    #[test]
    fn aggregate_fractions_are_exact_on_both_sides() {
        let s = chain_ab();
        let nets: Vec<CpNet> = (0..9)
            .map(|i| CpNet::new(s.clone(), vec![Orientation::toward(i < 6), PreferTrue, PreferTrue]).unwrap())
            .collect();
        let pn = aggregate(&nets).unwrap();
        assert_eq!(pn.prob(SlotId(0), PreferTrue), 6.0 / 9.0);
        assert_eq!(pn.prob(SlotId(0), PreferFalse), 3.0 / 9.0);
        assert_ne!(1.0 - 6.0 / 9.0, 3.0 / 9.0);
        let (a1, a0) = (o(&[1, 0]), o(&[0, 0]));
        let sum = swap_dominance_prob(&pn, &a1, &a0).unwrap() + swap_dominance_prob(&pn, &a0, &a1).unwrap();
        assert_eq!(sum, 1.0);
    }

    #[test]
    fn swap_probabilities() {
        let pn = PcpNet::new(chain_ab(), vec![0.8, 0.4, 0.5]).unwrap();
        assert_eq!(swap_dominance_prob(&pn, &o(&[1, 0]), &o(&[0, 0])).unwrap(), 0.8);
        assert_eq!(swap_dominance_prob(&pn, &o(&[0, 0]), &o(&[1, 0])).unwrap(), 1.0 - 0.8);
        assert_eq!(
            swap_dominance_prob(&pn, &o(&[1, 1]), &o(&[0, 0])),
            Err(Error::NotASwapPair(2))
        );
        assert_eq!(
            swap_dominance_prob(&pn, &o(&[1, 1]), &o(&[1, 1])),
            Err(Error::NotASwapPair(0))
        );
    }

    #[test]
    fn condorcet_on_certain_net() {
        let s = chain_ab();
        let pn = PcpNet::new(s, vec![1.0; 3]).unwrap();
        assert!(is_condorcet(&pn, &o(&[1, 1])).unwrap());
        for b in [[0, 0], [0, 1], [1, 0]] {
            assert!(!is_condorcet(&pn, &o(&b)).unwrap());
        }
        assert_eq!(find_condorcet(&pn).unwrap(), Some(o(&[1, 1])));
    }

    #[test]
    fn uniform_tables_make_everyone_a_winner() {
        let s = Arc::new(Structure::chain(3));
        let pn = PcpNet::new(s.clone(), vec![0.5; s.num_slots()]).unwrap();
        assert_eq!(condorcet_winners(&pn).unwrap().len(), 8);
        assert_eq!(find_condorcet(&pn).unwrap(), Some(Outcome::uniform(3, false)));
    }

    #[test]
    fn deterministic_aggregate_winner_is_optimum() {
        let n = CpNet::new(chain_ab(), vec![PreferFalse, PreferTrue, PreferFalse]).unwrap();
        let pn = aggregate(std::slice::from_ref(&n)).unwrap();
        assert_eq!(find_condorcet(&pn).unwrap(), Some(det_optimal(&n)));
    }

    #[test]
    fn union_embedding() {
        let with_edge = CpNet::new(chain_ab(), vec![PreferTrue, PreferFalse, PreferTrue]).unwrap();
        let flat = Arc::new(Structure::from_edges(&[("A", &[]), ("B", &[])]).unwrap());
        let without = CpNet::new(flat, vec![PreferFalse, PreferTrue]).unwrap();
        let pn = aggregate(&[with_edge, without]).unwrap();
        assert_eq!(**pn.structure(), *chain_ab());
        // A: {1>0, 0>1}; B|A=0: {0>1, 1>0}; B|A=1: {1>0, 1>0}
        assert_eq!(pn.table(), &[0.5, 0.5, 1.0]);
        assert_eq!(pn.prob_true(SlotId(2)), 1.0);
    }

    #[test]
    fn union_rejected_when_not_forest() {
        let a = Arc::new(Structure::from_edges(&[("A", &[]), ("B", &[]), ("C", &["A"])]).unwrap());
        let b = Arc::new(Structure::from_edges(&[("A", &[]), ("B", &[]), ("C", &["B"])]).unwrap());
        let na = CpNet::from_fn(a, |_| PreferTrue);
        let nb = CpNet::from_fn(b, |_| PreferTrue);
        assert!(matches!(aggregate(&[na, nb]), Err(Error::StructureMismatch(_))));

        let c = Arc::new(Structure::from_edges(&[("B", &["A"]), ("A", &[])]).unwrap());
        let d = Arc::new(Structure::from_edges(&[("B", &[]), ("A", &["B"])]).unwrap());
        let nc = CpNet::from_fn(c, |_| PreferTrue);
        let nd = CpNet::from_fn(d, |_| PreferTrue);
        assert!(matches!(aggregate(&[nc, nd]), Err(Error::StructureMismatch(_))));
    }
}
