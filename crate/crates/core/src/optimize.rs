//! Optimisation queries.

use crate::error::Result;
use crate::model::{CpNet, Orientation, Outcome, PcpNet, RuleSlot};

/// The unique optimum of an acyclic net: every variable, in topological
/// order, takes the value its rule prefers given the parents already set.
pub fn det_optimal(n: &CpNet) -> Outcome {
    let s = n.structure();
    let mut o = Outcome::uniform(s.len(), false);
    for &v in s.topological_order() {
        let pref = n.rule_at(v, &o).preferred();
        o.set(v, pref);
    }
    o
}

/// Probability that `o` is the optimum of a net drawn from `pn`: the
/// product, over variables, of the probability that the rule applying
/// under `o` prefers `o`'s value. Works for any acyclic structure.
pub fn optimal_prob(pn: &PcpNet, o: &Outcome) -> Result<f64> {
    pn.check_outcome(o)?;
    let s = pn.structure();
    Ok(s.topological_order()
        .iter()
        .map(|&v| {
            let slot = s.slot_id(RuleSlot {
                var: v,
                context: o.context(s, v),
            });
            pn.prob(slot, Orientation::toward(o.get(v)))
        })
        .product())
}

/// The outcome most likely to be optimal under a forest-structured
/// `pn`, with its probability.
///
/// Bottom-up, `best[X][v]` is the largest probability of an assignment to
/// the subtree of `X` being optimal given that `X`'s parent takes value
/// `v`. The assignment is then read top-down. Exact ties go to value 0,
/// which yields the least maximiser under [`Outcome::lex_cmp`].
pub fn map_optimal(pn: &PcpNet) -> Result<(Outcome, f64)> {
    let s = pn.structure();
    s.require_forest()?;
    let n = s.len();

    // Probability that the subtree of X is optimal with X = w, given the
    // parent context, and the per-context best.
    let mut with_value = vec![[[0.0f64; 2]; 2]; n]; // [var][parent value][own value]
    let mut best = vec![[0.0f64; 2]; n];
    let mut choice = vec![[false; 2]; n];
    for &x in s.topological_order().iter().rev() {
        let contexts = s.num_contexts(x);
        for ctx in 0..2usize {
            if ctx >= contexts {
                with_value[x.0][ctx] = with_value[x.0][0];
                best[x.0][ctx] = best[x.0][0];
                choice[x.0][ctx] = choice[x.0][0];
                continue;
            }
            let slot = s.slot_id(RuleSlot {
                var: x,
                context: ctx as u32,
            });
            for w in [false, true] {
                let own = pn.prob(slot, Orientation::toward(w));
                with_value[x.0][ctx][w as usize] = s.children(x).iter().fold(own, |acc, c| acc * best[c.0][w as usize]);
            }
            let [p0, p1] = with_value[x.0][ctx];
            choice[x.0][ctx] = p1 > p0;
            best[x.0][ctx] = p0.max(p1);
        }
    }

    let mut o = Outcome::uniform(n, false);
    for &x in s.topological_order() {
        let ctx = s.parent(x).map_or(0, |y| o.get(y) as usize);
        o.set(x, choice[x.0][ctx]);
    }
    let p = s
        .vars()
        .filter(|&v| s.parent(v).is_none())
        .map(|r| best[r.0][0])
        .product();
    Ok((o, p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Orientation::*, Structure};
    use crate::Error;
    use std::sync::Arc;

    fn o(bits: &[u8]) -> Outcome {
        Outcome::new(bits.iter().map(|&b| b == 1).collect())
    }

    fn chain_ab() -> Arc<Structure> {
        Arc::new(Structure::from_edges(&[("A", &[]), ("B", &["A"])]).unwrap())
    }

    #[test]
    fn det_optimum_examples() {
        let n = CpNet::from_fn(Arc::new(Structure::chain(4)), |_| PreferTrue);
        assert_eq!(det_optimal(&n), Outcome::uniform(4, true));

        let root = CpNet::new(
            Arc::new(Structure::from_edges(&[("X", &[])]).unwrap()),
            vec![PreferFalse],
        )
        .unwrap();
        assert_eq!(det_optimal(&root), o(&[0]));

        // {a>ā, ā: b>b̄, a: b̄>b}
        let chain = CpNet::new(chain_ab(), vec![PreferTrue, PreferTrue, PreferFalse]).unwrap();
        assert_eq!(det_optimal(&chain), o(&[1, 0]));
    }

    #[test]
    fn det_optimum_is_undominated() {
        let chain = CpNet::new(chain_ab(), vec![PreferTrue, PreferTrue, PreferFalse]).unwrap();
        let best = det_optimal(&chain);
        for b in 0..4 {
            let other = Outcome::from_bits(2, b);
            assert!(!crate::oracle::entails_oracle(&chain, &other, &best).unwrap());
        }
    }

    #[test]
    fn optimal_prob_chain() {
        let pn = PcpNet::new(chain_ab(), vec![0.8, 0.4, 0.5]).unwrap();
        assert!((optimal_prob(&pn, &o(&[1, 1])).unwrap() - 0.4).abs() < 1e-12);
        let total: f64 = (0..4)
            .map(|b| optimal_prob(&pn, &Outcome::from_bits(2, b)).unwrap())
            .sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn map_degenerate_and_uniform() {
        let s = Arc::new(Structure::from_edges(&[("A", &[]), ("B", &["A"]), ("C", &["A"]), ("D", &[])]).unwrap());
        let net = CpNet::new(
            s.clone(),
            vec![
                PreferFalse,
                PreferTrue,
                PreferFalse,
                PreferTrue,
                PreferTrue,
                PreferFalse,
            ],
        )
        .unwrap();
        let (best, p) = map_optimal(&PcpNet::degenerate(&net)).unwrap();
        assert_eq!(best, det_optimal(&net));
        assert_eq!(p, 1.0);

        let uniform = PcpNet::new(s.clone(), vec![0.5; s.num_slots()]).unwrap();
        let (best, p) = map_optimal(&uniform).unwrap();
        assert_eq!(best, Outcome::uniform(4, false));
        assert_eq!(p, 0.5f64.powi(4));
    }

    #[test]
    fn map_prefers_likely_rules() {
        let pn = PcpNet::new(chain_ab(), vec![0.8, 0.4, 0.5]).unwrap();
        // a: 0.8 * max(0.5, 0.5) = 0.4 ; ā: 0.2 * 0.6 = 0.12
        let (best, p) = map_optimal(&pn).unwrap();
        assert_eq!(best, o(&[1, 0]));
        assert!((p - 0.4).abs() < 1e-12);
        assert_eq!(optimal_prob(&pn, &best).unwrap(), p);
    }

    #[test]
    fn map_requires_forest() {
        let s = Arc::new(Structure::from_edges(&[("A", &[]), ("B", &[]), ("C", &["A", "B"])]).unwrap());
        let pn = PcpNet::new(s, vec![0.5; 6]).unwrap();
        assert!(matches!(map_optimal(&pn), Err(Error::NotAForest(_))));
    }
}
