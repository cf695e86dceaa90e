//! Ground-truth semantics by exhaustive enumeration.
//!
//! Everything here works straight from the definitions: worsening flips,
//! reachability, and sums over every compatible deterministic net. It is
//! exponential by nature and guarded accordingly; the fast algorithms in
//! [`crate::tree`] and [`crate::optimize`] are tested against it.

use std::collections::HashSet;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{CpNet, IncompleteCpNet, Orientation, Outcome, PcpNet, RuleSlot, SlotId, Structure, VarId};

/// Largest slot count [`dominance_prob_oracle`] and [`optimal_prob_oracle`] will enumerate.
pub const MAX_ORACLE_SLOTS: usize = 24;
/// Largest number of unspecified slots [`enumerate_completions`] will expand.
pub const MAX_ABSENT_SLOTS: usize = 20;
/// Outcomes are packed into a `u64` during search.
pub const MAX_SEARCH_VARS: usize = 63;

/// Nets per work unit when summing over compatible nets. Fixed so the
/// summation order does not depend on the thread count.
const CHUNK: u64 = 1 << 10;

/// One worsening flip: `from` and `to` differ on `slot.var` only, and the
/// rule at `slot` prefers `from`'s value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlipStep {
    pub from: Outcome,
    pub to: Outcome,
    pub slot: RuleSlot,
}

/// Flat view of a structure for the search loops.
struct Compiled {
    parents: Vec<Vec<usize>>,
    offset: Vec<usize>,
}

impl Compiled {
    fn new(s: &Structure) -> Self {
        let parents = s.vars().map(|v| s.parents(v).iter().map(|p| p.0).collect()).collect();
        let offset = s.vars().map(|v| s.slot_id(RuleSlot { var: v, context: 0 }).0).collect();
        Compiled { parents, offset }
    }

    fn restricted(s: &Structure, vars: &[VarId]) -> (Self, Vec<usize>) {
        // `vars` must be closed under parents.
        let mut local = vec![usize::MAX; s.len()];
        for (i, v) in vars.iter().enumerate() {
            local[v.0] = i;
        }
        let parents = vars
            .iter()
            .map(|&v| s.parents(v).iter().map(|p| local[p.0]).collect())
            .collect();
        let offset = vars
            .iter()
            .map(|&v| s.slot_id(RuleSlot { var: v, context: 0 }).0)
            .collect();
        (Compiled { parents, offset }, local)
    }

    fn len(&self) -> usize {
        self.parents.len()
    }

    #[inline]
    fn slot(&self, v: usize, state: u64) -> usize {
        let ctx = self.parents[v]
            .iter()
            .fold(0usize, |acc, &p| acc << 1 | (state >> p & 1) as usize);
        self.offset[v] + ctx
    }

    /// Calls `f(v, next)` for every worsening flip out of `state`.
    #[inline]
    fn for_each_successor(&self, prefers_true: &[bool], state: u64, mut f: impl FnMut(usize, u64)) {
        for v in 0..self.len() {
            let current = state >> v & 1 == 1;
            if prefers_true[self.slot(v, state)] == current {
                f(v, state ^ 1 << v);
            }
        }
    }

    /// Whether `to` is reachable from `from` by one or more worsening flips.
    fn reaches(&self, prefers_true: &[bool], from: u64, to: u64) -> bool {
        let n = self.len();
        let mut stack = Vec::new();
        if n <= 16 {
            let mut seen = vec![0u64; (1usize << n).div_ceil(64)];
            let mut found = false;
            self.for_each_successor(prefers_true, from, |_, s| stack.push(s));
            while let Some(s) = stack.pop() {
                if s == to {
                    found = true;
                    break;
                }
                let (w, b) = ((s >> 6) as usize, s & 63);
                if seen[w] >> b & 1 == 1 {
                    continue;
                }
                seen[w] |= 1 << b;
                self.for_each_successor(prefers_true, s, |_, t| stack.push(t));
            }
            found
        } else {
            let mut seen = HashSet::new();
            self.for_each_successor(prefers_true, from, |_, s| stack.push(s));
            while let Some(s) = stack.pop() {
                if s == to {
                    return true;
                }
                if seen.insert(s) {
                    self.for_each_successor(prefers_true, s, |_, t| stack.push(t));
                }
            }
            false
        }
    }
}

fn prefers_table(n: &CpNet) -> Vec<bool> {
    n.table().iter().map(|o| o.preferred()).collect()
}

fn search_guard(s: &Structure) -> Result<()> {
    if s.len() > MAX_SEARCH_VARS {
        return Err(Error::TooLargeForOracle {
            what: "variable count",
            size: s.len(),
            limit: MAX_SEARCH_VARS,
        });
    }
    Ok(())
}

fn slot_guard(s: &Structure) -> Result<()> {
    if s.num_slots() > MAX_ORACLE_SLOTS {
        return Err(Error::TooLargeForOracle {
            what: "slot count",
            size: s.num_slots(),
            limit: MAX_ORACLE_SLOTS,
        });
    }
    Ok(())
}

/// All worsening flips leaving `o`, in variable order.
pub fn worsening_flips(n: &CpNet, o: &Outcome) -> Result<Vec<FlipStep>> {
    n.check_outcome(o)?;
    let s = n.structure();
    Ok(s.vars()
        .filter(|&v| n.rule_at(v, o).preferred() == o.get(v))
        .map(|v| FlipStep {
            from: o.clone(),
            to: o.flipped(v),
            slot: RuleSlot {
                var: v,
                context: o.context(s, v),
            },
        })
        .collect())
}

/// Every outcome one worsening flip away from `o`, in variable order.
pub fn worsening_successors(n: &CpNet, o: &Outcome) -> Result<Vec<Outcome>> {
    Ok(worsening_flips(n, o)?.into_iter().map(|f| f.to).collect())
}

/// Whether `n` entails `o ≻ o2`: some worsening sequence of at least one
/// flip leads from `o` to `o2`.
pub fn entails_oracle(n: &CpNet, o: &Outcome, o2: &Outcome) -> Result<bool> {
    n.check_outcome(o)?;
    n.check_outcome(o2)?;
    search_guard(n.structure())?;
    let c = Compiled::new(n.structure());
    Ok(c.reaches(&prefers_table(n), o.to_bits(), o2.to_bits()))
}

/// Orientation table of the `index`-th compatible net: slot `j` reads
/// `1 > 0` iff bit `j` of `index` is clear.
fn prefs_for_index(index: u64, slots: usize, buf: &mut Vec<bool>) {
    buf.clear();
    buf.extend((0..slots).map(|j| index >> j & 1 == 0));
}

fn mass(pn: &PcpNet, prefs: &[bool]) -> f64 {
    prefs
        .iter()
        .enumerate()
        .map(|(j, &t)| pn.prob(SlotId(j), Orientation::toward(t)))
        .product()
}

/// Sums `mass(N)` over compatible nets `N` selected by `keep`, in
/// enumeration order within fixed chunks and chunk order across them.
fn sum_over_nets(pn: &PcpNet, keep: impl Fn(&[bool]) -> bool + Sync) -> f64 {
    let slots = pn.structure().num_slots();
    let total = 1u64 << slots;
    let chunks = total.div_ceil(CHUNK);
    let partial: Vec<f64> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut buf = Vec::with_capacity(slots);
            let mut acc = 0.0;
            for index in c * CHUNK..((c + 1) * CHUNK).min(total) {
                prefs_for_index(index, slots, &mut buf);
                if keep(&buf) {
                    acc += mass(pn, &buf);
                }
            }
            acc
        })
        .collect();
    partial.into_iter().sum()
}

/// Every compatible deterministic net in enumeration order.
pub fn compatible_nets(s: &std::sync::Arc<Structure>) -> Result<Vec<CpNet>> {
    slot_guard(s)?;
    let slots = s.num_slots();
    Ok((0u64..1 << slots)
        .map(|index| CpNet::from_fn(s.clone(), |j| Orientation::toward(index >> j.0 & 1 == 0)))
        .collect())
}

/// Probability mass of the compatible nets entailing `o ≻ o2`.
pub fn dominance_prob_oracle(pn: &PcpNet, o: &Outcome, o2: &Outcome) -> Result<f64> {
    pn.check_outcome(o)?;
    pn.check_outcome(o2)?;
    let s = pn.structure();
    slot_guard(s)?;
    search_guard(s)?;
    if o == o2 {
        return Ok(0.0);
    }
    let c = Compiled::new(s);
    let (from, to) = (o.to_bits(), o2.to_bits());
    Ok(sum_over_nets(pn, |prefs| c.reaches(prefs, from, to)))
}

/// The undominated outcome of a net, found by marking every target of a
/// worsening flip. `None` if there is not exactly one.
fn undominated(c: &Compiled, prefs: &[bool]) -> Option<u64> {
    let n = c.len();
    let mut dominated = vec![false; 1 << n];
    for state in 0..1u64 << n {
        c.for_each_successor(prefs, state, |_, t| dominated[t as usize] = true);
    }
    let mut free = dominated.iter().enumerate().filter(|(_, d)| !**d);
    match (free.next(), free.next()) {
        (Some((i, _)), None) => Some(i as u64),
        _ => None,
    }
}

/// Probability mass of the compatible nets whose unique optimum is `o`.
pub fn optimal_prob_oracle(pn: &PcpNet, o: &Outcome) -> Result<f64> {
    pn.check_outcome(o)?;
    let s = pn.structure();
    slot_guard(s)?;
    search_guard(s)?;
    let c = Compiled::new(s);
    let target = o.to_bits();
    Ok(sum_over_nets(pn, |prefs| undominated(&c, prefs) == Some(target)))
}

/// All completions of an incomplete net: unspecified slots in slot order,
/// `1 > 0` before `0 > 1`.
pub fn enumerate_completions(n: &IncompleteCpNet) -> Result<Vec<CpNet>> {
    let absent = n.absent_slots();
    if absent.len() > MAX_ABSENT_SLOTS {
        return Err(Error::TooLargeForOracle {
            what: "unspecified slot count",
            size: absent.len(),
            limit: MAX_ABSENT_SLOTS,
        });
    }
    let s = n.structure();
    Ok((0u64..1 << absent.len())
        .map(|index| {
            let mut table: Vec<Option<Orientation>> = n.table().to_vec();
            for (bit, slot) in absent.iter().enumerate() {
                table[slot.0] = Some(Orientation::toward(index >> bit & 1 == 0));
            }
            CpNet::new(s.clone(), table.into_iter().map(Option::unwrap).collect()).expect("filled table is complete")
        })
        .collect())
}

/// Whether some completion of `n` entails `o ≻ o2`, by trying them all.
pub fn completion_dominance_oracle(n: &IncompleteCpNet, o: &Outcome, o2: &Outcome) -> Result<bool> {
    for net in enumerate_completions(n)? {
        if entails_oracle(&net, o, o2)? {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Largest number of value changes of `x` over worsening sequences from
/// `o` to `o2` restricted to `x` and its ancestors. The empty sequence
/// counts, so equal restrictions give at least `Some(0)`. `None` when no
/// sequence exists.
pub fn max_alternations_oracle(n: &CpNet, o: &Outcome, o2: &Outcome, x: VarId) -> Result<Option<usize>> {
    n.check_outcome(o)?;
    n.check_outcome(o2)?;
    let s = n.structure();
    let vars = s.ancestors_inclusive(x);
    if vars.len() > 20 {
        return Err(Error::TooLargeForOracle {
            what: "ancestor set",
            size: vars.len(),
            limit: 20,
        });
    }
    let (c, local) = Compiled::restricted(s, &vars);
    let pack = |o: &Outcome| {
        vars.iter()
            .enumerate()
            .fold(0u64, |acc, (i, &v)| acc | (o.get(v) as u64) << i)
    };
    let (from, to) = (pack(o), pack(o2));
    let prefs = prefers_table(n);
    let xi = local[x.0];

    // Longest path in the (acyclic) flip graph, weighting flips of `x` by 1.
    #[derive(Clone, Copy)]
    enum Memo {
        Open,
        Done(Option<usize>),
    }
    fn visit(c: &Compiled, prefs: &[bool], xi: usize, to: u64, state: u64, memo: &mut [Option<Memo>]) -> Option<usize> {
        match memo[state as usize] {
            Some(Memo::Done(r)) => return r,
            Some(Memo::Open) => unreachable!("worsening flips over an acyclic net cannot cycle"),
            None => {}
        }
        memo[state as usize] = Some(Memo::Open);
        let mut best = (state == to).then_some(0);
        let mut next = Vec::new();
        c.for_each_successor(prefs, state, |v, t| next.push((v, t)));
        for (v, t) in next {
            if let Some(k) = visit(c, prefs, xi, to, t, memo) {
                let k = k + (v == xi) as usize;
                best = Some(best.map_or(k, |b: usize| b.max(k)));
            }
        }
        memo[state as usize] = Some(Memo::Done(best));
        best
    }
    let mut memo = vec![None; 1 << vars.len()];
    Ok(visit(&c, &prefs, xi, to, from, &mut memo))
}
