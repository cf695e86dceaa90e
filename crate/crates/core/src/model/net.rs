use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::outcome::Outcome;
use super::structure::{SlotId, Structure, VarId};
use crate::error::{Error, Result};

/// Local order over a binary domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Orientation {
    /// `1 > 0`
    PreferTrue,
    /// `0 > 1`
    PreferFalse,
}

impl Orientation {
    /// The orientation whose preferred value is `value`.
    pub fn toward(value: bool) -> Self {
        if value {
            Orientation::PreferTrue
        } else {
            Orientation::PreferFalse
        }
    }

    pub fn preferred(self) -> bool {
        self == Orientation::PreferTrue
    }

    pub fn reversed(self) -> Self {
        Orientation::toward(!self.preferred())
    }
}

fn same_structure(a: &Arc<Structure>, b: &Arc<Structure>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

fn check_outcome(s: &Structure, o: &Outcome) -> Result<()> {
    if o.len() != s.len() {
        return Err(Error::OutcomeMismatch {
            expected: s.len(),
            got: o.len(),
        });
    }
    Ok(())
}

/// A complete deterministic CP-net: one orientation per rule slot.
#[derive(Debug, Clone, PartialEq)]
pub struct CpNet {
    structure: Arc<Structure>,
    table: Vec<Orientation>,
}

impl CpNet {
    pub fn new(structure: Arc<Structure>, table: Vec<Orientation>) -> Result<Self> {
        if table.len() != structure.num_slots() {
            let missing = structure.slot(SlotId(table.len().min(structure.num_slots())));
            return Err(Error::IncompleteTable(structure.slot_label(missing)));
        }
        Ok(CpNet { structure, table })
    }

    pub fn from_fn(structure: Arc<Structure>, f: impl FnMut(SlotId) -> Orientation) -> Self {
        let table = (0..structure.num_slots()).map(SlotId).map(f).collect();
        CpNet { structure, table }
    }

    pub fn structure(&self) -> &Arc<Structure> {
        &self.structure
    }

    pub fn table(&self) -> &[Orientation] {
        &self.table
    }

    pub fn orientation(&self, slot: SlotId) -> Orientation {
        self.table[slot.0]
    }

    /// Orientation of the rule on `v` that applies under `o`.
    pub fn rule_at(&self, v: VarId, o: &Outcome) -> Orientation {
        let s = &self.structure;
        let slot = s.slot_id(super::RuleSlot {
            var: v,
            context: o.context(s, v),
        });
        self.table[slot.0]
    }

    pub fn check_outcome(&self, o: &Outcome) -> Result<()> {
        check_outcome(&self.structure, o)
    }

    pub fn is_compatible(&self, other: &Arc<Structure>) -> bool {
        same_structure(&self.structure, other)
    }
}

/// A deterministic CP-net whose table may leave slots unspecified.
#[derive(Debug, Clone, PartialEq)]
pub struct IncompleteCpNet {
    structure: Arc<Structure>,
    table: Vec<Option<Orientation>>,
}

impl IncompleteCpNet {
    pub fn new(structure: Arc<Structure>, table: Vec<Option<Orientation>>) -> Result<Self> {
        if table.len() != structure.num_slots() {
            return Err(Error::InvalidStructure(format!(
                "table has {} entries, structure has {} slots",
                table.len(),
                structure.num_slots()
            )));
        }
        Ok(IncompleteCpNet { structure, table })
    }

    pub fn structure(&self) -> &Arc<Structure> {
        &self.structure
    }

    pub fn table(&self) -> &[Option<Orientation>] {
        &self.table
    }

    pub fn orientation(&self, slot: SlotId) -> Option<Orientation> {
        self.table[slot.0]
    }

    pub fn absent_slots(&self) -> Vec<SlotId> {
        self.table
            .iter()
            .enumerate()
            .filter(|(_, o)| o.is_none())
            .map(|(i, _)| SlotId(i))
            .collect()
    }

    /// The net itself when every slot is specified.
    pub fn complete(&self) -> Result<CpNet> {
        let table = self
            .table
            .iter()
            .enumerate()
            .map(|(i, o)| {
                o.ok_or_else(|| Error::IncompleteTable(self.structure.slot_label(self.structure.slot(SlotId(i)))))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(CpNet {
            structure: self.structure.clone(),
            table,
        })
    }

    pub fn check_outcome(&self, o: &Outcome) -> Result<()> {
        check_outcome(&self.structure, o)
    }
}

impl From<CpNet> for IncompleteCpNet {
    fn from(n: CpNet) -> Self {
        IncompleteCpNet {
            structure: n.structure,
            table: n.table.into_iter().map(Some).collect(),
        }
    }
}

/// A probabilistic CP-net: per slot, the probability that the rule reads
/// `1 > 0`. Slots are independent.
///
/// The probability of `0 > 1` is kept alongside. It is `1 - p` unless the
/// net was built from counts, where both sides are stored as exact
/// fractions of the population.
#[derive(Debug, Clone, PartialEq)]
pub struct PcpNet {
    structure: Arc<Structure>,
    table: Vec<f64>,
    complement: Vec<f64>,
}

fn check_probabilities(structure: &Structure, table: &[f64]) -> Result<()> {
    if table.len() != structure.num_slots() {
        let missing = structure.slot(SlotId(table.len().min(structure.num_slots())));
        return Err(Error::IncompleteTable(structure.slot_label(missing)));
    }
    if let Some((i, &p)) = table.iter().enumerate().find(|(_, p)| !(0.0..=1.0).contains(*p)) {
        return Err(Error::InvalidProbability {
            slot: structure.slot_label(structure.slot(SlotId(i))),
            value: p,
        });
    }
    Ok(())
}

impl PcpNet {
    pub fn new(structure: Arc<Structure>, table: Vec<f64>) -> Result<Self> {
        check_probabilities(&structure, &table)?;
        let complement = table.iter().map(|p| 1.0 - p).collect();
        Ok(PcpNet {
            structure,
            table,
            complement,
        })
    }

    /// Per slot, the fraction `counts[i] / population` of nets reading
    /// `1 > 0`, with the `0 > 1` side computed as its own fraction.
    pub fn from_counts(structure: Arc<Structure>, counts: &[usize], population: usize) -> Result<Self> {
        if population == 0 {
            return Err(Error::EmptyPopulation);
        }
        let m = population as f64;
        let table: Vec<f64> = counts.iter().map(|&c| c as f64 / m).collect();
        check_probabilities(&structure, &table)?;
        let complement = counts.iter().map(|&c| (population - c) as f64 / m).collect();
        Ok(PcpNet {
            structure,
            table,
            complement,
        })
    }

    /// The PCP-net that puts all its mass on `net`.
    pub fn degenerate(net: &CpNet) -> Self {
        let table: Vec<f64> = net
            .table
            .iter()
            .map(|o| if o.preferred() { 1.0 } else { 0.0 })
            .collect();
        PcpNet {
            structure: net.structure.clone(),
            complement: table.iter().map(|p| 1.0 - p).collect(),
            table,
        }
    }

    pub fn structure(&self) -> &Arc<Structure> {
        &self.structure
    }

    pub fn table(&self) -> &[f64] {
        &self.table
    }

    /// Probability that `slot` reads `1 > 0`.
    pub fn prob_true(&self, slot: SlotId) -> f64 {
        self.table[slot.0]
    }

    pub fn prob(&self, slot: SlotId, orientation: Orientation) -> f64 {
        match orientation {
            Orientation::PreferTrue => self.table[slot.0],
            Orientation::PreferFalse => self.complement[slot.0],
        }
    }

    pub fn check_outcome(&self, o: &Outcome) -> Result<()> {
        check_outcome(&self.structure, o)
    }

    /// Probability mass of a compatible deterministic net.
    pub fn net_probability(&self, net: &CpNet) -> Result<f64> {
        if !net.is_compatible(&self.structure) {
            return Err(Error::IncompatibleStructure);
        }
        Ok(net
            .table
            .iter()
            .enumerate()
            .map(|(i, &o)| self.prob(SlotId(i), o))
            .product())
    }

    /// Draws one compatible net, each slot independently.
    pub fn sample_net(&self, seed: u64) -> CpNet {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        self.sample_with(&mut rng)
    }

    /// Draws `count` nets from a single seeded stream.
    pub fn sample_nets(&self, seed: u64, count: usize) -> Vec<CpNet> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..count).map(|_| self.sample_with(&mut rng)).collect()
    }

    pub fn sample_with<R: Rng + ?Sized>(&self, rng: &mut R) -> CpNet {
        let table = self
            .table
            .iter()
            .map(|&p| Orientation::toward(rng.gen::<f64>() < p))
            .collect();
        CpNet {
            structure: self.structure.clone(),
            table,
        }
    }
}
