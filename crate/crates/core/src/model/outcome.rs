use std::cmp::Ordering;
use std::fmt;

use super::structure::{Structure, VarId};

/// A total assignment of binary values to the variables of a structure.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Outcome {
    values: Vec<bool>,
}

impl Outcome {
    pub fn new(values: Vec<bool>) -> Self {
        Outcome { values }
    }

    pub fn uniform(n: usize, value: bool) -> Self {
        Outcome { values: vec![value; n] }
    }

    /// Bit `i` of `bits` is the value of variable `i`.
    pub fn from_bits(n: usize, bits: u64) -> Self {
        debug_assert!(n <= 64);
        Outcome {
            values: (0..n).map(|i| bits >> i & 1 == 1).collect(),
        }
    }

    pub fn to_bits(&self) -> u64 {
        debug_assert!(self.values.len() <= 64);
        self.values
            .iter()
            .enumerate()
            .fold(0, |acc, (i, &b)| acc | (b as u64) << i)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[bool] {
        &self.values
    }

    pub fn get(&self, v: VarId) -> bool {
        self.values[v.0]
    }

    pub fn set(&mut self, v: VarId, value: bool) {
        self.values[v.0] = value;
    }

    pub fn flipped(&self, v: VarId) -> Outcome {
        let mut o = self.clone();
        o.values[v.0] = !o.values[v.0];
        o
    }

    /// Variables on which the two outcomes disagree.
    pub fn differing(&self, other: &Outcome) -> Vec<VarId> {
        self.values
            .iter()
            .zip(&other.values)
            .enumerate()
            .filter(|(_, (a, b))| a != b)
            .map(|(i, _)| VarId(i))
            .collect()
    }

    /// Packed parent assignment of `v` under this outcome.
    pub fn context(&self, s: &Structure, v: VarId) -> u32 {
        Structure::pack_context(s.parents(v).iter().map(|&p| self.get(p)))
    }

    /// Lexicographic comparison under the structure's topological order,
    /// with 0 before 1.
    pub fn lex_cmp(&self, other: &Outcome, s: &Structure) -> Ordering {
        s.topological_order()
            .iter()
            .map(|&v| self.get(v).cmp(&other.get(v)))
            .find(|o| o.is_ne())
            .unwrap_or(Ordering::Equal)
    }

    /// `A=1,B=0` rendering using the structure's names.
    pub fn display<'a>(&'a self, s: &'a Structure) -> OutcomeDisplay<'a> {
        OutcomeDisplay {
            outcome: self,
            structure: s,
        }
    }
}

pub struct OutcomeDisplay<'a> {
    outcome: &'a Outcome,
    structure: &'a Structure,
}

impl fmt::Display for OutcomeDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.structure.vars().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}={}", self.structure.name(v), self.outcome.get(v) as u8)?;
        }
        Ok(())
    }
}

/// Every outcome over `s`, in the lexicographic order of [`Outcome::lex_cmp`].
pub fn all_outcomes(s: &Structure) -> impl Iterator<Item = Outcome> + '_ {
    let n = s.len();
    assert!(n < 64, "cannot enumerate outcomes over {n} variables");
    (0u64..1 << n).map(move |counter| {
        let mut values = vec![false; n];
        for (rank, &v) in s.topological_order().iter().enumerate() {
            values[v.0] = counter >> (n - 1 - rank) & 1 == 1;
        }
        Outcome::new(values)
    })
}
