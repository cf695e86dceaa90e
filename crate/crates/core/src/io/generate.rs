//! Seeded random instances.
//!
//! All randomness comes from ChaCha8 streams, and probabilities are drawn
//! from the grid `{0.05, 0.10, ..., 0.95}`, so a seed gives the same file
//! on every platform.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::seq::index::sample;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::model::{CpNet, IncompleteCpNet, Orientation, Outcome, PcpNet, Structure, VarId};

use super::format::NetDocument;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shape {
    /// `V{i-1} -> V{i}`
    Chain,
    /// `V0 -> V{i}` for every `i > 0`
    Star,
    /// Binary heap layout: `V{(i-1)/2} -> V{i}`
    Balanced,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Det,
    Pcp,
}

impl FromStr for Shape {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "chain" => Ok(Shape::Chain),
            "star" => Ok(Shape::Star),
            "balanced" => Ok(Shape::Balanced),
            _ => Err(format!("unknown shape `{s}` (expected chain, star or balanced)")),
        }
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Shape::Chain => "chain",
            Shape::Star => "star",
            Shape::Balanced => "balanced",
        })
    }
}

impl FromStr for Kind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "det" => Ok(Kind::Det),
            "pcp" => Ok(Kind::Pcp),
            _ => Err(format!("unknown kind `{s}` (expected det or pcp)")),
        }
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Forest of the given shape over `V0..V{n-1}`.
pub fn shaped_structure(n: usize, shape: Shape) -> Structure {
    let names = (0..n).map(|i| format!("V{i}")).collect();
    let parents = (0..n)
        .map(|i| match (i, shape) {
            (0, _) => vec![],
            (_, Shape::Chain) => vec![i - 1],
            (_, Shape::Star) => vec![0],
            (_, Shape::Balanced) => vec![(i - 1) / 2],
        })
        .collect();
    Structure::new(names, parents).expect("shaped structures are forests")
}

/// One of `0.05, 0.10, ..., 0.95`.
pub fn grid_probability<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.gen_range(1..=19u32) as f64 / 20.0
}

pub fn random_orientation<R: Rng + ?Sized>(rng: &mut R) -> Orientation {
    Orientation::toward(rng.gen())
}

pub fn random_pcp<R: Rng + ?Sized>(rng: &mut R, s: Arc<Structure>) -> PcpNet {
    let table = (0..s.num_slots()).map(|_| grid_probability(rng)).collect();
    PcpNet::new(s, table).expect("grid probabilities are valid")
}

pub fn random_cpnet<R: Rng + ?Sized>(rng: &mut R, s: Arc<Structure>) -> CpNet {
    CpNet::from_fn(s, |_| random_orientation(rng))
}

/// A random net with exactly `min(absent, slots)` slots left open.
pub fn random_incomplete<R: Rng + ?Sized>(rng: &mut R, s: Arc<Structure>, absent: usize) -> IncompleteCpNet {
    let slots = s.num_slots();
    let mut table: Vec<Option<Orientation>> = (0..slots).map(|_| Some(random_orientation(rng))).collect();
    for i in sample(rng, slots, absent.min(slots)) {
        table[i] = None;
    }
    IncompleteCpNet::new(s, table).expect("table length matches")
}

/// Random forest over `V0..V{n-1}`: each variable picks no parent or one
/// earlier variable, uniformly.
pub fn random_forest<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Structure {
    let names = (0..n).map(|i| format!("V{i}")).collect();
    let parents = (0..n)
        .map(|i| {
            let pick = rng.gen_range(0..=i);
            if pick == i {
                vec![]
            } else {
                vec![pick]
            }
        })
        .collect();
    Structure::new(names, parents).expect("parents precede children")
}

/// Random acyclic structure where each variable has up to `max_parents`
/// earlier parents.
pub fn random_dag<R: Rng + ?Sized>(rng: &mut R, n: usize, max_parents: usize) -> Structure {
    let names = (0..n).map(|i| format!("V{i}")).collect();
    let parents = (0..n)
        .map(|i| {
            let m = rng.gen_range(0..=max_parents.min(i));
            let mut ps = sample(rng, i.max(1), m).into_vec();
            ps.sort_unstable();
            ps
        })
        .collect();
    Structure::new(names, parents).expect("parents precede children")
}

pub fn random_outcome<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Outcome {
    Outcome::new((0..n).map(|_| rng.gen()).collect())
}

/// `o` with exactly `k` (clamped to `o.len()`) random variables flipped.
pub fn flip_random<R: Rng + ?Sized>(rng: &mut R, o: &Outcome, k: usize) -> Outcome {
    let mut out = o.clone();
    for i in sample(rng, o.len(), k.min(o.len())) {
        out.set(VarId(i), !o.get(VarId(i)));
    }
    out
}

/// The instance printed by `pcpnet gen`.
pub fn generate(n: usize, shape: Shape, kind: Kind, seed: u64) -> NetDocument {
    let mut r = rng(seed);
    let s = Arc::new(shaped_structure(n, shape));
    match kind {
        Kind::Det => NetDocument::Det(random_cpnet(&mut r, s)),
        Kind::Pcp => NetDocument::Pcp(random_pcp(&mut r, s)),
    }
}
