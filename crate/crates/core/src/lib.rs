//! Probabilistic conditional preference networks over binary variables.
//!
//! A [`PcpNet`](model::PcpNet) attaches to every rule slot of a CP-net the
//! probability that the rule reads `1 > 0`, which induces an independent
//! distribution over deterministic [`CpNet`](model::CpNet)s sharing its
//! structure. The crate answers dominance and optimality queries on such
//! distributions:
//!
//! - [`tree`]: exact dominance probability on forests, linear-time
//!   deterministic dominance and completion existence.
//! - [`optimize`]: probability of optimality and the most probably optimal
//!   outcome.
//! - [`aggregate`]: summarising a population of CP-nets and hypercube-wise
//!   Condorcet winners.
//! - [`oracle`]: exhaustive reference semantics used to test all of the above.
//! - [`io`]: the text format and a seeded instance generator.

pub mod aggregate;
pub mod error;
pub mod io;
pub mod model;
pub mod optimize;
pub mod oracle;
pub mod tree;

pub use error::{Error, Result};
pub use model::{CpNet, IncompleteCpNet, Orientation, Outcome, PcpNet, RuleSlot, SlotId, Structure, VarId};
