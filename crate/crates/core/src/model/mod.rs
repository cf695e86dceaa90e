//! Structures, rule tables and outcomes.

mod net;
mod outcome;
mod structure;

pub use net::{CpNet, IncompleteCpNet, Orientation, PcpNet};
pub use outcome::{all_outcomes, Outcome, OutcomeDisplay};
pub use structure::{
    validate_structure, RuleSlot, ShapeClass, SlotId, Structure, ValidationReport, VarId, MAX_PARENTS,
};
