//! Text format and instance generation.

mod format;
pub mod generate;

pub use format::{parse_net, parse_outcome, serialize, DocumentKind, NetDocument};
