//! Matching invariants of bipartite graphs, centered on graphs whose induced
//! and ordered matching numbers agree. Connected graphs where both numbers
//! equal two are counted exactly.

pub mod bigraph;
pub mod counting;
pub mod error;
pub mod families;
pub mod invariants;
pub mod kseq;
pub mod oracle;
pub mod profile;

pub use bigraph::{canonical_form, BipartiteGraph, CanonicalKey, SideMode};
pub use error::{Error, Result};
pub use kseq::KSequence;
pub use profile::NeighborhoodProfile;
