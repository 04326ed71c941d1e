//! Sofic shifts: presentations, Fischer covers, invariants, and explicit
//! marker-based embeddings of a subshift into an almost-Markov target.

pub mod error;
pub mod presentations;
pub mod report;

pub use error::{Error, Result};
pub use report::{Report, Verdict};
pub mod fischer;
pub mod language;
pub mod necklace;
pub mod invariants;
pub mod marker;
pub mod codec;
