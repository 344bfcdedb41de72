//! Protocol complexes of round-based distributed systems as chromatic
//! augmented semi-simplicial sets, with iteration, temporal-epistemic model
//! checking, task solvability and GF(2) homology.

mod error;

pub mod adversary;
pub mod cset;
pub mod decisions;
pub mod dot;
pub mod homology;
pub mod inputs;
pub mod io;
pub mod iterate;
pub mod logic;
pub mod protocol;
pub mod tasks;

pub use error::{Error, Result};
