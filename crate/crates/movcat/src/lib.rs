//! Deciders and witness constructions for movability in finite categories.
//!
//! The crate works with small categories given by explicit composition
//! tables. On top of those it builds the classical shape-theoretic
//! apparatus at desk scale: comma categories, movability and uniform
//! movability witnesses, inverse systems with their own movability
//! notions, and the bridge theorem connecting an expansion's inverse
//! system with the comma category of its apex.
//!
//! Everything is deterministic: enumeration follows declaration order,
//! searches take the first admissible candidate, and random generation
//! is seeded. Negative answers come with certificates, positive answers
//! with witnesses that independent verifiers re-check.

pub mod cli;
pub mod construct;
mod csp;
pub mod fincat;
pub mod fixtures;
pub mod gen;
pub mod movability;
pub mod prosys;
pub mod report;
pub mod shapebridge;
pub mod shipped;
pub mod workspace;

pub use fincat::{FinCategory, MorId, ObjId};
