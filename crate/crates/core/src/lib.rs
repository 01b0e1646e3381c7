//! Exact covering systems of the integers built by repeated splitting.
//!
//! The crate counts and enumerates natural exact covering systems, checks
//! that their counting series is the compositional inverse of the Möbius
//! series, recognizes naturality of a given system, and evaluates the
//! constants governing the growth of the counts with certified error bounds.

pub mod asymptotics;
pub mod combinat;
pub mod congruence;
pub mod counting;
pub mod ecs;
pub mod enumeration;
pub mod error;
pub mod fixed;
pub mod polybasis;
pub mod series;
pub mod trees;

pub use congruence::{CoveringSystem, ResidueClass};
pub use counting::{CountTable, Lcm, LcmCountTable};
pub use error::{Error, Result};
pub use series::IntSeries;
pub use trees::Tree;
