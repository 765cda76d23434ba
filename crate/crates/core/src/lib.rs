//! Brownian net approximations on the space-time lattice: branching-coalescing
//! arrow fields, their extremal and reflected paths, special sites, and the
//! sticky/reflected diffusions and excursion laws that describe them in the
//! scaling limit.

// Range checks are written `!(x > 0.0)` so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod classify;
pub mod cli;
pub mod error;
pub mod excursion;
pub mod invariants;
pub mod lattice;
pub mod oracle;
pub mod paths;
pub mod rng;
pub mod sde;
pub mod stats;

pub use error::{Error, Result};
pub use lattice::{sample_arrow_field, Arrow, ArrowField, LatticeConfig};
pub use paths::{DualLatticePath, LatticePath};
pub use stats::EstimateReport;
