//! Generator-and-verifier toolkit for stable-roommates instances with ties
//! and incomplete preference lists (SRTI).
//!
//! The crate produces benchmark instances that are satisfiable by
//! construction and carry a certified lower bound on their number of stable
//! matchings. Small "seed" instances with a witness set of `k` distinct
//! stable matchings come from [`seedgen`]; [`combine`] renames seeds onto
//! disjoint agent blocks and probabilistically cross-links their preference
//! lists under guards that keep every union of per-seed witnesses stable,
//! certifying the product of the witness-set sizes as a lower bound.
//!
//! Around that sit the verification tools: blocking-pair semantics on
//! [`Instance`] and [`Matching`], exhaustive enumeration and egalitarian
//! optimization in [`enumerate`], brute-force cross-checks in [`naive`], an
//! Erdős–Rényi baseline generator in [`baseline`], and the durable text
//! formats in [`io`].

pub mod baseline;
pub mod combine;
pub mod enumerate;
pub mod instance;
pub mod io;
pub mod matching;
pub mod naive;
pub mod seedgen;
mod stability;
#[cfg(test)]
pub(crate) mod testutil;

pub use instance::{AgentId, Instance, InstanceError, PreferenceList};
pub use matching::{EgalCost, Matching, MatchingError};
