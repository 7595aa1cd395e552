//! Exact-arithmetic divisor-class calculus on the moduli spaces of
//! n-pointed m-stable genus-one curves.
//!
//! Everything is computed over the rationals with arbitrary precision:
//! tautological-class expansions in the boundary basis ([`picard`]),
//! birational push/pull and discrepancies ([`contraction`]), the chamber
//! decomposition of the slope line ([`chambers`]), boundary-stratum
//! combinatorics and test curves ([`strata`]), intersection pairings and
//! finite positivity sweeps ([`positivity`]), dual graphs of degenerate
//! fibers ([`dualgraph`]) and their stable reduction ([`reduction`]).

pub mod chambers;
pub mod contraction;
pub mod dualgraph;
pub mod error;
pub mod picard;
pub mod positivity;
pub mod rational;
pub mod reduction;
pub mod selfcheck;
pub mod strata;

pub use error::Error;
pub use picard::{DivisorClass, MarkSet, Space, TautClass};
pub use rational::Rat;
