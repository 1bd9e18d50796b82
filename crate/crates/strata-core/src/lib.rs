//! Combinatorics of the divisor strata of a resolution of singularities.
//!
//! The central object is the [`structure::StrataStructure`]: a downward-closed
//! family of subsets of a finite index set, recording which intersections of
//! the components of a normal-crossings divisor are nonempty. On top of it
//! this crate builds:
//!
//! * k-paths, connectivity and elementary homotopies ([`structure`]),
//! * combinatorial blow-ups and blow-up sequences ([`blowup`]),
//! * data of nodal strata, separating blocks and separator sets ([`nodal`]),
//! * parity colorings and component counting ([`parity`]),
//! * edge-path group presentations and simple-connectedness verdicts ([`pi1`]),
//! * exact symbolic residue models of logarithmic foliations ([`residue`]),
//! * partial-separatrix coverage checks ([`separatrix`]),
//! * strict-tangent control invariants over exact rational arithmetic
//!   ([`control`]).
//!
//! Everything is a pure function over immutable values; collections are
//! ordered so that all outputs are deterministic and byte-stable. The crate
//! is `no_std` (with `alloc`); IO, file formats and the command line live in
//! the companion `strata-cli` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod blowup;
pub mod control;
pub mod corpus;
pub mod nodal;
pub mod parity;
pub mod pi1;
pub mod residue;
pub mod separatrix;
pub mod structure;

mod snf;

#[cfg(test)]
pub(crate) mod fixtures;

pub use structure::{IndexId, KPath, StrataStructure, Stratum};
